// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlink/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "qlink/errors.hpp"
#include "qlink/units.hpp"

namespace qlink {

std::complex<double> DriveEnvelope::sample(std::size_t i) const {
  return std::polar(g_mag[i], phase[i]);
}

std::complex<double> DriveEnvelope::value_at(double time) const {
  if (t.empty() || time < t.front() || time > t.back() || time > t_stop) return {0.0, 0.0};
  auto it = std::upper_bound(t.begin(), t.end(), time);
  if (it == t.end()) return sample(t.size() - 1);
  const auto hi = static_cast<std::size_t>(it - t.begin());
  const auto lo = hi - 1;
  if (t[hi] > t_stop) return sample(lo);  // hold until the stop time
  const double w = (time - t[lo]) / (t[hi] - t[lo]);
  return (1.0 - w) * sample(lo) + w * sample(hi);
}

StarkModel default_stark_model_a() { return {4.0, 6.0}; }
StarkModel default_stark_model_b() { return {4.0, 6.7}; }

std::vector<double> uniform_grid(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || t_end < t_start) throw ValidationError("uniform_grid: invalid range or step");
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 0.5)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t_start + static_cast<double>(i) * dt;
  return t;
}

std::vector<double> symmetric_grid(double half_width, double dt) {
  if (!(dt > 0.0) || half_width < 0.0) throw ValidationError("symmetric_grid: invalid range or step");
  const auto m = static_cast<long>(std::ceil(half_width / dt - 1e-9));
  std::vector<double> t(static_cast<std::size_t>(2 * m + 1));
  for (long k = -m; k <= m; ++k) t[static_cast<std::size_t>(k + m)] = static_cast<double>(k) * dt;
  return t;
}

double photon_envelope(double t, double kappa_eff) {
  return 0.5 * std::sqrt(kappa_eff) / std::cosh(0.5 * kappa_eff * t);
}

double emission_drive_value(double t, double kappa_eff, double kappa_T) {
  const double r = kappa_T / kappa_eff;
  const double x = kappa_eff * t;
  if (x <= 0.0) {
    const double v = std::exp(x);
    return kappa_eff / (4.0 * std::cosh(0.5 * x)) * (1.0 - v + (1.0 + v) * r) /
           std::sqrt((1.0 + v) * r - v);
  }
  // Same expression divided through by e^x to stay finite for large t.
  const double u = std::exp(-x);
  const double rad = (1.0 + u) * r - 1.0;
  return kappa_eff * (u - 1.0 + (u + 1.0) * r) / (2.0 * (1.0 + u) * std::sqrt(rad));
}

DriveEnvelope emission_drive(const std::vector<double>& t, double kappa_eff, double kappa_T) {
  if (!(kappa_eff > 0.0)) throw ValidationError("emission_drive: kappa_eff must be positive");
  if (kappa_eff > kappa_T * (1.0 + 1e-12)) {
    throw ValidationError("emission_drive: kappa_eff exceeds kappa_T");
  }
  if (t.size() < 2) throw ValidationError("emission_drive: grid too short");
  const double span = 6.0 / kappa_eff;
  if (t.front() > -span * (1.0 - 1e-9) || t.back() < span * (1.0 - 1e-9)) {
    throw ValidationError(fmt::format("emission_drive: grid must span +-{:.3f} ns", span));
  }
  DriveEnvelope env;
  env.t = t;
  env.g_mag.resize(t.size());
  env.phase.assign(t.size(), 0.0);
  env.kappa_eff = kappa_eff;
  env.kappa_T = kappa_T;
  const double k_t = std::max(kappa_T, kappa_eff);
  for (std::size_t i = 0; i < t.size(); ++i) env.g_mag[i] = emission_drive_value(t[i], kappa_eff, k_t);
  return env;
}

DriveEnvelope absorption_drive(const DriveEnvelope& emission, bool conjugate) {
  DriveEnvelope out = emission;
  const std::size_t n = emission.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    out.t[i] = -emission.t[j];
    out.g_mag[i] = emission.g_mag[j];
    out.phase[i] = conjugate ? -emission.phase[j] : emission.phase[j];
  }
  // A truncation at tau becomes a late start at -tau; the zeroed samples carry it.
  out.t_stop = std::numeric_limits<double>::infinity();
  return out;
}

std::vector<double> stark_shift(const DriveEnvelope& env, const StarkModel& model) {
  if (model.lin_coeff == 0.0) throw ValidationError("stark model: lin_coeff must be nonzero");
  std::vector<double> shift(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double eps = units::to_mhz(env.g_mag[i]) / model.lin_coeff;
    shift[i] = units::mhz(model.quad_coeff * eps * eps);
  }
  return shift;
}

DriveEnvelope stark_phase_track(const DriveEnvelope& env, const StarkModel& model) {
  const auto shift = stark_shift(env, model);
  DriveEnvelope out = env;
  if (env.size() == 0) return out;
  out.phase[0] = 0.0;
  for (std::size_t i = 1; i < env.size(); ++i) {
    out.phase[i] = out.phase[i - 1] - 0.5 * (shift[i - 1] + shift[i]) * (env.t[i] - env.t[i - 1]);
  }
  return out;
}

DriveEnvelope truncate(const DriveEnvelope& env, double tau) {
  if (env.size() == 0 || tau < env.t.front() || tau > env.t.back()) {
    throw ValidationError("truncate: tau outside the envelope grid");
  }
  DriveEnvelope out = env;
  if (tau == env.t.back()) return out;
  if (tau == env.t.front()) {
    std::fill(out.g_mag.begin(), out.g_mag.end(), 0.0);
    out.t_stop = tau;
    return out;
  }
  // Phase at tau by linear interpolation, then frozen.
  auto it = std::upper_bound(env.t.begin(), env.t.end(), tau);
  const auto hi = static_cast<std::size_t>(it - env.t.begin());
  const auto lo = hi - 1;
  const double w = (tau - env.t[lo]) / (env.t[hi] - env.t[lo]);
  const double frozen = (1.0 - w) * env.phase[lo] + w * env.phase[hi];
  for (std::size_t i = hi; i < env.size(); ++i) {
    out.g_mag[i] = 0.0;
    out.phase[i] = frozen;
  }
  out.t_stop = std::min(env.t_stop, tau);
  return out;
}

DriveEnvelope shift_time(DriveEnvelope env, double offset) {
  for (auto& x : env.t) x += offset;
  env.t_stop += offset;
  return env;
}

DriveEnvelope resample(const DriveEnvelope& env, const std::vector<double>& grid) {
  DriveEnvelope out;
  out.t = grid;
  out.g_mag.resize(grid.size());
  out.phase.resize(grid.size());
  out.kappa_eff = env.kappa_eff;
  out.kappa_T = env.kappa_T;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = env.value_at(grid[i]);
    out.g_mag[i] = std::abs(v);
    out.phase[i] = std::arg(v);
  }
  return out;
}

double envelope_energy(const DriveEnvelope& env) {
  double e = 0.0;
  for (std::size_t i = 1; i < env.size(); ++i) {
    if (env.t[i] > env.t_stop) break;
    e += 0.5 * (env.g_mag[i - 1] * env.g_mag[i - 1] + env.g_mag[i] * env.g_mag[i]) *
         (env.t[i] - env.t[i - 1]);
  }
  return e;
}

void write_csv(std::ostream& os, const DriveEnvelope& env) {
  os << "t_ns,g_mag_MHz,phase_rad\n";
  for (std::size_t i = 0; i < env.size(); ++i) {
    os << fmt::format("{:.9g},{:.9g},{:.9g}\n", env.t[i], units::to_mhz(env.g_mag[i]), env.phase[i]);
  }
}

}  // namespace qlink
