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

#include "qlink/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"
#include "qlink/units.hpp"

namespace qlink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_time(double t_us) { return t_us > 0.0; }

}  // namespace

void NodeParams::validate() const {
  if (!(kappa_T > 0.0)) throw ValidationError("node: kappa_T must be positive");
  if (!(alpha < 0.0)) throw ValidationError("node: alpha must be negative");
  if (!(kappa_int >= 0.0)) throw ValidationError("node: kappa_int must be non-negative");
  for (double t : {T1ge, T1ef, T2ge, T2ef}) {
    if (!is_time(t)) throw ValidationError("node: T1/T2 times must be positive (use +inf to disable)");
  }
  if (T2ge > 2.0 * T1ge * (1.0 + 1e-12)) throw ValidationError("node: T2ge exceeds 2 T1ge");
  if (T2ef > 2.0 * T1ef * (1.0 + 1e-12)) throw ValidationError("node: T2ef exceeds 2 T1ef");
  (void)node_rates(*this);
}

void LinkParams::validate() const {
  if (!(eta_c >= 0.0 && eta_c <= 1.0)) throw ValidationError("link: eta_c must lie in [0, 1]");
  if (!std::isfinite(time_offset)) throw ValidationError("link: time_offset must be finite");
}

void DeviceParams::validate() const {
  a.validate();
  b.validate();
  link.validate();
}

NodeParams table_node_a() {
  NodeParams p;
  p.nu_ge = 6.343;
  p.alpha = -265.0;
  p.nu_T = 8.4005;
  p.kappa_T = 10.4;
  p.chi_T = 6.3;
  p.K = 6.3 * 6.3 / -265.0;
  p.kappa_int = 0.0;
  p.T1ge = 4.9;
  p.T1ef = 1.6;
  p.T2ge = 3.4;
  p.T2ef = 2.1;
  p.readout = {4.787, 12.6, 5.8};
  return p;
}

NodeParams table_node_b() {
  NodeParams p;
  p.nu_ge = 6.096;
  p.alpha = -308.0;
  p.nu_T = 8.4003;
  p.kappa_T = 13.5;
  p.chi_T = 4.7;
  p.K = 4.7 * 4.7 / -308.0;
  p.kappa_int = 0.0;
  p.T1ge = 4.6;
  p.T1ef = 1.4;
  p.T2ge = 2.6;
  p.T2ef = 0.9;
  p.readout = {4.780, 27.1, 11.6};
  return p;
}

DeviceParams default_device() { return {table_node_a(), table_node_b(), LinkParams{0.77, 0.0}}; }

NodeParams without_decoherence(NodeParams p) {
  p.T1ge = p.T1ef = p.T2ge = p.T2ef = kInf;
  p.kappa_int = 0.0;
  return p;
}

NodeParams scale_coherence(NodeParams p, double factor) {
  if (!(factor > 0.0)) throw ValidationError("coherence scale factor must be positive");
  p.T1ge *= factor;
  p.T1ef *= factor;
  p.T2ge *= factor;
  p.T2ef *= factor;
  return p;
}

NodeRates node_rates(const NodeParams& p) {
  NodeRates r;
  r.gamma1_ge = units::rate_from_us(p.T1ge);
  r.gamma1_ef = units::rate_from_us(p.T1ef);
  r.kappa_T = units::mhz(p.kappa_T);
  r.kappa_int = units::mhz(p.kappa_int);
  // Coherence decay rates:
  //   ge: gamma1ge/2 + 2 x + y/2 = 1/T2ge
  //   ef: (gamma1ge + gamma1ef)/2 + x/2 + 2 y = 1/T2ef
  const double b1 = units::rate_from_us(p.T2ge) - 0.5 * r.gamma1_ge;
  const double b2 = units::rate_from_us(p.T2ef) - 0.5 * (r.gamma1_ge + r.gamma1_ef);
  double x = (2.0 * b1 - 0.5 * b2) / 3.75;
  double y = (2.0 * b2 - 0.5 * b1) / 3.75;
  const double tol = 1e-15;
  if (x < -tol || y < -tol) {
    throw ValidationError(fmt::format(
        "node: T2 times imply negative dephasing rates (ge {:.3g}/ns, ef {:.3g}/ns)", x, y));
  }
  r.gamma_phi_ge = std::max(x, 0.0);
  r.gamma_phi_ef = std::max(y, 0.0);
  return r;
}

DressedParams dressed_from_bare(const BareParams& bare) {
  const double beta2 = bare.beta * bare.beta;
  const double den = bare.omega_T - bare.omega_ge + 2.0 * bare.E_C * beta2;
  const double scale = std::abs(bare.omega_T) + std::abs(bare.omega_ge) + std::abs(bare.g_T);
  DressedParams d;
  if (bare.g_T != 0.0) {
    if (!std::isfinite(den) || std::abs(den) <= 1e-9 * std::max(scale, 1.0)) {
      throw ValidationError("dressed_from_bare: non-dispersive (resonator and transmon degenerate)");
    }
    d.Lambda = 0.5 * std::atan(-2.0 * bare.g_T / den);
  }
  if (!(std::abs(d.Lambda) < std::numbers::pi / 4.0)) {
    throw ValidationError("dressed_from_bare: non-dispersive Bogoliubov angle");
  }
  const double c = std::cos(d.Lambda);
  const double s = std::sin(d.Lambda);
  const double c2 = c * c;
  const double s2 = s * s;
  const double s2L = std::sin(2.0 * d.Lambda);
  const double omega_ge_shifted = bare.omega_ge - 2.0 * bare.E_C * beta2;
  d.alpha = -bare.E_C * c2 * c2;
  d.K = -bare.E_C * s2 * s2;
  d.chi_T = -bare.E_C * c2 * s2;
  d.Delta_T = bare.omega_T * c2 + omega_ge_shifted * s2 - bare.g_T * s2L - bare.omega_d;
  d.Delta_eg = omega_ge_shifted * c2 + bare.omega_T * s2 + bare.g_T * s2L - bare.omega_d;
  d.g_tilde = -bare.E_C * bare.beta * std::numbers::sqrt2 * c2 * s;
  return d;
}

BareParams bare_for_dressed(double alpha, double chi_T, double omega_T, double omega_ge) {
  if (!(alpha < 0.0)) throw ValidationError("bare_for_dressed: alpha must be negative");
  if (omega_T == omega_ge) throw ValidationError("bare_for_dressed: non-dispersive (degenerate)");
  const double ratio = std::abs(chi_T / alpha);  // tan^2 Lambda
  double lambda = std::atan(std::sqrt(ratio));
  if (omega_T - omega_ge > 0.0) lambda = -lambda;
  const double c = std::cos(lambda);
  BareParams b;
  b.omega_T = omega_T;
  b.omega_ge = omega_ge;
  b.E_C = -alpha / (c * c * c * c);
  b.g_T = -std::tan(2.0 * lambda) * (omega_T - omega_ge) / 2.0;
  return b;
}

// ---------------------------------------------------------------------------

cplx TimeDependentHamiltonian::coefficient(std::size_t term, double time) const {
  const auto& c = terms.at(term).coeff;
  if (t.empty() || time < t.front() || time > t.back()) return {0.0, 0.0};
  auto it = std::upper_bound(t.begin(), t.end(), time);
  if (it == t.end()) return c.back();
  const auto hi = static_cast<std::size_t>(it - t.begin());
  const auto lo = hi - 1;
  const double w = (time - t[lo]) / (t[hi] - t[lo]);
  return (1.0 - w) * c[lo] + w * c[hi];
}

Matrix TimeDependentHamiltonian::at(double time) const {
  Matrix h = static_part;
  for (std::size_t k = 0; k < terms.size(); ++k) h += coefficient(k, time) * terms[k].op;
  return h;
}

Dims system_dims(int fock) { return {kTransmonLevels, fock, kTransmonLevels, fock}; }

namespace {

struct NodeOps {
  Matrix a;
  Matrix b;
};

NodeOps node_ops(const Dims& dims, std::size_t q_slot, std::size_t r_slot) {
  return {embed(annihilation(dims[r_slot]), r_slot, dims).data,
          embed(annihilation(dims[q_slot]), q_slot, dims).data};
}

void add_node_terms(TimeDependentHamiltonian& h, const NodeParams& p, const NodeOps& ops,
                    const DriveEnvelope& g, double det_res, double det_q,
                    const std::vector<double>& f_shift, const Matrix& f_proj, const char* tag) {
  const Matrix& a = ops.a;
  const Matrix& b = ops.b;
  const Matrix ad = a.adjoint();
  const Matrix bd = b.adjoint();
  const double alpha = units::mhz(p.alpha);
  const double kerr = units::mhz(p.K);
  const double chi = units::mhz(p.chi_T);
  h.static_part += -0.5 * alpha * bd * b + 0.5 * alpha * bd * bd * b * b + 0.5 * kerr * ad * ad * a * a +
                   2.0 * chi * ad * a * bd * b + det_res * ad * a + det_q * bd * b;

  DriveTerm up{fmt::format("drive_{}", tag), (1.0 / std::numbers::sqrt2) * bd * bd * a, {}};
  DriveTerm down{fmt::format("drive_{}_conj", tag), (1.0 / std::numbers::sqrt2) * ad * b * b, {}};
  up.coeff.resize(g.size());
  down.coeff.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    up.coeff[i] = g.sample(i);
    down.coeff[i] = std::conj(up.coeff[i]);
  }
  h.terms.push_back(std::move(up));
  h.terms.push_back(std::move(down));

  if (!f_shift.empty()) {
    if (f_shift.size() != h.t.size()) throw DimensionError("f-level shift samples do not match the grid");
    DriveTerm shift{fmt::format("f_shift_{}", tag), f_proj, {}};
    shift.coeff.assign(f_shift.begin(), f_shift.end());
    h.terms.push_back(std::move(shift));
  }
}

}  // namespace

TimeDependentHamiltonian build_hamiltonian(const NodeParams& a, const NodeParams& b,
                                           const LinkParams& link, const DriveEnvelope& g_a,
                                           const DriveEnvelope& g_b, int fock,
                                           const HamiltonianOptions& options) {
  if (fock < 2) throw ValidationError("build_hamiltonian: Fock truncation must be >= 2");
  if (g_a.t != g_b.t) throw DimensionError("build_hamiltonian: envelopes on mismatched grids");
  if (g_a.size() < 2) throw DimensionError("build_hamiltonian: envelope grid too short");
  link.validate();

  TimeDependentHamiltonian h;
  h.dims = system_dims(fock);
  h.t = g_a.t;
  const int n = total_dim(h.dims);
  h.static_part = Matrix::Zero(n, n);

  const auto ops_a = node_ops(h.dims, kTransmonA, kResonatorA);
  const auto ops_b = node_ops(h.dims, kTransmonB, kResonatorB);
  add_node_terms(h, a, ops_a, g_a, options.resonator_detuning_a, options.transmon_detuning_a,
                 options.f_shift_a, embed(ket_bra(3, 2, 2), kTransmonA, h.dims).data, "A");
  add_node_terms(h, b, ops_b, g_b, options.resonator_detuning_b, options.transmon_detuning_b,
                 options.f_shift_b, embed(ket_bra(3, 2, 2), kTransmonB, h.dims).data, "B");

  const double casc = std::sqrt(units::mhz(a.kappa_T) * units::mhz(b.kappa_T) * link.eta_c) / 2.0;
  h.static_part += -kI * casc * (ops_a.a * ops_b.a.adjoint() - ops_a.a.adjoint() * ops_b.a);
  return h;
}

namespace {

void add_qutrit_channels(std::vector<CollapseOp>& out, const NodeParams& p, std::size_t slot,
                         const Dims& dims, const char* tag) {
  const auto r = node_rates(p);
  auto push = [&](const char* name, double rate, const Matrix& op) {
    if (rate > 0.0) {
      out.push_back({fmt::format("{}_{}", name, tag), std::sqrt(rate) * embed(op, slot, dims).data});
    }
  };
  push("T1ge", r.gamma1_ge, ket_bra(3, 0, 1));
  push("T1ef", r.gamma1_ef, ket_bra(3, 1, 2));
  push("phi_ge", r.gamma_phi_ge, ket_bra(3, 1, 1) - ket_bra(3, 0, 0));
  push("phi_ef", r.gamma_phi_ef, ket_bra(3, 2, 2) - ket_bra(3, 1, 1));
}

}  // namespace

std::vector<CollapseOp> build_collapse_ops(const NodeParams& a, const NodeParams& b,
                                           const LinkParams& link, int fock) {
  a.validate();
  b.validate();
  link.validate();
  if (fock < 2) throw ValidationError("build_collapse_ops: Fock truncation must be >= 2");
  const Dims dims = system_dims(fock);
  const Matrix a_a = embed(annihilation(fock), kResonatorA, dims).data;
  const Matrix a_b = embed(annihilation(fock), kResonatorB, dims).data;
  const auto ra = node_rates(a);
  const auto rb = node_rates(b);

  std::vector<CollapseOp> ops;
  const double loss = ra.kappa_T * (1.0 - link.eta_c);
  if (loss > 0.0) ops.push_back({"channel_loss", std::sqrt(loss) * a_a});
  ops.push_back({"cascade", std::sqrt(ra.kappa_T * link.eta_c) * a_a + std::sqrt(rb.kappa_T) * a_b});
  if (ra.kappa_int > 0.0) ops.push_back({"kappa_int_A", std::sqrt(ra.kappa_int) * a_a});
  if (rb.kappa_int > 0.0) ops.push_back({"kappa_int_B", std::sqrt(rb.kappa_int) * a_b});
  add_qutrit_channels(ops, a, kTransmonA, dims, "A");
  add_qutrit_channels(ops, b, kTransmonB, dims, "B");
  return ops;
}

std::vector<CollapseOp> qutrit_collapse_ops(const NodeParams& p) {
  std::vector<CollapseOp> ops;
  add_qutrit_channels(ops, p, 0, Dims{3}, "q");
  return ops;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void put_time(nlohmann::json& j, const char* key, double v) {
  if (std::isinf(v)) {
    j[key] = nullptr;
  } else {
    j[key] = v;
  }
}

double get_time(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? kInf : v.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const NodeParams& p) {
  j = nlohmann::json{{"nu_ge", p.nu_ge},     {"alpha", p.alpha}, {"nu_T", p.nu_T},
                     {"kappa_T", p.kappa_T}, {"chi_T", p.chi_T}, {"K", p.K},
                     {"kappa_int", p.kappa_int}};
  put_time(j, "T1ge", p.T1ge);
  put_time(j, "T1ef", p.T1ef);
  put_time(j, "T2ge", p.T2ge);
  put_time(j, "T2ef", p.T2ef);
  j["readout"] = {{"nu_R", p.readout.nu_R}, {"kappa_R", p.readout.kappa_R}, {"chi_R", p.readout.chi_R}};
}

void from_json(const nlohmann::json& j, NodeParams& p) {
  j.at("nu_ge").get_to(p.nu_ge);
  j.at("alpha").get_to(p.alpha);
  j.at("nu_T").get_to(p.nu_T);
  j.at("kappa_T").get_to(p.kappa_T);
  j.at("chi_T").get_to(p.chi_T);
  p.K = j.contains("K") ? j.at("K").get<double>() : p.chi_T * p.chi_T / p.alpha;
  p.kappa_int = j.value("kappa_int", 0.0);
  p.T1ge = get_time(j, "T1ge");
  p.T1ef = get_time(j, "T1ef");
  p.T2ge = get_time(j, "T2ge");
  p.T2ef = get_time(j, "T2ef");
  if (j.contains("readout")) {
    const auto& r = j.at("readout");
    p.readout.nu_R = r.value("nu_R", 0.0);
    p.readout.kappa_R = r.value("kappa_R", 0.0);
    p.readout.chi_R = r.value("chi_R", 0.0);
  }
}

void to_json(nlohmann::json& j, const LinkParams& p) {
  j = nlohmann::json{{"eta_c", p.eta_c}, {"time_offset", p.time_offset}};
}

void from_json(const nlohmann::json& j, LinkParams& p) {
  j.at("eta_c").get_to(p.eta_c);
  p.time_offset = j.value("time_offset", 0.0);
}

void to_json(nlohmann::json& j, const DeviceParams& p) {
  j = nlohmann::json{{"node_a", p.a}, {"node_b", p.b}, {"link", p.link}};
}

void from_json(const nlohmann::json& j, DeviceParams& p) {
  j.at("node_a").get_to(p.a);
  j.at("node_b").get_to(p.b);
  j.at("link").get_to(p.link);
}

DeviceParams load_device(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open device file " + path);
  nlohmann::json j;
  try {
    in >> j;
    auto d = j.get<DeviceParams>();
    d.validate();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("device file " + path + ": " + e.what());
  }
}

}  // namespace qlink
