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

#pragma once

// Shaped-photon drive envelopes: the sech photon, the f0g1 emission drive,
// its time-reversed absorption counterpart, Stark-shift phase tracking and
// truncation.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

namespace qlink {

/// Sampled complex effective coupling g(t) = g_mag(t) exp(i phase(t)).
struct DriveEnvelope {
  std::vector<double> t;      ///< ns, strictly increasing
  std::vector<double> g_mag;  ///< |g(t)|, rad/ns
  std::vector<double> phase;  ///< rad
  double kappa_eff = 0.0;     ///< target photon bandwidth, rad/ns
  double kappa_T = 0.0;       ///< resonator linewidth, rad/ns
  /// Drive is off for t > t_stop (set by truncate).
  double t_stop = std::numeric_limits<double>::infinity();

  std::size_t size() const { return t.size(); }
  std::complex<double> sample(std::size_t i) const;
  /// Linear interpolation; zero outside [t.front(), min(t.back(), t_stop)].
  std::complex<double> value_at(double time) const;
};

/// Linear model of the f0g1 drive: Stark shift Delta/2pi = quad_coeff * eps^2
/// and coupling g/2pi = lin_coeff * eps (both MHz, eps dimensionless).
struct StarkModel {
  double quad_coeff = 0.0;
  double lin_coeff = 1.0;
};

/// Synthetic calibration giving the maximum couplings of the two nodes
/// (6.0 and 6.7 MHz) at eps = 1.
StarkModel default_stark_model_a();
StarkModel default_stark_model_b();

/// t_start, t_start + dt, ... up to t_end (inclusive within dt/2).
std::vector<double> uniform_grid(double t_start, double t_end, double dt);
/// Grid symmetric about 0 covering at least [-half_width, half_width].
std::vector<double> symmetric_grid(double half_width, double dt);

/// phi(t) = sqrt(kappa_eff)/2 sech(kappa_eff t / 2), in 1/sqrt(ns).
double photon_envelope(double t, double kappa_eff);

/// Drive amplitude that makes a resonator of linewidth kappa_T emit phi(t).
double emission_drive_value(double t, double kappa_eff, double kappa_T);

/// Samples emission_drive_value on `t`. Requires kappa_eff <= kappa_T and a grid
/// spanning at least +-6/kappa_eff.
DriveEnvelope emission_drive(const std::vector<double>& t, double kappa_eff, double kappa_T);

/// Time reversal about t = 0. With `conjugate` the phase profile is also negated.
/// Applying it twice returns the input bit-exactly.
DriveEnvelope absorption_drive(const DriveEnvelope& emission, bool conjugate = true);

/// Phase that counteracts the drive-induced Stark shift:
/// phase(t) = -2pi int quad_coeff eps(t')^2 dt', eps = (|g|/2pi) / lin_coeff.
DriveEnvelope stark_phase_track(const DriveEnvelope& env, const StarkModel& model);

/// Instantaneous Stark shift 2pi quad_coeff eps(t)^2 in rad/ns on the envelope grid.
std::vector<double> stark_shift(const DriveEnvelope& env, const StarkModel& model);

/// Drive switched off after tau; phase frozen at its value at tau. A pulse
/// truncated at the first grid point has zero duration and is dropped entirely.
DriveEnvelope truncate(const DriveEnvelope& env, double tau);

/// Shift the time axis by `offset` (positive = later).
DriveEnvelope shift_time(DriveEnvelope env, double offset);

/// Re-sample onto `grid` (value_at at each grid point).
DriveEnvelope resample(const DriveEnvelope& env, const std::vector<double>& grid);

/// Trapezoid integral of |g|^2 over the active part of the envelope.
double envelope_energy(const DriveEnvelope& env);

/// CSV columns t_ns, g_mag_MHz, phase_rad.
void write_csv(std::ostream& os, const DriveEnvelope& env);

}  // namespace qlink
