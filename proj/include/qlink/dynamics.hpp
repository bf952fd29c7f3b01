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

// Cascaded master-equation integration, the two-level emission oracle and
// output-field observables.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qlink/device.hpp"
#include "qlink/pulse.hpp"
#include "qlink/qops.hpp"

namespace qlink {

using Populations = std::array<double, 3>;  // P_g, P_e, P_f

struct Trajectory {
  std::vector<double> t;  ///< ns
  std::vector<Populations> pops_A;
  std::vector<Populations> pops_B;
  std::vector<cplx> a_mean_out;        ///< <a_out>, 1/sqrt(ns)
  std::vector<double> flux_out;        ///< <a_out^dag a_out>, photons/ns
  std::vector<double> flux_loss;       ///< flux into loss channels, photons/ns
  std::vector<double> excitation;      ///< bookkeeping excitation number
  std::vector<double> photon_integral; ///< cumulative integral of flux_out
  std::vector<double> loss_integral;   ///< cumulative integral of flux_loss
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;

  std::size_t size() const { return t.size(); }
  /// Integral of |<a_out>|^2 over the whole trajectory.
  double mean_field_energy() const;
  /// Appends `other`, dropping its first sample when it coincides with our last.
  void append(const Trajectory& other);
};

/// What integrate_me records at each grid point. Empty matrices are skipped.
struct ObservableSpec {
  int slot_a = -1;  ///< qutrit slot reported as pops_A (-1: none)
  int slot_b = -1;
  Matrix a_out;
  std::vector<Matrix> loss_ops;  ///< rate-weighted channels counted as loss
  Matrix excitation;             ///< Hermitian bookkeeping operator
};

struct IntegratorOptions {
  double max_dt = 0.1;            ///< ns
  double trace_tolerance = 1e-8;  ///< abort threshold on |Tr rho - Tr rho0|
  std::size_t positivity_every = 200;
  double positivity_tolerance = 1e-6;  ///< abort threshold on negative eigenvalues
};

struct MEResult {
  Trajectory trajectory;
  DensityMatrix final_state;
};

/// RK4 integration of d rho/dt = -i[H, rho] + sum D[L]rho on `t_grid`.
/// Observables are sampled at every grid point; grid intervals longer than
/// max_dt are sub-stepped.
MEResult integrate_me(const TimeDependentHamiltonian& h, const std::vector<CollapseOp>& collapse,
                      const DensityMatrix& rho0, const std::vector<double>& t_grid,
                      const ObservableSpec& observables = {}, const IntegratorOptions& options = {});

/// a_out = sqrt(kappa_T^B) a_B + sqrt(kappa_T^A eta_c) a_A on system_dims(fock).
Matrix output_operator(int fock, double kappa_T_A, double kappa_T_B, double eta_c);

/// Observables for the two-node system: qutrit populations, output field,
/// channel-loss flux and sum (a^dag a + b^dag b / 2).
ObservableSpec device_observables(const NodeParams& a, const NodeParams& b, const LinkParams& link,
                                  int fock);

struct FieldObservables {
  std::vector<cplx> a_mean_out;
  std::vector<double> flux_out;
};

/// <a_out> and <a_out^dag a_out> for a sequence of two-node states (rates in rad/ns).
FieldObservables output_observables(const std::vector<DensityMatrix>& rho_traj, double kappa_T_B,
                                    double eta_c, double kappa_T_A);

struct TwoLevelResult {
  std::vector<double> t;
  std::vector<cplx> c_f0;
  std::vector<cplx> c_g1;
  std::vector<double> flux;     ///< kappa |c_g1|^2
  std::vector<double> emitted;  ///< 1 - |c_f0|^2 - |c_g1|^2
};

/// Non-Hermitian |f,0>, |g,1> model driven by `g_env` with resonator decay kappa (rad/ns).
TwoLevelResult two_level_oracle(const DriveEnvelope& g_env, double kappa, cplx c_f0 = 1.0,
                                cplx c_g1 = 0.0, int substeps = 10);

struct Efficiencies {
  double transfer = 0.0;
  double absorption = 0.0;
  double loss = 0.0;
};

/// transfer: final P_f at node B before the mapping pulse (P_e after it);
/// absorption: 1 - ratio of integrated |<a_out>|^2 with and without the absorber;
/// loss: 1 - ratio of integrated |<a_out>|^2 for emission from A and from B.
Efficiencies efficiencies(const Trajectory& transfer, const Trajectory& with_absorption,
                          const Trajectory& without_absorption, const Trajectory& emit_a,
                          const Trajectory& emit_b);

/// First time (relative to t.front()) at which `series` reaches `fraction` of its final value.
double saturation_time(const std::vector<double>& t, const std::vector<double>& series,
                       double fraction = 0.99);

/// CSV columns t_ns, Pg_A, Pe_A, Pf_A, Pg_B, Pe_B, Pf_B, re_aout, im_aout, flux.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace qlink
