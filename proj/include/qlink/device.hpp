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

// Node/link parameters, the dressed-frame effective Hamiltonian of the two
// cascaded nodes, and their collapse operators.
//
// Subsystem order is fixed: (transmon A, resonator A, transmon B, resonator B).
// Transmons are truncated to three levels |g>,|e>,|f>.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qlink/pulse.hpp"
#include "qlink/qops.hpp"

namespace qlink {

inline constexpr std::size_t kTransmonA = 0;
inline constexpr std::size_t kResonatorA = 1;
inline constexpr std::size_t kTransmonB = 2;
inline constexpr std::size_t kResonatorB = 3;
inline constexpr int kTransmonLevels = 3;

enum class Node { A, B };

/// Readout resonator block. Carried for documentation; never enters the dynamics.
struct ReadoutResonator {
  double nu_R = 0.0;     ///< GHz
  double kappa_R = 0.0;  ///< kappa_R/2pi, MHz
  double chi_R = 0.0;    ///< chi_R/2pi, MHz
};

/// Physical constants of one node in laboratory units.
struct NodeParams {
  double nu_ge = 0.0;      ///< GHz
  double alpha = 0.0;      ///< anharmonicity alpha/2pi, MHz (negative)
  double nu_T = 0.0;       ///< transfer resonator, GHz
  double kappa_T = 0.0;    ///< kappa_T/2pi, MHz
  double chi_T = 0.0;      ///< chi_T/2pi, MHz
  double K = 0.0;          ///< qubit-induced resonator Kerr K/2pi, MHz
  double kappa_int = 0.0;  ///< internal resonator loss kappa_int/2pi, MHz
  double T1ge = 0.0;       ///< microseconds; +inf disables the channel
  double T1ef = 0.0;
  double T2ge = 0.0;
  double T2ef = 0.0;
  ReadoutResonator readout;

  /// Throws ValidationError on kappa_T <= 0, alpha >= 0, T2 > 2 T1 or negative rates.
  void validate() const;
};

struct LinkParams {
  double eta_c = 0.77;       ///< channel power transmission, 0..1
  double time_offset = 0.0;  ///< absorber drive delay relative to emitter, ns

  void validate() const;
};

struct DeviceParams {
  NodeParams a;
  NodeParams b;
  LinkParams link;

  void validate() const;
  const NodeParams& node(Node n) const { return n == Node::A ? a : b; }
};

NodeParams table_node_a();
NodeParams table_node_b();
/// Both nodes at their tabulated values and eta_c = 0.77.
DeviceParams default_device();

/// Copy with T1/T2 set to infinity and kappa_int = 0.
NodeParams without_decoherence(NodeParams p);
/// Copy with all four T1/T2 times multiplied by `factor`.
NodeParams scale_coherence(NodeParams p, double factor);

/// Decay and dephasing rates in 1/ns (kappas in rad/ns).
///
/// The dephasing strengths multiply D[|e><e|-|g><g|] and D[|f><f|-|e><e|].
/// Both operators dephase both coherences, so the two strengths are solved
/// jointly such that rho_ge decays at exactly 1/T2ge and rho_ef at 1/T2ef
/// (rho_ef also inherits (gamma1ge + gamma1ef)/2 from energy relaxation).
struct NodeRates {
  double gamma1_ge = 0.0;
  double gamma1_ef = 0.0;
  double gamma_phi_ge = 0.0;
  double gamma_phi_ef = 0.0;
  double kappa_T = 0.0;
  double kappa_int = 0.0;
};
NodeRates node_rates(const NodeParams& p);

// ---------------------------------------------------------------------------
// Dressed-frame derivation

/// Undriven-frame circuit parameters (angular frequencies, any consistent unit).
struct BareParams {
  double omega_T = 0.0;
  double omega_ge = 0.0;
  double E_C = 0.0;
  double g_T = 0.0;
  double beta = 0.0;  ///< transmon displacement amplitude from the drive
  double omega_d = 0.0;
};

struct DressedParams {
  double Lambda = 0.0;  ///< Bogoliubov angle
  double alpha = 0.0;
  double K = 0.0;
  double chi_T = 0.0;
  double Delta_T = 0.0;
  double Delta_eg = 0.0;
  double g_tilde = 0.0;
};

/// Throws ValidationError("non-dispersive ...") near resonance or for |Lambda| >= pi/4.
DressedParams dressed_from_bare(const BareParams& bare);

/// Undriven bare parameters whose dressed anharmonicity and dispersive shift
/// have the requested values (|chi_T| is matched; the dressed chi_T is negative
/// for E_C > 0).
BareParams bare_for_dressed(double alpha, double chi_T, double omega_T, double omega_ge);

// ---------------------------------------------------------------------------
// Effective Hamiltonian and collapse operators

struct DriveTerm {
  std::string label;
  Matrix op;
  std::vector<cplx> coeff;  ///< samples on TimeDependentHamiltonian::t
};

/// H(t) = static_part + sum_k coeff_k(t) op_k, with coefficients linearly
/// interpolated between grid samples and zero outside the grid.
struct TimeDependentHamiltonian {
  Dims dims;
  std::vector<double> t;
  Matrix static_part;
  std::vector<DriveTerm> terms;

  cplx coefficient(std::size_t term, double time) const;
  Matrix at(double time) const;
};

/// Extra knobs for studies outside the default resonant protocol.
struct HamiltonianOptions {
  double resonator_detuning_a = 0.0;  ///< rad/ns, multiplies a^dag a
  double resonator_detuning_b = 0.0;
  double transmon_detuning_a = 0.0;  ///< rad/ns, multiplies b^dag b
  double transmon_detuning_b = 0.0;
  /// Uncompensated f0-g1 shift (rad/ns) on the grid, applied to |f><f|. Empty = none.
  std::vector<double> f_shift_a;
  std::vector<double> f_shift_b;
};

Dims system_dims(int fock);

/// Effective two-node Hamiltonian with the cascade coupling. Envelopes must
/// share one time grid.
TimeDependentHamiltonian build_hamiltonian(const NodeParams& a, const NodeParams& b,
                                           const LinkParams& link, const DriveEnvelope& g_a,
                                           const DriveEnvelope& g_b, int fock,
                                           const HamiltonianOptions& options = {});

struct CollapseOp {
  std::string label;
  Matrix op;  ///< rate-weighted
};

/// Zero-rate channels are omitted.
std::vector<CollapseOp> build_collapse_ops(const NodeParams& a, const NodeParams& b,
                                           const LinkParams& link, int fock);

/// Collapse operators of a lone qutrit (dims {3}).
std::vector<CollapseOp> qutrit_collapse_ops(const NodeParams& p);

// JSON with the exact field names above. Infinite times are written as null.
void to_json(nlohmann::json& j, const NodeParams& p);
void from_json(const nlohmann::json& j, NodeParams& p);
void to_json(nlohmann::json& j, const LinkParams& p);
void from_json(const nlohmann::json& j, LinkParams& p);
void to_json(nlohmann::json& j, const DeviceParams& p);
void from_json(const nlohmann::json& j, DeviceParams& p);

DeviceParams load_device(const std::string& path);

}  // namespace qlink
