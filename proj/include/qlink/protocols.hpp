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

// Experiment sequences: emission, excitation transfer, state-transfer process
// tomography, remote entanglement, the upgraded-coherence prediction and the
// error budget.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qlink/device.hpp"
#include "qlink/dynamics.hpp"
#include "qlink/metrics.hpp"
#include "qlink/pulse.hpp"
#include "qlink/readout.hpp"
#include "qlink/tomography.hpp"

namespace qlink {

/// Photon bandwidths kappa_eff/2pi (MHz) used for emission from each node.
inline constexpr double kDefaultKappaEffA = 10.4;
inline constexpr double kDefaultKappaEffB = 10.6;

enum class DriveRole { None, Emit, Absorb };

struct Rotation {
  Node node = Node::A;
  Transition transition = Transition::GE;
  Axis axis = Axis::Y;
  double angle = 0.0;  ///< rad, within [-pi, pi]
};

struct ProtocolSpec {
  std::string name;
  std::vector<Rotation> preparation;  ///< applied in order at the window start
  DriveRole drive_a = DriveRole::None;
  DriveRole drive_b = DriveRole::None;
  double kappa_eff = 0.0;  ///< MHz; 0 selects the emitting node's default
  double truncation = std::numeric_limits<double>::infinity();  ///< ns; emission drive off after tau
  bool conjugate_absorption = true;
  bool stark_compensation = false;
  double field_tail = 0.0;  ///< ns of free evolution before the final pulses
  std::vector<Rotation> final_pulses;
  std::string measurement = "trajectory";  ///< trajectory | qst | qpt
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TomographyMode { Exact, Sampled };

struct SimOptions {
  int fock = 3;
  double dt = 0.1;               ///< ns
  double window_factor = 6.0;    ///< pulse window is [-w/kappa_eff, w/kappa_eff]
  double field_tail = 200.0;     ///< ns, used for mean-field integrals
  TomographyMode tomography = TomographyMode::Exact;
  std::size_t shots = 25000;
  std::uint64_t seed = 20190101;
  double kappa_eff = 0.0;        ///< MHz override for every protocol (0: defaults)

  void validate() const;
};

struct SequenceResult {
  Trajectory trajectory;  ///< populations before the final pulses
  DensityMatrix final_state;  ///< full system after the final pulses
  DensityMatrix qutrits;      ///< two-transmon state after the final pulses
  DriveEnvelope drive_a;
  DriveEnvelope drive_b;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Generic runner: all transmons in |g>, resonators empty.
SequenceResult run_sequence(const DeviceParams& device, const ProtocolSpec& spec, const SimOptions& options);

enum class EmissionInitial { F, GFSuperposition };

ProtocolSpec emission_spec(Node node, EmissionInitial initial,
                           double tau = std::numeric_limits<double>::infinity());
SequenceResult run_emission(const DeviceParams& device, Node node, EmissionInitial initial,
                            const SimOptions& options,
                            double tau = std::numeric_limits<double>::infinity());

/// Rotations on node A preparing qpt_input_states()[index].
std::vector<Rotation> qubit_preparation(int index);

/// A: qubit preparation, R^pi_ef, emission; B: absorption, final R^pi_ef.
ProtocolSpec transfer_spec(const std::vector<Rotation>& qubit_prep, bool absorb = true);

struct TransferResult {
  SequenceResult sequence;
  double transfer_efficiency = 0.0;  ///< P_e at node B after the mapping pulse
  double saturation_time = 0.0;      ///< ns from the window start
};

TransferResult run_transfer(const DeviceParams& device, const std::vector<Rotation>& qubit_prep,
                            const SimOptions& options);

struct TransferReport {
  TransferResult transfer;
  Efficiencies efficiencies;
  double saturation_time = 0.0;
  double field_ratio_a_over_b = 0.0;
  Trajectory with_absorption;
  Trajectory without_absorption;
  Trajectory emit_a;
  Trajectory emit_b;
};

/// Transfer of |e>, absorption efficiency from superposition runs with and
/// without the absorber, and the A/B emitted-field ratio.
TransferReport transfer_report(const DeviceParams& device, const SimOptions& options);

/// Maximizes the transfer efficiency over time_offset in [-range, range] ns.
double fit_time_offset(const DeviceParams& device, const SimOptions& options, double range = 5.0);

struct QptResult {
  ProcessMatrix process;
  double process_fidelity = 0.0;
  double average_fidelity_direct = 0.0;  ///< mean state fidelity of the direct outputs
  double phase_correction = 0.0;         ///< virtual Z applied on B, rad
  std::vector<Matrix> outputs;           ///< reconstructed 2x2 output blocks
};

QptResult run_state_transfer_qpt(const DeviceParams& device, const SimOptions& options);

struct EntanglementResult {
  SequenceResult sequence;
  DensityMatrix rho_direct;      ///< 3x3 state after the virtual-Z correction
  DensityMatrix rho_tomography;  ///< reconstructed from (exact or sampled) tomography
  MetricsBundle metrics;         ///< of rho_tomography
  MetricsBundle metrics_direct;
  double residual_f = 0.0;  ///< 1 - Tr(rho_m)
  double phase_correction = 0.0;
  int mle_iterations = 0;
};

/// Target (|eg> + |ge>)/sqrt2 in the basis gg, ge, eg, ee.
Vector bell_target();

EntanglementResult run_entanglement(const DeviceParams& device, const SimOptions& options);

/// T1ge = T2ge = 30 us, T1ef = T2ef = 20 us on both nodes and eta_c = 0.88.
DeviceParams upgrade_device(const DeviceParams& base);
EntanglementResult run_upgrade_scenario(const DeviceParams& base, const SimOptions& options);

struct BudgetResult {
  double baseline = 0.0;
  double loss_off = 0.0;
  double decoherence_off = 0.0;
  double both_off = 0.0;
  double delta_loss() const { return loss_off - baseline; }
  double delta_decoherence() const { return decoherence_off - baseline; }
};

BudgetResult error_budget(const DeviceParams& device, const SimOptions& options);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double fidelity = 0.0;
  double concurrence = 0.0;
  double ccnr = 0.0;
  double residual_f = 0.0;
};

/// Entanglement metrics for each value of eta_c, coherence_scale or fock.
std::vector<SweepRow> sweep(const DeviceParams& device, const SimOptions& options,
                            const std::string& parameter, const std::vector<double>& values);

std::string to_string(DriveRole role);
DriveRole parse_drive_role(const std::string& s);

void to_json(nlohmann::json& j, const Rotation& r);
void from_json(const nlohmann::json& j, Rotation& r);
void to_json(nlohmann::json& j, const ProtocolSpec& s);
void from_json(const nlohmann::json& j, ProtocolSpec& s);
void to_json(nlohmann::json& j, const SimOptions& o);

}  // namespace qlink
