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

#include "qlink/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"
#include "qlink/units.hpp"

namespace qlink {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t transmon_slot(Node n) { return n == Node::A ? kTransmonA : kTransmonB; }

DriveEnvelope zero_envelope(const std::vector<double>& grid) {
  DriveEnvelope env;
  env.t = grid;
  env.g_mag.assign(grid.size(), 0.0);
  env.phase.assign(grid.size(), 0.0);
  return env;
}

double resolve_kappa_eff(const ProtocolSpec& spec, const SimOptions& options) {
  if (options.kappa_eff > 0.0) return options.kappa_eff;
  if (spec.kappa_eff > 0.0) return spec.kappa_eff;
  if (spec.drive_a == DriveRole::Emit) return kDefaultKappaEffA;
  if (spec.drive_b == DriveRole::Emit) return kDefaultKappaEffB;
  return kDefaultKappaEffA;
}

Matrix virtual_z(double phase) {
  Matrix u = identity(3);
  u(1, 1) = std::polar(1.0, phase);
  return u;
}

// Outcome frequencies for one setting simulated shot by shot through the
// readout models (one per qutrit, node A first). Shots are grouped by the
// projected outcome; the nodes are read out independently.
std::vector<double> sampled_frequencies(const std::vector<double>& probs, const std::vector<ReadoutModel>& models,
                                        std::size_t shots, std::mt19937_64& rng) {
  std::vector<double> weights(probs.size());
  std::transform(probs.begin(), probs.end(), weights.begin(), [](double p) { return std::max(p, 0.0); });
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<std::size_t> projected(probs.size(), 0);
  for (std::size_t i = 0; i < shots; ++i) ++projected[static_cast<std::size_t>(pick(rng))];

  std::vector<double> counts(probs.size(), 0.0);
  const std::size_t nq = models.size();
  for (std::size_t outcome = 0; outcome < projected.size(); ++outcome) {
    const std::size_t c = projected[outcome];
    if (c == 0) continue;
    std::vector<int> assigned(c, 0);
    std::size_t stride = nq == 2 ? 3 : 1;
    for (std::size_t q = 0; q < nq; ++q) {
      const int level = static_cast<int>((outcome / stride) % 3);
      const auto xs = sample_readout(Vector3::Unit(level), models[q], c, rng);
      for (std::size_t i = 0; i < c; ++i) assigned[i] = assigned[i] * 3 + classify(xs[i], models[q].mixture);
      stride /= 3;
    }
    for (int a : assigned) counts[static_cast<std::size_t>(a)] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(shots);
  return counts;
}

// Populations per tomography setting, exact or sampled and mitigated.
std::vector<std::vector<double>> tomography_data(const Matrix& rho, const std::vector<TomographySetting>& settings,
                                                 const SimOptions& options, std::uint64_t stream) {
  std::vector<std::vector<double>> pops;
  if (options.tomography == TomographyMode::Exact) {
    for (const auto& s : settings) pops.push_back(born_probabilities(rho, s));
    return pops;
  }
  std::mt19937_64 rng(options.seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
  const bool two = rho.rows() == 9;
  std::vector<ReadoutModel> models;
  if (two) models.push_back(calibrated_readout(Node::A));
  models.push_back(calibrated_readout(Node::B));
  Eigen::MatrixXd r = measure_assignment(models.front(), options.shots, rng);
  if (two) r = two_node(r, measure_assignment(models.back(), options.shots, rng));
  for (const auto& s : settings) {
    const auto m = sampled_frequencies(born_probabilities(rho, s), models, options.shots, rng);
    const auto mit = mitigate(Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size())), r);
    pops.emplace_back(mit.populations.data(), mit.populations.data() + mit.populations.size());
  }
  return pops;
}

std::string axis_name(Axis a) { return a == Axis::X ? "x" : a == Axis::Y ? "y" : "z"; }

}  // namespace

void ProtocolSpec::validate() const {
  if (drive_a == DriveRole::Absorb) throw ValidationError("protocol: node A cannot absorb (the channel runs from A to B)");
  if (drive_b == DriveRole::Absorb && drive_a != DriveRole::Emit) {
    throw ValidationError("protocol: absorption at B requires emission from A");
  }
  for (const auto* list : {&preparation, &final_pulses}) {
    for (const auto& r : *list) {
      if (!(std::abs(r.angle) <= kPi + 1e-12)) throw ValidationError("protocol: rotation angles must lie in [-pi, pi]");
    }
  }
  if (!(kappa_eff >= 0.0)) throw ValidationError("protocol: kappa_eff must be non-negative");
  if (std::isnan(truncation)) throw ValidationError("protocol: truncation is NaN");
  if (!(field_tail >= 0.0)) throw ValidationError("protocol: field_tail must be non-negative");
  if (measurement != "trajectory" && measurement != "qst" && measurement != "qpt") {
    throw ValidationError("protocol: measurement must be trajectory, qst or qpt");
  }
}

void SimOptions::validate() const {
  if (fock < 2) throw ValidationError("options: fock must be >= 2");
  if (!(dt > 0.0 && dt <= 1.0)) throw ValidationError("options: dt must lie in (0, 1] ns");
  if (!(window_factor >= 6.0)) throw ValidationError("options: window_factor must be >= 6");
  if (!(field_tail >= 0.0)) throw ValidationError("options: field_tail must be non-negative");
  if (tomography == TomographyMode::Sampled && shots == 0) throw ValidationError("options: shots must be positive");
  if (!(kappa_eff >= 0.0)) throw ValidationError("options: kappa_eff must be non-negative");
}

SequenceResult run_sequence(const DeviceParams& device, const ProtocolSpec& spec, const SimOptions& options) {
  device.validate();
  spec.validate();
  options.validate();

  const double keff = units::mhz(resolve_kappa_eff(spec, options));
  const double half = options.window_factor / keff;
  const auto grid = symmetric_grid(half, options.dt);
  const double kt_a = units::mhz(device.a.kappa_T);
  const double kt_b = units::mhz(device.b.kappa_T);

  SequenceResult res;
  res.window_start = grid.front();
  res.window_end = grid.back();
  HamiltonianOptions hopt;

  auto emitter = [&](double kt, const StarkModel& model, std::vector<double>& f_shift) {
    DriveEnvelope env = emission_drive(grid, keff, kt);
    if (spec.stark_compensation) {
      f_shift = stark_shift(env, model);
      env = stark_phase_track(env, model);
    }
    if (std::isfinite(spec.truncation)) {
      const double tau = std::clamp(spec.truncation, grid.front(), grid.back());
      env = truncate(env, tau);
      if (spec.stark_compensation) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (grid[i] > env.t_stop) f_shift[i] = 0.0;
        }
      }
    }
    return env;
  };

  res.drive_a = spec.drive_a == DriveRole::Emit ? emitter(kt_a, default_stark_model_a(), hopt.f_shift_a) : zero_envelope(grid);
  if (spec.drive_b == DriveRole::Emit) {
    res.drive_b = emitter(kt_b, default_stark_model_b(), hopt.f_shift_b);
  } else if (spec.drive_b == DriveRole::Absorb) {
    DriveEnvelope env = absorption_drive(emission_drive(grid, keff, kt_b), spec.conjugate_absorption);
    env = resample(shift_time(env, device.link.time_offset), grid);
    if (spec.stark_compensation) {
      hopt.f_shift_b = stark_shift(env, default_stark_model_b());
      env = stark_phase_track(env, default_stark_model_b());
    }
    res.drive_b = env;
  } else {
    res.drive_b = zero_envelope(grid);
  }

  const auto h = build_hamiltonian(device.a, device.b, device.link, res.drive_a, res.drive_b, options.fock, hopt);
  const auto collapse = build_collapse_ops(device.a, device.b, device.link, options.fock);

  Vector psi = Vector::Zero(total_dim(h.dims));
  psi(0) = 1.0;
  for (const auto& r : spec.preparation) {
    psi = embed(qutrit_rotation(r.transition, r.axis, r.angle), transmon_slot(r.node), h.dims).data * psi;
  }
  const auto rho0 = DensityMatrix::from_ket(h.dims, psi);

  std::vector<double> t_grid = grid;
  const double tail = spec.field_tail;
  if (tail > 0.0) {
    const auto steps = static_cast<long>(std::ceil(tail / options.dt - 1e-9));
    for (long k = 1; k <= steps; ++k) t_grid.push_back(grid.back() + static_cast<double>(k) * options.dt);
  }

  IntegratorOptions iopt;
  iopt.max_dt = options.dt;
  auto me = integrate_me(h, collapse, rho0, t_grid, device_observables(device.a, device.b, device.link, options.fock), iopt);
  res.trajectory = std::move(me.trajectory);

  Matrix rho = me.final_state.data;
  for (const auto& r : spec.final_pulses) {
    const Matrix u = embed(qutrit_rotation(r.transition, r.axis, r.angle), transmon_slot(r.node), h.dims).data;
    rho = u * rho * u.adjoint();
  }
  res.final_state = DensityMatrix(h.dims, rho);
  res.qutrits = partial_trace(res.final_state, {kTransmonA, kTransmonB});
  return res;
}

ProtocolSpec emission_spec(Node node, EmissionInitial initial, double tau) {
  ProtocolSpec s;
  s.name = fmt::format("emit-{}", node == Node::A ? "a" : "b");
  const double ge_angle = initial == EmissionInitial::F ? kPi : kPi / 2.0;
  s.preparation = {{node, Transition::GE, Axis::Y, ge_angle}, {node, Transition::EF, Axis::Y, kPi}};
  (node == Node::A ? s.drive_a : s.drive_b) = DriveRole::Emit;
  s.truncation = tau;
  return s;
}

SequenceResult run_emission(const DeviceParams& device, Node node, EmissionInitial initial, const SimOptions& options,
                            double tau) {
  return run_sequence(device, emission_spec(node, initial, tau), options);
}

std::vector<Rotation> qubit_preparation(int index) {
  switch (index) {
    case 0:
      return {};
    case 1:
      return {{Node::A, Transition::GE, Axis::Y, kPi}};
    case 2:
      return {{Node::A, Transition::GE, Axis::Y, kPi / 2.0}};
    case 3:
      return {{Node::A, Transition::GE, Axis::Y, -kPi / 2.0}};
    case 4:
      return {{Node::A, Transition::GE, Axis::X, -kPi / 2.0}};
    case 5:
      return {{Node::A, Transition::GE, Axis::X, kPi / 2.0}};
    default:
      throw ValidationError("qubit_preparation: index must be 0..5");
  }
}

ProtocolSpec transfer_spec(const std::vector<Rotation>& qubit_prep, bool absorb) {
  ProtocolSpec s;
  s.name = absorb ? "transfer" : "transfer-no-absorber";
  s.preparation = qubit_prep;
  s.preparation.push_back({Node::A, Transition::EF, Axis::Y, kPi});
  s.drive_a = DriveRole::Emit;
  s.drive_b = absorb ? DriveRole::Absorb : DriveRole::None;
  s.final_pulses = {{Node::B, Transition::EF, Axis::Y, kPi}};
  return s;
}

TransferResult run_transfer(const DeviceParams& device, const std::vector<Rotation>& qubit_prep,
                            const SimOptions& options) {
  TransferResult r;
  r.sequence = run_sequence(device, transfer_spec(qubit_prep), options);
  const auto& tr = r.sequence.trajectory;
  std::vector<double> t, pf;
  for (std::size_t k = 0; k < tr.size() && tr.t[k] <= r.sequence.window_end + 1e-9; ++k) {
    t.push_back(tr.t[k]);
    pf.push_back(tr.pops_B[k][2]);
  }
  const auto rho_b = partial_trace(r.sequence.final_state, {kTransmonB});
  r.transfer_efficiency = rho_b.data(1, 1).real();
  r.saturation_time = saturation_time(t, pf);
  return r;
}

TransferReport transfer_report(const DeviceParams& device, const SimOptions& options) {
  TransferReport rep;
  rep.transfer = run_transfer(device, qubit_preparation(1), options);
  rep.saturation_time = rep.transfer.saturation_time;

  auto sup = [&](bool absorb) {
    ProtocolSpec s = transfer_spec(qubit_preparation(2), absorb);
    s.field_tail = options.field_tail;
    return run_sequence(device, s, options).trajectory;
  };
  rep.with_absorption = sup(true);
  rep.without_absorption = sup(false);
  auto emit = [&](Node n) {
    ProtocolSpec s = emission_spec(n, EmissionInitial::GFSuperposition);
    s.field_tail = options.field_tail;
    return run_sequence(device, s, options).trajectory;
  };
  rep.emit_a = emit(Node::A);
  rep.emit_b = emit(Node::B);
  rep.efficiencies = efficiencies(rep.transfer.sequence.trajectory, rep.with_absorption, rep.without_absorption,
                                  rep.emit_a, rep.emit_b);
  rep.field_ratio_a_over_b = rep.emit_a.mean_field_energy() / rep.emit_b.mean_field_energy();
  return rep;
}

double fit_time_offset(const DeviceParams& device, const SimOptions& options, double range) {
  if (!(range > 0.0)) throw ValidationError("fit_time_offset: range must be positive");
  auto cost = [&](double offset) {
    DeviceParams d = device;
    d.link.time_offset = offset;
    return -run_transfer(d, qubit_preparation(1), options).transfer_efficiency;
  };
  std::uintmax_t iterations = 30;
  const auto best = boost::math::tools::brent_find_minima(cost, -range, range, 20, iterations);
  return best.first;
}

QptResult run_state_transfer_qpt(const DeviceParams& device, const SimOptions& options) {
  const auto inputs = qpt_input_states();
  std::vector<Matrix> direct;
  for (int i = 0; i < static_cast<int>(inputs.size()); ++i) {
    const auto r = run_transfer(device, qubit_preparation(i), options);
    direct.push_back(partial_trace(r.sequence.final_state, {kTransmonB}).data);
  }
  QptResult res;
  // Virtual Z on B aligning the transferred (|g> + |e>)/sqrt2 coherence with the input.
  res.phase_correction = -std::arg(direct[2](1, 0));
  const Matrix z = virtual_z(res.phase_correction);
  const auto settings = gate_set(SettingKind::Single);
  std::vector<Matrix> in_rho;
  double fsum = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Matrix rho = z * direct[i] * z.adjoint();
    Vector psi3 = Vector::Zero(3);
    psi3.head(2) = inputs[i];
    fsum += state_fidelity(rho, psi3);
    const auto pops = tomography_data(rho, settings, options, i);
    const auto mle = qst_mle(pops, settings, Dims{3});
    res.outputs.push_back(mle.rho.data.topLeftCorner(2, 2));
    in_rho.push_back(inputs[i] * inputs[i].adjoint());
  }
  res.average_fidelity_direct = fsum / static_cast<double>(inputs.size());
  res.process = qpt_linear_inversion(in_rho, res.outputs);
  res.process_fidelity = process_fidelity(res.process.chi, identity_chi());
  return res;
}

Vector bell_target() {
  Vector psi = Vector::Zero(4);
  psi(1) = psi(2) = 1.0 / std::numbers::sqrt2;
  return psi;
}

EntanglementResult run_entanglement(const DeviceParams& device, const SimOptions& options) {
  ProtocolSpec s;
  s.name = "entangle";
  s.preparation = {{Node::A, Transition::GE, Axis::Y, kPi}, {Node::A, Transition::EF, Axis::Y, kPi / 2.0}};
  s.drive_a = DriveRole::Emit;
  s.drive_b = DriveRole::Absorb;
  s.final_pulses = {{Node::B, Transition::EF, Axis::Y, kPi}};
  s.measurement = "qst";

  EntanglementResult res;
  res.sequence = run_sequence(device, s, options);
  const Matrix& q = res.sequence.qutrits.data;
  // Virtual Z on B making <eg|rho|ge> real and positive.
  res.phase_correction = std::arg(q(3, 1));
  const Matrix u = kron(identity(3), virtual_z(res.phase_correction));
  res.rho_direct = DensityMatrix(Dims{3, 3}, hermitian_part(u * q * u.adjoint()));

  const auto settings = gate_set(SettingKind::Pair);
  const auto pops = tomography_data(res.rho_direct.data, settings, options, 100);
  const auto mle = qst_mle(pops, settings, Dims{3, 3});
  res.rho_tomography = mle.rho;
  res.mle_iterations = mle.iterations;
  res.metrics = entanglement_metrics(res.rho_tomography, bell_target());
  res.metrics_direct = entanglement_metrics(res.rho_direct, bell_target());
  res.residual_f = 1.0 - qubit_reduction(res.rho_direct.data).trace().real();
  return res;
}

DeviceParams upgrade_device(const DeviceParams& base) {
  DeviceParams d = base;
  for (NodeParams* n : {&d.a, &d.b}) {
    n->T1ge = n->T2ge = 30.0;
    n->T1ef = n->T2ef = 20.0;
  }
  d.link.eta_c = 0.88;
  return d;
}

EntanglementResult run_upgrade_scenario(const DeviceParams& base, const SimOptions& options) {
  return run_entanglement(upgrade_device(base), options);
}

BudgetResult error_budget(const DeviceParams& device, const SimOptions& options) {
  auto fidelity = [&](const DeviceParams& d) { return run_entanglement(d, options).metrics.state_fidelity; };
  DeviceParams lossless = device;
  lossless.link.eta_c = 1.0;
  DeviceParams coherent = device;
  coherent.a = without_decoherence(coherent.a);
  coherent.b = without_decoherence(coherent.b);
  DeviceParams ideal = coherent;
  ideal.link.eta_c = 1.0;
  BudgetResult b;
  b.baseline = fidelity(device);
  b.loss_off = fidelity(lossless);
  b.decoherence_off = fidelity(coherent);
  b.both_off = fidelity(ideal);
  return b;
}

std::vector<SweepRow> sweep(const DeviceParams& device, const SimOptions& options, const std::string& parameter,
                            const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("sweep: empty value list");
  std::vector<SweepRow> rows;
  for (double v : values) {
    DeviceParams d = device;
    SimOptions o = options;
    if (parameter == "eta_c") {
      d.link.eta_c = v;
    } else if (parameter == "coherence_scale") {
      d.a = scale_coherence(d.a, v);
      d.b = scale_coherence(d.b, v);
    } else if (parameter == "fock") {
      if (v != std::floor(v)) throw ValidationError("sweep: fock values must be integers");
      o.fock = static_cast<int>(v);
    } else if (parameter == "time_offset") {
      d.link.time_offset = v;
    } else {
      throw ValidationError("sweep: unknown parameter '" + parameter + "'");
    }
    const auto r = run_entanglement(d, o);
    rows.push_back({parameter, v, r.metrics.state_fidelity, r.metrics.concurrence, r.metrics.ccnr, r.residual_f});
  }
  return rows;
}

std::string to_string(DriveRole role) {
  switch (role) {
    case DriveRole::Emit:
      return "emit";
    case DriveRole::Absorb:
      return "absorb";
    default:
      return "none";
  }
}

DriveRole parse_drive_role(const std::string& s) {
  if (s == "none") return DriveRole::None;
  if (s == "emit") return DriveRole::Emit;
  if (s == "absorb") return DriveRole::Absorb;
  throw ValidationError("unknown drive role '" + s + "'");
}

void to_json(nlohmann::json& j, const Rotation& r) {
  j = nlohmann::json{{"node", r.node == Node::A ? "A" : "B"},
                     {"transition", r.transition == Transition::GE ? "ge" : "ef"},
                     {"axis", axis_name(r.axis)},
                     {"angle", r.angle}};
}

void from_json(const nlohmann::json& j, Rotation& r) {
  const auto node = j.at("node").get<std::string>();
  if (node != "A" && node != "B") throw ValidationError("rotation: node must be A or B");
  r.node = node == "A" ? Node::A : Node::B;
  const auto tr = j.at("transition").get<std::string>();
  if (tr != "ge" && tr != "ef") throw ValidationError("rotation: transition must be ge or ef");
  r.transition = tr == "ge" ? Transition::GE : Transition::EF;
  const auto ax = j.at("axis").get<std::string>();
  if (ax == "x") {
    r.axis = Axis::X;
  } else if (ax == "y") {
    r.axis = Axis::Y;
  } else if (ax == "z") {
    r.axis = Axis::Z;
  } else {
    throw ValidationError("rotation: axis must be x, y or z");
  }
  r.angle = j.at("angle").get<double>();
}

void to_json(nlohmann::json& j, const ProtocolSpec& s) {
  j = nlohmann::json{{"name", s.name},
                     {"preparation", s.preparation},
                     {"drive_a", to_string(s.drive_a)},
                     {"drive_b", to_string(s.drive_b)},
                     {"kappa_eff", s.kappa_eff},
                     {"conjugate_absorption", s.conjugate_absorption},
                     {"stark_compensation", s.stark_compensation},
                     {"field_tail", s.field_tail},
                     {"final_pulses", s.final_pulses},
                     {"measurement", s.measurement},
                     {"seed", s.seed}};
  if (std::isfinite(s.truncation)) {
    j["truncation"] = s.truncation;
  } else {
    j["truncation"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, ProtocolSpec& s) {
  s = ProtocolSpec{};
  s.name = j.value("name", std::string{});
  if (j.contains("preparation")) j.at("preparation").get_to(s.preparation);
  s.drive_a = parse_drive_role(j.value("drive_a", std::string{"none"}));
  s.drive_b = parse_drive_role(j.value("drive_b", std::string{"none"}));
  s.kappa_eff = j.value("kappa_eff", 0.0);
  if (j.contains("truncation") && !j.at("truncation").is_null()) s.truncation = j.at("truncation").get<double>();
  s.conjugate_absorption = j.value("conjugate_absorption", true);
  s.stark_compensation = j.value("stark_compensation", false);
  s.field_tail = j.value("field_tail", 0.0);
  if (j.contains("final_pulses")) j.at("final_pulses").get_to(s.final_pulses);
  s.measurement = j.value("measurement", std::string{"trajectory"});
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
}

void to_json(nlohmann::json& j, const SimOptions& o) {
  j = nlohmann::json{{"fock", o.fock},
                     {"dt", o.dt},
                     {"window_factor", o.window_factor},
                     {"field_tail", o.field_tail},
                     {"tomography", o.tomography == TomographyMode::Exact ? "exact" : "sampled"},
                     {"shots", o.shots},
                     {"seed", o.seed},
                     {"kappa_eff", o.kappa_eff}};
}

}  // namespace qlink
