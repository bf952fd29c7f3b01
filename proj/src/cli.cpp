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

#include "qlink/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Core>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"
#include "qlink/readout.hpp"
#include "qlink/tomography.hpp"
#include "qlink/units.hpp"

namespace qlink {

namespace {

using nlohmann::json;

const std::vector<std::string> kSweepParameters = {"eta_c", "coherence_scale", "fock", "time_offset"};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

std::string drive_csv(const DriveEnvelope& a, const DriveEnvelope& b) {
  std::string s = "t_ns,g_A,phase_A,g_B,phase_B\n";
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", a.t[k], a.g_mag[k], a.phase[k], b.g_mag[k], b.phase[k]);
  }
  return s;
}

std::string labeled_csv(const std::vector<LabeledValue>& values) {
  std::string s = "label,value\n";
  for (const auto& v : values) s += fmt::format("{},{:.9g}\n", v.label, v.value);
  return s;
}

json pops_json(const Populations& p) { return json::array({p[0], p[1], p[2]}); }

void emission(const RunConfig& c, const DeviceParams& d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  const Node node = c.scenario == "emit-a" ? Node::A : Node::B;
  const auto r = run_emission(d, node, EmissionInitial::F, o);
  const auto& emitter = node == Node::A ? r.trajectory.pops_A : r.trajectory.pops_B;
  out["trajectory.csv"] = trajectory_csv(r.trajectory);
  out["drive.csv"] = drive_csv(r.drive_a, r.drive_b);
  json s{{"scenario", c.scenario},
         {"final_populations_emitter", pops_json(emitter.back())},
         {"emitted_photon_number", r.trajectory.photon_integral.back()},
         {"lost_photon_number", r.trajectory.loss_integral.back()},
         {"window_ns", json::array({r.window_start, r.window_end})}};
  log << fmt::format("{}: final P_g = {:.6f}\n", c.scenario, emitter.back()[0]);

  if (c.truncate_sweep) {
    const double keff = units::mhz(o.kappa_eff > 0.0 ? o.kappa_eff : (node == Node::A ? kDefaultKappaEffA : kDefaultKappaEffB));
    std::string table = "tau_ns,Pg,Pe,Pf\n";
    for (int k = -4; k <= 6; ++k) {
      const double tau = static_cast<double>(k) / keff;
      const auto rt = run_emission(d, node, EmissionInitial::F, o, tau);
      const auto& p = (node == Node::A ? rt.trajectory.pops_A : rt.trajectory.pops_B).back();
      out[fmt::format("truncate_{:02d}.csv", k + 4)] = trajectory_csv(rt.trajectory);
      table += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g}\n", tau, p[0], p[1], p[2]);
    }
    out["truncation.csv"] = table;
    s["truncation_points"] = 11;
    log << "truncation sweep: 11 points\n";
  }
  out["summary.json"] = dump(s);
}

void transfer(const RunConfig& c, DeviceParams d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  if (c.fit_time_offset) {
    d.link.time_offset = fit_time_offset(d, o);
    log << fmt::format("fitted time offset: {:.6f} ns\n", d.link.time_offset);
  }
  const auto r = transfer_report(d, o);
  out["trajectory.csv"] = trajectory_csv(r.transfer.sequence.trajectory);
  out["drive.csv"] = drive_csv(r.transfer.sequence.drive_a, r.transfer.sequence.drive_b);
  out["superposition_with_absorber.csv"] = trajectory_csv(r.with_absorption);
  out["superposition_without_absorber.csv"] = trajectory_csv(r.without_absorption);
  out["emission_a.csv"] = trajectory_csv(r.emit_a);
  out["emission_b.csv"] = trajectory_csv(r.emit_b);
  json s{{"scenario", c.scenario},
         {"transfer_efficiency", r.transfer.transfer_efficiency},
         {"final_f_population_B", r.efficiencies.transfer},
         {"saturation_time_ns", r.saturation_time},
         {"absorption_efficiency", r.efficiencies.absorption},
         {"loss", r.efficiencies.loss},
         {"field_ratio_a_over_b", r.field_ratio_a_over_b},
         {"time_offset_ns", d.link.time_offset}};
  log << fmt::format("transfer: P_e = {:.6f}, saturation {:.2f} ns, absorption {:.6f}, loss {:.6f}\n",
                     r.transfer.transfer_efficiency, r.saturation_time, r.efficiencies.absorption, r.efficiencies.loss);
  out["summary.json"] = dump(s);
}

void qpt(const RunConfig& c, const DeviceParams& d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  const auto r = run_state_transfer_qpt(d, o);
  out["chi.json"] = dump(matrix_to_json(r.process.chi));
  json outputs = json::array();
  for (const auto& m : r.outputs) outputs.push_back(matrix_to_json(m));
  out["outputs.json"] = dump(outputs);
  json s{{"scenario", c.scenario},
         {"process_fidelity", r.process_fidelity},
         {"average_fidelity_from_process", (2.0 * r.process_fidelity + 1.0) / 3.0},
         {"average_fidelity_direct", r.average_fidelity_direct},
         {"phase_correction_rad", r.phase_correction}};
  log << fmt::format("qpt: F_p = {:.6f}\n", r.process_fidelity);
  out["summary.json"] = dump(s);
}

void entangle(const RunConfig& c, const DeviceParams& d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  const auto r = run_entanglement(c.scenario == "upgrade" ? upgrade_device(d) : d, o);
  out["rho_tomography.json"] = dump(matrix_to_json(r.rho_tomography.data));
  out["rho_direct.json"] = dump(matrix_to_json(r.rho_direct.data));
  out["metrics.json"] = dump(json(r.metrics));
  out["pauli.csv"] = labeled_csv(r.metrics.pauli_expectations);
  out["gellmann.csv"] = labeled_csv(r.metrics.gellmann_expectations);
  json s{{"scenario", c.scenario},
         {"fidelity", r.metrics.state_fidelity},
         {"concurrence", r.metrics.concurrence},
         {"concurrence_normalized", r.metrics.concurrence_normalized},
         {"ccnr", r.metrics.ccnr},
         {"hs_distance", r.metrics.hs_distance},
         {"residual_f", r.residual_f},
         {"fidelity_direct", r.metrics_direct.state_fidelity},
         {"phase_correction_rad", r.phase_correction},
         {"mle_iterations", r.mle_iterations}};
  log << fmt::format("{}: F = {:.6f}, C = {:.6f}, ccnr = {:.6f}\n", c.scenario, r.metrics.state_fidelity,
                     r.metrics.concurrence, r.metrics.ccnr);
  out["summary.json"] = dump(s);
}

void budget(const RunConfig& c, const DeviceParams& d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  const auto b = error_budget(d, o);
  json s{{"scenario", c.scenario},
         {"baseline", b.baseline},
         {"loss_off", b.loss_off},
         {"decoherence_off", b.decoherence_off},
         {"both_off", b.both_off},
         {"delta_loss", b.delta_loss()},
         {"delta_decoherence", b.delta_decoherence()}};
  log << fmt::format("budget: baseline {:.6f}, +loss {:.6f}, +decoherence {:.6f}\n", b.baseline, b.delta_loss(),
                     b.delta_decoherence());
  out["summary.json"] = dump(s);
}

void readout_sim(const RunConfig& c, const SimOptions& o, Artifacts& out, std::ostream& log) {
  std::mt19937_64 rng(o.seed);
  json s{{"scenario", c.scenario}, {"shots", o.shots}};
  json matrices;
  Eigen::MatrixXd measured[2];
  const Vector3 truth(0.6, 0.3, 0.1);
  for (int n = 0; n < 2; ++n) {
    const Node node = n == 0 ? Node::A : Node::B;
    const std::string tag = n == 0 ? "A" : "B";
    const auto model = calibrated_readout(node);
    std::vector<Shot> shots;
    measured[n] = measure_assignment(model, o.shots, rng, &shots);
    std::ostringstream os;
    write_shots_csv(os, shots);
    out["shots_" + tag + ".csv"] = os.str();
    matrices["measured_" + tag] = assignment_to_json(measured[n]);
    matrices["reference_" + tag] = assignment_to_json(reference_assignment(node));

    Eigen::VectorXd freq = Eigen::VectorXd::Zero(3);
    for (const auto& x : sample_readout(truth, model, o.shots, rng)) freq(classify(x, model.mixture)) += 1.0;
    freq /= static_cast<double>(o.shots);
    const auto mit = mitigate(freq, measured[n]);
    s["node_" + tag] = {{"error_probability", error_probability(measured[n])},
                        {"prepared_populations", json::array({truth(0), truth(1), truth(2)})},
                        {"raw_populations", json::array({freq(0), freq(1), freq(2)})},
                        {"mitigated_populations",
                         json::array({mit.populations(0), mit.populations(1), mit.populations(2)})},
                        {"condition_number", mit.condition_number},
                        {"warnings", mit.warnings}};
    log << fmt::format("readout {}: error probability {:.6f}\n", tag, error_probability(measured[n]));
  }
  matrices["measured_two_node"] = assignment_to_json(two_node(measured[0], measured[1]));
  matrices["reference_two_node"] = assignment_to_json(two_node(reference_assignment(Node::A), reference_assignment(Node::B)));
  out["assignment.json"] = dump(matrices);
  out["summary.json"] = dump(s);
}

void sweep_scenario(const RunConfig& c, const DeviceParams& d, const SimOptions& o, Artifacts& out, std::ostream& log) {
  const auto rows = sweep(d, o, c.sweep_parameter, c.sweep_values);
  std::string csv = "parameter,value,fidelity,concurrence,ccnr,residual_f\n";
  json s{{"scenario", c.scenario}, {"parameter", c.sweep_parameter}, {"rows", json::array()}};
  for (const auto& r : rows) {
    csv += fmt::format("{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.parameter, r.value, r.fidelity, r.concurrence,
                       r.ccnr, r.residual_f);
    s["rows"].push_back({{"value", r.value},
                         {"fidelity", r.fidelity},
                         {"concurrence", r.concurrence},
                         {"ccnr", r.ccnr},
                         {"residual_f", r.residual_f}});
    log << fmt::format("sweep {} = {:.6g}: F = {:.6f}\n", r.parameter, r.value, r.fidelity);
  }
  out["sweep.csv"] = csv;
  out["summary.json"] = dump(s);
}

json manifest(const RunConfig& c, const DeviceParams& resolved, const SimOptions& o) {
  RunConfig base = c;
  if (!base.device) base.device = base.device_path.empty() ? default_device() : load_device(base.device_path);
  base.device_path.clear();
  base.out_dir.clear();
  return json{{"qlink_version", "0.1.0"},
              {"eigen_version", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
              {"config", base},
              {"resolved_device", resolved},
              {"options", o},
              {"seed", o.seed}};
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"emit-a", "emit-b", "transfer", "qpt", "entangle",
                                                 "upgrade", "budget", "readout-sim", "sweep"};
  return names;
}

void RunConfig::validate() const {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw ValidationError("unknown scenario '" + scenario + "'");
  }
  if (eta_c && !(*eta_c >= 0.0 && *eta_c <= 1.0)) throw ValidationError("eta_c must lie in [0, 1]");
  if (coherence_scale && !(*coherence_scale > 0.0 && std::isfinite(*coherence_scale))) {
    throw ValidationError("coherence scale must be positive");
  }
  if (kappa_eff && !(*kappa_eff > 0.0)) throw ValidationError("kappa_eff must be positive");
  if (time_offset && !(std::abs(*time_offset) <= 50.0)) throw ValidationError("time offset must lie in [-50, 50] ns");
  if (fock && !(*fock >= 2 && *fock <= 8)) throw ValidationError("fock truncation must lie in [2, 8]");
  if (dt && !(*dt > 0.0 && *dt <= 1.0)) throw ValidationError("dt must lie in (0, 1] ns");
  if (!exact && shots == 0) throw ValidationError("shots must be positive");
  if (scenario == "readout-sim" && shots == 0) throw ValidationError("shots must be positive");
  if (scenario == "sweep") {
    if (std::find(kSweepParameters.begin(), kSweepParameters.end(), sweep_parameter) == kSweepParameters.end()) {
      throw ValidationError("unknown sweep parameter '" + sweep_parameter + "'");
    }
    if (sweep_values.empty()) throw ValidationError("sweep: empty value list");
  }
  if (truncate_sweep && scenario != "emit-a" && scenario != "emit-b") {
    throw ValidationError("--truncate-sweep applies to emit-a and emit-b only");
  }
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"scenario", c.scenario},
           {"exact", c.exact},
           {"shots", c.shots},
           {"seed", c.seed},
           {"truncate_sweep", c.truncate_sweep},
           {"fit_time_offset", c.fit_time_offset},
           {"sweep_parameter", c.sweep_parameter},
           {"sweep_values", c.sweep_values}};
  if (c.device) j["device"] = *c.device;
  if (!c.device_path.empty()) j["device_path"] = c.device_path;
  if (!c.out_dir.empty()) j["out_dir"] = c.out_dir;
  json ov = json::object();
  if (c.eta_c) ov["eta_c"] = *c.eta_c;
  if (c.coherence_scale) ov["coherence_scale"] = *c.coherence_scale;
  if (c.kappa_eff) ov["kappa_eff"] = *c.kappa_eff;
  if (c.time_offset) ov["time_offset"] = *c.time_offset;
  if (c.fock) ov["fock"] = *c.fock;
  if (c.dt) ov["dt"] = *c.dt;
  j["overrides"] = ov;
}

void from_json(const json& j, RunConfig& c) {
  c = RunConfig{};
  c.scenario = j.value("scenario", c.scenario);
  c.exact = j.value("exact", c.exact);
  c.shots = j.value("shots", c.shots);
  c.seed = j.value("seed", c.seed);
  c.truncate_sweep = j.value("truncate_sweep", false);
  c.fit_time_offset = j.value("fit_time_offset", false);
  c.sweep_parameter = j.value("sweep_parameter", c.sweep_parameter);
  if (j.contains("sweep_values")) j.at("sweep_values").get_to(c.sweep_values);
  if (j.contains("device")) c.device = j.at("device").get<DeviceParams>();
  c.device_path = j.value("device_path", std::string{});
  c.out_dir = j.value("out_dir", std::string{});
  if (j.contains("overrides")) {
    const auto& ov = j.at("overrides");
    if (ov.contains("eta_c")) c.eta_c = ov.at("eta_c").get<double>();
    if (ov.contains("coherence_scale")) c.coherence_scale = ov.at("coherence_scale").get<double>();
    if (ov.contains("kappa_eff")) c.kappa_eff = ov.at("kappa_eff").get<double>();
    if (ov.contains("time_offset")) c.time_offset = ov.at("time_offset").get<double>();
    if (ov.contains("fock")) c.fock = ov.at("fock").get<int>();
    if (ov.contains("dt")) c.dt = ov.at("dt").get<double>();
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  try {
    const json j = json::parse(in);
    return j.contains("config") ? j.at("config").get<RunConfig>() : j.get<RunConfig>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config '{}': {}", path, e.what()));
  }
}

DeviceParams resolve_device(const RunConfig& c) {
  DeviceParams d = c.device ? *c.device : (c.device_path.empty() ? default_device() : load_device(c.device_path));
  if (c.eta_c) d.link.eta_c = *c.eta_c;
  if (c.time_offset) d.link.time_offset = *c.time_offset;
  if (c.coherence_scale) {
    d.a = scale_coherence(d.a, *c.coherence_scale);
    d.b = scale_coherence(d.b, *c.coherence_scale);
  }
  d.validate();
  if (c.kappa_eff && *c.kappa_eff > std::min(d.a.kappa_T, d.b.kappa_T)) {
    throw ValidationError("kappa_eff must not exceed either kappa_T");
  }
  return d;
}

SimOptions resolve_options(const RunConfig& c) {
  SimOptions o;
  if (c.fock) o.fock = *c.fock;
  if (c.dt) o.dt = *c.dt;
  if (c.kappa_eff) o.kappa_eff = *c.kappa_eff;
  o.tomography = c.exact ? TomographyMode::Exact : TomographyMode::Sampled;
  o.shots = c.shots;
  o.seed = c.seed;
  o.validate();
  return o;
}

std::string resolve_out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "qlink-out";
}

Artifacts run_scenario(const RunConfig& c, std::ostream& log) {
  c.validate();
  const DeviceParams d = resolve_device(c);
  const SimOptions o = resolve_options(c);
  Artifacts out;
  if (c.scenario == "emit-a" || c.scenario == "emit-b") {
    emission(c, d, o, out, log);
  } else if (c.scenario == "transfer") {
    transfer(c, d, o, out, log);
  } else if (c.scenario == "qpt") {
    qpt(c, d, o, out, log);
  } else if (c.scenario == "entangle" || c.scenario == "upgrade") {
    entangle(c, d, o, out, log);
  } else if (c.scenario == "budget") {
    budget(c, d, o, out, log);
  } else if (c.scenario == "readout-sim") {
    readout_sim(c, o, out, log);
  } else {
    sweep_scenario(c, d, o, out, log);
  }
  out["manifest.json"] = dump(manifest(c, d, o));
  return out;
}

int run(const RunConfig& c, std::ostream& log) {
  std::string out_dir;
  try {
    c.validate();
    resolve_device(c);
    resolve_options(c);
    out_dir = resolve_out_dir(c);
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  std::ostringstream run_log;
  Artifacts out;
  int code = kExitOk;
  try {
    out = run_scenario(c, run_log);
  } catch (const NumericalError& e) {
    run_log << "numerical failure: " << e.what() << "\n";
    code = kExitNumerical;
  } catch (const std::invalid_argument& e) {
    log << run_log.str() << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  log << run_log.str();

  try {
    std::filesystem::create_directories(out_dir);
    out["log.txt"] = run_log.str();
    for (const auto& [name, contents] : out) {
      std::ofstream f(std::filesystem::path(out_dir) / name, std::ios::binary);
      f << contents;
      if (!f) throw std::runtime_error("cannot write " + name);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  if (code == kExitOk) log << fmt::format("wrote {} files to {}\n", out.size(), out_dir);
  return code;
}

}  // namespace qlink
