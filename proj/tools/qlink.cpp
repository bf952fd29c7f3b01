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

// qlink: run state-transfer and entanglement scenarios between two nodes.
//
//   qlink run --scenario entangle --out results/
//   qlink sweep --parameter eta_c --values 1,0.88,0.77

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlink/cli.hpp"
#include "qlink/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::string device;
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t shots = 0;
  bool exact = false;
  bool sampled = false;
  double eta_c = 0.0;
  double coherence_scale = 0.0;
  double kappa_eff = 0.0;
  double time_offset = 0.0;
  int fock = 0;
  double dt = 0.0;
  bool truncate_sweep = false;
  bool fit_time_offset = false;
  std::string parameter;
  std::vector<double> values;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run config or manifest; flags override its values");
  cmd->add_option("--device", f.device, "device JSON file (default: built-in parameters)");
  cmd->add_option("--out", f.out, "output directory (default: $QLINK_OUT_DIR or ./qlink-out)");
  cmd->add_option("--seed", f.seed, "RNG seed for sampled readout");
  cmd->add_option("--shots", f.shots, "shots per setting in sampled mode");
  cmd->add_flag("--exact", f.exact, "exact outcome probabilities for tomography (default)");
  cmd->add_flag("--sampled", f.sampled, "simulate single-shot readout and mitigation for tomography");
  cmd->add_option("--eta-c", f.eta_c, "channel transmission override");
  cmd->add_option("--coherence-scale", f.coherence_scale, "multiply every T1 and T2");
  cmd->add_option("--kappa-eff", f.kappa_eff, "photon bandwidth kappa_eff/2pi in MHz");
  cmd->add_option("--time-offset", f.time_offset, "absorber drive delay in ns");
  cmd->add_option("--fock", f.fock, "transfer resonator truncation");
  cmd->add_option("--dt", f.dt, "integration step in ns");
}

qlink::RunConfig build_config(CLI::App* cmd, const Flags& f) {
  qlink::RunConfig c = f.config.empty() ? qlink::RunConfig{} : qlink::load_run_config(f.config);
  auto given = [&](const char* name) { return cmd->get_option_no_throw(name) != nullptr && cmd->count(name) > 0; };
  if (given("--device")) {
    c.device_path = f.device;
    c.device.reset();
  }
  if (given("--scenario")) c.scenario = f.scenario;
  if (given("--out")) c.out_dir = f.out;
  if (given("--seed")) c.seed = f.seed;
  if (given("--shots")) c.shots = f.shots;
  if (f.exact) c.exact = true;
  if (f.sampled) c.exact = false;
  if (given("--eta-c")) c.eta_c = f.eta_c;
  if (given("--coherence-scale")) c.coherence_scale = f.coherence_scale;
  if (given("--kappa-eff")) c.kappa_eff = f.kappa_eff;
  if (given("--time-offset")) c.time_offset = f.time_offset;
  if (given("--fock")) c.fock = f.fock;
  if (given("--dt")) c.dt = f.dt;
  if (f.truncate_sweep) c.truncate_sweep = true;
  if (f.fit_time_offset) c.fit_time_offset = true;
  if (given("--parameter")) c.sweep_parameter = f.parameter;
  if (given("--values")) c.sweep_values = f.values;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic state transfer and remote entanglement between two cascaded nodes"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run, f);
  run->add_option("--scenario", f.scenario,
                  "emit-a, emit-b, transfer, qpt, entangle, upgrade, budget, readout-sim or sweep");
  run->add_flag("--truncate-sweep", f.truncate_sweep, "emission runs over a range of drive truncation times");
  run->add_flag("--fit-time-offset", f.fit_time_offset, "fit the absorber delay to maximize transfer");
  run->add_option("--parameter", f.parameter, "sweep parameter for --scenario sweep");
  run->add_option("--values", f.values, "sweep values")->delimiter(',');

  auto* sw = app.add_subcommand("sweep", "entanglement metrics over one parameter");
  add_common(sw, f);
  sw->add_option("--parameter", f.parameter, "eta_c, coherence_scale, fock or time_offset")->required();
  sw->add_option("--values", f.values, "comma-separated values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qlink::kExitValidation;
  }

  qlink::RunConfig config;
  try {
    if (run->parsed()) {
      config = build_config(run, f);
    } else {
      config = build_config(sw, f);
      config.scenario = "sweep";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qlink::kExitValidation;
  }
  return qlink::run(config, std::cerr);
}
