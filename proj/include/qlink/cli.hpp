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

// Scenario runner behind the qlink command-line tool.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qlink/device.hpp"
#include "qlink/protocols.hpp"

namespace qlink {

inline constexpr const char* kOutDirEnv = "QLINK_OUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitValidation = 2, kExitNumerical = 3 };

struct RunConfig {
  std::string device_path;             ///< empty: built-in device
  std::optional<DeviceParams> device;  ///< inline device, takes precedence over device_path
  std::string scenario = "entangle";

  std::optional<double> eta_c;
  std::optional<double> coherence_scale;  ///< multiplies every T1 and T2
  std::optional<double> kappa_eff;        ///< MHz
  std::optional<double> time_offset;      ///< ns
  std::optional<int> fock;
  std::optional<double> dt;               ///< ns

  bool exact = true;
  std::size_t shots = 25000;
  std::uint64_t seed = 20190101;
  std::string out_dir;  ///< empty: $QLINK_OUT_DIR, then ./qlink-out

  bool truncate_sweep = false;
  bool fit_time_offset = false;
  std::string sweep_parameter = "eta_c";
  std::vector<double> sweep_values;

  void validate() const;
};

const std::vector<std::string>& scenario_names();

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Reads a config file. A run manifest is accepted as well.
RunConfig load_run_config(const std::string& path);

/// Base device with the overrides applied.
DeviceParams resolve_device(const RunConfig& c);
SimOptions resolve_options(const RunConfig& c);
std::string resolve_out_dir(const RunConfig& c);

/// File name -> contents, written in name order.
using Artifacts = std::map<std::string, std::string>;

/// Runs the scenario without touching the filesystem.
Artifacts run_scenario(const RunConfig& c, std::ostream& log);

/// Validates, runs and writes artifacts. Returns an ExitCode.
int run(const RunConfig& c, std::ostream& log);

}  // namespace qlink
