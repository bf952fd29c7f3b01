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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qlink/cli.hpp"
#include "qlink/errors.hpp"

namespace fs = std::filesystem;
using namespace qlink;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qlink_test_" + name);
  fs::remove_all(p);
  return p;
}

int invoke(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" QLINK_CLI_PATH "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.scenario = "teleport";
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.scenario = "sweep";
  EXPECT_THROW(c.validate(), ValidationError);
  c.sweep_values = {0.5};
  EXPECT_NO_THROW(c.validate());
  c = {};
  c.kappa_eff = 50.0;
  EXPECT_THROW(resolve_device(c), ValidationError);
}

TEST(Config, OverridesApply) {
  RunConfig c;
  c.eta_c = 0.9;
  c.coherence_scale = 2.0;
  const auto d = resolve_device(c);
  EXPECT_EQ(d.link.eta_c, 0.9);
  EXPECT_DOUBLE_EQ(d.a.T1ge, 2.0 * default_device().a.T1ge);
  c.fock = 4;
  c.exact = false;
  const auto o = resolve_options(c);
  EXPECT_EQ(o.fock, 4);
  EXPECT_EQ(o.tomography, TomographyMode::Sampled);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.scenario = "sweep";
  c.sweep_parameter = "fock";
  c.sweep_values = {3, 4};
  c.time_offset = 1.5;
  const nlohmann::json j = c;
  EXPECT_EQ(nlohmann::json(j.get<RunConfig>()), j);
}

TEST(OutDir, FlagThenEnvironmentThenDefault) {
  RunConfig c;
  c.out_dir = "/tmp/a";
  EXPECT_EQ(resolve_out_dir(c), "/tmp/a");
  c.out_dir.clear();
  ::setenv(kOutDirEnv, "/tmp/b", 1);
  EXPECT_EQ(resolve_out_dir(c), "/tmp/b");
  ::unsetenv(kOutDirEnv);
  EXPECT_EQ(resolve_out_dir(c), "qlink-out");
}

TEST(Binary, UnknownScenarioWritesNothing) {
  const auto out = scratch("bogus");
  EXPECT_EQ(invoke("run --scenario teleport --out " + out.string()), kExitValidation);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(invoke("sweep --parameter eta_c --out " + out.string()), kExitValidation);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(invoke("run --scenario entangle --dt -1 --out " + out.string()), kExitValidation);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(invoke("frobnicate"), kExitValidation);
}

TEST(Binary, ManifestReproducesRun) {
  const auto first = scratch("first"), second = scratch("second");
  ASSERT_EQ(invoke("run --scenario readout-sim --sampled --shots 2000 --seed 11 --out " + first.string()), kExitOk);
  ASSERT_TRUE(fs::exists(first / "manifest.json"));
  ASSERT_EQ(invoke("run --config " + (first / "manifest.json").string() + " --out " + second.string()), kExitOk);
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename();
    if (name == "log.txt") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(second / name)) << name;
  }
}

TEST(Binary, EnvironmentSelectsOutputDirectory) {
  const auto out = scratch("env");
  ASSERT_EQ(invoke("run --scenario readout-sim --shots 500", std::string(kOutDirEnv) + "=" + out.string()), kExitOk);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "assignment.json"));
}

TEST(Binary, EntangleArtifacts) {
  const auto out = scratch("entangle");
  ASSERT_EQ(invoke("run --scenario entangle --out " + out.string()), kExitOk);
  for (const char* f : {"rho_tomography.json", "rho_direct.json", "metrics.json", "pauli.csv", "gellmann.csv",
                        "summary.json", "manifest.json", "log.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto m = nlohmann::json::parse(slurp(out / "metrics.json"));
  EXPECT_GT(m.at("state_fidelity").get<double>(), 0.7);
}
