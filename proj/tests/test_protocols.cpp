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

#include <cmath>

#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"
#include "qlink/metrics.hpp"
#include "qlink/protocols.hpp"

using namespace qlink;

namespace {

DeviceParams ideal_device() {
  DeviceParams d = default_device();
  d.a = without_decoherence(d.a);
  d.b = without_decoherence(d.b);
  d.link.eta_c = 1.0;
  return d;
}

}  // namespace

TEST(Spec, Validation) {
  ProtocolSpec s = transfer_spec(qubit_preparation(1));
  EXPECT_NO_THROW(s.validate());
  s.drive_a = DriveRole::Absorb;
  EXPECT_THROW(s.validate(), ValidationError);
  s = transfer_spec(qubit_preparation(1));
  s.drive_a = DriveRole::None;
  EXPECT_THROW(s.validate(), ValidationError);
  s = transfer_spec(qubit_preparation(1));
  s.preparation.push_back({Node::A, Transition::GE, Axis::X, 4.0});
  EXPECT_THROW(s.validate(), ValidationError);
  s = transfer_spec(qubit_preparation(1));
  s.measurement = "homodyne";
  EXPECT_THROW(s.validate(), ValidationError);

  SimOptions o;
  EXPECT_NO_THROW(o.validate());
  o.fock = 1;
  EXPECT_THROW(o.validate(), ValidationError);
  o = {};
  o.dt = 0.0;
  EXPECT_THROW(o.validate(), ValidationError);
  o = {};
  o.window_factor = 4.0;
  EXPECT_THROW(o.validate(), ValidationError);
}

TEST(Spec, JsonRoundTrip) {
  ProtocolSpec s = transfer_spec(qubit_preparation(4), false);
  s.truncation = 12.5;
  s.seed = 7;
  const nlohmann::json j = s;
  const auto back = j.get<ProtocolSpec>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_TRUE(nlohmann::json(transfer_spec({})).at("truncation").is_null());
  EXPECT_EQ(parse_drive_role(to_string(DriveRole::Absorb)), DriveRole::Absorb);
  EXPECT_THROW(parse_drive_role("reflect"), ValidationError);
}

TEST(Preparation, InputStates) {
  const auto inputs = qpt_input_states();
  for (int k = 0; k < 6; ++k) {
    Matrix u = identity(3);
    for (const auto& r : qubit_preparation(k)) {
      ASSERT_EQ(r.node, Node::A);
      u = qutrit_rotation(r.transition, r.axis, r.angle) * u;
    }
    const Vector out = u.col(0).head(2);
    EXPECT_NEAR(std::norm(out.dot(inputs[static_cast<std::size_t>(k)])), 1.0, 1e-12) << k;
  }
  EXPECT_THROW(qubit_preparation(6), ValidationError);
}

TEST(Transfer, GroundStateStaysDark) {
  const auto r = run_transfer(default_device(), qubit_preparation(0), SimOptions{});
  EXPECT_LT(r.transfer_efficiency, 1e-6);
  const auto& final = r.sequence.trajectory.pops_B.back();
  EXPECT_GT(final[0], 1.0 - 1e-6);
}

TEST(Transfer, IdealLinkIsNearlyPerfect) {
  const auto r = run_transfer(ideal_device(), qubit_preparation(1), SimOptions{});
  EXPECT_GT(r.transfer_efficiency, 0.99);
  EXPECT_LT(r.sequence.trajectory.max_trace_error, 1e-8);
}

TEST(Transfer, AbsorberRemovesMostOfTheField) {
  const auto rep = transfer_report(ideal_device(), SimOptions{});
  EXPECT_GT(rep.efficiencies.absorption, 0.99);
  EXPECT_NEAR(rep.field_ratio_a_over_b, 1.0, 0.01);
}

TEST(Qpt, IdealLinkGivesIdentity) {
  const auto q = run_state_transfer_qpt(ideal_device(), SimOptions{});
  EXPECT_NEAR(q.process_fidelity, 1.0, 1e-2);
  EXPECT_NEAR(q.average_fidelity_direct, 1.0, 1e-2);
}

TEST(Entanglement, IdealLinkGivesBellState) {
  const auto e = run_entanglement(ideal_device(), SimOptions{});
  EXPECT_GT(e.metrics.state_fidelity, 0.99);
  EXPECT_GT(e.metrics.concurrence, 0.98);
  EXPECT_NEAR(e.metrics.ccnr, 2.0, 0.05);
  EXPECT_LT(e.residual_f, 1e-3);
}

TEST(Entanglement, SampledRunIsDeterministic) {
  SimOptions o;
  o.tomography = TomographyMode::Sampled;
  o.shots = 2000;
  const auto x = run_entanglement(default_device(), o);
  const auto y = run_entanglement(default_device(), o);
  EXPECT_EQ((x.rho_tomography.data - y.rho_tomography.data).norm(), 0.0);
  o.seed += 1;
  const auto z = run_entanglement(default_device(), o);
  EXPECT_GT((x.rho_tomography.data - z.rho_tomography.data).norm(), 0.0);
  // Shot noise at this count stays well inside a few percent on F.
  EXPECT_NEAR(x.metrics.state_fidelity, x.metrics_direct.state_fidelity, 0.05);
}

TEST(Entanglement, BetterDeviceGivesHigherFidelity) {
  const auto base = run_entanglement(default_device(), SimOptions{});
  DeviceParams up = upgrade_device(default_device());
  EXPECT_EQ(up.link.eta_c, 0.88);
  EXPECT_EQ(up.a.T1ge, 30.0);
  const auto better = run_entanglement(up, SimOptions{});
  up.link.eta_c = 1.0;
  const auto best = run_entanglement(up, SimOptions{});
  EXPECT_GT(better.metrics.state_fidelity, base.metrics.state_fidelity);
  EXPECT_GT(best.metrics.state_fidelity, better.metrics.state_fidelity);
}

TEST(Sweep, RejectsBadInput) {
  EXPECT_THROW(sweep(default_device(), SimOptions{}, "temperature", {1.0}), ValidationError);
  EXPECT_THROW(sweep(default_device(), SimOptions{}, "fock", {3.5}), ValidationError);
  EXPECT_THROW(sweep(default_device(), SimOptions{}, "eta_c", {1.5}), ValidationError);
}

TEST(Sweep, RowsFollowValues) {
  const auto rows = sweep(default_device(), SimOptions{}, "eta_c", {0.77, 1.0});
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0].parameter, "eta_c");
  EXPECT_EQ(rows[1].value, 1.0);
  EXPECT_LT(rows[0].fidelity, rows[1].fidelity);
}
