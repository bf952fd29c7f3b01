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

#include <random>

#include <nlohmann/json.hpp>

#include "oracles/oracles.hpp"
#include "qlink/errors.hpp"
#include "qlink/metrics.hpp"
#include "qlink/tomography.hpp"

using namespace qlink;

namespace {

std::vector<std::vector<double>> exact_data(const Matrix& rho, const std::vector<TomographySetting>& settings) {
  std::vector<std::vector<double>> out;
  for (const auto& s : settings) out.push_back(born_probabilities(rho, s));
  return out;
}

Matrix pauli(int k) {
  Matrix p = Matrix::Zero(2, 2);
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

std::vector<Matrix> qubit_inputs() {
  std::vector<Matrix> in;
  for (const auto& v : qpt_input_states()) in.push_back(v * v.adjoint());
  return in;
}

}  // namespace

TEST(Rotations, LadderAndUnitarity) {
  const Vector g = basis_ket(3, 0), e = basis_ket(3, 1), f = basis_ket(3, 2);
  EXPECT_LT((qutrit_rotation(Transition::GE, Axis::Y, M_PI) * g - e).norm(), 1e-15);
  EXPECT_LT((qutrit_rotation(Transition::EF, Axis::Y, M_PI) * e - f).norm(), 1e-15);
  for (auto ax : {Axis::X, Axis::Y, Axis::Z}) {
    const Matrix u = qutrit_rotation(Transition::EF, ax, 0.37);
    EXPECT_LT((u * u.adjoint() - identity(3)).norm(), 1e-14);
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-15);
  }
}

TEST(GateSet, CountsAndOrder) {
  const auto single = gate_set(SettingKind::Single);
  const auto pair = gate_set(SettingKind::Pair);
  ASSERT_EQ(single.size(), 9U);
  ASSERT_EQ(pair.size(), 81U);
  EXPECT_TRUE(single.front().unitary.isApprox(identity(3)));
  EXPECT_TRUE(pair.front().unitary.isApprox(identity(9)));
  EXPECT_EQ(pair[10].id, single[1].id + "|" + single[1].id);
}

TEST(Born, BasisStatesAndNormalization) {
  const auto single = gate_set(SettingKind::Single);
  const auto pg = born_probabilities(ket_bra(3, 0, 0), single[0]);
  EXPECT_EQ(pg, (std::vector<double>{1.0, 0.0, 0.0}));
  // X180 on the ge transition swaps |e> back to |g>.
  const auto pe = born_probabilities(ket_bra(3, 1, 1), single[3]);
  EXPECT_NEAR(pe[0], 1.0, 1e-15);
  const Matrix rho = oracle::random_density(9, 4);
  for (const auto& s : gate_set(SettingKind::Pair)) {
    const auto p = born_probabilities(rho, s);
    double sum = 0.0;
    for (double x : p) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_THROW(born_probabilities(ket_bra(2, 0, 0), single[0]), DimensionError);
}

TEST(Mle, PureQutritRoundTrip) {
  const auto settings = gate_set(SettingKind::Single);
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const Vector psi = oracle::random_ket(3, seed);
    const Matrix rho = psi * psi.adjoint();
    const auto r = qst_mle(exact_data(rho, settings), settings, {3});
    EXPECT_LT(hs_distance(r.rho.data, rho), 1e-4);
  }
}

TEST(Mle, MaximallyMixed) {
  const auto s1 = gate_set(SettingKind::Single);
  EXPECT_LT(hs_distance(qst_mle(exact_data(identity(3) / 3.0, s1), s1, {3}).rho.data, identity(3) / 3.0), 1e-8);
  const auto s2 = gate_set(SettingKind::Pair);
  EXPECT_LT(hs_distance(qst_mle(exact_data(identity(9) / 9.0, s2), s2, {3, 3}).rho.data, identity(9) / 9.0), 1e-8);
}

TEST(Mle, TwoQutritRoundTripIsPhysical) {
  const auto settings = gate_set(SettingKind::Pair);
  const Matrix rho = oracle::random_density(9, 77, 3);
  const auto r = qst_mle(exact_data(rho, settings), settings, {3, 3});
  EXPECT_LT(hs_distance(r.rho.data, rho), 1e-3);
  EXPECT_GE(min_eigenvalue(r.rho.data), -1e-10);
  EXPECT_NEAR(r.rho.data.trace().real(), 1.0, 1e-10);
  EXPECT_LT(hermiticity_error(r.rho.data), 1e-12);
}

TEST(Mle, SampledFrequenciesWithinStatisticalBound) {
  const auto settings = gate_set(SettingKind::Single);
  const Matrix rho = oracle::random_density(3, 8);
  std::mt19937_64 rng(3);
  const int shots = 25000;
  std::vector<std::vector<double>> data;
  for (const auto& s : settings) {
    const auto p = born_probabilities(rho, s);
    std::discrete_distribution<int> pick(p.begin(), p.end());
    std::vector<double> f(3, 0.0);
    for (int i = 0; i < shots; ++i) f[static_cast<std::size_t>(pick(rng))] += 1.0 / shots;
    data.push_back(f);
  }
  const auto r = qst_mle(data, settings, {3});
  EXPECT_LT(hs_distance(r.rho.data, rho), 5.0 / std::sqrt(static_cast<double>(shots)));
  EXPECT_GE(min_eigenvalue(r.rho.data), -1e-10);
}

TEST(LinearInversion, ExactForExactData) {
  const auto settings = gate_set(SettingKind::Single);
  const Matrix rho = oracle::random_density(3, 12);
  EXPECT_LT((linear_inversion(exact_data(rho, settings), settings) - rho).norm(), 1e-10);
  Matrix bad = identity(3);
  bad(0, 0) = 1.4;
  bad(2, 2) = -0.4;
  const Matrix fixed = project_to_physical(bad);
  EXPECT_GE(min_eigenvalue(fixed), -1e-12);
  EXPECT_NEAR(fixed.trace().real(), 1.0, 1e-12);
}

TEST(Qpt, IdentityAndDepolarizing) {
  const auto in = qubit_inputs();
  const auto id = qpt_linear_inversion(in, in);
  EXPECT_LT((id.chi - identity_chi()).norm(), 1e-12);
  std::vector<Matrix> mixed(in.size(), identity(2) / 2.0);
  const auto dep = qpt_linear_inversion(in, mixed);
  EXPECT_LT((dep.chi - identity(4) / 4.0).norm(), 1e-12);
  EXPECT_NEAR(process_fidelity(dep.chi, identity_chi()), 0.25, 1e-12);
}

TEST(Qpt, AmplitudeDampingMatchesClosedForm) {
  const double gamma = 0.3;
  const auto in = qubit_inputs();
  std::vector<Matrix> out;
  for (const auto& r : in) out.push_back(oracle::amplitude_damping(r, gamma));
  const auto p = qpt_linear_inversion(in, out);
  EXPECT_LT((p.chi - oracle::amplitude_damping_chi(gamma)).cwiseAbs().maxCoeff(), 1e-6);
  for (const auto& r : in) EXPECT_LT((apply_process(p, r) - oracle::amplitude_damping(r, gamma)).norm(), 1e-12);
}

TEST(Qpt, UnitaryChannelIsRankOne) {
  const Matrix u = (cplx(0, -0.35) * (0.6 * pauli(1) + 0.8 * pauli(2))).exp();
  const auto in = qubit_inputs();
  std::vector<Matrix> out;
  for (const auto& r : in) out.push_back(u * r * u.adjoint());
  const auto p = qpt_linear_inversion(in, out);
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.chi);
  EXPECT_NEAR(es.eigenvalues()(3), 1.0, 1e-10);
  EXPECT_LT(std::abs(es.eigenvalues()(2)), 1e-6);
}

TEST(Qpt, RankDeficientInputsRejected) {
  std::vector<Matrix> in(4, ket_bra(2, 0, 0));
  EXPECT_THROW(qpt_linear_inversion(in, in), std::invalid_argument);
}

TEST(Tomography, MatrixJson) {
  Matrix m(1, 2);
  m << cplx(1, 2), cplx(3, -4);
  const auto j = matrix_to_json(m);
  EXPECT_EQ(j["re"][0][1].get<double>(), 3.0);
  EXPECT_EQ(j["im"][0][1].get<double>(), -4.0);
}
