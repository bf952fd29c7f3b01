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

#include "qlink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"

namespace qlink {

double state_fidelity(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) throw DimensionError("state_fidelity: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw ValidationError("state_fidelity: target state is not normalized");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double process_fidelity(const Matrix& chi, const Matrix& chi_ideal) {
  if (chi.rows() != chi_ideal.rows() || chi.cols() != chi_ideal.cols()) throw DimensionError("process_fidelity: shape mismatch");
  return (chi * chi_ideal).trace().real();
}

double hs_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("hs_distance: shape mismatch");
  return (x - y).norm();
}

double trace_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("trace_distance: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(x - y), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix qubit_reduction(const Matrix& rho_3x3) {
  if (rho_3x3.rows() != 9 || rho_3x3.cols() != 9) throw DimensionError("qubit_reduction: expected a 9x9 matrix");
  constexpr int idx[4] = {0, 1, 3, 4};
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = rho_3x3(idx[i], idx[j]);
  }
  return m;
}

double concurrence(const Matrix& rho_m) {
  if (rho_m.rows() != 4 || rho_m.cols() != 4) throw DimensionError("concurrence: expected a 4x4 matrix");
  const Matrix rho = hermitian_part(rho_m);
  if (min_eigenvalue(rho) < -1e-8) throw ValidationError("concurrence: matrix is not positive semidefinite");
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix tilde = yy * rho.conjugate() * yy;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Matrix sq = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::JacobiSVD<Matrix> svd(sq * tilde * sq);
  // Singular values of sqrt(rho) tilde sqrt(rho) are the eigenvalues lambda_i of rho tilde.
  std::vector<double> lam(4);
  for (int i = 0; i < 4; ++i) lam[static_cast<std::size_t>(i)] = std::sqrt(std::max(svd.singularValues()(i), 0.0));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double concurrence_normalized(const Matrix& rho_m) {
  const double tr = rho_m.trace().real();
  if (!(tr > 0.0)) throw ValidationError("concurrence_normalized: zero trace");
  return concurrence(rho_m / tr);
}

double ccnr(const DensityMatrix& rho) {
  if (rho.dims.size() != 2) throw DimensionError("ccnr: expected a bipartite state");
  Eigen::JacobiSVD<Matrix> svd(realign(rho));
  return svd.singularValues().sum();
}

std::vector<Matrix> operator_basis(OperatorBasis basis) {
  if (basis == OperatorBasis::Pauli) {
    Matrix i2 = identity(2);
    Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    y(0, 1) = -kI;
    y(1, 0) = kI;
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return {i2, x, y, z};
  }
  auto sx = [](int a, int b) { return Matrix(ket_bra(3, a, b) + ket_bra(3, b, a)); };
  auto sy = [](int a, int b) { return Matrix(-kI * ket_bra(3, a, b) + kI * ket_bra(3, b, a)); };
  Matrix l8 = Matrix::Zero(3, 3);
  l8(0, 0) = l8(1, 1) = 1.0 / std::numbers::sqrt3;
  l8(2, 2) = -2.0 / std::numbers::sqrt3;
  return {identity(3), sx(0, 1), sy(0, 1), Matrix(ket_bra(3, 0, 0) - ket_bra(3, 1, 1)),
          sx(0, 2), sy(0, 2), sx(1, 2), sy(1, 2), l8};
}

std::vector<std::string> operator_labels(OperatorBasis basis) {
  if (basis == OperatorBasis::Pauli) return {"I", "X", "Y", "Z"};
  std::vector<std::string> out;
  for (int k = 0; k < 9; ++k) out.push_back("l" + std::to_string(k));
  return out;
}

OperatorBasis parse_operator_basis(const std::string& name) {
  if (name == "pauli") return OperatorBasis::Pauli;
  if (name == "gellmann") return OperatorBasis::GellMann;
  throw ValidationError("unknown operator basis '" + name + "'");
}

std::vector<LabeledValue> operator_expectations(const Matrix& rho, OperatorBasis basis) {
  const auto ops = operator_basis(basis);
  const auto labels = operator_labels(basis);
  const auto d = ops.front().rows();
  if (rho.rows() != d * d || rho.cols() != d * d) throw DimensionError("operator_expectations: state does not match basis");
  const std::string sep = basis == OperatorBasis::Pauli ? "" : "_";
  std::vector<LabeledValue> out;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    for (std::size_t k = 0; k < ops.size(); ++k) {
      out.push_back({labels[j] + sep + labels[k], (kron(ops[j], ops[k]) * rho).trace().real()});
    }
  }
  return out;
}

MetricsBundle entanglement_metrics(const DensityMatrix& rho_3x3, const Vector& psi) {
  if (rho_3x3.dims != Dims{3, 3}) throw DimensionError("entanglement_metrics: expected a two-qutrit state");
  MetricsBundle m;
  const Matrix rm = qubit_reduction(rho_3x3.data);
  m.state_fidelity = state_fidelity(rm, psi);
  m.concurrence = concurrence(rm);
  m.concurrence_normalized = concurrence_normalized(rm);
  m.ccnr = ccnr(rho_3x3);
  m.qubit_trace = rm.trace().real();
  m.hs_distance = hs_distance(rm, Matrix(psi * psi.adjoint()));
  auto pauli = operator_expectations(rm, OperatorBasis::Pauli);
  auto gm = operator_expectations(rho_3x3.data, OperatorBasis::GellMann);
  m.pauli_expectations.assign(pauli.begin() + 1, pauli.end());
  m.gellmann_expectations.assign(gm.begin() + 1, gm.end());
  return m;
}

void to_json(nlohmann::json& j, const LabeledValue& v) { j = nlohmann::json{{"label", v.label}, {"value", v.value}}; }

void to_json(nlohmann::json& j, const MetricsBundle& m) {
  j = nlohmann::json{{"state_fidelity", m.state_fidelity},
                     {"process_fidelity", m.process_fidelity},
                     {"concurrence", m.concurrence},
                     {"concurrence_normalized", m.concurrence_normalized},
                     {"ccnr", m.ccnr},
                     {"hs_distance", m.hs_distance},
                     {"qubit_trace", m.qubit_trace},
                     {"pauli_expectations", m.pauli_expectations},
                     {"gellmann_expectations", m.gellmann_expectations}};
}

}  // namespace qlink
