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

#include "qlink/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"
#include "qlink/metrics.hpp"

namespace qlink {

Matrix qutrit_rotation(Transition transition, Axis axis, double theta) {
  const int i = transition == Transition::GE ? 0 : 1;
  const int j = i + 1;
  Matrix sigma = Matrix::Zero(3, 3);
  switch (axis) {
    case Axis::X:
      sigma(i, j) = sigma(j, i) = 1.0;
      break;
    case Axis::Y:
      sigma(i, j) = -kI;
      sigma(j, i) = kI;
      break;
    case Axis::Z:
      sigma(i, i) = 1.0;
      sigma(j, j) = -1.0;
      break;
  }
  Matrix u = identity(3);
  u(i, i) = u(j, j) = 0.0;
  u += std::cos(theta / 2.0) * (ket_bra(3, i, i) + ket_bra(3, j, j)) - kI * std::sin(theta / 2.0) * sigma;
  return u;
}

namespace {

struct Step {
  Transition transition;
  Axis axis;
  double angle;
};

std::vector<TomographySetting> single_settings() {
  constexpr double pi = std::numbers::pi;
  const std::vector<std::pair<std::string, std::vector<Step>>> list = {
      {"I", {}},
      {"X90ge", {{Transition::GE, Axis::X, pi / 2}}},
      {"Y90ge", {{Transition::GE, Axis::Y, pi / 2}}},
      {"X180ge", {{Transition::GE, Axis::X, pi}}},
      {"X90ef", {{Transition::EF, Axis::X, pi / 2}}},
      {"Y90ef", {{Transition::EF, Axis::Y, pi / 2}}},
      {"X180ge+X90ef", {{Transition::GE, Axis::X, pi}, {Transition::EF, Axis::X, pi / 2}}},
      {"X180ge+Y90ef", {{Transition::GE, Axis::X, pi}, {Transition::EF, Axis::Y, pi / 2}}},
      {"X180ge+X180ef", {{Transition::GE, Axis::X, pi}, {Transition::EF, Axis::X, pi}}},
  };
  std::vector<TomographySetting> out;
  for (const auto& [id, steps] : list) {
    Matrix u = identity(3);
    for (const auto& s : steps) u = qutrit_rotation(s.transition, s.axis, s.angle) * u;
    out.push_back({id, u});
  }
  return out;
}

// Outcome projectors U^dag |k><k| U for every setting, flattened.
std::vector<Matrix> projectors(const std::vector<TomographySetting>& settings) {
  std::vector<Matrix> out;
  for (const auto& s : settings) {
    const auto d = s.unitary.rows();
    for (Eigen::Index k = 0; k < d; ++k) {
      const Vector row = s.unitary.row(k).adjoint();
      out.push_back(row * row.adjoint());
    }
  }
  return out;
}

std::vector<double> clean_frequencies(const std::vector<std::vector<double>>& populations,
                                      const std::vector<TomographySetting>& settings) {
  if (populations.size() != settings.size()) throw DimensionError("tomography: one population vector per setting required");
  std::vector<double> f;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const auto d = static_cast<std::size_t>(settings[s].unitary.rows());
    if (populations[s].size() != d) throw DimensionError("tomography: population vector has wrong length");
    double total = 0.0;
    for (double p : populations[s]) total += std::max(p, 0.0);
    if (!(total > 0.0)) throw ValidationError(fmt::format("tomography: setting {} has no positive counts", settings[s].id));
    for (double p : populations[s]) f.push_back(std::max(p, 0.0) / total);
  }
  return f;
}

// Hermitian basis E_jj, E_jk + E_kj, i(E_jk - E_kj).
std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> out;
  for (int j = 0; j < d; ++j) out.push_back(ket_bra(d, j, j));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      out.push_back(ket_bra(d, j, k) + ket_bra(d, k, j));
      out.push_back(kI * (ket_bra(d, j, k) - ket_bra(d, k, j)));
    }
  }
  return out;
}

double log_likelihood(const std::vector<double>& f, const std::vector<Matrix>& proj, const Matrix& rho) {
  double ll = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] <= 0.0) continue;
    const double p = std::max((proj[k] * rho).trace().real(), 1e-300);
    ll += f[k] * std::log(p);
  }
  return ll;
}

}  // namespace

std::vector<TomographySetting> gate_set(SettingKind kind) {
  auto single = single_settings();
  if (kind == SettingKind::Single) return single;
  std::vector<TomographySetting> out;
  for (const auto& a : single) {
    for (const auto& b : single) out.push_back({a.id + "|" + b.id, kron(a.unitary, b.unitary)});
  }
  return out;
}

std::vector<double> born_probabilities(const Matrix& rho, const TomographySetting& setting) {
  if (rho.rows() != setting.unitary.rows()) throw DimensionError("born_probabilities: dimension mismatch");
  const Matrix r = setting.unitary * rho * setting.unitary.adjoint();
  std::vector<double> p(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index k = 0; k < r.rows(); ++k) p[static_cast<std::size_t>(k)] = r(k, k).real();
  return p;
}

Matrix linear_inversion(const std::vector<std::vector<double>>& populations,
                        const std::vector<TomographySetting>& settings) {
  if (settings.empty()) throw DimensionError("linear_inversion: no settings");
  const auto f = clean_frequencies(populations, settings);
  const auto proj = projectors(settings);
  const int d = static_cast<int>(settings.front().unitary.rows());
  const auto basis = hermitian_basis(d);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(proj.size()), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(proj.size()));
  for (std::size_t k = 0; k < proj.size(); ++k) {
    for (std::size_t m = 0; m < basis.size(); ++m) {
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = (proj[k] * basis[m]).trace().real();
    }
    b(static_cast<Eigen::Index>(k)) = f[k];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < static_cast<Eigen::Index>(basis.size())) throw ValidationError("linear_inversion: settings are not informationally complete");
  const Eigen::VectorXd x = qr.solve(b);
  Matrix rho = Matrix::Zero(d, d);
  for (std::size_t m = 0; m < basis.size(); ++m) rho += x(static_cast<Eigen::Index>(m)) * basis[m];
  rho = hermitian_part(rho);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12) throw NumericalError("linear_inversion: vanishing trace");
  return rho / tr.real();
}

Matrix project_to_physical(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(hermitian));
  const auto n = es.eigenvalues().size();
  std::vector<double> mu(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const double tr = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (double& m : mu) m /= tr;
  // Eigenvalues arrive in ascending order; clip from the bottom, spreading the deficit.
  std::vector<double> lam(mu.size(), 0.0);
  double acc = 0.0;
  auto i = static_cast<long>(mu.size());
  for (long k = 0; k < static_cast<long>(mu.size()); ++k) {
    const double rest = static_cast<double>(static_cast<long>(mu.size()) - k);
    if (mu[static_cast<std::size_t>(k)] + acc / rest < 0.0) {
      acc += mu[static_cast<std::size_t>(k)];
    } else {
      i = k;
      break;
    }
  }
  const double rest = static_cast<double>(static_cast<long>(mu.size()) - i);
  for (long k = i; k < static_cast<long>(mu.size()); ++k) lam[static_cast<std::size_t>(k)] = mu[static_cast<std::size_t>(k)] + acc / rest;
  Eigen::VectorXd l = Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
  return es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

MleResult qst_mle(const std::vector<std::vector<double>>& populations,
                  const std::vector<TomographySetting>& settings, const Dims& dims,
                  const MleOptions& options) {
  if (settings.empty()) throw DimensionError("qst_mle: no settings");
  const int d = static_cast<int>(settings.front().unitary.rows());
  if (total_dim(dims) != d) throw DimensionError("qst_mle: dims do not match the settings");
  if (!(options.dilution > 0.0)) throw ValidationError("qst_mle: dilution must be positive");
  const auto f = clean_frequencies(populations, settings);
  const auto proj = projectors(settings);
  const double nsettings = static_cast<double>(settings.size());

  // Start from the projected linear-inversion estimate, mixed slightly with I/d
  // so that no eigenvalue starts at zero.
  Matrix rho = project_to_physical(linear_inversion(populations, settings));
  rho = (1.0 - 1e-6) * rho + 1e-6 * identity(d) / d;

  MleResult res;
  double ll = log_likelihood(f, proj, rho);
  const Matrix id = identity(d);
  Matrix r(d, d);
  for (int it = 1; it <= options.max_iterations; ++it) {
    r.setZero();
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] <= 0.0) continue;
      const double p = std::max((proj[k] * rho).trace().real(), 1e-300);
      r += (f[k] / p) * proj[k];
    }
    r /= nsettings;
    res.gradient_norm = (r * rho - rho).norm();
    const Matrix step = (id + options.dilution * r) / (1.0 + options.dilution);
    Matrix next = step * rho * step;
    next = hermitian_part(next);
    next /= next.trace().real();
    const double ll_next = log_likelihood(f, proj, next);
    rho = next;
    res.iterations = it;
    const double gain = ll_next - ll;
    ll = ll_next;
    if (std::abs(gain) < options.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.rho = DensityMatrix(dims, rho);
  res.log_likelihood = ll;
  return res;
}

std::vector<Vector> qpt_input_states() {
  const double s = 1.0 / std::numbers::sqrt2;
  Vector g(2), e(2), p(2), m(2), pi(2), mi(2);
  g << 1.0, 0.0;
  e << 0.0, 1.0;
  p << s, s;
  m << s, -s;
  pi << s, cplx(0.0, s);
  mi << s, cplx(0.0, -s);
  return {g, e, p, m, pi, mi};
}

ProcessMatrix qpt_linear_inversion(const std::vector<Matrix>& inputs, const std::vector<Matrix>& outputs) {
  if (inputs.size() != outputs.size() || inputs.empty()) throw DimensionError("qpt_linear_inversion: input/output count mismatch");
  const auto paulis = operator_basis(OperatorBasis::Pauli);
  const auto rows = static_cast<Eigen::Index>(4 * inputs.size());
  Matrix a(rows, 16);
  Vector b(rows);
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    if (inputs[s].rows() != 2 || outputs[s].rows() != 2) throw DimensionError("qpt_linear_inversion: expected 2x2 matrices");
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        const Matrix term = paulis[static_cast<std::size_t>(m)] * inputs[s] * paulis[static_cast<std::size_t>(n)];
        for (int e = 0; e < 4; ++e) a(static_cast<Eigen::Index>(4 * s) + e, 4 * m + n) = term(e / 2, e % 2);
      }
    }
    for (int e = 0; e < 4; ++e) b(static_cast<Eigen::Index>(4 * s) + e) = outputs[s](e / 2, e % 2);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < 16) throw ValidationError("qpt_linear_inversion: rank-deficient design matrix");
  const Vector x = qr.solve(b);
  Matrix chi(4, 4);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) chi(m, n) = x(4 * m + n);
  }
  return {hermitian_part(chi)};
}

Matrix apply_process(const ProcessMatrix& p, const Matrix& rho) {
  const auto paulis = operator_basis(OperatorBasis::Pauli);
  Matrix out = Matrix::Zero(2, 2);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) out += p.chi(m, n) * paulis[static_cast<std::size_t>(m)] * rho * paulis[static_cast<std::size_t>(n)];
  }
  return out;
}

Matrix identity_chi() {
  Matrix chi = Matrix::Zero(4, 4);
  chi(0, 0) = 1.0;
  return chi;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

void to_json(nlohmann::json& j, const ProcessMatrix& p) { j = nlohmann::json{{"chi", matrix_to_json(p.chi)}}; }

}  // namespace qlink
