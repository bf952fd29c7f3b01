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

#include "qlink/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "qlink/errors.hpp"

namespace qlink {

namespace {

constexpr const char* kLabels[3] = {"g", "e", "f"};

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(Z1 < h, Z2 < k) for standard normals with correlation rho.
double bivariate_cdf(double h, double k, double rho) {
  if (1.0 - rho * rho < 1e-12) {
    return rho > 0.0 ? norm_cdf(std::min(h, k)) : std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);
  }
  const double s = std::sqrt(1.0 - rho * rho);
  auto integrand = [&](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * norm_cdf((k - rho * x) / s);
  };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(integrand, -std::numeric_limits<double>::infinity(), h, 15, 1e-13);
}

struct Discriminant {
  Point w;
  double c = 0.0;
};

// score_a - score_b as w.x + c.
Discriminant discriminant(const MixtureModel& m, int a, int b) {
  const Eigen::Matrix2d inv = m.cov.inverse();
  const Point& ma = m.means[static_cast<std::size_t>(a)];
  const Point& mb = m.means[static_cast<std::size_t>(b)];
  Discriminant d;
  d.w = inv * (ma - mb);
  d.c = std::log(m.weights(a) / m.weights(b)) - 0.5 * (ma.dot(inv * ma) - mb.dot(inv * mb));
  return d;
}

void check_distribution(const Vector3& p, const char* what) {
  if ((p.array() < -1e-12).any() || std::abs(p.sum() - 1.0) > 1e-9) {
    throw ValidationError(fmt::format("{}: not a probability vector", what));
  }
}

void check_column_stochastic(const Matrix3& t, const char* what) {
  for (int c = 0; c < 3; ++c) check_distribution(t.col(c), what);
}

}  // namespace

void MixtureModel::validate() const {
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) throw ValidationError("mixture: weights must be a probability vector");
  if ((cov - cov.transpose()).norm() > 1e-12 * cov.norm()) throw ValidationError("mixture: covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  if (!(es.eigenvalues()(0) > 1e-14 * std::max(1.0, es.eigenvalues()(1)))) throw ValidationError("mixture: covariance is not positive definite");
}

void ReadoutModel::validate() const {
  mixture.validate();
  check_column_stochastic(transition, "readout transition matrix");
}

Matrix3 ReadoutModel::assignment() const { return overlap_matrix(mixture) * transition; }

std::vector<Point> sample_shots(const Vector3& rho_diag, const MixtureModel& model, std::size_t n,
                                std::mt19937_64& rng) {
  check_distribution(rho_diag, "sample_shots");
  model.validate();
  const Eigen::Matrix2d l = model.cov.llt().matrixL();
  std::discrete_distribution<int> pick({std::max(rho_diag(0), 0.0), std::max(rho_diag(1), 0.0), std::max(rho_diag(2), 0.0)});
  std::normal_distribution<double> normal;
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = pick(rng);
    const double z0 = normal(rng);
    const double z1 = normal(rng);
    out.push_back(model.means[static_cast<std::size_t>(s)] + l * Point(z0, z1));
  }
  return out;
}

std::vector<Point> sample_shots(const Vector3& rho_diag, const MixtureModel& model, std::size_t n,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_shots(rho_diag, model, n, rng);
}

std::vector<Point> sample_readout(const Vector3& prepared, const ReadoutModel& model, std::size_t n,
                                  std::mt19937_64& rng) {
  check_distribution(prepared, "sample_readout");
  Vector3 actual = model.transition * prepared;
  actual = actual.cwiseMax(0.0);
  actual /= actual.sum();
  return sample_shots(actual, model.mixture, n, rng);
}

int classify(const Point& x, const MixtureModel& model) {
  const Eigen::Matrix2d inv = model.cov.inverse();
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 3; ++s) {
    const Point& mu = model.means[static_cast<std::size_t>(s)];
    const double score = std::log(model.weights(s)) + mu.dot(inv * x) - 0.5 * mu.dot(inv * mu);
    const double tol = 1e-12 * (1.0 + std::abs(score));
    if (score > best_score + tol) {
      best = s;
      best_score = score;
    }
  }
  return best;
}

MixtureModel fit_mixture(const std::array<std::vector<Point>, 3>& shots_by_prepared) {
  MixtureModel m;
  std::size_t total = 0;
  for (int s = 0; s < 3; ++s) {
    const auto& v = shots_by_prepared[static_cast<std::size_t>(s)];
    if (v.size() < 3) throw ValidationError("fit_mixture: at least 3 shots per prepared state required");
    Point mean = Point::Zero();
    for (const auto& x : v) mean += x;
    m.means[static_cast<std::size_t>(s)] = mean / static_cast<double>(v.size());
    total += v.size();
  }
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (int s = 0; s < 3; ++s) {
    for (const auto& x : shots_by_prepared[static_cast<std::size_t>(s)]) {
      const Point d = x - m.means[static_cast<std::size_t>(s)];
      cov += d * d.transpose();
    }
    m.weights(s) = static_cast<double>(shots_by_prepared[static_cast<std::size_t>(s)].size()) / static_cast<double>(total);
  }
  cov /= static_cast<double>(total);
  const double scale = cov.trace();
  if (!(scale > 0.0) || cov.determinant() <= 1e-12 * scale * scale) throw ValidationError("fit_mixture: degenerate covariance");
  m.cov = cov;
  return m;
}

double log_likelihood(const MixtureModel& model, const std::vector<Point>& shots) {
  const Eigen::Matrix2d inv = model.cov.inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(model.cov.determinant()));
  double ll = 0.0;
  for (const auto& x : shots) {
    double p = 0.0;
    for (int s = 0; s < 3; ++s) {
      const Point d = x - model.means[static_cast<std::size_t>(s)];
      p += model.weights(s) * norm * std::exp(-0.5 * d.dot(inv * d));
    }
    ll += std::log(std::max(p, std::numeric_limits<double>::min()));
  }
  return ll;
}

Matrix3 overlap_matrix(const MixtureModel& model) {
  model.validate();
  Matrix3 o;
  for (int assigned = 0; assigned < 3; ++assigned) {
    int others[2];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      if (k != assigned) others[n++] = k;
    }
    const auto d1 = discriminant(model, assigned, others[0]);
    const auto d2 = discriminant(model, assigned, others[1]);
    const double s1 = std::sqrt(d1.w.dot(model.cov * d1.w));
    const double s2 = std::sqrt(d2.w.dot(model.cov * d2.w));
    const double rho = d1.w.dot(model.cov * d2.w) / (s1 * s2);
    for (int actual = 0; actual < 3; ++actual) {
      const Point& mu = model.means[static_cast<std::size_t>(actual)];
      const double m1 = d1.w.dot(mu) + d1.c;
      const double m2 = d2.w.dot(mu) + d2.c;
      o(assigned, actual) = bivariate_cdf(m1 / s1, m2 / s2, rho);
    }
  }
  return o;
}

Eigen::MatrixXd assignment_matrix(const Eigen::MatrixXd& counts) {
  if (counts.rows() != counts.cols() || counts.size() == 0) throw DimensionError("assignment_matrix: counts must be square");
  if ((counts.array() < 0.0).any()) throw ValidationError("assignment_matrix: negative counts");
  Eigen::MatrixXd r = counts;
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    const double total = r.col(c).sum();
    if (!(total > 0.0)) throw ValidationError(fmt::format("assignment_matrix: no shots for prepared state {}", c));
    r.col(c) /= total;
  }
  return r;
}

Eigen::MatrixXd two_node(const Eigen::MatrixXd& r_a, const Eigen::MatrixXd& r_b) {
  Eigen::MatrixXd out(r_a.rows() * r_b.rows(), r_a.cols() * r_b.cols());
  for (Eigen::Index i = 0; i < r_a.rows(); ++i) {
    for (Eigen::Index j = 0; j < r_a.cols(); ++j) out.block(i * r_b.rows(), j * r_b.cols(), r_b.rows(), r_b.cols()) = r_a(i, j) * r_b;
  }
  return out;
}

double error_probability(const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols()) throw DimensionError("error_probability: square matrix required");
  return (Eigen::MatrixXd::Identity(r.rows(), r.cols()) - r).cwiseAbs().sum() / (2.0 * static_cast<double>(r.rows()));
}

MitigationResult mitigate(const Eigen::VectorXd& m, const Eigen::MatrixXd& r) {
  if (r.rows() != r.cols() || r.rows() != m.size()) throw DimensionError("mitigate: size mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& sv = svd.singularValues();
  MitigationResult res;
  res.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(res.condition_number < 1e12)) throw NumericalError("mitigate: assignment matrix is singular");
  res.populations = r.fullPivLu().solve(m);
  res.error_probability = error_probability(r);
  for (Eigen::Index k = 0; k < res.populations.size(); ++k) {
    const double p = res.populations(k);
    if (p < -0.02 || p > 1.02) res.warnings.push_back(fmt::format("mitigated population {} = {:.4f} is outside [-0.02, 1.02]", k, p));
  }
  return res;
}

Matrix3 reference_assignment(Node node) {
  Matrix3 r;
  if (node == Node::A) {
    r << 0.982, 0.050, 0.013,
         0.010, 0.933, 0.048,
         0.008, 0.017, 0.940;
  } else {
    r << 0.985, 0.039, 0.012,
         0.009, 0.935, 0.061,
         0.006, 0.025, 0.927;
  }
  return r;
}

namespace {

MixtureModel triangle_mixture(double snr) {
  if (!(snr > 0.0)) throw ValidationError("readout: snr must be positive");
  MixtureModel m;
  m.means = {Point(-1.0, 0.0), Point(1.0, 0.0), Point(0.0, std::numbers::sqrt3)};
  const double sigma = 0.25 / snr;
  m.cov = sigma * sigma * Eigen::Matrix2d::Identity();
  return m;
}

}  // namespace

ReadoutModel calibrated_readout(const Matrix3& target, double snr) {
  check_column_stochastic(target, "calibrated_readout target");
  ReadoutModel model;
  const Matrix3 o = overlap_matrix(triangle_mixture(1.0));
  Matrix3 t = o.inverse() * target;
  if ((t.array() < -1e-9).any()) throw ValidationError("calibrated_readout: target is not reachable with the reference mixture");
  t = t.cwiseMax(0.0);
  for (int c = 0; c < 3; ++c) t.col(c) /= t.col(c).sum();
  model.transition = t;
  model.mixture = triangle_mixture(snr);
  return model;
}

ReadoutModel calibrated_readout(Node node, double snr) {
  // Published columns are rounded to three digits and miss unit sum by up to 1e-3.
  Matrix3 r = reference_assignment(node);
  for (int c = 0; c < 3; ++c) r.col(c) /= r.col(c).sum();
  return calibrated_readout(r, snr);
}

Matrix3 measure_assignment(const ReadoutModel& model, std::size_t n, std::mt19937_64& rng, std::vector<Shot>* dump) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(3, 3);
  for (int s = 0; s < 3; ++s) {
    const auto shots = sample_readout(Vector3::Unit(s), model, n, rng);
    for (const auto& x : shots) {
      const int a = classify(x, model.mixture);
      counts(a, s) += 1.0;
      if (dump != nullptr) dump->push_back({x, s, a});
    }
  }
  return assignment_matrix(counts);
}

void write_shots_csv(std::ostream& os, const std::vector<Shot>& shots) {
  os << "u,v,prepared,assigned\n";
  for (const auto& s : shots) {
    fmt::print(os, "{:.9g},{:.9g},{},{}\n", s.x(0), s.x(1), kLabels[s.prepared], kLabels[s.assigned]);
  }
}

nlohmann::json assignment_to_json(const Eigen::MatrixXd& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.cols(); ++j) row.push_back(r(i, j));
    rows.push_back(row);
  }
  return {{"orientation", "rows: assigned, columns: prepared"}, {"matrix", rows}, {"error_probability", error_probability(r)}};
}

}  // namespace qlink
