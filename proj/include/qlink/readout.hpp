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

// Synthetic single-shot qutrit readout: Gaussian mixture in the u-v plane,
// MAP classification, assignment matrices and R^-1 mitigation.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "qlink/device.hpp"

namespace qlink {

using Point = Eigen::Vector2d;
using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

struct MixtureModel {
  Vector3 weights = Vector3::Constant(1.0 / 3.0);
  std::array<Point, 3> means{};
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();

  void validate() const;
};

/// Mixture plus a column-stochastic transition matrix T(actual, prepared)
/// describing state changes before the signal is integrated.
struct ReadoutModel {
  MixtureModel mixture;
  Matrix3 transition = Matrix3::Identity();

  void validate() const;
  /// Analytic assignment matrix R = O T, O the Gaussian overlap matrix.
  Matrix3 assignment() const;
};

struct Shot {
  Point x;
  int prepared = -1;
  int assigned = -1;
};

/// n points drawn from the mixture with component probabilities rho_diag.
std::vector<Point> sample_shots(const Vector3& rho_diag, const MixtureModel& model, std::size_t n,
                                std::mt19937_64& rng);
std::vector<Point> sample_shots(const Vector3& rho_diag, const MixtureModel& model, std::size_t n,
                                std::uint64_t seed);

/// Shots for a prepared-state distribution passed through the transition matrix.
std::vector<Point> sample_readout(const Vector3& prepared, const ReadoutModel& model, std::size_t n,
                                  std::mt19937_64& rng);

/// argmax_s A_s N(x; mu_s, Sigma); ties resolve to the lower label (g < e < f).
int classify(const Point& x, const MixtureModel& model);

/// Labeled maximum likelihood: per-state means, pooled covariance, weights from counts.
MixtureModel fit_mixture(const std::array<std::vector<Point>, 3>& shots_by_prepared);

double log_likelihood(const MixtureModel& model, const std::vector<Point>& shots);

/// P(classify s' | shot from component s) by bivariate-normal integration.
Matrix3 overlap_matrix(const MixtureModel& model);

/// counts(assigned, prepared) -> column-normalized R.
Eigen::MatrixXd assignment_matrix(const Eigen::MatrixXd& counts);
/// R_A kron R_B (node A is the leading index).
Eigen::MatrixXd two_node(const Eigen::MatrixXd& r_a, const Eigen::MatrixXd& r_b);

/// (1/6) sum |I - R| for a 3x3 assignment matrix; (1/(2d)) sum |I - R| in general.
double error_probability(const Eigen::MatrixXd& r);

struct MitigationResult {
  Eigen::VectorXd populations;
  double error_probability = 0.0;
  double condition_number = 0.0;
  std::vector<std::string> warnings;
};

/// R^-1 M with diagnostics.
MitigationResult mitigate(const Eigen::VectorXd& m, const Eigen::MatrixXd& r);

/// Published single-node assignment probabilities (rows assigned, columns prepared).
Matrix3 reference_assignment(Node node);

/// Well-separated mixture with per-node transition matrix so that the analytic
/// assignment matrix equals reference_assignment(node). `snr` scales the
/// cluster separation relative to the noise.
ReadoutModel calibrated_readout(Node node, double snr = 1.0);
ReadoutModel calibrated_readout(const Matrix3& target, double snr = 1.0);

/// Simulates n shots per prepared basis state and returns the measured assignment matrix.
Matrix3 measure_assignment(const ReadoutModel& model, std::size_t n, std::mt19937_64& rng,
                           std::vector<Shot>* dump = nullptr);

void write_shots_csv(std::ostream& os, const std::vector<Shot>& shots);
nlohmann::json assignment_to_json(const Eigen::MatrixXd& r);

}  // namespace qlink
