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

// State and process figures of merit, entanglement measures and operator
// expectation tables.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qlink/qops.hpp"

namespace qlink {

/// <psi|rho|psi>. The target must be normalized.
double state_fidelity(const Matrix& rho, const Vector& psi);

/// Re Tr(chi chi_ideal).
double process_fidelity(const Matrix& chi, const Matrix& chi_ideal);

/// sqrt(Tr[(X - Y)(X - Y)^dag]); equals sqrt(Tr[(X - Y)^2]) for Hermitian inputs.
double hs_distance(const Matrix& x, const Matrix& y);

/// Conventional trace distance (1/2)||X - Y||_1 for Hermitian inputs.
double trace_distance(const Matrix& x, const Matrix& y);

/// The {gg, ge, eg, ee} block of a two-qutrit state (no renormalization).
Matrix qubit_reduction(const Matrix& rho_3x3);

/// Wootters concurrence of a (possibly trace-deficient) two-qubit matrix.
double concurrence(const Matrix& rho_m);
/// Concurrence of rho_m / Tr(rho_m).
double concurrence_normalized(const Matrix& rho_m);

/// Sum of the singular values of the realigned bipartite state.
double ccnr(const DensityMatrix& rho);

enum class OperatorBasis { Pauli, GellMann };

/// {I, X, Y, Z} or {l0 = I, l1..l8}.
std::vector<Matrix> operator_basis(OperatorBasis basis);
std::vector<std::string> operator_labels(OperatorBasis basis);
OperatorBasis parse_operator_basis(const std::string& name);

struct LabeledValue {
  std::string label;
  double value = 0.0;
};

/// <G_j x G_k> for every ordered pair, identity pair first.
std::vector<LabeledValue> operator_expectations(const Matrix& rho, OperatorBasis basis);

struct MetricsBundle {
  double state_fidelity = 0.0;
  double process_fidelity = 0.0;
  double concurrence = 0.0;
  double concurrence_normalized = 0.0;
  double ccnr = 0.0;
  double hs_distance = 0.0;
  double qubit_trace = 0.0;
  std::vector<LabeledValue> pauli_expectations;     ///< 15 non-identity entries
  std::vector<LabeledValue> gellmann_expectations;  ///< 80 non-identity entries
};

/// Bundle for a two-qutrit state against the two-qubit target `psi` (basis gg, ge, eg, ee).
MetricsBundle entanglement_metrics(const DensityMatrix& rho_3x3, const Vector& psi);

void to_json(nlohmann::json& j, const LabeledValue& v);
void to_json(nlohmann::json& j, const MetricsBundle& m);

}  // namespace qlink
