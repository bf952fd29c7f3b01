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

// Qutrit rotations, state tomography (single and two qutrits) by maximum
// likelihood and qubit process tomography by linear inversion.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qlink/qops.hpp"

namespace qlink {

enum class Transition { GE, EF };
enum class Axis { X, Y, Z };

/// exp(-i theta/2 sigma_axis) on the chosen two-level subspace of a qutrit.
Matrix qutrit_rotation(Transition transition, Axis axis, double theta);

struct TomographySetting {
  std::string id;
  Matrix unitary;  ///< pre-measurement rotation, 3x3 or 9x9
};

enum class SettingKind { Single, Pair };

/// Nine single-qutrit settings, or the 81 ordered (A, B) pairs. Within a
/// composite setting the listed gates are applied left to right.
std::vector<TomographySetting> gate_set(SettingKind kind);

/// diag(U rho U^dag).
std::vector<double> born_probabilities(const Matrix& rho, const TomographySetting& setting);

struct MleOptions {
  double dilution = 0.5;
  double tolerance = 1e-10;  ///< stop when the log-likelihood gain drops below this
  int max_iterations = 5000;
};

struct MleResult {
  DensityMatrix rho;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
};

/// Maximum-likelihood state for outcome frequencies per setting. Negative
/// frequencies are clipped and each setting renormalized.
MleResult qst_mle(const std::vector<std::vector<double>>& populations,
                  const std::vector<TomographySetting>& settings, const Dims& dims,
                  const MleOptions& options = {});

/// Unconstrained least-squares estimate (Hermitian, unit trace, possibly not PSD).
Matrix linear_inversion(const std::vector<std::vector<double>>& populations,
                        const std::vector<TomographySetting>& settings);

/// Closest unit-trace PSD matrix in the 2-norm to a Hermitian matrix.
Matrix project_to_physical(const Matrix& hermitian);

struct ProcessMatrix {
  Matrix chi;  ///< 4x4 in the basis {I, X, Y, Z}
};

/// |g>, |e>, (|g> + |e>)/sqrt2, (|g> - |e>)/sqrt2, (|g> + i|e>)/sqrt2, (|g> - i|e>)/sqrt2.
std::vector<Vector> qpt_input_states();

/// chi from input/output pairs via least squares on E(rho) = sum chi_mn P_m rho P_n.
ProcessMatrix qpt_linear_inversion(const std::vector<Matrix>& inputs, const std::vector<Matrix>& outputs);

/// Applies sum chi_mn P_m rho P_n.
Matrix apply_process(const ProcessMatrix& p, const Matrix& rho);

/// chi of the identity channel, diag(1, 0, 0, 0).
Matrix identity_chi();

void to_json(nlohmann::json& j, const ProcessMatrix& p);
/// {"re": [[...]], "im": [[...]]}
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace qlink
