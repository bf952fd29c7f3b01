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

// Dense tensor-product and superoperator primitives.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qlink {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<int>;

inline constexpr cplx kI{0.0, 1.0};

/// Product of subsystem dimensions.
int total_dim(const Dims& dims);

/// Operator on a tensor-product space, tagged with its subsystem dimensions.
struct LinearOperator {
  Dims dims;
  Matrix data;

  LinearOperator() = default;
  LinearOperator(Dims d, Matrix m);
};

/// Density matrix tagged with its subsystem dimensions.
struct DensityMatrix {
  Dims dims;
  Matrix data;

  DensityMatrix() = default;
  DensityMatrix(Dims d, Matrix m);

  static DensityMatrix from_ket(Dims d, const Vector& psi);

  int dim() const { return static_cast<int>(data.rows()); }
  cplx trace() const { return data.trace(); }
};

// Single-mode building blocks.
Matrix identity(int n);
Matrix annihilation(int n);
/// |row><col| in an n-level space.
Matrix ket_bra(int n, int row, int col);
Vector basis_ket(int n, int index);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::span<const Matrix> factors);

/// I x ... x op x ... x I with op acting on subsystem `slot`.
LinearOperator embed(const Matrix& op, std::size_t slot, const Dims& dims);

/// Reduced state on the subsystems listed in `keep` (kept in ascending order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep);

/// D[O]rho = O rho O^dag - {O^dag O, rho}/2.
Matrix dissipator(const Matrix& op, const Matrix& rho);

/// Realignment R[(i,j),(k,l)] = rho[(i,k),(j,l)] of a bipartite operator; its
/// singular values are the operator-Schmidt coefficients.
Matrix realign(const DensityMatrix& rho);
/// Inverse index reshuffle of `realign` for subsystem dimensions (da, db).
Matrix unrealign(const Matrix& r, int da, int db);

/// (m + m^dag)/2.
Matrix hermitian_part(const Matrix& m);
double hermiticity_error(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);

}  // namespace qlink
