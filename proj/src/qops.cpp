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

#include "qlink/qops.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "qlink/errors.hpp"

namespace qlink {

int total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

LinearOperator::LinearOperator(Dims d, Matrix m) : dims(std::move(d)), data(std::move(m)) {
  const int n = total_dim(dims);
  if (data.rows() != n || data.cols() != n) {
    throw DimensionError("operator size " + std::to_string(data.rows()) + "x" +
                         std::to_string(data.cols()) + " does not match dims product " +
                         std::to_string(n));
  }
}

DensityMatrix::DensityMatrix(Dims d, Matrix m) : dims(std::move(d)), data(std::move(m)) {
  const int n = total_dim(dims);
  if (data.rows() != n || data.cols() != n) {
    throw DimensionError("density matrix size does not match dims product " + std::to_string(n));
  }
}

DensityMatrix DensityMatrix::from_ket(Dims d, const Vector& psi) {
  return DensityMatrix(std::move(d), psi * psi.adjoint());
}

Matrix identity(int n) { return Matrix::Identity(n, n); }

Matrix annihilation(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

Matrix ket_bra(int n, int row, int col) {
  Matrix m = Matrix::Zero(n, n);
  m(row, col) = 1.0;
  return m;
}

Vector basis_ket(int n, int index) {
  Vector v = Vector::Zero(n);
  v(index) = 1.0;
  return v;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

LinearOperator embed(const Matrix& op, std::size_t slot, const Dims& dims) {
  if (slot >= dims.size()) {
    throw DimensionError("embed: slot " + std::to_string(slot) + " out of range");
  }
  if (op.rows() != dims[slot] || op.cols() != dims[slot]) {
    throw DimensionError("embed: operator dimension does not match dims[slot]");
  }
  std::vector<Matrix> factors;
  factors.reserve(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    factors.push_back(k == slot ? op : identity(dims[k]));
  }
  return LinearOperator(dims, kron(std::span<const Matrix>(factors)));
}

namespace {

std::vector<int> digits_of(int index, const Dims& dims) {
  std::vector<int> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep) {
  const auto& dims = rho.dims;
  if (keep.empty()) throw DimensionError("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw DimensionError("partial_trace: duplicate subsystem index");
  }
  if (keep.back() >= dims.size()) throw DimensionError("partial_trace: subsystem index out of range");

  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) kept[k] = true;
  Dims out_dims;
  for (auto k : keep) out_dims.push_back(dims[k]);
  const int n = rho.dim();

  // Precompute per-index (kept index, traced index) pairs.
  std::vector<int> kept_index(n), traced_index(n);
  for (int i = 0; i < n; ++i) {
    const auto d = digits_of(i, dims);
    int ki = 0, ti = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (kept[s]) {
        ki = ki * dims[s] + d[s];
      } else {
        ti = ti * dims[s] + d[s];
      }
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }

  Matrix out = Matrix::Zero(total_dim(out_dims), total_dim(out_dims));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (traced_index[r] == traced_index[c]) out(kept_index[r], kept_index[c]) += rho.data(r, c);
    }
  }
  return DensityMatrix(out_dims, std::move(out));
}

Matrix dissipator(const Matrix& op, const Matrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols() || op.rows() != op.cols()) {
    throw DimensionError("dissipator: dimension mismatch");
  }
  const Matrix odo = op.adjoint() * op;
  return op * rho * op.adjoint() - 0.5 * (odo * rho + rho * odo);
}

Matrix realign(const DensityMatrix& rho) {
  if (rho.dims.size() != 2) throw DimensionError("realign: bipartite dims required");
  const int da = rho.dims[0];
  const int db = rho.dims[1];
  Matrix r(da * da, db * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) r(i * da + j, k * db + l) = rho.data(i * db + k, j * db + l);
  return r;
}

Matrix unrealign(const Matrix& r, int da, int db) {
  if (r.rows() != da * da || r.cols() != db * db) throw DimensionError("unrealign: shape mismatch");
  Matrix rho(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) rho(i * db + k, j * db + l) = r(i * da + j, k * db + l);
  return rho;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_error(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qlink
