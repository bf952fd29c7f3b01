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

// Reference implementations used only by the tests. Each one is written from
// the defining formula with explicit loops or closed forms and does not call
// into the library's algorithms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline int product(const std::vector<int>& dims) {
  int n = 1;
  for (int d : dims) n *= d;
  return n;
}

// Row-major multi-index of a flat index, first subsystem most significant.
inline std::vector<int> digits(int index, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = index % dims[static_cast<std::size_t>(k)];
    index /= dims[static_cast<std::size_t>(k)];
  }
  return out;
}

inline Matrix embed(const Matrix& op, std::size_t slot, const std::vector<int>& dims) {
  const int n = product(dims);
  Matrix out = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool spectators_equal = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k != slot && dr[k] != dc[k]) spectators_equal = false;
      }
      if (spectators_equal) out(r, c) = op(dr[slot], dc[slot]);
    }
  }
  return out;
}

inline Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims, const std::vector<std::size_t>& keep) {
  std::vector<int> kept_dims;
  for (std::size_t k : keep) kept_dims.push_back(dims[k]);
  const int m = product(kept_dims);
  Matrix out = Matrix::Zero(m, m);
  const int n = product(dims);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool traced_equal = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (std::find(keep.begin(), keep.end(), k) == keep.end() && dr[k] != dc[k]) traced_equal = false;
      }
      if (!traced_equal) continue;
      int kr = 0, kc = 0;
      for (std::size_t k : keep) {
        kr = kr * dims[k] + dr[k];
        kc = kc * dims[k] + dc[k];
      }
      out(kr, kc) += rho(r, c);
    }
  }
  return out;
}

inline Matrix annihilation(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// Dense Liouvillian assembled column by column from its action on E_kl.
inline Matrix liouvillian(const Matrix& h, const std::vector<Matrix>& jumps) {
  const int n = static_cast<int>(h.rows());
  Matrix l(n * n, n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(j, k) = 1.0;
      Matrix d = cplx(0.0, -1.0) * (h * e - e * h);
      for (const auto& c : jumps) {
        const Matrix cdc = c.adjoint() * c;
        d += c * e * c.adjoint() - 0.5 * (cdc * e + e * cdc);
      }
      l.col(k * n + j) = Eigen::Map<const Vector>(d.data(), n * n);
    }
  }
  return l;
}

// rho(t) = exp(L t) rho0 for a time-independent generator.
inline Matrix evolve(const Matrix& h, const std::vector<Matrix>& jumps, const Matrix& rho0, double t) {
  const int n = static_cast<int>(rho0.rows());
  const Matrix prop = (liouvillian(h, jumps) * t).exp();
  const Vector v = prop * Eigen::Map<const Vector>(rho0.data(), n * n);
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

inline double sech2_flux(double t, double kappa_eff) {
  const double s = 1.0 / std::cosh(kappa_eff * t / 2.0);
  return kappa_eff / 4.0 * s * s;
}

// Drive producing a sech photon from a resonator of linewidth kappa_T,
// obtained from the emitted-amplitude relation by direct integration.
inline double sech_drive(double t, double kappa_eff, double kappa_t) {
  const double x = kappa_eff * t / 2.0;
  const double flux = kappa_eff / 4.0 / (std::cosh(x) * std::cosh(x));
  const double emitted = (1.0 + std::tanh(x)) / 2.0;
  const double amp = std::sqrt(flux / kappa_t);
  const double damp = -std::tanh(x) * kappa_eff / 2.0 * amp;  // d/dt of amp
  const double c_f = std::sqrt(std::max(1.0 - emitted - amp * amp, 0.0));
  return (damp + kappa_t / 2.0 * amp) / c_f;
}

// Amplitude damping channel with decay probability gamma in the basis
// {I, X, Y, Z}, from its Kraus operators expanded in Paulis.
inline Matrix amplitude_damping_chi(double gamma) {
  const double s = std::sqrt(1.0 - gamma);
  Matrix chi = Matrix::Zero(4, 4);
  chi(0, 0) = (1.0 + s) * (1.0 + s) / 4.0;
  chi(0, 3) = chi(3, 0) = gamma / 4.0;
  chi(3, 3) = (1.0 - s) * (1.0 - s) / 4.0;
  chi(1, 1) = chi(2, 2) = gamma / 4.0;
  chi(1, 2) = cplx(0.0, -gamma / 4.0);
  chi(2, 1) = cplx(0.0, gamma / 4.0);
  return chi;
}

inline Matrix amplitude_damping(const Matrix& rho, double gamma) {
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return k0 * rho * k0.adjoint() + k1 * rho * k1.adjoint();
}

// Two-qutrit assignment matrix as printed (percent, rows assigned, columns prepared).
inline Eigen::Matrix<double, 9, 9> published_two_qutrit_assignment() {
  Eigen::Matrix<double, 9, 9> r;
  r << 96.8, 3.9, 1.1, 4.9, 0.2, 0.1, 1.2, 0.0, 0.0,
       0.9, 91.9, 6.0, 0.0, 4.7, 0.3, 0.0, 1.2, 0.1,
       0.6, 2.5, 91.1, 0.0, 0.1, 4.6, 0.0, 0.0, 1.2,
       1.0, 0.0, 0.0, 91.9, 3.7, 1.1, 4.7, 0.2, 0.1,
       0.0, 0.9, 0.1, 0.8, 87.3, 5.7, 0.0, 4.5, 0.3,
       0.0, 0.0, 0.9, 0.6, 2.4, 86.5, 0.0, 0.1, 4.4,
       0.8, 0.0, 0.0, 1.6, 0.1, 0.0, 92.5, 3.7, 1.1,
       0.0, 0.7, 0.0, 0.0, 1.6, 0.1, 0.8, 87.9, 5.8,
       0.0, 0.0, 0.7, 0.0, 0.0, 1.6, 0.6, 2.4, 87.1;
  return r / 100.0;
}

// Two-qubit concurrence from the eigenvalues of rho (Y x Y) rho* (Y x Y).
inline double wootters(const Matrix& rho) {
  Matrix y = Matrix::Zero(2, 2);
  y(0, 1) = cplx(0.0, -1.0);
  y(1, 0) = cplx(0.0, 1.0);
  Matrix yy(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) yy(2 * i + k, 2 * j + l) = y(i, j) * y(k, l);
  const Matrix r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> es(r);
  std::vector<double> lam;
  for (int i = 0; i < 4; ++i) lam.push_back(std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0)));
  std::sort(lam.rbegin(), lam.rend());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

// Sum of singular values of the realigned matrix R[(i,k),(j,l)] = rho[(i,j),(k,l)].
inline double ccnr(const Matrix& rho, int da, int db) {
  Matrix r(da * da, db * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) r(i * da + j, k * db + l) = rho(i * db + k, j * db + l);
  Eigen::JacobiSVD<Matrix> svd(r);
  return svd.singularValues().sum();
}

// Composite Simpson rule on a uniform grid (odd number of points).
inline double simpson(const std::vector<double>& y, double h) {
  double s = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

// Least-squares slope of log(y) against t.
inline double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

inline Matrix random_density(int n, unsigned seed, int rank = -1) {
  std::srand(seed);
  if (rank < 0) rank = n;
  Matrix g = Matrix::Random(n, rank);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

inline Vector random_ket(int n, unsigned seed) {
  std::srand(seed);
  Vector v = Vector::Random(n);
  return v / v.norm();
}

}  // namespace oracle
