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

#include "qlink/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Sparse>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qlink/errors.hpp"

namespace qlink {

namespace {

using Sparse = Eigen::SparseMatrix<cplx>;

Sparse to_sparse(const Matrix& m) { return m.sparseView(0.0, 0.0); }

cplx expect(const Sparse& op, const Matrix& rho) {
  cplx acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k) {
    for (Sparse::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  }
  return acc;
}

// Digit of basis index i in subsystem `slot`.
std::vector<int> slot_digits(const Dims& dims, int slot) {
  const int n = total_dim(dims);
  int stride = 1;
  for (std::size_t k = static_cast<std::size_t>(slot) + 1; k < dims.size(); ++k) stride *= dims[k];
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = (i / stride) % dims[static_cast<std::size_t>(slot)];
  return out;
}

Populations qutrit_pops(const Matrix& rho, const std::vector<int>& digits) {
  Populations p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 3) p[static_cast<std::size_t>(digits[i])] += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return p;
}

class Recorder {
 public:
  Recorder(const Dims& dims, const ObservableSpec& spec) {
    if (spec.slot_a >= 0) digits_a_ = slot_digits(dims, spec.slot_a);
    if (spec.slot_b >= 0) digits_b_ = slot_digits(dims, spec.slot_b);
    const int n = total_dim(dims);
    if (spec.a_out.size() > 0) {
      a_out_ = to_sparse(spec.a_out);
      n_out_ = to_sparse(Matrix(spec.a_out.adjoint() * spec.a_out));
      has_out_ = true;
    }
    Matrix loss = Matrix::Zero(n, n);
    for (const auto& l : spec.loss_ops) loss += l.adjoint() * l;
    n_loss_ = to_sparse(loss);
    if (spec.excitation.size() > 0) {
      excitation_ = to_sparse(spec.excitation);
      has_excitation_ = true;
    }
  }

  void record(Trajectory& tr, double t, const Matrix& rho) const {
    tr.t.push_back(t);
    if (!digits_a_.empty()) tr.pops_A.push_back(qutrit_pops(rho, digits_a_));
    if (!digits_b_.empty()) tr.pops_B.push_back(qutrit_pops(rho, digits_b_));
    const cplx a = has_out_ ? expect(a_out_, rho) : cplx{0.0};
    const double flux = has_out_ ? expect(n_out_, rho).real() : 0.0;
    const double loss = expect(n_loss_, rho).real();
    tr.a_mean_out.push_back(a);
    tr.flux_out.push_back(flux);
    tr.flux_loss.push_back(loss);
    tr.excitation.push_back(has_excitation_ ? expect(excitation_, rho).real() : 0.0);
    if (tr.photon_integral.empty()) {
      tr.photon_integral.push_back(0.0);
      tr.loss_integral.push_back(0.0);
    } else {
      const std::size_t k = tr.t.size() - 1;
      const double dt = tr.t[k] - tr.t[k - 1];
      tr.photon_integral.push_back(tr.photon_integral.back() + 0.5 * dt * (tr.flux_out[k] + tr.flux_out[k - 1]));
      tr.loss_integral.push_back(tr.loss_integral.back() + 0.5 * dt * (tr.flux_loss[k] + tr.flux_loss[k - 1]));
    }
  }

 private:
  std::vector<int> digits_a_, digits_b_;
  Sparse a_out_, n_out_, n_loss_, excitation_;
  bool has_out_ = false;
  bool has_excitation_ = false;
};

// Superoperators act on column-major vec(rho): vec(A X B) = (B^T kron A) vec(X).
Sparse sparse_kron(const Sparse& a, const Sparse& b) {
  Sparse out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (Sparse::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (Sparse::InnerIterator ib(b, kb); ib; ++ib) {
          trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                             static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

using RowSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

class Lindbladian {
 public:
  Lindbladian(const TimeDependentHamiltonian& h, const std::vector<CollapseOp>& collapse) : h_(h) {
    const int n = total_dim(h.dims);
    Sparse id(n, n);
    id.setIdentity();
    Matrix hnh = h.static_part;
    Sparse jump_part(n * n, n * n);
    for (const auto& c : collapse) {
      if (c.op.rows() != n || c.op.cols() != n) throw DimensionError("collapse operator " + c.label + " has wrong size");
      hnh -= 0.5 * kI * (c.op.adjoint() * c.op);
      const Sparse l = to_sparse(c.op);
      jump_part += sparse_kron(to_sparse(Matrix(c.op.conjugate())), l);
    }
    const Sparse hs = to_sparse(hnh);
    const Sparse hs_conj = to_sparse(Matrix(hnh.conjugate()));
    Sparse total = -kI * sparse_kron(id, hs) + kI * sparse_kron(hs_conj, id) + jump_part;
    total.prune(cplx{0.0});
    static_ = total;
    for (const auto& term : h.terms) {
      if (term.op.rows() != n || term.op.cols() != n) throw DimensionError("drive term " + term.label + " has wrong size");
      if (term.coeff.size() != h.t.size()) throw DimensionError("drive term " + term.label + " has wrong sample count");
      const Sparse o = to_sparse(term.op);
      const Sparse ot = to_sparse(Matrix(term.op.transpose()));
      Sparse sup = -kI * sparse_kron(id, o) + kI * sparse_kron(ot, id);
      sup.prune(cplx{0.0});
      terms_.emplace_back(sup);
    }
  }

  void apply(double t, const Vector& x, Vector& out) const {
    out.noalias() = static_ * x;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const cplx c = h_.coefficient(k, t);
      if (c != cplx{0.0}) out.noalias() += c * (terms_[k] * x);
    }
  }

 private:
  const TimeDependentHamiltonian& h_;
  RowSparse static_;
  std::vector<RowSparse> terms_;
};

}  // namespace

double Trajectory::mean_field_energy() const {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    acc += 0.5 * (t[k] - t[k - 1]) * (std::norm(a_mean_out[k]) + std::norm(a_mean_out[k - 1]));
  }
  return acc;
}

void Trajectory::append(const Trajectory& other) {
  if (other.t.empty()) return;
  std::size_t start = 0;
  if (!t.empty() && other.t.front() == t.back()) start = 1;
  if (!t.empty() && other.t.front() < t.back()) throw DimensionError("Trajectory::append: time goes backwards");
  const double photon0 = photon_integral.empty() ? 0.0 : photon_integral.back();
  const double loss0 = loss_integral.empty() ? 0.0 : loss_integral.back();
  auto tail = [start](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin() + static_cast<long>(std::min(start, src.size())), src.end()); };
  tail(t, other.t);
  tail(pops_A, other.pops_A);
  tail(pops_B, other.pops_B);
  tail(a_mean_out, other.a_mean_out);
  tail(flux_out, other.flux_out);
  tail(flux_loss, other.flux_loss);
  tail(excitation, other.excitation);
  for (std::size_t k = start; k < other.photon_integral.size(); ++k) {
    photon_integral.push_back(photon0 + other.photon_integral[k]);
    loss_integral.push_back(loss0 + other.loss_integral[k]);
  }
  max_trace_error = std::max(max_trace_error, other.max_trace_error);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
}

MEResult integrate_me(const TimeDependentHamiltonian& h, const std::vector<CollapseOp>& collapse,
                      const DensityMatrix& rho0, const std::vector<double>& t_grid,
                      const ObservableSpec& observables, const IntegratorOptions& options) {
  const int n = total_dim(h.dims);
  if (rho0.dims != h.dims || rho0.dim() != n) throw DimensionError("integrate_me: state and Hamiltonian dimensions differ");
  if (h.static_part.rows() != n || h.static_part.cols() != n) throw DimensionError("integrate_me: static Hamiltonian has wrong size");
  if (t_grid.empty()) throw DimensionError("integrate_me: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw ValidationError("integrate_me: time grid must be strictly increasing");
  }
  if (!(options.max_dt > 0.0)) throw ValidationError("integrate_me: max_dt must be positive");

  Lindbladian lind(h, collapse);
  Recorder rec(h.dims, observables);

  MEResult res;
  Trajectory& tr = res.trajectory;
  Matrix rho = rho0.data;
  const cplx trace0 = rho.trace();
  rec.record(tr, t_grid.front(), rho);
  tr.min_eigenvalue = min_eigenvalue(hermitian_part(rho));

  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Vector x = Eigen::Map<const Vector>(rho.data(), nn);
  Vector k1(nn), k2(nn), k3(nn), k4(nn), stage(nn);
  std::size_t steps = 0;
  for (std::size_t seg = 1; seg < t_grid.size(); ++seg) {
    const double span = t_grid[seg] - t_grid[seg - 1];
    const auto nsub = static_cast<int>(std::max(1.0, std::ceil(span / options.max_dt - 1e-9)));
    const double dt = span / nsub;
    for (int s = 0; s < nsub; ++s) {
      const double t = t_grid[seg - 1] + s * dt;
      lind.apply(t, x, k1);
      stage = x + 0.5 * dt * k1;
      lind.apply(t + 0.5 * dt, stage, k2);
      stage = x + 0.5 * dt * k2;
      lind.apply(t + 0.5 * dt, stage, k3);
      stage = x + dt * k3;
      lind.apply(t + dt, stage, k4);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      Eigen::Map<Matrix> m(x.data(), n, n);
      rho = hermitian_part(m);
      m = rho;
      ++steps;

      const double drift = std::abs(rho.trace() - trace0);
      tr.max_trace_error = std::max(tr.max_trace_error, drift);
      if (!(drift <= options.trace_tolerance)) {
        throw NumericalError(fmt::format("integrate_me: trace drift {:.3e} at t = {:.4f} ns (dt = {:.4g} ns); reduce the step size", drift, t + dt, dt));
      }
      if (options.positivity_every > 0 && steps % options.positivity_every == 0) {
        tr.min_eigenvalue = std::min(tr.min_eigenvalue, min_eigenvalue(rho));
      }
    }
    rec.record(tr, t_grid[seg], rho);
  }
  tr.min_eigenvalue = std::min(tr.min_eigenvalue, min_eigenvalue(rho));
  if (tr.min_eigenvalue < -options.positivity_tolerance) {
    throw NumericalError(fmt::format("integrate_me: state lost positivity (min eigenvalue {:.3e})", tr.min_eigenvalue));
  }
  res.final_state = DensityMatrix(h.dims, rho);
  return res;
}

Matrix output_operator(int fock, double kappa_T_A, double kappa_T_B, double eta_c) {
  const Dims dims = system_dims(fock);
  return std::sqrt(kappa_T_B) * embed(annihilation(fock), kResonatorB, dims).data +
         std::sqrt(kappa_T_A * eta_c) * embed(annihilation(fock), kResonatorA, dims).data;
}

ObservableSpec device_observables(const NodeParams& a, const NodeParams& b, const LinkParams& link,
                                  int fock) {
  const Dims dims = system_dims(fock);
  const auto ra = node_rates(a);
  const auto rb = node_rates(b);
  ObservableSpec spec;
  spec.slot_a = static_cast<int>(kTransmonA);
  spec.slot_b = static_cast<int>(kTransmonB);
  spec.a_out = output_operator(fock, ra.kappa_T, rb.kappa_T, link.eta_c);
  const Matrix a_a = embed(annihilation(fock), kResonatorA, dims).data;
  const Matrix a_b = embed(annihilation(fock), kResonatorB, dims).data;
  const double lost = ra.kappa_T * (1.0 - link.eta_c);
  if (lost > 0.0) spec.loss_ops.push_back(std::sqrt(lost) * a_a);
  if (ra.kappa_int > 0.0) spec.loss_ops.push_back(std::sqrt(ra.kappa_int) * a_a);
  if (rb.kappa_int > 0.0) spec.loss_ops.push_back(std::sqrt(rb.kappa_int) * a_b);
  const Matrix nq = annihilation(kTransmonLevels).adjoint() * annihilation(kTransmonLevels);
  spec.excitation = a_a.adjoint() * a_a + a_b.adjoint() * a_b + 0.5 * embed(nq, kTransmonA, dims).data +
                    0.5 * embed(nq, kTransmonB, dims).data;
  return spec;
}

FieldObservables output_observables(const std::vector<DensityMatrix>& rho_traj, double kappa_T_B,
                                    double eta_c, double kappa_T_A) {
  FieldObservables out;
  if (rho_traj.empty()) return out;
  const Dims& dims = rho_traj.front().dims;
  if (dims.size() != 4) throw DimensionError("output_observables: expected a two-node state");
  const int fock = dims[kResonatorA];
  if (dims != system_dims(fock)) throw DimensionError("output_observables: unexpected subsystem layout");
  const Matrix a = output_operator(fock, kappa_T_A, kappa_T_B, eta_c);
  const Sparse sa = to_sparse(a);
  const Sparse sn = to_sparse(Matrix(a.adjoint() * a));
  for (const auto& rho : rho_traj) {
    if (rho.dims != dims) throw DimensionError("output_observables: inconsistent dimensions");
    out.a_mean_out.push_back(expect(sa, rho.data));
    out.flux_out.push_back(expect(sn, rho.data).real());
  }
  return out;
}

TwoLevelResult two_level_oracle(const DriveEnvelope& g_env, double kappa, cplx c_f0, cplx c_g1,
                                int substeps) {
  if (substeps < 1) throw ValidationError("two_level_oracle: substeps must be >= 1");
  TwoLevelResult r;
  using State = std::array<cplx, 2>;
  auto deriv = [&](double t, const State& c) -> State {
    const cplx g = g_env.value_at(t);
    // i dc/dt = H c with H = [[0, g], [conj(g), -i kappa / 2]].
    return {-kI * (g * c[1]), -kI * (std::conj(g) * c[0]) - 0.5 * kappa * c[1]};
  };
  State c{c_f0, c_g1};
  const double norm0 = std::norm(c_f0) + std::norm(c_g1);
  auto push = [&](double t) {
    r.t.push_back(t);
    r.c_f0.push_back(c[0]);
    r.c_g1.push_back(c[1]);
    r.flux.push_back(kappa * std::norm(c[1]));
    r.emitted.push_back(norm0 - std::norm(c[0]) - std::norm(c[1]));
  };
  if (g_env.t.empty()) return r;
  push(g_env.t.front());
  for (std::size_t k = 1; k < g_env.t.size(); ++k) {
    const double dt = (g_env.t[k] - g_env.t[k - 1]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const double t = g_env.t[k - 1] + s * dt;
      const State k1 = deriv(t, c);
      const State k2 = deriv(t + 0.5 * dt, {c[0] + 0.5 * dt * k1[0], c[1] + 0.5 * dt * k1[1]});
      const State k3 = deriv(t + 0.5 * dt, {c[0] + 0.5 * dt * k2[0], c[1] + 0.5 * dt * k2[1]});
      const State k4 = deriv(t + dt, {c[0] + dt * k3[0], c[1] + dt * k3[1]});
      for (int i = 0; i < 2; ++i) c[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    push(g_env.t[k]);
  }
  return r;
}

Efficiencies efficiencies(const Trajectory& transfer, const Trajectory& with_absorption,
                          const Trajectory& without_absorption, const Trajectory& emit_a,
                          const Trajectory& emit_b) {
  if (with_absorption.t != without_absorption.t) {
    throw DimensionError("efficiencies: trajectories are on different grids");
  }
  if (transfer.pops_B.empty()) throw DimensionError("efficiencies: transfer trajectory has no node-B populations");
  constexpr double kTiny = 1e-12;
  const double ref_abs = without_absorption.mean_field_energy();
  const double ref_b = emit_b.mean_field_energy();
  if (ref_abs < kTiny || ref_b < kTiny) throw NumericalError("efficiencies: reference field integral vanishes");
  Efficiencies e;
  e.transfer = transfer.pops_B.back()[2];
  e.absorption = 1.0 - with_absorption.mean_field_energy() / ref_abs;
  e.loss = 1.0 - emit_a.mean_field_energy() / ref_b;
  return e;
}

double saturation_time(const std::vector<double>& t, const std::vector<double>& series, double fraction) {
  if (t.size() != series.size() || t.empty()) throw DimensionError("saturation_time: size mismatch");
  const double target = fraction * series.back();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (series[k] >= target) return t[k] - t.front();
  }
  return t.back() - t.front();
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t_ns,Pg_A,Pe_A,Pf_A,Pg_B,Pe_B,Pf_B,re_aout,im_aout,flux\n";
  const Populations zero{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const auto& pa = traj.pops_A.empty() ? zero : traj.pops_A[k];
    const auto& pb = traj.pops_B.empty() ? zero : traj.pops_B[k];
    fmt::print(os, "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", traj.t[k], pa[0], pa[1], pa[2],
               pb[0], pb[1], pb[2], traj.a_mean_out[k].real(), traj.a_mean_out[k].imag(), traj.flux_out[k]);
  }
}

}  // namespace qlink
