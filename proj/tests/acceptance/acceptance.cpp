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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles/oracles.hpp"
#include "qlink/device.hpp"
#include "qlink/dynamics.hpp"
#include "qlink/metrics.hpp"
#include "qlink/protocols.hpp"
#include "qlink/pulse.hpp"
#include "qlink/readout.hpp"
#include "qlink/tomography.hpp"
#include "qlink/units.hpp"

using namespace qlink;

namespace {

// Criterion 1
constexpr double kShapeL2 = 1e-3;
constexpr double kShapeWindow = 10.0;  // grid half-width in units of 1/kappa_eff
constexpr double kShapeDt = 0.05;
// Criterion 2
constexpr double kEmitPg = 0.95, kEmitPgTol = 0.02;
// Criterion 3
constexpr double kLossRatio = 0.77, kLossRatioTol = 0.01;
// Criterion 4
constexpr double kTransfer = 0.676, kTransferTol = 0.03;
constexpr double kSaturation = 180.0, kSaturationTol = 30.0;
constexpr double kAbsorption = 0.98, kAbsorptionTol = 0.01;
// Criterion 5
constexpr double kProcess = 0.800, kProcessTol = 0.03;
constexpr double kIdentityWeight = 0.80, kIdentityWeightTol = 0.03;
// Criterion 6
constexpr double kBellF = 0.789, kBellFTol = 0.03;
constexpr double kConcurrence = 0.747, kConcurrenceTol = 0.04;
constexpr double kCcnr = 1.612, kCcnrTol = 0.05;
constexpr double kResidualF = 0.035, kResidualFTol = 0.01;
// Criterion 7, in fidelity points
constexpr double kLossPoints = 12.5, kDecoherencePoints = 11.0, kBudgetTol = 2.0;
// Criterion 8
constexpr double kUpgrade = 0.93, kUpgradeTol = 0.015;
// Criterion 9
constexpr std::size_t kShots = 25000;
constexpr double kSigmas = 3.0;
constexpr double kTableRounding = 1.5e-3;
// Criterion 10
constexpr double kTraceTol = 1e-8;
constexpr double kPositivityTol = -1e-7;
constexpr double kMleTol = 1e-3;
constexpr double kExactTol = 1e-9;
constexpr double kFockDrift = 0.002;
constexpr double kRamseyTol = 0.01;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << fmt::format("{} criterion {:>2} {}: {}", ok ? "PASS" : "FAIL", id, name, detail) << std::endl;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

// Worst-case trace error and eigenvalue over every simulated trajectory.
struct Health {
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  void add(const Trajectory& t) {
    trace_error = std::max(trace_error, t.max_trace_error);
    min_eigenvalue = std::min(min_eigenvalue, t.min_eigenvalue);
  }
};

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

void photon_shaping() {
  double worst = 0.0;
  for (double kt_mhz : {table_node_a().kappa_T, table_node_b().kappa_T}) {
    const double kt = units::mhz(kt_mhz);
    for (double ratio : {0.5, 0.77, 1.0}) {
      const double ke = ratio * kt;
      const auto r = two_level_oracle(emission_drive(symmetric_grid(kShapeWindow / ke, kShapeDt), ke, kt), kt);
      std::vector<double> target;
      for (double t : r.t) target.push_back(oracle::sech2_flux(t, ke));
      worst = std::max(worst, relative_l2(r.flux, target));
    }
  }
  report(1, "photon shaping", worst < kShapeL2, fmt::format("max relative L2 {:.2e} (< {:.0e})", worst, kShapeL2));
}

void emission(const DeviceParams& d, const SimOptions& o, Health& h) {
  const auto r = run_emission(d, Node::B, EmissionInitial::F, o);
  h.add(r.trajectory);
  const double pg = r.trajectory.pops_B.back()[0];
  report(2, "emission from B", within(pg, kEmitPg, kEmitPgTol),
         fmt::format("P_g {:.4f} (target {} +- {})", pg, kEmitPg, kEmitPgTol));
}

void transfer(const DeviceParams& d, const SimOptions& o, Health& h) {
  const auto rep = transfer_report(d, o);
  for (const auto* t : {&rep.transfer.sequence.trajectory, &rep.with_absorption, &rep.without_absorption, &rep.emit_a,
                        &rep.emit_b}) {
    h.add(*t);
  }
  const double ratio = rep.field_ratio_a_over_b;
  report(3, "inter-node loss", within(ratio, kLossRatio, kLossRatioTol),
         fmt::format("A/B field ratio {:.4f} (target {} +- {})", ratio, kLossRatio, kLossRatioTol));
  const double pe = rep.efficiencies.transfer, ts = rep.saturation_time, ab = rep.efficiencies.absorption;
  report(4, "transfer",
         within(pe, kTransfer, kTransferTol) && within(ts, kSaturation, kSaturationTol) &&
             within(ab, kAbsorption, kAbsorptionTol),
         fmt::format("P_e {:.4f} (target {} +- {}), saturation {:.1f} ns (target {} +- {}), absorption {:.4f} "
                     "(target {} +- {})",
                     pe, kTransfer, kTransferTol, ts, kSaturation, kSaturationTol, ab, kAbsorption, kAbsorptionTol));
}

void process(const DeviceParams& d, const SimOptions& o) {
  const auto q = run_state_transfer_qpt(d, o);
  const Matrix& chi = q.process.chi;
  const double w = chi(0, 0).real();
  bool dominated = true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i + j > 0 && std::abs(chi(i, j)) >= w) dominated = false;
  report(5, "state-transfer process",
         within(q.process_fidelity, kProcess, kProcessTol) && within(w, kIdentityWeight, kIdentityWeightTol) && dominated,
         fmt::format("F_p {:.4f} (target {} +- {}), identity weight {:.4f}, largest element {}", q.process_fidelity,
                     kProcess, kProcessTol, w, dominated ? "chi_II" : "off identity"));
}

void entanglement(const DeviceParams& d, const SimOptions& o, Health& h) {
  const auto e = run_entanglement(d, o);
  h.add(e.sequence.trajectory);
  const auto& m = e.metrics;
  const bool ok = within(m.state_fidelity, kBellF, kBellFTol) && within(m.concurrence, kConcurrence, kConcurrenceTol) &&
                  within(m.ccnr, kCcnr, kCcnrTol) && within(e.residual_f, kResidualF, kResidualFTol);
  report(6, "remote entanglement", ok,
         fmt::format("F {:.4f} (target {} +- {}), C {:.4f} (target {} +- {}), ccnr {:.4f} (target {} +- {}), "
                     "f population {:.4f} (target {} +- {})",
                     m.state_fidelity, kBellF, kBellFTol, m.concurrence, kConcurrence, kConcurrenceTol, m.ccnr, kCcnr,
                     kCcnrTol, e.residual_f, kResidualF, kResidualFTol));
}

void budget(const DeviceParams& d, const SimOptions& o) {
  const auto b = error_budget(d, o);
  const double dl = 100.0 * b.delta_loss(), dd = 100.0 * b.delta_decoherence();
  report(7, "error budget", within(dl, kLossPoints, kBudgetTol) && within(dd, kDecoherencePoints, kBudgetTol),
         fmt::format("loss off +{:.2f} points (target {} +- {}), decoherence off +{:.2f} points (target {} +- {})", dl,
                     kLossPoints, kBudgetTol, dd, kDecoherencePoints, kBudgetTol));
}

void upgrade(const DeviceParams& d, const SimOptions& o, Health& h) {
  const auto e = run_upgrade_scenario(d, o);
  h.add(e.sequence.trajectory);
  const double f = e.metrics.state_fidelity;
  report(8, "upgraded coherence", within(f, kUpgrade, kUpgradeTol),
         fmt::format("F {:.4f} (target {} +- {})", f, kUpgrade, kUpgradeTol));
}

double binomial_sigma(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

void readout() {
  std::mt19937_64 rng(90210);
  double worst_table = 0.0, worst_mitigation = 0.0;
  for (Node node : {Node::A, Node::B}) {
    const auto model = calibrated_readout(node);
    const Matrix3 published = reference_assignment(node);
    const Matrix3 measured = measure_assignment(model, kShots, rng);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        const double sigma = std::max(binomial_sigma(published(r, c), kShots), 1.0 / kShots);
        worst_table = std::max(worst_table, std::abs(measured(r, c) - published(r, c)) / sigma);
      }

    // Known populations through the readout, mitigated with the measured matrix.
    const Vector3 truth(0.6, 0.3, 0.1);
    const auto shots = sample_readout(truth, model, kShots, rng);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
    for (const auto& x : shots) m(classify(x, model.mixture)) += 1.0 / kShots;
    const Eigen::MatrixXd r_meas = measured;
    const auto res = mitigate(m, r_meas);
    // Multinomial covariance of m propagated through R^-1.
    const Eigen::MatrixXd cov_m = (Eigen::MatrixXd(m.asDiagonal()) - m * m.transpose()) / kShots;
    const Eigen::MatrixXd inv = r_meas.inverse();
    const Eigen::MatrixXd cov = inv * cov_m * inv.transpose();
    for (int s = 0; s < 3; ++s) {
      worst_mitigation = std::max(worst_mitigation, std::abs(res.populations(s) - truth(s)) / std::sqrt(cov(s, s)));
    }
  }
  const auto pair = two_node(reference_assignment(Node::A), reference_assignment(Node::B));
  const double table3 = (pair - oracle::published_two_qutrit_assignment()).cwiseAbs().maxCoeff();
  report(9, "readout pipeline", worst_table <= kSigmas && worst_mitigation <= kSigmas && table3 <= kTableRounding,
         fmt::format("assignment {:.2f} sigma, mitigation {:.2f} sigma (<= {}), two-node table max |diff| {:.1e} "
                     "(<= {:.1e})",
                     worst_table, worst_mitigation, kSigmas, table3, kTableRounding));
}

double ramsey_worst_error() {
  double worst = 0.0;
  for (const auto& node : {table_node_a(), table_node_b()}) {
    std::vector<Matrix> jumps;
    for (const auto& c : qutrit_collapse_ops(node)) jumps.push_back(c.op);
    const Matrix h = Matrix::Zero(3, 3);
    auto fit = [&](int i, int j, double horizon_ns) {
      Vector psi = Vector::Zero(3);
      psi(i) = psi(j) = 1.0;
      psi.normalize();
      std::vector<double> ts, ys;
      for (int k = 1; k <= 8; ++k) {
        const double t = horizon_ns * k / 8.0;
        ts.push_back(t);
        const Matrix rho = oracle::evolve(h, jumps, psi * psi.adjoint(), t);
        ys.push_back(i == j ? rho(i, i).real() : std::abs(rho(i, j)));
      }
      return -1.0 / oracle::log_slope(ts, ys) / 1e3;
    };
    worst = std::max({worst, std::abs(fit(1, 1, 3000.0) / node.T1ge - 1.0), std::abs(fit(2, 2, 1000.0) / node.T1ef - 1.0),
                      std::abs(fit(0, 1, 2000.0) / node.T2ge - 1.0), std::abs(fit(1, 2, 1000.0) / node.T2ef - 1.0)});
  }
  return worst;
}

void properties(const DeviceParams& d, const SimOptions& o, Health& h) {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  // Round trip of a random two-qutrit state through exact pair tomography.
  const Matrix truth = oracle::random_density(9, 17, 3);
  const auto settings = gate_set(SettingKind::Pair);
  std::vector<std::vector<double>> pops;
  for (const auto& s : settings) pops.push_back(born_probabilities(truth, s));
  const double mle = hs_distance(qst_mle(pops, settings, {3, 3}).rho.data, truth);
  check(mle < kMleTol, "mle");

  Vector a = oracle::random_ket(3, 1), b = oracle::random_ket(3, 2);
  const Matrix prod = kron(Matrix(a * a.adjoint()), Matrix(b * b.adjoint()));
  const double ccnr_product = ccnr(DensityMatrix({3, 3}, prod));
  check(within(ccnr_product, 1.0, kExactTol), "ccnr(product)");
  const Vector bell = bell_target();
  const double c_bell = concurrence(bell * bell.adjoint());
  check(within(c_bell, 1.0, 1e-7), "concurrence(Bell)");

  std::vector<double> by_eta, by_scale;
  for (double eta : {1.0, 0.88, 0.77}) {
    DeviceParams x = d;
    x.link.eta_c = eta;
    const auto e = run_entanglement(x, o);
    h.add(e.sequence.trajectory);
    by_eta.push_back(e.metrics.state_fidelity);
  }
  for (double s : {1.0, 3.0, 10.0}) {
    DeviceParams x = d;
    x.a = scale_coherence(x.a, s);
    x.b = scale_coherence(x.b, s);
    const auto e = run_entanglement(x, o);
    h.add(e.sequence.trajectory);
    by_scale.push_back(e.metrics.state_fidelity);
  }
  const bool mono = by_eta[0] > by_eta[1] && by_eta[1] > by_eta[2] && by_scale[0] < by_scale[1] && by_scale[1] < by_scale[2];
  check(mono, "monotonicity");

  SimOptions o4 = o;
  o4.fock = 4;
  const auto e3 = run_entanglement(d, o), e4 = run_entanglement(d, o4);
  h.add(e4.sequence.trajectory);
  const double q3 = run_state_transfer_qpt(d, o).process_fidelity, q4 = run_state_transfer_qpt(d, o4).process_fidelity;
  const double drift =
      std::max(std::abs(e3.metrics.state_fidelity - e4.metrics.state_fidelity), std::abs(q3 - q4));
  check(drift < kFockDrift, "fock drift");

  const double ramsey = ramsey_worst_error();
  check(ramsey < kRamseyTol, "ramsey");
  check(h.trace_error < kTraceTol, "trace");
  check(h.min_eigenvalue > kPositivityTol, "positivity");

  std::string which;
  for (const auto& f : failed) which += " " + f;
  report(10, "property suite", failed.empty(),
         fmt::format("trace {:.1e}, min eigenvalue {:.1e}, mle {:.1e}, ccnr(product) {:.6f}, C(Bell) {:.6f}, "
                     "F(eta 1/0.88/0.77) {:.3f}/{:.3f}/{:.3f}, F(T x1/x3/x10) {:.3f}/{:.3f}/{:.3f}, fock drift {:.1e}, "
                     "T1/T2 calibration {:.2e}{}",
                     h.trace_error, h.min_eigenvalue, mle, ccnr_product, c_bell, by_eta[0], by_eta[1], by_eta[2],
                     by_scale[0], by_scale[1], by_scale[2], drift, ramsey, failed.empty() ? "" : "; failed:" + which));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const DeviceParams device = default_device();
  SimOptions options;
  options.tomography = TomographyMode::Exact;
  Health health;

  photon_shaping();
  emission(device, options, health);
  transfer(device, options, health);
  process(device, options);
  entanglement(device, options, health);
  budget(device, options);
  upgrade(device, options, health);
  readout();
  properties(device, options, health);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << fmt::format("{} of 10 criteria failed ({:.0f} s)", failures, secs) << std::endl;
  return failures == 0 ? 0 : 1;
}
