// Copyright 2026 The pqe-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Adiabatically decoupled PQE.
 *
 * The parameter set is split once, by the magnitude of the perturbative
 * initial guess, into a small principal subset and a large auxiliary subset.
 * Only the principal parameters are iterated, on the shallow circuit U_P. The
 * auxiliary parameters are then slaved to the converged principal ones in a
 * single step,
 *
 *   theta_A = <Phi_A| U_P^dag H U_P |Phi_0> / D_A,
 *
 * and the energy is corrected as E = <U_P^dag H U_P> + sum_A theta_A^2 D_A.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pqe/oracle.hpp"
#include "pqe/pqe.hpp"

namespace pqe {

/// One parameter of the partitioned ansatz.
struct PlanSlot {
  Excitation exc;
  std::size_t pool_index = 0;
  double initial = 0.0;
  double denominator = 0.0;
};

/// Principal/auxiliary split and the operator ordering of
/// U_pab = U_P U_A, both factors written left to right.
///
/// Within each subset the doubles come first and then the singles, each block
/// in non-increasing |theta_init|. Applied right to left, this means
/// auxiliaries act on the reference before principals, singles before
/// doubles, and small amplitudes before large ones.
class PartitionPlan {
 public:
  PartitionPlan() = default;
  PartitionPlan(double f_pps, int n_qubits, std::vector<int> reference, std::vector<PlanSlot> principal,
                std::vector<PlanSlot> auxiliary)
      : f_pps_(f_pps),
        n_qubits_(n_qubits),
        reference_(std::move(reference)),
        principal_(std::move(principal)),
        auxiliary_(std::move(auxiliary)) {
    const auto p_ops = excitations(principal_);
    const auto a_ops = excitations(auxiliary_);
    auto both = p_ops;
    both.insert(both.end(), a_ops.begin(), a_ops.end());
    principal_ansatz_ = OrderedAnsatz(n_qubits_, reference_, p_ops);
    auxiliary_ansatz_ = OrderedAnsatz(n_qubits_, reference_, a_ops);
    bipartite_ansatz_ = OrderedAnsatz(n_qubits_, reference_, both);
  }

  double f_pps() const { return f_pps_; }
  int n_qubits() const { return n_qubits_; }
  const std::vector<int>& reference() const { return reference_; }
  std::size_t n_principal() const { return principal_.size(); }
  std::size_t n_auxiliary() const { return auxiliary_.size(); }
  std::size_t n_parameters() const { return principal_.size() + auxiliary_.size(); }

  const std::vector<PlanSlot>& principal() const { return principal_; }
  const std::vector<PlanSlot>& auxiliary() const { return auxiliary_; }
  const OrderedAnsatz& principal_ansatz() const { return principal_ansatz_; }
  const OrderedAnsatz& auxiliary_ansatz() const { return auxiliary_ansatz_; }
  const OrderedAnsatz& bipartite_ansatz() const { return bipartite_ansatz_; }

  std::vector<Excitation> principal_ops() const { return excitations(principal_); }
  std::vector<Excitation> auxiliary_ops() const { return excitations(auxiliary_); }
  ParameterVector principal_initial() const { return field(principal_, &PlanSlot::initial); }
  ParameterVector auxiliary_initial() const { return field(auxiliary_, &PlanSlot::initial); }
  std::vector<double> principal_denominators() const { return field(principal_, &PlanSlot::denominator); }
  std::vector<double> auxiliary_denominators() const { return field(auxiliary_, &PlanSlot::denominator); }

  /// [theta_P, theta_A] aligned with bipartite_ansatz().
  ParameterVector bipartite_params(std::span<const double> theta_p, std::span<const double> theta_a) const {
    if (theta_p.size() != n_principal() || theta_a.size() != n_auxiliary()) {
      throw std::invalid_argument("PartitionPlan: parameter counts do not match the partition");
    }
    ParameterVector out(theta_p.begin(), theta_p.end());
    out.insert(out.end(), theta_a.begin(), theta_a.end());
    return out;
  }

 private:
  static std::vector<Excitation> excitations(const std::vector<PlanSlot>& s) {
    std::vector<Excitation> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(x.exc);
    return out;
  }
  static std::vector<double> field(const std::vector<PlanSlot>& s, double PlanSlot::*m) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(x.*m);
    return out;
  }

  double f_pps_ = 1.0;
  int n_qubits_ = 0;
  std::vector<int> reference_;
  std::vector<PlanSlot> principal_;
  std::vector<PlanSlot> auxiliary_;
  OrderedAnsatz principal_ansatz_;
  OrderedAnsatz auxiliary_ansatz_;
  OrderedAnsatz bipartite_ansatz_;
};

/// N_P = max(1, round(f * N)), half away from zero.
inline std::size_t principal_count(double f_pps, std::size_t n_par) {
  if (!(f_pps > 0.0 && f_pps <= 1.0)) throw std::invalid_argument("f_pps must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(std::lround(f_pps * static_cast<double>(n_par)));
  return std::clamp<std::size_t>(n, 1, n_par);
}

inline PartitionPlan partition_and_order(const std::vector<Excitation>& pool, std::span<const double> init,
                                         std::span<const double> denominators, double f_pps, int n_qubits,
                                         const std::vector<int>& reference) {
  if (pool.empty()) throw std::invalid_argument("partition_and_order: empty pool");
  if (init.size() != pool.size() || denominators.size() != pool.size()) {
    throw std::invalid_argument("partition_and_order: pool, amplitudes and denominators differ in length");
  }
  const std::size_t n_p = principal_count(f_pps, pool.size());

  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto by_magnitude = [&](std::size_t a, std::size_t b) { return std::abs(init[a]) > std::abs(init[b]); };
  std::stable_sort(idx.begin(), idx.end(), by_magnitude);

  auto build = [&](std::span<const std::size_t> members) {
    std::vector<std::size_t> m(members.begin(), members.end());
    std::sort(m.begin(), m.end());  // pool order, the tie-break
    std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      if (pool[a].rank() != pool[b].rank()) return pool[a].rank() > pool[b].rank();
      return by_magnitude(a, b);
    });
    std::vector<PlanSlot> out;
    out.reserve(m.size());
    for (std::size_t k : m) out.push_back({pool[k], k, init[k], denominators[k]});
    return out;
  };
  const std::span<const std::size_t> all(idx);
  return PartitionPlan(f_pps, n_qubits, reference, build(all.first(n_p)), build(all.subspan(n_p)));
}

inline PartitionPlan partition_and_order(const Problem& p, std::span<const double> init, double f_pps) {
  const auto d = mp2_denominators(p.pool, p.eps);
  return partition_and_order(p.pool, init, d, f_pps, p.n_qubits(), p.reference());
}

/// Principal residues on the shallow circuit alone: <U_P Phi_P| H |U_P Phi_0>.
inline ResidueVector nfc_residue(const QubitHamiltonian& h, const PartitionPlan& plan,
                                 std::span<const double> theta_p) {
  return residue_projection(h, plan.principal_ansatz(), theta_p);
}

/// One-step slaving of the auxiliary amplitudes to theta_P.
inline ParameterVector map_auxiliary(const QubitHamiltonian& h, const PartitionPlan& plan,
                                     std::span<const double> theta_p) {
  if (plan.n_auxiliary() == 0) return {};
  const ResidueVector r = residue_projection(h, plan.principal_ansatz(), theta_p, plan.auxiliary_ops());
  ParameterVector out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = r[k] / plan.auxiliary()[k].denominator;
  return out;
}

/// sum_A theta_A^2 D_A; non-positive when every D_A < 0.
inline double auxiliary_correction(const PartitionPlan& plan, std::span<const double> theta_a) {
  if (theta_a.size() != plan.n_auxiliary()) throw std::invalid_argument("auxiliary_correction: length");
  double c = 0.0;
  for (std::size_t k = 0; k < theta_a.size(); ++k) c += theta_a[k] * theta_a[k] * plan.auxiliary()[k].denominator;
  return c;
}

inline double corrected_energy(const QubitHamiltonian& h, const PartitionPlan& plan,
                               std::span<const double> theta_p, std::span<const double> theta_a) {
  return pqe_energy(h, plan.principal_ansatz(), theta_p) + auxiliary_correction(plan, theta_a);
}

/// <Phi_0| U_pab^dag H U_pab |Phi_0> with U_pab = U_P U_A.
inline double bipartite_energy(const QubitHamiltonian& h, const PartitionPlan& plan,
                               std::span<const double> theta_p, std::span<const double> theta_a) {
  return pqe_energy(h, plan.bipartite_ansatz(), plan.bipartite_params(theta_p, theta_a));
}

struct ADResult {
  ParameterVector theta_p;
  ParameterVector theta_a;
  double e_principal = 0.0;
  double correction = 0.0;
  double e_corrected = 0.0;
  ConvergenceTrace trace;
  long long mapping_calls = 0;

  double energy() const { return e_corrected; }
};

inline constexpr const char* kPostOptimizationMapping = "post_optimization_mapping";

/// Principal-only iteration, then one auxiliary mapping and the energy correction.
///
/// The terminal trace record carries the corrected energy. With no auxiliary
/// parameters nothing is mapped and the trace is that of plain PQE.
inline ADResult nfc_solve(const QubitHamiltonian& h, const PartitionPlan& plan, ParameterVector init,
                          const SolverConfig& config = {}) {
  const std::vector<double> d_p = plan.principal_denominators();
  PqeResult principal = pqe_solve(h, plan.principal_ansatz(), std::move(init), d_p, config);
  ADResult out;
  out.theta_p = std::move(principal.params);
  out.trace = std::move(principal.trace);
  out.e_principal = out.trace.last_iteration().energy;
  if (plan.n_auxiliary() > 0) {
    out.theta_a = map_auxiliary(h, plan, out.theta_p);
    ++out.mapping_calls;
    out.correction = auxiliary_correction(plan, out.theta_a);
    const TraceRecord& last = out.trace.last_iteration();
    out.trace.records.push_back({last.iteration + 1, out.e_principal + out.correction, last.residue_inf_norm,
                                 last.cumulative_residue_evals + static_cast<long long>(plan.n_auxiliary()),
                                 kPostOptimizationMapping});
  }
  out.e_corrected = out.e_principal + out.correction;
  return out;
}

inline ADResult nfc_solve(const QubitHamiltonian& h, const PartitionPlan& plan, const SolverConfig& config = {}) {
  return nfc_solve(h, plan, plan.principal_initial(), config);
}

/// Feedback-controlled variant: auxiliaries re-slaved every iteration and the
/// principal residues taken on the full U_pab circuit.
inline ADResult feedback_adpqe_solve(const QubitHamiltonian& h, const PartitionPlan& plan, ParameterVector init,
                                     const SolverConfig& config = {}) {
  if (init.size() != plan.n_principal()) throw std::invalid_argument("feedback_adpqe_solve: init length");
  const std::vector<double> d_p = plan.principal_denominators();
  const std::vector<Excitation> projections = plan.principal_ops();
  ADResult out;
  out.theta_p = std::move(init);
  long long evals = 0;
  for (int k = 0;; ++k) {
    out.theta_a = map_auxiliary(h, plan, out.theta_p);
    ++out.mapping_calls;
    const ParameterVector full = plan.bipartite_params(out.theta_p, out.theta_a);
    const ResidueEvaluation ev = evaluate_residues(h, plan.bipartite_ansatz(), full, projections, config.mode);
    evals += static_cast<long long>(projections.size());
    const double rn = inf_norm(ev.residues);
    out.trace.records.push_back({k, ev.energy, rn, evals, "iteration"});
    if (rn < config.tolerance) {
      out.trace.status = ConvergenceStatus::kConverged;
      break;
    }
    if (k >= config.max_iterations) {
      out.trace.status = ConvergenceStatus::kMaxIterations;
      break;
    }
    for (std::size_t m = 0; m < out.theta_p.size(); ++m) out.theta_p[m] += ev.residues[m] / d_p[m];
  }
  out.e_principal = pqe_energy(h, plan.principal_ansatz(), out.theta_p);
  out.e_corrected = out.trace.last_iteration().energy;
  out.correction = out.e_corrected - out.e_principal;
  return out;
}

inline ADResult feedback_adpqe_solve(const QubitHamiltonian& h, const PartitionPlan& plan,
                                     const SolverConfig& config = {}) {
  return feedback_adpqe_solve(h, plan, plan.principal_initial(), config);
}

/// Eigenvalues of the Jacobian of G(theta) = theta + r(theta)/D.
struct StabilitySpectrum {
  std::vector<std::complex<double>> eigenvalues;  // sorted by modulus, largest first
  std::vector<double> moduli;
  double spectral_radius = 0.0;
  /// For each eigenvalue, the parameter slot carrying the largest eigenvector
  /// component. A heuristic label only.
  std::vector<std::size_t> dominant_component;
  Eigen::MatrixXd jacobian;
};

inline StabilitySpectrum spectrum_of(const Eigen::MatrixXd& jac) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(jac, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("stability_spectrum: eigen-decomposition failed");
  const Eigen::Index n = jac.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  StabilitySpectrum s;
  s.jacobian = jac;
  for (Eigen::Index k : order) {
    const std::complex<double> ev = es.eigenvalues()(k);
    s.eigenvalues.push_back(ev);
    s.moduli.push_back(std::abs(ev));
    Eigen::Index arg = 0;
    es.eigenvectors().col(k).cwiseAbs().maxCoeff(&arg);
    s.dominant_component.push_back(static_cast<std::size_t>(arg));
  }
  s.spectral_radius = s.moduli.empty() ? 0.0 : s.moduli.front();
  return s;
}

/// Central-difference Jacobian of the quasi-Newton update map at params_star.
inline StabilitySpectrum stability_spectrum(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                            std::span<const double> params_star,
                                            std::span<const double> denominators, double step = 1e-5) {
  if (params_star.size() != ansatz.size() || denominators.size() != ansatz.size()) {
    throw std::invalid_argument("stability_spectrum: length mismatch");
  }
  const std::vector<double> d(denominators.begin(), denominators.end());
  const oracle::VectorMap g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const std::vector<double> th(x.data(), x.data() + x.size());
    const ResidueVector r = residue_projection(h, ansatz, th);
    Eigen::VectorXd y(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) y(k) = x(k) + r[k] / d[k];
    return y;
  };
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(params_star.data(),
                                                               static_cast<Eigen::Index>(params_star.size()));
  return spectrum_of(oracle::finite_difference_jacobian(g, x0, step));
}

/// M_{mu nu} = <Phi_mu| [F, kappa_nu] |Phi_0> with F = sum_p eps_p n_p.
/// For a diagonal F this is exactly -D_mu delta_{mu nu}.
inline Eigen::MatrixXd fock_commutator_matrix(const OrbitalEnergies& eps, const std::vector<int>& reference,
                                              const std::vector<Excitation>& ops, int n_qubits) {
  const PauliSum f = diagonal_one_body(eps.eps);
  const StateVector phi0 = reference_state(reference, n_qubits);
  const StateVector f_phi0 = apply_operator(f, phi0);
  std::vector<StateVector> dets;
  for (const auto& e : ops) dets.push_back(excited_determinant(reference, e, n_qubits));
  Eigen::MatrixXd m(ops.size(), ops.size());
  for (std::size_t nu = 0; nu < ops.size(); ++nu) {
    const PauliSum k = kappa_to_pauli(ops[nu], n_qubits);
    StateVector c = apply_operator(f, apply_operator(k, phi0));
    c -= apply_operator(k, f_phi0);
    for (std::size_t mu = 0; mu < ops.size(); ++mu) m(mu, nu) = dets[mu].inner(c).real();
  }
  return m;
}

/// Lambda_mu = dr_mu/dtheta_mu / D_mu at theta = 0, i.e.
/// (<Phi_mu|H|Phi_mu> - <Phi_0|H|Phi_0>) / D_mu. Negative for a gapped reference.
inline std::vector<double> diagonal_lambda(const QubitHamiltonian& h, const std::vector<int>& reference,
                                           const std::vector<Excitation>& ops, std::span<const double> denominators) {
  const int n = h.n_qubits();
  const double e0 = h.expectation(reference_state(reference, n));
  std::vector<double> out;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    out.push_back((h.expectation(excited_determinant(reference, ops[k], n)) - e0) / denominators[k]);
  }
  return out;
}

}  // namespace pqe
