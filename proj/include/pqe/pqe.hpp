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
 * Conventional projective quantum eigensolver on a dUCC ansatz.
 *
 * Residues r_mu = <Phi_mu| U^dag H U |Phi_0> are driven to zero with the
 * quasi-Newton update theta_mu <- theta_mu + r_mu / D_mu, where D_mu is the
 * MP2 denominator (occupied minus virtual orbital energies).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqe/excitation.hpp"
#include "pqe/hamiltonian_io.hpp"
#include "pqe/operator_algebra.hpp"
#include "pqe/simulator.hpp"

namespace pqe {

using ParameterVector = std::vector<double>;
using ResidueVector = std::vector<double>;

/// Jordan-Wigner Hamiltonian together with its compiled form.
class QubitHamiltonian {
 public:
  QubitHamiltonian() = default;
  QubitHamiltonian(PauliSum pauli, int n_qubits)
      : n_qubits_(n_qubits), pauli_(std::move(pauli)), compiled_(pauli_, n_qubits) {}
  explicit QubitHamiltonian(const SpinOrbitalHamiltonian& h)
      : QubitHamiltonian(hamiltonian_to_pauli(h), h.n_so) {}

  int n_qubits() const { return n_qubits_; }
  const PauliSum& pauli() const { return pauli_; }
  const CompiledObservable& compiled() const { return compiled_; }

  double expectation(const StateVector& psi) const { return compiled_.expectation(psi); }
  StateVector apply(const StateVector& psi) const { return compiled_.apply(psi); }

 private:
  int n_qubits_ = 0;
  PauliSum pauli_;
  CompiledObservable compiled_;
};

/// Everything derived once from a spin-orbital Hamiltonian.
struct Problem {
  SpinOrbitalHamiltonian so;
  OrbitalEnergies eps;
  QubitHamiltonian h;
  std::vector<Excitation> pool;

  static Problem from(SpinOrbitalHamiltonian so) {
    Problem p;
    p.eps = compute_fock(so);
    p.h = QubitHamiltonian(so);
    p.pool = excitation_pool(so);
    p.so = std::move(so);
    return p;
  }

  int n_qubits() const { return so.n_so; }
  const std::vector<int>& reference() const { return so.occupation; }
};

enum class ResidueMode { kProjection, kMeasurement };

struct SolverConfig {
  int max_iterations = 200;
  double tolerance = 1e-5;  // on max |r_mu|
  ResidueMode mode = ResidueMode::kProjection;
};

enum class ConvergenceStatus { kConverged, kMaxIterations };

inline const char* to_string(ConvergenceStatus s) {
  return s == ConvergenceStatus::kConverged ? "converged" : "max-iterations";
}

struct TraceRecord {
  int iteration = 0;
  double energy = 0.0;
  double residue_inf_norm = 0.0;
  long long cumulative_residue_evals = 0;
  std::string kind = "iteration";
};

/// One record per iteration, plus an optional terminal record of another kind.
struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  ConvergenceStatus status = ConvergenceStatus::kMaxIterations;

  bool converged() const { return status == ConvergenceStatus::kConverged; }
  std::size_t iteration_count() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.kind == "iteration"; }));
  }
  const TraceRecord& last_iteration() const {
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
      if (it->kind == "iteration") return *it;
    }
    throw std::logic_error("ConvergenceTrace: no iteration records");
  }
};

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Full ansatz with operators in pool order.
inline OrderedAnsatz pool_ordered_ansatz(const Problem& p) {
  return OrderedAnsatz(p.n_qubits(), p.reference(), p.pool);
}

struct ResidueEvaluation {
  ResidueVector residues;
  double energy = 0.0;  // <Phi_0|U^dag H U|Phi_0> at the same point
};

/// Projection-mode residues <U Phi_mu| H |U Phi_0> onto `projections`, plus the energy.
inline ResidueEvaluation evaluate_residues(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                           std::span<const double> params,
                                           const std::vector<Excitation>& projections) {
  const StateVector psi0 = build_ansatz_state(ansatz, params);
  const StateVector h_psi0 = h.apply(psi0);
  ResidueEvaluation out;
  out.energy = psi0.inner(h_psi0).real();
  out.residues.reserve(projections.size());
  for (const auto& exc : projections) {
    StateVector phi = ansatz.determinant(exc);
    ansatz.apply(phi, params);
    out.residues.push_back(phi.inner(h_psi0).real());
  }
  return out;
}

inline ResidueVector residue_projection(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                        std::span<const double> params,
                                        const std::vector<Excitation>& projections) {
  return evaluate_residues(h, ansatz, params, projections).residues;
}

/// Projections onto the ansatz's own excitations.
inline ResidueVector residue_projection(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                        std::span<const double> params) {
  return residue_projection(h, ansatz, params, ansatz.ops());
}

/// E_0 = <Phi_0|U^dag H U|Phi_0>.
inline double pqe_energy(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                         std::span<const double> params) {
  return h.expectation(build_ansatz_state(ansatz, params));
}

/// r_mu from three expectation values:
/// <Omega_mu(pi/4)|Hbar|Omega_mu(pi/4)> - E_mu/2 - E_0/2,
/// with Omega_mu(t) = e^{t kappa_mu}|Phi_0> and Hbar = U^dag H U.
inline double residue_measurement_mode(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                       std::span<const double> params, const Excitation& exc,
                                       double e0) {
  StateVector omega = omega_state(ansatz, exc, std::numbers::pi / 4.0);
  ansatz.apply(omega, params);
  StateVector phi_mu = ansatz.determinant(exc);
  ansatz.apply(phi_mu, params);
  return h.expectation(omega) - 0.5 * h.expectation(phi_mu) - 0.5 * e0;
}

inline double residue_measurement_mode(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                       std::span<const double> params, const Excitation& exc) {
  return residue_measurement_mode(h, ansatz, params, exc, pqe_energy(h, ansatz, params));
}

inline ResidueEvaluation evaluate_residues(const QubitHamiltonian& h, const OrderedAnsatz& ansatz,
                                           std::span<const double> params,
                                           const std::vector<Excitation>& projections, ResidueMode mode) {
  if (mode == ResidueMode::kProjection) return evaluate_residues(h, ansatz, params, projections);
  ResidueEvaluation out;
  out.energy = pqe_energy(h, ansatz, params);
  for (const auto& exc : projections) {
    out.residues.push_back(residue_measurement_mode(h, ansatz, params, exc, out.energy));
  }
  return out;
}

/// Initial amplitudes: doubles at MP2, <ij||ab>/D; singles from one residue
/// evaluation at the MP2-doubles point, r_ia / D_ia.
inline ParameterVector initialize_parameters(const Problem& p) {
  const std::vector<double> d = mp2_denominators(p.pool, p.eps);
  ParameterVector theta(p.pool.size(), 0.0);
  for (std::size_t k = 0; k < p.pool.size(); ++k) {
    const Excitation& e = p.pool[k];
    if (e.is_double()) theta[k] = p.so.g(e.occ[0], e.occ[1], e.virt[0], e.virt[1]) / d[k];
  }
  bool has_singles = false;
  for (const auto& e : p.pool) has_singles = has_singles || e.is_single();
  if (!has_singles) return theta;
  const OrderedAnsatz ansatz = pool_ordered_ansatz(p);
  const ResidueVector r = residue_projection(p.h, ansatz, theta);
  for (std::size_t k = 0; k < p.pool.size(); ++k) {
    if (p.pool[k].is_single()) theta[k] = r[k] / d[k];
  }
  return theta;
}

struct PqeResult {
  ParameterVector params;
  ConvergenceTrace trace;
};

/// Iterates theta <- theta + r/D until max|r| < tolerance or max_iterations
/// updates have been made. No acceleration.
inline PqeResult pqe_solve(const QubitHamiltonian& h, const OrderedAnsatz& ansatz, ParameterVector init,
                           std::span<const double> denominators, const SolverConfig& config = {}) {
  if (init.size() != ansatz.size() || denominators.size() != ansatz.size()) {
    throw std::invalid_argument("pqe_solve: parameter/denominator count does not match ansatz");
  }
  const std::vector<Excitation> projections = ansatz.ops();
  PqeResult out;
  out.params = std::move(init);
  long long evals = 0;
  for (int k = 0;; ++k) {
    const ResidueEvaluation ev = evaluate_residues(h, ansatz, out.params, projections, config.mode);
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
    for (std::size_t m = 0; m < out.params.size(); ++m) out.params[m] += ev.residues[m] / denominators[m];
  }
  return out;
}

}  // namespace pqe
