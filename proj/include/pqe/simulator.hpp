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
 * Exact statevector simulation of disentangled UCC circuits.
 *
 * Basis-state labels put qubit 0 in the most significant position, so qubit q
 * lives at bit (n - 1 - q) of an amplitude index. A qubit in |1> is an occupied
 * spin orbital (Z eigenvalue -1).
 */

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pqe/excitation.hpp"
#include "pqe/operator_algebra.hpp"
#include "pqe/pauli.hpp"

namespace pqe {

inline constexpr double kNormTolerance = 1e-10;

/// Maps a qubit-indexed mask (bit q = qubit q) to amplitude-index bit order.
inline std::uint64_t to_basis_mask(std::uint64_t qubit_mask, int n_qubits) {
  std::uint64_t out = 0;
  for (int q = 0; q < n_qubits; ++q) {
    if ((qubit_mask >> q) & 1U) out |= std::uint64_t{1} << (n_qubits - 1 - q);
  }
  return out;
}

inline std::uint64_t qubit_bit(int q, int n_qubits) {
  return std::uint64_t{1} << (n_qubits - 1 - q);
}

inline double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

/// conj(a) * b without the library's NaN recovery path; hot loops only.
inline cplx conj_mul(cplx a, cplx b) {
  return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n_qubits)
      : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, cplx{}) {
    if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("StateVector: qubit count");
  }
  StateVector(int n_qubits, std::vector<cplx> amps) : n_qubits_(n_qubits), amps_(std::move(amps)) {
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
      throw std::invalid_argument("StateVector: amplitude count must be 2^n");
    }
  }

  static StateVector basis(int n_qubits, std::uint64_t index, cplx amp = 1.0) {
    StateVector s(n_qubits);
    s.amps_.at(index) = amp;
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  cplx operator[](std::size_t k) const { return amps_[k]; }
  cplx& operator[](std::size_t k) { return amps_[k]; }

  double norm() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  /// <this|other>
  cplx inner(const StateVector& other) const {
    check_same(other);
    cplx s{};
    for (std::size_t k = 0; k < amps_.size(); ++k) s += std::conj(amps_[k]) * other.amps_[k];
    return s;
  }

  StateVector& operator+=(const StateVector& o) {
    check_same(o);
    for (std::size_t k = 0; k < amps_.size(); ++k) amps_[k] += o.amps_[k];
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    check_same(o);
    for (std::size_t k = 0; k < amps_.size(); ++k) amps_[k] -= o.amps_[k];
    return *this;
  }
  StateVector& operator*=(cplx s) {
    for (cplx& a : amps_) a *= s;
    return *this;
  }

  /// In place: this <- P this for a single Pauli string.
  void apply_pauli(const PauliString& p) {
    check_width(p.n_qubits());
    const std::uint64_t x = to_basis_mask(p.x_mask(), n_qubits_);
    const std::uint64_t z = to_basis_mask(p.z_mask(), n_qubits_);
    const cplx pref = i_pow(p.y_count());
    for (std::uint64_t b = 0; b < amps_.size(); ++b) {
      const std::uint64_t b2 = b ^ x;
      if (b2 < b) continue;
      const cplx v = amps_[b];
      amps_[b] = pref * parity_sign(z & b2) * amps_[b2];
      if (b2 != b) amps_[b2] = pref * parity_sign(z & b) * v;
    }
  }

 private:
  void check_same(const StateVector& o) const {
    if (o.n_qubits_ != n_qubits_) throw std::invalid_argument("StateVector: qubit count mismatch");
  }
  void check_width(int n) const {
    if (n != n_qubits_) throw std::invalid_argument("StateVector: operator width mismatch");
  }

  int n_qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Returns op|psi> for an arbitrary (not necessarily unitary) Pauli sum.
inline StateVector apply_operator(const PauliSum& op, const StateVector& psi) {
  if (!op.empty() && op.n_qubits() != psi.n_qubits()) {
    throw std::invalid_argument("apply_operator: width mismatch");
  }
  const int n = psi.n_qubits();
  StateVector out(n);
  for (const auto& [p, c] : op.terms()) {
    const std::uint64_t x = to_basis_mask(p.x_mask(), n);
    const std::uint64_t z = to_basis_mask(p.z_mask(), n);
    const cplx pref = c * i_pow(p.y_count());
    for (std::uint64_t b = 0; b < psi.dim(); ++b) out[b ^ x] += pref * parity_sign(z & b) * psi[b];
  }
  return out;
}

/// A Hermitian Pauli sum prepared for repeated application: terms grouped by
/// their X mask, each group reduced to a per-basis-state coefficient table.
class CompiledObservable {
 public:
  CompiledObservable() = default;
  explicit CompiledObservable(const PauliSum& obs, int n_qubits) : n_qubits_(n_qubits) {
    if (!obs.empty() && obs.n_qubits() != n_qubits) {
      throw std::invalid_argument("CompiledObservable: width mismatch");
    }
    if (!obs.is_hermitian()) throw std::invalid_argument("observable is not Hermitian");
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, cplx>>> groups;
    for (const auto& [p, c] : obs.terms()) {
      groups[to_basis_mask(p.x_mask(), n_qubits)].emplace_back(to_basis_mask(p.z_mask(), n_qubits),
                                                               c * i_pow(p.y_count()));
    }
    for (const auto& [x, zs] : groups) {
      std::vector<cplx> table(dim);
      for (std::uint64_t b = 0; b < dim; ++b) {
        cplx v{};
        for (const auto& [z, c] : zs) v += c * parity_sign(z & b);
        table[b] = v;
      }
      groups_.push_back({x, std::move(table)});
    }
  }

  int n_qubits() const { return n_qubits_; }

  StateVector apply(const StateVector& psi) const {
    StateVector out(n_qubits_);
    for (const auto& g : groups_) {
      for (std::uint64_t b = 0; b < psi.dim(); ++b) out[b ^ g.x] += g.table[b] * psi[b];
    }
    return out;
  }

  /// <psi|O|psi>; the imaginary part is discarded after a Hermiticity check.
  double expectation(const StateVector& psi) const {
    double s = 0.0;
    for (const auto& g : groups_) {
      for (std::uint64_t b = 0; b < psi.dim(); ++b) {
        const cplx t = conj_mul(psi[b ^ g.x], psi[b]);
        s += g.table[b].real() * t.real() - g.table[b].imag() * t.imag();
      }
    }
    return s;
  }

 private:
  struct Group {
    std::uint64_t x;
    std::vector<cplx> table;
  };
  int n_qubits_ = 0;
  std::vector<Group> groups_;
};

/// <psi|obs|psi> for a Hermitian observable; throws std::invalid_argument otherwise.
inline double expectation(const StateVector& psi, const PauliSum& obs) {
  return CompiledObservable(obs, psi.n_qubits()).expectation(psi);
}

/// Computational basis state with qubits in `occupation` set to |1>.
inline StateVector reference_state(const std::vector<int>& occupation, int n_qubits) {
  std::uint64_t idx = 0;
  for (int q : occupation) {
    if (q < 0 || q >= n_qubits) throw std::out_of_range("reference_state: occupation index");
    idx |= qubit_bit(q, n_qubits);
  }
  return StateVector::basis(n_qubits, idx);
}

/// Fermion term acting on one occupation bitstring (qubit-indexed). Returns
/// false when the term annihilates it; otherwise updates `occ` and `sign`.
inline bool act_on_occupation(const FermionTerm& t, std::uint64_t& occ, double& sign) {
  for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) {
    const std::uint64_t bit = std::uint64_t{1} << it->mode;
    if (it->dagger == static_cast<bool>(occ & bit)) return false;
    sign *= parity_sign(occ & (bit - 1));
    occ ^= bit;
  }
  return true;
}

/// tau|Phi_0> for the determinant `occupation`, with Jordan-Wigner signs.
/// Returns the zero vector when tau annihilates the determinant.
inline StateVector excited_determinant(const std::vector<int>& occupation, const Excitation& exc,
                                       int n_qubits) {
  std::uint64_t occ = 0;  // qubit-indexed
  for (int q : occupation) occ |= std::uint64_t{1} << q;
  double sign = 1.0;
  if (!act_on_occupation(excitation_operator(exc), occ, sign)) return StateVector(n_qubits);
  return StateVector::basis(n_qubits, to_basis_mask(occ, n_qubits), sign);
}

/// e^{theta kappa} as a set of 2x2 rotations.
///
/// kappa = tau - tau^dag links each basis state |b> that tau does not
/// annihilate to tau|b> = s|b'>, s = +-1, and annihilates everything else, so
/// on each pair e^{theta kappa}|b> = cos|b> + s sin|b'> and
/// e^{theta kappa}|b'> = cos|b'> - s sin|b>. The pairs are enumerated once
/// over the whole Fock space, so the map is exact off the particle-number
/// sector too.
class ExcitationGenerator {
 public:
  ExcitationGenerator() = default;
  ExcitationGenerator(const Excitation& exc, int n_qubits)
      : exc_(exc), n_qubits_(n_qubits), kappa_(kappa_to_pauli(exc, n_qubits)) {
    const FermionTerm tau = excitation_operator(exc);
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    for (std::uint64_t b = 0; b < dim; ++b) {
      std::uint64_t occ = to_basis_mask(b, n_qubits);  // bit reversal is its own inverse
      double sign = 1.0;
      if (!act_on_occupation(tau, occ, sign)) continue;
      pairs_.push_back({b, to_basis_mask(occ, n_qubits), sign});
    }
  }

  const Excitation& excitation() const { return exc_; }
  const PauliSum& kappa() const { return kappa_; }
  int n_qubits() const { return n_qubits_; }

  void apply(StateVector& psi, double theta) const {
    if (psi.n_qubits() != n_qubits_) throw std::invalid_argument("ExcitationGenerator: width mismatch");
    if (theta == 0.0) return;
    const double c = std::cos(theta), sn = std::sin(theta);
    for (const auto& p : pairs_) {
      const cplx v = psi[p.from], w = psi[p.to];
      psi[p.from] = c * v - p.sign * sn * w;
      psi[p.to] = c * w + p.sign * sn * v;
    }
  }

 private:
  struct Pair {
    std::uint64_t from;
    std::uint64_t to;
    double sign;
  };
  Excitation exc_;
  int n_qubits_ = 0;
  PauliSum kappa_;
  std::vector<Pair> pairs_;
};

inline StateVector apply_excitation_exponential(StateVector psi, const Excitation& exc, double theta) {
  ExcitationGenerator(exc, psi.n_qubits()).apply(psi, theta);
  return psi;
}

/// Ordered product of excitation exponentials acting on a reference determinant.
///
/// `ops()[0]` is the leftmost factor of the product, so it acts last:
/// U = e^{t_0 k_0} e^{t_1 k_1} ... e^{t_{n-1} k_{n-1}}, applied right to left.
class OrderedAnsatz {
 public:
  OrderedAnsatz() = default;
  OrderedAnsatz(int n_qubits, std::vector<int> reference, const std::vector<Excitation>& ops)
      : n_qubits_(n_qubits), reference_(std::move(reference)) {
    for (const auto& e : ops) generators_.push_back(std::make_shared<const ExcitationGenerator>(e, n_qubits));
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<int>& reference() const { return reference_; }
  std::size_t size() const { return generators_.size(); }
  bool empty() const { return generators_.empty(); }
  const Excitation& op(std::size_t k) const { return generators_.at(k)->excitation(); }
  const ExcitationGenerator& generator(std::size_t k) const { return *generators_.at(k); }
  std::shared_ptr<const ExcitationGenerator> shared_generator(std::size_t k) const {
    return generators_.at(k);
  }
  std::vector<Excitation> ops() const {
    std::vector<Excitation> out;
    for (const auto& g : generators_) out.push_back(g->excitation());
    return out;
  }

  /// psi <- U(params) psi
  void apply(StateVector& psi, std::span<const double> params) const {
    if (params.size() != generators_.size()) {
      throw std::invalid_argument("OrderedAnsatz: parameter count does not match operator count");
    }
    for (std::size_t k = generators_.size(); k-- > 0;) generators_[k]->apply(psi, params[k]);
  }

  /// psi <- U(params)^dagger psi
  void apply_adjoint(StateVector& psi, std::span<const double> params) const {
    if (params.size() != generators_.size()) {
      throw std::invalid_argument("OrderedAnsatz: parameter count does not match operator count");
    }
    for (std::size_t k = 0; k < generators_.size(); ++k) generators_[k]->apply(psi, -params[k]);
  }

  StateVector reference_state() const { return pqe::reference_state(reference_, n_qubits_); }

  /// tau_mu |Phi_0> on this ansatz's reference.
  StateVector determinant(const Excitation& exc) const {
    return excited_determinant(reference_, exc, n_qubits_);
  }

 private:
  int n_qubits_ = 0;
  std::vector<int> reference_;
  std::vector<std::shared_ptr<const ExcitationGenerator>> generators_;
};

inline StateVector build_ansatz_state(const OrderedAnsatz& ansatz, std::span<const double> params,
                                      StateVector ref) {
  ansatz.apply(ref, params);
  return ref;
}

inline StateVector build_ansatz_state(const OrderedAnsatz& ansatz, std::span<const double> params) {
  return build_ansatz_state(ansatz, params, ansatz.reference_state());
}

/// e^{angle kappa_mu}|Phi_0>.
inline StateVector omega_state(const OrderedAnsatz& ansatz, const Excitation& exc, double angle) {
  StateVector s = ansatz.reference_state();
  ExcitationGenerator(exc, ansatz.n_qubits()).apply(s, angle);
  return s;
}

}  // namespace pqe
