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
 * Depolarizing noise on excitation-block circuits.
 *
 * Circuits are never compiled to gates. Each excitation exponential is one
 * block that owns a number of two-qubit and single-qubit fault locations taken
 * from the gate encoding. After the block acts, every location independently
 * fires with its depolarizing probability and inserts a uniformly random
 * non-identity Pauli on qubits the block touches. Reference preparation is
 * noiseless.
 *
 * A depolarizing probability p on d-dimensional support means
 * rho -> (1 - p) rho + p I/d, so a Pauli error is inserted with probability
 * p (d^2 - 1)/d^2.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pqe/adpqe.hpp"
#include "pqe/pqe.hpp"
#include "pqe/simulator.hpp"

namespace pqe {

struct NoiseModel {
  double p1 = 1e-3;
  double p2 = 1e-2;
  int shots = 5000;         // per Pauli term; 0 = no sampling noise
  int trajectories = 128;   // faulty-branch samples per expectation

  void validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
      throw std::invalid_argument("NoiseModel: probabilities must lie in [0, 1]");
    }
    if (shots < 0) throw std::invalid_argument("NoiseModel: shots must be >= 0");
    if (trajectories < 1) throw std::invalid_argument("NoiseModel: trajectories must be >= 1");
  }
  bool noiseless() const { return p1 == 0.0 && p2 == 0.0; }
  /// Same model with both probabilities multiplied by s.
  NoiseModel scaled(double s) const {
    NoiseModel m = *this;
    m.p1 = std::min(1.0, p1 * s);
    m.p2 = std::min(1.0, p2 * s);
    return m;
  }
};

/// Gate cost of one excitation exponential.
struct GateEncoding {
  int cnot_single = 2;
  int cnot_double = 13;
  int oneq_single = 4;
  int oneq_double = 18;

  int cnots(const Excitation& e) const { return e.is_single() ? cnot_single : cnot_double; }
  int oneq(const Excitation& e) const { return e.is_single() ? oneq_single : oneq_double; }
};

struct GateCounts {
  std::size_t n_singles = 0;
  std::size_t n_doubles = 0;
  long long n_cnot = 0;
  long long n_single_qubit = 0;

  long long locations() const { return n_cnot + n_single_qubit; }
};

inline GateCounts count_gates(const std::vector<Excitation>& ops, const GateEncoding& enc = {}) {
  GateCounts c;
  for (const auto& e : ops) {
    (e.is_single() ? c.n_singles : c.n_doubles) += 1;
    c.n_cnot += enc.cnots(e);
    c.n_single_qubit += enc.oneq(e);
  }
  return c;
}

inline GateCounts count_gates(const OrderedAnsatz& a, const GateEncoding& enc = {}) {
  return count_gates(a.ops(), enc);
}

/// Principal circuit only; the auxiliaries never run on hardware.
inline GateCounts count_gates(const PartitionPlan& plan, const GateEncoding& enc = {}) {
  return count_gates(plan.principal_ops(), enc);
}

struct FaultReport {
  double fault_rate = 0.0;             // expected faults per run
  double fault_free_product = 1.0;     // prod_l (1 - p_l)
  double fault_free_exponential = 1.0; // exp(-fault_rate)
};

/// `scale` multiplies every location count, as global folding does.
inline FaultReport fault_report(const GateCounts& c, const NoiseModel& nm, double scale = 1.0) {
  nm.validate();
  const double n2 = scale * static_cast<double>(c.n_cnot);
  const double n1 = scale * static_cast<double>(c.n_single_qubit);
  FaultReport r;
  r.fault_rate = n2 * nm.p2 + n1 * nm.p1;
  r.fault_free_product = std::pow(1.0 - nm.p2, n2) * std::pow(1.0 - nm.p1, n1);
  r.fault_free_exponential = std::exp(-r.fault_rate);
  return r;
}

/// One noisy slot. A null generator is an idle slot that only carries faults.
struct NoisyBlock {
  std::shared_ptr<const ExcitationGenerator> gen;
  double angle = 0.0;
  std::vector<int> qubits;
  int n_2q = 0;
  int n_1q = 0;
};

/// Blocks listed in application order, acting on a noiseless initial state.
struct NoisyCircuit {
  StateVector initial;
  std::vector<NoisyBlock> blocks;

  int n_qubits() const { return initial.n_qubits(); }
  long long locations() const {
    long long s = 0;
    for (const auto& b : blocks) s += b.n_2q + b.n_1q;
    return s;
  }
};

inline std::vector<int> touched_qubits(const Excitation& e) {
  std::vector<int> q = e.occ;
  q.insert(q.end(), e.virt.begin(), e.virt.end());
  std::sort(q.begin(), q.end());
  return q;
}

inline NoisyBlock make_block(std::shared_ptr<const ExcitationGenerator> g, double angle, const GateEncoding& enc) {
  const Excitation& e = g->excitation();
  return {std::move(g), angle, touched_qubits(e), enc.cnots(e), enc.oneq(e)};
}

/// U(params) applied to `initial`. A non-null `prefix` acts first, e.g. the
/// e^{pi/4 kappa_mu} rotation of a measurement-mode residue circuit.
inline NoisyCircuit ansatz_circuit(const OrderedAnsatz& a, std::span<const double> params, StateVector initial,
                                   const GateEncoding& enc = {}, const Excitation* prefix = nullptr,
                                   double prefix_angle = 0.0) {
  if (params.size() != a.size()) throw std::invalid_argument("ansatz_circuit: parameter count");
  NoisyCircuit c{std::move(initial), {}};
  if (prefix) {
    c.blocks.push_back(make_block(std::make_shared<const ExcitationGenerator>(*prefix, a.n_qubits()),
                                  prefix_angle, enc));
  }
  for (std::size_t k = a.size(); k-- > 0;) c.blocks.push_back(make_block(a.shared_generator(k), params[k], enc));
  return c;
}

/// One entry of an executed (possibly folded) block sequence.
struct BlockStep {
  std::size_t block = 0;
  bool inverse = false;
};

inline std::vector<BlockStep> unfolded_sequence(const NoisyCircuit& c) {
  std::vector<BlockStep> s;
  for (std::size_t k = 0; k < c.blocks.size(); ++k) s.push_back({k, false});
  return s;
}

/// Noise-scaled block sequence: U (U^dag U)^n globally, then round(frac m)
/// randomly chosen blocks folded locally as B B^dag B. c = 1 draws nothing.
inline std::vector<BlockStep> folded_sequence(const NoisyCircuit& c, double scale, std::mt19937_64& rng) {
  if (!(scale >= 1.0)) throw std::invalid_argument("folding scale must be >= 1");
  const std::size_t m = c.blocks.size();
  const double half = (scale - 1.0) / 2.0;
  const auto n_full = static_cast<std::size_t>(std::floor(half + 1e-12));
  const double frac = std::max(0.0, half - static_cast<double>(n_full));
  const auto n_local = std::min(m, static_cast<std::size_t>(std::lround(frac * static_cast<double>(m))));

  std::vector<char> local(m, 0);
  if (n_local > 0) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < n_local; ++k) local[idx[k]] = 1;
  }
  std::vector<BlockStep> s;
  for (std::size_t k = 0; k < m; ++k) {
    s.push_back({k, false});
    if (local[k]) {
      s.push_back({k, true});
      s.push_back({k, false});
    }
  }
  const std::vector<BlockStep> base = s;
  for (std::size_t r = 0; r < n_full; ++r) {
    for (auto it = base.rbegin(); it != base.rend(); ++it) s.push_back({it->block, !it->inverse});
    s.insert(s.end(), base.begin(), base.end());
  }
  return s;
}

inline long long sequence_locations(const NoisyCircuit& c, const std::vector<BlockStep>& seq) {
  long long s = 0;
  for (const auto& st : seq) s += c.blocks[st.block].n_2q + c.blocks[st.block].n_1q;
  return s;
}

namespace detail {

inline void apply_step(const NoisyCircuit& c, const BlockStep& st, StateVector& psi) {
  const NoisyBlock& b = c.blocks[st.block];
  if (b.gen) b.gen->apply(psi, st.inverse ? -b.angle : b.angle);
}

struct Fault {
  std::size_t step;
  PauliString pauli;
};

/// Pauli-error insertion probabilities for one- and two-qubit locations.
struct ErrorRates {
  double q1 = 0.0;
  double q2 = 0.0;
  explicit ErrorRates(const NoiseModel& nm) : q1(nm.p1 * 3.0 / 4.0), q2(nm.p2 * 15.0 / 16.0) {}
  double clean(const NoisyBlock& b) const { return std::pow(1.0 - q2, b.n_2q) * std::pow(1.0 - q1, b.n_1q); }
};

/// Faults of one block execution, conditioned on at least one firing.
inline void sample_block_faults(const NoisyBlock& b, std::size_t step, int n, const ErrorRates& r,
                                std::mt19937_64& rng, std::vector<Fault>& out) {
  std::binomial_distribution<int> k2_dist(b.n_2q, r.q2), k1_dist(b.n_1q, r.q1);
  int k2 = 0, k1 = 0;
  do {
    k2 = k2_dist(rng);
    k1 = k1_dist(rng);
  } while (k1 + k2 == 0);
  auto letter = [](std::uint64_t& x, std::uint64_t& z, int q, unsigned code) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (code & 1U) x |= bit;
    if (code & 2U) z |= bit;
  };
  const auto nq = static_cast<int>(b.qubits.size());
  for (int k = 0; k < k2; ++k) {
    std::uint64_t x = 0, z = 0;
    if (nq >= 2) {
      const int i = std::uniform_int_distribution<int>(0, nq - 1)(rng);
      int j = std::uniform_int_distribution<int>(0, nq - 2)(rng);
      if (j >= i) ++j;
      const auto code = static_cast<unsigned>(std::uniform_int_distribution<int>(1, 15)(rng));
      letter(x, z, b.qubits[i], code & 3U);
      letter(x, z, b.qubits[j], code >> 2);
    } else {
      letter(x, z, b.qubits[0], static_cast<unsigned>(std::uniform_int_distribution<int>(1, 3)(rng)));
    }
    out.push_back({step, PauliString(n, x, z)});
  }
  for (int k = 0; k < k1; ++k) {
    std::uint64_t x = 0, z = 0;
    const int i = std::uniform_int_distribution<int>(0, nq - 1)(rng);
    letter(x, z, b.qubits[i], static_cast<unsigned>(std::uniform_int_distribution<int>(1, 3)(rng)));
    out.push_back({step, PauliString(n, x, z)});
  }
}

/// Faults for steps [first, end), in step order. Each step is clean with
/// probability prod (1 - q) over its locations; otherwise its fault counts are
/// drawn conditioned on being nonzero.
inline void sample_tail(const NoisyCircuit& c, const std::vector<BlockStep>& seq, const std::vector<double>& clean,
                        const ErrorRates& r, std::size_t first, std::mt19937_64& rng, std::vector<Fault>& out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = first; s < seq.size(); ++s) {
    if (u(rng) < clean[s]) continue;
    sample_block_faults(c.blocks[seq[s].block], s, c.n_qubits(), r, rng, out);
  }
}

/// Pauli terms of an observable grouped by X mask, for per-term expectation
/// values accumulated over many states.
struct TermTable {
  struct Term {
    std::uint64_t z;
    cplx pref;
    double coeff;
  };
  struct Group {
    std::uint64_t x;
    std::vector<Term> terms;
  };
  double constant = 0.0;
  std::vector<Group> groups;
  std::size_t dim = 0;

  TermTable(const PauliSum& obs, int n) : dim(std::size_t{1} << n) {
    std::map<std::uint64_t, std::vector<Term>> g;
    for (const auto& [p, c] : obs.terms()) {
      if (p.is_identity()) {
        constant += c.real();
        continue;
      }
      g[to_basis_mask(p.x_mask(), n)].push_back({to_basis_mask(p.z_mask(), n), i_pow(p.y_count()), c.real()});
    }
    for (auto& [x, t] : g) groups.push_back({x, std::move(t)});
  }

  using Accumulator = std::vector<std::vector<cplx>>;
  Accumulator zero() const { return Accumulator(groups.size(), std::vector<cplx>(dim)); }

  /// acc_g[b] += w conj(psi[b ^ x_g]) psi[b]
  void accumulate(const StateVector& psi, double w, Accumulator& acc) const {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::uint64_t x = groups[g].x;
      std::vector<cplx>& a = acc[g];
      for (std::uint64_t b = 0; b < dim; ++b) {
        const cplx t = conj_mul(psi[b ^ x], psi[b]);
        a[b] = {a[b].real() + w * t.real(), a[b].imag() + w * t.imag()};
      }
    }
  }

  /// Per-term expectation values (group order) from an accumulator.
  std::vector<double> term_values(const Accumulator& acc) const {
    std::vector<double> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (const auto& t : groups[g].terms) {
        cplx s{};
        for (std::uint64_t b = 0; b < dim; ++b) s += parity_sign(t.z & b) * acc[g][b];
        out.push_back((t.pref * s).real());
      }
    }
    return out;
  }

  std::vector<double> coefficients() const {
    std::vector<double> out;
    for (const auto& g : groups)
      for (const auto& t : g.terms) out.push_back(t.coeff);
    return out;
  }
};

}  // namespace detail

/// Estimate of <obs> on the noisy execution of `seq`.
///
/// The fault-free branch, with probability P0 = prod_l (1 - q_l), is taken
/// exactly. `trajectories` samples are drawn conditioned on at least one fault
/// and averaged into the other 1 - P0 of the weight. With shots = 0 that mixture
/// is returned; otherwise each Pauli term gets a binomial draw of `shots` +-1
/// outcomes at the mixture's mean. Noiseless prefix states are cached, so a
/// trajectory is simulated from its first fault on.
inline double noisy_sequence_expectation(const NoisyCircuit& c, const std::vector<BlockStep>& seq,
                                         const PauliSum& obs, const CompiledObservable& compiled,
                                         const NoiseModel& nm, std::mt19937_64& rng) {
  nm.validate();
  std::vector<StateVector> prefix;  // prefix[s] = state after steps [0, s)
  prefix.reserve(seq.size() + 1);
  prefix.push_back(c.initial);
  for (const auto& st : seq) {
    StateVector next = prefix.back();
    detail::apply_step(c, st, next);
    prefix.push_back(std::move(next));
  }

  // first-fault distribution over steps
  const detail::ErrorRates rates(nm);
  std::vector<double> clean(seq.size()), first(seq.size());
  double p0 = 1.0;
  for (std::size_t s = 0; s < seq.size(); ++s) {
    clean[s] = rates.clean(c.blocks[seq[s].block]);
    first[s] = p0 * (1.0 - clean[s]);
    p0 *= clean[s];
  }
  const int traj = p0 < 1.0 ? nm.trajectories : 0;

  std::unique_ptr<detail::TermTable> table;
  detail::TermTable::Accumulator acc;
  if (nm.shots > 0) {
    table = std::make_unique<detail::TermTable>(obs, c.n_qubits());
    acc = table->zero();
    table->accumulate(prefix.back(), p0, acc);
  }
  double exact = p0 * compiled.expectation(prefix.back());

  std::discrete_distribution<std::size_t> pick_first(first.begin(), first.end());
  for (int t = 0; t < traj; ++t) {
    const std::size_t s0 = pick_first(rng);
    std::vector<detail::Fault> faults;
    detail::sample_block_faults(c.blocks[seq[s0].block], s0, c.n_qubits(), rates, rng, faults);
    detail::sample_tail(c, seq, clean, rates, s0 + 1, rng, faults);

    StateVector psi = prefix[s0 + 1];
    std::size_t k = 0;
    for (std::size_t s = s0; s < seq.size(); ++s) {
      if (s > s0) detail::apply_step(c, seq[s], psi);
      for (; k < faults.size() && faults[k].step == s; ++k) psi.apply_pauli(faults[k].pauli);
    }
    const double w = (1.0 - p0) / traj;
    if (table) {
      table->accumulate(psi, w, acc);
    } else {
      exact += w * compiled.expectation(psi);
    }
  }
  if (!table) return exact;

  const std::vector<double> v = table->term_values(acc);
  const std::vector<double> h = table->coefficients();
  double est = table->constant;
  for (std::size_t l = 0; l < v.size(); ++l) {
    std::binomial_distribution<int> bin(nm.shots, std::clamp((1.0 + v[l]) / 2.0, 0.0, 1.0));
    est += h[l] * (2.0 * bin(rng) / nm.shots - 1.0);
  }
  return est;
}

/// Unfolded noisy expectation.
inline double noisy_expectation(const NoisyCircuit& c, const PauliSum& obs, const NoiseModel& nm,
                                std::mt19937_64& rng) {
  return noisy_sequence_expectation(c, unfolded_sequence(c), obs, CompiledObservable(obs, c.n_qubits()), nm, rng);
}

/// Noisy expectation of the circuit folded to noise scale `scale`.
inline double fold_and_measure(const NoisyCircuit& c, const PauliSum& obs, const CompiledObservable& compiled,
                               const NoiseModel& nm, double scale, std::mt19937_64& rng) {
  const auto seq = folded_sequence(c, scale, rng);
  return noisy_sequence_expectation(c, seq, obs, compiled, nm, rng);
}

inline double fold_and_measure(const NoisyCircuit& c, const PauliSum& obs, const NoiseModel& nm, double scale,
                               std::mt19937_64& rng) {
  return fold_and_measure(c, obs, CompiledObservable(obs, c.n_qubits()), nm, scale, rng);
}

/// Residue measurement count bound 3 N (sum |h|)^2 / eps^2, full and principal-only.
struct MeasurementBudget {
  double full = 0.0;
  double principal = 0.0;
  double ratio = 0.0;
};

inline MeasurementBudget measurement_budget(std::size_t n_par, double h_one_norm, double epsilon, double f_pps) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("measurement_budget: epsilon must be positive");
  if (!(f_pps > 0.0 && f_pps <= 1.0)) throw std::invalid_argument("f_pps must lie in (0, 1]");
  MeasurementBudget b;
  b.full = 3.0 * static_cast<double>(n_par) * h_one_norm * h_one_norm / (epsilon * epsilon);
  b.principal = f_pps * b.full;
  b.ratio = f_pps;
  return b;
}

}  // namespace pqe
