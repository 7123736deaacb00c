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

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pqe/excitation.hpp"
#include "pqe/hamiltonian_io.hpp"
#include "pqe/pauli.hpp"

namespace pqe {

struct LadderOp {
  int mode = 0;
  bool dagger = false;
};

/// coefficient * (product of ladder operators, leftmost first).
struct FermionTerm {
  cplx coefficient{1.0, 0.0};
  std::vector<LadderOp> ops;
};

/// a+_p -> (X_p - iY_p)/2 Z_{<p};  a_p -> (X_p + iY_p)/2 Z_{<p}.
inline PauliSum ladder_operator(int n_qubits, int p, bool dagger) {
  if (p < 0 || p >= n_qubits) throw std::out_of_range("ladder_operator: mode out of range");
  const std::uint64_t below = (std::uint64_t{1} << p) - 1;
  const std::uint64_t bit = std::uint64_t{1} << p;
  PauliSum out(n_qubits);
  out.add(PauliString(n_qubits, bit, below), 0.5);
  out.add(PauliString(n_qubits, bit, below | bit), cplx{0.0, dagger ? -0.5 : 0.5});
  return out;
}

inline PauliSum jordan_wigner(const FermionTerm& term, int n_qubits) {
  PauliSum out = PauliSum::identity(n_qubits, term.coefficient);
  for (const auto& op : term.ops) out = out * ladder_operator(n_qubits, op.mode, op.dagger);
  return out.simplify();
}

/// N = sum_p a+_p a_p.
inline PauliSum number_operator(int n_qubits) {
  PauliSum out(n_qubits);
  for (int p = 0; p < n_qubits; ++p) {
    out += jordan_wigner({1.0, {{p, true}, {p, false}}}, n_qubits);
  }
  return out.simplify();
}

/// tau = a+_a a+_b ... a_j a_i for occ (i, j, ...) and virt (a, b, ...).
inline FermionTerm excitation_operator(const Excitation& exc) {
  FermionTerm t;
  for (int a : exc.virt) t.ops.push_back({a, true});
  for (auto it = exc.occ.rbegin(); it != exc.occ.rend(); ++it) t.ops.push_back({*it, false});
  return t;
}

/// kappa = tau - tau^dagger. All coefficients purely imaginary; the terms commute.
inline PauliSum kappa_to_pauli(const Excitation& exc, int n_qubits) {
  validate(exc, n_qubits);
  const PauliSum tau = jordan_wigner(excitation_operator(exc), n_qubits);
  return (tau - tau.adjoint()).simplify();
}

/// H = core + sum h_pq a+_p a_q + sum_{p<q, r<s} <pq||rs> a+_p a+_q a_s a_r.
inline PauliSum hamiltonian_to_pauli(const SpinOrbitalHamiltonian& h) {
  const int n = h.n_so;
  std::vector<PauliSum> cre, ann;
  for (int p = 0; p < n; ++p) {
    cre.push_back(ladder_operator(n, p, true));
    ann.push_back(ladder_operator(n, p, false));
  }
  PauliSum out = PauliSum::identity(n, h.core_energy);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double v = h.h(p, q);
      if (v != 0.0) out += (cre[p] * ann[q]) * cplx(v);
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const PauliSum pq = cre[p] * cre[q];
      for (int r = 0; r < n; ++r) {
        for (int s = r + 1; s < n; ++s) {
          const double v = h.g(p, q, r, s);
          if (v == 0.0) continue;
          out += (pq * (ann[s] * ann[r])) * cplx(v);
        }
      }
    }
  }
  out.simplify();
  // Hermitian input gives real coefficients; clear rounding residue in the imaginary parts.
  PauliSum real_out(n);
  for (const auto& [p, c] : out.terms()) real_out.add(p, c.real());
  return real_out.simplify();
}

/// Diagonal one-body operator sum_p eps_p a+_p a_p.
inline PauliSum diagonal_one_body(const std::vector<double>& eps) {
  const int n = static_cast<int>(eps.size());
  PauliSum out(n);
  for (int p = 0; p < n; ++p) out += jordan_wigner({eps[p], {{p, true}, {p, false}}}, n);
  return out.simplify();
}

/// All Sz-conserving singles and doubles out of the reference, in pool order
/// (rank, then lexicographic indices).
inline std::vector<Excitation> excitation_pool(const SpinOrbitalHamiltonian& h) {
  const std::vector<int> occ = h.occupation;
  const std::vector<int> virt = h.virtuals();
  std::vector<Excitation> pool;
  for (int i : occ) {
    for (int a : virt) {
      if (spin_of(i) == spin_of(a)) pool.push_back({{i}, {a}});
    }
  }
  for (std::size_t x = 0; x < occ.size(); ++x) {
    for (std::size_t y = x + 1; y < occ.size(); ++y) {
      for (std::size_t u = 0; u < virt.size(); ++u) {
        for (std::size_t w = u + 1; w < virt.size(); ++w) {
          const int i = occ[x], j = occ[y], a = virt[u], b = virt[w];
          const int removed_alpha = (spin_of(i) == 0) + (spin_of(j) == 0);
          const int added_alpha = (spin_of(a) == 0) + (spin_of(b) == 0);
          if (removed_alpha == added_alpha) pool.push_back({{i, j}, {a, b}});
        }
      }
    }
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace pqe
