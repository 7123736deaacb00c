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
#include <compare>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqe {

/// Spin orbitals are interleaved: 2p is alpha, 2p+1 is beta of spatial orbital p.
inline int spin_of(int so) { return so & 1; }

/// Particle-hole excitation tau = a+_a a+_b ... a_j a_i.
///
/// `occ` holds the annihilated (occupied) spin orbitals, `virt` the created
/// ones; both strictly increasing.
struct Excitation {
  std::vector<int> occ;
  std::vector<int> virt;

  int rank() const { return static_cast<int>(occ.size()); }
  bool is_single() const { return rank() == 1; }
  bool is_double() const { return rank() == 2; }

  /// Every spin orbital touched, sorted.
  std::vector<int> qubits() const {
    std::vector<int> q = occ;
    q.insert(q.end(), virt.begin(), virt.end());
    std::sort(q.begin(), q.end());
    return q;
  }

  std::string label() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < occ.size(); ++k) os << (k ? "," : "") << occ[k];
    os << "->";
    for (std::size_t k = 0; k < virt.size(); ++k) os << (k ? "," : "") << virt[k];
    return os.str();
  }

  /// Pool order: rank first, then lexicographic over (occ, virt).
  friend auto operator<=>(const Excitation& a, const Excitation& b) {
    if (auto c = a.rank() <=> b.rank(); c != 0) return c;
    if (auto c = a.occ <=> b.occ; c != 0) return c;
    return a.virt <=> b.virt;
  }
  friend bool operator==(const Excitation&, const Excitation&) = default;
};

/// Throws std::invalid_argument unless `e` is a well-formed, Sz-conserving
/// excitation on `n_so` spin orbitals.
inline void validate(const Excitation& e, int n_so) {
  if (e.occ.empty() || e.occ.size() != e.virt.size()) {
    throw std::invalid_argument("Excitation: occ/virt lists must be non-empty and equal length");
  }
  auto strictly_increasing = [](const std::vector<int>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!strictly_increasing(e.occ) || !strictly_increasing(e.virt)) {
    throw std::invalid_argument("Excitation: index lists must be strictly increasing");
  }
  int sz = 0;
  for (int i : e.occ) {
    if (i < 0 || i >= n_so) throw std::out_of_range("Excitation: index out of range");
    if (std::find(e.virt.begin(), e.virt.end(), i) != e.virt.end()) {
      throw std::invalid_argument("Excitation: occ and virt overlap");
    }
    sz -= spin_of(i) ? -1 : 1;
  }
  for (int a : e.virt) {
    if (a < 0 || a >= n_so) throw std::out_of_range("Excitation: index out of range");
    sz += spin_of(a) ? -1 : 1;
  }
  if (sz != 0) throw std::invalid_argument("Excitation: does not conserve Sz");
}

}  // namespace pqe
