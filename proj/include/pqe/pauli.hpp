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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pqe {

using cplx = std::complex<double>;

/// Coefficients with magnitude at or below this are dropped by simplify().
inline constexpr double kPauliDropThreshold = 1e-12;

/// A tensor product of single-qubit Paulis stored in symplectic form.
///
/// Bit q of `x` / `z` refers to qubit q. The represented operator is
/// i^{|x & z|} X^x Z^z, so a qubit with both bits set carries a Y.
class PauliString {
 public:
  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x, std::uint64_t z)
      : n_qubits_(n_qubits), x_(x), z_(z) {
    if (n_qubits < 0 || n_qubits > 63) {
      throw std::invalid_argument("PauliString: qubit count out of range");
    }
    const std::uint64_t mask = n_qubits == 0 ? 0 : (~std::uint64_t{0} >> (64 - n_qubits));
    if ((x & ~mask) || (z & ~mask)) {
      throw std::invalid_argument("PauliString: letter outside register");
    }
  }

  static PauliString identity(int n_qubits) { return {n_qubits, 0, 0}; }

  /// Single letter `letter` in {I,X,Y,Z} on qubit q.
  static PauliString single(int n_qubits, int q, char letter) {
    if (q < 0 || q >= n_qubits) {
      throw std::out_of_range("PauliString: qubit index out of range");
    }
    const std::uint64_t b = std::uint64_t{1} << q;
    switch (letter) {
      case 'I': return {n_qubits, 0, 0};
      case 'X': return {n_qubits, b, 0};
      case 'Y': return {n_qubits, b, b};
      case 'Z': return {n_qubits, 0, b};
      default: throw std::invalid_argument("PauliString: unknown letter");
    }
  }

  /// Parses a dense label such as "XIZY" (qubit 0 leftmost).
  static PauliString from_label(const std::string& label) {
    const int n = static_cast<int>(label.size());
    PauliString out = identity(n);
    for (int q = 0; q < n; ++q) {
      out = out.with_letter(q, label[q]);
    }
    return out;
  }

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }
  /// Number of Y letters; the i^{|x&z|} prefactor.
  int y_count() const { return std::popcount(x_ & z_); }

  char letter(int q) const {
    const bool xb = (x_ >> q) & 1U;
    const bool zb = (z_ >> q) & 1U;
    if (xb && zb) return 'Y';
    if (xb) return 'X';
    if (zb) return 'Z';
    return 'I';
  }

  PauliString with_letter(int q, char letter) const {
    const PauliString s = single(n_qubits_, q, letter);
    const std::uint64_t b = std::uint64_t{1} << q;
    return {n_qubits_, (x_ & ~b) | s.x_, (z_ & ~b) | s.z_};
  }

  std::string label() const {
    std::string s(static_cast<std::size_t>(n_qubits_), 'I');
    for (int q = 0; q < n_qubits_; ++q) s[q] = letter(q);
    return s;
  }

  bool commutes_with(const PauliString& o) const {
    return (std::popcount((x_ & o.z_) ^ (z_ & o.x_)) & 1) == 0;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) {
    if (auto c = a.n_qubits_ <=> b.n_qubits_; c != 0) return c;
    if (auto c = a.x_ <=> b.x_; c != 0) return c;
    return a.z_ <=> b.z_;
  }

 private:
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// i^k for integer k.
inline cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Product a*b = phase * c, returned as (phase exponent of i, c).
inline std::pair<int, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("multiply: qubit count mismatch");
  }
  const std::uint64_t x = a.x_mask() ^ b.x_mask();
  const std::uint64_t z = a.z_mask() ^ b.z_mask();
  // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^x Z^z
  int e = a.y_count() + b.y_count() + 2 * std::popcount(a.z_mask() & b.x_mask()) -
          std::popcount(x & z);
  e = ((e % 4) + 4) % 4;
  return {e, PauliString(a.n_qubits(), x, z)};
}

/// Weighted sum of Pauli strings over a fixed register.
class PauliSum {
 public:
  using Terms = std::map<PauliString, cplx>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}
  PauliSum(const PauliString& p, cplx c) : n_qubits_(p.n_qubits()) { add(p, c); }

  static PauliSum identity(int n_qubits, cplx c = 1.0) {
    return PauliSum(PauliString::identity(n_qubits), c);
  }

  int n_qubits() const { return n_qubits_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(const PauliString& p, cplx c) {
    check_width(p.n_qubits());
    terms_[p] += c;
  }

  cplx coefficient(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? cplx{} : it->second;
  }

  /// Drops terms with |c| <= threshold.
  PauliSum& simplify(double threshold = kPauliDropThreshold) {
    std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) <= threshold; });
    return *this;
  }

  PauliSum adjoint() const {
    PauliSum out(n_qubits_);
    for (const auto& [p, c] : terms_) out.terms_[p] = std::conj(c);
    return out;
  }

  bool is_hermitian(double tol = 1e-10) const {
    for (const auto& [p, c] : terms_) {
      if (std::abs(c.imag()) > tol) return false;
    }
    return true;
  }

  bool is_anti_hermitian(double tol = 1e-10) const {
    for (const auto& [p, c] : terms_) {
      if (std::abs(c.real()) > tol) return false;
    }
    return true;
  }

  /// Sum of |h_l| over non-identity terms. Summed in canonical key order so the
  /// result does not depend on how the sum was assembled.
  double one_norm(bool include_identity = false) const {
    double s = 0.0;
    for (const auto& [p, c] : terms_) {
      if (!include_identity && p.is_identity()) continue;
      s += std::abs(c);
    }
    return s;
  }

  PauliSum& operator+=(const PauliSum& o) {
    adopt_width(o);
    for (const auto& [p, c] : o.terms_) terms_[p] += c;
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    adopt_width(o);
    for (const auto& [p, c] : o.terms_) terms_[p] -= c;
    return *this;
  }
  PauliSum& operator*=(cplx s) {
    for (auto& kv : terms_) kv.second *= s;
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    if (a.n_qubits_ != b.n_qubits_) {
      throw std::invalid_argument("PauliSum product: qubit count mismatch");
    }
    PauliSum out(a.n_qubits_);
    for (const auto& [pa, ca] : a.terms_) {
      for (const auto& [pb, cb] : b.terms_) {
        auto [e, pc] = multiply(pa, pb);
        out.terms_[pc] += ca * cb * i_pow(e);
      }
    }
    return out;
  }

  /// True when every term has |c| <= tol.
  bool is_zero(double tol = kPauliDropThreshold) const {
    for (const auto& [p, c] : terms_) {
      if (std::abs(c) > tol) return false;
    }
    return true;
  }

 private:
  void check_width(int n) {
    if (terms_.empty() && n_qubits_ == 0) n_qubits_ = n;
    if (n != n_qubits_) throw std::invalid_argument("PauliSum: qubit count mismatch");
  }
  void adopt_width(const PauliSum& o) {
    if (o.terms_.empty()) return;
    check_width(o.n_qubits_);
  }

  int n_qubits_ = 0;
  Terms terms_;
};

inline PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  return (a * b - b * a).simplify();
}

inline PauliSum anticommutator(const PauliSum& a, const PauliSum& b) {
  return (a * b + b * a).simplify();
}

}  // namespace pqe
