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
 * Second-quantized Hamiltonian input: FCIDUMP reading/writing, the spin-orbital
 * lift, a built-in open Hubbard chain, Fock diagonals and MP2 denominators.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pqe/excitation.hpp"

namespace pqe {

class FcidumpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an orbital-energy denominator is too close to zero to divide by.
class DegenerateDenominator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDegenerateDenominator = 1e-8;
inline constexpr double kCanonicalFockTolerance = 1e-6;

/// Spatial-orbital integrals in chemist notation, (pq|rs) with 8-fold symmetry.
class MolecularIntegrals {
 public:
  MolecularIntegrals() = default;
  MolecularIntegrals(int norb, int nelec, int ms2 = 0)
      : norb_(norb), nelec_(nelec), ms2_(ms2) {
    if (norb < 1) throw std::invalid_argument("MolecularIntegrals: norb must be >= 1");
    if (nelec < 0 || nelec > 2 * norb) {
      throw std::invalid_argument("MolecularIntegrals: nelec outside [0, 2*norb]");
    }
    h1_.assign(static_cast<std::size_t>(norb) * norb, 0.0);
    g2_.assign(static_cast<std::size_t>(norb) * norb * norb * norb, 0.0);
  }

  int norb() const { return norb_; }
  int nelec() const { return nelec_; }
  int ms2() const { return ms2_; }
  double core_energy() const { return core_; }
  void set_core_energy(double e) { core_ = e; }

  double h1(int p, int q) const { return h1_[idx2(p, q)]; }
  double g2(int p, int q, int r, int s) const { return g2_[idx4(p, q, r, s)]; }

  void set_h1(int p, int q, double v) {
    h1_[idx2(p, q)] = v;
    h1_[idx2(q, p)] = v;
  }

  /// Writes v into all eight permutation-equivalent slots of (pq|rs).
  void set_g2(int p, int q, int r, int s, double v) {
    for (auto [a, b, c, d] : permutations(p, q, r, s)) g2_[idx4(a, b, c, d)] = v;
  }

  static std::array<std::array<int, 4>, 8> permutations(int p, int q, int r, int s) {
    return {{{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
             {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}}};
  }

 private:
  std::size_t idx2(int p, int q) const {
    check(p);
    check(q);
    return static_cast<std::size_t>(p) * norb_ + q;
  }
  std::size_t idx4(int p, int q, int r, int s) const {
    check(p);
    check(q);
    check(r);
    check(s);
    const std::size_t n = norb_;
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }
  void check(int p) const {
    if (p < 0 || p >= norb_) throw std::out_of_range("MolecularIntegrals: orbital index");
  }

  int norb_ = 0;
  int nelec_ = 0;
  int ms2_ = 0;
  double core_ = 0.0;
  std::vector<double> h1_;
  std::vector<double> g2_;
};

namespace detail {

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Parses "KEY=v1,v2,...,KEY2=..." into KEY -> values.
inline std::map<std::string, std::vector<std::string>> parse_namelist(const std::string& body) {
  std::map<std::string, std::vector<std::string>> out;
  std::string token;
  std::vector<std::string> tokens;
  for (char c : body) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) tokens.push_back(token);
      token.clear();
    } else if (c == '=') {
      if (!token.empty()) tokens.push_back(token);
      tokens.emplace_back("=");
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) tokens.push_back(token);

  std::string key;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k + 1 < tokens.size() && tokens[k + 1] == "=") {
      key = upper(tokens[k]);
      if (out.count(key)) throw FcidumpError("FCIDUMP: duplicate namelist key " + key);
      out[key];
      ++k;
    } else if (tokens[k] == "=") {
      throw FcidumpError("FCIDUMP: malformed namelist near '='");
    } else {
      if (key.empty()) throw FcidumpError("FCIDUMP: value without key in namelist");
      out[key].push_back(tokens[k]);
    }
  }
  return out;
}

inline int namelist_int(const std::map<std::string, std::vector<std::string>>& nl,
                        const std::string& key, std::optional<int> fallback = std::nullopt) {
  auto it = nl.find(key);
  if (it == nl.end()) {
    if (fallback) return *fallback;
    throw FcidumpError("FCIDUMP: namelist missing " + key);
  }
  if (it->second.size() != 1) throw FcidumpError("FCIDUMP: " + key + " must be a scalar");
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second[0], &used);
    if (used != it->second[0].size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw FcidumpError("FCIDUMP: " + key + " is not an integer");
  }
}

}  // namespace detail

/// Reads an FCIDUMP document. ORBSYM/ISYM are accepted and ignored.
inline MolecularIntegrals parse_fcidump(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string up = detail::upper(text);

  const auto start = up.find("&FCI");
  if (start == std::string::npos) throw FcidumpError("FCIDUMP: missing &FCI namelist");
  const auto body_begin = start + 4;
  const auto end_amp = up.find("&END", body_begin);
  const auto end_slash = up.find('/', body_begin);
  const auto end = std::min(end_amp, end_slash);
  if (end == std::string::npos) throw FcidumpError("FCIDUMP: unterminated namelist");
  const auto body_end = end + (end == end_amp ? 4 : 1);

  const auto nl = detail::parse_namelist(text.substr(body_begin, end - body_begin));
  const int norb = detail::namelist_int(nl, "NORB");
  const int nelec = detail::namelist_int(nl, "NELEC");
  const int ms2 = detail::namelist_int(nl, "MS2", 0);
  if (norb < 1) throw FcidumpError("FCIDUMP: NORB must be >= 1");
  if (nelec < 0 || nelec > 2 * norb) throw FcidumpError("FCIDUMP: NELEC outside [0, 2*NORB]");

  MolecularIntegrals mi(norb, nelec, ms2);
  // canonical index -> value, for conflicting-duplicate detection
  std::map<std::array<int, 4>, double> seen;
  auto record = [&](std::array<int, 4> key, double v, int line_no) {
    auto [it, inserted] = seen.emplace(key, v);
    if (!inserted && std::abs(it->second - v) > 1e-12) {
      throw FcidumpError("FCIDUMP: conflicting duplicate entry at line " + std::to_string(line_no));
    }
  };

  std::istringstream lines(text.substr(body_end));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw FcidumpError("FCIDUMP: unreadable value at body line " + std::to_string(line_no));
    }
    std::array<int, 4> ix{};
    for (int& k : ix) {
      if (!(ls >> k)) throw FcidumpError("FCIDUMP: expected 4 indices at body line " + std::to_string(line_no));
    }
    for (int k : ix) {
      if (k < 0 || k > norb) {
        throw FcidumpError("FCIDUMP: index out of range [1, NORB] at body line " + std::to_string(line_no));
      }
    }
    const auto [i, j, k, l] = ix;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({0, 0, 0, 0}, v, line_no);
      mi.set_core_energy(v);
    } else if (i != 0 && j == 0 && k == 0 && l == 0) {
      // orbital energy line; not used
    } else if (i != 0 && j != 0 && k == 0 && l == 0) {
      record({0, 0, std::max(i, j), std::min(i, j)}, v, line_no);
      mi.set_h1(i - 1, j - 1, v);
    } else if (i != 0 && j != 0 && k != 0 && l != 0) {
      std::array<int, 4> key{};
      bool first = true;
      for (const auto& perm : MolecularIntegrals::permutations(i, j, k, l)) {
        if (first || perm > key) key = perm;
        first = false;
      }
      record(key, v, line_no);
      mi.set_g2(i - 1, j - 1, k - 1, l - 1, v);
    } else {
      throw FcidumpError("FCIDUMP: index pattern not recognised at body line " + std::to_string(line_no));
    }
  }
  return mi;
}

inline MolecularIntegrals parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

inline MolecularIntegrals read_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FcidumpError("FCIDUMP: cannot open " + path);
  return parse_fcidump(in);
}

/// Writes every stored value with round-trip precision. Exact zeros are skipped.
inline void write_fcidump(std::ostream& os, const MolecularIntegrals& mi) {
  const int n = mi.norb();
  os << " &FCI NORB=" << n << ",NELEC=" << mi.nelec() << ",MS2=" << mi.ms2() << ",\n  ORBSYM=";
  for (int p = 0; p < n; ++p) os << "1,";
  os << "\n  ISYM=1,\n &END\n";
  os << std::setprecision(17);
  auto line = [&](double v, int i, int j, int k, int l) {
    os << ' ' << v << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int ij = i * (i + 1) / 2 + j;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l <= k; ++l) {
          if (k * (k + 1) / 2 + l > ij) continue;
          const double v = mi.g2(i, j, k, l);
          if (v != 0.0) line(v, i + 1, j + 1, k + 1, l + 1);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = mi.h1(i, j);
      if (v != 0.0) line(v, i + 1, j + 1, 0, 0);
    }
  }
  line(mi.core_energy(), 0, 0, 0, 0);
}

/// Spin-orbital Hamiltonian with antisymmetrized two-electron tensor <pq||rs>.
struct SpinOrbitalHamiltonian {
  int n_so = 0;
  double core_energy = 0.0;
  std::vector<double> h1_so;    // n_so x n_so
  std::vector<double> g2_anti;  // n_so^4, <pq||rs>
  std::vector<int> occupation;  // sorted occupied spin orbitals

  double h(int p, int q) const { return h1_so[static_cast<std::size_t>(p) * n_so + q]; }
  double g(int p, int q, int r, int s) const {
    const std::size_t n = n_so;
    return g2_anti[((static_cast<std::size_t>(p) * n + q) * n + r) * n + s];
  }
  bool is_occupied(int p) const {
    return std::binary_search(occupation.begin(), occupation.end(), p);
  }
  std::vector<int> virtuals() const {
    std::vector<int> v;
    for (int p = 0; p < n_so; ++p) {
      if (!is_occupied(p)) v.push_back(p);
    }
    return v;
  }
  int n_electrons() const { return static_cast<int>(occupation.size()); }
};

/// Diagonal Fock elements per spin orbital.
struct OrbitalEnergies {
  std::vector<double> eps;
  /// Largest |f_pq|, p != q. Above kCanonicalFockTolerance the reference is not canonical.
  double max_off_diagonal = 0.0;

  double operator[](int p) const { return eps.at(static_cast<std::size_t>(p)); }
  bool canonical() const { return max_off_diagonal <= kCanonicalFockTolerance; }
};

/// Lowest `nelec` interleaved spin orbitals.
inline std::vector<int> aufbau_occupation(int nelec) {
  std::vector<int> occ(static_cast<std::size_t>(nelec));
  for (int k = 0; k < nelec; ++k) occ[k] = k;
  return occ;
}

/// Lifts spatial integrals to interleaved spin orbitals (alpha = 2p, beta = 2p+1).
inline SpinOrbitalHamiltonian spatial_to_spin_orbital(const MolecularIntegrals& mi) {
  if (mi.nelec() > 2 * mi.norb()) throw std::invalid_argument("nelec exceeds 2*norb");
  SpinOrbitalHamiltonian h;
  const int n = 2 * mi.norb();
  h.n_so = n;
  h.core_energy = mi.core_energy();
  h.h1_so.assign(static_cast<std::size_t>(n) * n, 0.0);
  h.g2_anti.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  h.occupation = aufbau_occupation(mi.nelec());

  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (spin_of(p) == spin_of(q)) h.h1_so[static_cast<std::size_t>(p) * n + q] = mi.h1(p / 2, q / 2);
    }
  }
  // <pq|rs> = (pr|qs) with spin selection sigma_p = sigma_r, sigma_q = sigma_s
  auto phys = [&](int p, int q, int r, int s) {
    if (spin_of(p) != spin_of(r) || spin_of(q) != spin_of(s)) return 0.0;
    return mi.g2(p / 2, r / 2, q / 2, s / 2);
  };
  const std::size_t un = n;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          h.g2_anti[((p * un + q) * un + r) * un + s] = phys(p, q, r, s) - phys(p, q, s, r);
        }
      }
    }
  }
  return h;
}

/// E_HF = core + sum_i h_ii + 1/2 sum_ij <ij||ij>.
inline double hartree_fock_energy(const SpinOrbitalHamiltonian& h) {
  double e = h.core_energy;
  for (int i : h.occupation) e += h.h(i, i);
  double two = 0.0;
  for (int i : h.occupation) {
    for (int j : h.occupation) two += h.g(i, j, i, j);
  }
  return e + 0.5 * two;
}

/// Full Fock matrix f_pq = h_pq + sum_i <pi||qi>.
inline Eigen::MatrixXd fock_matrix(const SpinOrbitalHamiltonian& h) {
  Eigen::MatrixXd f(h.n_so, h.n_so);
  for (int p = 0; p < h.n_so; ++p) {
    for (int q = 0; q < h.n_so; ++q) {
      double v = h.h(p, q);
      for (int i : h.occupation) v += h.g(p, i, q, i);
      f(p, q) = v;
    }
  }
  return f;
}

/// Diagonal Fock elements. Prints a diagnostic to std::clog when the reference
/// is not canonical (off-diagonal Fock above 1e-6).
inline OrbitalEnergies compute_fock(const SpinOrbitalHamiltonian& h) {
  const Eigen::MatrixXd f = fock_matrix(h);
  OrbitalEnergies out;
  out.eps.resize(static_cast<std::size_t>(h.n_so));
  for (int p = 0; p < h.n_so; ++p) {
    out.eps[p] = f(p, p);
    for (int q = 0; q < h.n_so; ++q) {
      if (p != q) out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(f(p, q)));
    }
  }
  if (!out.canonical()) {
    std::clog << "pqe: warning: non-canonical reference, max |f_pq| = " << out.max_off_diagonal
              << '\n';
  }
  return out;
}

/// D = sum(eps_occ) - sum(eps_virt); negative for a gapped reference.
inline double mp2_denominator(const Excitation& exc, const OrbitalEnergies& eps) {
  double d = 0.0;
  for (int i : exc.occ) d += eps[i];
  for (int a : exc.virt) d -= eps[a];
  if (std::abs(d) < kDegenerateDenominator) {
    throw DegenerateDenominator("MP2 denominator vanishes for excitation " + exc.label());
  }
  return d;
}

inline std::vector<double> mp2_denominators(const std::vector<Excitation>& excs,
                                            const OrbitalEnergies& eps) {
  std::vector<double> d;
  d.reserve(excs.size());
  for (const auto& e : excs) d.push_back(mp2_denominator(e, eps));
  return d;
}

/// Open Hubbard chain in its restricted mean-field orbital basis.
///
/// For an even electron count the orbitals come from a closed-shell
/// self-consistent field loop, F = hop + U diag(rho_sigma), so the reference
/// determinant is canonical. Odd counts use the bare hopping eigenbasis.
inline MolecularIntegrals hubbard_chain_integrals(int sites, double t, double u, int nelec) {
  if (sites < 1) throw std::invalid_argument("hubbard: sites must be >= 1");
  if (nelec < 0 || nelec > 2 * sites) throw std::invalid_argument("hubbard: nelec outside [0, 2*sites]");
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i + 1 < sites; ++i) {
    hop(i, i + 1) = -t;
    hop(i + 1, i) = -t;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hop);
  Eigen::MatrixXd c = es.eigenvectors();
  if (u != 0.0 && nelec % 2 == 0 && nelec > 0) {
    const int n_occ = nelec / 2;
    Eigen::VectorXd rho = c.leftCols(n_occ).rowwise().squaredNorm();
    bool converged = false;
    for (int it = 0; it < 1000 && !converged; ++it) {
      es.compute(hop + u * Eigen::MatrixXd(rho.asDiagonal()));
      const Eigen::VectorXd next = es.eigenvectors().leftCols(n_occ).rowwise().squaredNorm();
      converged = (next - rho).cwiseAbs().maxCoeff() < 1e-14;
      rho = 0.5 * (rho + next);
    }
    if (!converged) throw std::runtime_error("hubbard: mean-field loop did not converge");
    c = es.eigenvectors();
  }
  // fix each column's sign: first non-negligible component positive
  for (int k = 0; k < sites; ++k) {
    for (int i = 0; i < sites; ++i) {
      if (std::abs(c(i, k)) > 1e-12) {
        if (c(i, k) < 0) c.col(k) *= -1.0;
        break;
      }
    }
  }
  MolecularIntegrals mi(sites, nelec, 0);
  const Eigen::MatrixXd h_mo = c.transpose() * hop * c;
  for (int p = 0; p < sites; ++p) {
    for (int q = 0; q < sites; ++q) mi.set_h1(p, q, std::abs(h_mo(p, q)) < 1e-15 ? 0.0 : h_mo(p, q));
  }
  for (int p = 0; p < sites; ++p) {
    for (int q = 0; q <= p; ++q) {
      for (int r = 0; r < sites; ++r) {
        for (int s = 0; s <= r; ++s) {
          double v = 0.0;
          for (int i = 0; i < sites; ++i) v += c(i, p) * c(i, q) * c(i, r) * c(i, s);
          mi.set_g2(p, q, r, s, u * v);
        }
      }
    }
  }
  return mi;
}

inline std::pair<SpinOrbitalHamiltonian, OrbitalEnergies> build_hubbard_chain(int sites, double t,
                                                                             double u, int nelec) {
  SpinOrbitalHamiltonian h = spatial_to_spin_orbital(hubbard_chain_integrals(sites, t, u, nelec));
  OrbitalEnergies eps = compute_fock(h);
  return {std::move(h), std::move(eps)};
}

}  // namespace pqe
