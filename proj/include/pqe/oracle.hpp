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
 * Brute-force references: dense operators, particle-sector diagonalization,
 * matrix exponentials and central-difference Jacobians.
 *
 * Operators are assembled as explicit matrices from Kronecker products or
 * occupation-number rules. Only the bit-layout helpers are shared with the
 * statevector simulator.
 */

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pqe/pauli.hpp"
#include "pqe/simulator.hpp"

namespace pqe::oracle {

using DenseOperator = Eigen::MatrixXcd;

class DimensionTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline void require_qubits(int n, int limit, const char* what) {
  if (n > limit) {
    throw DimensionTooLarge(std::string(what) + ": " + std::to_string(n) + " qubits exceeds limit " +
                            std::to_string(limit));
  }
}

// Single-qubit matrices; qubit 0 is the leftmost Kronecker factor.
inline Eigen::Matrix2cd pauli_matrix(char letter) {
  Eigen::Matrix2cd m;
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix: letter");
  }
  return m;
}

/// Kronecker product of the string's letters.
inline DenseOperator pauli_string_matrix(const PauliString& p) {
  DenseOperator m = DenseOperator::Identity(1, 1);
  for (int q = 0; q < p.n_qubits(); ++q) {
    const Eigen::Matrix2cd f = pauli_matrix(p.letter(q));
    DenseOperator next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = m(r, c) * f;
    }
    m = std::move(next);
  }
  return m;
}

inline DenseOperator to_dense(const PauliSum& op, int n_qubits) {
  require_qubits(n_qubits, 10, "to_dense");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  DenseOperator m = DenseOperator::Zero(dim, dim);
  for (const auto& [p, c] : op.terms()) m += c * pauli_string_matrix(p);
  return m;
}

/// Fermionic ladder operator built from occupation-number rules, with sign
/// (-1)^{number of occupied modes q < p}.
inline DenseOperator ladder_matrix(int n_qubits, int p, bool dagger) {
  require_qubits(n_qubits, 10, "ladder_matrix");
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  DenseOperator m = DenseOperator::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    const bool occ = (b >> (n_qubits - 1 - p)) & 1U;
    if (occ == dagger) continue;
    int below = 0;
    for (int q = 0; q < p; ++q) below += (b >> (n_qubits - 1 - q)) & 1U;
    const std::uint64_t b2 = b ^ (std::uint64_t{1} << (n_qubits - 1 - p));
    m(static_cast<Eigen::Index>(b2), static_cast<Eigen::Index>(b)) = (below & 1) ? -1.0 : 1.0;
  }
  return m;
}

inline Eigen::VectorXcd to_vector(const StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t k = 0; k < s.dim(); ++k) v(static_cast<Eigen::Index>(k)) = s[k];
  return v;
}

/// Basis indices with the requested particle count (and, optionally, 2*Sz).
inline std::vector<std::uint64_t> sector_basis(int n_qubits, int n_particles,
                                               std::optional<int> two_sz = std::nullopt) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n_qubits); ++b) {
    if (std::popcount(b) != n_particles) continue;
    if (two_sz) {
      int s = 0;
      for (int q = 0; q < n_qubits; ++q) {
        if ((b >> (n_qubits - 1 - q)) & 1U) s += (q % 2 == 0) ? 1 : -1;
      }
      if (s != *two_sz) continue;
    }
    out.push_back(b);
  }
  return out;
}

/// Hamiltonian block on a sector; terms leaving the sector are dropped.
inline DenseOperator sector_matrix(const PauliSum& h, int n_qubits, const std::vector<std::uint64_t>& basis) {
  std::vector<Eigen::Index> pos(std::size_t{1} << n_qubits, -1);
  for (std::size_t k = 0; k < basis.size(); ++k) pos[basis[k]] = static_cast<Eigen::Index>(k);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  DenseOperator m = DenseOperator::Zero(dim, dim);
  for (const auto& [p, c] : h.terms()) {
    const std::uint64_t x = to_basis_mask(p.x_mask(), n_qubits);
    const std::uint64_t z = to_basis_mask(p.z_mask(), n_qubits);
    const cplx pref = c * i_pow(p.y_count());
    for (Eigen::Index col = 0; col < dim; ++col) {
      const std::uint64_t b = basis[col];
      const Eigen::Index row = pos[b ^ x];
      if (row < 0) continue;
      m(row, col) += pref * parity_sign(z & b);
    }
  }
  return m;
}

inline Eigen::VectorXd sector_spectrum(const PauliSum& h, int n_qubits, int n_particles,
                                       std::optional<int> two_sz = std::nullopt) {
  require_qubits(n_qubits, 12, "sector_spectrum");
  const auto basis = sector_basis(n_qubits, n_particles, two_sz);
  if (basis.empty()) throw std::invalid_argument("sector_spectrum: empty sector");
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(sector_matrix(h, n_qubits, basis),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Lowest eigenvalue of h restricted to the n_particles sector (FCI reference).
inline double exact_ground_energy(const PauliSum& h, int n_qubits, int n_particles,
                                  std::optional<int> two_sz = std::nullopt) {
  return sector_spectrum(h, n_qubits, n_particles, two_sz).minCoeff();
}

/// exp(theta * kappa) by scaling and squaring of a Taylor series.
inline DenseOperator dense_exponential(const PauliSum& kappa, double theta, int n_qubits) {
  require_qubits(n_qubits, 8, "dense_exponential");
  DenseOperator a = theta * to_dense(kappa, n_qubits);
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  a /= std::ldexp(1.0, squarings);
  const Eigen::Index dim = a.rows();
  DenseOperator result = DenseOperator::Identity(dim, dim);
  DenseOperator term = DenseOperator::Identity(dim, dim);
  for (int k = 1; k <= 24; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences: column j = (G(x + s e_j) - G(x - s e_j)) / 2s.
inline Eigen::MatrixXd finite_difference_jacobian(const VectorMap& map, const Eigen::VectorXd& point,
                                                  double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_jacobian: step must be > 0");
  const Eigen::Index n = point.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd up = point, down = point;
    up(j) += step;
    down(j) -= step;
    const Eigen::VectorXd gu = map(up);
    const Eigen::VectorXd gd = map(down);
    if (!gu.allFinite() || !gd.allFinite()) {
      throw std::domain_error("finite_difference_jacobian: map returned non-finite values");
    }
    if (j == 0) jac.resize(gu.size(), n);
    jac.col(j) = (gu - gd) / (2.0 * step);
  }
  return jac;
}

}  // namespace pqe::oracle
