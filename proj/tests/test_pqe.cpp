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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pqe/oracle.hpp"
#include "pqe/pqe.hpp"
#include "support.hpp"

namespace pqe {
namespace {

using oracle::DenseOperator;

// Dense U = prod_k exp(theta_k kappa_k), leftmost factor first.
DenseOperator dense_ansatz(const OrderedAnsatz& a, const std::vector<double>& th) {
  const int n = a.n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  DenseOperator u = DenseOperator::Identity(dim, dim);
  for (std::size_t k = 0; k < a.size(); ++k) {
    u = u * oracle::dense_exponential(kappa_to_pauli(a.op(k), n), th[k], n);
  }
  return u;
}

// Determinant vector built from occupation-number ladder matrices.
Eigen::VectorXcd dense_determinant(const std::vector<int>& ref, const Excitation& e, int n) {
  Eigen::VectorXcd v = oracle::to_vector(reference_state(ref, n));
  for (int i : e.occ) v = oracle::ladder_matrix(n, i, false) * v;
  for (auto it = e.virt.rbegin(); it != e.virt.rend(); ++it) v = oracle::ladder_matrix(n, *it, true) * v;
  return v;
}

TEST(Residues, ZeroTheta_BrillouinAndDoubles) {
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const std::vector<double> zero(a.size(), 0.0);
  const ResidueVector r = residue_projection(p.h, a, zero);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Excitation& e = a.op(k);
    if (e.is_single()) {
      EXPECT_NEAR(r[k], 0.0, 1e-9) << e.label();
    } else {
      EXPECT_NEAR(r[k], p.so.g(e.occ[0], e.occ[1], e.virt[0], e.virt[1]), 1e-12) << e.label();
    }
  }
}

TEST(Residues, ProjectionMatchesDenseOracle) {
  std::mt19937_64 rng(21);
  const Problem p = testing::hubbard_problem(3, 1.0, 2.0, 2);
  ASSERT_EQ(p.n_qubits(), 6);
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const DenseOperator h = oracle::to_dense(p.h.pauli(), 6);
  for (int trial = 0; trial < 4; ++trial) {
    const auto th = testing::random_vector(a.size(), -0.6, 0.6, rng);
    const DenseOperator u = dense_ansatz(a, th);
    const DenseOperator hbar = u.adjoint() * h * u;
    const Eigen::VectorXcd phi0 = oracle::to_vector(a.reference_state());
    const ResidueVector r = residue_projection(p.h, a, th);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Eigen::VectorXcd phimu = dense_determinant(p.reference(), a.op(k), 6);
      const cplx ref = (phimu.adjoint() * hbar * phi0)(0);
      EXPECT_NEAR(r[k], ref.real(), 1e-10);
      EXPECT_NEAR(ref.imag(), 0.0, 1e-10);
    }
    EXPECT_NEAR(pqe_energy(p.h, a, th), (phi0.adjoint() * hbar * phi0)(0).real(), 1e-10);
  }
}

TEST(Residues, MeasurementModeMatchesProjectionOnH4) {
  std::mt19937_64 rng(99);
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  for (int trial = 0; trial < 5; ++trial) {
    const auto th = testing::random_vector(a.size(), -0.5, 0.5, rng);
    const ResidueVector r = residue_projection(p.h, a, th);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_NEAR(residue_measurement_mode(p.h, a, th, a.op(k)), r[k], 1e-10);
    }
  }
}

TEST(Residues, MeasurementModeDiagonalHamiltonianVanishes) {
  // Diagonal H in the determinant basis: only Z strings.
  PauliSum hz(4);
  hz.add(PauliString::from_label("ZIII"), 0.3);
  hz.add(PauliString::from_label("IZZI"), -0.2);
  hz.add(PauliString::from_label("IIIZ"), 0.9);
  const QubitHamiltonian h(hz, 4);
  const OrderedAnsatz a(4, {0, 1}, {});
  for (const Excitation& e : {Excitation{{0}, {2}}, Excitation{{0, 1}, {2, 3}}}) {
    EXPECT_NEAR(residue_measurement_mode(h, a, std::vector<double>{}, e), 0.0, 1e-15);
  }
}

TEST(Init, ZeroTwoBodyGivesZero) {
  const Problem p = testing::hubbard_problem(4, 1.0, 0.0, 4);
  for (double t : initialize_parameters(p)) EXPECT_EQ(t, 0.0);
}

// The MP2 double amplitude is <ij||ab>/D, i.e. the first PQE step from zero:
// theta = r(0)/D. Both numerator and denominator come from dense matrices here.
TEST(Init, HubbardDimerDoubleMatchesDense) {
  const Problem p = testing::hubbard_problem(2, 1.0, 4.0, 2);
  const auto theta = initialize_parameters(p);
  const int n = p.n_qubits();
  const DenseOperator h = oracle::to_dense(p.h.pauli(), n);
  DenseOperator f = DenseOperator::Zero(16, 16);
  for (int q = 0; q < n; ++q) {
    f += p.eps[q] * oracle::ladder_matrix(n, q, true) * oracle::ladder_matrix(n, q, false);
  }
  const Eigen::VectorXcd phi0 = oracle::to_vector(reference_state(p.reference(), n));
  for (std::size_t k = 0; k < p.pool.size(); ++k) {
    const Excitation& e = p.pool[k];
    if (!e.is_double()) continue;
    const Eigen::VectorXcd phimu = dense_determinant(p.reference(), e, n);
    const DenseOperator kap = oracle::to_dense(kappa_to_pauli(e, n), n);
    const double num = (phimu.adjoint() * h * phi0)(0).real();
    const double minus_d = (phimu.adjoint() * (f * kap - kap * f) * phi0)(0).real();
    EXPECT_NEAR(theta[k], num / -minus_d, 1e-12);
    EXPECT_NE(theta[k], 0.0);
  }
}

TEST(Init, SinglesVanishWithoutDoubles_PickUpValuesWithThem) {
  const Problem p = testing::load_problem("h4_r1.50");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const auto d = mp2_denominators(p.pool, p.eps);
  const std::vector<double> zero(a.size(), 0.0);
  const ResidueVector r0 = residue_projection(p.h, a, zero);
  const auto theta = initialize_parameters(p);
  double max_single = 0.0;
  for (std::size_t k = 0; k < p.pool.size(); ++k) {
    if (!p.pool[k].is_single()) continue;
    EXPECT_NEAR(r0[k] / d[k], 0.0, 1e-9);
    max_single = std::max(max_single, std::abs(theta[k]));
  }
  EXPECT_GT(max_single, 1e-6);
  // doubles equal one PQE step from zero
  for (std::size_t k = 0; k < p.pool.size(); ++k) {
    if (p.pool[k].is_double()) {
      EXPECT_NEAR(theta[k], r0[k] / d[k], 1e-12);
    }
  }
}

TEST(Solve, HubbardDimerReachesFci) {
  const Problem p = testing::hubbard_problem(2, 1.0, 4.0, 2);
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const auto d = mp2_denominators(p.pool, p.eps);
  const PqeResult res = pqe_solve(p.h, a, initialize_parameters(p), d);
  ASSERT_TRUE(res.trace.converged());
  const double fci = oracle::exact_ground_energy(p.h.pauli(), 4, 2);
  EXPECT_NEAR(res.trace.last_iteration().energy, fci, 1e-6);
  EXPECT_NEAR(pqe_energy(p.h, a, res.params), fci, 1e-6);
}

TEST(Solve, H4ConvergesWithCounterAccounting) {
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const auto d = mp2_denominators(p.pool, p.eps);
  const PqeResult res = pqe_solve(p.h, a, initialize_parameters(p), d);
  ASSERT_TRUE(res.trace.converged());
  EXPECT_LT(res.trace.last_iteration().residue_inf_norm, 1e-5);
  long long prev = 0;
  for (std::size_t k = 0; k < res.trace.records.size(); ++k) {
    const auto& rec = res.trace.records[k];
    EXPECT_EQ(rec.iteration, static_cast<int>(k));
    EXPECT_EQ(rec.cumulative_residue_evals - prev, static_cast<long long>(a.size()));
    prev = rec.cumulative_residue_evals;
  }
  const auto side = read_sidecar(sidecar_path(testing::fixture("h4_r0.75")));
  EXPECT_NEAR(res.trace.last_iteration().energy, *side.fci_energy, 5e-3);
  // one more update barely moves the energy
  std::vector<double> next = res.params;
  const ResidueVector r = residue_projection(p.h, a, next);
  for (std::size_t k = 0; k < next.size(); ++k) next[k] += r[k] / d[k];
  EXPECT_LT(std::abs(pqe_energy(p.h, a, next) - pqe_energy(p.h, a, res.params)), 1e-8);
}

TEST(Solve, CoreOnlyConvergesImmediately) {
  SpinOrbitalHamiltonian so;
  so.n_so = 4;
  so.core_energy = 0.25;
  so.h1_so = {-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  so.g2_anti.assign(256, 0.0);
  so.occupation = {0, 1};
  // one-body diagonal only, so all residues vanish at theta = 0
  const Problem p = Problem::from(so);
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const PqeResult res = pqe_solve(p.h, a, initialize_parameters(p), mp2_denominators(p.pool, p.eps));
  EXPECT_TRUE(res.trace.converged());
  EXPECT_EQ(res.trace.records.size(), 1U);
  EXPECT_EQ(res.trace.records[0].residue_inf_norm, 0.0);
}

TEST(Solve, NonConvergenceReported) {
  const Problem p = testing::load_problem("h4_r1.50");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  SolverConfig cfg;
  cfg.max_iterations = 3;
  const PqeResult res = pqe_solve(p.h, a, initialize_parameters(p), mp2_denominators(p.pool, p.eps), cfg);
  EXPECT_FALSE(res.trace.converged());
  EXPECT_EQ(res.trace.records.size(), 4U);
  EXPECT_STREQ(to_string(res.trace.status), "max-iterations");
}

TEST(Solve, LengthMismatchThrows) {
  const Problem p = testing::hubbard_problem(2, 1.0, 4.0, 2);
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  EXPECT_THROW(pqe_solve(p.h, a, {0.0}, mp2_denominators(p.pool, p.eps)), std::invalid_argument);
}

}  // namespace
}  // namespace pqe
