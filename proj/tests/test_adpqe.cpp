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

#include "pqe/adpqe.hpp"
#include "pqe/oracle.hpp"
#include "support.hpp"

namespace pqe {
namespace {

using oracle::DenseOperator;

struct H4Setup {
  Problem p = testing::load_problem("h4_r0.75");
  ParameterVector init = initialize_parameters(p);
};

// Determinant vector built from occupation-number ladder matrices.
Eigen::VectorXcd dense_determinant(const std::vector<int>& ref, const Excitation& e, int n) {
  Eigen::VectorXcd v = oracle::to_vector(reference_state(ref, n));
  for (int i : e.occ) v = oracle::ladder_matrix(n, i, false) * v;
  for (auto it = e.virt.rbegin(); it != e.virt.rend(); ++it) v = oracle::ladder_matrix(n, *it, true) * v;
  return v;
}

const H4Setup& h4() {
  static const H4Setup s;
  return s;
}

TEST(Partition, CountRule) {
  EXPECT_EQ(principal_count(1.0, 26), 26U);
  EXPECT_EQ(principal_count(0.4, 26), 10U);
  EXPECT_EQ(principal_count(0.3, 26), 8U);
  EXPECT_EQ(principal_count(0.01, 26), 1U);
  EXPECT_THROW(principal_count(0.0, 26), std::invalid_argument);
  EXPECT_THROW(principal_count(1.2, 26), std::invalid_argument);
}

TEST(Partition, FullFractionKeepsEverything) {
  const PartitionPlan plan = partition_and_order(h4().p, h4().init, 1.0);
  EXPECT_EQ(plan.n_principal(), 26U);
  EXPECT_EQ(plan.n_auxiliary(), 0U);
  EXPECT_EQ(plan.bipartite_ansatz().size(), 26U);
}

TEST(Partition, OrderingContract) {
  for (double f : {0.3, 0.4, 0.5, 1.0}) {
    const PartitionPlan plan = partition_and_order(h4().p, h4().init, f);
    EXPECT_EQ(plan.n_principal() + plan.n_auxiliary(), 26U);
    double min_p = 1e9, max_a = 0.0;
    for (const auto& s : plan.principal()) min_p = std::min(min_p, std::abs(s.initial));
    for (const auto& s : plan.auxiliary()) max_a = std::max(max_a, std::abs(s.initial));
    EXPECT_GE(min_p, max_a);
    for (const auto* subset : {&plan.principal(), &plan.auxiliary()}) {
      for (std::size_t k = 1; k < subset->size(); ++k) {
        const auto& a = (*subset)[k - 1];
        const auto& b = (*subset)[k];
        EXPECT_GE(a.exc.rank(), b.exc.rank());
        if (a.exc.rank() == b.exc.rank()) {
          EXPECT_GE(std::abs(a.initial), std::abs(b.initial));
          if (std::abs(a.initial) == std::abs(b.initial)) {
            EXPECT_LT(a.pool_index, b.pool_index);
          }
        }
      }
    }
    // bipartite list = principal then auxiliary
    for (std::size_t k = 0; k < plan.n_principal(); ++k) EXPECT_EQ(plan.bipartite_ansatz().op(k), plan.principal()[k].exc);
    for (std::size_t k = 0; k < plan.n_auxiliary(); ++k) {
      EXPECT_EQ(plan.bipartite_ansatz().op(plan.n_principal() + k), plan.auxiliary()[k].exc);
    }
  }
}

TEST(Partition, EmptyPoolRejected) {
  EXPECT_THROW(partition_and_order({}, {}, {}, 0.5, 4, {0, 1}), std::invalid_argument);
}

TEST(NfcResidue, FullFractionEqualsProjection) {
  const PartitionPlan plan = partition_and_order(h4().p, h4().init, 1.0);
  const auto th = plan.principal_initial();
  const auto a = nfc_residue(h4().p.h, plan, th);
  const auto b = residue_projection(h4().p.h, plan.bipartite_ansatz(), th);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(NfcResidue, MatchesDenseOracle) {
  std::mt19937_64 rng(4);
  const Problem p = testing::hubbard_problem(3, 1.0, 3.0, 2);
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), 0.5);
  const int n = p.n_qubits();
  const auto th = testing::random_vector(plan.n_principal(), -0.7, 0.7, rng);
  DenseOperator u = DenseOperator::Identity(64, 64);
  for (std::size_t k = 0; k < plan.n_principal(); ++k) {
    u = u * oracle::dense_exponential(kappa_to_pauli(plan.principal()[k].exc, n), th[k], n);
  }
  const DenseOperator hbar = u.adjoint() * oracle::to_dense(p.h.pauli(), n) * u;
  const Eigen::VectorXcd phi0 = oracle::to_vector(reference_state(p.reference(), n));
  const auto r = nfc_residue(p.h, plan, th);
  for (std::size_t k = 0; k < plan.n_principal(); ++k) {
    const Eigen::VectorXcd phimu = dense_determinant(p.reference(), plan.principal()[k].exc, n);
    EXPECT_NEAR(r[k], (phimu.adjoint() * hbar * phi0)(0).real(), 1e-10);
  }
}

TEST(MapAuxiliary, IdentityPrincipalGivesMp2) {
  const PartitionPlan plan = partition_and_order(h4().p, h4().init, 0.4);
  const std::vector<double> zero(plan.n_principal(), 0.0);
  const auto th_a = map_auxiliary(h4().p.h, plan, zero);
  for (std::size_t k = 0; k < plan.n_auxiliary(); ++k) {
    const auto& s = plan.auxiliary()[k];
    if (s.exc.is_single()) {
      EXPECT_NEAR(th_a[k], 0.0, 1e-9);
    } else {
      const double mp2 = h4().p.so.g(s.exc.occ[0], s.exc.occ[1], s.exc.virt[0], s.exc.virt[1]) / s.denominator;
      EXPECT_NEAR(th_a[k], mp2, 1e-12);
    }
  }
}

TEST(MapAuxiliary, NonInteractingGivesZero) {
  const Problem p = testing::hubbard_problem(4, 1.0, 0.0, 4);
  std::vector<double> init(p.pool.size());
  for (std::size_t k = 0; k < init.size(); ++k) init[k] = 0.01 * static_cast<double>(k + 1);
  const PartitionPlan plan = partition_and_order(p, init, 0.3);
  for (double t : map_auxiliary(p.h, plan, std::vector<double>(plan.n_principal(), 0.0))) EXPECT_EQ(t, 0.0);
}

TEST(CorrectedEnergy, TrivialCases) {
  const PartitionPlan full = partition_and_order(h4().p, h4().init, 1.0);
  const auto th = full.principal_initial();
  EXPECT_EQ(corrected_energy(h4().p.h, full, th, {}), pqe_energy(h4().p.h, full.principal_ansatz(), th));
  const PartitionPlan part = partition_and_order(h4().p, h4().init, 0.4);
  const std::vector<double> zero_a(part.n_auxiliary(), 0.0);
  EXPECT_EQ(auxiliary_correction(part, zero_a), 0.0);
  EXPECT_LE(auxiliary_correction(part, part.auxiliary_initial()), 0.0);
}

// Slaved amplitudes satisfy r_A = theta_A D_A, so the exact first-order term of
// E(U_P U_A(s theta_A)) is 2 s sum theta_A^2 D_A. With the corrected form
// (2s - s^2) sum theta_A^2 D_A (equal to the correction at s = 1) only
// second-order error is left.
TEST(CorrectedEnergy, SecondOrderAgreementWithBipartiteEnergy) {
  const auto& p = h4().p;
  const PartitionPlan plan = partition_and_order(p, h4().init, 0.4);
  const ADResult res = nfc_solve(p.h, plan);
  const double c = auxiliary_correction(plan, res.theta_a);
  std::vector<double> s_vals{0.4, 0.2, 0.1, 0.05}, err;
  for (double s : s_vals) {
    std::vector<double> scaled = res.theta_a;
    for (double& t : scaled) t *= s;
    const double exact = bipartite_energy(p.h, plan, res.theta_p, scaled);
    err.push_back(std::abs(exact - (res.e_principal + (2 * s - s * s) * c)));
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double slope = std::log(err[k - 1] / err[k]) / std::log(s_vals[k - 1] / s_vals[k]);
    EXPECT_GE(slope, 1.9) << "s=" << s_vals[k];
  }
}

TEST(Nfc, FullFractionReducesToPqe) {
  const auto& p = h4().p;
  const PartitionPlan plan = partition_and_order(p, h4().init, 1.0);
  const ADResult nfc = nfc_solve(p.h, plan);
  const ADResult fb = feedback_adpqe_solve(p.h, plan);
  const PqeResult ref = pqe_solve(p.h, plan.principal_ansatz(), plan.principal_initial(), plan.principal_denominators());
  ASSERT_EQ(nfc.trace.records.size(), ref.trace.records.size());
  ASSERT_EQ(fb.trace.records.size(), ref.trace.records.size());
  for (std::size_t k = 0; k < ref.trace.records.size(); ++k) {
    EXPECT_EQ(nfc.trace.records[k].energy, ref.trace.records[k].energy);
    EXPECT_EQ(fb.trace.records[k].energy, ref.trace.records[k].energy);
  }
  EXPECT_NEAR(nfc.energy(), ref.trace.last_iteration().energy, 1e-9);
  EXPECT_NEAR(fb.energy(), ref.trace.last_iteration().energy, 1e-9);
  EXPECT_EQ(nfc.correction, 0.0);
}

TEST(Nfc, H4AccuracyCountersAndDip) {
  const auto& p = h4().p;
  const PartitionPlan full = partition_and_order(p, h4().init, 1.0);
  const PartitionPlan plan = partition_and_order(p, h4().init, 0.4);
  const PqeResult ref = pqe_solve(p.h, full.principal_ansatz(), full.principal_initial(), full.principal_denominators());
  const ADResult nfc = nfc_solve(p.h, plan);
  ASSERT_TRUE(nfc.trace.converged());
  EXPECT_LE(std::abs(nfc.energy() - ref.trace.last_iteration().energy), 5e-4);

  const auto& recs = nfc.trace.records;
  ASSERT_GE(recs.size(), 2U);
  EXPECT_EQ(recs.back().kind, kPostOptimizationMapping);
  EXPECT_LE(recs.back().energy - recs[recs.size() - 2].energy, 0.0);
  EXPECT_EQ(nfc.trace.iteration_count(), recs.size() - 1);
  long long prev = 0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    EXPECT_EQ(recs[k].cumulative_residue_evals - prev, static_cast<long long>(plan.n_principal()));
    prev = recs[k].cumulative_residue_evals;
  }
  EXPECT_EQ(recs.back().cumulative_residue_evals - prev, static_cast<long long>(plan.n_auxiliary()));

  // mapped auxiliaries agree in sign with the full PQE amplitudes
  for (std::size_t k = 0; k < plan.n_auxiliary(); ++k) {
    const std::size_t pool_idx = plan.auxiliary()[k].pool_index;
    std::size_t full_pos = 0;
    while (full.principal()[full_pos].pool_index != pool_idx) ++full_pos;
    const double ref_val = ref.params[full_pos];
    if (std::abs(ref_val) > 1e-4) {
      EXPECT_GT(ref_val * nfc.theta_a[k], 0.0) << plan.auxiliary()[k].exc.label();
    }
  }
}

TEST(Feedback, H4MappingOncePerIterationAndAccuracy) {
  const auto& p = h4().p;
  const PartitionPlan full = partition_and_order(p, h4().init, 1.0);
  const PartitionPlan plan = partition_and_order(p, h4().init, 0.4);
  const PqeResult ref = pqe_solve(p.h, full.principal_ansatz(), full.principal_initial(), full.principal_denominators());
  const ADResult fb = feedback_adpqe_solve(p.h, plan);
  ASSERT_TRUE(fb.trace.converged());
  EXPECT_EQ(fb.mapping_calls, static_cast<long long>(fb.trace.records.size()));
  EXPECT_LE(std::abs(fb.energy() - ref.trace.last_iteration().energy), 5e-4);
}

TEST(Stability, FockOnlyHamiltonianHasZeroSpectrum) {
  SpinOrbitalHamiltonian so;
  so.n_so = 6;
  so.h1_so.assign(36, 0.0);
  const double e[] = {-1.0, -1.0, 0.3, 0.3, 0.8, 0.8};
  for (int q = 0; q < 6; ++q) so.h1_so[q * 6 + q] = e[q];
  so.g2_anti.assign(1296, 0.0);
  so.occupation = {0, 1};
  const Problem p = Problem::from(so);
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const std::vector<double> zero(a.size(), 0.0);
  const auto s = stability_spectrum(p.h, a, zero, mp2_denominators(p.pool, p.eps));
  for (double m : s.moduli) EXPECT_LT(m, 1e-6);
}

TEST(Stability, H4FixedPointIsContractive) {
  const auto& p = h4().p;
  const PartitionPlan full = partition_and_order(p, h4().init, 1.0);
  const PqeResult ref = pqe_solve(p.h, full.principal_ansatz(), full.principal_initial(), full.principal_denominators());
  const auto s = stability_spectrum(p.h, full.principal_ansatz(), ref.params, full.principal_denominators());
  EXPECT_LT(s.spectral_radius, 1.0);
  EXPECT_EQ(s.moduli.size(), 26U);
  EXPECT_EQ(s.dominant_component.size(), 26U);
  // principal submap at the nfc fixed point
  const PartitionPlan plan = partition_and_order(p, h4().init, 0.4);
  const ADResult nfc = nfc_solve(p.h, plan);
  const auto sp = stability_spectrum(p.h, plan.principal_ansatz(), nfc.theta_p, plan.principal_denominators());
  EXPECT_LT(sp.spectral_radius, 1.0);
}

TEST(FockCommutator, IdentityAndNegativeLambda) {
  const auto& p = h4().p;
  const auto d = mp2_denominators(p.pool, p.eps);
  const Eigen::MatrixXd m = fock_commutator_matrix(p.eps, p.reference(), p.pool, p.n_qubits());
  for (std::size_t mu = 0; mu < p.pool.size(); ++mu)
    for (std::size_t nu = 0; nu < p.pool.size(); ++nu) {
      EXPECT_NEAR(m(mu, nu) + (mu == nu ? d[mu] : 0.0), 0.0, 1e-12);
    }
  for (double l : diagonal_lambda(p.h, p.reference(), p.pool, d)) EXPECT_LT(l, 0.0);
}

}  // namespace
}  // namespace pqe
