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
#include "pqe/zne.hpp"
#include "support.hpp"

namespace pqe {
namespace {

using oracle::DenseOperator;

std::pair<double, double> mean_sem(const std::vector<double>& v) {
  const auto [m, s] = detail::mean_std(v);
  return {m, s / std::sqrt(static_cast<double>(v.size()))};
}

TEST(GateCounts, EncodingArithmetic) {
  const GateCounts empty = count_gates(std::vector<Excitation>{});
  EXPECT_EQ(empty.n_cnot, 0);
  EXPECT_EQ(empty.n_single_qubit, 0);
  const Problem p = testing::load_problem("h4_r0.75");
  const GateCounts full = count_gates(pool_ordered_ansatz(p));
  EXPECT_EQ(full.n_singles, 8U);
  EXPECT_EQ(full.n_doubles, 18U);
  EXPECT_EQ(full.n_cnot, 2 * 8 + 13 * 18);
  GateEncoding enc;
  enc.cnot_double = 7;
  EXPECT_EQ(count_gates(pool_ordered_ansatz(p), enc).n_cnot, 2 * 8 + 7 * 18);
}

TEST(GateCounts, PrincipalCircuitScalesWithFraction) {
  const Problem p = testing::load_problem("h4_r0.75");
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), 0.4);
  const double ratio = static_cast<double>(count_gates(plan).n_cnot) / 250.0;
  EXPECT_NEAR(ratio, 0.4, 0.15);
}

TEST(FaultReport, ClosedForms) {
  GateCounts c;
  const FaultReport none = fault_report(c, NoiseModel{0.0, 0.0, 0, 1});
  EXPECT_EQ(none.fault_rate, 0.0);
  EXPECT_EQ(none.fault_free_product, 1.0);

  c.n_cnot = 100;
  const FaultReport r = fault_report(c, NoiseModel{0.0, 0.01, 0, 1});
  EXPECT_NEAR(r.fault_rate, 1.0, 1e-12);
  EXPECT_NEAR(r.fault_free_exponential, 0.3679, 1e-4);
  EXPECT_NEAR(r.fault_free_product, std::pow(0.99, 100), 1e-12);
  EXPECT_NEAR(fault_report(c, NoiseModel{0.0, 0.01, 0, 1}, 3.0).fault_rate, 3.0, 1e-12);
}

TEST(FaultReport, PrincipalCircuitIsMoreLikelyFaultFree) {
  const Problem p = testing::load_problem("h4_r0.75");
  const NoiseModel nm;
  const GateCounts full = count_gates(pool_ordered_ansatz(p));
  for (double f : {0.2, 0.4, 0.7}) {
    const GateCounts part = count_gates(partition_and_order(p, initialize_parameters(p), f));
    const double ratio = fault_report(part, nm).fault_free_exponential / fault_report(full, nm).fault_free_exponential;
    const double dl = static_cast<double>(full.n_cnot - part.n_cnot) * nm.p2 +
                      static_cast<double>(full.n_single_qubit - part.n_single_qubit) * nm.p1;
    EXPECT_NEAR(ratio, std::exp(dl), 1e-9);
    EXPECT_GT(ratio, 1.0);
  }
}

TEST(NoiseModel, Validation) {
  EXPECT_THROW((NoiseModel{-0.1, 0.0, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseModel{0.0, 1.5, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((NoiseModel{0.0, 0.0, -1, 1}.validate()), std::invalid_argument);
  const NoiseModel reduced = NoiseModel{}.scaled(0.1);
  EXPECT_NEAR(reduced.p1, 1e-4, 1e-18);
  EXPECT_NEAR(reduced.p2, 1e-3, 1e-18);
}

TEST(NoisyExpectation, NoiselessEqualsIdeal) {
  std::mt19937_64 rng(1);
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const auto th = testing::random_vector(a.size(), -0.3, 0.3, rng);
  const NoisyCircuit c = ansatz_circuit(a, th, a.reference_state());
  EXPECT_NEAR(noisy_expectation(c, p.h.pauli(), NoiseModel{0.0, 0.0, 0, 4}, rng), pqe_energy(p.h, a, th), 1e-10);
}

// Idle slot with one single-qubit location: <Z> on |0> becomes 1 - p.
TEST(NoisyExpectation, SingleQubitAttenuation) {
  const double p = 0.2;
  NoisyCircuit c{StateVector::basis(1, 0), {NoisyBlock{nullptr, 0.0, {0}, 0, 1}}};
  const PauliSum z(PauliString::from_label("Z"), 1.0);
  std::mt19937_64 rng(2);
  std::vector<double> v;
  for (int r = 0; r < 200; ++r) v.push_back(noisy_expectation(c, z, NoiseModel{p, 0.0, 0, 50}, rng));
  const auto [m, sem] = mean_sem(v);
  EXPECT_GT(sem, 0.0);
  EXPECT_LE(std::abs(m - (1.0 - p)), 3.0 * sem) << m << " +- " << sem;
}

// Three-qubit register, one excitation block on qubits 0 and 2: trajectory
// mean against the density matrix propagated through the depolarizing channels.
TEST(NoisyExpectation, UnbiasedAgainstDensityMatrix) {
  const int n = 3;
  const Excitation e{{0}, {2}};
  const double angle = 0.7, p1 = 0.05, p2 = 0.1;
  const int n2 = 2, n1 = 3;
  PauliSum obs(n);
  obs.add(PauliString::from_label("ZII"), 1.0);
  obs.add(PauliString::from_label("XIX"), 0.5);
  obs.add(PauliString::from_label("IZZ"), 0.3);
  obs.add(PauliString::from_label("IIZ"), -0.4);

  // sum_P P rho P / 4^k over all Paulis on `qubits`: fully depolarizes them
  auto depolarized = [&](const DenseOperator& r, const std::vector<int>& qubits) {
    DenseOperator out = DenseOperator::Zero(8, 8);
    const auto k = static_cast<int>(qubits.size());
    for (int code = 0; code < (1 << (2 * k)); ++code) {
      PauliString ps = PauliString::identity(n);
      for (int j = 0; j < k; ++j) ps = ps.with_letter(qubits[j], "IXYZ"[(code >> (2 * j)) & 3]);
      const DenseOperator pm = oracle::pauli_string_matrix(ps);
      out += pm * r * pm;
    }
    return DenseOperator(out / std::pow(4.0, k));
  };
  const Eigen::VectorXcd psi0 = oracle::to_vector(reference_state({0}, n));
  const DenseOperator u = oracle::dense_exponential(kappa_to_pauli(e, n), angle, n);
  DenseOperator rho = u * psi0 * psi0.adjoint() * u.adjoint();
  for (int k = 0; k < n2; ++k) rho = (1 - p2) * rho + p2 * depolarized(rho, {0, 2});
  for (int k = 0; k < n1; ++k) {
    rho = (1 - p1) * rho + p1 * 0.5 * (depolarized(rho, {0}) + depolarized(rho, {2}));
  }
  const double expected = (oracle::to_dense(obs, n) * rho).trace().real();

  GateEncoding enc;
  enc.cnot_single = n2;
  enc.oneq_single = n1;
  const OrderedAnsatz a(n, {0}, {e});
  const NoisyCircuit c = ansatz_circuit(a, std::vector<double>{angle}, a.reference_state(), enc);
  std::mt19937_64 rng(3);
  std::vector<double> v;
  for (int r = 0; r < 100; ++r) v.push_back(noisy_expectation(c, obs, NoiseModel{p1, p2, 0, 100}, rng));
  const auto [m, sem] = mean_sem(v);
  EXPECT_GT(sem, 0.0);
  EXPECT_LE(std::abs(m - expected), 4.0 * sem) << m << " vs " << expected;
  // the noise is visible at this strength
  EXPECT_GT(std::abs(expected - pqe_energy(QubitHamiltonian(obs, n), a, std::vector<double>{angle})), 0.05);
}

TEST(NoisyExpectation, ShotNoiseScalesAsInverseRoot) {
  const NoisyCircuit c{StateVector::basis(1, 0), {}};
  const PauliSum x(PauliString::from_label("X"), 1.0);
  std::mt19937_64 rng(4);
  auto spread = [&](int shots) {
    std::vector<double> v;
    for (int r = 0; r < 400; ++r) v.push_back(noisy_expectation(c, x, NoiseModel{0.0, 0.0, shots, 1}, rng));
    return detail::mean_std(v).second;
  };
  const double s_small = spread(500), s_large = spread(50000);
  EXPECT_NEAR(s_small, 1.0 / std::sqrt(500.0), 0.15 / std::sqrt(500.0));
  EXPECT_NEAR(s_small / s_large, 10.0, 1.5);
}

TEST(NoisyExpectation, LargerNoiseLargerBias) {
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const std::vector<double> zero(a.size(), 0.0);
  const NoisyCircuit c = ansatz_circuit(a, zero, a.reference_state());
  const double e_hf = p.h.expectation(a.reference_state());
  for (std::uint64_t seed : {1U, 2U, 3U}) {
    NoiseModel lo{1e-3, 1e-3, 0, 256}, hi{1e-3, 1e-2, 0, 256};
    std::mt19937_64 r1(seed), r2(seed);
    const double b_lo = std::abs(noisy_expectation(c, p.h.pauli(), lo, r1) - e_hf);
    const double b_hi = std::abs(noisy_expectation(c, p.h.pauli(), hi, r2) - e_hf);
    EXPECT_GT(b_hi, b_lo) << "seed " << seed;
  }
}

TEST(Folding, ScaleOneDrawsNothing) {
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const NoisyCircuit c = ansatz_circuit(a, initialize_parameters(p), a.reference_state());
  std::mt19937_64 r1(9), r2(9);
  const NoiseModel nm{1e-3, 1e-2, 1000, 8};
  EXPECT_EQ(fold_and_measure(c, p.h.pauli(), nm, 1.0, r1), noisy_expectation(c, p.h.pauli(), nm, r2));
  EXPECT_THROW(fold_and_measure(c, p.h.pauli(), nm, 0.5, r1), std::invalid_argument);
}

TEST(Folding, NoiselessValueInvariant) {
  std::mt19937_64 rng(5);
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const auto th = testing::random_vector(a.size(), -0.4, 0.4, rng);
  const NoisyCircuit c = ansatz_circuit(a, th, a.reference_state());
  const double ideal = pqe_energy(p.h, a, th);
  for (double s : {1.0, 1.5, 2.0, 3.0, 5.0}) {
    EXPECT_NEAR(fold_and_measure(c, p.h.pauli(), NoiseModel{0.0, 0.0, 0, 1}, s, rng), ideal, 1e-10) << s;
  }
}

TEST(Folding, LocationCounting) {
  const Problem p = testing::load_problem("h4_r0.75");
  const OrderedAnsatz a = pool_ordered_ansatz(p);
  const NoisyCircuit c = ansatz_circuit(a, initialize_parameters(p), a.reference_state());
  const long long l = c.locations();
  EXPECT_EQ(l, 250 + 4 * 8 + 18 * 18);
  std::mt19937_64 rng(6);
  for (int s : {1, 3, 5}) EXPECT_EQ(sequence_locations(c, folded_sequence(c, s, rng)), s * l);
  // partial folding hits 2l on average
  double mean = 0.0;
  for (int r = 0; r < 400; ++r) mean += static_cast<double>(sequence_locations(c, folded_sequence(c, 2.0, rng)));
  EXPECT_NEAR(mean / 400.0, 2.0 * static_cast<double>(l), 0.02 * 2.0 * static_cast<double>(l));
}

TEST(Richardson, Identities) {
  EXPECT_NEAR(richardson_extrapolate({{1, 0.7}, {2, 0.7}, {3, 0.7}}), 0.7, 1e-14);
  EXPECT_NEAR(richardson_extrapolate({{1, 0.9}, {2, 0.5}}), 2 * 0.9 - 0.5, 1e-14);
  auto q = [](double c) { return -1.1 + 0.3 * c - 0.07 * c * c; };
  EXPECT_NEAR(richardson_extrapolate({{1, q(1)}, {2, q(2)}, {3, q(3)}}), -1.1, 1e-10);
  // least squares through collinear points
  EXPECT_NEAR(richardson_extrapolate({{1, 1.2}, {2, 1.4}, {3, 1.6}}, 1), 1.0, 1e-12);
  EXPECT_THROW(richardson_extrapolate({{1, 0.0}, {1, 1.0}}), std::invalid_argument);
  EXPECT_THROW(richardson_extrapolate({{1, 0.0}}), std::invalid_argument);
  EXPECT_THROW(richardson_extrapolate({{1, 0.0}, {2, 1.0}}, 2), std::invalid_argument);
}

TEST(Zne, ConfigValidation) {
  EXPECT_NO_THROW(ZNEConfig{}.validate());
  EXPECT_THROW((ZNEConfig{{1.0}, -1}.validate()), std::invalid_argument);
  EXPECT_THROW((ZNEConfig{{1.0, 3.0, 2.0}, -1}.validate()), std::invalid_argument);
  EXPECT_THROW((ZNEConfig{{0.5, 2.0}, -1}.validate()), std::invalid_argument);
  EXPECT_THROW((ZNEConfig{{1.0, 2.0}, 2}.validate()), std::invalid_argument);
}

TEST(Zne, ProtocolDefaults) {
  const NoiseModel nm;
  const ZNEConfig zne;
  const ProtocolConfig pc;
  EXPECT_EQ(nm.shots, 5000);
  EXPECT_EQ(zne.scale_factors, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(pc.terminate_at, 40);
  EXPECT_EQ(pc.average_last, 10);
}

TEST(Budget, Formula) {
  const MeasurementBudget b = measurement_budget(26, 1.0, 1e-2, 0.4);
  EXPECT_NEAR(b.full, 780000.0, 1e-6);
  EXPECT_NEAR(b.principal / b.full, 0.4, 1e-15);
  EXPECT_THROW(measurement_budget(26, 1.0, 0.0, 0.4), std::invalid_argument);
}

// sum |h_l| over non-identity terms bounds the spread of the spectrum.
TEST(Budget, OneNormBoundsDenseSpectrum) {
  const Problem p = testing::load_problem("h4_r0.75");
  const double norm1 = p.h.pauli().one_norm();
  const DenseOperator h = oracle::to_dense(p.h.pauli(), p.n_qubits());
  const double c0 = p.h.pauli().coefficient(PauliString::identity(p.n_qubits())).real();
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
  const double op = std::max(std::abs(es.eigenvalues().maxCoeff() - c0), std::abs(es.eigenvalues().minCoeff() - c0));
  EXPECT_LE(op, norm1 + 1e-9);
  EXPECT_GT(measurement_budget(26, norm1, 1e-3, 1.0).full, 0.0);
}

TEST(Protocol, ZeroNoiseReproducesNoiselessSolver) {
  const Problem p = testing::load_problem("h4_r0.75");
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), 0.4);
  SolverConfig tight;
  tight.tolerance = 1e-12;
  const ADResult ref = nfc_solve(p.h, plan, tight);
  ProtocolConfig pc;
  pc.repeats = 2;
  const NoisyAggregate agg = noisy_protocol_run(p.h, plan, SolverVariant::kNfcAdpqe, NoiseModel{0.0, 0.0, 0, 1},
                                                ZNEConfig{}, pc);
  EXPECT_NEAR(agg.mean_final, ref.energy(), 1e-9);
  EXPECT_NEAR(agg.std_final, 0.0, 1e-12);
  const auto& recs = agg.runs[0].trace.records;
  ASSERT_EQ(recs.size(), 42U);
  EXPECT_EQ(recs[40].kind, kParameterAverage);
  EXPECT_EQ(recs.back().kind, kPostOptimizationMapping);
  EXPECT_LE(recs.back().energy - recs[40].energy, 0.0);
}

TEST(Protocol, DeterministicAcrossThreadCounts) {
  const Problem p = testing::hubbard_problem(3, 1.0, 2.0, 2);
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), 0.5);
  ProtocolConfig pc;
  pc.terminate_at = 4;
  pc.average_last = 2;
  pc.repeats = 3;
  const NoiseModel nm{1e-3, 1e-2, 500, 8};
  pc.threads = 1;
  const NoisyAggregate a = noisy_protocol_run(p.h, plan, SolverVariant::kPqe, nm, ZNEConfig{}, pc);
  pc.threads = 3;
  const NoisyAggregate b = noisy_protocol_run(p.h, plan, SolverVariant::kPqe, nm, ZNEConfig{}, pc);
  EXPECT_EQ(a.mean_energy, b.mean_energy);
  EXPECT_EQ(a.mean_final, b.mean_final);
  EXPECT_NE(a.runs[0].energy, a.runs[1].energy);
  EXPECT_EQ(a.runs[0].trace.records.size(), 5U);
}

}  // namespace
}  // namespace pqe
