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
 * Zero-noise extrapolation and the noisy iterate-then-average protocol.
 *
 * Every expectation value the solvers need (energies and the three terms of
 * each measurement-mode residue) is measured at several folding scales and
 * extrapolated to zero noise.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pqe/adpqe.hpp"
#include "pqe/noise.hpp"
#include "pqe/pqe.hpp"

namespace pqe {

/// Value at scale 0 of the polynomial through `points` (scale, value).
///
/// With `order` below points - 1 a least-squares polynomial of that degree is
/// used instead of the interpolant.
inline double richardson_extrapolate(const std::vector<std::pair<double, double>>& points, int order = -1) {
  const auto n = static_cast<int>(points.size());
  if (n < 2) throw std::invalid_argument("richardson_extrapolate: need at least two points");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (points[i].first == points[j].first) throw std::invalid_argument("richardson_extrapolate: duplicate scale");
    }
  if (order < 0) order = n - 1;
  if (order < 1 || order > n - 1) throw std::invalid_argument("richardson_extrapolate: order out of range");

  if (order == n - 1) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) w *= points[j].first / (points[j].first - points[i].first);
      }
      v += w * points[i].second;
    }
    return v;
  }
  Eigen::MatrixXd a(n, order + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double c = 1.0;
    for (int k = 0; k <= order; ++k, c *= points[i].first) a(i, k) = c;
    b(i) = points[i].second;
  }
  return a.colPivHouseholderQr().solve(b)(0);
}

struct ZNEConfig {
  std::vector<double> scale_factors{1.0, 2.0, 3.0};
  int order = -1;  // -1: interpolate through all points

  int effective_order() const { return order < 0 ? static_cast<int>(scale_factors.size()) - 1 : order; }
  void validate() const {
    if (scale_factors.size() < 2) throw std::invalid_argument("ZNEConfig: need at least two scale factors");
    for (std::size_t k = 0; k < scale_factors.size(); ++k) {
      if (!(scale_factors[k] >= 1.0)) throw std::invalid_argument("ZNEConfig: scale factors must be >= 1");
      if (k > 0 && !(scale_factors[k] > scale_factors[k - 1])) {
        throw std::invalid_argument("ZNEConfig: scale factors must be strictly increasing");
      }
    }
    const int o = effective_order();
    if (o < 1 || static_cast<std::size_t>(o) + 1 > scale_factors.size()) {
      throw std::invalid_argument("ZNEConfig: order needs order + 1 <= number of scale factors");
    }
  }
};

inline double mitigated_expectation(const NoisyCircuit& c, const QubitHamiltonian& h, const NoiseModel& nm,
                                    const ZNEConfig& zne, std::mt19937_64& rng) {
  std::vector<std::pair<double, double>> pts;
  for (double s : zne.scale_factors) pts.emplace_back(s, fold_and_measure(c, h.pauli(), h.compiled(), nm, s, rng));
  return richardson_extrapolate(pts, zne.effective_order());
}

/// Mitigated energy and measurement-mode residues on one ansatz.
class MitigatedEvaluator {
 public:
  MitigatedEvaluator(const QubitHamiltonian& h, NoiseModel nm, ZNEConfig zne, GateEncoding enc, std::uint64_t seed)
      : h_(h), nm_(nm), zne_(std::move(zne)), enc_(enc), rng_(seed) {
    nm_.validate();
    zne_.validate();
  }

  double energy(const OrderedAnsatz& a, std::span<const double> params) {
    return measure(ansatz_circuit(a, params, a.reference_state(), enc_));
  }

  /// <Omega_mu(pi/4)|Hbar|Omega_mu(pi/4)> - E_mu/2 - E_0/2, each term mitigated.
  double residue(const OrderedAnsatz& a, std::span<const double> params, const Excitation& exc, double e0) {
    const double e_omega = measure(ansatz_circuit(a, params, a.reference_state(), enc_, &exc, std::numbers::pi / 4));
    const double e_mu = measure(ansatz_circuit(a, params, a.determinant(exc), enc_));
    return e_omega - 0.5 * e_mu - 0.5 * e0;
  }

  ResidueEvaluation evaluate(const OrderedAnsatz& a, std::span<const double> params,
                             const std::vector<Excitation>& projections) {
    ResidueEvaluation out;
    out.energy = energy(a, params);
    for (const auto& e : projections) out.residues.push_back(residue(a, params, e, out.energy));
    return out;
  }

 private:
  double measure(const NoisyCircuit& c) { return mitigated_expectation(c, h_, nm_, zne_, rng_); }

  const QubitHamiltonian& h_;
  NoiseModel nm_;
  ZNEConfig zne_;
  GateEncoding enc_;
  std::mt19937_64 rng_;
};

enum class SolverVariant { kPqe, kNfcAdpqe };

inline const char* to_string(SolverVariant v) { return v == SolverVariant::kPqe ? "pqe" : "nfc-adpqe"; }

struct ProtocolConfig {
  int terminate_at = 40;
  int average_last = 10;
  int repeats = 10;
  std::uint64_t base_seed = 20240601;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (terminate_at < 1) throw std::invalid_argument("ProtocolConfig: terminate_at must be >= 1");
    if (average_last < 1 || average_last > terminate_at) {
      throw std::invalid_argument("ProtocolConfig: average_last must lie in [1, terminate_at]");
    }
    if (repeats < 1) throw std::invalid_argument("ProtocolConfig: repeats must be >= 1");
  }
};

inline constexpr const char* kParameterAverage = "parameter_average";

struct NoisyRun {
  std::uint64_t seed = 0;
  ConvergenceTrace trace;
  ParameterVector theta_p;
  ParameterVector theta_a;
  double e_principal = 0.0;
  double correction = 0.0;
  double energy = 0.0;
};

struct NoisyAggregate {
  SolverVariant variant = SolverVariant::kPqe;
  std::vector<NoisyRun> runs;
  std::vector<double> mean_energy;  // per trace record
  std::vector<double> std_energy;
  double mean_final = 0.0;
  double std_final = 0.0;
};

/// Per-run seed from the base seed and the run index.
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// One seeded run: `terminate_at` mitigated updates, the principal parameters
/// averaged over the last `average_last` updates, then (nfc variant) one
/// mitigated auxiliary mapping and the energy correction.
///
/// The pqe variant iterates every parameter of the plan on U_P U_A.
inline NoisyRun noisy_single_run(const QubitHamiltonian& h, const PartitionPlan& plan, SolverVariant variant,
                                 const NoiseModel& nm, const ZNEConfig& zne, const ProtocolConfig& cfg,
                                 std::uint64_t seed, const GateEncoding& enc = {}) {
  cfg.validate();
  const bool full = variant == SolverVariant::kPqe;
  const OrderedAnsatz& ansatz = full ? plan.bipartite_ansatz() : plan.principal_ansatz();
  ParameterVector theta = full ? plan.bipartite_params(plan.principal_initial(), plan.auxiliary_initial())
                               : plan.principal_initial();
  std::vector<double> d = plan.principal_denominators();
  if (full) {
    const auto da = plan.auxiliary_denominators();
    d.insert(d.end(), da.begin(), da.end());
  }
  const std::vector<Excitation> projections = ansatz.ops();

  MitigatedEvaluator ev(h, nm, zne, enc, seed);
  NoisyRun run;
  run.seed = seed;
  std::vector<double> sum(theta.size(), 0.0);
  long long evals = 0;
  for (int k = 0; k < cfg.terminate_at; ++k) {
    const ResidueEvaluation r = ev.evaluate(ansatz, theta, projections);
    evals += static_cast<long long>(projections.size());
    run.trace.records.push_back({k, r.energy, inf_norm(r.residues), evals, "iteration"});
    for (std::size_t m = 0; m < theta.size(); ++m) theta[m] += r.residues[m] / d[m];
    if (k >= cfg.terminate_at - cfg.average_last) {
      for (std::size_t m = 0; m < theta.size(); ++m) sum[m] += theta[m];
    }
  }
  run.trace.status = ConvergenceStatus::kMaxIterations;
  for (double& s : sum) s /= cfg.average_last;

  run.e_principal = ev.energy(ansatz, sum);
  const TraceRecord& last = run.trace.records.back();
  run.trace.records.push_back({last.iteration + 1, run.e_principal, last.residue_inf_norm,
                               last.cumulative_residue_evals, kParameterAverage});
  if (full) {
    run.theta_p.assign(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(plan.n_principal()));
    run.theta_a.assign(sum.begin() + static_cast<std::ptrdiff_t>(plan.n_principal()), sum.end());
  } else {
    run.theta_p = sum;
    if (plan.n_auxiliary() > 0) {
      const auto aux = plan.auxiliary_ops();
      for (std::size_t m = 0; m < aux.size(); ++m) {
        run.theta_a.push_back(ev.residue(ansatz, sum, aux[m], run.e_principal) / plan.auxiliary()[m].denominator);
      }
      run.correction = auxiliary_correction(plan, run.theta_a);
      const TraceRecord& avg = run.trace.records.back();
      run.trace.records.push_back({avg.iteration + 1, run.e_principal + run.correction, avg.residue_inf_norm,
                                   avg.cumulative_residue_evals + static_cast<long long>(aux.size()),
                                   kPostOptimizationMapping});
    }
  }
  run.energy = run.e_principal + run.correction;
  return run;
}

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
}

/// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Independent seeded repeats, run in parallel, aggregated per trace record.
inline NoisyAggregate noisy_protocol_run(const QubitHamiltonian& h, const PartitionPlan& plan,
                                         SolverVariant variant, const NoiseModel& nm, const ZNEConfig& zne,
                                         const ProtocolConfig& cfg, const GateEncoding& enc = {}) {
  cfg.validate();
  NoisyAggregate agg;
  agg.variant = variant;
  agg.runs.resize(static_cast<std::size_t>(cfg.repeats));
  detail::parallel_for(agg.runs.size(), cfg.threads, [&](std::size_t r) {
    agg.runs[r] = noisy_single_run(h, plan, variant, nm, zne, cfg, run_seed(cfg.base_seed, r), enc);
  });
  const std::size_t n_rec = agg.runs.front().trace.records.size();
  for (std::size_t k = 0; k < n_rec; ++k) {
    std::vector<double> e;
    for (const auto& run : agg.runs) e.push_back(run.trace.records[k].energy);
    const auto [m, s] = detail::mean_std(e);
    agg.mean_energy.push_back(m);
    agg.std_energy.push_back(s);
  }
  std::vector<double> fin;
  for (const auto& run : agg.runs) fin.push_back(run.energy);
  std::tie(agg.mean_final, agg.std_final) = detail::mean_std(fin);
  return agg;
}

}  // namespace pqe
