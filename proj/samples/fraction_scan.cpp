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

// Scans the principal fraction on one fixture and prints energy error against
// full PQE, principal circuit depth and residue-evaluation count.
//
//   fraction_scan [path/to/system.fcidump]

#include <cstdio>
#include <string>

#include "pqe/adpqe.hpp"
#include "pqe/noise.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : std::string(PQE_DATA_DIR) + "/fixtures/h4_r0.75.fcidump";
  const pqe::Problem p = pqe::Problem::from(pqe::spatial_to_spin_orbital(pqe::read_fcidump_file(path)));
  const pqe::ParameterVector init = pqe::initialize_parameters(p);
  const pqe::SolverConfig cfg{300, 1e-7};

  const pqe::PartitionPlan full = pqe::partition_and_order(p, init, 1.0);
  const pqe::ADResult ref = pqe::nfc_solve(p.h, full, cfg);
  std::printf("%s: %d qubits, %zu parameters, PQE energy %.10f\n", path.c_str(), p.n_qubits(), full.n_parameters(),
              ref.energy());
  std::printf("%6s %4s %6s %12s %12s %8s\n", "f_pps", "N_P", "CNOT", "E - E_PQE", "dip", "evals");
  for (double f : {0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0}) {
    const pqe::PartitionPlan plan = pqe::partition_and_order(p, init, f);
    const pqe::ADResult r = pqe::nfc_solve(p.h, plan, cfg);
    std::printf("%6.2f %4zu %6lld %12.3e %12.3e %8lld\n", f, plan.n_principal(), pqe::count_gates(plan).n_cnot,
                r.energy() - ref.energy(), r.correction, r.trace.records.back().cumulative_residue_evals);
  }
  return 0;
}
