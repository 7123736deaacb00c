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

#include <random>
#include <string>
#include <vector>

#include "pqe/fixture.hpp"
#include "pqe/hamiltonian_io.hpp"
#include "pqe/pqe.hpp"

namespace pqe::testing {

inline std::string fixture(const std::string& name) {
  return std::string(PQE_DATA_DIR) + "/fixtures/" + name + ".fcidump";
}

inline SpinOrbitalHamiltonian load_so(const std::string& name) {
  return spatial_to_spin_orbital(read_fcidump_file(fixture(name)));
}

inline Problem load_problem(const std::string& name) { return Problem::from(load_so(name)); }

inline Problem hubbard_problem(int sites, double t, double u, int nelec) {
  return Problem::from(build_hubbard_chain(sites, t, u, nelec).first);
}

inline std::vector<double> random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace pqe::testing
