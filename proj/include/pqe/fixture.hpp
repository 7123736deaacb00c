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

// Reference metadata shipped next to each FCIDUMP fixture.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace pqe {

struct FixtureSidecar {
  std::string system;
  std::string basis;
  int norb = 0;
  int nelec = 0;
  double hf_energy = 0.0;
  std::optional<double> fci_energy;
  std::string generator;
};

/// foo.fcidump -> foo.json
inline std::filesystem::path sidecar_path(const std::filesystem::path& fcidump) {
  std::filesystem::path p = fcidump;
  return p.replace_extension(".json");
}

inline FixtureSidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sidecar " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in);
  FixtureSidecar s;
  s.system = j.value("system", "");
  s.basis = j.value("basis", "");
  s.norb = j.at("norb").get<int>();
  s.nelec = j.at("nelec").get<int>();
  s.hf_energy = j.at("hf_energy").get<double>();
  if (j.contains("fci_energy") && !j["fci_energy"].is_null()) s.fci_energy = j["fci_energy"].get<double>();
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    s.generator = g.value("package", "") + " " + g.value("version", "");
  }
  return s;
}

}  // namespace pqe
