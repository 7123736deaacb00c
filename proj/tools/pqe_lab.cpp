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

// pqe_lab: run solver experiments and emit reports.
//
//   pqe_lab run    --config h4.json [--out DIR] [--format csv|json] [--seed N]
//   pqe_lab report --config h4.json --kind cost|stability|fci [--out FILE]
//
// Exit status is 0 whenever artifacts were written, converged or not;
// 2 for bad configs and 1 for any other failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pqe/experiment.hpp"

namespace {

namespace ex = pqe::experiment;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
};

ex::ExperimentConfig resolve(const CommonFlags& f) {
  ex::ExperimentConfig c = ex::load_config(f.config);
  if (!f.out.empty()) c.output_path = f.out;
  if (!f.format.empty()) c.format = ex::parse_format(f.format);
  if (f.seed) c.protocol.base_seed = *f.seed;
  c.validate();
  return c;
}

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "Output directory (run) or file (report); overrides output.path");
  app->add_option("--format", f.format, "csv or json; overrides output.format")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--seed", f.seed, "Base seed; overrides protocol.seed");
}

int do_run(const CommonFlags& f) {
  const ex::ExperimentConfig c = resolve(f);
  const ex::RunOutcome r = ex::run(c);
  for (const auto& s : r.systems) {
    std::printf("%-16s %-15s E = %.10f  iterations = %zu", s.label.c_str(), ex::to_string(c.solver), s.energy,
                s.trace.iteration_count());
    if (s.noisy) std::printf("  (mean of %zu, sd %.4f)", s.noisy->runs.size(), s.noisy->std_final);
    std::printf("  %s\n", pqe::to_string(s.trace.status));
  }
  std::printf("wrote %zu files under %s\n", r.files.size(), c.output_path.string().c_str());
  return 0;
}

int do_report(const CommonFlags& f, const std::string& kind) {
  const ex::ExperimentConfig c = resolve(f);
  const nlohmann::json rep = ex::report(ex::parse_report_kind(kind), c);
  const std::string body = c.format == ex::OutputFormat::kCsv ? ex::report_csv(rep) : rep.dump(2) + "\n";
  if (f.out.empty()) {
    std::cout << body;
  } else {
    ex::write_file(f.out, body);
    std::printf("wrote %s\n", f.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective quantum eigensolver experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Solve and write manifest, traces and noisy aggregates");
  add_common(run, run_flags);

  CommonFlags rep_flags;
  std::string kind;
  CLI::App* rep = app.add_subcommand("report", "Cost, stability or exact-energy report");
  add_common(rep, rep_flags);
  rep->add_option("--kind", kind, "cost, stability or fci")
      ->required()
      ->check(CLI::IsMember({"cost", "stability", "fci"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return do_run(run_flags);
    return do_report(rep_flags, kind);
  } catch (const ex::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
