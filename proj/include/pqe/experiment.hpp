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
 * Experiment configuration, orchestration and artifact emission.
 *
 * A config is a JSON document validated in full before anything is computed.
 * Unknown keys are errors. Every default is written back into the run
 * manifest so a manifest can be fed to `run` again.
 *
 *   {
 *     "system":   {"fcidump": "h4.fcidump"}            (or a list of paths,
 *                 {"hubbard": {"sites": 2, "t": 1, "U": 4, "nelec": 2}}),
 *     "solver":   {"kind": "nfc-adpqe", "f_pps": 0.4, "tolerance": 1e-6,
 *                  "max_iterations": 200, "residue_mode": "projection"},
 *     "noise":    {"enabled": false, "p1": 1e-3, "p2": 1e-2, "shots": 5000,
 *                  "trajectories": 128},
 *     "zne":      {"scale_factors": [1, 2, 3], "order": -1},
 *     "protocol": {"terminate_at": 40, "average_last": 10, "repeats": 10,
 *                  "seed": 20240601, "threads": 0},
 *     "report":   {"epsilon": 1e-3},
 *     "output":   {"path": "out", "format": "csv"}
 *   }
 *
 * Relative fcidump paths resolve against the config file's directory.
 */

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqe/adpqe.hpp"
#include "pqe/fixture.hpp"
#include "pqe/hamiltonian_io.hpp"
#include "pqe/noise.hpp"
#include "pqe/oracle.hpp"
#include "pqe/pqe.hpp"
#include "pqe/zne.hpp"

namespace pqe::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SolverKind { kPqe, kNfcAdpqe, kFeedbackAdpqe };

inline const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::kPqe: return "pqe";
    case SolverKind::kNfcAdpqe: return "nfc-adpqe";
    case SolverKind::kFeedbackAdpqe: return "feedback-adpqe";
  }
  return "?";
}

enum class OutputFormat { kCsv, kJson };

inline const char* to_string(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

struct HubbardSpec {
  int sites = 2;
  double t = 1.0;
  double u = 4.0;
  int nelec = 2;
};

/// Exactly one of `fcidumps` (one entry per geometry) or `hubbard` is set.
struct SystemSource {
  std::vector<fs::path> fcidumps;
  std::optional<HubbardSpec> hubbard;
};

struct ExperimentConfig {
  SystemSource system;
  SolverKind solver = SolverKind::kPqe;
  double f_pps = 1.0;
  SolverConfig pqe{200, 1e-6, ResidueMode::kProjection};
  bool noise_enabled = false;
  NoiseModel noise;
  ZNEConfig zne;
  ProtocolConfig protocol;
  double epsilon = 1e-3;  // target energy precision for the measurement bound
  fs::path output_path = "out";
  OutputFormat format = OutputFormat::kCsv;

  void validate() const {
    if (system.fcidumps.empty() == !system.hubbard.has_value()) {
      throw ConfigError("system: give exactly one of fcidump or hubbard");
    }
    if (system.hubbard) {
      const auto& h = *system.hubbard;
      if (h.sites < 1 || h.nelec < 0 || h.nelec > 2 * h.sites) throw ConfigError("system.hubbard: bad sites/nelec");
    }
    if (!(f_pps > 0.0 && f_pps <= 1.0)) throw ConfigError("solver.f_pps must lie in (0, 1]");
    if (!(pqe.tolerance > 0.0)) throw ConfigError("solver.tolerance must be positive");
    if (pqe.max_iterations < 0) throw ConfigError("solver.max_iterations must be >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("report.epsilon must be positive");
    if (noise_enabled && solver == SolverKind::kFeedbackAdpqe) {
      throw ConfigError("noise: the noisy protocol supports pqe and nfc-adpqe only");
    }
    try {
      noise.validate();
      zne.validate();
      protocol.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_absolute() ? p : fs::weakly_canonical(base / p);
}

}  // namespace detail

inline SolverKind parse_solver_kind(const std::string& s) {
  if (s == "pqe") return SolverKind::kPqe;
  if (s == "nfc-adpqe") return SolverKind::kNfcAdpqe;
  if (s == "feedback-adpqe") return SolverKind::kFeedbackAdpqe;
  throw ConfigError("solver.kind: expected pqe, nfc-adpqe or feedback-adpqe, got '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw ConfigError("output.format: expected csv or json, got '" + s + "'");
}

/// `base_dir` anchors relative fixture paths.
inline ExperimentConfig parse_config(const json& j, const fs::path& base_dir = fs::current_path()) {
  using detail::check_keys;
  using detail::read;
  check_keys(j, "config", {"system", "solver", "noise", "zne", "protocol", "report", "output"});
  ExperimentConfig c;

  if (!j.contains("system")) throw ConfigError("config: missing system");
  const json& sys = j.at("system");
  check_keys(sys, "system", {"fcidump", "hubbard"});
  if (sys.contains("fcidump")) {
    const json& f = sys.at("fcidump");
    std::vector<std::string> paths;
    if (f.is_string()) {
      paths.push_back(f.get<std::string>());
    } else if (f.is_array() && !f.empty()) {
      for (const auto& x : f) {
        if (!x.is_string()) throw ConfigError("system.fcidump: expected a path or a list of paths");
        paths.push_back(x.get<std::string>());
      }
    } else {
      throw ConfigError("system.fcidump: expected a path or a non-empty list of paths");
    }
    for (const auto& p : paths) c.system.fcidumps.push_back(detail::resolve(p, base_dir));
  }
  if (sys.contains("hubbard")) {
    const json& h = sys.at("hubbard");
    check_keys(h, "system.hubbard", {"sites", "t", "U", "nelec"});
    HubbardSpec hs;
    read(h, "sites", "system.hubbard", hs.sites);
    read(h, "t", "system.hubbard", hs.t);
    read(h, "U", "system.hubbard", hs.u);
    read(h, "nelec", "system.hubbard", hs.nelec);
    c.system.hubbard = hs;
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"kind", "f_pps", "tolerance", "max_iterations", "residue_mode"});
    std::string kind = to_string(c.solver);
    std::string mode = "projection";
    read(s, "kind", "solver", kind);
    read(s, "f_pps", "solver", c.f_pps);
    read(s, "tolerance", "solver", c.pqe.tolerance);
    read(s, "max_iterations", "solver", c.pqe.max_iterations);
    read(s, "residue_mode", "solver", mode);
    c.solver = parse_solver_kind(kind);
    if (mode == "projection") {
      c.pqe.mode = ResidueMode::kProjection;
    } else if (mode == "measurement") {
      c.pqe.mode = ResidueMode::kMeasurement;
    } else {
      throw ConfigError("solver.residue_mode: expected projection or measurement");
    }
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, "noise", {"enabled", "p1", "p2", "shots", "trajectories"});
    read(n, "enabled", "noise", c.noise_enabled);
    read(n, "p1", "noise", c.noise.p1);
    read(n, "p2", "noise", c.noise.p2);
    read(n, "shots", "noise", c.noise.shots);
    read(n, "trajectories", "noise", c.noise.trajectories);
  }
  if (j.contains("zne")) {
    const json& z = j.at("zne");
    check_keys(z, "zne", {"scale_factors", "order"});
    read(z, "scale_factors", "zne", c.zne.scale_factors);
    read(z, "order", "zne", c.zne.order);
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    check_keys(p, "protocol", {"terminate_at", "average_last", "repeats", "seed", "threads"});
    read(p, "terminate_at", "protocol", c.protocol.terminate_at);
    read(p, "average_last", "protocol", c.protocol.average_last);
    read(p, "repeats", "protocol", c.protocol.repeats);
    read(p, "seed", "protocol", c.protocol.base_seed);
    read(p, "threads", "protocol", c.protocol.threads);
  }
  if (j.contains("report")) {
    const json& r = j.at("report");
    check_keys(r, "report", {"epsilon"});
    read(r, "epsilon", "report", c.epsilon);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"path", "format"});
    std::string path = c.output_path.string();
    std::string fmt = "csv";
    read(o, "path", "output", path);
    read(o, "format", "output", fmt);
    c.output_path = path;
    c.format = parse_format(fmt);
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path());
}

/// Fully resolved config; parse_config(to_json(c)) == c.
inline json to_json(const ExperimentConfig& c) {
  json sys;
  if (c.system.hubbard) {
    const auto& h = *c.system.hubbard;
    sys["hubbard"] = {{"sites", h.sites}, {"t", h.t}, {"U", h.u}, {"nelec", h.nelec}};
  } else if (c.system.fcidumps.size() == 1) {
    sys["fcidump"] = c.system.fcidumps.front().string();
  } else {
    json list = json::array();
    for (const auto& p : c.system.fcidumps) list.push_back(p.string());
    sys["fcidump"] = list;
  }
  return {
      {"system", sys},
      {"solver",
       {{"kind", to_string(c.solver)},
        {"f_pps", c.f_pps},
        {"tolerance", c.pqe.tolerance},
        {"max_iterations", c.pqe.max_iterations},
        {"residue_mode", c.pqe.mode == ResidueMode::kProjection ? "projection" : "measurement"}}},
      {"noise",
       {{"enabled", c.noise_enabled},
        {"p1", c.noise.p1},
        {"p2", c.noise.p2},
        {"shots", c.noise.shots},
        {"trajectories", c.noise.trajectories}}},
      {"zne", {{"scale_factors", c.zne.scale_factors}, {"order", c.zne.order}}},
      {"protocol",
       {{"terminate_at", c.protocol.terminate_at},
        {"average_last", c.protocol.average_last},
        {"repeats", c.protocol.repeats},
        {"seed", c.protocol.base_seed},
        {"threads", c.protocol.threads}}},
      {"report", {{"epsilon", c.epsilon}}},
      {"output", {{"path", c.output_path.string()}, {"format", to_string(c.format)}}},
  };
}

/// One loaded Hamiltonian with its label and optional stored reference.
struct LoadedSystem {
  std::string label;
  fs::path source;  // empty for model Hamiltonians
  Problem problem;
  std::optional<FixtureSidecar> sidecar;
};

inline std::vector<LoadedSystem> load_systems(const ExperimentConfig& c) {
  std::vector<LoadedSystem> out;
  if (c.system.hubbard) {
    const auto& h = *c.system.hubbard;
    LoadedSystem s;
    s.label = "hubbard_" + std::to_string(h.sites) + "site";
    s.problem = Problem::from(build_hubbard_chain(h.sites, h.t, h.u, h.nelec).first);
    out.push_back(std::move(s));
    return out;
  }
  for (const auto& p : c.system.fcidumps) {
    if (!fs::exists(p)) throw std::runtime_error("missing fixture " + p.string());
    LoadedSystem s;
    s.label = p.stem().string();
    s.source = p;
    s.problem = Problem::from(spatial_to_spin_orbital(read_fcidump_file(p.string())));
    if (fs::exists(sidecar_path(p))) s.sidecar = read_sidecar(sidecar_path(p));
    out.push_back(std::move(s));
  }
  return out;
}

/// The pqe solver runs on the f_pps = 1 ordering so that nfc-adpqe at
/// f_pps = 1 reproduces it exactly.
inline PartitionPlan plan_for(const Problem& p, SolverKind kind, double f_pps) {
  const double f = kind == SolverKind::kPqe ? 1.0 : f_pps;
  return partition_and_order(p, initialize_parameters(p), f);
}

struct SystemResult {
  std::string label;
  fs::path source;
  std::size_t n_parameters = 0;
  std::size_t n_principal = 0;
  ConvergenceTrace trace;  // noiseless solve or aggregate mean trace
  double energy = 0.0;
  std::optional<double> reference_fci;
  std::optional<NoisyAggregate> noisy;
};

inline SystemResult run_system(const LoadedSystem& sys, const ExperimentConfig& c) {
  const PartitionPlan plan = plan_for(sys.problem, c.solver, c.f_pps);
  SystemResult r;
  r.label = sys.label;
  r.source = sys.source;
  r.n_parameters = plan.n_parameters();
  r.n_principal = plan.n_principal();
  if (sys.sidecar) r.reference_fci = sys.sidecar->fci_energy;
  const QubitHamiltonian& h = sys.problem.h;

  if (c.noise_enabled) {
    const SolverVariant v = c.solver == SolverKind::kPqe ? SolverVariant::kPqe : SolverVariant::kNfcAdpqe;
    NoisyAggregate agg = noisy_protocol_run(h, plan, v, c.noise, c.zne, c.protocol);
    const ConvergenceTrace& first = agg.runs.front().trace;
    for (std::size_t k = 0; k < first.records.size(); ++k) {
      TraceRecord rec = first.records[k];
      rec.energy = agg.mean_energy[k];
      double rn = 0.0;
      for (const auto& run : agg.runs) rn += run.trace.records[k].residue_inf_norm;
      rec.residue_inf_norm = rn / static_cast<double>(agg.runs.size());
      r.trace.records.push_back(rec);
    }
    r.trace.status = ConvergenceStatus::kMaxIterations;
    r.energy = agg.mean_final;
    r.noisy = std::move(agg);
    return r;
  }

  switch (c.solver) {
    case SolverKind::kPqe: {
      PqeResult res = pqe_solve(h, plan.principal_ansatz(), plan.principal_initial(), plan.principal_denominators(),
                                c.pqe);
      r.trace = std::move(res.trace);
      r.energy = r.trace.last_iteration().energy;
      break;
    }
    case SolverKind::kNfcAdpqe: {
      ADResult res = nfc_solve(h, plan, c.pqe);
      r.trace = std::move(res.trace);
      r.energy = res.energy();
      break;
    }
    case SolverKind::kFeedbackAdpqe: {
      ADResult res = feedback_adpqe_solve(h, plan, c.pqe);
      r.trace = std::move(res.trace);
      r.energy = res.energy();
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------- writers

/// Round-trip decimal form, so reruns produce identical bytes.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_file(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

inline json trace_json(const ConvergenceTrace& t) {
  json recs = json::array();
  for (const auto& r : t.records) {
    recs.push_back({{"iteration", r.iteration},
                    {"energy", r.energy},
                    {"residue_inf_norm", r.residue_inf_norm},
                    {"cumulative_residue_evals", r.cumulative_residue_evals},
                    {"kind", r.kind}});
  }
  return {{"status", to_string(t.status)}, {"records", recs}};
}

inline std::string trace_csv(const ConvergenceTrace& t) {
  std::ostringstream os;
  os << "iteration,energy,residue_inf_norm,cumulative_residue_evals,kind\n";
  for (const auto& r : t.records) {
    os << r.iteration << ',' << num(r.energy) << ',' << num(r.residue_inf_norm) << ','
       << r.cumulative_residue_evals << ',' << r.kind << '\n';
  }
  return os.str();
}

inline std::string runs_csv(const NoisyAggregate& a) {
  std::ostringstream os;
  os << "run,seed,iteration,energy,residue_inf_norm,cumulative_residue_evals,kind\n";
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    for (const auto& r : a.runs[k].trace.records) {
      os << k << ',' << a.runs[k].seed << ',' << r.iteration << ',' << num(r.energy) << ','
         << num(r.residue_inf_norm) << ',' << r.cumulative_residue_evals << ',' << r.kind << '\n';
    }
  }
  return os.str();
}

inline std::string aggregate_csv(const NoisyAggregate& a) {
  std::ostringstream os;
  os << "iteration,mean_energy,std_energy,repeats,kind\n";
  const auto& recs = a.runs.front().trace.records;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    os << recs[k].iteration << ',' << num(a.mean_energy[k]) << ',' << num(a.std_energy[k]) << ',' << a.runs.size()
       << ',' << recs[k].kind << '\n';
  }
  return os.str();
}

inline json noisy_json(const NoisyAggregate& a) {
  json runs = json::array();
  for (const auto& run : a.runs) {
    runs.push_back({{"seed", run.seed},
                    {"energy", run.energy},
                    {"e_principal", run.e_principal},
                    {"correction", run.correction},
                    {"theta_p", run.theta_p},
                    {"theta_a", run.theta_a},
                    {"trace", trace_json(run.trace)}});
  }
  json agg = json::array();
  const auto& recs = a.runs.front().trace.records;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    agg.push_back({{"iteration", recs[k].iteration},
                   {"mean_energy", a.mean_energy[k]},
                   {"std_energy", a.std_energy[k]},
                   {"kind", recs[k].kind}});
  }
  return {{"runs", runs}, {"aggregate", agg}, {"mean_final", a.mean_final}, {"std_final", a.std_final}};
}

inline std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunOutcome {
  std::vector<SystemResult> systems;
  json manifest;
  std::vector<fs::path> files;
};

/// Writes the manifest, one trace per system, the noisy per-run records and
/// aggregate, and for several systems a summary table.
///
/// Unconverged solves are recorded in the manifest and are not errors.
inline RunOutcome run(const ExperimentConfig& c) {
  c.validate();
  const std::vector<LoadedSystem> systems = load_systems(c);
  RunOutcome out;
  const bool sweep = systems.size() > 1;
  const std::string ext = c.format == OutputFormat::kCsv ? ".csv" : ".json";
  json entries = json::array();
  for (const auto& sys : systems) {
    SystemResult r = run_system(sys, c);
    const fs::path dir = sweep ? c.output_path / r.label : c.output_path;
    const fs::path trace_path = dir / ("trace" + ext);
    if (c.format == OutputFormat::kCsv) {
      write_file(trace_path, trace_csv(r.trace));
    } else {
      write_file(trace_path, trace_json(r.trace).dump(2) + "\n");
    }
    out.files.push_back(trace_path);
    json e = {{"label", r.label},
              {"source", r.source.string()},
              {"n_parameters", r.n_parameters},
              {"n_principal", r.n_principal},
              {"status", to_string(r.trace.status)},
              {"iterations", r.trace.iteration_count()},
              {"energy", r.energy},
              {"trace", fs::relative(trace_path, c.output_path).string()}};
    e["reference_fci"] = r.reference_fci ? json(*r.reference_fci) : json(nullptr);
    if (r.noisy) {
      const NoisyAggregate& a = *r.noisy;
      json seeds = json::array();
      for (const auto& run : a.runs) seeds.push_back(run.seed);
      e["seeds"] = seeds;
      e["mean_final"] = a.mean_final;
      e["std_final"] = a.std_final;
      if (c.format == OutputFormat::kCsv) {
        write_file(dir / "runs.csv", runs_csv(a));
        write_file(dir / "aggregate.csv", aggregate_csv(a));
        out.files.push_back(dir / "runs.csv");
        out.files.push_back(dir / "aggregate.csv");
      } else {
        write_file(dir / "noisy.json", noisy_json(a).dump(2) + "\n");
        out.files.push_back(dir / "noisy.json");
      }
    }
    entries.push_back(e);
    out.systems.push_back(std::move(r));
  }
  if (sweep) {
    std::ostringstream os;
    os << "label,energy,reference_fci,error,status\n";
    for (const auto& r : out.systems) {
      os << r.label << ',' << num(r.energy) << ',' << (r.reference_fci ? num(*r.reference_fci) : "") << ','
         << (r.reference_fci ? num(r.energy - *r.reference_fci) : "") << ',' << to_string(r.trace.status) << '\n';
    }
    write_file(c.output_path / "summary.csv", os.str());
    out.files.push_back(c.output_path / "summary.csv");
  }
  bool all_converged = true;
  for (const auto& r : out.systems) all_converged = all_converged && r.trace.converged();
  out.manifest = {{"config", to_json(c)},
                  {"systems", entries},
                  {"status", all_converged ? "converged" : "not-converged"},
                  {"created", timestamp_utc()}};
  write_file(c.output_path / "manifest.json", out.manifest.dump(2) + "\n");
  out.files.push_back(c.output_path / "manifest.json");
  return out;
}

// ---------------------------------------------------------------- reports

enum class ReportKind { kCost, kStability, kFci };

inline ReportKind parse_report_kind(const std::string& s) {
  if (s == "cost") return ReportKind::kCost;
  if (s == "stability") return ReportKind::kStability;
  if (s == "fci") return ReportKind::kFci;
  throw ConfigError("report kind: expected cost, stability or fci, got '" + s + "'");
}

/// Gate, measurement and fault accounting for the full and principal circuits.
inline json cost_report(const LoadedSystem& sys, const ExperimentConfig& c) {
  const Problem& p = sys.problem;
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), c.f_pps);
  const GateCounts full = count_gates(plan.bipartite_ansatz());
  const GateCounts prin = count_gates(plan);
  const double norm = p.h.pauli().one_norm();
  const MeasurementBudget b = measurement_budget(plan.n_parameters(), norm, c.epsilon, c.f_pps);
  const FaultReport ff = fault_report(full, c.noise);
  const FaultReport fp = fault_report(prin, c.noise);
  const int n = c.zne.effective_order();
  const double lambda_ratio = ff.fault_rate > 0.0 ? fp.fault_rate / ff.fault_rate : 0.0;
  auto side = [](const GateCounts& g, const FaultReport& f, double m) {
    return json{{"singles", g.n_singles},
                {"doubles", g.n_doubles},
                {"cnot", g.n_cnot},
                {"single_qubit_gates", g.n_single_qubit},
                {"fault_locations", g.locations()},
                {"m_res", m},
                {"lambda", f.fault_rate},
                {"p0_product", f.fault_free_product},
                {"p0_exponential", f.fault_free_exponential}};
  };
  return {{"label", sys.label},
          {"n_par", plan.n_parameters()},
          {"n_p", plan.n_principal()},
          {"f_pps", c.f_pps},
          {"epsilon", c.epsilon},
          {"h_one_norm", norm},
          {"full", side(full, ff, b.full)},
          {"principal", side(prin, fp, b.principal)},
          {"m_res_ratio", b.ratio},
          {"cnot_ratio", static_cast<double>(prin.n_cnot) / static_cast<double>(full.n_cnot)},
          {"lambda_ratio", lambda_ratio},
          {"zne_order", n},
          {"zne_bound_factor", std::pow(c.f_pps, n + 1)},
          {"zne_bound_factor_counted", std::pow(lambda_ratio, n + 1)}};
}

/// Jacobian spectrum of the quasi-Newton map at the converged PQE point.
inline json stability_report(const LoadedSystem& sys, const ExperimentConfig& c) {
  const Problem& p = sys.problem;
  const PartitionPlan plan = partition_and_order(p, initialize_parameters(p), 1.0);
  const auto d = plan.principal_denominators();
  const PqeResult res = pqe_solve(p.h, plan.principal_ansatz(), plan.principal_initial(), d, c.pqe);
  const StabilitySpectrum s = stability_spectrum(p.h, plan.principal_ansatz(), res.params, d);
  json ev = json::array();
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    ev.push_back({{"re", s.eigenvalues[k].real()},
                  {"im", s.eigenvalues[k].imag()},
                  {"modulus", s.moduli[k]},
                  {"dominant_parameter", s.dominant_component[k]}});
  }
  return {{"label", sys.label},
          {"fixed_point_status", to_string(res.trace.status)},
          {"iterations", res.trace.iteration_count()},
          {"spectral_radius", s.spectral_radius},
          {"eigenvalues", ev}};
}

inline json fci_report(const LoadedSystem& sys) {
  const Problem& p = sys.problem;
  const double e = oracle::exact_ground_energy(p.h.pauli(), p.n_qubits(), p.so.n_electrons());
  json out = {{"label", sys.label},
              {"n_qubits", p.n_qubits()},
              {"n_electrons", p.so.n_electrons()},
              {"fci_energy", e},
              {"hf_energy", hartree_fock_energy(p.so)}};
  if (sys.sidecar && sys.sidecar->fci_energy) {
    out["sidecar_fci_energy"] = *sys.sidecar->fci_energy;
    out["sidecar_difference"] = e - *sys.sidecar->fci_energy;
  }
  return out;
}

inline json report(ReportKind kind, const ExperimentConfig& c) {
  c.validate();
  json rows = json::array();
  for (const auto& sys : load_systems(c)) {
    switch (kind) {
      case ReportKind::kCost: rows.push_back(cost_report(sys, c)); break;
      case ReportKind::kStability: rows.push_back(stability_report(sys, c)); break;
      case ReportKind::kFci: rows.push_back(fci_report(sys)); break;
    }
  }
  const char* name = kind == ReportKind::kCost ? "cost" : kind == ReportKind::kStability ? "stability" : "fci";
  return {{"kind", name}, {"config", to_json(c)}, {"systems", rows}};
}

/// Flat CSV rendering of a report document.
inline std::string report_csv(const json& r) {
  std::ostringstream os;
  const std::string kind = r.at("kind");
  if (kind == "cost") {
    os << "label,quantity,full,principal,ratio\n";
    for (const auto& s : r.at("systems")) {
      const json& f = s.at("full");
      const json& p = s.at("principal");
      const std::string l = s.at("label");
      auto row = [&](const char* q, double a, double b) { os << l << ',' << q << ',' << num(a) << ',' << num(b)
                                                            << ',' << num(a != 0.0 ? b / a : 0.0) << '\n'; };
      row("parameters", s.at("n_par").get<double>(), s.at("n_p").get<double>());
      row("cnot", f.at("cnot").get<double>(), p.at("cnot").get<double>());
      row("single_qubit_gates", f.at("single_qubit_gates").get<double>(), p.at("single_qubit_gates").get<double>());
      row("m_res", f.at("m_res").get<double>(), p.at("m_res").get<double>());
      row("lambda", f.at("lambda").get<double>(), p.at("lambda").get<double>());
      row("p0_product", f.at("p0_product").get<double>(), p.at("p0_product").get<double>());
      row("p0_exponential", f.at("p0_exponential").get<double>(), p.at("p0_exponential").get<double>());
      os << l << ",zne_bound_factor,1," << num(s.at("zne_bound_factor").get<double>()) << ','
         << num(s.at("zne_bound_factor").get<double>()) << '\n';
    }
  } else if (kind == "stability") {
    os << "label,index,re,im,modulus,dominant_parameter\n";
    for (const auto& s : r.at("systems")) {
      std::size_t k = 0;
      for (const auto& e : s.at("eigenvalues")) {
        os << s.at("label").get<std::string>() << ',' << k++ << ',' << num(e.at("re")) << ',' << num(e.at("im"))
           << ',' << num(e.at("modulus")) << ',' << e.at("dominant_parameter").get<std::size_t>() << '\n';
      }
    }
  } else {
    os << "label,n_qubits,n_electrons,fci_energy,hf_energy,sidecar_fci_energy\n";
    for (const auto& s : r.at("systems")) {
      os << s.at("label").get<std::string>() << ',' << s.at("n_qubits").get<int>() << ','
         << s.at("n_electrons").get<int>() << ',' << num(s.at("fci_energy")) << ',' << num(s.at("hf_energy")) << ','
         << (s.contains("sidecar_fci_energy") ? num(s.at("sidecar_fci_energy")) : "") << '\n';
    }
  }
  return os.str();
}

}  // namespace pqe::experiment
