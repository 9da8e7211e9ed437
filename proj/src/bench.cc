// Copyright 2026 The vmdeploy Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <stdlib.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vmdeploy/bench.h"
#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/solver.h"
#include "vmdeploy/symmetry.h"

namespace vmdeploy {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view kBuiltin = "builtin";
constexpr std::string_view kExternalPrefix = "external:";

std::string Resolve(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
T Field(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(key, std::string("wrong type: ") + e.what());
  }
}

std::string CatalogSpec(uint64_t seed, int n) {
  return "seed:" + std::to_string(seed) + "," + std::to_string(n);
}

std::string ExternalName(const std::string& backend) {
  return backend.substr(kExternalPrefix.size());
}

RunStatus FromSolve(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return RunStatus::kOptimal;
    case SolveStatus::kInfeasible:
      return RunStatus::kInfeasible;
    case SolveStatus::kTimeout:
      return RunStatus::kTimeout;
  }
  return RunStatus::kError;
}

RunStatus FromExternal(ExternalStatus s) {
  switch (s) {
    case ExternalStatus::kOptimal:
      return RunStatus::kOptimal;
    case ExternalStatus::kSat:
      return RunStatus::kSat;
    case ExternalStatus::kInfeasible:
      return RunStatus::kInfeasible;
    case ExternalStatus::kTimeout:
      return RunStatus::kTimeout;
    case ExternalStatus::kError:
      return RunStatus::kError;
  }
  return RunStatus::kError;
}

void RunExternalCell(const CopModel& m, const ExternalSolver& solver,
                     double timeout_s, RunRecord& r) {
  std::string dir_template =
      (fs::temp_directory_path() / "vmdeploy-XXXXXX").string();
  if (mkdtemp(dir_template.data()) == nullptr) {
    throw std::runtime_error("cannot create a temporary directory");
  }
  const fs::path dir(dir_template);
  const fs::path file = dir / ("model." + std::string(FormatName(solver.format)));
  {
    std::ofstream out(file);
    out << Export(m, solver.format);
  }
  ExternalResult x;
  try {
    x = RunExternal(solver.command, file.string(), timeout_s, solver.format);
  } catch (...) {
    fs::remove_all(dir);
    throw;
  }
  fs::remove_all(dir);
  r.status = FromExternal(x.status);
  r.cost = x.cost;
  r.time_s = x.wall_time_s;
}

}  // namespace

std::string_view RunStatusName(RunStatus s) {
  switch (s) {
    case RunStatus::kOptimal:
      return "Optimal";
    case RunStatus::kSat:
      return "Sat";
    case RunStatus::kInfeasible:
      return "Infeasible";
    case RunStatus::kTimeout:
      return "Timeout";
    case RunStatus::kError:
      return "Error";
  }
  return "?";
}

RunStatus ParseRunStatus(std::string_view name) {
  for (RunStatus s : {RunStatus::kOptimal, RunStatus::kSat,
                      RunStatus::kInfeasible, RunStatus::kTimeout,
                      RunStatus::kError}) {
    if (RunStatusName(s) == name) return s;
  }
  throw InputError("unknown run status '" + std::string(name) + "'");
}

BenchConfig ParseBenchConfig(std::string_view json_text,
                             const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!j.is_object()) throw ParseError("(root)", "config must be an object");
  static const std::set<std::string> kKeys = {
      "cases",     "offer_catalogs", "offer_seeds",     "strategies",
      "backends",  "timeout_s",      "workers",         "scale_component",
      "scale_range", "external_solvers"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ParseError(key, "unknown config key");
  }

  BenchConfig c;
  for (const std::string& path :
       Field<std::vector<std::string>>(j, "cases", {})) {
    c.cases.push_back(Resolve(base_dir, path));
  }
  for (const std::string& path :
       Field<std::vector<std::string>>(j, "offer_catalogs", {})) {
    c.offer_catalogs.push_back(Resolve(base_dir, path));
  }
  if (j.contains("offer_seeds")) {
    const json& seeds = j.at("offer_seeds");
    if (!seeds.is_array()) throw ParseError("offer_seeds", "must be an array");
    for (size_t idx = 0; idx < seeds.size(); ++idx) {
      const std::string where = "offer_seeds[" + std::to_string(idx) + "]";
      const json& s = seeds[idx];
      if (!s.is_object() || !s.contains("seed") || !s.contains("n") ||
          !s["seed"].is_number_unsigned() || !s["n"].is_number_integer()) {
        throw ParseError(where, "expected {\"seed\": <uint>, \"n\": <int>}");
      }
      const int n = s["n"].get<int>();
      if (n < 1) throw ParseError(where + ".n", "must be >= 1");
      c.offer_seeds.emplace_back(s["seed"].get<uint64_t>(), n);
    }
  }
  c.strategies = Field<std::vector<std::string>>(j, "strategies", c.strategies);
  if (c.strategies.size() == 1 && c.strategies.front() == "ALL") {
    c.strategies.clear();
    for (const Strategy& s : EnumerateStrategies()) c.strategies.push_back(s.name);
  }
  for (const std::string& s : c.strategies) StrategyByName(s);
  c.backends = Field<std::vector<std::string>>(j, "backends", c.backends);
  c.timeout_s = Field<double>(j, "timeout_s", c.timeout_s);
  if (c.timeout_s <= 0) throw ParseError("timeout_s", "must be > 0");
  c.workers = Field<int>(j, "workers", c.workers);
  if (c.workers < 1) throw ParseError("workers", "must be >= 1");
  c.scale_component = Field<std::string>(j, "scale_component", "");
  if (j.contains("scale_range")) {
    const auto range = Field<std::vector<int>>(j, "scale_range", {});
    if (range.size() != 2 || range[0] < 1 || range[1] < range[0]) {
      throw ParseError("scale_range", "expected [lo, hi] with 1 <= lo <= hi");
    }
    c.scale_min = range[0];
    c.scale_max = range[1];
  }
  if (!c.scale_component.empty() && c.scale_max < c.scale_min) {
    throw ParseError("scale_range", "required with scale_component");
  }
  if (j.contains("external_solvers")) {
    for (const auto& [name, value] : j.at("external_solvers").items()) {
      const std::string where = "external_solvers." + name;
      if (!value.is_object() || !value.contains("format") ||
          !value.contains("command")) {
        throw ParseError(where, "expected {\"format\": ..., \"command\": ...}");
      }
      ExternalSolver s;
      s.format = ParseFormat(value["format"].get<std::string>());
      s.command = value["command"].get<std::string>();
      c.external_solvers[name] = s;
    }
  }
  for (const std::string& b : c.backends) {
    if (b == kBuiltin) continue;
    if (b.rfind(kExternalPrefix, 0) == 0 &&
        c.external_solvers.count(ExternalName(b))) {
      continue;
    }
    throw ParseError("backends", "unknown backend '" + b + "'");
  }
  for (const std::string& f : c.cases) {
    if (!fs::exists(f)) throw InputError("case file not found: " + f);
  }
  for (const std::string& f : c.offer_catalogs) {
    if (!fs::exists(f)) throw InputError("catalog file not found: " + f);
  }
  if (c.cases.empty()) throw ParseError("cases", "at least one case needed");
  if (c.offer_catalogs.empty() && c.offer_seeds.empty()) {
    throw ParseError("offer_catalogs", "no catalogs or offer_seeds given");
  }
  return c;
}

BenchConfig LoadBenchConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseBenchConfig(buffer.str(),
                          fs::path(path).parent_path().string().empty()
                              ? "."
                              : fs::path(path).parent_path().string());
}

std::vector<RunSpec> ExpandMatrix(const BenchConfig& config) {
  std::vector<std::string> catalogs = config.offer_catalogs;
  for (const auto& [seed, n] : config.offer_seeds) {
    catalogs.push_back(CatalogSpec(seed, n));
  }
  std::vector<RunSpec> cells;
  for (const std::string& case_file : config.cases) {
    std::vector<std::optional<int>> counts = {std::nullopt};
    if (!config.scale_component.empty()) {
      const ApplicationModel app = LoadModelFile(case_file);
      if (app.FindComponent(config.scale_component) != 0) {
        counts.clear();
        for (int i = config.scale_min; i <= config.scale_max; ++i) {
          counts.push_back(i);
        }
      }
    }
    for (const std::optional<int>& instances : counts) {
      for (const std::string& catalog : catalogs) {
        for (const std::string& strategy : config.strategies) {
          for (const std::string& backend : config.backends) {
            cells.push_back({case_file, instances, catalog, strategy, backend,
                             config.timeout_s});
          }
        }
      }
    }
  }
  return cells;
}

RunRecord RunCell(const RunSpec& spec, const BenchConfig& config) {
  RunRecord r;
  r.case_name = fs::path(spec.case_file).stem().string();
  r.instances = spec.instances;
  r.strategy = spec.strategy;
  r.backend = spec.backend;
  try {
    ApplicationModel app = LoadModelFile(spec.case_file);
    r.case_name = app.name;
    if (spec.instances) {
      app = WithInstancesLb(std::move(app), config.scale_component,
                            *spec.instances);
    }
    const OfferCatalog catalog = ResolveCatalog(spec.offers);
    r.offers = catalog.size();
    const int num_columns = SurrogateVmCount(app);
    r.m_used = num_columns;
    CopModel m;
    try {
      m = ApplyStrategy(app, Encode(app, catalog, num_columns),
                        StrategyByName(spec.strategy));
    } catch (const InfeasibleError&) {
      r.status = RunStatus::kInfeasible;
      return r;
    }
    if (spec.backend == kBuiltin) {
      SolverConfig sc;
      sc.timeout_s = spec.timeout_s;
      const SolveResult res = SolveBranchAndBound(m, sc);
      r.status = FromSolve(res.solution.status);
      r.cost = res.solution.cost;
      r.time_s = res.stats.wall_time_s;
      r.nodes = res.stats.nodes_explored;
    } else {
      RunExternalCell(m, config.external_solvers.at(ExternalName(spec.backend)),
                      spec.timeout_s, r);
    }
  } catch (const std::exception&) {
    r.status = RunStatus::kError;
    r.cost.reset();
    r.nodes.reset();
  }
  return r;
}

std::vector<RunRecord> RunMatrix(const BenchConfig& config,
                                 const MatrixOptions& options) {
  const std::vector<RunSpec> cells = ExpandMatrix(config);
  std::vector<RunRecord> records(cells.size());
  std::ofstream sink;
  if (!options.incremental_csv.empty()) {
    sink.open(options.incremental_csv, std::ios::trunc);
    if (!sink) throw InputError("cannot write " + options.incremental_csv);
    sink << kCsvHeader << '\n' << std::flush;
  }
  std::mutex sink_mutex;
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t idx = next++; idx < cells.size(); idx = next++) {
      RunRecord r = RunCell(cells[idx], config);
      std::lock_guard<std::mutex> lock(sink_mutex);
      if (sink.is_open()) sink << CsvRow(r) << '\n' << std::flush;
      if (options.on_record) options.on_record(r);
      records[idx] = std::move(r);
    }
  };
  const int threads =
      std::max(1, std::min<int>(config.workers, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  if (sink.is_open()) {
    sink.close();
    std::ofstream out(options.incremental_csv, std::ios::trunc);
    out << WriteCsv(records);
  }
  return records;
}

void WriteBenchOutputs(const std::vector<RunRecord>& records,
                       const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir / "PlotData");
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
  };
  write(dir / "results.csv", WriteCsv(records));
  for (const auto& [name, content] : PlotData(records)) {
    write(dir / "PlotData" / name, content);
  }
  const Summary summary = Summarize(records);
  write(dir / "summary.txt", RenderSummaryText(summary));
  write(dir / "summary.csv", RenderSummaryCsv(summary));
}

}  // namespace vmdeploy
