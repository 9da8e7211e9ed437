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

// Benchmark harness: a run matrix over cases x instance counts x catalogs x
// strategies x backends, its CSV form, plot series and summaries.

#ifndef VMDEPLOY_BENCH_H_
#define VMDEPLOY_BENCH_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vmdeploy/exporters.h"

namespace vmdeploy {

enum class RunStatus { kOptimal, kSat, kInfeasible, kTimeout, kError };
std::string_view RunStatusName(RunStatus s);
// Throws InputError for unknown names.
RunStatus ParseRunStatus(std::string_view name);

struct ExternalSolver {
  ExportFormat format = ExportFormat::kSmt2;
  std::string command;  // template with {file} and {timeout_s}
};

struct BenchConfig {
  std::vector<std::string> cases;           // model files
  std::vector<std::string> offer_catalogs;  // CSV files
  std::vector<std::pair<uint64_t, int>> offer_seeds;  // synthetic (seed, n)
  std::vector<std::string> strategies = {"NONE"};
  std::vector<std::string> backends = {"builtin"};
  double timeout_s = 60.0;
  int workers = 1;
  std::string scale_component;  // empty: no scaling
  int scale_min = 0;
  int scale_max = -1;
  // Solvers usable as "external:<name>" backends.
  std::map<std::string, ExternalSolver> external_solvers;
};

// Parses the JSON config. Relative file names are resolved against
// `base_dir`. Unknown strategies, backends and missing files are errors.
// Throws InputError / ParseError.
BenchConfig ParseBenchConfig(std::string_view json_text,
                             const std::string& base_dir = ".");
BenchConfig LoadBenchConfig(const std::string& path);

struct RunSpec {
  std::string case_file;
  std::optional<int> instances;
  std::string offers;  // catalog file or "seed:S,N"
  std::string strategy;
  std::string backend;  // "builtin" or "external:<name>"
  double timeout_s = 60.0;
};

struct RunRecord {
  std::string case_name;
  std::optional<int> instances;
  int offers = 0;
  std::string strategy;
  std::string backend;
  RunStatus status = RunStatus::kError;
  std::optional<int64_t> cost;
  double time_s = 0.0;
  std::optional<int64_t> nodes;
  std::optional<int> m_used;

  bool operator==(const RunRecord&) const = default;
};

// Cells in canonical order: case, instance count, catalog, strategy,
// backend (each in config order).
std::vector<RunSpec> ExpandMatrix(const BenchConfig& config);

// Runs one cell. Never throws: failures become status Error.
RunRecord RunCell(const RunSpec& spec, const BenchConfig& config);

struct MatrixOptions {
  // When set, the header is written first and every finished cell is
  // appended and flushed; the file is rewritten in canonical order at the end.
  std::string incremental_csv;
  // Called after each finished cell (under the sink lock).
  std::function<void(const RunRecord&)> on_record;
};

// Executes every cell with up to config.workers threads. Records are
// returned in canonical order.
std::vector<RunRecord> RunMatrix(const BenchConfig& config,
                                 const MatrixOptions& options = {});

inline constexpr std::string_view kCsvHeader =
    "case,instances,offers,strategy,backend,status,cost,time_s,nodes,M";

// Time with two decimals; the cost of a Timeout row is written as "-".
std::string WriteCsv(const std::vector<RunRecord>& records);
std::string CsvRow(const RunRecord& r);
// Throws ParseError with the line number.
std::vector<RunRecord> ParseCsv(std::string_view text);

// One whitespace-separated "x time_s" series per (case, strategy, backend),
// sorted by x. x is the offer count, unless the offer count is constant in
// the group and the instance count is not. When both vary, each instance
// count gets its own series with the case label "<case>-i<n>". Timeout and
// Error cells are left out; groups with no points produce no file.
// Returns file name -> content.
std::map<std::string, std::string> PlotData(
    const std::vector<RunRecord>& records);

struct BackendSummary {
  std::string backend;
  int solved = 0;  // Optimal or Infeasible
  int cells = 0;
  // Mean over the cells every backend solved; empty when there are none.
  std::optional<double> mean_common_time_s;
};

struct BestStrategy {
  std::string case_name;
  std::string backend;
  std::string strategy;
  int solved = 0;
  std::optional<double> mean_common_time_s;
};

struct VirtualBest {
  std::string case_name;  // "*" for the whole matrix
  std::string backend;    // most frequent per-cell winner
  std::string strategy;
  int solved = 0;
  int cells = 0;
  double mean_best_time_s = 0.0;
};

struct Summary {
  std::vector<BackendSummary> backends;  // best first
  std::vector<BestStrategy> best_strategies;
  std::vector<VirtualBest> virtual_best;
};

// Backends are ranked by solved cells, then mean time over commonly solved
// cells, then name. The best strategy per (case, backend) uses the same
// rule over that group's strategies.
Summary Summarize(const std::vector<RunRecord>& records);
std::string RenderSummaryText(const Summary& s);
std::string RenderSummaryCsv(const Summary& s);

// Writes results.csv, PlotData/, summary.txt and summary.csv into out_dir.
void WriteBenchOutputs(const std::vector<RunRecord>& records,
                       const std::string& out_dir);

}  // namespace vmdeploy

#endif  // VMDEPLOY_BENCH_H_
