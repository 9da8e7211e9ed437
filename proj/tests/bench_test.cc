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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "vmdeploy/bench.h"
#include "vmdeploy/errors.h"

namespace vmdeploy {
namespace {

namespace fs = std::filesystem;
using testing::DataPath;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string TempDir() {
  std::string pattern = (fs::temp_directory_path() / "vmdeploy-XXXXXX").string();
  const char* dir = mkdtemp(pattern.data());
  return dir ? dir : "";
}

RunRecord Record(std::string case_name, std::optional<int> instances,
                 int offers, std::string strategy, std::string backend,
                 RunStatus status, double time_s,
                 std::optional<int64_t> cost = {}) {
  RunRecord r;
  r.case_name = std::move(case_name);
  r.instances = instances;
  r.offers = offers;
  r.strategy = std::move(strategy);
  r.backend = std::move(backend);
  r.status = status;
  r.time_s = time_s;
  r.cost = cost;
  return r;
}

TEST(CsvTest, EmptyIsHeaderOnly) {
  EXPECT_EQ(WriteCsv({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(ParseCsv(WriteCsv({})).empty());
}

TEST(CsvTest, TimeoutWritesDash) {
  RunRecord r = Record("Oryx2", {}, 40, "NONE", "builtin", RunStatus::kTimeout,
                       60.0, 123456);
  r.nodes = 77;
  r.m_used = 13;
  EXPECT_EQ(CsvRow(r), "Oryx2,,40,NONE,builtin,Timeout,-,60.00,77,13");
  const auto back = ParseCsv(WriteCsv({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_FALSE(back[0].cost.has_value());
  EXPECT_EQ(back[0].nodes, 77);
  EXPECT_EQ(back[0].m_used, 13);
}

TEST(CsvTest, TimeRoundTrip) {
  const RunRecord r = Record("Wordpress", 3, 20, "NONE", "OR-Tools",
                             RunStatus::kOptimal, 3.49, 819200);
  const auto back = ParseCsv(WriteCsv({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
  EXPECT_DOUBLE_EQ(back[0].time_s, 3.49);
}

TEST(CsvTest, RoundTripAllStatuses) {
  std::vector<RunRecord> records;
  for (RunStatus s : {RunStatus::kOptimal, RunStatus::kSat,
                      RunStatus::kInfeasible, RunStatus::kError}) {
    RunRecord r = Record("c", 2, 10, "FV-PR", "external:z3", s, 1.25);
    if (s == RunStatus::kOptimal || s == RunStatus::kSat) r.cost = 42;
    r.nodes = 5;
    records.push_back(r);
  }
  EXPECT_EQ(ParseCsv(WriteCsv(records)), records);
}

TEST(CsvTest, ParseErrors) {
  const std::string header = std::string(kCsvHeader) + "\n";
  EXPECT_THROW(ParseCsv("case,offers\n"), ParseError);
  try {
    ParseCsv(header + "a,,1,NONE,builtin,Optimal,1,0.1,,\na,,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), "line 3");
  }
  EXPECT_THROW(ParseCsv(header + "a,,1,NONE,builtin,Solved,1,0.1,,\n"),
               ParseError);
  EXPECT_THROW(ParseCsv(header + "a,,1,NONE,builtin,Optimal,1,fast,,\n"),
               ParseError);
}

TEST(CsvTest, ReferenceFixture) {
  const std::string text = ReadFile(DataPath("fixtures/reference_runs.csv"));
  const std::vector<RunRecord> records = ParseCsv(text);
  EXPECT_EQ(records.size(), 140u);
  EXPECT_EQ(WriteCsv(records), text);
  EXPECT_EQ(records[0].case_name, "Wordpress");
  EXPECT_EQ(records[0].instances, 3);
  EXPECT_EQ(records[0].offers, 20);
  EXPECT_EQ(records[0].backend, "OR-Tools");
  EXPECT_DOUBLE_EQ(records[0].time_s, 3.49);
}

TEST(PlotDataTest, OfferSeries) {
  std::vector<RunRecord> records;
  const int offers[] = {500, 20, 250, 40};
  const double by_offers[] = {396.58, 128.67, 294.25, 154.11};
  for (int i = 0; i < 4; ++i) {
    records.push_back(Record("Oryx2", {}, offers[i], "NONE", "Chuffed",
                             RunStatus::kOptimal, by_offers[i]));
  }
  const auto files = PlotData(records);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files.begin()->first, "Oryx2_NONE_Chuffed.dat");
  EXPECT_EQ(files.begin()->second,
            "20 128.67\n40 154.11\n250 294.25\n500 396.58\n");
}

TEST(PlotDataTest, TimeoutsLeftOut) {
  std::vector<RunRecord> records = {
      Record("W", 3, 20, "PR", "b", RunStatus::kOptimal, 1.0),
      Record("W", 3, 40, "PR", "b", RunStatus::kTimeout, 60.0),
      Record("X", 3, 40, "PR", "b", RunStatus::kTimeout, 60.0),
  };
  const auto files = PlotData(records);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files.at("W_PR_b.dat"), "20 1.00\n");
  EXPECT_TRUE(PlotData({}).empty());
}

TEST(PlotDataTest, InstanceAxis) {
  std::vector<RunRecord> records;
  for (int i = 3; i <= 5; ++i) {
    records.push_back(Record("Wordpress", i, 20, "FV-PR", "external:z3",
                             RunStatus::kOptimal, i * 1.5));
  }
  const auto files = PlotData(records);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files.begin()->first, "Wordpress_FV-PR_external-z3.dat");
  EXPECT_EQ(files.begin()->second, "3 4.50\n4 6.00\n5 7.50\n");

  // Both axes vary: one series per instance count.
  records.push_back(Record("Wordpress", 3, 40, "FV-PR", "external:z3",
                           RunStatus::kOptimal, 9.0));
  const auto split = PlotData(records);
  EXPECT_EQ(split.size(), 3u);
  EXPECT_EQ(split.at("Wordpress-i3_FV-PR_external-z3.dat"),
            "20 4.50\n40 9.00\n");
}

TEST(PlotDataTest, FixtureSeriesAreMonotoneForChuffedOryx2) {
  const auto records =
      ParseCsv(ReadFile(DataPath("fixtures/reference_runs.csv")));
  const auto files = PlotData(records);
  const std::string& series = files.at("Oryx2_NONE_Chuffed.dat");
  EXPECT_EQ(series, "20 128.67\n40 154.11\n250 294.25\n500 396.58\n");
}

TEST(SummarizeTest, MoreSolvedWins) {
  std::vector<RunRecord> records = {
      Record("c", {}, 20, "X", "b", RunStatus::kOptimal, 2.0),
      Record("c", {}, 40, "X", "b", RunStatus::kOptimal, 3.0),
      Record("c", {}, 20, "Y", "b", RunStatus::kOptimal, 4.0),
      Record("c", {}, 40, "Y", "b", RunStatus::kTimeout, 60.0),
  };
  const Summary s = Summarize(records);
  ASSERT_EQ(s.best_strategies.size(), 1u);
  EXPECT_EQ(s.best_strategies[0].strategy, "X");
  EXPECT_EQ(s.best_strategies[0].solved, 2);
  EXPECT_DOUBLE_EQ(*s.best_strategies[0].mean_common_time_s, 2.0);
}

TEST(SummarizeTest, SingleRecord) {
  const Summary s = Summarize(
      {Record("c", {}, 20, "NONE", "builtin", RunStatus::kInfeasible, 0.5)});
  ASSERT_EQ(s.backends.size(), 1u);
  EXPECT_EQ(s.backends[0].backend, "builtin");
  EXPECT_EQ(s.backends[0].solved, 1);
  ASSERT_EQ(s.best_strategies.size(), 1u);
  EXPECT_EQ(s.best_strategies[0].strategy, "NONE");
  ASSERT_FALSE(s.virtual_best.empty());
  EXPECT_EQ(s.virtual_best.back().case_name, "*");
  EXPECT_EQ(s.virtual_best.back().backend, "builtin");
  EXPECT_FALSE(RenderSummaryText(s).empty());
  EXPECT_EQ(RenderSummaryCsv(s).rfind(
                "kind,case,backend,strategy,solved,cells,time_s\n", 0),
            0u);
}

TEST(SummarizeTest, FixtureRanking) {
  const auto records =
      ParseCsv(ReadFile(DataPath("fixtures/reference_runs.csv")));
  const Summary s = Summarize(records);
  ASSERT_EQ(s.backends.size(), 5u);
  EXPECT_EQ(s.backends.front().backend, "OR-Tools");
  EXPECT_EQ(s.backends.back().backend, "CPLEX");
  int total = 0;
  for (const BackendSummary& b : s.backends) {
    EXPECT_EQ(b.cells, 28);
    total += b.solved;
  }
  EXPECT_EQ(total, 91);
}

TEST(ConfigTest, ParseAndExpand) {
  const std::string base = DataPath("bench");
  const BenchConfig c = ParseBenchConfig(R"({
    "cases": ["../models/minimal.json"],
    "offer_catalogs": ["../offers/offers_20.csv"],
    "strategies": ["NONE", "PR"],
    "backends": ["builtin"]
  })",
                                         base);
  const auto cells = ExpandMatrix(c);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].strategy, "NONE");
  EXPECT_EQ(cells[1].strategy, "PR");
  EXPECT_DOUBLE_EQ(cells[0].timeout_s, 60.0);
  EXPECT_FALSE(cells[0].instances.has_value());
}

TEST(ConfigTest, ScalingAndSeeds) {
  const BenchConfig c = LoadBenchConfig(DataPath("bench/desk.json"));
  // Only WordPress scales: 2 instance counts there, 1 elsewhere.
  EXPECT_EQ(ExpandMatrix(c).size(), 2u * 2 * 4 + 3u * 2 * 4);
  const BenchConfig all = ParseBenchConfig(R"({
    "cases": ["../models/minimal.json"],
    "offer_seeds": [{"seed": 1, "n": 5}, {"seed": 2, "n": 8}],
    "strategies": ["ALL"]
  })",
                                           DataPath("bench"));
  const auto cells = ExpandMatrix(all);
  EXPECT_EQ(cells.size(), 2u * 20);
  EXPECT_EQ(cells[0].offers, "seed:1,5");
}

TEST(ConfigTest, Errors) {
  const std::string base = DataPath("bench");
  EXPECT_THROW(ParseBenchConfig(R"({"cases": ["../models/minimal.json"],
      "offer_catalogs": ["../offers/offers_20.csv"],
      "strategies": ["PR-FV"]})",
                                base),
               InputError);
  EXPECT_THROW(ParseBenchConfig(R"({"cases": ["../models/nope.json"],
      "offer_catalogs": ["../offers/offers_20.csv"]})",
                                base),
               InputError);
  EXPECT_THROW(ParseBenchConfig(R"({"cases": ["../models/minimal.json"],
      "offer_catalogs": ["../offers/offers_20.csv"],
      "backends": ["external:gurobi"]})",
                                base),
               InputError);
  EXPECT_THROW(ParseBenchConfig(R"({"cases": ["../models/minimal.json"],
      "offer_catalogs": ["../offers/offers_20.csv"], "colour": 1})",
                                base),
               InputError);
  EXPECT_THROW(ParseBenchConfig("[1, 2", base), InputError);
}

TEST(RunCellTest, BuiltinAndFailure) {
  BenchConfig config;
  RunSpec spec{DataPath("models/minimal.json"), std::nullopt,
               DataPath("offers/offers_20.csv"), "FV-PR", "builtin", 10.0};
  const RunRecord r = RunCell(spec, config);
  EXPECT_EQ(r.case_name, "Minimal");
  EXPECT_EQ(r.status, RunStatus::kOptimal);
  EXPECT_EQ(r.cost, 5800);
  EXPECT_EQ(r.offers, 20);
  EXPECT_EQ(r.m_used, 1);
  EXPECT_TRUE(r.nodes.has_value());

  spec.case_file = DataPath("models/missing.json");
  const RunRecord bad = RunCell(spec, config);
  EXPECT_EQ(bad.status, RunStatus::kError);

  spec = {DataPath("models/oryx2.json"), std::nullopt,
          DataPath("offers/offers_40.csv"), "NONE", "builtin", 0.2};
  const RunRecord slow = RunCell(spec, config);
  EXPECT_EQ(slow.status, RunStatus::kTimeout);
  EXPECT_EQ(CsvRow(slow).find(",Timeout,-,") != std::string::npos, true);
}

TEST(RunMatrixTest, IncrementalFlushAndOrder) {
  const std::string dir = TempDir();
  ASSERT_FALSE(dir.empty());
  BenchConfig config = ParseBenchConfig(R"({
    "cases": ["../models/minimal.json", "../models/secure_billing.json"],
    "offer_catalogs": ["../offers/offers_20.csv"],
    "offer_seeds": [{"seed": 4, "n": 6}],
    "strategies": ["FV-PR", "FV-PR-L-LX"],
    "timeout_s": 60,
    "workers": 3
  })",
                                        DataPath("bench"));
  MatrixOptions options;
  options.incremental_csv = dir + "/results.csv";
  std::mutex mu;
  std::vector<size_t> lines_seen;
  options.on_record = [&](const RunRecord&) {
    // The file already holds this record when the callback runs.
    std::lock_guard<std::mutex> lock(mu);
    const std::string text = ReadFile(options.incremental_csv);
    lines_seen.push_back(std::count(text.begin(), text.end(), '\n'));
  };
  const std::vector<RunRecord> records = RunMatrix(config, options);
  ASSERT_EQ(records.size(), 8u);
  std::sort(lines_seen.begin(), lines_seen.end());
  for (size_t i = 0; i < lines_seen.size(); ++i) {
    EXPECT_EQ(lines_seen[i], i + 2);  // header plus i + 1 rows
  }
  EXPECT_EQ(ReadFile(options.incremental_csv), WriteCsv(records));

  const auto cells = ExpandMatrix(config);
  for (size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(records[i].strategy, cells[i].strategy);
  }
  // Breakers keep the optimum.
  for (size_t i = 0; i + 1 < records.size(); i += 2) {
    EXPECT_EQ(records[i].status, RunStatus::kOptimal);
    EXPECT_EQ(records[i].cost, records[i + 1].cost);
  }

  WriteBenchOutputs(records, dir);
  EXPECT_TRUE(fs::exists(dir + "/summary.txt"));
  EXPECT_TRUE(fs::exists(dir + "/summary.csv"));
  EXPECT_TRUE(fs::is_directory(dir + "/PlotData"));
  EXPECT_FALSE(fs::is_empty(dir + "/PlotData"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace vmdeploy
