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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/exporters.h"
#include "vmdeploy/solver.h"
#include "vmdeploy/symmetry.h"

namespace vmdeploy {
namespace {

namespace fs = std::filesystem;
using testing::RandomTinyInstance;

int CountOf(const std::string& text, const std::string& needle) {
  int n = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

bool OnPath(const std::string& program) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (!dir.empty() && fs::exists(fs::path(dir) / program)) return true;
  }
  return false;
}

std::string TempDir() {
  std::string pattern = (fs::temp_directory_path() / "vmdeploy-XXXXXX").string();
  const char* dir = mkdtemp(pattern.data());
  return dir ? dir : "";
}

// Two price variables and p_1 >= p_2 as the only constraint.
CopModel PriceOrderModel() {
  CopModel m;
  m.num_columns = 2;
  const VarId p1 = m.AddVariable(VarRef::P(1), 0, 10);
  const VarId p2 = m.AddVariable(VarRef::P(2), 0, 10);
  m.constraints.push_back({{{1, p1}, {-1, p2}}, Sense::kGe, 0,
                           Family::kBreaker});
  m.objective = {p1, p2};
  return m;
}

CopModel OneComponentModel(const char* strategy = "NONE", int columns = 1) {
  ApplicationModel app;
  app.components = {{1, "App", {1, 512, 10}, 1, std::nullopt}};
  OfferCatalog c;
  c.offers = {{1, "small", {2, 1024, 20}, 700},
              {2, "large", {4, 4096, 40}, 1500}};
  return ApplyStrategy(app, Encode(app, c, columns), StrategyByName(strategy));
}

TEST(SmtLibTest, SingleConstraint) {
  const std::string text = ToSmtLib(PriceOrderModel());
  EXPECT_EQ(text.rfind("(set-logic QF_LIA)", 0), 0u);
  EXPECT_EQ(CountOf(text, "(assert (>= p_1 p_2))"), 1);
  EXPECT_EQ(CountOf(text, "(>= p_1 p_2)"), 1);
  EXPECT_NE(text.find("(declare-fun p_1 () Int)"), std::string::npos);
  EXPECT_NE(text.find("(minimize cost)"), std::string::npos);
  EXPECT_NE(text.find("(check-sat)"), std::string::npos);
}

TEST(SmtLibTest, GuardsAndBoundedForm) {
  const CopModel m = OneComponentModel("PR", 3);
  const std::string text = ToSmtLib(m);
  EXPECT_NE(text.find("(assert (=> (= t_1 1) (= p_1 700)))"),
            std::string::npos);
  EXPECT_NE(text.find("(assert (>= p_1 p_2))"), std::string::npos);
  const std::string bounded = ToSmtLibBounded(m, 1500);
  EXPECT_NE(bounded.find("(assert (< cost 1500))"), std::string::npos);
  EXPECT_EQ(bounded.find("(minimize"), std::string::npos);
  EXPECT_NE(bounded.find("(get-value (cost))"), std::string::npos);
}

TEST(ExportTest, Deterministic) {
  for (const char* s : {"NONE", "FV-PR-L-LX", "L-PR-LX"}) {
    const ApplicationModel app =
        LoadModelFile(testing::DataPath("models/secure_billing.json"));
    const OfferCatalog c = GenerateCatalog(5, 6);
    const CopModel a = ApplyStrategy(app, Encode(app, c, 4), StrategyByName(s));
    const CopModel b = ApplyStrategy(app, Encode(app, c, 4), StrategyByName(s));
    for (ExportFormat f :
         {ExportFormat::kSmt2, ExportFormat::kLp, ExportFormat::kFlatCp}) {
      EXPECT_EQ(Export(a, f), Export(b, f)) << s << " " << FormatName(f);
    }
  }
}

TEST(LpTest, RejectsGuardedModel) {
  const CopModel m = OneComponentModel();
  ASSERT_FALSE(m.guarded.empty());
  EXPECT_THROW(ToLp(m), InputError);
  EXPECT_NO_THROW(Export(m, ExportFormat::kLp));
}

TEST(LpTest, OneComponent) {
  const std::string text = ToLp(LinearizeForLp(OneComponentModel()));
  const size_t minimize = text.find("Minimize");
  const size_t subject = text.find("Subject To");
  const size_t binaries = text.find("Binaries");
  const size_t end = text.find("End");
  ASSERT_NE(minimize, std::string::npos);
  ASSERT_NE(subject, std::string::npos);
  ASSERT_NE(binaries, std::string::npos);
  ASSERT_NE(end, std::string::npos);
  EXPECT_LT(minimize, subject);
  EXPECT_LT(subject, binaries);
  EXPECT_LT(binaries, end);
  EXPECT_NE(text.find("obj: p_1"), std::string::npos);
  EXPECT_NE(text.find(" c0:"), std::string::npos);
  EXPECT_NE(text.substr(binaries).find("a_1_1"), std::string::npos);
  EXPECT_NE(text.substr(binaries).find("y_1_2"), std::string::npos);
}

TEST(FlatCpTest, PriceOrderLines) {
  const std::string text = ToFlatCp(OneComponentModel("PR", 3));
  EXPECT_EQ(CountOf(text, "constraint p_1 - p_2 >= 0;"), 1);
  EXPECT_EQ(CountOf(text, "constraint p_2 - p_3 >= 0;"), 1);
  EXPECT_NE(text.find("constraint (t_1 = 2) -> (p_1 = 1500);"),
            std::string::npos);
  EXPECT_NE(text.find("solve minimize cost;"), std::string::npos);
  EXPECT_NE(text.find("var 0..1: a_1_1;"), std::string::npos);
}

TEST(FormatTest, Names) {
  for (ExportFormat f :
       {ExportFormat::kSmt2, ExportFormat::kLp, ExportFormat::kFlatCp}) {
    EXPECT_EQ(ParseFormat(FormatName(f)), f);
  }
  EXPECT_THROW(ParseFormat("mps"), InputError);
}

TEST(ParserTest, Smt) {
  auto parse = [](const char* out) {
    return ParseExternalOutput(ExportFormat::kSmt2, out);
  };
  EXPECT_EQ(parse("unsat\n").status, ExternalStatus::kInfeasible);
  EXPECT_EQ(parse("unknown\n").status, ExternalStatus::kTimeout);
  ExternalResult r = parse("sat\n(objectives\n (cost 1234)\n)\n");
  EXPECT_EQ(r.status, ExternalStatus::kOptimal);
  EXPECT_EQ(r.cost, 1234);
  r = parse("sat\n((cost 99))\n");
  EXPECT_EQ(r.status, ExternalStatus::kSat);
  EXPECT_EQ(r.cost, 99);
  r = parse("(error \"line 3\")\n");
  EXPECT_EQ(r.status, ExternalStatus::kError);
  EXPECT_NE(r.raw_excerpt.find("error"), std::string::npos);
}

TEST(ParserTest, Lp) {
  auto parse = [](const char* out) {
    return ParseExternalOutput(ExportFormat::kLp, out);
  };
  ExternalResult r = parse(
      "Result - Optimal solution found\n\nObjective value:                "
      "850000.00000000\n");
  EXPECT_EQ(r.status, ExternalStatus::kOptimal);
  EXPECT_EQ(r.cost, 850000);
  EXPECT_EQ(parse("Problem is infeasible - 0.01 seconds\n").status,
            ExternalStatus::kInfeasible);
  EXPECT_EQ(parse("Result - Stopped on time limit\n").status,
            ExternalStatus::kTimeout);
  EXPECT_EQ(parse("garbage\n").status, ExternalStatus::kError);
}

TEST(ParserTest, FlatCp) {
  auto parse = [](const char* out) {
    return ParseExternalOutput(ExportFormat::kFlatCp, out);
  };
  ExternalResult r = parse("cost = 30;\n----------\ncost = 12;\n----------\n"
                           "==========\n");
  EXPECT_EQ(r.status, ExternalStatus::kOptimal);
  EXPECT_EQ(r.cost, 12);
  r = parse("cost = 30;\n----------\n");
  EXPECT_EQ(r.status, ExternalStatus::kSat);
  EXPECT_EQ(parse("=====UNSATISFIABLE=====\n").status,
            ExternalStatus::kInfeasible);
  EXPECT_EQ(parse("=====UNKNOWN=====\n").status, ExternalStatus::kTimeout);
}

TEST(RunExternalTest, MissingExecutable) {
  EXPECT_THROW(RunExternal("vmdeploy-no-such-solver {file}", "/tmp/x.smt2",
                           1.0, ExportFormat::kSmt2),
               ExecutableMissingError);
  EXPECT_THROW(RunExternal("/nonexistent/bin/z3 {file}", "/tmp/x.smt2", 1.0,
                           ExportFormat::kSmt2),
               ExecutableMissingError);
}

TEST(RunExternalTest, ShellOutputIsParsed) {
  if (!OnPath("sh")) GTEST_SKIP() << "no sh";
  const std::string dir = TempDir();
  ASSERT_FALSE(dir.empty());
  const std::string file = dir + "/out.txt";
  std::ofstream(file) << "unsat\n";
  const ExternalResult r =
      RunExternal("cat {file}", file, 5.0, ExportFormat::kSmt2);
  EXPECT_EQ(r.status, ExternalStatus::kInfeasible);
  EXPECT_GE(r.wall_time_s, 0.0);
  fs::remove_all(dir);
}

TEST(RunExternalTest, HardKillAfterTimeout) {
  if (!OnPath("sleep")) GTEST_SKIP() << "no sleep";
  // Killed at the timeout plus the grace period.
  const ExternalResult r =
      RunExternal("sleep 30", "/dev/null", 0.5, ExportFormat::kSmt2);
  EXPECT_EQ(r.status, ExternalStatus::kTimeout);
  EXPECT_LT(r.wall_time_s, 15.0);
}

// Conditional oracle checks: skipped when the solver is not installed.
class ExternalOracleTest : public ::testing::Test {
 protected:
  std::vector<std::pair<CopModel, Solution>> Instances(int want) {
    std::vector<std::pair<CopModel, Solution>> out;
    for (uint64_t seed = 300; out.size() < static_cast<size_t>(want); ++seed) {
      auto t = RandomTinyInstance(seed, 3, 3, 3);
      try {
        CopModel m = ApplyStrategy(t.app,
                                   Encode(t.app, t.catalog, t.num_columns),
                                   StrategyByName("FV-PR-L-LX"));
        out.emplace_back(m, BruteForce(m));
      } catch (const InfeasibleError&) {
      } catch (const InputError&) {
      }
    }
    return out;
  }

  void Agree(ExportFormat format, const std::string& command) {
    const std::string dir = TempDir();
    ASSERT_FALSE(dir.empty());
    const std::string file =
        dir + (format == ExportFormat::kFlatCp
                   ? std::string("/model.mzn")
                   : "/model." + std::string(FormatName(format)));
    for (const auto& [m, bf] : Instances(6)) {
      std::ofstream(file, std::ios::trunc) << Export(m, format);
      const ExternalResult r = RunExternal(command, file, 30.0, format);
      if (bf.status == SolveStatus::kInfeasible) {
        EXPECT_EQ(r.status, ExternalStatus::kInfeasible) << r.raw_excerpt;
      } else {
        EXPECT_EQ(r.status, ExternalStatus::kOptimal) << r.raw_excerpt;
        EXPECT_EQ(r.cost, bf.cost);
      }
    }
    fs::remove_all(dir);
  }
};

TEST_F(ExternalOracleTest, Z3) {
  if (!OnPath("z3")) GTEST_SKIP() << "z3 not installed";
  Agree(ExportFormat::kSmt2, "z3 -T:{timeout_s} {file}");
}

TEST_F(ExternalOracleTest, Z3Deepening) {
  if (!OnPath("z3")) GTEST_SKIP() << "z3 not installed";
  const std::string dir = TempDir();
  for (const auto& [m, bf] : Instances(4)) {
    const ExternalResult r =
        SolveSmtByDeepening(m, "z3 -T:{timeout_s} {file}", dir, 30.0);
    if (bf.status == SolveStatus::kInfeasible) {
      EXPECT_EQ(r.status, ExternalStatus::kInfeasible);
    } else {
      EXPECT_EQ(r.status, ExternalStatus::kOptimal);
      EXPECT_EQ(r.cost, bf.cost);
    }
  }
  fs::remove_all(dir);
}

TEST_F(ExternalOracleTest, Cbc) {
  if (!OnPath("cbc")) GTEST_SKIP() << "cbc not installed";
  Agree(ExportFormat::kLp, "cbc {file} sec {timeout_s} solve quit");
}

TEST_F(ExternalOracleTest, MiniZinc) {
  if (!OnPath("minizinc")) GTEST_SKIP() << "minizinc not installed";
  Agree(ExportFormat::kFlatCp,
        "minizinc --solver gecode --time-limit 30000 -a {file}");
}

}  // namespace
}  // namespace vmdeploy
