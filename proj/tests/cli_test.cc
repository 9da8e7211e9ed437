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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "vmdeploy/cli.h"

namespace vmdeploy {
namespace {

namespace fs = std::filesystem;
using testing::DataPath;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vmdeploy");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string CostLine(const std::string& out) {
  for (const std::string& line : Lines(out)) {
    if (line.rfind("cost=", 0) == 0) return line;
  }
  return "";
}

std::string TempDir() {
  std::string pattern = (fs::temp_directory_path() / "vmdeploy-XXXXXX").string();
  const char* dir = mkdtemp(pattern.data());
  return dir ? dir : "";
}

TEST(CliTest, Strategies) {
  const CliRun r = Cli({"strategies"});
  EXPECT_EQ(r.code, kExitSuccess);
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 20u);
  EXPECT_EQ(lines.front(), "NONE");
  EXPECT_NE(std::find(lines.begin(), lines.end(), "FV-PR-L-LX"), lines.end());
}

TEST(CliTest, UsageErrors) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{}, {"frobnicate"}, {"strategies", "--bogus"},
        {"solve", DataPath("models/minimal.json")}}) {
    const CliRun r = Cli(args);
    EXPECT_EQ(r.code, kExitInputError);
    EXPECT_NE(r.err.find("error"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
  }
}

TEST(CliTest, SolveMinimal) {
  const CliRun r = Cli({"solve", DataPath("models/minimal.json"), "--offers",
                     DataPath("offers/offers_20.csv")});
  EXPECT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_NE(r.out.find("status=Optimal\n"), std::string::npos);
  EXPECT_EQ(CostLine(r.out), "cost=5800");
  EXPECT_NE(r.out.find("1:t2.nano"), std::string::npos);
  EXPECT_NE(r.out.find("strategy=NONE"), std::string::npos);
}

TEST(CliTest, SolveStrategyDoesNotChangeCost) {
  std::string want;
  for (const char* s : {"NONE", "FV-PR", "PR-L-LX", "FV-L-PR-LX"}) {
    const CliRun r = Cli({"solve", DataPath("models/secure_billing.json"),
                       "--offers", "seed:1,10", "--strategy", s});
    EXPECT_EQ(r.code, kExitSuccess) << s << " " << r.err;
    if (want.empty()) want = CostLine(r.out);
    EXPECT_EQ(CostLine(r.out), want) << s;
  }
  EXPECT_FALSE(want.empty());
}

TEST(CliTest, SolveExitCodes) {
  // Too small: the conflict clique does not fit.
  CliRun r = Cli({"solve", DataPath("models/wordpress.json"), "--offers",
               "seed:1,5", "--M", "2"});
  EXPECT_EQ(r.code, kExitInfeasible);
  EXPECT_NE(r.out.find("status=Infeasible"), std::string::npos);

  r = Cli({"solve", DataPath("models/oryx2.json"), "--offers",
           DataPath("offers/offers_40.csv"), "--timeout", "0.2"});
  EXPECT_EQ(r.code, kExitTimeout);
  EXPECT_NE(r.out.find("status=Timeout"), std::string::npos);

  r = Cli({"solve", DataPath("models/minimal.json"), "--offers",
           DataPath("offers/offers_20.csv"), "--strategy", "XY"});
  EXPECT_EQ(r.code, kExitInputError);

  r = Cli({"solve", "/nonexistent.json", "--offers", "seed:1,5"});
  EXPECT_EQ(r.code, kExitInputError);
}

TEST(CliTest, ValidateAndClique) {
  CliRun r = Cli({"validate", DataPath("models/wordpress.json")});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("errors=0"), std::string::npos);

  const std::string dir = TempDir();
  const std::string bad = dir + "/bad.json";
  std::ofstream(bad) << R"({"name": "bad", "components": [
      {"name": "A", "cpu": 1, "memory": 1, "storage": 1},
      {"name": "B", "cpu": 1, "memory": 1, "storage": 1}],
    "constraints": [{"kind": "conflict", "i": "A", "j": "B"},
                    {"kind": "colocation", "i": "A", "j": "B"}]})";
  r = Cli({"validate", bad});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.out.find("error: "), std::string::npos);
  EXPECT_NE(r.out.find("errors=1"), std::string::npos);

  r = Cli({"clique", DataPath("models/wordpress.json")});
  EXPECT_EQ(r.code, kExitSuccess);
  EXPECT_NE(r.out.find("clique=MySQL,DNS_LoadBalancer,Varnish\n"),
            std::string::npos);
  EXPECT_NE(r.out.find("weight=4\n"), std::string::npos);
  EXPECT_NE(r.out.find("fixed_columns=4\n"), std::string::npos);
  EXPECT_NE(r.out.find("fixed_entries=12\n"), std::string::npos);
  fs::remove_all(dir);
}

TEST(CliTest, Export) {
  const std::string dir = TempDir();
  for (const char* format : {"smt2", "lp", "flatcp"}) {
    const std::string file = dir + "/m." + format;
    const CliRun r = Cli({"export", DataPath("models/minimal.json"), "--offers",
                       "seed:2,4", "--format", format, "--out", file,
                       "--strategy", "PR", "--M", "2"});
    EXPECT_EQ(r.code, kExitSuccess) << r.err;
    EXPECT_TRUE(fs::exists(file));
    EXPECT_GT(fs::file_size(file), 100u);
  }
  const CliRun bad = Cli({"export", DataPath("models/minimal.json"), "--offers",
                       "seed:2,4", "--format", "mps", "--out",
                       dir + "/m.mps"});
  EXPECT_EQ(bad.code, kExitInputError);
  fs::remove_all(dir);
}

TEST(CliTest, Bench) {
  const std::string dir = TempDir();
  const std::string config = dir + "/config.json";
  std::ofstream(config) << "{\"cases\": [\"" << DataPath("models/minimal.json")
                        << "\"], \"offer_seeds\": [{\"seed\": 1, \"n\": 4}],"
                        << " \"strategies\": [\"NONE\", \"PR\"]}";
  const CliRun r = Cli({"bench", "--config", config, "--out", dir + "/out"});
  EXPECT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_NE(r.out.find("cells=2"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir + "/out/results.csv"));
  EXPECT_TRUE(fs::exists(dir + "/out/summary.txt"));

  const CliRun missing = Cli({"bench", "--config", dir + "/none.json"});
  EXPECT_EQ(missing.code, kExitInputError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace vmdeploy
