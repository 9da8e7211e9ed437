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

#include <set>
#include <string>

#include <gtest/gtest.h>

#include "oracles.h"
#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/solver.h"
#include "vmdeploy/symmetry.h"

namespace vmdeploy {
namespace {

using testing::DataPath;
using testing::RandomTinyInstance;
using testing::TinyInstance;

ApplicationModel OneComponent(ResourceVector req = {1, 512, 10}) {
  ApplicationModel app;
  app.name = "one";
  app.components = {{1, "App", req, 1, std::nullopt}};
  return app;
}

OfferCatalog Offers(std::vector<int64_t> prices) {
  OfferCatalog c;
  for (size_t i = 0; i < prices.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    c.offers.push_back({id, "vm" + std::to_string(id), {4, 4096, 100},
                        prices[i]});
  }
  return c;
}

// Encoded random instances that fit the enumeration cap.
std::vector<std::pair<TinyInstance, CopModel>> EncodedInstances(int want) {
  std::vector<std::pair<TinyInstance, CopModel>> out;
  for (uint64_t seed = 1; out.size() < static_cast<size_t>(want); ++seed) {
    TinyInstance t = RandomTinyInstance(seed);
    try {
      CopModel m = Encode(t.app, t.catalog, t.num_columns);
      if (CandidateCount(m) <= 1e7) out.emplace_back(t, std::move(m));
    } catch (const InfeasibleError&) {
    } catch (const InputError&) {
    }
  }
  return out;
}

TEST(BranchAndBoundTest, OneComponentOneOffer) {
  const CopModel m = Encode(OneComponent(), Offers({4200}), 1);
  const SolveResult r = SolveBranchAndBound(m);
  EXPECT_EQ(r.solution.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.solution.cost, 4200);
  EXPECT_GE(r.stats.nodes_explored, 1);
  EXPECT_EQ(r.stats.best_bound_at_end, 4200);
  EXPECT_EQ(r.stats.incumbent_trace, (std::vector<int64_t>{4200}));
  EXPECT_TRUE(Check(m, r.solution.valuation).feasible);
}

TEST(BranchAndBoundTest, Infeasible) {
  ApplicationModel app = OneComponent();
  app.components.push_back({2, "Db", {1, 512, 10}, 1, std::nullopt});
  app.constraints = {Conflict{1, 2}};
  EXPECT_THROW(Encode(app, Offers({10}), 1), InfeasibleError);

  // Too big for every offer: only the search finds out.
  const CopModel m = Encode(OneComponent({16, 512, 10}), Offers({10, 20}), 2);
  const SolveResult r = SolveBranchAndBound(m);
  EXPECT_EQ(r.solution.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(r.solution.cost.has_value());
  EXPECT_FALSE(r.stats.best_bound_at_end.has_value());
  EXPECT_EQ(BruteForce(m).status, SolveStatus::kInfeasible);
}

TEST(BranchAndBoundTest, MatchesBruteForce) {
  int feasible = 0;
  for (const auto& [t, m] : EncodedInstances(60)) {
    const Solution bf = BruteForce(m);
    SolverConfig config;
    config.timeout_s = 5.0;
    const SolveResult bb = SolveBranchAndBound(m, config);
    ASSERT_NE(bb.solution.status, SolveStatus::kTimeout) << "seed " << t.seed;
    EXPECT_EQ(bb.solution.status, bf.status) << "seed " << t.seed;
    EXPECT_EQ(bb.solution.cost, bf.cost) << "seed " << t.seed;
    if (bb.solution.status == SolveStatus::kOptimal) {
      ++feasible;
      EXPECT_TRUE(Check(m, bb.solution.valuation).feasible);
      EXPECT_EQ(ObjectiveValue(m, bb.solution.valuation), *bb.solution.cost);
    }
  }
  EXPECT_GE(feasible, 15);
}

TEST(BranchAndBoundTest, StatsAreConsistent) {
  const ApplicationModel app =
      LoadModelFile(DataPath("models/secure_web_container.json"));
  const CopModel m = ApplyStrategy(
      app, Encode(app, LoadCatalogFile(DataPath("offers/offers_20.csv")),
                  SurrogateVmCount(app)),
      StrategyByName("FV-PR"));
  const SolveResult r = SolveBranchAndBound(m);
  ASSERT_EQ(r.solution.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.stats.prefixed_vars, static_cast<int64_t>(m.fixed.size()));
  ASSERT_FALSE(r.stats.incumbent_trace.empty());
  EXPECT_EQ(r.stats.incumbent_trace.back(), *r.solution.cost);
  for (size_t i = 1; i < r.stats.incumbent_trace.size(); ++i) {
    EXPECT_LT(r.stats.incumbent_trace[i], r.stats.incumbent_trace[i - 1]);
  }
  EXPECT_EQ(r.stats.best_bound_at_end, r.solution.cost);
  EXPECT_LE(r.stats.backtracks, r.stats.nodes_explored);

  // Same input, same answer.
  const SolveResult again = SolveBranchAndBound(m);
  EXPECT_EQ(again.solution.valuation, r.solution.valuation);
  EXPECT_EQ(again.stats.nodes_explored, r.stats.nodes_explored);
}

TEST(BranchAndBoundTest, TimeoutKeepsIncumbent) {
  const ApplicationModel app = LoadModelFile(DataPath("models/oryx2.json"));
  const CopModel m =
      Encode(app, LoadCatalogFile(DataPath("offers/offers_40.csv")),
             SurrogateVmCount(app));
  SolverConfig config;
  config.timeout_s = 0.3;
  const SolveResult r = SolveBranchAndBound(m, config);
  ASSERT_EQ(r.solution.status, SolveStatus::kTimeout);
  EXPECT_LT(r.stats.wall_time_s, 5.0);
  ASSERT_TRUE(r.stats.best_bound_at_end.has_value());
  if (r.solution.cost) {
    EXPECT_LE(*r.stats.best_bound_at_end, *r.solution.cost);
    EXPECT_TRUE(Check(m, r.solution.valuation).feasible);
  }
}

TEST(BruteForceTest, EmptyComponentList) {
  ApplicationModel app;
  app.name = "empty";
  const CopModel m = Encode(app, Offers({10}), 2);
  const Solution s = BruteForce(m);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.cost, 0);
  for (int k = 1; k <= 2; ++k) {
    EXPECT_EQ(s.valuation[m.Get(VarRef::V(k)).index], 0);
  }
  EXPECT_EQ(SolveBranchAndBound(m).solution.cost, 0);
}

TEST(BruteForceTest, CheaperOfTwo) {
  const CopModel m = Encode(OneComponent(), Offers({5, 3}), 1);
  const Solution s = BruteForce(m);
  EXPECT_EQ(s.cost, 3);
  EXPECT_EQ(s.valuation[m.Get(VarRef::T(1)).index], 2);
  const Enumeration e = Enumerate(m);
  EXPECT_EQ(e.feasible, 2);
  EXPECT_EQ(e.optimal, 1);
}

TEST(BruteForceTest, RefusesLargeInstances) {
  const ApplicationModel app = LoadModelFile(DataPath("models/oryx2.json"));
  const CopModel m =
      Encode(app, LoadCatalogFile(DataPath("offers/offers_40.csv")), 13);
  EXPECT_GT(CandidateCount(m), 1e8);
  EXPECT_THROW(BruteForce(m), InstanceTooLargeError);
}

TEST(CheckTest, ZeroValuationReportsAllocation) {
  const CopModel m = Encode(OneComponent(), Offers({5}), 1);
  const CheckResult r = Check(m, Valuation(m.num_variables(), 0));
  EXPECT_FALSE(r.feasible);
  ASSERT_FALSE(r.violated.empty());
  const LinearConstraint& c = m.constraints.at(r.violated[0]);
  EXPECT_EQ(c.family, Family::kAllocation);
  EXPECT_EQ(c.sense, Sense::kGe);
  EXPECT_THROW(Check(m, Valuation{}), InputError);
}

TEST(CheckTest, FixedEntriesAreChecked) {
  const ApplicationModel app = OneComponent();
  FixedAssignment fixed;
  fixed.entries = {{{1, 2}, 1}};
  const CopModel m = Encode(app, Offers({5}), 2, &fixed);
  const Solution s = BruteForce(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.valuation[m.Get(VarRef::A(1, 2)).index], 1);
  Valuation moved = s.valuation;
  auto swap = [&](VarRef a, VarRef b) {
    std::swap(moved[m.Get(a).index], moved[m.Get(b).index]);
  };
  swap(VarRef::A(1, 1), VarRef::A(1, 2));
  swap(VarRef::T(1), VarRef::T(2));
  swap(VarRef::V(1), VarRef::V(2));
  swap(VarRef::P(1), VarRef::P(2));
  const CheckResult r = Check(m, moved);
  EXPECT_EQ(r.violated,
            (std::vector<int>{m.num_checkable() - 1}));
}

// Mutation test. A flipped a-bit is feasible exactly when the enumerator
// lists the mutated valuation; extra instances on a leased column can be
// legal, so not every flip is a violation.
TEST(CheckTest, FlippedBitsAgreeWithEnumeration) {
  int detected = 0;
  for (const auto& [t, m] : EncodedInstances(40)) {
    if (CandidateCount(m) > 1e5) continue;
    std::set<Valuation> feasible;
    BruteForceConfig config;
    config.on_feasible = [&feasible](const Valuation& x) {
      feasible.insert(x);
    };
    const Enumeration e = Enumerate(m, config);
    if (!e.optimum) continue;
    for (const Valuation& x : feasible) EXPECT_TRUE(Check(m, x).feasible);
    for (int i = 1; i <= m.num_components; ++i) {
      for (int k = 1; k <= m.num_columns; ++k) {
        Valuation x = e.first_optimal;
        int64_t& bit = x[m.Get(VarRef::A(i, k)).index];
        bit = 1 - bit;
        const CheckResult r = Check(m, x);
        EXPECT_EQ(r.feasible, feasible.count(x) == 1) << "seed " << t.seed;
        EXPECT_EQ(r.feasible, r.violated.empty());
        detected += !r.feasible;
      }
    }
  }
  EXPECT_GT(detected, 20);
}

TEST(StatusTest, Names) {
  EXPECT_EQ(StatusName(SolveStatus::kOptimal), "Optimal");
  EXPECT_EQ(StatusName(SolveStatus::kInfeasible), "Infeasible");
  EXPECT_EQ(StatusName(SolveStatus::kTimeout), "Timeout");
}

}  // namespace
}  // namespace vmdeploy
