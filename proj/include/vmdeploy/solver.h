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

// Built-in exact solving of CopModel instances: a depth-first
// branch-and-bound optimizer, an exhaustive enumeration oracle for tiny
// instances, and a feasibility checker.

#ifndef VMDEPLOY_SOLVER_H_
#define VMDEPLOY_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "vmdeploy/cop.h"

namespace vmdeploy {

enum class SolveStatus { kOptimal, kInfeasible, kTimeout };
std::string_view StatusName(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  // Total valuation of the best solution found; empty when none.
  Valuation valuation;
  std::optional<int64_t> cost;
};

struct SearchStats {
  int64_t nodes_explored = 0;
  int64_t backtracks = 0;
  double wall_time_s = 0.0;
  // Proven lower bound on the optimum: the optimum itself when the search
  // completed, the root bound otherwise; empty for infeasible models.
  std::optional<int64_t> best_bound_at_end;
  // Variables fixed before branching (FV entries).
  int64_t prefixed_vars = 0;
  // Costs of successive incumbents (strictly decreasing).
  std::vector<int64_t> incumbent_trace;
};

struct SolverConfig {
  double timeout_s = 60.0;
  // Nodes between two clock reads.
  int64_t poll_interval = 1024;
};

struct SolveResult {
  Solution solution;
  SearchStats stats;
};

// Depth-first branch and bound.
//
// Variable order: FV-fixed entries are applied at the root, then columns
// left to right with a_1_k..a_N_k before t_k, then anything still open in
// VarId order. Values: 1 before 0 for assignment bits; for t_k, "not leased"
// and then offers by ascending price, skipping offers already too small for
// the column. Each node runs bounds propagation over all linear rows and
// every guarded row whose guard is decided. A node is pruned when the sum of
// the p_k lower bounds reaches the incumbent.
SolveResult SolveBranchAndBound(const CopModel& m,
                                const SolverConfig& config = {});

struct BruteForceConfig {
  // Upper limit on the number of (a, t) candidates, see CandidateCount.
  double max_candidates = 1e8;
  // Called with every feasible complete valuation, in enumeration order.
  std::function<void(const Valuation&)> on_feasible;
};

// Size of the (a, t) search space, 2^(N*M) * (O+1)^M, with FV-fixed entries
// counted once.
double CandidateCount(const CopModel& m);

struct Enumeration {
  int64_t feasible = 0;          // feasible complete valuations
  std::optional<int64_t> optimum;
  int64_t optimal = 0;           // feasible valuations reaching the optimum
  Valuation first_optimal;       // first in enumeration order
};

// Exhaustive enumeration of (a, t) in column order with v, p, d and y
// derived, tie indicators enumerated, and every constraint checked once all
// of its variables are set. Throws InstanceTooLargeError above the cap.
Enumeration Enumerate(const CopModel& m, const BruteForceConfig& config = {});

// Enumerate() packaged as a Solution (Optimal or Infeasible).
Solution BruteForce(const CopModel& m, const BruteForceConfig& config = {});

struct CheckResult {
  bool feasible = true;
  // Indices in [0, num_checkable): linear constraints, then guarded
  // constraints, then fixed entries.
  std::vector<int> violated;
};

// Evaluates every constraint and fixed entry, and the variable domains
// (a domain violation is reported as the index num_checkable()).
// Throws InputError when the valuation is not total.
CheckResult Check(const CopModel& m, const Valuation& x);

}  // namespace vmdeploy

#endif  // VMDEPLOY_SOLVER_H_
