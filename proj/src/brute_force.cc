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

// Exhaustive enumeration oracle and the feasibility checker.
//
// The enumeration order is: for each column k, a_1_k..a_N_k and t_k, then
// v_k, p_k and y_k_* derived from them, then the tie indicators of the pair
// (k-1, k). After the last column the presence bits d_i are derived and any
// remaining variable is enumerated over its domain. The derived variables are
// functionally determined by the encoding (v_k = OR_i a_i_k, p_k = price of
// t_k, d_i = OR_k a_i_k, y_k_o = [t_k = o]), so no feasible valuation is
// skipped. Each constraint is evaluated as soon as its last variable is set,
// which rejects a prefix together with all of its completions.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/solver.h"

namespace vmdeploy {
namespace {

enum class StepKind { kEnumerate, kDeriveColumn, kDerivePresence };

struct Step {
  StepKind kind = StepKind::kEnumerate;
  VarId var;        // kEnumerate
  int64_t lo = 0;   // kEnumerate
  int64_t hi = 0;   // kEnumerate
  int column = 0;   // kDeriveColumn
  std::vector<int> linear;   // constraints completed at this step
  std::vector<int> guarded;
};

class Enumerator {
 public:
  Enumerator(const CopModel& m,
             const std::function<void(const Valuation&)>& visit)
      : m_(m), x_(m.variables.size(), 0), visit_(visit) {
    IndexColumns();
    BuildSteps();
  }

  Enumeration Run() {
    Recurse(0);
    return std::move(result_);
  }

 private:
  void BuildSteps() {
    std::map<VarId, int64_t> fixed;
    bool fixed_conflict = false;
    for (const auto& [var, value] : m_.fixed) {
      auto [it, inserted] = fixed.emplace(var, value);
      if (!inserted && it->second != value) fixed_conflict = true;
    }
    step_of_.assign(m_.variables.size(), -1);

    auto enumerate = [&](VarId v) {
      Step s;
      s.kind = StepKind::kEnumerate;
      s.var = v;
      s.lo = m_.var(v).lo;
      s.hi = m_.var(v).hi;
      if (auto it = fixed.find(v); it != fixed.end()) {
        s.lo = std::max(s.lo, it->second);
        s.hi = std::min(s.hi, it->second);
      }
      step_of_[v.index] = static_cast<int>(steps_.size());
      steps_.push_back(std::move(s));
    };
    auto mark = [&](VarId v) {
      step_of_[v.index] = static_cast<int>(steps_.size()) - 1;
    };

    // Tie indicators grouped by the right column of their pair.
    std::map<int, std::vector<VarId>> ties;
    for (int idx = 0; idx < m_.num_variables(); ++idx) {
      const VarRef& ref = m_.variables[idx].ref;
      if (ref.kind == VarKind::kTie) ties[ref.k + 1].push_back(VarId{idx});
    }

    for (int k = 1; k <= m_.num_columns; ++k) {
      for (int i = 1; i <= m_.num_components; ++i) {
        enumerate(m_.Get(VarRef::A(i, k)));
      }
      enumerate(m_.Get(VarRef::T(k)));
      Step derive;
      derive.kind = StepKind::kDeriveColumn;
      derive.column = k;
      steps_.push_back(std::move(derive));
      mark(m_.Get(VarRef::V(k)));
      mark(m_.Get(VarRef::P(k)));
      for (int o = 1; o <= m_.num_offers; ++o) {
        if (auto y = m_.Find(VarRef::Y(k, o))) mark(*y);
      }
      for (VarId z : ties[k]) enumerate(z);
    }
    Step presence;
    presence.kind = StepKind::kDerivePresence;
    steps_.push_back(std::move(presence));
    for (int i = 1; i <= m_.num_components; ++i) {
      if (auto d = m_.Find(VarRef::D(i))) mark(*d);
    }
    for (int idx = 0; idx < m_.num_variables(); ++idx) {
      if (step_of_[idx] < 0) enumerate(VarId{idx});
    }

    for (int c = 0; c < static_cast<int>(m_.constraints.size()); ++c) {
      int at = 0;
      for (const Term& t : m_.constraints[c].terms) {
        at = std::max(at, step_of_[t.var.index]);
      }
      steps_[at].linear.push_back(c);
    }
    for (int g = 0; g < static_cast<int>(m_.guarded.size()); ++g) {
      int at = 0;
      for (const Term& t : m_.guarded[g].body.terms) {
        at = std::max(at, step_of_[t.var.index]);
      }
      for (const GuardLiteral& lit : m_.guarded[g].guard) {
        at = std::max(at, step_of_[lit.var.index]);
      }
      steps_[at].guarded.push_back(g);
    }
    // Fixed entries on derived variables become checks.
    for (const auto& [var, value] : fixed) {
      if (steps_[step_of_[var.index]].kind != StepKind::kEnumerate) {
        fixed_derived_.emplace_back(var, value);
      }
    }
    if (fixed_conflict) steps_.clear();
  }

  bool StepHolds(const Step& s) const {
    for (int c : s.linear) {
      if (!Satisfied(m_.constraints[c], x_)) return false;
    }
    for (int g : s.guarded) {
      if (!Satisfied(m_.guarded[g], x_)) return false;
    }
    return true;
  }

  struct ColumnIds {
    std::vector<int> a;  // by component
    int t = -1, v = -1, p = -1;
    std::vector<int> y;  // by offer, -1 when absent
  };

  void IndexColumns() {
    columns_.resize(m_.num_columns + 1);
    for (int k = 1; k <= m_.num_columns; ++k) {
      ColumnIds& c = columns_[k];
      for (int i = 1; i <= m_.num_components; ++i) {
        c.a.push_back(m_.Get(VarRef::A(i, k)).index);
      }
      c.t = m_.Get(VarRef::T(k)).index;
      c.v = m_.Get(VarRef::V(k)).index;
      c.p = m_.Get(VarRef::P(k)).index;
      for (int o = 1; o <= m_.num_offers; ++o) {
        auto y = m_.Find(VarRef::Y(k, o));
        c.y.push_back(y ? y->index : -1);
      }
    }
    for (int i = 1; i <= m_.num_components; ++i) {
      if (auto d = m_.Find(VarRef::D(i))) presence_.emplace_back(i, d->index);
    }
  }

  void DeriveColumn(int k) {
    const ColumnIds& c = columns_[k];
    int64_t occupied = 0;
    for (int a : c.a) occupied |= x_[a];
    const int64_t t = x_[c.t];
    x_[c.v] = occupied;
    x_[c.p] = (t >= 1 && t <= m_.num_offers) ? m_.offers[t - 1].price : 0;
    for (int o = 1; o <= m_.num_offers; ++o) {
      if (c.y[o - 1] >= 0) x_[c.y[o - 1]] = t == o ? 1 : 0;
    }
  }

  void DerivePresence() {
    for (const auto& [i, d] : presence_) {
      int64_t present = 0;
      for (int k = 1; k <= m_.num_columns; ++k) present |= x_[columns_[k].a[i - 1]];
      x_[d] = present;
    }
  }

  void Recurse(size_t depth) {
    if (steps_.empty()) return;  // contradictory fixed entries
    if (depth == steps_.size()) {
      for (const auto& [var, value] : fixed_derived_) {
        if (x_[var.index] != value) return;
      }
      Record();
      return;
    }
    const Step& s = steps_[depth];
    switch (s.kind) {
      case StepKind::kEnumerate:
        for (int64_t value = s.lo; value <= s.hi; ++value) {
          x_[s.var.index] = value;
          if (StepHolds(s)) Recurse(depth + 1);
        }
        break;
      case StepKind::kDeriveColumn:
        DeriveColumn(s.column);
        if (StepHolds(s)) Recurse(depth + 1);
        break;
      case StepKind::kDerivePresence:
        DerivePresence();
        if (StepHolds(s)) Recurse(depth + 1);
        break;
    }
  }

  void Record() {
    ++result_.feasible;
    if (visit_) visit_(x_);
    const int64_t cost = ObjectiveValue(m_, x_);
    if (!result_.optimum || cost < *result_.optimum) {
      result_.optimum = cost;
      result_.optimal = 1;
      result_.first_optimal = x_;
    } else if (cost == *result_.optimum) {
      ++result_.optimal;
    }
  }

  const CopModel& m_;
  Valuation x_;
  const std::function<void(const Valuation&)>& visit_;
  std::vector<Step> steps_;
  std::vector<int> step_of_;
  std::vector<std::pair<VarId, int64_t>> fixed_derived_;
  std::vector<ColumnIds> columns_;
  std::vector<std::pair<int, int>> presence_;  // (component, var index)
  Enumeration result_;
};

}  // namespace

double CandidateCount(const CopModel& m) {
  std::map<VarId, int64_t> fixed(m.fixed.begin(), m.fixed.end());
  double log2_count = 0.0;
  for (int idx = 0; idx < m.num_variables(); ++idx) {
    const Variable& v = m.variables[idx];
    if (v.ref.kind != VarKind::kAssign && v.ref.kind != VarKind::kType) continue;
    if (fixed.count(VarId{idx})) continue;
    log2_count += std::log2(static_cast<double>(v.hi - v.lo + 1));
  }
  return std::exp2(log2_count);
}

Enumeration Enumerate(const CopModel& m, const BruteForceConfig& config) {
  const double candidates = CandidateCount(m);
  if (candidates > config.max_candidates) {
    std::ostringstream msg;
    msg << "instance too large for enumeration: " << candidates
        << " candidates > cap " << config.max_candidates;
    throw InstanceTooLargeError(msg.str());
  }
  return Enumerator(m, config.on_feasible).Run();
}

Solution BruteForce(const CopModel& m, const BruteForceConfig& config) {
  Enumeration e = Enumerate(m, config);
  Solution s;
  if (!e.optimum) {
    s.status = SolveStatus::kInfeasible;
    return s;
  }
  s.status = SolveStatus::kOptimal;
  s.cost = e.optimum;
  s.valuation = std::move(e.first_optimal);
  return s;
}

CheckResult Check(const CopModel& m, const Valuation& x) {
  if (x.size() != m.variables.size()) {
    throw InputError("partial valuation: " + std::to_string(x.size()) +
                     " of " + std::to_string(m.variables.size()) +
                     " variables");
  }
  CheckResult r;
  int index = 0;
  for (const LinearConstraint& c : m.constraints) {
    if (!Satisfied(c, x)) r.violated.push_back(index);
    ++index;
  }
  for (const GuardedConstraint& g : m.guarded) {
    if (!Satisfied(g, x)) r.violated.push_back(index);
    ++index;
  }
  for (const auto& [var, value] : m.fixed) {
    if (x[var.index] != value) r.violated.push_back(index);
    ++index;
  }
  for (int v = 0; v < m.num_variables(); ++v) {
    if (x[v] < m.variables[v].lo || x[v] > m.variables[v].hi) {
      r.violated.push_back(index);
      break;
    }
  }
  r.feasible = r.violated.empty();
  return r;
}

}  // namespace vmdeploy
