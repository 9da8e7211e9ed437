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

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <set>

#include "vmdeploy/encoder.h"
#include "vmdeploy/solver.h"

namespace vmdeploy {
namespace {

using Clock = std::chrono::steady_clock;

int64_t FloorDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t CeilDiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

// A linear row, optionally guarded. Linear constraints and guarded bodies
// share the same propagation code.
struct Propagator {
  const LinearConstraint* body = nullptr;
  const std::vector<GuardLiteral>* guard = nullptr;  // null: unconditional
};

class BranchAndBound {
 public:
  BranchAndBound(const CopModel& m, const SolverConfig& config)
      : m_(m), config_(config) {
    const size_t n = m.variables.size();
    lo_.resize(n);
    hi_.resize(n);
    for (size_t v = 0; v < n; ++v) {
      lo_[v] = m.variables[v].lo;
      hi_[v] = m.variables[v].hi;
    }
    watches_.resize(n);
    for (const LinearConstraint& c : m.constraints) AddPropagator({&c, nullptr});
    for (const GuardedConstraint& g : m.guarded) {
      AddPropagator({&g.body, &g.guard});
    }
    in_queue_.assign(props_.size(), false);
    BuildBranchOrder();
    for (VarId p : m.objective) price_vars_.push_back(p.index);
  }

  SolveResult Run() {
    start_ = Clock::now();
    SolveResult result;

    bool ok = true;
    std::set<int> prefixed;
    for (const auto& [var, value] : m_.fixed) {
      prefixed.insert(var.index);
      ok = ok && SetLo(var.index, value) && SetHi(var.index, value);
    }
    stats_.prefixed_vars = static_cast<int64_t>(prefixed.size());
    if (ok) {
      for (size_t p = 0; p < props_.size(); ++p) Enqueue(static_cast<int>(p));
      ok = Propagate();
    }
    if (ok) {
      root_bound_ = LowerBound();
      ++stats_.nodes_explored;
      Search(0);
    } else {
      ++stats_.nodes_explored;
    }

    stats_.wall_time_s =
        std::chrono::duration<double>(Clock::now() - start_).count();
    Solution& s = result.solution;
    if (incumbent_cost_) {
      s.cost = incumbent_cost_;
      s.valuation = incumbent_;
    }
    if (timed_out_) {
      s.status = SolveStatus::kTimeout;
      if (ok) stats_.best_bound_at_end = root_bound_;
    } else if (incumbent_cost_) {
      s.status = SolveStatus::kOptimal;
      stats_.best_bound_at_end = incumbent_cost_;
    } else {
      s.status = SolveStatus::kInfeasible;
    }
    result.stats = std::move(stats_);
    return result;
  }

 private:
  struct TrailEntry {
    int var;
    int64_t lo;
    int64_t hi;
  };

  void AddPropagator(Propagator p) {
    const int id = static_cast<int>(props_.size());
    props_.push_back(p);
    std::set<int> vars;
    for (const Term& t : p.body->terms) vars.insert(t.var.index);
    if (p.guard) {
      for (const GuardLiteral& lit : *p.guard) vars.insert(lit.var.index);
    }
    for (int v : vars) watches_[v].push_back(id);
  }

  void BuildBranchOrder() {
    std::vector<bool> placed(m_.variables.size(), false);
    auto place = [&](VarId v) {
      if (!placed[v.index]) {
        placed[v.index] = true;
        order_.push_back(v.index);
      }
    };
    for (int k = 1; k <= m_.num_columns; ++k) {
      for (int i = 1; i <= m_.num_components; ++i) place(m_.Get(VarRef::A(i, k)));
      const VarId t = m_.Get(VarRef::T(k));
      place(t);
      type_column_[t.index] = k;
    }
    for (int v = 0; v < m_.num_variables(); ++v) place(VarId{v});

    offers_by_price_.resize(m_.offers.size());
    for (size_t o = 0; o < m_.offers.size(); ++o) {
      offers_by_price_[o] = static_cast<int>(o + 1);
    }
    std::stable_sort(offers_by_price_.begin(), offers_by_price_.end(),
                     [this](int a, int b) {
                       return m_.offers[a - 1].price < m_.offers[b - 1].price;
                     });
  }

  bool Fixed(int v) const { return lo_[v] == hi_[v]; }

  void Enqueue(int p) {
    if (!in_queue_[p]) {
      in_queue_[p] = true;
      queue_.push_back(p);
    }
  }

  void Touched(int v) {
    for (int p : watches_[v]) Enqueue(p);
  }

  bool SetLo(int v, int64_t value) {
    if (value <= lo_[v]) return true;
    if (value > hi_[v]) return false;
    trail_.push_back({v, lo_[v], hi_[v]});
    lo_[v] = value;
    Touched(v);
    return true;
  }

  bool SetHi(int v, int64_t value) {
    if (value >= hi_[v]) return true;
    if (value < lo_[v]) return false;
    trail_.push_back({v, lo_[v], hi_[v]});
    hi_[v] = value;
    Touched(v);
    return true;
  }

  void Undo(size_t mark) {
    while (trail_.size() > mark) {
      const TrailEntry& e = trail_.back();
      lo_[e.var] = e.lo;
      hi_[e.var] = e.hi;
      trail_.pop_back();
    }
  }

  void ClearQueue() {
    for (int p : queue_) in_queue_[p] = false;
    queue_.clear();
  }

  // Activity bounds of sign * body.
  void ActivityRange(const LinearConstraint& c, int64_t sign, int64_t& min_act,
                     int64_t& max_act) const {
    min_act = 0;
    max_act = 0;
    for (const Term& t : c.terms) {
      const int64_t coef = sign * t.coef;
      const int v = t.var.index;
      if (coef > 0) {
        min_act += coef * lo_[v];
        max_act += coef * hi_[v];
      } else {
        min_act += coef * hi_[v];
        max_act += coef * lo_[v];
      }
    }
  }

  // Bounds propagation of sign * body <= sign * rhs.
  bool PropagateLe(const LinearConstraint& c, int64_t sign) {
    int64_t min_act, max_act;
    ActivityRange(c, sign, min_act, max_act);
    const int64_t rhs = sign * c.rhs;
    if (min_act > rhs) return false;
    if (max_act <= rhs) return true;
    for (const Term& t : c.terms) {
      const int64_t coef = sign * t.coef;
      const int v = t.var.index;
      const int64_t own = coef > 0 ? coef * lo_[v] : coef * hi_[v];
      const int64_t slack = rhs - (min_act - own);
      if (coef > 0) {
        if (!SetHi(v, FloorDiv(slack, coef))) return false;
      } else {
        if (!SetLo(v, CeilDiv(slack, coef))) return false;
      }
    }
    return true;
  }

  bool PropagateBody(const LinearConstraint& c) {
    if (c.sense != Sense::kGe && !PropagateLe(c, 1)) return false;
    if (c.sense != Sense::kLe && !PropagateLe(c, -1)) return false;
    return true;
  }

  bool BodyInfeasible(const LinearConstraint& c) const {
    int64_t min_act, max_act;
    ActivityRange(c, 1, min_act, max_act);
    switch (c.sense) {
      case Sense::kLe:
        return min_act > c.rhs;
      case Sense::kGe:
        return max_act < c.rhs;
      case Sense::kEq:
        return min_act > c.rhs || max_act < c.rhs;
    }
    return false;
  }

  bool PropagateOne(const Propagator& p) {
    if (p.guard == nullptr) return PropagateBody(*p.body);
    const GuardLiteral* open = nullptr;
    int open_count = 0;
    for (const GuardLiteral& lit : *p.guard) {
      const int v = lit.var.index;
      if (lit.value < lo_[v] || lit.value > hi_[v]) return true;  // inactive
      if (!Fixed(v)) {
        open = &lit;
        ++open_count;
      }
    }
    if (open_count == 0) return PropagateBody(*p.body);
    if (open_count > 1) return true;
    // One undecided literal: if the body cannot hold, the literal is false.
    const int v = open->var.index;
    if (open->value != lo_[v] && open->value != hi_[v]) return true;
    if (!BodyInfeasible(*p.body)) return true;
    return open->value == lo_[v] ? SetLo(v, open->value + 1)
                                 : SetHi(v, open->value - 1);
  }

  bool Propagate() {
    while (!queue_.empty()) {
      const int p = queue_.front();
      queue_.pop_front();
      in_queue_[p] = false;
      if (!PropagateOne(props_[p])) {
        ClearQueue();
        return false;
      }
    }
    return true;
  }

  int64_t LowerBound() const {
    int64_t sum = 0;
    for (int p : price_vars_) sum += lo_[p];
    return sum;
  }

  bool OutOfTime() {
    if (timed_out_) return true;
    if (stats_.nodes_explored % config_.poll_interval == 0) {
      const double elapsed =
          std::chrono::duration<double>(Clock::now() - start_).count();
      if (elapsed >= config_.timeout_s) timed_out_ = true;
    }
    return timed_out_;
  }

  void RecordIncumbent() {
    const int64_t cost = LowerBound();
    if (incumbent_cost_ && cost >= *incumbent_cost_) return;
    incumbent_cost_ = cost;
    incumbent_.assign(lo_.begin(), lo_.end());
    stats_.incumbent_trace.push_back(cost);
  }

  std::vector<int64_t> CandidateValues(int v) const {
    std::vector<int64_t> values;
    auto column = type_column_.find(v);
    if (column != type_column_.end()) {
      const int k = column->second;
      ResourceVector load;
      for (int i = 1; i <= m_.num_components; ++i) {
        if (lo_[m_.Get(VarRef::A(i, k)).index] == 1) {
          load.cpu += m_.requirements[i - 1].cpu;
          load.memory += m_.requirements[i - 1].memory;
          load.storage += m_.requirements[i - 1].storage;
        }
      }
      if (lo_[v] == 0) values.push_back(0);
      for (int o : offers_by_price_) {
        if (o < lo_[v] || o > hi_[v]) continue;
        const ResourceVector& cap = m_.offers[o - 1].capacity;
        if (cap.cpu < load.cpu || cap.memory < load.memory ||
            cap.storage < load.storage) {
          continue;
        }
        values.push_back(o);
      }
      return values;
    }
    if (m_.variables[v].ref.kind == VarKind::kAssign) {
      for (int64_t value = hi_[v]; value >= lo_[v]; --value) {
        values.push_back(value);
      }
      return values;
    }
    for (int64_t value = lo_[v]; value <= hi_[v]; ++value) {
      values.push_back(value);
    }
    return values;
  }

  void Search(size_t start) {
    size_t pos = start;
    while (pos < order_.size() && Fixed(order_[pos])) ++pos;
    if (pos == order_.size()) {
      RecordIncumbent();
      return;
    }
    const int v = order_[pos];
    for (int64_t value : CandidateValues(v)) {
      if (OutOfTime()) return;
      ++stats_.nodes_explored;
      const size_t mark = trail_.size();
      bool ok = SetLo(v, value) && SetHi(v, value);
      ok = ok && Propagate();
      if (!ok) ClearQueue();
      if (ok && incumbent_cost_ && LowerBound() >= *incumbent_cost_) ok = false;
      if (ok) {
        Search(pos + 1);
      } else {
        ++stats_.backtracks;
      }
      Undo(mark);
    }
  }

  const CopModel& m_;
  const SolverConfig& config_;
  std::vector<int64_t> lo_, hi_;
  std::vector<TrailEntry> trail_;
  std::vector<Propagator> props_;
  std::vector<std::vector<int>> watches_;
  std::deque<int> queue_;
  std::vector<bool> in_queue_;
  std::vector<int> order_;
  std::map<int, int> type_column_;  // t_k var index -> k
  std::vector<int> offers_by_price_;
  std::vector<int> price_vars_;

  Clock::time_point start_;
  bool timed_out_ = false;
  int64_t root_bound_ = 0;
  std::optional<int64_t> incumbent_cost_;
  Valuation incumbent_;
  SearchStats stats_;
};

}  // namespace

std::string_view StatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kTimeout:
      return "Timeout";
  }
  return "?";
}

SolveResult SolveBranchAndBound(const CopModel& m, const SolverConfig& config) {
  return BranchAndBound(m, config).Run();
}

}  // namespace vmdeploy
