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

#include "vmdeploy/symmetry.h"

#include <algorithm>
#include <optional>
#include <set>

#include "vmdeploy/errors.h"

namespace vmdeploy {
namespace {

using Atom = BreakerAtom;

// Weighted clique search over cliques in lexicographic order of their sorted
// id lists: a clique is extended only with larger ids, so the first clique
// reaching the best weight is also the lexicographically smallest one.
class CliqueSearch {
 public:
  CliqueSearch(const ConflictGraph& g, std::vector<int> weights)
      : g_(g), w_(std::move(weights)) {}

  Clique Run() {
    std::vector<ComponentId> candidates;
    for (ComponentId v = 1; v <= g_.num_vertices(); ++v) candidates.push_back(v);
    Expand(candidates, 0);
    return best_;
  }

 private:
  void Expand(const std::vector<ComponentId>& candidates, int weight) {
    if (!have_best_ || weight > best_.weight) {
      best_.members = current_;
      best_.weight = weight;
      have_best_ = true;
    }
    int remaining = 0;
    for (ComponentId v : candidates) remaining += w_[v - 1];
    for (size_t idx = 0; idx < candidates.size(); ++idx) {
      // Equal weight cannot win against an earlier clique.
      if (weight + remaining <= best_.weight) return;
      const ComponentId v = candidates[idx];
      remaining -= w_[v - 1];
      std::vector<ComponentId> next;
      for (size_t j = idx + 1; j < candidates.size(); ++j) {
        if (g_.HasEdge(v, candidates[j])) next.push_back(candidates[j]);
      }
      current_.push_back(v);
      Expand(next, weight + w_[v - 1]);
      current_.pop_back();
    }
  }

  const ConflictGraph& g_;
  const std::vector<int> w_;
  std::vector<ComponentId> current_;
  Clique best_;
  bool have_best_ = false;
};

// Builds the ordering constraints for one adjacent column pair.
class PairChain {
 public:
  PairChain(CopModel& work, BreakerConstraints& out, int k)
      : work_(work), out_(out), k_(k) {}

  // key_k - key_k+1 >= 0 under the current tie; then, unless this is the
  // last atom, a tie indicator for "and the keys are equal".
  void Order(const std::vector<Term>& diff, bool last) {
    Emit({}, Body(diff, Sense::kGe, 0));
    if (last) return;
    const VarId z = NewTie();
    Emit({{z, 1}}, Body(diff, Sense::kEq, 0));
    Emit({{z, 0}}, Body(diff, Sense::kGe, 1));
    tie_ = z;
  }

  void Lexicographic(int num_rows) {
    for (int i = 1; i <= num_rows; ++i) {
      std::vector<Term> diff = {{1, work_.Get(VarRef::A(i, k_))},
                                {-1, work_.Get(VarRef::A(i, k_ + 1))}};
      Order(diff, i == num_rows);
    }
  }

 private:
  LinearConstraint Body(const std::vector<Term>& diff, Sense sense,
                        int64_t rhs) const {
    return LinearConstraint{diff, sense, rhs, Family::kBreaker};
  }

  // Adds extra guard literals on top of the current tie.
  void Emit(std::vector<GuardLiteral> extra, LinearConstraint body) {
    std::vector<GuardLiteral> guard;
    if (tie_) guard.push_back({*tie_, 1});
    guard.insert(guard.end(), extra.begin(), extra.end());
    if (guard.empty()) {
      out_.constraints.push_back(std::move(body));
    } else {
      out_.guarded.push_back({std::move(guard), std::move(body)});
    }
  }

  VarId NewTie() {
    ++slot_;
    const VarRef ref = VarRef::Z(slot_, k_);
    const VarId z = work_.AddVariable(ref, 0, 1);
    out_.variables.push_back({ref, 0, 1});
    if (tie_) {
      out_.constraints.push_back(LinearConstraint{
          {{1, z}, {-1, *tie_}}, Sense::kLe, 0, Family::kBreaker});
    }
    return z;
  }

  CopModel& work_;
  BreakerConstraints& out_;
  const int k_;
  int slot_ = 0;
  std::optional<VarId> tie_;
};

}  // namespace

std::string_view AtomName(BreakerAtom atom) {
  switch (atom) {
    case Atom::kFV:
      return "FV";
    case Atom::kPR:
      return "PR";
    case Atom::kL:
      return "L";
    case Atom::kLX:
      return "LX";
  }
  return "?";
}

bool BreakerSpec::Contains(BreakerAtom atom) const {
  return std::find(atoms.begin(), atoms.end(), atom) != atoms.end();
}

void ValidateSpec(const BreakerSpec& spec) {
  std::set<BreakerAtom> seen;
  for (size_t i = 0; i < spec.atoms.size(); ++i) {
    const BreakerAtom a = spec.atoms[i];
    if (!seen.insert(a).second) {
      throw InputError("breaker " + std::string(AtomName(a)) + " repeated");
    }
    if (a == Atom::kFV && i != 0) {
      throw InputError("FV must be the first breaker");
    }
    if (a == Atom::kLX && i + 1 != spec.atoms.size()) {
      throw InputError("LX must be the last breaker");
    }
  }
}

const std::vector<Strategy>& EnumerateStrategies() {
  static const std::vector<Strategy> kRegistry = [] {
    const std::vector<std::vector<Atom>> lists = {
        {},
        {Atom::kPR},
        {Atom::kLX},
        {Atom::kL},
        {Atom::kFV},
        {Atom::kFV, Atom::kPR},
        {Atom::kFV, Atom::kL},
        {Atom::kFV, Atom::kLX},
        {Atom::kPR, Atom::kL},
        {Atom::kPR, Atom::kLX},
        {Atom::kL, Atom::kPR},
        {Atom::kL, Atom::kLX},
        {Atom::kFV, Atom::kPR, Atom::kL},
        {Atom::kFV, Atom::kPR, Atom::kLX},
        {Atom::kFV, Atom::kL, Atom::kPR},
        {Atom::kFV, Atom::kL, Atom::kLX},
        {Atom::kPR, Atom::kL, Atom::kLX},
        {Atom::kL, Atom::kPR, Atom::kLX},
        {Atom::kFV, Atom::kPR, Atom::kL, Atom::kLX},
        {Atom::kFV, Atom::kL, Atom::kPR, Atom::kLX},
    };
    std::vector<Strategy> out;
    for (const auto& atoms : lists) {
      std::string name;
      for (Atom a : atoms) {
        if (!name.empty()) name += "-";
        name += AtomName(a);
      }
      out.push_back({name.empty() ? "NONE" : name, BreakerSpec{atoms}});
    }
    return out;
  }();
  return kRegistry;
}

BreakerSpec StrategyByName(std::string_view name) {
  for (const Strategy& s : EnumerateStrategies()) {
    if (s.name == name) return s.spec;
  }
  throw InputError("unknown strategy '" + std::string(name) + "'");
}

Clique MaxDeploymentClique(const ApplicationModel& app) {
  std::vector<int> weights;
  for (const InstanceBounds& b : ComputeInstanceBounds(app)) {
    weights.push_back(b.mandatory());
  }
  return CliqueSearch(BuildConflictGraph(app), std::move(weights)).Run();
}

FixedAssignment FvFixing(const ApplicationModel& app, const Clique& clique,
                         int num_columns) {
  if (clique.weight > num_columns) {
    throw InfeasibleError("clique of deployment size " +
                          std::to_string(clique.weight) + " does not fit in " +
                          std::to_string(num_columns) + " VMs");
  }
  const std::vector<InstanceBounds> bounds = ComputeInstanceBounds(app);
  FixedAssignment fixed;
  int column = 0;
  for (ComponentId owner : clique.members) {
    for (int n = 0; n < bounds.at(owner - 1).mandatory(); ++n) {
      ++column;
      for (ComponentId other : clique.members) {
        fixed.entries[{other, column}] = other == owner ? 1 : 0;
      }
    }
  }
  fixed.fixed_columns = column;
  return fixed;
}

BreakerConstraints GenerateBreakerConstraints(const BreakerSpec& spec,
                                              const ApplicationModel& app,
                                              const CopModel& m) {
  ValidateSpec(spec);
  BreakerConstraints out;
  int first_column = 1;
  if (spec.Contains(Atom::kFV)) {
    out.fixed = FvFixing(app, MaxDeploymentClique(app), m.num_columns);
    first_column = out.fixed.fixed_columns + 1;
  }

  std::vector<Atom> chain;
  for (Atom a : spec.atoms) {
    if (a != Atom::kFV) chain.push_back(a);
  }
  if (chain.empty()) return out;

  CopModel work = m;
  for (int k = first_column; k < m.num_columns; ++k) {
    PairChain pair(work, out, k);
    for (size_t idx = 0; idx < chain.size(); ++idx) {
      const bool last = idx + 1 == chain.size();
      switch (chain[idx]) {
        case Atom::kPR:
          pair.Order({{1, m.Get(VarRef::P(k))}, {-1, m.Get(VarRef::P(k + 1))}},
                     last);
          break;
        case Atom::kL: {
          std::vector<Term> diff;
          for (int i = 1; i <= m.num_components; ++i) {
            diff.push_back({1, m.Get(VarRef::A(i, k))});
          }
          for (int i = 1; i <= m.num_components; ++i) {
            diff.push_back({-1, m.Get(VarRef::A(i, k + 1))});
          }
          pair.Order(diff, last);
          break;
        }
        case Atom::kLX:
          pair.Lexicographic(m.num_components);
          break;
        case Atom::kFV:
          break;
      }
    }
  }
  return out;
}

CopModel ApplyBreakers(CopModel m, const BreakerConstraints& breakers) {
  for (const Variable& v : breakers.variables) {
    m.AddVariable(v.ref, v.lo, v.hi);
  }
  m.constraints.insert(m.constraints.end(), breakers.constraints.begin(),
                       breakers.constraints.end());
  m.guarded.insert(m.guarded.end(), breakers.guarded.begin(),
                   breakers.guarded.end());
  for (const auto& [key, value] : breakers.fixed.entries) {
    m.fixed.emplace_back(m.Get(VarRef::A(key.first, key.second)), value);
  }
  return m;
}

CopModel ApplyStrategy(const ApplicationModel& app, CopModel m,
                       const BreakerSpec& spec) {
  BreakerConstraints b = GenerateBreakerConstraints(spec, app, m);
  return ApplyBreakers(std::move(m), b);
}

}  // namespace vmdeploy
