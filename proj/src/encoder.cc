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

#include "vmdeploy/encoder.h"

#include <algorithm>
#include <map>
#include <set>

#include "vmdeploy/errors.h"
#include "vmdeploy/symmetry.h"

namespace vmdeploy {
namespace {

constexpr int64_t kDivergenceLimit = 1'000'000;

LinearConstraint Row(std::vector<Term> terms, Sense sense, int64_t rhs,
                     Family family) {
  return LinearConstraint{std::move(terms), sense, rhs, family};
}

class Encoder {
 public:
  Encoder(const ApplicationModel& app, const OfferCatalog& catalog, int m)
      : app_(app), catalog_(catalog), n_(app.num_components()), m_(m),
        o_(catalog.size()), bounds_(ComputeInstanceBounds(app)) {}

  CopModel Run(const FixedAssignment* fixed) {
    out_.num_components = n_;
    out_.num_columns = m_;
    out_.num_offers = o_;
    for (const Component& c : app_.components) {
      out_.requirements.push_back(c.requirements);
    }
    out_.offers = catalog_.offers;

    DeclareVariables();
    EmitAllocation();
    EmitOccupancy();
    EmitLink();
    EmitCapacity();
    EmitStructural();
    if (fixed != nullptr) EmitFixed(*fixed);
    return std::move(out_);
  }

 private:
  VarId A(int i, int k) const { return out_.Get(VarRef::A(i, k)); }
  VarId T(int k) const { return out_.Get(VarRef::T(k)); }
  VarId V(int k) const { return out_.Get(VarRef::V(k)); }
  VarId P(int k) const { return out_.Get(VarRef::P(k)); }
  VarId D(int i) const { return out_.Get(VarRef::D(i)); }

  std::vector<Term> RowSum(int i, int64_t coef) const {
    std::vector<Term> terms;
    for (int k = 1; k <= m_; ++k) terms.push_back({coef, A(i, k)});
    return terms;
  }

  void Add(LinearConstraint c) { out_.constraints.push_back(std::move(c)); }

  void DeclareVariables() {
    int64_t max_price = 0;
    for (const VmOffer& o : catalog_.offers) {
      max_price = std::max(max_price, o.price);
    }
    for (int k = 1; k <= m_; ++k) {
      for (int i = 1; i <= n_; ++i) out_.AddVariable(VarRef::A(i, k), 0, 1);
      out_.AddVariable(VarRef::T(k), 0, o_);
      out_.AddVariable(VarRef::V(k), 0, 1);
      out_.AddVariable(VarRef::P(k), 0, max_price);
      out_.objective.push_back(P(k));
    }
    for (int i = 1; i <= n_; ++i) {
      if (bounds_[i - 1].exclusive) out_.AddVariable(VarRef::D(i), 0, 1);
    }
  }

  // (1) instance-count bounds; exclusive members scale theirs by d_i.
  void EmitAllocation() {
    for (int i = 1; i <= n_; ++i) {
      const InstanceBounds& b = bounds_[i - 1];
      if (!b.exclusive) {
        if (b.ub && *b.ub == b.lb) {
          Add(Row(RowSum(i, 1), Sense::kEq, b.lb, Family::kAllocation));
          continue;
        }
        Add(Row(RowSum(i, 1), Sense::kGe, b.lb, Family::kAllocation));
        if (b.ub) Add(Row(RowSum(i, 1), Sense::kLe, *b.ub, Family::kAllocation));
        continue;
      }
      auto scaled = [&](int64_t bound) {
        std::vector<Term> terms = RowSum(i, 1);
        terms.push_back({-bound, D(i)});
        return terms;
      };
      if (b.ub && *b.ub == b.lb) {
        Add(Row(scaled(b.lb), Sense::kEq, 0, Family::kAllocation));
        continue;
      }
      Add(Row(scaled(b.lb), Sense::kGe, 0, Family::kAllocation));
      if (b.ub) Add(Row(scaled(*b.ub), Sense::kLe, 0, Family::kAllocation));
    }
  }

  // (2) v_k <= sum_i a_i_k and a_i_k <= v_k.
  void EmitOccupancy() {
    for (int k = 1; k <= m_; ++k) {
      std::vector<Term> terms = {{1, V(k)}};
      for (int i = 1; i <= n_; ++i) terms.push_back({-1, A(i, k)});
      Add(Row(std::move(terms), Sense::kLe, 0, Family::kOccupancy));
      for (int i = 1; i <= n_; ++i) {
        Add(Row({{1, A(i, k)}, {-1, V(k)}}, Sense::kLe, 0,
                Family::kOccupancy));
      }
    }
  }

  // (3) v_k <= t_k <= O*v_k, and p_k is the price of the selected offer.
  void EmitLink() {
    for (int k = 1; k <= m_; ++k) {
      Add(Row({{1, V(k)}, {-1, T(k)}}, Sense::kLe, 0, Family::kLink));
      Add(Row({{1, T(k)}, {-o_, V(k)}}, Sense::kLe, 0, Family::kLink));
    }
    for (int k = 1; k <= m_; ++k) {
      out_.guarded.push_back(
          {{{T(k), 0}}, Row({{1, P(k)}}, Sense::kEq, 0, Family::kLink)});
      for (const VmOffer& o : catalog_.offers) {
        out_.guarded.push_back({{{T(k), o.id}},
                                Row({{1, P(k)}}, Sense::kEq, o.price,
                                    Family::kLink)});
      }
    }
  }

  // (4) t_k = o  =>  sum_i req_r(i) * a_i_k <= cap_r(o).
  void EmitCapacity() {
    for (int k = 1; k <= m_; ++k) {
      for (const VmOffer& o : catalog_.offers) {
        for (int r = 0; r < ResourceVector::kDimensions; ++r) {
          std::vector<Term> terms;
          for (int i = 1; i <= n_; ++i) {
            const int64_t req = app_.component(i).requirements[r];
            if (req != 0) terms.push_back({req, A(i, k)});
          }
          if (terms.empty()) continue;
          out_.guarded.push_back(
              {{{T(k), o.id}},
               Row(std::move(terms), Sense::kLe, o.capacity[r],
                   Family::kCapacity)});
        }
      }
    }
  }

  void EmitStructural() {
    std::vector<const Conflict*> conflicts;
    std::vector<const Colocation*> colocations;
    std::vector<const ExclusiveDeployment*> exclusives;
    std::vector<const RequireProvide*> require_provides;
    std::vector<ComponentId> full;
    for (const StructuralConstraint& c : app_.constraints) {
      if (auto* x = std::get_if<Conflict>(&c)) conflicts.push_back(x);
      if (auto* x = std::get_if<Colocation>(&c)) colocations.push_back(x);
      if (auto* x = std::get_if<ExclusiveDeployment>(&c)) exclusives.push_back(x);
      if (auto* x = std::get_if<RequireProvide>(&c)) require_provides.push_back(x);
      if (auto* x = std::get_if<FullDeployment>(&c)) full.push_back(x->component);
    }

    // (5)
    for (const Conflict* c : conflicts) {
      for (int k = 1; k <= m_; ++k) {
        Add(Row({{1, A(c->i, k)}, {1, A(c->j, k)}}, Sense::kLe, 1,
                Family::kConflict));
      }
    }
    // (6)
    for (const Colocation* c : colocations) {
      for (int k = 1; k <= m_; ++k) {
        Add(Row({{1, A(c->i, k)}, {-1, A(c->j, k)}}, Sense::kEq, 0,
                Family::kColocation));
      }
    }
    // (7) d_i is 1 iff member i has an instance; exactly one d_i per set.
    std::set<ComponentId> presence_linked;
    for (const ExclusiveDeployment* e : exclusives) {
      for (ComponentId i : e->members) {
        if (!presence_linked.insert(i).second) continue;
        for (int k = 1; k <= m_; ++k) {
          Add(Row({{1, A(i, k)}, {-1, D(i)}}, Sense::kLe, 0,
                  Family::kExclusive));
        }
        std::vector<Term> terms = RowSum(i, -1);
        terms.insert(terms.begin(), Term{1, D(i)});
        Add(Row(std::move(terms), Sense::kLe, 0, Family::kExclusive));
      }
      std::vector<Term> terms;
      for (ComponentId i : e->members) terms.push_back({1, D(i)});
      Add(Row(std::move(terms), Sense::kEq, 1, Family::kExclusive));
    }
    // (8) n_req * #requirer <= n_prov * #provider.
    for (const RequireProvide* rp : require_provides) {
      std::vector<Term> terms = RowSum(rp->requirer, rp->n_req);
      std::vector<Term> provider = RowSum(rp->provider, -rp->n_prov);
      terms.insert(terms.end(), provider.begin(), provider.end());
      Add(Row(std::move(terms), Sense::kLe, 0, Family::kRequireProvide));
    }
    // (9) i sits on every leased column free of its conflicts.
    const ConflictGraph graph = BuildConflictGraph(app_);
    for (ComponentId i : full) {
      for (int k = 1; k <= m_; ++k) {
        Add(Row({{1, A(i, k)}, {-1, V(k)}}, Sense::kLe, 0,
                Family::kFullDeployment));
        for (ComponentId j : graph.Neighbors(i)) {
          Add(Row({{1, A(i, k)}, {1, A(j, k)}}, Sense::kLe, 1,
                  Family::kFullDeployment));
        }
        std::vector<Term> terms = {{1, A(i, k)}, {-1, V(k)}};
        for (ComponentId j : graph.Neighbors(i)) terms.push_back({1, A(j, k)});
        Add(Row(std::move(terms), Sense::kGe, 0, Family::kFullDeployment));
      }
    }
  }

  // (10)
  void EmitFixed(const FixedAssignment& fixed) {
    for (const auto& [key, value] : fixed.entries) {
      const auto& [i, k] = key;
      if (i < 1 || i > n_ || k < 1 || k > m_ || (value != 0 && value != 1)) {
        throw InputError("fixed entry a_" + std::to_string(i) + "_" +
                         std::to_string(k) + " outside the model");
      }
      out_.fixed.emplace_back(A(i, k), value);
    }
  }

  const ApplicationModel& app_;
  const OfferCatalog& catalog_;
  const int n_, m_, o_;
  const std::vector<InstanceBounds> bounds_;
  CopModel out_;
};

int64_t CeilDiv(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace

int SurrogateVmCount(const ApplicationModel& app) {
  const int n = app.num_components();
  const std::vector<InstanceBounds> bounds = ComputeInstanceBounds(app);

  std::vector<int64_t> need(n);
  for (int i = 0; i < n; ++i) need[i] = bounds[i].lb;

  // Lower-bound propagation to a fixpoint. Counts only grow, so a run that
  // passes the divergence limit means the chains feed back on themselves.
  bool changed = true;
  while (changed) {
    changed = false;
    auto raise = [&](ComponentId id, int64_t value) {
      int64_t& slot = need[id - 1];
      const auto& ub = bounds[id - 1].ub;
      if (ub) value = std::min<int64_t>(value, *ub);
      if (value > slot) {
        slot = value;
        changed = true;
        if (slot > kDivergenceLimit) {
          throw UnboundedModelError(
              "instance count of '" + app.component(id).name +
              "' is unbounded; pass the number of VMs explicitly");
        }
      }
    };
    for (const StructuralConstraint& c : app.constraints) {
      if (auto* rp = std::get_if<RequireProvide>(&c)) {
        raise(rp->provider,
              CeilDiv(rp->n_req * need[rp->requirer - 1], rp->n_prov));
      } else if (auto* co = std::get_if<Colocation>(&c)) {
        raise(co->i, need[co->j - 1]);
        raise(co->j, need[co->i - 1]);
      }
    }
  }

  int64_t total = 0;
  int64_t full_floor = 0;
  for (int i = 0; i < n; ++i) {
    const int64_t count = bounds[i].ub ? *bounds[i].ub : need[i];
    if (bounds[i].full_deployment) {
      full_floor = std::max(full_floor, need[i]);
    } else {
      total += count;
    }
  }
  total = std::max({total, full_floor, int64_t{1}});
  if (total > kDivergenceLimit) {
    throw UnboundedModelError("surrogate VM count too large");
  }
  return static_cast<int>(total);
}

CopModel Encode(const ApplicationModel& app, const OfferCatalog& catalog,
                int num_columns, const FixedAssignment* fixed) {
  if (num_columns < 1) throw InputError("number of VMs must be >= 1");
  if (catalog.offers.empty()) throw InputError("empty offer catalog");
  for (const Diagnostic& d : Validate(app)) {
    if (d.severity == Severity::kError) throw InputError(d.message);
  }
  const Clique clique = MaxDeploymentClique(app);
  if (clique.weight > num_columns) {
    throw InfeasibleError("conflict clique needs " +
                          std::to_string(clique.weight) + " VMs but only " +
                          std::to_string(num_columns) + " are available");
  }
  return Encoder(app, catalog, num_columns).Run(fixed);
}

namespace {

// Accumulates an affine expression sum(coef * var) + constant, merging
// repeated variables.
class Affine {
 public:
  void Add(VarId v, int64_t coef) {
    if (coef != 0) coefs_[v] += coef;
  }
  void AddConstant(int64_t c) { constant_ += c; }
  int64_t constant() const { return constant_; }
  std::vector<Term> Terms() const {
    std::vector<Term> terms;
    for (const auto& [v, c] : coefs_) {
      if (c != 0) terms.push_back({c, v});
    }
    return terms;
  }

 private:
  std::map<VarId, int64_t> coefs_;
  int64_t constant_ = 0;
};

bool IsOfferGuard(const CopModel& m, const GuardedConstraint& g) {
  return (g.body.family == Family::kLink ||
          g.body.family == Family::kCapacity) &&
         g.guard.size() == 1 &&
         m.var(g.guard[0].var).ref.kind == VarKind::kType;
}

}  // namespace

CopModel LinearizeForLp(const CopModel& m) {
  for (const Variable& v : m.variables) {
    if (v.ref.kind == VarKind::kTypeIndicator) {
      throw InputError("model is already linearized");
    }
  }
  CopModel out = m;
  out.guarded.clear();
  const int o_count = m.num_offers;

  for (int k = 1; k <= m.num_columns; ++k) {
    for (int o = 1; o <= o_count; ++o) out.AddVariable(VarRef::Y(k, o), 0, 1);
  }
  auto y = [&out](int k, int o) { return out.Get(VarRef::Y(k, o)); };

  for (int k = 1; k <= m.num_columns; ++k) {
    const VarId t = m.Get(VarRef::T(k));
    const VarId v = m.Get(VarRef::V(k));
    const VarId p = m.Get(VarRef::P(k));

    std::vector<Term> choose = {{-1, v}};
    std::vector<Term> type = {{1, t}};
    std::vector<Term> price = {{1, p}};
    for (int o = 1; o <= o_count; ++o) {
      choose.push_back({1, y(k, o)});
      type.push_back({-o, y(k, o)});
      price.push_back({-m.offers[o - 1].price, y(k, o)});
    }
    out.constraints.push_back({std::move(choose), Sense::kEq, 0, Family::kLink});
    out.constraints.push_back({std::move(type), Sense::kEq, 0, Family::kLink});
    out.constraints.push_back({std::move(price), Sense::kEq, 0, Family::kLink});

    for (int r = 0; r < ResourceVector::kDimensions; ++r) {
      std::vector<Term> terms;
      for (int i = 1; i <= m.num_components; ++i) {
        const int64_t req = m.requirements[i - 1][r];
        if (req != 0) terms.push_back({req, m.Get(VarRef::A(i, k))});
      }
      if (terms.empty()) continue;
      for (int o = 1; o <= o_count; ++o) {
        const int64_t cap = m.offers[o - 1].capacity[r];
        if (cap != 0) terms.push_back({-cap, y(k, o)});
      }
      out.constraints.push_back(
          {std::move(terms), Sense::kLe, 0, Family::kCapacity});
    }
  }

  // Big-M rows for the remaining guards. A literal's "violation" is a 0/1
  // affine expression that is 0 exactly when the literal holds.
  auto violation = [&](const GuardLiteral& lit, Affine& expr, int64_t scale) {
    const Variable& var = m.var(lit.var);
    if (var.ref.kind == VarKind::kType) {
      if (lit.value == 0) {
        expr.Add(m.Get(VarRef::V(var.ref.k)), scale);
      } else {
        expr.AddConstant(scale);
        expr.Add(y(var.ref.k, static_cast<int>(lit.value)), -scale);
      }
      return;
    }
    if (var.lo < 0 || var.hi > 1) {
      throw InputError("cannot linearize guard on non-binary " +
                       var.ref.Name());
    }
    if (lit.value == 1) {
      expr.AddConstant(scale);
      expr.Add(lit.var, -scale);
    } else {
      expr.Add(lit.var, scale);
    }
  };

  for (const GuardedConstraint& g : m.guarded) {
    if (IsOfferGuard(m, g)) continue;
    // Emit body <= rhs (and/or >= rhs) relaxed by big_m * sum(violations).
    auto emit = [&](Sense sense) {
      LinearConstraint body = g.body;
      body.sense = sense;
      const int64_t big_m = sense == Sense::kLe
                                ? MaxActivity(m, body) - body.rhs
                                : body.rhs - MinActivity(m, body);
      if (big_m <= 0) return;  // the body can never be violated
      Affine expr;
      for (const Term& t : body.terms) expr.Add(t.var, t.coef);
      const int64_t sign = sense == Sense::kLe ? -1 : 1;
      for (const GuardLiteral& lit : g.guard) violation(lit, expr, sign * big_m);
      out.constraints.push_back({expr.Terms(), sense, body.rhs - expr.constant(),
                                 g.body.family});
    };
    if (g.body.sense != Sense::kGe) emit(Sense::kLe);
    if (g.body.sense != Sense::kLe) emit(Sense::kGe);
  }
  return out;
}

int64_t ObjectiveValue(const CopModel& m, const Valuation& x) {
  int64_t sum = 0;
  for (VarId p : m.objective) {
    if (p.index < 0 || static_cast<size_t>(p.index) >= x.size()) {
      throw InputError("valuation misses " + m.var(p).ref.Name());
    }
    sum += x[p.index];
  }
  return sum;
}

}  // namespace vmdeploy
