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

#include "vmdeploy/model.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "vmdeploy/errors.h"

namespace vmdeploy {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::pair<ComponentId, ComponentId> Ordered(ComponentId i, ComponentId j) {
  return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
}

}  // namespace

std::string_view KindName(const StructuralConstraint& c) {
  return std::visit(
      Overloaded{
          [](const Conflict&) { return std::string_view("conflict"); },
          [](const Colocation&) { return std::string_view("colocation"); },
          [](const ExclusiveDeployment&) {
            return std::string_view("exclusive");
          },
          [](const RequireProvide&) {
            return std::string_view("require_provide");
          },
          [](const FullDeployment&) {
            return std::string_view("full_deployment");
          },
          [](const BoundedInstances&) { return std::string_view("bounded"); },
      },
      c);
}

std::string_view RelationSymbol(Relation r) {
  switch (r) {
    case Relation::kEq:
      return "=";
    case Relation::kLe:
      return "<=";
    case Relation::kGe:
      return ">=";
  }
  return "?";
}

ComponentId ApplicationModel::FindComponent(std::string_view name) const {
  for (const Component& c : components) {
    if (c.name == name) return c.id;
  }
  return 0;
}

OfferCatalog OfferCatalog::Prefix(int n) const {
  OfferCatalog out;
  out.source = source;
  out.offers.assign(offers.begin(),
                    offers.begin() + std::min<size_t>(n, offers.size()));
  return out;
}

bool HasErrors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) {
                       return d.severity == Severity::kError;
                     });
}

std::vector<InstanceBounds> ComputeInstanceBounds(const ApplicationModel& app) {
  std::vector<InstanceBounds> bounds(app.components.size());
  for (size_t i = 0; i < app.components.size(); ++i) {
    bounds[i].lb = app.components[i].instances_lb;
    bounds[i].ub = app.components[i].instances_ub;
  }
  auto tighten_ub = [](InstanceBounds& b, int ub) {
    b.ub = b.ub ? std::min(*b.ub, ub) : ub;
  };
  for (const StructuralConstraint& c : app.constraints) {
    if (const auto* e = std::get_if<ExclusiveDeployment>(&c)) {
      for (ComponentId id : e->members) bounds.at(id - 1).exclusive = true;
    } else if (const auto* f = std::get_if<FullDeployment>(&c)) {
      bounds.at(f->component - 1).full_deployment = true;
    } else if (const auto* b = std::get_if<BoundedInstances>(&c)) {
      InstanceBounds& ib = bounds.at(b->component - 1);
      if (b->relation != Relation::kLe) ib.lb = std::max(ib.lb, b->bound);
      if (b->relation != Relation::kGe) tighten_ub(ib, b->bound);
    }
  }
  return bounds;
}

ConflictGraph::ConflictGraph(int n) : n_(n), neighbors_(n) {}

void ConflictGraph::AddEdge(ComponentId i, ComponentId j) {
  if (i == j || HasEdge(i, j)) return;
  auto insert = [](std::vector<ComponentId>& v, ComponentId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert(neighbors_.at(i - 1), j);
  insert(neighbors_.at(j - 1), i);
}

bool ConflictGraph::HasEdge(ComponentId i, ComponentId j) const {
  const auto& v = neighbors_.at(i - 1);
  return std::binary_search(v.begin(), v.end(), j);
}

std::vector<std::pair<ComponentId, ComponentId>> ConflictGraph::Edges() const {
  std::vector<std::pair<ComponentId, ComponentId>> edges;
  for (ComponentId i = 1; i <= n_; ++i) {
    for (ComponentId j : Neighbors(i)) {
      if (i < j) edges.emplace_back(i, j);
    }
  }
  return edges;
}

ConflictGraph BuildConflictGraph(const ApplicationModel& app) {
  ConflictGraph g(app.num_components());
  for (const StructuralConstraint& c : app.constraints) {
    if (const auto* conflict = std::get_if<Conflict>(&c)) {
      g.AddEdge(conflict->i, conflict->j);
    }
  }
  return g;
}

std::vector<Diagnostic> Validate(const ApplicationModel& app) {
  std::vector<Diagnostic> out;
  auto error = [&out](std::string msg) {
    out.push_back({Severity::kError, std::move(msg)});
  };
  auto warning = [&out](std::string msg) {
    out.push_back({Severity::kWarning, std::move(msg)});
  };

  const int n = app.num_components();
  std::set<std::string> names;
  for (int idx = 0; idx < n; ++idx) {
    const Component& c = app.components[idx];
    if (c.id != idx + 1) {
      error("component '" + c.name + "' has id " + std::to_string(c.id) +
            ", expected " + std::to_string(idx + 1));
    }
    if (c.name.empty()) error("component " + std::to_string(c.id) + " has no name");
    if (!names.insert(c.name).second) {
      error("duplicate component name '" + c.name + "'");
    }
    const ResourceVector& r = c.requirements;
    if (r.cpu < 0 || r.memory < 0 || r.storage < 0) {
      error("component '" + c.name + "' has a negative requirement");
    }
    if (c.instances_lb < 1) {
      error("component '" + c.name + "' has lb < 1");
    }
    if (c.instances_ub && *c.instances_ub < c.instances_lb) {
      error("component '" + c.name + "' has ub " +
            std::to_string(*c.instances_ub) + " < lb " +
            std::to_string(c.instances_lb));
    }
  }

  auto valid_id = [n](ComponentId id) { return id >= 1 && id <= n; };
  auto label = [&app, &valid_id](ComponentId id) {
    return valid_id(id) ? "'" + app.component(id).name + "'"
                        : "#" + std::to_string(id);
  };

  bool references_ok = true;
  std::set<std::pair<ComponentId, ComponentId>> conflicts, colocations;
  std::set<ComponentId> full, exclusive;
  std::vector<const RequireProvide*> require_provides;
  std::vector<const BoundedInstances*> bounded;

  for (const StructuralConstraint& c : app.constraints) {
    std::visit(
        Overloaded{
            [&](const Conflict& x) {
              if (!valid_id(x.i) || !valid_id(x.j)) {
                error("conflict references unknown component");
                references_ok = false;
              } else if (x.i == x.j) {
                error("conflict of " + label(x.i) + " with itself");
              } else {
                conflicts.insert(Ordered(x.i, x.j));
              }
            },
            [&](const Colocation& x) {
              if (!valid_id(x.i) || !valid_id(x.j)) {
                error("colocation references unknown component");
                references_ok = false;
              } else if (x.i == x.j) {
                error("colocation of " + label(x.i) + " with itself");
              } else {
                colocations.insert(Ordered(x.i, x.j));
              }
            },
            [&](const ExclusiveDeployment& x) {
              std::set<ComponentId> distinct(x.members.begin(),
                                             x.members.end());
              if (distinct.size() != x.members.size()) {
                error("exclusive set lists a component twice");
              }
              if (distinct.size() < 2) {
                error("exclusive set needs at least 2 components");
              }
              for (ComponentId id : x.members) {
                if (!valid_id(id)) {
                  error("exclusive set references unknown component");
                  references_ok = false;
                } else {
                  exclusive.insert(id);
                }
              }
            },
            [&](const RequireProvide& x) {
              if (!valid_id(x.requirer) || !valid_id(x.provider)) {
                error("require_provide references unknown component");
                references_ok = false;
                return;
              }
              if (x.requirer == x.provider) {
                error("require_provide of " + label(x.requirer) +
                      " with itself");
              }
              if (x.n_req < 1 || x.n_prov < 1) {
                error("require_provide counts must be >= 1");
              }
              require_provides.push_back(&x);
            },
            [&](const FullDeployment& x) {
              if (!valid_id(x.component)) {
                error("full_deployment references unknown component");
                references_ok = false;
              } else {
                full.insert(x.component);
              }
            },
            [&](const BoundedInstances& x) {
              if (!valid_id(x.component)) {
                error("bounded references unknown component");
                references_ok = false;
                return;
              }
              if (x.bound < 0) error("bounded with negative bound");
              bounded.push_back(&x);
            },
        },
        c);
  }

  for (const auto& pair : conflicts) {
    if (colocations.count(pair)) {
      error("components " + label(pair.first) + " and " + label(pair.second) +
            " are both in conflict and co-located");
    }
  }
  for (const BoundedInstances* b : bounded) {
    if (b->relation == Relation::kEq && full.count(b->component)) {
      warning("full deployment of " + label(b->component) +
              " with a fixed instance count of " + std::to_string(b->bound) +
              " is infeasible once more VMs are leased");
    }
  }
  for (const RequireProvide* rp : require_provides) {
    if (exclusive.count(rp->provider) && !exclusive.count(rp->requirer)) {
      warning(label(rp->requirer) + " requires " + label(rp->provider) +
              ", which is in an exclusive set and may not be deployed");
    }
  }

  if (references_ok) {
    std::vector<InstanceBounds> b = ComputeInstanceBounds(app);
    for (int idx = 0; idx < n; ++idx) {
      const Component& c = app.components[idx];
      bool own_error = c.instances_ub && *c.instances_ub < c.instances_lb;
      if (!own_error && b[idx].ub && *b[idx].ub < b[idx].lb) {
        error("bounds of '" + c.name + "' are contradictory (lb " +
              std::to_string(b[idx].lb) + " > ub " +
              std::to_string(*b[idx].ub) + ")");
      }
    }
  }
  return out;
}

ApplicationModel WithInstancesLb(ApplicationModel app, std::string_view name,
                                 int lb) {
  ComponentId id = app.FindComponent(name);
  if (id == 0) {
    throw InputError("unknown component '" + std::string(name) + "'");
  }
  Component& c = app.components[id - 1];
  c.instances_lb = lb;
  if (c.instances_ub && *c.instances_ub < lb) c.instances_ub = lb;
  return app;
}

}  // namespace vmdeploy
