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

// Domain model: applications made of components with hardware requirements
// and structural constraints, and catalogs of priced VM offers.

#ifndef VMDEPLOY_MODEL_H_
#define VMDEPLOY_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vmdeploy {

// Component ids and offer ids are 1-based, matching the row/column indices
// used throughout the encodings.
using ComponentId = int;
using OfferId = int;

struct ResourceVector {
  int64_t cpu = 0;      // cores
  int64_t memory = 0;   // MB
  int64_t storage = 0;  // GB

  static constexpr int kDimensions = 3;
  int64_t operator[](int r) const {
    return r == 0 ? cpu : (r == 1 ? memory : storage);
  }
  bool operator==(const ResourceVector&) const = default;
};

inline constexpr std::string_view kResourceNames[ResourceVector::kDimensions] =
    {"cpu", "memory", "storage"};

struct Component {
  ComponentId id = 0;
  std::string name;
  ResourceVector requirements;
  int instances_lb = 1;
  std::optional<int> instances_ub;

  bool operator==(const Component&) const = default;
};

struct Conflict {
  ComponentId i = 0;
  ComponentId j = 0;
  bool operator==(const Conflict&) const = default;
};

struct Colocation {
  ComponentId i = 0;
  ComponentId j = 0;
  bool operator==(const Colocation&) const = default;
};

// Exactly one member of the set is deployed.
struct ExclusiveDeployment {
  std::vector<ComponentId> members;
  bool operator==(const ExclusiveDeployment&) const = default;
};

// n_req * instances(requirer) <= n_prov * instances(provider).
struct RequireProvide {
  ComponentId requirer = 0;
  ComponentId provider = 0;
  int n_req = 1;
  int n_prov = 1;
  bool operator==(const RequireProvide&) const = default;
};

// The component runs on every leased VM that hosts none of its conflicts.
struct FullDeployment {
  ComponentId component = 0;
  bool operator==(const FullDeployment&) const = default;
};

enum class Relation { kEq, kLe, kGe };

struct BoundedInstances {
  ComponentId component = 0;
  Relation relation = Relation::kEq;
  int bound = 0;
  bool operator==(const BoundedInstances&) const = default;
};

using StructuralConstraint =
    std::variant<Conflict, Colocation, ExclusiveDeployment, RequireProvide,
                 FullDeployment, BoundedInstances>;

std::string_view KindName(const StructuralConstraint& c);
std::string_view RelationSymbol(Relation r);

struct ApplicationModel {
  std::string name;
  std::vector<Component> components;
  std::vector<StructuralConstraint> constraints;

  int num_components() const { return static_cast<int>(components.size()); }
  const Component& component(ComponentId id) const {
    return components.at(id - 1);
  }
  // Returns the id of the component with this name, or 0.
  ComponentId FindComponent(std::string_view name) const;

  bool operator==(const ApplicationModel&) const = default;
};

struct VmOffer {
  OfferId id = 0;
  std::string type_name;
  ResourceVector capacity;
  int64_t price = 0;  // micro-currency-units per hour

  bool operator==(const VmOffer&) const = default;
};

struct OfferCatalog {
  std::vector<VmOffer> offers;
  std::string source;

  int size() const { return static_cast<int>(offers.size()); }
  const VmOffer& offer(OfferId id) const { return offers.at(id - 1); }
  // First n offers, keeping ids.
  OfferCatalog Prefix(int n) const;
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string message;
};

bool HasErrors(const std::vector<Diagnostic>& diagnostics);

// Instance-count bounds of one component after merging the component's own
// lb/ub with every BoundedInstances constraint that targets it.
struct InstanceBounds {
  int lb = 1;
  std::optional<int> ub;
  bool exclusive = false;  // member of some ExclusiveDeployment set
  bool full_deployment = false;

  // Instances every feasible plan must contain. Exclusive members may be
  // left out entirely, so their mandatory count is 0.
  int mandatory() const { return exclusive ? 0 : lb; }
};

// Indexed by component id - 1.
std::vector<InstanceBounds> ComputeInstanceBounds(const ApplicationModel& app);

// Undirected simple graph over component ids 1..n.
class ConflictGraph {
 public:
  explicit ConflictGraph(int n);

  int num_vertices() const { return n_; }
  void AddEdge(ComponentId i, ComponentId j);
  bool HasEdge(ComponentId i, ComponentId j) const;
  // Sorted neighbor ids.
  const std::vector<ComponentId>& Neighbors(ComponentId i) const {
    return neighbors_.at(i - 1);
  }
  // Edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<ComponentId, ComponentId>> Edges() const;

 private:
  int n_;
  std::vector<std::vector<ComponentId>> neighbors_;
};

// Parses the JSON model-file format. Throws ParseError.
ApplicationModel LoadModel(std::string_view text);
ApplicationModel LoadModelFile(const std::string& path);
// Inverse of LoadModel; LoadModel(SaveModel(m)) == m for valid models.
std::string SaveModel(const ApplicationModel& app);

// Parses the offer CSV format. Throws ParseError / InputError.
OfferCatalog LoadCatalog(std::string_view text, std::string source = "",
                         bool allow_duplicates = false);
OfferCatalog LoadCatalogFile(const std::string& path,
                             bool allow_duplicates = false);
std::string SaveCatalog(const OfferCatalog& catalog);

// Resolves "seed:<seed>,<n>" to a synthetic catalog, anything else to a file.
OfferCatalog ResolveCatalog(const std::string& spec);

// Deterministic synthetic catalog. Offers are drawn one after another from a
// single stream, so GenerateCatalog(s, n) is a prefix of GenerateCatalog(s, m)
// for n <= m. Throws InputError when n < 1.
OfferCatalog GenerateCatalog(uint64_t seed, int n);

std::vector<Diagnostic> Validate(const ApplicationModel& app);

ConflictGraph BuildConflictGraph(const ApplicationModel& app);

// Pins the lower bound of the named component (benchmark instance scaling).
ApplicationModel WithInstancesLb(ApplicationModel app, std::string_view name,
                                 int lb);

}  // namespace vmdeploy

#endif  // VMDEPLOY_MODEL_H_
