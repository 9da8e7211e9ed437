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

// Solver-agnostic linear constraint-optimization IR.
//
// Variables of the deployment problem, for component i, VM column k and
// offer o:
//   a_i_k  binary, component i runs on column k
//   t_k    0..O, offer leased for column k (0 = column not leased)
//   v_k    binary, column k is occupied
//   p_k    price paid for column k
//   y_k_o  binary, t_k == o (only after LinearizeForLp)
//   d_i    binary, exclusive-set member i is deployed
//   z_s_k  binary tie indicator s of the symmetry-breaking chain between
//          columns k and k+1
// Every constraint is linear over integers; guarded constraints only apply
// when all guard literals hold.

#ifndef VMDEPLOY_COP_H_
#define VMDEPLOY_COP_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vmdeploy/model.h"

namespace vmdeploy {

enum class VarKind : uint8_t {
  kAssign,
  kType,
  kOccupancy,
  kPrice,
  kTypeIndicator,
  kPresence,
  kTie,
};

struct VarRef {
  VarKind kind = VarKind::kAssign;
  int i = 0;  // component (a, d) or chain slot (z)
  int k = 0;  // column
  int o = 0;  // offer (y)

  static VarRef A(int i, int k) { return {VarKind::kAssign, i, k, 0}; }
  static VarRef T(int k) { return {VarKind::kType, 0, k, 0}; }
  static VarRef V(int k) { return {VarKind::kOccupancy, 0, k, 0}; }
  static VarRef P(int k) { return {VarKind::kPrice, 0, k, 0}; }
  static VarRef Y(int k, int o) { return {VarKind::kTypeIndicator, 0, k, o}; }
  static VarRef D(int i) { return {VarKind::kPresence, i, 0, 0}; }
  static VarRef Z(int slot, int k) { return {VarKind::kTie, slot, k, 0}; }

  // Deterministic solver-facing name, e.g. "a_2_3", "t_1", "y_4_17".
  std::string Name() const;

  auto operator<=>(const VarRef&) const = default;
};

// Inverse of VarRef::Name.
std::optional<VarRef> ParseVarName(std::string_view name);

// Index into CopModel::variables.
struct VarId {
  int32_t index = -1;
  auto operator<=>(const VarId&) const = default;
};

struct Variable {
  VarRef ref;
  int64_t lo = 0;
  int64_t hi = 0;
};

enum class Sense { kLe, kEq, kGe };
std::string_view SenseSymbol(Sense s);

// Which encoding rule produced a constraint. Used for reporting and by
// LinearizeForLp to recognize the offer-selection guards.
enum class Family : uint8_t {
  kAllocation,
  kOccupancy,
  kLink,
  kCapacity,
  kConflict,
  kColocation,
  kExclusive,
  kRequireProvide,
  kFullDeployment,
  kBreaker,
};
std::string_view FamilyName(Family f);

struct Term {
  int64_t coef = 0;
  VarId var;
};

// sum(terms) <sense> rhs
struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  int64_t rhs = 0;
  Family family = Family::kAllocation;
};

struct GuardLiteral {
  VarId var;
  int64_t value = 0;
};

// (AND of guard literals) => body
struct GuardedConstraint {
  std::vector<GuardLiteral> guard;
  LinearConstraint body;
};

// Pinned a_i_k entries produced by the FV preprocessing.
struct FixedAssignment {
  std::map<std::pair<ComponentId, int>, int> entries;  // (i, k) -> 0/1
  int fixed_columns = 0;                               // W
};

// Total valuation, indexed by VarId::index.
using Valuation = std::vector<int64_t>;

struct CopModel {
  int num_components = 0;  // N
  int num_columns = 0;     // M
  int num_offers = 0;      // O

  std::vector<Variable> variables;
  std::vector<LinearConstraint> constraints;
  std::vector<GuardedConstraint> guarded;
  std::vector<std::pair<VarId, int64_t>> fixed;
  std::vector<VarId> objective;  // minimize the sum of these (the p_k)

  // Instance data kept for solvers and LinearizeForLp.
  std::vector<ResourceVector> requirements;  // by component id - 1
  std::vector<VmOffer> offers;               // by offer id - 1

  VarId AddVariable(VarRef ref, int64_t lo, int64_t hi);
  std::optional<VarId> Find(const VarRef& ref) const;
  // Throws std::out_of_range when absent.
  VarId Get(const VarRef& ref) const;
  const Variable& var(VarId id) const { return variables.at(id.index); }
  int num_variables() const { return static_cast<int>(variables.size()); }

  // Number of constraint-like items addressed by Check(): linear
  // constraints, then guarded ones, then fixed entries.
  int num_checkable() const {
    return static_cast<int>(constraints.size() + guarded.size() +
                            fixed.size());
  }

 private:
  std::map<VarRef, VarId> index_;
};

int64_t Activity(const LinearConstraint& c, const Valuation& x);
bool Satisfied(const LinearConstraint& c, const Valuation& x);
bool GuardHolds(const GuardedConstraint& g, const Valuation& x);
bool Satisfied(const GuardedConstraint& g, const Valuation& x);

// Smallest / largest activity over the variable domains.
int64_t MinActivity(const CopModel& m, const LinearConstraint& c);
int64_t MaxActivity(const CopModel& m, const LinearConstraint& c);

// Human-readable rendering, e.g. "a_1_1 + a_2_1 <= 1".
std::string ToString(const CopModel& m, const LinearConstraint& c);
std::string ToString(const CopModel& m, const GuardedConstraint& g);

}  // namespace vmdeploy

#endif  // VMDEPLOY_COP_H_
