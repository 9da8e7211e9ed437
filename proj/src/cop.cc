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

#include "vmdeploy/cop.h"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace vmdeploy {
namespace {

bool ParseInt(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

std::vector<std::string_view> SplitUnderscore(std::string_view s) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find('_', start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string VarRef::Name() const {
  auto s = [](int x) { return std::to_string(x); };
  switch (kind) {
    case VarKind::kAssign:
      return "a_" + s(i) + "_" + s(k);
    case VarKind::kType:
      return "t_" + s(k);
    case VarKind::kOccupancy:
      return "v_" + s(k);
    case VarKind::kPrice:
      return "p_" + s(k);
    case VarKind::kTypeIndicator:
      return "y_" + s(k) + "_" + s(o);
    case VarKind::kPresence:
      return "d_" + s(i);
    case VarKind::kTie:
      return "z_" + s(i) + "_" + s(k);
  }
  return "?";
}

std::optional<VarRef> ParseVarName(std::string_view name) {
  std::vector<std::string_view> parts = SplitUnderscore(name);
  if (parts.size() < 2 || parts[0].size() != 1) return std::nullopt;
  std::vector<int> n(parts.size() - 1);
  for (size_t p = 1; p < parts.size(); ++p) {
    if (!ParseInt(parts[p], n[p - 1])) return std::nullopt;
  }
  const char tag = parts[0][0];
  if (n.size() == 1) {
    switch (tag) {
      case 't':
        return VarRef::T(n[0]);
      case 'v':
        return VarRef::V(n[0]);
      case 'p':
        return VarRef::P(n[0]);
      case 'd':
        return VarRef::D(n[0]);
      default:
        return std::nullopt;
    }
  }
  if (n.size() == 2) {
    switch (tag) {
      case 'a':
        return VarRef::A(n[0], n[1]);
      case 'y':
        return VarRef::Y(n[0], n[1]);
      case 'z':
        return VarRef::Z(n[0], n[1]);
      default:
        return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string_view SenseSymbol(Sense s) {
  switch (s) {
    case Sense::kLe:
      return "<=";
    case Sense::kEq:
      return "=";
    case Sense::kGe:
      return ">=";
  }
  return "?";
}

std::string_view FamilyName(Family f) {
  switch (f) {
    case Family::kAllocation:
      return "allocation";
    case Family::kOccupancy:
      return "occupancy";
    case Family::kLink:
      return "link";
    case Family::kCapacity:
      return "capacity";
    case Family::kConflict:
      return "conflict";
    case Family::kColocation:
      return "colocation";
    case Family::kExclusive:
      return "exclusive";
    case Family::kRequireProvide:
      return "require_provide";
    case Family::kFullDeployment:
      return "full_deployment";
    case Family::kBreaker:
      return "breaker";
  }
  return "?";
}

VarId CopModel::AddVariable(VarRef ref, int64_t lo, int64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty domain for " + ref.Name());
  VarId id{static_cast<int32_t>(variables.size())};
  auto [it, inserted] = index_.emplace(ref, id);
  if (!inserted) {
    throw std::invalid_argument("duplicate variable " + ref.Name());
  }
  variables.push_back({ref, lo, hi});
  return id;
}

std::optional<VarId> CopModel::Find(const VarRef& ref) const {
  auto it = index_.find(ref);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId CopModel::Get(const VarRef& ref) const {
  auto it = index_.find(ref);
  if (it == index_.end()) throw std::out_of_range("no variable " + ref.Name());
  return it->second;
}

int64_t Activity(const LinearConstraint& c, const Valuation& x) {
  int64_t sum = 0;
  for (const Term& t : c.terms) sum += t.coef * x[t.var.index];
  return sum;
}

bool Satisfied(const LinearConstraint& c, const Valuation& x) {
  const int64_t a = Activity(c, x);
  switch (c.sense) {
    case Sense::kLe:
      return a <= c.rhs;
    case Sense::kEq:
      return a == c.rhs;
    case Sense::kGe:
      return a >= c.rhs;
  }
  return false;
}

bool GuardHolds(const GuardedConstraint& g, const Valuation& x) {
  for (const GuardLiteral& lit : g.guard) {
    if (x[lit.var.index] != lit.value) return false;
  }
  return true;
}

bool Satisfied(const GuardedConstraint& g, const Valuation& x) {
  return !GuardHolds(g, x) || Satisfied(g.body, x);
}

int64_t MinActivity(const CopModel& m, const LinearConstraint& c) {
  int64_t sum = 0;
  for (const Term& t : c.terms) {
    const Variable& v = m.var(t.var);
    sum += t.coef > 0 ? t.coef * v.lo : t.coef * v.hi;
  }
  return sum;
}

int64_t MaxActivity(const CopModel& m, const LinearConstraint& c) {
  int64_t sum = 0;
  for (const Term& t : c.terms) {
    const Variable& v = m.var(t.var);
    sum += t.coef > 0 ? t.coef * v.hi : t.coef * v.lo;
  }
  return sum;
}

std::string ToString(const CopModel& m, const LinearConstraint& c) {
  std::ostringstream out;
  bool first = true;
  for (const Term& t : c.terms) {
    int64_t coef = t.coef;
    if (first) {
      if (coef < 0) out << "-";
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    if (coef < 0) coef = -coef;
    if (coef != 1) out << coef << "*";
    out << m.var(t.var).ref.Name();
    first = false;
  }
  if (first) out << "0";
  out << " " << SenseSymbol(c.sense) << " " << c.rhs;
  return out.str();
}

std::string ToString(const CopModel& m, const GuardedConstraint& g) {
  std::ostringstream out;
  for (size_t i = 0; i < g.guard.size(); ++i) {
    if (i) out << " & ";
    out << m.var(g.guard[i].var).ref.Name() << " = " << g.guard[i].value;
  }
  out << " => " << ToString(m, g.body);
  return out.str();
}

}  // namespace vmdeploy
