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

#include <sstream>
#include <vector>

#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/exporters.h"

namespace vmdeploy {
namespace {

std::string IntLiteral(int64_t v) {
  return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v);
}

// Sum of (coef, name) items plus a constant, with positive coefficients.
std::string Sum(const std::vector<std::pair<int64_t, std::string>>& items,
                int64_t constant) {
  std::vector<std::string> parts;
  for (const auto& [coef, name] : items) {
    parts.push_back(coef == 1 ? name
                              : "(* " + std::to_string(coef) + " " + name + ")");
  }
  if (constant != 0 || parts.empty()) parts.push_back(IntLiteral(constant));
  if (parts.size() == 1) return parts.front();
  std::string out = "(+";
  for (const std::string& p : parts) out += " " + p;
  return out + ")";
}

// Positive terms stay on the left, negative ones move right together with
// the constant, so p_1 - p_2 >= 0 reads (>= p_1 p_2).
std::string Atom(const CopModel& m, const LinearConstraint& c) {
  std::vector<std::pair<int64_t, std::string>> left, right;
  for (const Term& t : c.terms) {
    if (t.coef > 0) {
      left.emplace_back(t.coef, m.var(t.var).ref.Name());
    } else if (t.coef < 0) {
      right.emplace_back(-t.coef, m.var(t.var).ref.Name());
    }
  }
  const char* op = c.sense == Sense::kLe ? "<=" : c.sense == Sense::kEq ? "=" : ">=";
  return std::string("(") + op + " " + Sum(left, 0) + " " + Sum(right, c.rhs) +
         ")";
}

std::string Literal(const CopModel& m, const GuardLiteral& lit) {
  return "(= " + m.var(lit.var).ref.Name() + " " + IntLiteral(lit.value) + ")";
}

void WriteBody(const CopModel& m, std::ostringstream& out) {
  out << "(set-logic QF_LIA)\n";
  out << "; N=" << m.num_components << " M=" << m.num_columns
      << " O=" << m.num_offers << "\n";
  for (const Variable& v : m.variables) {
    out << "(declare-fun " << v.ref.Name() << " () Int)\n";
  }
  for (const Variable& v : m.variables) {
    const std::string name = v.ref.Name();
    out << "(assert (and (>= " << name << " " << IntLiteral(v.lo) << ") (<= "
        << name << " " << IntLiteral(v.hi) << ")))\n";
  }
  for (const LinearConstraint& c : m.constraints) {
    out << "(assert " << Atom(m, c) << ")\n";
  }
  for (const GuardedConstraint& g : m.guarded) {
    std::string guard;
    if (g.guard.size() == 1) {
      guard = Literal(m, g.guard.front());
    } else {
      guard = "(and";
      for (const GuardLiteral& lit : g.guard) guard += " " + Literal(m, lit);
      guard += ")";
    }
    out << "(assert (=> " << guard << " " << Atom(m, g.body) << "))\n";
  }
  for (const auto& [var, value] : m.fixed) {
    out << "(assert (= " << m.var(var).ref.Name() << " " << IntLiteral(value)
        << "))\n";
  }
  std::vector<std::pair<int64_t, std::string>> objective;
  for (VarId p : m.objective) objective.emplace_back(1, m.var(p).ref.Name());
  out << "(declare-fun cost () Int)\n";
  out << "(assert (= cost " << Sum(objective, 0) << "))\n";
}

}  // namespace

std::string ToSmtLib(const CopModel& m) {
  std::ostringstream out;
  WriteBody(m, out);
  out << "(minimize cost)\n(check-sat)\n(get-objectives)\n";
  return out.str();
}

std::string ToSmtLibBounded(const CopModel& m,
                            std::optional<int64_t> strict_upper_bound) {
  std::ostringstream out;
  WriteBody(m, out);
  if (strict_upper_bound) {
    out << "(assert (< cost " << IntLiteral(*strict_upper_bound) << "))\n";
  }
  out << "(check-sat)\n(get-value (cost))\n";
  return out.str();
}

std::string_view FormatName(ExportFormat f) {
  switch (f) {
    case ExportFormat::kSmt2:
      return "smt2";
    case ExportFormat::kLp:
      return "lp";
    case ExportFormat::kFlatCp:
      return "flatcp";
  }
  return "?";
}

ExportFormat ParseFormat(std::string_view name) {
  for (ExportFormat f :
       {ExportFormat::kSmt2, ExportFormat::kLp, ExportFormat::kFlatCp}) {
    if (FormatName(f) == name) return f;
  }
  throw InputError("unknown export format '" + std::string(name) +
                   "' (expected smt2, lp or flatcp)");
}

std::string Export(const CopModel& m, ExportFormat format) {
  switch (format) {
    case ExportFormat::kSmt2:
      return ToSmtLib(m);
    case ExportFormat::kLp:
      return m.guarded.empty() ? ToLp(m) : ToLp(LinearizeForLp(m));
    case ExportFormat::kFlatCp:
      return ToFlatCp(m);
  }
  return {};
}

}  // namespace vmdeploy
