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

#include "vmdeploy/exporters.h"

namespace vmdeploy {
namespace {

std::string Expr(const CopModel& m, const std::vector<Term>& terms) {
  std::string out;
  for (const Term& t : terms) {
    const int64_t mag = t.coef < 0 ? -t.coef : t.coef;
    if (out.empty()) {
      if (t.coef < 0) out += "-";
    } else {
      out += t.coef < 0 ? " - " : " + ";
    }
    if (mag != 1) out += std::to_string(mag) + "*";
    out += m.var(t.var).ref.Name();
  }
  return out.empty() ? "0" : out;
}

std::string Comparison(const CopModel& m, const LinearConstraint& c) {
  const char* op = c.sense == Sense::kLe ? "<=" : c.sense == Sense::kEq ? "=" : ">=";
  return Expr(m, c.terms) + " " + op + " " + std::to_string(c.rhs);
}

}  // namespace

std::string ToFlatCp(const CopModel& m) {
  std::ostringstream out;
  out << "% N=" << m.num_components << " M=" << m.num_columns
      << " O=" << m.num_offers << "\n";
  int64_t max_cost = 0;
  for (const Variable& v : m.variables) {
    out << "var " << v.lo << ".." << v.hi << ": " << v.ref.Name() << ";\n";
  }
  for (VarId p : m.objective) max_cost += m.var(p).hi;
  out << "var 0.." << max_cost << ": cost;\n";
  for (const LinearConstraint& c : m.constraints) {
    out << "constraint " << Comparison(m, c) << ";\n";
  }
  for (const GuardedConstraint& g : m.guarded) {
    out << "constraint (";
    for (size_t idx = 0; idx < g.guard.size(); ++idx) {
      if (idx > 0) out << " /\\ ";
      out << m.var(g.guard[idx].var).ref.Name() << " = " << g.guard[idx].value;
    }
    out << ") -> (" << Comparison(m, g.body) << ");\n";
  }
  for (const auto& [var, value] : m.fixed) {
    out << "constraint " << m.var(var).ref.Name() << " = " << value << ";\n";
  }
  std::vector<Term> objective;
  for (VarId p : m.objective) objective.push_back({1, p});
  out << "constraint cost = " << Expr(m, objective) << ";\n";
  out << "solve minimize cost;\n";
  out << "output [\"cost = \\(cost);\\n\"];\n";
  return out.str();
}

}  // namespace vmdeploy
