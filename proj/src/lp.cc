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

// CPLEX LP writer. Rows are named c<index> using the same numbering as
// Check(): linear constraints first, then the fixed entries.

#include <map>
#include <sstream>
#include <vector>

#include "vmdeploy/errors.h"
#include "vmdeploy/exporters.h"

namespace vmdeploy {
namespace {

constexpr size_t kMaxLineLength = 250;

class LineWriter {
 public:
  explicit LineWriter(std::ostringstream& out) : out_(out) {}

  void Begin(const std::string& head) {
    out_ << head;
    column_ = head.size();
  }
  void Token(const std::string& token) {
    if (column_ + 1 + token.size() > kMaxLineLength) {
      out_ << "\n  ";
      column_ = 2;
    } else {
      out_ << ' ';
      ++column_;
    }
    out_ << token;
    column_ += token.size();
  }
  void End() { out_ << '\n'; }

 private:
  std::ostringstream& out_;
  size_t column_ = 0;
};

// Merges repeated variables and drops zero coefficients; keeps first-use
// order so the output stays deterministic.
std::vector<Term> Normalize(const std::vector<Term>& terms) {
  std::vector<Term> merged;
  std::map<VarId, size_t> slot;
  for (const Term& t : terms) {
    auto [it, inserted] = slot.emplace(t.var, merged.size());
    if (inserted) {
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::vector<Term> out;
  for (const Term& t : merged) {
    if (t.coef != 0) out.push_back(t);
  }
  return out;
}

void WriteTerms(const CopModel& m, const std::vector<Term>& terms,
                LineWriter& line) {
  bool first = true;
  for (const Term& t : terms) {
    const int64_t mag = t.coef < 0 ? -t.coef : t.coef;
    std::string token;
    if (t.coef < 0) {
      token = "- ";
    } else if (!first) {
      token = "+ ";
    }
    if (mag != 1) token += std::to_string(mag) + " ";
    token += m.var(t.var).ref.Name();
    line.Token(token);
    first = false;
  }
}

void WriteRow(const CopModel& m, int index, std::vector<Term> terms,
              Sense sense, int64_t rhs, LineWriter& line) {
  terms = Normalize(terms);
  if (terms.empty()) terms.push_back({0, m.objective.front()});
  line.Begin(" c" + std::to_string(index) + ":");
  if (terms.size() == 1 && terms.front().coef == 0) {
    line.Token("0 " + m.var(terms.front().var).ref.Name());
  } else {
    WriteTerms(m, terms, line);
  }
  line.Token(sense == Sense::kLe ? "<=" : sense == Sense::kEq ? "=" : ">=");
  line.Token(std::to_string(rhs));
  line.End();
}

}  // namespace

std::string ToLp(const CopModel& m) {
  if (!m.guarded.empty()) {
    throw InputError("LP export needs a model without guarded constraints (" +
                     std::to_string(m.guarded.size()) +
                     " present); linearize it first");
  }
  std::ostringstream out;
  LineWriter line(out);
  out << "\\ N=" << m.num_components << " M=" << m.num_columns
      << " O=" << m.num_offers << "\n";
  out << "Minimize\n";
  line.Begin(" obj:");
  std::vector<Term> objective;
  for (VarId p : m.objective) objective.push_back({1, p});
  WriteTerms(m, objective, line);
  line.End();

  out << "Subject To\n";
  int index = 0;
  for (const LinearConstraint& c : m.constraints) {
    WriteRow(m, index++, c.terms, c.sense, c.rhs, line);
  }
  for (const auto& [var, value] : m.fixed) {
    WriteRow(m, index++, {{1, var}}, Sense::kEq, value, line);
  }

  std::vector<std::string> binaries, generals;
  out << "Bounds\n";
  for (const Variable& v : m.variables) {
    if (v.lo == 0 && v.hi == 1) {
      binaries.push_back(v.ref.Name());
      continue;
    }
    generals.push_back(v.ref.Name());
    out << " " << v.lo << " <= " << v.ref.Name() << " <= " << v.hi << "\n";
  }
  auto section = [&](const char* title, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << title << "\n";
    line.Begin("");
    for (const std::string& n : names) line.Token(n);
    line.End();
  };
  section("Binaries", binaries);
  section("Generals", generals);
  out << "End\n";
  return out.str();
}

}  // namespace vmdeploy
