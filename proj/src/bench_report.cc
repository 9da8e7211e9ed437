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

// CSV form of run records, plot series and summaries.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "vmdeploy/bench.h"
#include "vmdeploy/errors.h"

namespace vmdeploy {
namespace {

bool Solved(const RunRecord& r) {
  return r.status == RunStatus::kOptimal || r.status == RunStatus::kInfeasible;
}

std::string FormatTime(double seconds) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", seconds);
  return buffer;
}

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
std::optional<T> OptionalInt(const std::string& text, int line,
                             const char* column) {
  if (text.empty() || text == "-") return std::nullopt;
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("line " + std::to_string(line),
                     std::string("bad ") + column + " '" + text + "'");
  }
  return value;
}

std::string SafeFileName(std::string name) {
  for (char& c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '-';
  }
  return name;
}

// Mean of `time` over `keys`, or empty when `keys` is empty.
template <typename Key>
std::optional<double> MeanOver(const std::set<Key>& keys,
                               const std::map<Key, double>& time) {
  if (keys.empty()) return std::nullopt;
  double sum = 0.0;
  for (const Key& k : keys) sum += time.at(k);
  return sum / static_cast<double>(keys.size());
}

// Orders by solved desc, then mean time asc (missing last), then name.
template <typename T>
bool BetterThan(const T& a, const std::string& a_name, const T& b,
                const std::string& b_name) {
  if (a.solved != b.solved) return a.solved > b.solved;
  if (a.mean_common_time_s.has_value() != b.mean_common_time_s.has_value()) {
    return a.mean_common_time_s.has_value();
  }
  if (a.mean_common_time_s && *a.mean_common_time_s != *b.mean_common_time_s) {
    return *a.mean_common_time_s < *b.mean_common_time_s;
  }
  return a_name < b_name;
}

// Solved count and mean over cells every member solved, for members whose
// records are keyed by Key.
template <typename Key>
struct Comparison {
  std::map<std::string, std::map<Key, double>> solved_time;  // member -> key
  std::map<std::string, int> cells;

  void Add(const std::string& member, const Key& key, const RunRecord& r) {
    ++cells[member];
    if (Solved(r)) solved_time[member].emplace(key, r.time_s);
  }

  std::set<Key> Common() const {
    std::set<Key> common;
    bool first = true;
    for (const auto& [member, count] : cells) {
      std::set<Key> mine;
      auto it = solved_time.find(member);
      if (it != solved_time.end()) {
        for (const auto& [key, t] : it->second) mine.insert(key);
      }
      if (first) {
        common = mine;
        first = false;
      } else {
        std::set<Key> both;
        std::set_intersection(common.begin(), common.end(), mine.begin(),
                              mine.end(), std::inserter(both, both.begin()));
        common = std::move(both);
      }
    }
    return common;
  }

  int SolvedCount(const std::string& member) const {
    auto it = solved_time.find(member);
    return it == solved_time.end() ? 0 : static_cast<int>(it->second.size());
  }

  std::optional<double> Mean(const std::string& member,
                             const std::set<Key>& common) const {
    auto it = solved_time.find(member);
    if (it == solved_time.end()) return std::nullopt;
    return MeanOver(common, it->second);
  }
};

std::string Table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::string OptionalTime(const std::optional<double>& t) {
  return t ? FormatTime(*t) : "-";
}

}  // namespace

std::string CsvRow(const RunRecord& r) {
  std::string row = r.case_name + ",";
  row += (r.instances ? std::to_string(*r.instances) : "") + ",";
  row += std::to_string(r.offers) + ",";
  row += r.strategy + "," + r.backend + ",";
  row += std::string(RunStatusName(r.status)) + ",";
  if (r.status == RunStatus::kTimeout) {
    row += "-";
  } else if (r.cost) {
    row += std::to_string(*r.cost);
  }
  row += "," + FormatTime(r.time_s) + ",";
  row += (r.nodes ? std::to_string(*r.nodes) : "") + ",";
  row += r.m_used ? std::to_string(*r.m_used) : "";
  return row;
}

std::string WriteCsv(const std::vector<RunRecord>& records) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const RunRecord& r : records) out += CsvRow(r) + "\n";
  return out;
}

std::vector<RunRecord> ParseCsv(std::string_view text) {
  std::vector<RunRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kCsvHeader) {
        throw ParseError("line 1", "expected header '" +
                                       std::string(kCsvHeader) + "'");
      }
      header = true;
      continue;
    }
    const std::vector<std::string> f = SplitFields(line);
    if (f.size() != 10) {
      throw ParseError("line " + std::to_string(number),
                       "expected 10 fields, got " + std::to_string(f.size()));
    }
    RunRecord r;
    r.case_name = f[0];
    r.instances = OptionalInt<int>(f[1], number, "instances");
    const auto offers = OptionalInt<int>(f[2], number, "offers");
    if (!offers) {
      throw ParseError("line " + std::to_string(number), "offers missing");
    }
    r.offers = *offers;
    r.strategy = f[3];
    r.backend = f[4];
    try {
      r.status = ParseRunStatus(f[5]);
    } catch (const InputError& e) {
      throw ParseError("line " + std::to_string(number), e.what());
    }
    r.cost = OptionalInt<int64_t>(f[6], number, "cost");
    try {
      size_t used = 0;
      r.time_s = std::stod(f[7], &used);
      if (used != f[7].size()) throw std::invalid_argument(f[7]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(number),
                       "bad time_s '" + f[7] + "'");
    }
    r.nodes = OptionalInt<int64_t>(f[8], number, "nodes");
    r.m_used = OptionalInt<int>(f[9], number, "M");
    records.push_back(std::move(r));
  }
  if (!header) throw ParseError("line 1", "missing header");
  return records;
}

std::map<std::string, std::string> PlotData(
    const std::vector<RunRecord>& records) {
  using GroupKey = std::tuple<std::string, std::string, std::string>;
  std::map<GroupKey, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    groups[{r.case_name, r.strategy, r.backend}].push_back(&r);
  }
  std::map<std::string, std::string> files;
  for (const auto& [key, members] : groups) {
    const auto& [case_name, strategy, backend] = key;
    std::set<int> offers;
    std::set<std::optional<int>> instances;
    for (const RunRecord* r : members) {
      offers.insert(r->offers);
      instances.insert(r->instances);
    }
    const bool by_instances = offers.size() == 1 && instances.size() > 1;
    const bool split = offers.size() > 1 && instances.size() > 1;

    std::map<std::string, std::vector<std::pair<int, double>>> series;
    for (const RunRecord* r : members) {
      if (r->status == RunStatus::kTimeout || r->status == RunStatus::kError) {
        continue;
      }
      std::string label = case_name;
      if (split && r->instances) label += "-i" + std::to_string(*r->instances);
      const int x = by_instances ? r->instances.value_or(0) : r->offers;
      series[label].emplace_back(x, r->time_s);
    }
    for (auto& [label, points] : series) {
      std::stable_sort(points.begin(), points.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string content;
      for (const auto& [x, t] : points) {
        content += std::to_string(x) + " " + FormatTime(t) + "\n";
      }
      files[SafeFileName(label + "_" + strategy + "_" + backend) + ".dat"] =
          content;
    }
  }
  return files;
}

Summary Summarize(const std::vector<RunRecord>& records) {
  Summary s;

  // Backends over cells (case, instances, offers, strategy).
  using Cell = std::tuple<std::string, int, int, std::string>;
  Comparison<Cell> backends;
  for (const RunRecord& r : records) {
    backends.Add(r.backend,
                 {r.case_name, r.instances.value_or(0), r.offers, r.strategy}, r);
  }
  const std::set<Cell> common = backends.Common();
  for (const auto& [backend, cells] : backends.cells) {
    s.backends.push_back({backend, backends.SolvedCount(backend), cells,
                          backends.Mean(backend, common)});
  }
  std::sort(s.backends.begin(), s.backends.end(),
            [](const BackendSummary& a, const BackendSummary& b) {
              return BetterThan(a, a.backend, b, b.backend);
            });

  // Best strategy per (case, backend) over cells (instances, offers).
  using Point = std::pair<int, int>;
  std::map<std::pair<std::string, std::string>, Comparison<Point>> groups;
  for (const RunRecord& r : records) {
    groups[{r.case_name, r.backend}].Add(
        r.strategy, {r.instances.value_or(0), r.offers}, r);
  }
  for (const auto& [key, cmp] : groups) {
    const std::set<Point> shared = cmp.Common();
    std::optional<BestStrategy> best;
    for (const auto& [strategy, cells] : cmp.cells) {
      BestStrategy candidate{key.first, key.second, strategy,
                             cmp.SolvedCount(strategy),
                             cmp.Mean(strategy, shared)};
      if (!best || BetterThan(candidate, candidate.strategy, *best,
                              best->strategy)) {
        best = candidate;
      }
    }
    s.best_strategies.push_back(*best);
  }

  // Virtual best per case and overall over cells (case, instances, offers).
  using VbCell = std::tuple<std::string, int, int>;
  std::map<VbCell, const RunRecord*> winner;
  std::set<VbCell> all_cells;
  for (const RunRecord& r : records) {
    const VbCell cell{r.case_name, r.instances.value_or(0), r.offers};
    all_cells.insert(cell);
    if (!Solved(r)) continue;
    auto it = winner.find(cell);
    if (it == winner.end() ||
        std::tie(r.time_s, r.backend, r.strategy) <
            std::tie(it->second->time_s, it->second->backend,
                     it->second->strategy)) {
      winner[cell] = &r;
    }
  }
  auto virtual_best = [&](const std::string& case_filter) {
    VirtualBest vb;
    vb.case_name = case_filter;
    std::map<std::string, int> backend_wins, strategy_wins;
    double total = 0.0;
    for (const VbCell& cell : all_cells) {
      if (case_filter != "*" && std::get<0>(cell) != case_filter) continue;
      ++vb.cells;
      auto it = winner.find(cell);
      if (it == winner.end()) continue;
      ++vb.solved;
      total += it->second->time_s;
      ++backend_wins[it->second->backend];
      ++strategy_wins[it->second->strategy];
    }
    auto most = [](const std::map<std::string, int>& wins) {
      std::string name = "-";
      int best = 0;
      for (const auto& [n, count] : wins) {
        if (count > best) {
          best = count;
          name = n;
        }
      }
      return name;
    };
    vb.backend = most(backend_wins);
    vb.strategy = most(strategy_wins);
    vb.mean_best_time_s = vb.solved ? total / vb.solved : 0.0;
    return vb;
  };
  std::set<std::string> cases;
  for (const VbCell& cell : all_cells) cases.insert(std::get<0>(cell));
  for (const std::string& c : cases) s.virtual_best.push_back(virtual_best(c));
  s.virtual_best.push_back(virtual_best("*"));
  return s;
}

std::string RenderSummaryText(const Summary& s) {
  std::string out = "Backends (best first)\n";
  std::vector<std::vector<std::string>> rows = {
      {"rank", "backend", "solved", "cells", "mean_common_time_s"}};
  int rank = 1;
  for (const BackendSummary& b : s.backends) {
    rows.push_back({std::to_string(rank++), b.backend, std::to_string(b.solved),
                    std::to_string(b.cells), OptionalTime(b.mean_common_time_s)});
  }
  out += Table(rows);

  out += "\nBest strategy per case and backend\n";
  rows = {{"case", "backend", "strategy", "solved", "mean_common_time_s"}};
  for (const BestStrategy& b : s.best_strategies) {
    rows.push_back({b.case_name, b.backend, b.strategy, std::to_string(b.solved),
                    OptionalTime(b.mean_common_time_s)});
  }
  out += Table(rows);

  out += "\nVirtual best\n";
  rows = {{"case", "backend", "strategy", "solved", "cells", "mean_best_time_s"}};
  for (const VirtualBest& v : s.virtual_best) {
    rows.push_back({v.case_name, v.backend, v.strategy, std::to_string(v.solved),
                    std::to_string(v.cells), FormatTime(v.mean_best_time_s)});
  }
  out += Table(rows);
  return out;
}

std::string RenderSummaryCsv(const Summary& s) {
  std::string out = "kind,case,backend,strategy,solved,cells,time_s\n";
  for (const BackendSummary& b : s.backends) {
    out += "backend,*," + b.backend + ",*," + std::to_string(b.solved) + "," +
           std::to_string(b.cells) + "," + OptionalTime(b.mean_common_time_s) +
           "\n";
  }
  for (const BestStrategy& b : s.best_strategies) {
    out += "best_strategy," + b.case_name + "," + b.backend + "," + b.strategy +
           "," + std::to_string(b.solved) + ",," +
           OptionalTime(b.mean_common_time_s) + "\n";
  }
  for (const VirtualBest& v : s.virtual_best) {
    out += "virtual_best," + v.case_name + "," + v.backend + "," + v.strategy +
           "," + std::to_string(v.solved) + "," + std::to_string(v.cells) + "," +
           FormatTime(v.mean_best_time_s) + "\n";
  }
  return out;
}

}  // namespace vmdeploy
