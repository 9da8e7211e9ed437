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

#include "vmdeploy/cli.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vmdeploy/bench.h"
#include "vmdeploy/encoder.h"
#include "vmdeploy/errors.h"
#include "vmdeploy/exporters.h"
#include "vmdeploy/solver.h"
#include "vmdeploy/symmetry.h"

namespace vmdeploy {
namespace {

struct Options {
  std::string model;
  std::string offers;
  std::string strategy = "NONE";
  double timeout_s = 60.0;
  int num_columns = 0;  // 0: surrogate
  std::string format;
  std::string out_file;
  std::string config;
  std::string out_dir = "bench_out";
};

std::string Names(const ApplicationModel& app,
                  const std::vector<ComponentId>& ids) {
  std::string out;
  for (ComponentId id : ids) {
    if (!out.empty()) out += ",";
    out += app.component(id).name;
  }
  return out;
}

int ValidateCommand(const Options& o, std::ostream& out) {
  const ApplicationModel app = LoadModelFile(o.model);
  const std::vector<Diagnostic> diagnostics = vmdeploy::Validate(app);
  int errors = 0;
  for (const Diagnostic& d : diagnostics) {
    const bool error = d.severity == Severity::kError;
    errors += error;
    out << (error ? "error: " : "warning: ") << d.message << "\n";
  }
  out << "errors=" << errors << " warnings=" << diagnostics.size() - errors
      << "\n";
  return errors ? kExitInputError : kExitSuccess;
}

int CliqueCommand(const Options& o, std::ostream& out) {
  const ApplicationModel app = LoadModelFile(o.model);
  if (HasErrors(vmdeploy::Validate(app))) {
    throw InputError("model has validation errors; run `validate`");
  }
  const Clique clique = MaxDeploymentClique(app);
  out << "clique=" << Names(app, clique.members) << "\n";
  out << "weight=" << clique.weight << "\n";
  const int num_columns =
      o.num_columns > 0 ? o.num_columns : SurrogateVmCount(app);
  const FixedAssignment fixed = FvFixing(app, clique, num_columns);
  out << "fixed_columns=" << fixed.fixed_columns << "\n";
  for (int k = 1; k <= fixed.fixed_columns; ++k) {
    for (ComponentId i : clique.members) {
      auto it = fixed.entries.find({i, k});
      if (it != fixed.entries.end() && it->second == 1) {
        out << "column " << k << ": " << app.component(i).name << "\n";
      }
    }
  }
  out << "fixed_entries=" << fixed.entries.size() << "\n";
  return kExitSuccess;
}

struct Prepared {
  ApplicationModel app;
  OfferCatalog catalog;
  int num_columns = 0;
  CopModel model;
};

Prepared Prepare(const Options& o) {
  Prepared p;
  p.app = LoadModelFile(o.model);
  p.catalog = ResolveCatalog(o.offers);
  const BreakerSpec spec = StrategyByName(o.strategy);
  p.num_columns = o.num_columns > 0 ? o.num_columns : SurrogateVmCount(p.app);
  p.model = ApplyStrategy(p.app, Encode(p.app, p.catalog, p.num_columns), spec);
  return p;
}

void PrintAssignment(const Prepared& p, const Valuation& x, std::ostream& out) {
  const CopModel& m = p.model;
  std::vector<int> leased;
  for (int k = 1; k <= m.num_columns; ++k) {
    if (x[m.Get(VarRef::T(k)).index] > 0) leased.push_back(k);
  }
  size_t name_width = 9;
  for (const Component& c : p.app.components) {
    name_width = std::max(name_width, c.name.size());
  }
  std::vector<std::string> headers;
  for (int k : leased) {
    const OfferId o = static_cast<OfferId>(x[m.Get(VarRef::T(k)).index]);
    headers.push_back(std::to_string(k) + ":" + p.catalog.offer(o).type_name);
  }
  out << std::left << std::setw(static_cast<int>(name_width)) << "component";
  for (const std::string& h : headers) out << "  " << h;
  out << "\n";
  for (const Component& c : p.app.components) {
    out << std::setw(static_cast<int>(name_width)) << c.name;
    for (size_t col = 0; col < leased.size(); ++col) {
      const int64_t a = x[m.Get(VarRef::A(c.id, leased[col])).index];
      out << "  " << std::setw(static_cast<int>(headers[col].size()))
          << (a ? "1" : ".");
    }
    out << "\n";
  }
  out << std::right;
  out << std::setw(static_cast<int>(name_width)) << std::left << "price";
  for (size_t col = 0; col < leased.size(); ++col) {
    out << "  " << std::setw(static_cast<int>(headers[col].size()))
        << x[m.Get(VarRef::P(leased[col])).index];
  }
  out << std::right << "\n";
}

int Solve(const Options& o, std::ostream& out) {
  Prepared p;
  try {
    p = Prepare(o);
  } catch (const InfeasibleError& e) {
    out << "status=Infeasible\n";
    out << "reason=" << e.what() << "\n";
    return kExitInfeasible;
  }
  SolverConfig config;
  config.timeout_s = o.timeout_s;
  const SolveResult r = SolveBranchAndBound(p.model, config);
  out << "status=" << StatusName(r.solution.status) << "\n";
  if (r.solution.cost) out << "cost=" << *r.solution.cost << "\n";
  if (r.solution.cost) PrintAssignment(p, r.solution.valuation, out);
  out << "M=" << p.num_columns << " strategy=" << o.strategy
      << " nodes=" << r.stats.nodes_explored
      << " backtracks=" << r.stats.backtracks
      << " prefixed_vars=" << r.stats.prefixed_vars << " time_s=" << std::fixed
      << std::setprecision(2) << r.stats.wall_time_s << "\n";
  out.unsetf(std::ios::fixed);
  switch (r.solution.status) {
    case SolveStatus::kOptimal:
      return kExitSuccess;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
    case SolveStatus::kTimeout:
      return kExitTimeout;
  }
  return kExitInternalError;
}

int ExportCommand(const Options& o, std::ostream& out) {
  const ExportFormat format = ParseFormat(o.format);
  const Prepared p = Prepare(o);
  std::ofstream file(o.out_file, std::ios::trunc);
  if (!file) throw InputError("cannot write " + o.out_file);
  file << Export(p.model, format);
  out << "wrote " << o.out_file << " (" << FormatName(format)
      << ", M=" << p.num_columns << ", strategy=" << o.strategy << ")\n";
  return kExitSuccess;
}

int Bench(const Options& o, std::ostream& out) {
  const BenchConfig config = LoadBenchConfig(o.config);
  std::filesystem::create_directories(o.out_dir);
  MatrixOptions options;
  options.incremental_csv = o.out_dir + "/results.csv";
  const std::vector<RunRecord> records = RunMatrix(config, options);
  WriteBenchOutputs(records, o.out_dir);
  out << "cells=" << records.size() << " out=" << o.out_dir << "\n";
  out << RenderSummaryText(Summarize(records));
  return kExitSuccess;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Optimal deployment of component-based applications on VMs",
               "vmdeploy"};
  app.require_subcommand(1);
  Options o;

  CLI::App* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("model", o.model, "Model JSON")->required();

  CLI::App* clique =
      app.add_subcommand("clique", "Print the conflict clique and FV fixing");
  clique->add_option("model", o.model, "Model JSON")->required();
  clique->add_option("--M", o.num_columns, "Number of VM columns");

  app.add_subcommand("strategies", "List symmetry-breaking strategies");

  CLI::App* solve = app.add_subcommand("solve", "Solve with the built-in solver");
  CLI::App* exp = app.add_subcommand("export", "Write a solver input file");
  for (CLI::App* sub : {solve, exp}) {
    sub->add_option("model", o.model, "Model JSON")->required();
    sub->add_option("--offers", o.offers, "Catalog CSV or seed:S,N")->required();
    sub->add_option("--strategy", o.strategy, "Strategy name");
    sub->add_option("--M", o.num_columns, "Number of VM columns")
        ->check(CLI::PositiveNumber);
  }
  solve->add_option("--timeout", o.timeout_s, "Seconds")
      ->check(CLI::PositiveNumber);
  exp->add_option("--format", o.format, "smt2, lp or flatcp")->required();
  exp->add_option("--out", o.out_file, "Output file")->required();

  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark matrix");
  bench->add_option("--config", o.config, "Benchmark config JSON")->required();
  bench->add_option("--out", o.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitSuccess;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInputError;
  }

  try {
    if (validate->parsed()) return ValidateCommand(o, out);
    if (clique->parsed()) return CliqueCommand(o, out);
    if (app.got_subcommand("strategies")) {
      for (const Strategy& s : EnumerateStrategies()) out << s.name << "\n";
      return kExitSuccess;
    }
    if (solve->parsed()) return Solve(o, out);
    if (exp->parsed()) return ExportCommand(o, out);
    if (bench->parsed()) return Bench(o, out);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnboundedModelError& e) {
    err << "input error: " << e.what() << " (pass --M)\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace vmdeploy
