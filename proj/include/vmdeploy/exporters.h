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

// Text serializations of a CopModel and a small driver for external solver
// executables. All writers are deterministic: the same model always yields
// the same bytes. Variables keep their VarRef::Name() spelling in every
// format so solutions can be read back with ParseVarName().

#ifndef VMDEPLOY_EXPORTERS_H_
#define VMDEPLOY_EXPORTERS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vmdeploy/cop.h"

namespace vmdeploy {

enum class ExportFormat { kSmt2, kLp, kFlatCp };
std::string_view FormatName(ExportFormat f);
// "smt2", "lp" or "flatcp". Throws InputError.
ExportFormat ParseFormat(std::string_view name);

// SMT-LIB2 over QF_LIA with a (minimize ...) directive for optimizing
// solvers.
std::string ToSmtLib(const CopModel& m);

// Satisfiability variant for solvers without optimization: declares `cost`,
// asserts cost < bound when a bound is given, and asks for (get-value (cost)).
std::string ToSmtLibBounded(const CopModel& m,
                            std::optional<int64_t> strict_upper_bound);

// CPLEX LP format. Throws InputError when the model still has guarded
// constraints (run LinearizeForLp first).
std::string ToLp(const CopModel& m);

// Flat MiniZinc-style model; the grammar is in docs/flatcp.md.
std::string ToFlatCp(const CopModel& m);

// Dispatches on the format; kLp linearizes first when needed.
std::string Export(const CopModel& m, ExportFormat format);

enum class ExternalStatus { kOptimal, kSat, kInfeasible, kTimeout, kError };
std::string_view ExternalStatusName(ExternalStatus s);

struct ExternalResult {
  ExternalStatus status = ExternalStatus::kError;
  std::optional<int64_t> cost;
  double wall_time_s = 0.0;
  std::string raw_excerpt;
};

// Interprets solver output:
//   kSmt2    "unsat" / "sat" followed by an (objectives ((... N))) block or a
//            ((cost N)) value list
//   kLp      CBC/CPLEX/Gurobi-style "Objective value: N" lines, or an
//            "infeasible" verdict
//   kFlatCp  "cost = N;" lines (the last one wins), "==========" marks a
//            proven optimum, "=====UNSATISFIABLE=====" infeasibility
// Anything else yields kError with an excerpt of the output.
ExternalResult ParseExternalOutput(ExportFormat format, std::string_view out);

// Runs `command_template` with {file} and {timeout_s} substituted, as a
// subprocess without a shell. The process is killed at timeout + 5 s, which
// then reports kTimeout. Throws ExecutableMissingError when the program is
// not found on PATH.
ExternalResult RunExternal(const std::string& command_template,
                           const std::string& model_file, double timeout_s,
                           ExportFormat format);

// Optimum by repeated satisfiability calls with a decreasing cost bound,
// for SMT solvers without (minimize). Writes temporary files into `work_dir`.
ExternalResult SolveSmtByDeepening(const CopModel& m,
                                   const std::string& command_template,
                                   const std::string& work_dir,
                                   double timeout_s);

}  // namespace vmdeploy

#endif  // VMDEPLOY_EXPORTERS_H_
