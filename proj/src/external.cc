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

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include "vmdeploy/errors.h"
#include "vmdeploy/exporters.h"

extern char** environ;

namespace vmdeploy {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kKillGraceSeconds = 5.0;
constexpr size_t kExcerptLength = 400;

std::string Excerpt(std::string_view out) {
  if (out.size() <= kExcerptLength) return std::string(out);
  return std::string(out.substr(0, kExcerptLength)) + "...";
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

// First non-empty line.
std::string FirstLine(std::string_view out) {
  std::istringstream in{std::string(out)};
  std::string line;
  while (std::getline(in, line)) {
    const size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const size_t e = line.find_last_not_of(" \t\r");
    return line.substr(b, e - b + 1);
  }
  return {};
}

ExternalResult ParseSmt(std::string_view out) {
  ExternalResult r;
  r.raw_excerpt = Excerpt(out);
  const std::string verdict = FirstLine(out);
  if (verdict == "unsat") {
    r.status = ExternalStatus::kInfeasible;
    return r;
  }
  if (verdict == "unknown" || verdict == "timeout") {
    r.status = ExternalStatus::kTimeout;
    return r;
  }
  if (verdict != "sat") return r;
  static const std::regex kCost(R"(\(\s*cost\s+(\d+)\s*\))");
  std::smatch match;
  const std::string text(out);
  if (!std::regex_search(text, match, kCost)) return r;
  r.cost = std::stoll(match[1].str());
  r.status = text.find("(objectives") != std::string::npos
                 ? ExternalStatus::kOptimal
                 : ExternalStatus::kSat;
  return r;
}

ExternalResult ParseLp(std::string_view out) {
  ExternalResult r;
  r.raw_excerpt = Excerpt(out);
  const std::string text(out);
  const std::string lower = Lower(out);
  static const std::regex kObjective(
      R"((?:Objective value|Objective|objective value)\s*[:=]\s*(-?[0-9.]+(?:[eE][-+]?[0-9]+)?))");
  std::smatch match;
  std::optional<int64_t> cost;
  if (std::regex_search(text, match, kObjective)) {
    cost = std::llround(std::stod(match[1].str()));
  }
  if (cost && lower.find("optimal solution found") != std::string::npos) {
    r.cost = cost;
    r.status = ExternalStatus::kOptimal;
    return r;
  }
  if (lower.find("infeasible") != std::string::npos) {
    r.status = ExternalStatus::kInfeasible;
    return r;
  }
  if (lower.find("stopped on time") != std::string::npos ||
      lower.find("time limit") != std::string::npos) {
    r.status = ExternalStatus::kTimeout;
    r.cost = cost;
    return r;
  }
  if (!cost) return r;
  r.cost = cost;
  r.status = lower.find("optimal") != std::string::npos
                 ? ExternalStatus::kOptimal
                 : ExternalStatus::kSat;
  return r;
}

ExternalResult ParseFlatCp(std::string_view out) {
  ExternalResult r;
  r.raw_excerpt = Excerpt(out);
  const std::string text(out);
  if (text.find("=====UNSATISFIABLE=====") != std::string::npos) {
    r.status = ExternalStatus::kInfeasible;
    return r;
  }
  static const std::regex kCost(R"(cost\s*=\s*(\d+)\s*;)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kCost);
       it != std::sregex_iterator(); ++it) {
    r.cost = std::stoll((*it)[1].str());
  }
  if (text.find("=====UNKNOWN=====") != std::string::npos) {
    r.status = ExternalStatus::kTimeout;
    return r;
  }
  if (!r.cost) return r;
  r.status = text.find("==========") != std::string::npos
                 ? ExternalStatus::kOptimal
                 : ExternalStatus::kSat;
  return r;
}

std::vector<std::string> SplitTemplate(const std::string& command_template,
                                       const std::string& file,
                                       double timeout_s) {
  std::ostringstream timeout;
  timeout << static_cast<int64_t>(std::ceil(timeout_s));
  std::vector<std::string> args;
  std::istringstream in(command_template);
  std::string word;
  while (in >> word) {
    for (const auto& [key, value] :
         {std::pair<std::string, std::string>{"{file}", file},
          {"{timeout_s}", timeout.str()}}) {
      for (size_t pos = word.find(key); pos != std::string::npos;
           pos = word.find(key, pos + value.size())) {
        word.replace(pos, key.size(), value);
      }
    }
    args.push_back(word);
  }
  if (args.empty()) throw InputError("empty solver command template");
  return args;
}

bool Executable(const std::string& path) {
  return access(path.c_str(), X_OK) == 0;
}

std::string ResolveOnPath(const std::string& program) {
  if (program.find('/') != std::string::npos) {
    if (Executable(program)) return program;
  } else if (const char* path = std::getenv("PATH")) {
    std::istringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      const std::string candidate = (dir.empty() ? "." : dir) + "/" + program;
      if (Executable(candidate)) return candidate;
    }
  }
  throw ExecutableMissingError("solver executable not found: " + program);
}

}  // namespace

std::string_view ExternalStatusName(ExternalStatus s) {
  switch (s) {
    case ExternalStatus::kOptimal:
      return "Optimal";
    case ExternalStatus::kSat:
      return "Sat";
    case ExternalStatus::kInfeasible:
      return "Infeasible";
    case ExternalStatus::kTimeout:
      return "Timeout";
    case ExternalStatus::kError:
      return "Error";
  }
  return "?";
}

ExternalResult ParseExternalOutput(ExportFormat format, std::string_view out) {
  switch (format) {
    case ExportFormat::kSmt2:
      return ParseSmt(out);
    case ExportFormat::kLp:
      return ParseLp(out);
    case ExportFormat::kFlatCp:
      return ParseFlatCp(out);
  }
  return {};
}

ExternalResult RunExternal(const std::string& command_template,
                           const std::string& model_file, double timeout_s,
                           ExportFormat format) {
  std::vector<std::string> args =
      SplitTemplate(command_template, model_file, timeout_s);
  const std::string program = ResolveOnPath(args.front());
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, fds[0]);
  posix_spawn_file_actions_addclose(&actions, fds[1]);

  const auto start = Clock::now();
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, program.c_str(), &actions, nullptr,
                             argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(fds[1]);
  if (rc != 0) {
    close(fds[0]);
    throw ExecutableMissingError("cannot start " + program);
  }

  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(timeout_s + kKillGraceSeconds));
  std::string output;
  bool killed = false;
  char buffer[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - Clock::now())
                          .count();
    if (left <= 0) {
      kill(pid, SIGKILL);
      killed = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, static_cast<int>(std::min<int64_t>(left, 1000)));
    if (ready <= 0) continue;
    const ssize_t n = read(fds[0], buffer, sizeof(buffer));
    if (n <= 0) break;
    output.append(buffer, static_cast<size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);

  ExternalResult r;
  if (killed) {
    r.status = ExternalStatus::kTimeout;
    r.raw_excerpt = Excerpt(output);
  } else {
    r = ParseExternalOutput(format, output);
  }
  r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

ExternalResult SolveSmtByDeepening(const CopModel& m,
                                   const std::string& command_template,
                                   const std::string& work_dir,
                                   double timeout_s) {
  ExternalResult best;
  best.status = ExternalStatus::kInfeasible;
  std::optional<int64_t> bound;
  const std::string file = work_dir + "/deepening.smt2";
  for (;;) {
    const double left = timeout_s - best.wall_time_s;
    if (left <= 0) {
      best.status = ExternalStatus::kTimeout;
      return best;
    }
    {
      std::ofstream out(file);
      out << ToSmtLibBounded(m, bound);
    }
    ExternalResult step =
        RunExternal(command_template, file, left, ExportFormat::kSmt2);
    best.wall_time_s += step.wall_time_s;
    best.raw_excerpt = step.raw_excerpt;
    switch (step.status) {
      case ExternalStatus::kSat:
      case ExternalStatus::kOptimal:
        best.cost = step.cost;
        bound = step.cost;
        break;
      case ExternalStatus::kInfeasible:
        best.status = best.cost ? ExternalStatus::kOptimal
                                : ExternalStatus::kInfeasible;
        return best;
      case ExternalStatus::kTimeout:
      case ExternalStatus::kError:
        best.status = step.status;
        return best;
    }
  }
}

}  // namespace vmdeploy
