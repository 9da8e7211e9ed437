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

// Static symmetry breaking over the interchangeable VM columns.
//
// Atoms:
//   PR  columns ordered by non-increasing price:  p_k >= p_{k+1}
//   L   columns ordered by non-increasing load:   sum_i a_i_k >= sum_i a_i_k+1
//   LX  columns in non-increasing lexicographic order (row 1 most
//       significant):  (a_l_k = a_l_k+1 for all l < i) => a_i_k >= a_i_k+1
//   FV  the instances of the heaviest conflict clique are pinned to the first
//       W columns; the other atoms then order only columns W+1..M.
//
// In a composition each atom only orders the columns its predecessors left
// tied. Ties are tracked with binary indicators z_s_k (s = slot in the chain,
// k = left column of the pair) so every guard is a conjunction of
// "variable = value" literals:
//   z_s_k = 1  =>  key_k - key_k+1 = 0
//   z_s_k = 0  =>  key_k - key_k+1 >= 1     (under the previous tie)
//   z_s_k <= z_s-1_k

#ifndef VMDEPLOY_SYMMETRY_H_
#define VMDEPLOY_SYMMETRY_H_

#include <string>
#include <string_view>
#include <vector>

#include "vmdeploy/cop.h"
#include "vmdeploy/model.h"

namespace vmdeploy {

enum class BreakerAtom { kFV, kPR, kL, kLX };
std::string_view AtomName(BreakerAtom atom);

struct BreakerSpec {
  std::vector<BreakerAtom> atoms;

  bool Contains(BreakerAtom atom) const;
  bool operator==(const BreakerSpec&) const = default;
};

// Throws InputError unless atoms are distinct, FV (if any) comes first and
// LX (if any) comes last. The empty spec is valid.
void ValidateSpec(const BreakerSpec& spec);

struct Strategy {
  std::string name;
  BreakerSpec spec;
};

// NONE, PR, LX, L, FV and the fifteen compositions, in that order.
const std::vector<Strategy>& EnumerateStrategies();

// Looks a name up in the registry (case-sensitive). Throws InputError.
BreakerSpec StrategyByName(std::string_view name);

struct Clique {
  std::vector<ComponentId> members;  // ascending
  int weight = 0;
};

// Exact maximum-weight clique of the conflict graph, where a component weighs
// the instances it must deploy (0 for exclusive-set members). Among cliques
// of equal weight the lexicographically smallest id list wins; on an edgeless
// graph this is the single heaviest vertex.
Clique MaxDeploymentClique(const ApplicationModel& app);

// Pins the clique: member i (ascending ids) receives the next w(i) columns,
// where its entry is 1 and every other member's entry is 0.
// Throws InfeasibleError when the clique weight exceeds num_columns.
FixedAssignment FvFixing(const ApplicationModel& app, const Clique& clique,
                         int num_columns);

struct BreakerConstraints {
  std::vector<Variable> variables;  // new tie indicators, ids follow the model's
  std::vector<LinearConstraint> constraints;
  std::vector<GuardedConstraint> guarded;
  FixedAssignment fixed;
};

// Generates the constraints of `spec` for a freshly encoded model.
BreakerConstraints GenerateBreakerConstraints(const BreakerSpec& spec,
                                              const ApplicationModel& app,
                                              const CopModel& m);

// m plus the breaker constraints; fixed entries are appended to m.fixed.
CopModel ApplyBreakers(CopModel m, const BreakerConstraints& breakers);

// Convenience: GenerateBreakerConstraints followed by ApplyBreakers.
CopModel ApplyStrategy(const ApplicationModel& app, CopModel m,
                       const BreakerSpec& spec);

}  // namespace vmdeploy

#endif  // VMDEPLOY_SYMMETRY_H_
