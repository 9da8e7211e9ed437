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

#ifndef VMDEPLOY_ENCODER_H_
#define VMDEPLOY_ENCODER_H_

#include "vmdeploy/cop.h"
#include "vmdeploy/model.h"

namespace vmdeploy {

// Upper bound M on the number of VM columns some optimal deployment needs.
//
// Each component contributes its upper bound: the explicit one when present,
// otherwise the smallest count forced on it by its lower bounds,
// co-locations and the require-provide chains that end in it. Full-deployment
// components ride on columns leased for others, so they only matter when
// their own lower bound exceeds the total. Clamped to >= 1.
//
// Throws UnboundedModelError when the require-provide propagation diverges.
int SurrogateVmCount(const ApplicationModel& app);

// Lowers (app, catalog, M) to the IR. Constraint groups are emitted in this
// order: allocation, occupancy, link, capacity, conflict, co-location,
// exclusive deployment, require-provide, full deployment; `fixed` entries go
// to CopModel::fixed.
//
// Throws InputError for invalid inputs and InfeasibleError when the heaviest
// conflict clique needs more than M columns.
CopModel Encode(const ApplicationModel& app, const OfferCatalog& catalog,
                int num_columns, const FixedAssignment* fixed = nullptr);

// Replaces the offer-selection guards with indicator variables y_k_o so the
// model is a plain MILP:
//   sum_o y_k_o = v_k,  t_k = sum_o o*y_k_o,  p_k = sum_o price(o)*y_k_o,
//   sum_i req_r(i)*a_i_k <= sum_o cap_r(o)*y_k_o.
// Any other guarded constraint is turned into a big-M row over its (binary)
// guard literals. The result has no guarded constraints and the same optimal
// cost.
CopModel LinearizeForLp(const CopModel& m);

// Sum of the p_k. Throws InputError when the valuation is not total.
int64_t ObjectiveValue(const CopModel& m, const Valuation& x);

}  // namespace vmdeploy

#endif  // VMDEPLOY_ENCODER_H_
