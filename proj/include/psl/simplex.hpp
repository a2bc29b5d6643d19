// Copyright 2026 The softlogic Authors
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

#pragma once

#include <span>
#include <vector>

namespace psl {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase tableau simplex with Bland's rule for
//   maximize c'x  subject to  Ax = b, x >= 0.
// Rows of `a` must all have c.size() entries. Intended for small problems.
LpResult maximize_standard_form(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                std::span<const double> c);

}  // namespace psl
