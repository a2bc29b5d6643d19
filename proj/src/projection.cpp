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

#include <algorithm>
#include <cmath>

#include "psl/error.hpp"
#include "psl/infer.hpp"

namespace psl {

std::vector<double> project_feasible(const HlMrf& mrf, std::span<const double> y, std::size_t max_iterations,
                                     double tol) {
  validate_assignment(mrf, y);
  const std::size_t n = y.size();
  std::vector<const LinearConstraint*> sets;
  for (const auto& c : mrf.constraints()) {
    if (!c.fn.is_constant()) sets.push_back(&c);
  }
  std::vector<double> x(y.begin(), y.end());
  if (sets.empty()) return x;

  // Dykstra increments: one dense vector for the box, sparse ones per constraint.
  std::vector<double> box_inc(n, 0.0);
  std::vector<std::vector<double>> inc(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) inc[k].assign(sets[k]->fn.terms().size(), 0.0);

  for (std::size_t it = 0; it < max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const LinearFunction& fn = sets[k]->fn;
      const auto terms = fn.terms();
      double v = fn.constant();
      for (std::size_t t = 0; t < terms.size(); ++t) v += terms[t].coeff * (x[terms[t].var] + inc[k][t]);
      const bool project = sets[k]->kind == ConstraintKind::kEquality || v > 0.0;
      const double step = project ? v / fn.squared_norm() : 0.0;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const double u = x[terms[t].var] + inc[k][t];
        const double next = u - step * terms[t].coeff;
        inc[k][t] = u - next;
        change = std::max(change, std::abs(next - x[terms[t].var]));
        x[terms[t].var] = next;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = x[i] + box_inc[i];
      const double next = std::clamp(u, 0.0, 1.0);
      box_inc[i] = u - next;
      change = std::max(change, std::abs(next - x[i]));
      x[i] = next;
    }
    if (change <= tol) break;
  }
  return x;
}

}  // namespace psl
