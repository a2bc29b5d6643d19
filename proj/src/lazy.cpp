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

#include <cmath>

#include "psl/infer.hpp"

namespace psl {

LazyResult solve_map_lazy(const HlMrf& mrf, const SolveOptions& options) {
  options.validate();
  const double threshold = options.activation_threshold;
  const auto potentials = mrf.potentials();
  const auto constraints = mrf.constraints();

  std::vector<double> y = options.initial ? *options.initial : std::vector<double>(mrf.num_free(), 0.0);
  validate_assignment(mrf, y);

  std::vector<bool> pot_active(potentials.size(), false), con_active(constraints.size(), false);
  LazyResult out;

  auto activate = [&]() {
    std::size_t added = 0;
    for (std::size_t j = 0; j < potentials.size(); ++j) {
      if (!pot_active[j] && potentials[j].fn(y) > threshold) {
        pot_active[j] = true;
        ++out.activated_potentials;
        ++added;
      }
    }
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      const double v = constraints[k].fn(y);
      const bool violated = constraints[k].kind == ConstraintKind::kEquality ? std::abs(v) > threshold : v > threshold;
      if (!con_active[k] && violated) {
        con_active[k] = true;
        ++out.activated_constraints;
        ++added;
      }
    }
    return added;
  };

  activate();
  for (;;) {
    HlMrf active(mrf.variables());
    for (const auto& t : mrf.templates()) active.add_template(t.source, t.weight);
    for (std::size_t j = 0; j < potentials.size(); ++j) {
      if (pot_active[j]) active.add_potential(potentials[j]);
    }
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      if (con_active[k]) active.add_constraint(constraints[k]);
    }

    SolveOptions round = options;
    round.lazy = false;
    round.initial = y;
    out.result = solve_map(active, round);
    out.total_iterations += out.result.iterations;
    ++out.rounds;
    y = out.result.y;
    if (out.result.status == SolveStatus::kInfeasible) break;
    if (activate() == 0) break;
  }
  out.result.objective = energy(mrf, out.result.y);
  out.result.iterations = out.total_iterations;
  return out;
}

}  // namespace psl
