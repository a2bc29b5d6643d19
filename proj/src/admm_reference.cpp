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

#include "admm_internal.hpp"

namespace psl {

SolveResult solve_map_reference(const HlMrf& mrf, std::span<const LinearFunction> linear_terms,
                                const SolveOptions& options) {
  options.validate();
  const detail::AdmmProblem prob = detail::build_problem(mrf, linear_terms, options.rho);
  SolveResult res;
  std::vector<double> y0 = detail::initial_point(mrf, options);
  if (!prob.infeasible.empty()) {
    res.y = std::move(y0);
    res.status = SolveStatus::kInfeasible;
    res.message = prob.infeasible;
    res.objective = detail::total_objective(mrf, linear_terms, res.y);
    return res;
  }

  AdmmState s;
  s.rho = options.rho;
  s.reset(prob.offset, prob.var, std::move(y0));
  detail::StallDetector stall(options.stall_window, detail::stall_floor(prob));
  std::vector<double> z(prob.var.size());
  const double rho = options.rho;
  res.status = prob.blocks.empty() ? SolveStatus::kConverged : SolveStatus::kIterationLimit;

  for (std::size_t it = 1; it <= options.max_iterations && !prob.blocks.empty(); ++it) {
    for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
      for (std::size_t c = prob.offset[b]; c < prob.offset[b + 1]; ++c) {
        s.alpha[c] += rho * (s.copies[c] - s.y[s.var[c]]);
        z[c] = s.y[s.var[c]] - s.alpha[c] / rho;
      }
      detail::solve_block(prob, b, z.data() + prob.offset[b], s.copies.data() + prob.offset[b], rho);
    }
    consensus_update(s);
    const Residuals r = check_convergence(s, options.eps_abs, options.eps_rel);
    res.iterations = it;
    res.primal_residual = r.primal;
    res.dual_residual = r.dual;
    if (options.trace) options.trace({it, r.primal, r.dual, detail::total_objective(mrf, linear_terms, s.y)});
    if (r.converged) {
      res.status = SolveStatus::kConverged;
      break;
    }
    if (stall.update(r.primal)) {
      res.status = SolveStatus::kInfeasible;
      res.message = "primal residual stalled; the constraints may have no feasible point";
      break;
    }
  }
  res.y = std::move(s.y);
  res.objective = detail::total_objective(mrf, linear_terms, res.y);
  return res;
}

}  // namespace psl
