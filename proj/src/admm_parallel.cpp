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

#include <omp.h>

#include "admm_internal.hpp"

namespace psl {

namespace {

using detail::AdmmProblem;

}  // namespace

SolveResult solve_map(const HlMrf& mrf, const SolveOptions& options) { return solve_map(mrf, {}, options); }

SolveResult solve_map(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, const SolveOptions& options) {
  options.validate();
  const AdmmProblem prob = detail::build_problem(mrf, linear_terms, options.rho);
  SolveResult res;
  std::vector<double> y = detail::initial_point(mrf, options);
  if (!prob.infeasible.empty()) {
    res.y = std::move(y);
    res.status = SolveStatus::kInfeasible;
    res.message = prob.infeasible;
    res.objective = detail::total_objective(mrf, linear_terms, res.y);
    return res;
  }

  const std::size_t nb = prob.blocks.size();
  const std::size_t nc = prob.var.size();
  const std::size_t n = prob.num_vars;
  const double rho = options.rho;
  const int threads = options.workers > 0 ? options.workers : omp_get_max_threads();

  std::vector<double> copies(nc), alpha(nc, 0.0), z(nc), y_prev(n);
  for (std::size_t c = 0; c < nc; ++c) copies[c] = y[prob.var[c]];
  const double sqrt_copies = std::sqrt(static_cast<double>(nc));

  detail::StallDetector stall(options.stall_window, detail::stall_floor(prob));
  res.status = nb == 0 ? SolveStatus::kConverged : SolveStatus::kIterationLimit;

  for (std::size_t it = 1; it <= options.max_iterations && nb > 0; ++it) {
    double r2 = 0.0, copy2 = 0.0, alpha2 = 0.0, s2 = 0.0, y2 = 0.0;
#pragma omp parallel num_threads(threads)
    {
#pragma omp for schedule(static)
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t c = prob.offset[b]; c < prob.offset[b + 1]; ++c) {
          const double yc = y[prob.var[c]];
          alpha[c] += rho * (copies[c] - yc);
          z[c] = yc - alpha[c] / rho;
        }
        detail::solve_block(prob, b, z.data() + prob.offset[b], copies.data() + prob.offset[b], rho);
      }

      // Gathering per variable keeps the summation order of the serial version.
#pragma omp for schedule(static) reduction(+ : s2, y2)
      for (std::size_t i = 0; i < n; ++i) {
        y_prev[i] = y[i];
        const std::size_t begin = prob.var_offset[i], end = prob.var_offset[i + 1];
        if (begin == end) continue;
        double sum = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
          const std::size_t c = prob.var_copies[k];
          sum += copies[c] + alpha[c] / rho;
        }
        const double count = static_cast<double>(end - begin);
        y[i] = std::clamp(sum / count, 0.0, 1.0);
        const double d = y[i] - y_prev[i];
        s2 += count * d * d;
        y2 += count * y[i] * y[i];
      }

#pragma omp for schedule(static) reduction(+ : r2, copy2, alpha2)
      for (std::size_t c = 0; c < nc; ++c) {
        const double d = copies[c] - y[prob.var[c]];
        r2 += d * d;
        copy2 += copies[c] * copies[c];
        alpha2 += alpha[c] * alpha[c];
      }
    }

    const double primal = std::sqrt(r2);
    const double dual = rho * std::sqrt(s2);
    const double base = options.eps_abs * sqrt_copies;
    const bool converged = primal <= base + options.eps_rel * std::max(std::sqrt(copy2), std::sqrt(y2)) &&
                           dual <= base + options.eps_rel * std::sqrt(alpha2);
    res.iterations = it;
    res.primal_residual = primal;
    res.dual_residual = dual;
    if (options.trace) options.trace({it, primal, dual, detail::total_objective(mrf, linear_terms, y)});
    if (converged) {
      res.status = SolveStatus::kConverged;
      break;
    }
    if (stall.update(primal)) {
      res.status = SolveStatus::kInfeasible;
      res.message = "primal residual stalled; the constraints may have no feasible point";
      break;
    }
  }
  res.y = std::move(y);
  res.objective = detail::total_objective(mrf, linear_terms, res.y);
  return res;
}

}  // namespace psl
