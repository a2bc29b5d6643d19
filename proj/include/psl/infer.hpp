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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psl/model.hpp"

namespace psl {

struct IterationRecord {
  std::size_t iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
};

// Line-oriented form used by the CLI trace output.
std::string to_string(const IterationRecord& record);

struct SolveOptions {
  double rho = 1.0;
  double eps_abs = 1e-5;
  double eps_rel = 1e-3;
  std::size_t max_iterations = 25000;
  int workers = 0;  // 0 uses the OpenMP default

  bool lazy = false;
  // Potentials and constraints are activated once they are violated by more
  // than this. Anything above 0 can change the optimum.
  double activation_threshold = 0.0;

  // Initial consensus value for every variable, unless `initial` is given.
  double init_value = 0.5;
  std::optional<std::vector<double>> initial;

  // Iterations per window for the stalled-residual infeasibility check.
  std::size_t stall_window = 1000;

  std::function<void(const IterationRecord&)> trace;

  void validate() const;  // throws Error on bad values
};

enum class SolveStatus { kConverged, kIterationLimit, kInfeasible };

std::string to_string(SolveStatus status);

struct SolveResult {
  std::vector<double> y;
  SolveStatus status = SolveStatus::kConverged;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;  // energy plus any auxiliary linear terms
  std::string message;     // set for infeasibility

  bool converged() const { return status == SolveStatus::kConverged; }
};

// Consensus ADMM, block updates run with OpenMP. `linear_terms` are extra
// objective terms added to the energy as raw linear functions.
SolveResult solve_map(const HlMrf& mrf, const SolveOptions& options = {});
SolveResult solve_map(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, const SolveOptions& options);

// Single-threaded implementation of the same iteration, kept as a reference
// for testing the parallel kernel.
SolveResult solve_map_reference(const HlMrf& mrf, std::span<const LinearFunction> linear_terms,
                                const SolveOptions& options);

// Starts from y = 0 with only the violated potentials and constraints, and
// grows the active set until the restricted optimum violates nothing else.
struct LazyResult {
  SolveResult result;
  std::size_t rounds = 0;
  std::size_t activated_potentials = 0;
  std::size_t activated_constraints = 0;
  std::size_t total_iterations = 0;
};

LazyResult solve_map_lazy(const HlMrf& mrf, const SolveOptions& options = {});

// Subproblems. Function variables index into `z`.

// argmin_x w * max{l(x), 0}^p + rho/2 * |x - z|^2
std::vector<double> solve_potential_subproblem(const LinearFunction& fn, int exponent, double weight,
                                               std::span<const double> z, double rho);

// Projection of z onto {l = 0} or {l <= 0}. Throws ModelError for a zero normal.
std::vector<double> solve_constraint_subproblem(const LinearFunction& fn, ConstraintKind kind,
                                                std::span<const double> z);

// Local copies and multipliers for every block. Copies of block b occupy
// [offset[b], offset[b+1]) and copy c belongs to variable var[c].
struct AdmmState {
  std::vector<std::size_t> offset;
  std::vector<std::size_t> var;
  std::vector<double> copies;
  std::vector<double> alpha;
  std::vector<double> y;
  std::vector<double> y_prev;
  std::vector<std::size_t> counts;  // K(i), copies per variable
  double rho = 1.0;

  // Sizes the state for the given blocks with copies = y and alpha = 0.
  void reset(std::vector<std::size_t> block_offset, std::vector<std::size_t> copy_var, std::vector<double> initial);
};

// y_i = clip(mean over copies of (copy + alpha / rho)); variables without
// copies keep their value. Moves the old y into y_prev.
void consensus_update(AdmmState& state);

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double primal_threshold = 0.0;
  double dual_threshold = 0.0;
  bool converged = false;
};

Residuals check_convergence(const AdmmState& state, double eps_abs, double eps_rel);

// Closest point of the feasible region (box and hard constraints) by
// Dykstra's alternating projections.
std::vector<double> project_feasible(const HlMrf& mrf, std::span<const double> y, std::size_t max_iterations = 100000,
                                     double tol = 1e-12);

}  // namespace psl
