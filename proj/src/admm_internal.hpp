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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "psl/infer.hpp"

namespace psl::detail {

// Lower Cholesky factor of rho*I + 2w*a*a^T, row-major.
struct Factor {
  std::size_t k = 0;
  std::vector<double> l;
};

Factor cholesky(std::span<const double> a, double weight, double rho);
// Solves L L^T x = b in place.
void cholesky_solve(const Factor& f, double* x);

struct Block {
  enum Kind : std::uint8_t { kPotential, kConstraint, kLinear };
  Kind kind = kPotential;
  bool equality = false;
  int exponent = 1;
  double weight = 0.0;
  double constant = 0.0;
  double norm2 = 0.0;  // squared norm of the coefficients
  std::int64_t factor = -1;
};

struct AdmmProblem {
  std::size_t num_vars = 0;
  std::vector<Block> blocks;
  std::vector<std::size_t> offset;  // per block, size blocks + 1
  std::vector<std::size_t> var;     // per copy
  std::vector<double> coeff;        // per copy
  std::vector<Factor> factors;
  // Copies grouped by variable, in copy order.
  std::vector<std::size_t> var_offset;
  std::vector<std::size_t> var_copies;
  std::size_t total_copies() const { return var.size(); }

  std::string infeasible;  // set when a constant constraint is violated
};

AdmmProblem build_problem(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, double rho);

std::vector<double> initial_point(const HlMrf& mrf, const SolveOptions& options);

double total_objective(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, std::span<const double> y);

// Exact minimizer of one block's local problem for target z.
inline void solve_block(const AdmmProblem& p, std::size_t b, const double* z, double* out, double rho) {
  const Block& blk = p.blocks[b];
  const std::size_t begin = p.offset[b];
  const std::size_t k = p.offset[b + 1] - begin;
  const double* a = p.coeff.data() + begin;

  auto value = [&](const double* x) {
    double v = blk.constant;
    for (std::size_t i = 0; i < k; ++i) v += a[i] * x[i];
    return v;
  };
  auto project = [&](double lz) {
    const double step = lz / blk.norm2;
    for (std::size_t i = 0; i < k; ++i) out[i] = z[i] - step * a[i];
  };

  if (blk.kind == Block::kLinear) {
    for (std::size_t i = 0; i < k; ++i) out[i] = z[i] - a[i] / rho;
    return;
  }
  const double lz = value(z);
  if (blk.kind == Block::kConstraint) {
    if (!blk.equality && lz <= 0.0) {
      for (std::size_t i = 0; i < k; ++i) out[i] = z[i];
    } else {
      project(lz);
    }
    return;
  }
  if (lz <= 0.0) {
    for (std::size_t i = 0; i < k; ++i) out[i] = z[i];
    return;
  }
  if (blk.exponent == 1) {
    const double step = blk.weight / rho;
    for (std::size_t i = 0; i < k; ++i) out[i] = z[i] - step * a[i];
  } else {
    const double scale = 2.0 * blk.weight * blk.constant;
    for (std::size_t i = 0; i < k; ++i) out[i] = rho * z[i] - scale * a[i];
    cholesky_solve(p.factors[blk.factor], out);
  }
  if (value(out) < 0.0) project(lz);
}

// Infeasibility heuristic: the primal residual stops improving across
// consecutive windows while still above `floor`.
class StallDetector {
 public:
  StallDetector(std::size_t window, double floor) : window_(window), floor_(floor) {}

  bool update(double primal) {
    if (window_ == 0) return false;
    current_min_ = std::min(current_min_, primal);
    if (++count_ < window_) return false;
    const bool stalled = current_min_ > floor_ && current_min_ >= 0.999 * previous_min_;
    previous_min_ = current_min_;
    current_min_ = std::numeric_limits<double>::infinity();
    count_ = 0;
    return stalled;
  }

 private:
  std::size_t window_;
  double floor_;
  std::size_t count_ = 0;
  double current_min_ = std::numeric_limits<double>::infinity();
  double previous_min_ = std::numeric_limits<double>::infinity();
};

// Residual floor below which a stall is treated as slow convergence.
inline double stall_floor(const AdmmProblem& p) {
  return 1e-3 * std::sqrt(static_cast<double>(p.total_copies()));
}

}  // namespace psl::detail
