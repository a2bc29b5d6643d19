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
#include <cstdio>
#include <map>
#include <tuple>

#include "admm_internal.hpp"
#include "psl/error.hpp"

namespace psl {

namespace detail {

Factor cholesky(std::span<const double> a, double weight, double rho) {
  Factor f;
  f.k = a.size();
  const std::size_t k = f.k;
  f.l.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 2.0 * weight * a[i] * a[j] + (i == j ? rho : 0.0);
      for (std::size_t m = 0; m < j; ++m) s -= f.l[i * k + m] * f.l[j * k + m];
      f.l[i * k + j] = i == j ? std::sqrt(s) : s / f.l[j * k + j];
    }
  }
  return f;
}

void cholesky_solve(const Factor& f, double* x) {
  const std::size_t k = f.k;
  for (std::size_t i = 0; i < k; ++i) {
    double s = x[i];
    for (std::size_t m = 0; m < i; ++m) s -= f.l[i * k + m] * x[m];
    x[i] = s / f.l[i * k + i];
  }
  for (std::size_t i = k; i-- > 0;) {
    double s = x[i];
    for (std::size_t m = i + 1; m < k; ++m) s -= f.l[m * k + i] * x[m];
    x[i] = s / f.l[i * k + i];
  }
}

AdmmProblem build_problem(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, double rho) {
  AdmmProblem p;
  p.num_vars = mrf.num_free();
  p.offset.push_back(0);
  std::map<std::tuple<std::size_t, double, std::vector<double>>, std::size_t> cache;

  auto push = [&](Block blk, const LinearFunction& fn) {
    blk.constant = fn.constant();
    blk.norm2 = fn.squared_norm();
    for (const auto& t : fn.terms()) {
      p.var.push_back(t.var);
      p.coeff.push_back(t.coeff);
    }
    p.blocks.push_back(blk);
    p.offset.push_back(p.var.size());
  };

  for (const auto& pot : mrf.potentials()) {
    const double w = mrf.weight_of(pot);
    if (w == 0.0 || pot.fn.is_constant()) continue;
    Block blk;
    blk.kind = Block::kPotential;
    blk.exponent = pot.exponent;
    blk.weight = w;
    if (pot.exponent == 2) {
      std::vector<double> a;
      for (const auto& t : pot.fn.terms()) a.push_back(t.coeff);
      auto [it, fresh] = cache.try_emplace({pot.template_id, w, a}, p.factors.size());
      if (fresh) p.factors.push_back(cholesky(a, w, rho));
      blk.factor = static_cast<std::int64_t>(it->second);
    }
    push(blk, pot.fn);
  }
  for (const auto& con : mrf.constraints()) {
    const bool eq = con.kind == ConstraintKind::kEquality;
    if (con.fn.is_constant()) {
      const double c = con.fn.constant();
      const bool ok = eq ? std::abs(c) <= 1e-9 : c <= 1e-9;
      if (!ok && p.infeasible.empty()) p.infeasible = "constant constraint violated: " + con.origin;
      continue;
    }
    Block blk;
    blk.kind = Block::kConstraint;
    blk.equality = eq;
    push(blk, con.fn);
  }
  for (const auto& fn : linear_terms) {
    if (fn.is_constant()) continue;
    for (const auto& t : fn.terms()) {
      if (t.var >= p.num_vars) throw DimensionError("linear term references variable " + std::to_string(t.var));
    }
    Block blk;
    blk.kind = Block::kLinear;
    push(blk, fn);
  }

  p.var_offset.assign(p.num_vars + 1, 0);
  for (auto v : p.var) ++p.var_offset[v + 1];
  for (std::size_t i = 0; i < p.num_vars; ++i) p.var_offset[i + 1] += p.var_offset[i];
  p.var_copies.resize(p.var.size());
  std::vector<std::size_t> fill(p.var_offset.begin(), p.var_offset.end() - 1);
  for (std::size_t c = 0; c < p.var.size(); ++c) p.var_copies[fill[p.var[c]]++] = c;
  return p;
}

std::vector<double> initial_point(const HlMrf& mrf, const SolveOptions& options) {
  if (options.initial) {
    validate_assignment(mrf, *options.initial);
    return *options.initial;
  }
  return std::vector<double>(mrf.num_free(), options.init_value);
}

double total_objective(const HlMrf& mrf, std::span<const LinearFunction> linear_terms, std::span<const double> y) {
  double v = energy(mrf, y);
  for (const auto& fn : linear_terms) v += fn(y);
  return v;
}

}  // namespace detail

void SolveOptions::validate() const {
  if (!(rho > 0.0)) throw Error("rho must be positive");
  if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw Error("tolerances must be positive");
  if (!(activation_threshold >= 0.0)) throw Error("activation threshold must be nonnegative");
  if (!(init_value >= 0.0 && init_value <= 1.0)) throw Error("initial value must lie in [0,1]");
  if (workers < 0) throw Error("worker count must be nonnegative");
}

std::string to_string(const IterationRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "iter=%zu primal=%.6e dual=%.6e objective=%.9g", r.iteration, r.primal_residual,
                r.dual_residual, r.objective);
  return buf;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kIterationLimit:
      return "iteration-limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return {};
}

std::vector<double> solve_potential_subproblem(const LinearFunction& fn, int exponent, double weight,
                                               std::span<const double> z, double rho) {
  if (exponent != 1 && exponent != 2) throw ModelError("exponent must be 1 or 2");
  if (weight < 0.0 || !(rho > 0.0)) throw Error("weight must be nonnegative and rho positive");
  HlMrf mrf;
  VariableTable vars;
  for (std::size_t i = 0; i < z.size(); ++i) vars.add_free({"z", {std::to_string(i)}});
  mrf = HlMrf(std::move(vars));
  const std::size_t t = mrf.add_template("subproblem", weight);
  mrf.add_potential({fn, exponent, t, ""});
  const detail::AdmmProblem p = detail::build_problem(mrf, {}, rho);
  std::vector<double> out(z.begin(), z.end());
  if (p.blocks.empty()) return out;
  std::vector<double> local(p.var.size()), sol(p.var.size());
  for (std::size_t c = 0; c < p.var.size(); ++c) local[c] = z[p.var[c]];
  detail::solve_block(p, 0, local.data(), sol.data(), rho);
  for (std::size_t c = 0; c < p.var.size(); ++c) out[p.var[c]] = sol[c];
  return out;
}

std::vector<double> solve_constraint_subproblem(const LinearFunction& fn, ConstraintKind kind,
                                                std::span<const double> z) {
  const double norm2 = fn.squared_norm();
  if (norm2 == 0.0) throw ModelError("constraint has a zero normal vector");
  std::vector<double> out(z.begin(), z.end());
  const double v = fn(z);
  if (kind == ConstraintKind::kAtMostZero && v <= 0.0) return out;
  for (const auto& t : fn.terms()) out[t.var] -= v / norm2 * t.coeff;
  return out;
}

void AdmmState::reset(std::vector<std::size_t> block_offset, std::vector<std::size_t> copy_var,
                      std::vector<double> initial) {
  offset = std::move(block_offset);
  var = std::move(copy_var);
  y = std::move(initial);
  y_prev = y;
  copies.resize(var.size());
  for (std::size_t c = 0; c < var.size(); ++c) copies[c] = y[var[c]];
  alpha.assign(var.size(), 0.0);
  counts.assign(y.size(), 0);
  for (auto v : var) ++counts[v];
}

void consensus_update(AdmmState& s) {
  s.y_prev = s.y;
  std::vector<double> sum(s.y.size(), 0.0);
  for (std::size_t c = 0; c < s.var.size(); ++c) sum[s.var[c]] += s.copies[c] + s.alpha[c] / s.rho;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.counts[i] == 0) continue;
    s.y[i] = std::clamp(sum[i] / static_cast<double>(s.counts[i]), 0.0, 1.0);
  }
}

Residuals check_convergence(const AdmmState& s, double eps_abs, double eps_rel) {
  double r2 = 0.0, copy2 = 0.0, alpha2 = 0.0;
  for (std::size_t c = 0; c < s.var.size(); ++c) {
    const double d = s.copies[c] - s.y[s.var[c]];
    r2 += d * d;
    copy2 += s.copies[c] * s.copies[c];
    alpha2 += s.alpha[c] * s.alpha[c];
  }
  double s2 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double k = static_cast<double>(s.counts[i]);
    const double d = s.y[i] - s.y_prev[i];
    s2 += k * d * d;
    y2 += k * s.y[i] * s.y[i];
  }
  Residuals r;
  r.primal = std::sqrt(r2);
  r.dual = s.rho * std::sqrt(s2);
  const double base = eps_abs * std::sqrt(static_cast<double>(s.var.size()));
  r.primal_threshold = base + eps_rel * std::max(std::sqrt(copy2), std::sqrt(y2));
  r.dual_threshold = base + eps_rel * std::sqrt(alpha2);
  r.converged = r.primal <= r.primal_threshold && r.dual <= r.dual_threshold;
  return r;
}

}  // namespace psl
