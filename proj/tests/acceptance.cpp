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

// Property suite run as one binary. Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psl/ground.hpp"
#include "psl/infer.hpp"
#include "psl/learn.hpp"
#include "psl/logic.hpp"
#include "psl/simplex.hpp"
#include "psl/synth.hpp"
#include "random_models.hpp"

namespace psl {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SolveOptions tight() {
  SolveOptions o;
  o.eps_abs = 1e-8;
  o.eps_rel = 1e-8;
  o.max_iterations = 200000;
  return o;
}

HlMrf model_with_vars(std::size_t n) {
  VariableTable vars;
  for (std::size_t i = 0; i < n; ++i) vars.add_free({"Y", {std::to_string(i)}});
  return HlMrf(std::move(vars));
}

std::string read_file(const std::string& rel) {
  std::ifstream in(std::string(PSL_SOURCE_DIR) + "/" + rel);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1 ------------------------------------------------------------------------

Outcome analytic_optima() {
  Outcome out;
  auto check = [&](const char* name, const HlMrf& mrf, std::vector<double> want) {
    const auto t0 = Clock::now();
    const SolveResult r = solve_map(mrf, tight());
    const double secs = seconds_since(t0);
    double err = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) err = std::max(err, std::abs(r.y[i] - want[i]));
    const bool ok = r.converged() && err <= 1e-4 && secs < 1.0;
    out.pass = out.pass && ok;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + name + " err " + fmt("%.1e", err) + " in " +
                  fmt("%.3f s", secs);
  };
  for (int p : {1, 2}) {
    // 3 * max{y, 0}^p + max{1 - y, 0}^p
    HlMrf mrf = model_with_vars(1);
    const auto a = mrf.add_template("a", 3.0);
    const auto b = mrf.add_template("b", 1.0);
    mrf.add_potential({LinearFunction({{0, 1.0}}, 0.0), p, a, ""});
    mrf.add_potential({LinearFunction({{0, -1.0}}, 1.0), p, b, ""});
    check(p == 1 ? "linear" : "squared", mrf, {p == 1 ? 0.0 : 0.25});
  }
  // max{0.9 - y1, 0}^2 + max{0.6 - y2, 0}^2 with y1 + y2 <= 1
  HlMrf mrf = model_with_vars(2);
  const auto t = mrf.add_template("evidence", 1.0);
  mrf.add_potential({LinearFunction({{0, -1.0}}, 0.9), 2, t, ""});
  mrf.add_potential({LinearFunction({{1, -1.0}}, 0.6), 2, t, ""});
  mrf.add_constraint({LinearFunction({{0, 1.0}, {1, 1.0}}, -1.0), ConstraintKind::kAtMostZero, ""});
  check("constrained", mrf, {0.65, 0.35});
  return out;
}

// Random weighted clauses --------------------------------------------------

std::vector<Clause> random_clauses(std::size_t n, std::size_t m, std::size_t max_len, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Clause> clauses;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::size_t> vars(n);
    for (std::size_t i = 0; i < n; ++i) vars[i] = i;
    std::shuffle(vars.begin(), vars.end(), rng);
    const std::size_t len = 1 + rng() % std::min(n, max_len);
    Clause c;
    c.weight = 1.0 - u(rng);  // (0, 1]
    for (std::size_t k = 0; k < len; ++k) (u(rng) < 0.5 ? c.positive : c.negative).push_back(vars[k]);
    clauses.push_back(c);
  }
  return clauses;
}

HlMrf clause_model(const std::vector<Clause>& clauses, std::size_t n) {
  HlMrf mrf = model_with_vars(n);
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    const auto t = mrf.add_template("clause" + std::to_string(j), clauses[j].weight);
    mrf.add_potential({clause_to_linfun(clauses[j]), 1, t, ""});
  }
  return mrf;
}

// max sum w_j z_j  s.t.  z_j <= sum_{I+} y + sum_{I-} (1 - y), z_j <= 1, y <= 1,
// in standard form with one slack per inequality.
double maxsat_lp_simplex(const std::vector<Clause>& clauses, std::size_t n) {
  const std::size_t m = clauses.size();
  const std::size_t cols = n + m + m + m + n;
  std::vector<std::vector<double>> a;
  std::vector<double> b, c(cols, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(cols, 0.0);
    row[n + j] = 1.0;
    for (auto i : clauses[j].positive) row[i] -= 1.0;
    for (auto i : clauses[j].negative) row[i] += 1.0;
    row[n + m + j] = 1.0;
    a.push_back(row);
    b.push_back(static_cast<double>(clauses[j].negative.size()));
    c[n + j] = clauses[j].weight;
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(cols, 0.0);
    row[n + j] = 1.0;
    row[n + 2 * m + j] = 1.0;
    a.push_back(row);
    b.push_back(1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(cols, 0.0);
    row[i] = 1.0;
    row[n + 3 * m + i] = 1.0;
    a.push_back(row);
    b.push_back(1.0);
  }
  return maximize_standard_form(a, b, c).objective;
}

// 2 ------------------------------------------------------------------------

Outcome theorem_one() {
  std::mt19937 rng(2024);
  double worst = 0.0, worst_simplex = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t m = 1 + rng() % 6;
    const auto clauses = random_clauses(n, m, kMaxLcrClauseLength, rng);
    const HlMrf mrf = clause_model(clauses, n);
    const SolveResult r = solve_map(mrf, tight());
    double total_w = 0.0, lcr = 0.0;
    for (const auto& c : clauses) {
      total_w += c.weight;
      lcr += lcr_inner_lp(c, r.y);
    }
    const double lp = total_w - energy(mrf, r.y);
    worst = std::max(worst, std::abs(lcr - lp) / std::abs(lp));
    const double exact = maxsat_lp_simplex(clauses, n);
    worst_simplex = std::max(worst_simplex, std::abs(lcr - exact) / std::abs(exact));
  }
  return {worst <= 1e-4 && worst_simplex <= 1e-4,
          "max rel. gap to solve_map LP value " + fmt("%.2e", worst) + ", to simplex LP optimum " +
              fmt("%.2e", worst_simplex)};
}

// 3 ------------------------------------------------------------------------

Outcome rounding_guarantee() {
  std::mt19937 rng(77);
  double min_ratio = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t m = 1 + rng() % 15;
    const auto clauses = random_clauses(n, m, 3, rng);
    const SolveResult r = solve_map(clause_model(clauses, n), tight());
    const auto probs = rounding_probs(r.y);
    const double expected = expected_score(clauses, probs);
    const double best = maxsat_bruteforce(clauses, n).score;
    const auto x = derandomize(clauses, probs);
    pass = pass && expected >= 0.75 * best - 1e-9 && boolean_score(clauses, x) >= expected - 1e-9;
    min_ratio = std::min(min_ratio, expected / best);
  }
  return {pass, "min expected/W* " + fmt("%.4f", min_ratio)};
}

// 4 ------------------------------------------------------------------------

double energy_if_feasible(const HlMrf& mrf, std::span<const double> y) {
  for (double v : y) {
    if (v < 0.0 || v > 1.0) return std::numeric_limits<double>::infinity();
  }
  if (!check_feasible(mrf, y, 1e-9).feasible) return std::numeric_limits<double>::infinity();
  return energy(mrf, y);
}

// Exhaustive grid, then pattern search from the best grid point over the
// directions +-e_i and +-e_i +-e_j with halving steps.
double grid_oracle(const HlMrf& mrf) {
  const std::size_t n = mrf.num_free();
  const int per = std::min(51, static_cast<int>(std::floor(std::pow(2.0e6, 1.0 / static_cast<double>(n)))));
  const double step = 1.0 / (per - 1);
  std::vector<int> idx(n, 0);
  std::vector<double> y(n), best_y;
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) y[i] = idx[i] * step;
    const double e = energy_if_feasible(mrf, y);
    if (e < best) {
      best = e;
      best_y = y;
    }
    std::size_t i = 0;
    while (i < n && ++idx[i] == per) idx[i++] = 0;
    if (i == n) break;
  }
  if (best_y.empty()) return best;

  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    for (double s : {-1.0, 1.0}) {
      std::vector<double> d(n, 0.0);
      d[i] = s;
      dirs.push_back(d);
      for (std::size_t j = i + 1; j < n; ++j) {
        for (double t : {-1.0, 1.0}) {
          std::vector<double> e = d;
          e[j] = t;
          dirs.push_back(e);
        }
      }
    }
  }
  for (double h = step; h > 1e-10; h /= 2) {
    for (bool moved = true; moved;) {
      moved = false;
      for (const auto& d : dirs) {
        for (std::size_t i = 0; i < n; ++i) y[i] = best_y[i] + h * d[i];
        const double e = energy_if_feasible(mrf, y);
        if (e < best - 1e-15) {
          best = e;
          best_y = y;
          moved = true;
        }
      }
    }
  }
  return best;
}

Outcome solver_accuracy() {
  std::mt19937 rng(404);
  double worst = -std::numeric_limits<double>::infinity();
  bool pass = true;
  int no_grid_point = 0;
  for (int trial = 0; trial < 50; ++trial) {
    testing::RandomModelSpec spec;
    spec.num_vars = 2 + trial % 5;
    spec.num_potentials = 3 + rng() % 6;
    spec.num_constraints = 1 + rng() % 3;
    const HlMrf mrf = testing::random_model(spec, rng);
    SolveOptions opts;
    opts.eps_abs = 1e-5;
    opts.eps_rel = 1e-5;
    const SolveResult r = solve_map(mrf, opts);
    const std::vector<double> y = project_feasible(mrf, r.y);
    const double got = energy(mrf, y);
    const double oracle = grid_oracle(mrf);
    if (!std::isfinite(oracle)) {
      ++no_grid_point;
      pass = false;
      continue;
    }
    // The grid value bounds the optimum from above, so only excess counts.
    // Optima at 0 get an absolute allowance of 1e-6 instead.
    if (oracle > 1e-6) worst = std::max(worst, (got - oracle) / oracle);
    if (got - oracle > 0.005 * oracle + 1e-6) {
      pass = false;
      std::fprintf(stderr, "trial %d n=%zu got %.10g oracle %.10g status %s it %zu\n", trial, spec.num_vars, got, oracle,
                   to_string(r.status).c_str(), r.iterations);
    }
  }
  return {pass, "max relative excess over grid oracle " + fmt("%.2e", worst) +
                    (no_grid_point ? ", instances without feasible grid point: " + std::to_string(no_grid_point) : "")};
}

// 5 ------------------------------------------------------------------------

Outcome scaling_shape() {
  std::vector<double> size, secs;
  std::string detail;
  for (std::size_t users : {360u, 1170u, 1980u, 2790u, 3600u}) {
    SynthNetworkSpec spec;
    spec.users = users;
    spec.seed = 1000 + users;
    const SynthNetwork net = generate_network(spec);
    const HlMrf mrf = ground_program(parse_program(net.program), load_data(net.data), {.prune = true});
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      const SolveResult r = solve_map(mrf, SolveOptions{});
      best = std::min(best, seconds_since(t0));
      if (!r.converged()) detail += "unconverged run; ";
    }
    size.push_back(static_cast<double>(mrf.potentials().size() + mrf.constraints().size()));
    secs.push_back(best);
    detail += std::to_string(mrf.potentials().size()) + "+" + std::to_string(mrf.constraints().size()) + ": " +
              fmt("%.3f s", best) + "; ";
  }
  const double k = static_cast<double>(size.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < size.size(); ++i) {
    mx += size[i] / k;
    my += secs[i] / k;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < size.size(); ++i) {
    sxy += (size[i] - mx) * (secs[i] - my);
    sxx += (size[i] - mx) * (size[i] - mx);
    syy += (secs[i] - my) * (secs[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  return {r2 >= 0.95, detail + "R^2 " + fmt("%.4f", r2)};
}

// 6 ------------------------------------------------------------------------

// The minimizer moves from z along -a, so golden-section search over the
// step length gives an independent answer.
std::vector<double> golden_oracle(const LinearFunction& fn, int p, double w, std::span<const double> z, double rho) {
  const double a2 = fn.squared_norm();
  const double lz = fn(z);
  auto f = [&](double t) {
    const double h = std::max(lz - t * a2, 0.0);
    return w * std::pow(h, p) + 0.5 * rho * t * t * a2;
  };
  double lo = 0.0, hi = std::max(lz, 0.0) / a2 + w / rho + 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  const double t = 0.5 * (lo + hi);
  std::vector<double> x(z.begin(), z.end());
  for (const auto& term : fn.terms()) x[term.var] -= t * term.coeff;
  return x;
}

Outcome subproblem_exactness() {
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng() % 4;
    LinearFunction fn(u(rng));
    for (std::size_t i = 0; i < k; ++i) fn.add_term(i, u(rng) + (u(rng) < 0 ? -0.1 : 0.1));
    std::vector<double> z(k);
    for (auto& v : z) v = u(rng) * 1.5;
    const int p = 1 + trial % 2;
    const double w = 0.01 + (u(rng) + 1.0) * 2.0;
    const double rho = 0.2 + (u(rng) + 1.0);
    const auto got = solve_potential_subproblem(fn, p, w, z, rho);
    const auto want = golden_oracle(fn, p, w, z, rho);
    for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  return {worst <= 1e-6, "max abs error " + fmt("%.2e", worst)};
}

// 7 ------------------------------------------------------------------------

Outcome mple_gradient() {
  std::mt19937 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomModelSpec spec;
    spec.num_vars = 2 + trial % 4;
    spec.num_potentials = 4 + trial % 5;
    HlMrf mrf = testing::random_model(spec, rng);
    std::vector<double> truth(spec.num_vars);
    for (auto& v : truth) v = u(rng);
    const TrainingInstance inst{mrf, truth};
    const std::vector<double> w = mrf.weights();
    const MpleValue v = mple_log_and_gradient(inst, w);
    for (std::size_t q = 0; q < w.size(); ++q) {
      const double h = 1e-5;
      std::vector<double> up = w, down = w;
      up[q] += h;
      down[q] -= h;
      const double fd = (mple_log_and_gradient(inst, up).log_pl - mple_log_and_gradient(inst, down).log_pl) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(v.gradient[q]), 1e-6});
      worst = std::max(worst, std::abs(fd - v.gradient[q]) / scale);
    }
  }
  // One variable, 2 * max{y, 0}: Z = int_0^1 exp(-2y) dy = (1 - e^-2) / 2.
  HlMrf one = model_with_vars(1);
  const auto t = one.add_template("prior", 2.0);
  one.add_potential({LinearFunction({{0, 1.0}}, 0.0), 1, t, ""});
  const double y = 0.3;
  const MpleValue v = mple_log_and_gradient({one, {y}}, std::vector<double>{2.0});
  const double z = std::exp(-2 * y - v.log_pl);
  const double z_err = std::abs(z - (1 - std::exp(-2.0)) / 2);
  return {worst <= 1e-3 && z_err <= 1e-6,
          "max FD rel. error " + fmt("%.2e", worst) + ", Z error " + fmt("%.2e", z_err)};
}

// 8 ------------------------------------------------------------------------

Outcome grounding_fidelity() {
  const HlMrf mrf = ground_program(parse_program(read_file("data/fixtures/friends.psl")),
                                   load_data(read_file("data/fixtures/friends.data")));
  bool pattern = mrf.potentials().size() == 6;
  for (const auto& p : mrf.potentials()) {
    std::vector<double> c;
    for (const auto& t : p.fn.terms()) c.push_back(t.coeff);
    std::sort(c.begin(), c.end());
    pattern = pattern && p.exponent == 2 && p.fn.constant() == -1.0 && c == std::vector<double>{-1.0, 1.0, 1.0};
  }
  const std::size_t base = load_data(read_file("data/fixtures/document.data")).base_size();
  return {pattern && base == 4, "Friends potentials " + std::to_string(mrf.potentials().size()) +
                                    (pattern ? " with pattern (-1, 1, 1; -1)" : " with wrong pattern") +
                                    ", Document |B| " + std::to_string(base)};
}

// 9 ------------------------------------------------------------------------

Outcome boolean_agreement() {
  // Each of 3 variables is absent, positive or negated: 27 clauses.
  std::size_t checked = 0, mismatches = 0;
  for (int code = 0; code < 27; ++code) {
    Clause c;
    int rest = code;
    for (std::size_t i = 0; i < 3; ++i, rest /= 3) {
      if (rest % 3 == 1) c.positive.push_back(i);
      if (rest % 3 == 2) c.negative.push_back(i);
    }
    for (int bits = 0; bits < 8; ++bits) {
      const std::vector<double> y{double(bits & 1), double((bits >> 1) & 1), double((bits >> 2) & 1)};
      bool sat = false;
      for (auto i : c.positive) sat = sat || y[i] == 1.0;
      for (auto i : c.negative) sat = sat || y[i] == 0.0;
      if (clause_value(c, y) != (sat ? 1.0 : 0.0)) ++mismatches;
      ++checked;
    }
  }
  return {mismatches == 0, std::to_string(checked) + " clause/assignment pairs, " + std::to_string(mismatches) +
                               " mismatches"};
}

// 10 -----------------------------------------------------------------------

Outcome lazy_matches_full() {
  std::mt19937 rng(1010);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 100 + 10 * trial;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    HlMrf mrf = model_with_vars(n);
    const auto prior = mrf.add_template("prior", 0.5);
    const auto rule = mrf.add_template("rule", 1.0);
    const auto evidence = mrf.add_template("evidence", 2.0);
    for (std::size_t i = 0; i < n; ++i) mrf.add_potential({LinearFunction({{i, 1.0}}, 0.0), 2, prior, ""});
    for (std::size_t j = 0; j < 3 * n; ++j) {
      const std::size_t a = pick(rng), b = pick(rng);
      if (a != b) mrf.add_potential({LinearFunction({{a, 1.0}, {b, 1.0}}, -1.0), 1, rule, ""});
    }
    for (std::size_t k = 0; k < n / 20; ++k) {
      mrf.add_potential({LinearFunction({{pick(rng), -1.0}}, 0.8), 2, evidence, ""});
    }
    const SolveResult full = solve_map(mrf, tight());
    const LazyResult lazy = solve_map_lazy(mrf, tight());
    worst = std::max(worst, std::abs(lazy.result.objective - full.objective));
  }
  return {worst <= 1e-4, "max objective gap " + fmt("%.2e", worst)};
}

// 11 -----------------------------------------------------------------------

Outcome lme_slack() {
  // max{1 - y, 0}^2 with truth 1.
  HlMrf mrf = model_with_vars(1);
  const auto t = mrf.add_template("toward one", 1.0);
  mrf.add_potential({LinearFunction({{0, -1.0}}, 1.0), 2, t, ""});
  const std::vector<TrainingInstance> data{{mrf, {1.0}}};
  LmeOptions opts;
  opts.solve = tight();
  const LmeResult r = lme_train(data, opts);
  return {r.converged && r.slack > 0.0, "slack " + fmt("%.4f", r.slack) + ", weight " + fmt("%.4f", r.weights[0])};
}

}  // namespace
}  // namespace psl

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<psl::Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "analytic optima", 3.0, psl::analytic_optima},
      {2, "LCR equals MAX SAT LP", 30.0, psl::theorem_one},
      {3, "rounding guarantee", 60.0, psl::rounding_guarantee},
      {4, "solver accuracy vs grid", 120.0, psl::solver_accuracy},
      {5, "scaling shape", 600.0, psl::scaling_shape},
      {6, "subproblem exactness", 60.0, psl::subproblem_exactness},
      {7, "pseudolikelihood gradient", 60.0, psl::mple_gradient},
      {8, "grounding fidelity", 10.0, psl::grounding_fidelity},
      {9, "Lukasiewicz/Boolean agreement", 10.0, psl::boolean_agreement},
      {10, "lazy inference", 120.0, psl::lazy_matches_full},
      {11, "large-margin slack", 30.0, psl::lme_slack},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = psl::Clock::now();
    psl::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = psl::seconds_since(t0);
    const bool pass = o.pass && secs < c.budget;
    if (!pass) ++failed;
    std::printf("%s %2d %-30s %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
