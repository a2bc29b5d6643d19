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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "psl/error.hpp"
#include "psl/learn.hpp"
#include "random_models.hpp"

namespace psl {
namespace {

HlMrf model_with_vars(std::size_t n) {
  VariableTable vars;
  for (std::size_t i = 0; i < n; ++i) vars.add_free({"Y", {std::to_string(i)}});
  return HlMrf(std::move(vars));
}

SolveOptions tight() {
  SolveOptions o;
  o.eps_abs = 1e-8;
  o.eps_rel = 1e-8;
  o.max_iterations = 200000;
  return o;
}

// 3 * max{y, 0}^2 + 1 * max{1 - y, 0}^2, MAP y = 1/4.
HlMrf tug_of_war() {
  HlMrf mrf = model_with_vars(1);
  const auto a = mrf.add_template("down", 3.0);
  const auto b = mrf.add_template("up", 1.0);
  mrf.add_potential({LinearFunction({{0, 1.0}}, 0.0), 2, a, ""});
  mrf.add_potential({LinearFunction({{0, -1.0}}, 1.0), 2, b, ""});
  return mrf;
}

TEST(Mle, HandComputedGradient) {
  const TrainingInstance inst{tug_of_war(), {0.5}};
  const std::vector<double> w{3.0, 1.0};
  const auto g = mle_gradient(inst, w, tight());
  EXPECT_NEAR(g[0], 0.0625 - 0.25, 1e-6);
  EXPECT_NEAR(g[1], 0.5625 - 0.25, 1e-6);
}

TEST(Mle, ZeroAtMapAndForEmptyTemplates) {
  HlMrf mrf = tug_of_war();
  mrf.add_template("unused", 2.0);
  const std::vector<double> w{3.0, 1.0, 2.0};
  const TrainingInstance inst{mrf, {0.25}};
  const auto g = mle_gradient(inst, w, tight());
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[0], 0.0, 1e-6);
  EXPECT_NEAR(g[1], 0.0, 1e-6);
  EXPECT_EQ(g[2], 0.0);

  PerceptronOptions opts;
  opts.steps = 5;
  opts.solve = tight();
  const std::vector<TrainingInstance> data{inst};
  const LearnResult r = perceptron_train(data, opts);
  for (std::size_t q = 0; q < 3; ++q) EXPECT_NEAR(r.weights[q], w[q], 1e-5);
}

// Targets a_i and b_i pull each variable; the truth is the MAP under (5, 1).
TrainingInstance two_rule_instance(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 30;
  HlMrf mrf = model_with_vars(n);
  const auto ta = mrf.add_template("a", 1.0);
  const auto tb = mrf.add_template("b", 1.0);
  std::vector<double> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng);
    mrf.add_potential({LinearFunction({{i, 1.0}}, -a), 2, ta, ""});
    mrf.add_potential({LinearFunction({{i, -1.0}}, a), 2, ta, ""});
    mrf.add_potential({LinearFunction({{i, 1.0}}, -b), 2, tb, ""});
    mrf.add_potential({LinearFunction({{i, -1.0}}, b), 2, tb, ""});
    truth[i] = (5 * a + b) / 6;
  }
  return {std::move(mrf), std::move(truth)};
}

TEST(Perceptron, RecoversWeightOrdering) {
  std::mt19937 rng(1);
  const std::vector<TrainingInstance> data{two_rule_instance(rng)};
  PerceptronOptions opts;
  opts.steps = 50;
  opts.step_size = 5.0;
  const LearnResult r = perceptron_train(data, opts);
  EXPECT_GT(r.weights[0], r.weights[1]);
  for (const auto& w : r.iterates) {
    for (double v : w) EXPECT_GE(v, 0.0);
  }
  EXPECT_EQ(r.iterates.size(), 50u);
}

TEST(Mple, NoPotentials) {
  const TrainingInstance inst{model_with_vars(3), {0.1, 0.5, 0.9}};
  const MpleValue v = mple_log_and_gradient(inst, {});
  EXPECT_EQ(v.log_pl, 0.0);
}

TEST(Mple, PartitionFunctionClosedForm) {
  HlMrf mrf = model_with_vars(1);
  const auto t = mrf.add_template("prior", 2.0);
  mrf.add_potential({LinearFunction({{0, 1.0}}, 0.0), 1, t, ""});
  const double y = 0.3;
  const std::vector<double> w{2.0};
  const MpleValue v = mple_log_and_gradient({mrf, {y}}, w);
  // log P = -2y - log Z
  const double z = std::exp(-2 * y - v.log_pl);
  EXPECT_NEAR(z, (1 - std::exp(-2.0)) / 2, 1e-6);
  EXPECT_NEAR(z, 0.43233, 1e-5);
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max(1e-6, std::max(std::abs(a), std::abs(b))); }

void check_finite_differences(const TrainingInstance& inst, const MpleOptions& opts) {
  std::vector<double> w = inst.mrf.weights();
  const MpleValue v = mple_log_and_gradient(inst, w, opts);
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double h = 1e-5;
    std::vector<double> up = w, down = w;
    up[q] += h;
    down[q] -= h;
    const double fd =
        (mple_log_and_gradient(inst, up, opts).log_pl - mple_log_and_gradient(inst, down, opts).log_pl) / (2 * h);
    if (std::abs(fd) < 1e-8 && std::abs(v.gradient[q]) < 1e-8) continue;
    EXPECT_LE(relative_error(fd, v.gradient[q]), 1e-3) << "template " << q;
  }
}

TEST(Mple, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MpleOptions opts;
  opts.quadrature_points = 257;
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomModelSpec spec;
    spec.num_vars = 4;
    spec.num_potentials = 8;
    HlMrf mrf = testing::random_model(spec, rng);
    std::vector<double> truth(4);
    for (auto& v : truth) v = u(rng);
    check_finite_differences({std::move(mrf), std::move(truth)}, opts);
  }
}

TEST(Mple, SimplexBlocks) {
  std::mt19937 rng(8);
  HlMrf mrf = model_with_vars(5);
  const auto t1 = mrf.add_template("pull", 1.5);
  const auto t2 = mrf.add_template("push", 0.7);
  mrf.add_potential({LinearFunction({{0, -1.0}}, 0.8), 2, t1, ""});
  mrf.add_potential({LinearFunction({{1, 1.0}, {3, -1.0}}, 0.0), 1, t2, ""});
  mrf.add_potential({LinearFunction({{2, 1.0}, {4, 1.0}}, -0.5), 1, t2, ""});
  mrf.add_constraint({LinearFunction({{0, 1.0}, {1, 1.0}, {2, 1.0}}, -1.0), ConstraintKind::kEquality, ""});
  const TrainingInstance inst{mrf, {0.5, 0.3, 0.2, 0.4, 0.9}};
  MpleOptions opts;
  opts.quadrature_points = 257;
  check_finite_differences(inst, opts);
  // Fixed seed: repeated evaluation is identical.
  const std::vector<double> w{1.5, 0.7};
  EXPECT_EQ(mple_log_and_gradient(inst, w, opts).log_pl, mple_log_and_gradient(inst, w, opts).log_pl);
}

TEST(Mple, UnsupportedStructures) {
  HlMrf ineq = model_with_vars(2);
  ineq.add_constraint({LinearFunction({{0, 1.0}, {1, 1.0}}, -1.0), ConstraintKind::kAtMostZero, "ineq"});
  EXPECT_THROW(mple_log_and_gradient({ineq, {0.2, 0.2}}, {}), UnsupportedStructure);

  HlMrf overlap = model_with_vars(3);
  overlap.add_constraint({LinearFunction({{0, 1.0}, {1, 1.0}}, -1.0), ConstraintKind::kEquality, "a"});
  overlap.add_constraint({LinearFunction({{1, 1.0}, {2, 1.0}}, -1.0), ConstraintKind::kEquality, "b"});
  EXPECT_THROW(mple_log_and_gradient({overlap, {0.5, 0.5, 0.5}}, {}), UnsupportedStructure);

  HlMrf mixed = model_with_vars(2);
  mixed.add_constraint({LinearFunction({{0, 1.0}, {1, -1.0}}, 0.0), ConstraintKind::kEquality, "diff"});
  EXPECT_THROW(mple_log_and_gradient({mixed, {0.5, 0.5}}, {}), UnsupportedStructure);
}

TEST(Mple, TrainingMovesTowardTruth) {
  std::mt19937 rng(1);
  const std::vector<TrainingInstance> data{two_rule_instance(rng)};
  MpleTrainOptions opts;
  opts.steps = 30;
  opts.mple.quadrature_points = 257;
  const LearnResult r = mple_train(data, opts);
  EXPECT_GT(r.weights[0], r.weights[1]);
}

TEST(Lme, OracleExamples) {
  HlMrf mrf = tug_of_war();
  const std::vector<double> zero{0.0, 0.0};
  const Separation s = lme_separation_oracle({mrf, {1.0}}, zero, tight());
  EXPECT_NEAR(s.violator[0], 0.0, 1e-6);
  EXPECT_NEAR(s.loss, 1.0, 1e-6);

  const Separation mid = lme_separation_oracle({mrf, {0.5}}, zero, tight());
  EXPECT_TRUE(mid.violator[0] < 1e-6 || mid.violator[0] > 1 - 1e-6);
  EXPECT_NEAR(mid.loss, 0.5, 1e-6);
  EXPECT_TRUE(mid.dca_converged);

  HlMrf three = model_with_vars(3);
  const Separation all = lme_separation_oracle({three, {1.0, 1.0, 1.0}}, {}, tight());
  EXPECT_NEAR(all.loss, 3.0, 1e-6);
}

TEST(Lme, OracleBeatsGridForBinaryTruth) {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    testing::RandomModelSpec spec;
    spec.num_vars = 2;
    spec.num_potentials = 4;
    HlMrf mrf = testing::random_model(spec, rng);
    std::vector<double> truth{static_cast<double>(bit(rng)), static_cast<double>(bit(rng))};
    const std::vector<double> w = mrf.weights();
    const Separation s = lme_separation_oracle({mrf, truth}, w, tight());
    double best = 1e300;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        const std::vector<double> y{i / 100.0, j / 100.0};
        best = std::min(best, energy(mrf, y) - std::abs(y[0] - truth[0]) - std::abs(y[1] - truth[1]));
      }
    }
    EXPECT_LE(s.objective, best + 1e-3);
  }
}

TEST(Lme, QpMatchesGrid) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Cut> cuts;
    for (int k = 0; k < 3; ++k) cuts.push_back({{u(rng), u(rng)}, 0.5 + 0.5 * u(rng)});
    const double c = 0.5;
    const QpResult qp = solve_cutting_plane_qp(cuts, c);
    ASSERT_TRUE(qp.converged);
    double best = 1e300;
    for (int i = 0; i <= 400; ++i) {
      for (int j = 0; j <= 400; ++j) {
        const double w0 = i / 200.0, w1 = j / 200.0;
        double xi = 0.0;
        for (const auto& cut : cuts) xi = std::max(xi, w0 * cut.feature_gap[0] + w1 * cut.feature_gap[1] + cut.loss);
        best = std::min(best, 0.5 * (w0 * w0 + w1 * w1) + c * xi);
      }
    }
    EXPECT_LE(qp.objective, best + 1e-6);
    EXPECT_GE(qp.objective, best - 1e-3);
  }
}

// max{1 - y, 0}^2 with truth 1: the loss 1 - v always beats the squared
// energy gap near the truth, so some slack remains. By hand, with C = 0.1 the
// optimum is w = 0.1 and slack 0.9.
TEST(Lme, SquaredPotentialNeedsSlack) {
  HlMrf mrf = model_with_vars(1);
  const auto t = mrf.add_template("toward one", 1.0);
  mrf.add_potential({LinearFunction({{0, -1.0}}, 1.0), 2, t, ""});
  const std::vector<TrainingInstance> data{{mrf, {1.0}}};
  LmeOptions opts;
  opts.solve = tight();
  const LmeResult r = lme_train(data, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(r.slack, 0.0);
  EXPECT_NEAR(r.slack, 0.9, 1e-3);
  EXPECT_NEAR(r.weights[0], 0.1, 1e-3);
}

// The linear version is separable: w = 1 removes all slack when C is large.
TEST(Lme, SeparableToy) {
  HlMrf mrf = model_with_vars(1);
  const auto t = mrf.add_template("toward one", 1.0);
  mrf.add_potential({LinearFunction({{0, -1.0}}, 1.0), 1, t, ""});
  const std::vector<TrainingInstance> data{{mrf, {1.0}}};
  LmeOptions opts;
  opts.c = 10.0;
  opts.solve = tight();
  const LmeResult r = lme_train(data, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.cuts.size(), 10u);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-3);
  EXPECT_NEAR(r.slack, 0.0, 1e-3);
  for (std::size_t k = 1; k < r.qp_objectives.size(); ++k) {
    EXPECT_GE(r.qp_objectives[k], r.qp_objectives[k - 1] - 1e-9);
  }
  for (double v : r.cut_violations) EXPECT_GT(v, opts.tol);
}

TEST(Lme, NoTemplates) {
  HlMrf mrf = model_with_vars(1);
  const std::vector<TrainingInstance> data{{mrf, {0.5}}};
  // The violator sits at a boundary with loss 0.5, which only slack can absorb.
  const LmeResult r = lme_train(data, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.weights.size(), 0u);
  EXPECT_NEAR(r.slack, 0.5, 1e-6);
}

TEST(Weights, FormatRoundTrip) {
  const HlMrf mrf = tug_of_war();
  const std::vector<double> w{0.5, 2.25};
  const std::string text = format_weights(mrf, w);
  EXPECT_EQ(text.rfind("# psl-weights v1\n", 0), 0u);
  const auto parsed = parse_weights(text);
  ASSERT_EQ(parsed.size(), 2u);
  const HlMrf updated = apply_weights(mrf, parsed);
  EXPECT_EQ(updated.weights(), w);
  EXPECT_THROW(parse_weights("0.5\tx\n"), Error);
  EXPECT_THROW(parse_weights("# psl-weights v1\n-1\tdown\n"), Error);
  const std::vector<std::pair<std::string, double>> unknown{{"missing", 1.0}};
  EXPECT_THROW(apply_weights(mrf, unknown), Error);
}

TEST(Instance, Validation) {
  HlMrf mrf = model_with_vars(2);
  mrf.add_constraint({LinearFunction({{0, 1.0}, {1, 1.0}}, -1.0), ConstraintKind::kEquality, ""});
  EXPECT_THROW(validate_instance({mrf, {0.5}}), DimensionError);
  EXPECT_THROW(validate_instance({mrf, {0.5, 0.6}}), ModelError);
  EXPECT_NO_THROW(validate_instance({mrf, {0.5, 0.5}}));
}

}  // namespace
}  // namespace psl
