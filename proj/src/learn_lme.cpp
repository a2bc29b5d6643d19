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
#include <numeric>

#include "learn_internal.hpp"
#include "psl/error.hpp"

namespace psl {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Euclidean projection onto {beta >= 0, sum beta <= c}.
void project_capped(std::vector<double>& beta, double c) {
  double sum = 0.0;
  for (auto& b : beta) sum += b = std::max(b, 0.0);
  if (sum <= c) return;
  std::vector<double> sorted(beta);
  std::sort(sorted.rbegin(), sorted.rend());
  double acc = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    acc += sorted[k];
    const double t = (acc - c) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (auto& b : beta) b = std::max(b - theta, 0.0);
}

}  // namespace

Separation lme_separation_oracle(const TrainingInstance& inst, std::span<const double> weights,
                                 const SolveOptions& solve, std::size_t max_dca_iterations) {
  validate_instance(inst);
  const HlMrf mrf = inst.mrf.with_weights(weights);
  const std::size_t n = mrf.num_free();
  const std::vector<double>& y = inst.truth;

  // Sign of (violator - truth) per variable, starting opposite the rounded truth.
  std::vector<int> dir(n);
  for (std::size_t i = 0; i < n; ++i) dir[i] = y[i] >= 0.5 ? -1 : 1;

  Separation out;
  out.dca_converged = false;
  SolveOptions opts = solve;
  for (std::size_t it = 1; it <= std::max<std::size_t>(max_dca_iterations, 1); ++it) {
    // -|v - y| linearized as -dir * (v - y).
    LinearFunction loss_terms;
    for (std::size_t i = 0; i < n; ++i) {
      loss_terms.add_term(i, -dir[i]);
      loss_terms.add_constant(dir[i] * y[i]);
    }
    const std::vector<LinearFunction> extra{loss_terms};
    const SolveResult res = solve_map(mrf, extra, opts);
    if (res.status == SolveStatus::kInfeasible) throw Error("loss-augmented inference failed: " + res.message);
    out.violator = res.y;
    out.dca_iterations = it;
    opts.initial = res.y;

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = res.y[i] - y[i];
      const int next = d > 1e-9 ? 1 : d < -1e-9 ? -1 : dir[i];
      changed = changed || next != dir[i];
      dir[i] = next;
    }
    if (!changed) {
      out.dca_converged = true;
      break;
    }
  }

  out.loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.loss += std::abs(y[i] - out.violator[i]);
  const std::vector<double> f_truth = template_features(mrf, y);
  const std::vector<double> f_viol = template_features(mrf, out.violator);
  out.feature_gap.resize(f_truth.size());
  for (std::size_t q = 0; q < f_truth.size(); ++q) out.feature_gap[q] = f_truth[q] - f_viol[q];
  out.objective = dot(weights, f_viol) - out.loss;
  return out;
}

QpResult solve_cutting_plane_qp(std::span<const Cut> cuts, double c, double tol, std::size_t max_iterations) {
  if (!(c > 0.0)) throw Error("C must be positive");
  QpResult out;
  if (cuts.empty()) return out;
  const std::size_t nq = cuts[0].feature_gap.size();
  for (const auto& cut : cuts) {
    if (cut.feature_gap.size() != nq) throw DimensionError("cuts have different lengths");
  }
  const std::size_t k = cuts.size();

  double lipschitz = 0.0;
  for (const auto& cut : cuts) lipschitz += dot(cut.feature_gap, cut.feature_gap);
  const double step = 1.0 / std::max(lipschitz, 1e-12);

  std::vector<double> beta(k, 0.0), w(nq), grad(k);
  auto weights_of = [&](const std::vector<double>& b) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t q = 0; q < nq; ++q) w[q] -= b[j] * cuts[j].feature_gap[q];
    }
    for (auto& v : w) v = std::max(v, 0.0);
  };

  out.converged = false;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    weights_of(beta);
    double dual = -0.5 * dot(w, w);
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      dual += beta[j] * cuts[j].loss;
      grad[j] = cuts[j].loss + dot(cuts[j].feature_gap, w);
      worst = std::max(worst, grad[j]);
    }
    const double primal = 0.5 * dot(w, w) + c * worst;
    out.weights = w;
    out.slack = worst;
    out.objective = primal;
    if (primal - dual <= tol * std::max(1.0, std::abs(primal))) {
      out.converged = true;
      break;
    }
    // Steps longer than C only lose precision in the projection.
    double largest = 0.0;
    for (double g : grad) largest = std::max(largest, std::abs(g));
    const double t = largest > 0.0 ? std::min(step, c / largest) : step;
    for (std::size_t j = 0; j < k; ++j) beta[j] += t * grad[j];
    project_capped(beta, c);
  }
  return out;
}

LmeResult lme_train(std::span<const TrainingInstance> instances, const LmeOptions& options) {
  if (!(options.c > 0.0)) throw Error("C must be positive");
  const std::size_t nq = detail::initial_weights(instances).size();
  LmeResult out;
  out.weights.assign(nq, 0.0);
  for (std::size_t round = 0; round < options.max_cuts; ++round) {
    Cut cut{std::vector<double>(nq, 0.0), 0.0};
    for (const auto& inst : instances) {
      const Separation sep = lme_separation_oracle(inst, out.weights, options.solve);
      for (std::size_t q = 0; q < nq; ++q) cut.feature_gap[q] += sep.feature_gap[q];
      cut.loss += sep.loss;
    }
    const double violation = dot(out.weights, cut.feature_gap) + cut.loss - out.slack;
    if (violation <= options.tol) {
      out.converged = true;
      break;
    }
    out.cuts.push_back(std::move(cut));
    out.cut_violations.push_back(violation);
    const QpResult qp = solve_cutting_plane_qp(out.cuts, options.c);
    if (!qp.converged) throw Error("cutting-plane QP did not converge");
    out.weights = qp.weights;
    out.slack = qp.slack;
    out.qp_objectives.push_back(qp.objective);
  }
  return out;
}

}  // namespace psl
