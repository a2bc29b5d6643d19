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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psl/infer.hpp"
#include "psl/model.hpp"

namespace psl {

struct TrainingInstance {
  HlMrf mrf;
  std::vector<double> truth;  // one value per free variable
};

// Throws DimensionError or ModelError for truth outside [0,1] or violating
// the hard constraints (tolerance 1e-6).
void validate_instance(const TrainingInstance& inst);

// Structured-perceptron approximation of the log-likelihood gradient:
// (Phi_q(MAP) - Phi_q(truth)) / |t_q|, zero for templates without groundings.
std::vector<double> mle_gradient(const TrainingInstance& inst, std::span<const double> weights,
                                 const SolveOptions& solve = {});

struct PerceptronOptions {
  std::size_t steps = 100;
  double step_size = 1.0;
  SolveOptions solve;
};

struct LearnResult {
  std::vector<double> weights;
  std::vector<std::vector<double>> iterates;  // post-projection weights per step
};

// Gradient ascent with fixed steps, negatives clipped to 0, returns the mean
// of the iterates. Starts from the first instance's template weights.
LearnResult perceptron_train(std::span<const TrainingInstance> instances, const PerceptronOptions& options = {});

struct MpleOptions {
  std::size_t quadrature_points = 1025;  // composite trapezoid over [0,1]
  std::size_t simplex_samples = 1000;
  std::uint64_t seed = 0;
};

struct MpleValue {
  double log_pl = 0.0;
  std::vector<double> gradient;  // d log_pl / d weight_q, unscaled
};

// Log pseudolikelihood against the uniform base measure, with each
// conditional taken over one free variable or one simplex block (an equality
// constraint with equal positive coefficients whose free variables sum to at
// most 1). Any other constraint shape throws UnsupportedStructure.
MpleValue mple_log_and_gradient(const TrainingInstance& inst, std::span<const double> weights,
                                const MpleOptions& options = {});

struct MpleTrainOptions {
  std::size_t steps = 100;
  double step_size = 1.0;
  MpleOptions mple;
};

// Projected gradient ascent on the pseudolikelihood, components scaled by
// 1 / |t_q|, with the same iterate averaging as the perceptron.
LearnResult mple_train(std::span<const TrainingInstance> instances, const MpleTrainOptions& options = {});

struct Separation {
  std::vector<double> violator;
  double loss = 0.0;                  // L1 distance to the truth
  std::vector<double> feature_gap;    // Phi(truth) - Phi(violator), per template
  double objective = 0.0;             // weights . Phi(violator) - loss
  std::size_t dca_iterations = 0;
  bool dca_converged = true;
};

// Loss-augmented MAP. Interior truth values are handled by the
// difference-of-convex iteration over the signs of (violator - truth).
Separation lme_separation_oracle(const TrainingInstance& inst, std::span<const double> weights,
                                 const SolveOptions& solve = {}, std::size_t max_dca_iterations = 50);

struct Cut {
  std::vector<double> feature_gap;
  double loss = 0.0;
};

struct QpResult {
  std::vector<double> weights;
  double slack = 0.0;
  double objective = 0.0;
  bool converged = true;
};

// min 1/2 |w|^2 + C xi  s.t.  w >= 0, xi >= 0, w . gap_k + loss_k <= xi.
// Projected gradient ascent on the dual over {beta >= 0, sum beta <= C}.
QpResult solve_cutting_plane_qp(std::span<const Cut> cuts, double c, double tol = 1e-6,
                                std::size_t max_iterations = 200000);

struct LmeOptions {
  double c = 0.1;
  double tol = 1e-3;  // stop once the worst cut is violated by at most this
  std::size_t max_cuts = 200;
  SolveOptions solve;
};

struct LmeResult {
  std::vector<double> weights;
  double slack = 0.0;
  std::vector<Cut> cuts;
  std::vector<double> qp_objectives;  // after each added cut
  std::vector<double> cut_violations;  // violation of each cut when added
  bool converged = false;
};

// Single-slack cutting-plane training. With several instances their gaps
// and losses are summed into one joint cut.
LmeResult lme_train(std::span<const TrainingInstance> instances, const LmeOptions& options = {});

// Text format: "# psl-weights v1" then one "<weight>\t<template source>" line
// per template.
std::string format_weights(const HlMrf& mrf, std::span<const double> weights);
std::vector<std::pair<std::string, double>> parse_weights(std::string_view text);
// Replaces template weights by source match; unknown sources throw Error.
HlMrf apply_weights(const HlMrf& mrf, std::span<const std::pair<std::string, double>> weights);

}  // namespace psl
