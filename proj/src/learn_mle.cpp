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
#include <charconv>
#include <exception>
#include <map>
#include <set>
#include <sstream>

#include "learn_internal.hpp"
#include "psl/error.hpp"
#include "psl/lang.hpp"

namespace psl {

namespace detail {

LearnResult averaged_ascent(std::vector<double> weights, std::size_t steps, double step_size,
                            const std::function<std::vector<double>(const std::vector<double>&)>& gradient) {
  if (steps == 0) throw Error("need at least one learning step");
  if (!(step_size > 0.0)) throw Error("step size must be positive");
  LearnResult out;
  std::vector<double> sum(weights.size(), 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::vector<double> g = gradient(weights);
    for (std::size_t q = 0; q < weights.size(); ++q) {
      weights[q] = std::max(0.0, weights[q] + step_size * g[q]);
      sum[q] += weights[q];
    }
    out.iterates.push_back(weights);
  }
  out.weights = sum;
  for (auto& w : out.weights) w /= static_cast<double>(steps);
  return out;
}

std::vector<double> initial_weights(std::span<const TrainingInstance> instances) {
  if (instances.empty()) throw Error("no training instances");
  const std::size_t q = instances[0].mrf.templates().size();
  for (const auto& inst : instances) {
    if (inst.mrf.templates().size() != q) throw DimensionError("training instances have different templates");
    validate_instance(inst);
  }
  return instances[0].mrf.weights();
}

std::vector<double> sum_gradients(std::size_t instances, std::size_t templates,
                                  const std::function<std::vector<double>(std::size_t)>& gradient) {
  std::vector<std::vector<double>> parts(instances);
  std::vector<std::exception_ptr> errors(instances);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < instances; ++i) {
    try {
      parts[i] = gradient(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<double> g(templates, 0.0);
  for (const auto& p : parts) {
    for (std::size_t q = 0; q < templates; ++q) g[q] += p[q];
  }
  return g;
}

}  // namespace detail

void validate_instance(const TrainingInstance& inst) {
  validate_assignment(inst.mrf, inst.truth);
  if (!check_feasible(inst.mrf, inst.truth, 1e-6).feasible) throw ModelError("training truth violates hard constraints");
}

std::vector<double> mle_gradient(const TrainingInstance& inst, std::span<const double> weights,
                                 const SolveOptions& solve) {
  const HlMrf mrf = inst.mrf.with_weights(weights);
  const SolveResult map = solve_map(mrf, solve);
  if (map.status == SolveStatus::kInfeasible) throw Error("MAP inference failed: " + map.message);
  const std::vector<double> at_map = template_features(mrf, map.y);
  const std::vector<double> at_truth = template_features(mrf, inst.truth);
  std::vector<double> g(weights.size(), 0.0);
  const auto templates = mrf.templates();
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (templates[q].groundings == 0) continue;
    g[q] = (at_map[q] - at_truth[q]) / static_cast<double>(templates[q].groundings);
  }
  return g;
}

LearnResult perceptron_train(std::span<const TrainingInstance> instances, const PerceptronOptions& options) {
  return detail::averaged_ascent(
      detail::initial_weights(instances), options.steps, options.step_size, [&](const std::vector<double>& w) {
        return detail::sum_gradients(instances.size(), w.size(),
                                     [&](std::size_t i) { return mle_gradient(instances[i], w, options.solve); });
      });
}

std::string format_weights(const HlMrf& mrf, std::span<const double> weights) {
  if (weights.size() != mrf.templates().size()) throw DimensionError("one weight per template expected");
  std::string out = "# psl-weights v1\n";
  for (std::size_t q = 0; q < weights.size(); ++q) {
    out += format_number(weights[q]) + "\t" + mrf.templates()[q].source + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, double>> parse_weights(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "# psl-weights v1") throw Error("weights file must start with '# psl-weights v1'");
  std::vector<std::pair<std::string, double>> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    double w = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), w);
    if (tab == std::string::npos || res.ec != std::errc() || res.ptr != line.data() + tab || !(w >= 0.0)) {
      throw Error("weights file line " + std::to_string(number) + ": expected '<weight>\\t<rule>'");
    }
    out.emplace_back(line.substr(tab + 1), w);
  }
  return out;
}

HlMrf apply_weights(const HlMrf& mrf, std::span<const std::pair<std::string, double>> weights) {
  std::map<std::string, double> by_source(weights.begin(), weights.end());
  std::set<std::string> known;
  std::vector<double> w = mrf.weights();
  for (std::size_t q = 0; q < w.size(); ++q) {
    const std::string& source = mrf.templates()[q].source;
    known.insert(source);
    if (auto it = by_source.find(source); it != by_source.end()) w[q] = it->second;
  }
  for (const auto& entry : by_source) {
    if (!known.contains(entry.first)) throw Error("weights file names an unknown rule: " + entry.first);
  }
  return mrf.with_weights(w);
}

}  // namespace psl
