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

#include <cmath>
#include <limits>
#include <random>

#include "learn_internal.hpp"
#include "psl/error.hpp"

namespace psl {

namespace {

// A conditional factor of the pseudolikelihood: one free variable, or a
// simplex block whose free variables sum to `total`.
struct Unit {
  std::vector<std::size_t> vars;
  bool simplex = false;
  double total = 0.0;
};

std::vector<Unit> partition_units(const HlMrf& mrf) {
  const std::size_t n = mrf.num_free();
  std::vector<int> owner(n, -1);
  std::vector<Unit> units;
  for (const auto& con : mrf.constraints()) {
    const auto terms = con.fn.terms();
    if (terms.empty()) continue;
    const double c = terms[0].coeff;
    bool equal = con.kind == ConstraintKind::kEquality && c > 0.0;
    for (const auto& t : terms) equal = equal && t.coeff == c;
    const double total = -con.fn.constant() / c;
    if (!equal || total < 0.0 || total > 1.0) {
      throw UnsupportedStructure("pseudolikelihood supports only equality constraints of the form sum y = s with "
                                 "s in [0,1]; got " + con.origin);
    }
    Unit u;
    u.simplex = true;
    u.total = total;
    for (const auto& t : terms) {
      if (owner[t.var] >= 0) {
        throw UnsupportedStructure("pseudolikelihood needs disjoint constraint blocks; variable " +
                                   to_string(mrf.variables().free_atom(t.var)) + " is shared");
      }
      owner[t.var] = static_cast<int>(units.size());
      u.vars.push_back(t.var);
    }
    units.push_back(std::move(u));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] < 0) units.push_back(Unit{{i}, false, 0.0});
  }
  return units;
}

}  // namespace

MpleValue mple_log_and_gradient(const TrainingInstance& inst, std::span<const double> weights,
                                const MpleOptions& options) {
  const HlMrf& mrf = inst.mrf;
  const auto templates = mrf.templates();
  if (weights.size() != templates.size()) throw DimensionError("one weight per template expected");
  validate_instance(inst);
  if (options.quadrature_points < 2) throw Error("quadrature needs at least 2 points");
  if (options.simplex_samples < 1) throw Error("simplex sampling needs at least 1 sample");

  const std::vector<Unit> units = partition_units(mrf);
  const auto potentials = mrf.potentials();
  const std::size_t n = mrf.num_free();
  const std::size_t nq = templates.size();

  // Potentials touching each variable.
  std::vector<std::vector<std::size_t>> touching(n);
  for (std::size_t j = 0; j < potentials.size(); ++j) {
    for (const auto& t : potentials[j].fn.terms()) touching[t.var].push_back(j);
  }
  std::vector<double> at_truth(potentials.size());
  for (std::size_t j = 0; j < potentials.size(); ++j) at_truth[j] = potentials[j].fn(inst.truth);

  MpleValue out;
  out.gradient.assign(nq, 0.0);

  std::vector<double> shift(n, 0.0);  // u - truth for the unit's variables
  std::vector<std::size_t> local;
  std::vector<char> mark(potentials.size(), 0);

  for (std::size_t ui = 0; ui < units.size(); ++ui) {
    const Unit& unit = units[ui];
    local.clear();
    for (auto v : unit.vars) {
      for (auto j : touching[v]) {
        if (!mark[j]) {
          mark[j] = 1;
          local.push_back(j);
        }
      }
    }
    for (auto j : local) mark[j] = 0;
    if (local.empty()) continue;  // uniform conditional: log Z = 0, no gradient

    // Energy and per-template features with the unit set to shift + truth.
    std::vector<double> feat(nq);
    auto evaluate = [&](double& energy_out) {
      std::fill(feat.begin(), feat.end(), 0.0);
      energy_out = 0.0;
      for (auto j : local) {
        double l = at_truth[j];
        for (const auto& t : potentials[j].fn.terms()) l += t.coeff * shift[t.var];
        const double h = std::max(l, 0.0);
        const double phi = potentials[j].exponent == 2 ? h * h : h;
        feat[potentials[j].template_id] += phi;
        energy_out += weights[potentials[j].template_id] * phi;
      }
    };

    double e_truth = 0.0;
    for (auto v : unit.vars) shift[v] = 0.0;
    evaluate(e_truth);
    const std::vector<double> f_truth = feat;

    // Points with their integration weights.
    std::vector<double> energies, omegas;
    std::vector<std::vector<double>> feats;
    if (!unit.simplex) {
      const std::size_t q = options.quadrature_points;
      const double h = 1.0 / static_cast<double>(q - 1);
      const std::size_t v = unit.vars[0];
      for (std::size_t k = 0; k < q; ++k) {
        shift[v] = static_cast<double>(k) * h - inst.truth[v];
        double e = 0.0;
        evaluate(e);
        energies.push_back(e);
        feats.push_back(feat);
        omegas.push_back(k == 0 || k + 1 == q ? h / 2 : h);
      }
    } else {
      std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + ui);
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> draw(unit.vars.size());
      const double omega = 1.0 / static_cast<double>(options.simplex_samples);
      for (std::size_t s = 0; s < options.simplex_samples; ++s) {
        double sum = 0.0;
        for (auto& d : draw) sum += d = expo(rng);
        for (std::size_t k = 0; k < draw.size(); ++k) {
          shift[unit.vars[k]] = unit.total * draw[k] / sum - inst.truth[unit.vars[k]];
        }
        double e = 0.0;
        evaluate(e);
        energies.push_back(e);
        feats.push_back(feat);
        omegas.push_back(omega);
      }
    }
    for (auto v : unit.vars) shift[v] = 0.0;

    const double m = *std::min_element(energies.begin(), energies.end());
    double z = 0.0;
    std::vector<double> expect(nq, 0.0);
    for (std::size_t k = 0; k < energies.size(); ++k) {
      const double p = omegas[k] * std::exp(-(energies[k] - m));
      z += p;
      for (std::size_t q = 0; q < nq; ++q) expect[q] += p * feats[k][q];
    }
    const double log_z = std::log(z) - m;
    out.log_pl += -e_truth - log_z;
    for (std::size_t q = 0; q < nq; ++q) out.gradient[q] += expect[q] / z - f_truth[q];
  }
  return out;
}

LearnResult mple_train(std::span<const TrainingInstance> instances, const MpleTrainOptions& options) {
  std::vector<double> w0 = detail::initial_weights(instances);
  std::vector<double> counts(w0.size(), 0.0);
  for (const auto& inst : instances) {
    for (std::size_t q = 0; q < w0.size(); ++q) counts[q] += static_cast<double>(inst.mrf.templates()[q].groundings);
  }
  return detail::averaged_ascent(std::move(w0), options.steps, options.step_size, [&](const std::vector<double>& w) {
    std::vector<double> g = detail::sum_gradients(instances.size(), w.size(), [&](std::size_t i) {
      return mple_log_and_gradient(instances[i], w, options.mple).gradient;
    });
    for (std::size_t q = 0; q < g.size(); ++q) g[q] = counts[q] > 0.0 ? g[q] / counts[q] : 0.0;
    return g;
  });
}

}  // namespace psl
