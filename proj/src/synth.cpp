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

#include "psl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "psl/error.hpp"
#include "psl/lang.hpp"

namespace psl {

std::vector<EdgeTypeSpec> SynthNetworkSpec::default_edge_types() {
  return {{2.0, 0.08, 0.9}, {2.2, 0.1, 0.7}, {2.4, 0.12, 0.5},
          {2.6, 0.15, 0.4}, {2.8, 0.18, 0.2}, {3.0, 0.2, 0.1}};
}

void SynthNetworkSpec::validate() const {
  if (users < 2) throw Error("synthetic network needs at least 2 users");
  if (edge_types.empty()) throw Error("synthetic network needs at least one edge type");
  for (const auto& t : edge_types) {
    if (!(t.gamma >= 2.0 && t.gamma <= 3.0)) throw Error("edge-type gamma must be in [2,3]");
    if (!(t.alpha > 0.0 && t.alpha <= 1.0)) throw Error("edge-type alpha must be in (0,1]");
    if (!(t.weight >= 0.0)) throw Error("edge-type weight must be nonnegative");
  }
  if (!(opinion_weight >= 0.0)) throw Error("opinion weight must be nonnegative");
}

namespace {

std::vector<std::size_t> sample_degrees(std::size_t n, const EdgeTypeSpec& t, std::mt19937_64& rng) {
  std::vector<double> mass(n);  // mass[k] for k = 0..n-1
  mass[0] = 1.0 - t.alpha;
  double zeta = 0.0;
  for (std::size_t k = 1; k < n; ++k) zeta += std::pow(static_cast<double>(k), -t.gamma);
  for (std::size_t k = 1; k < n; ++k) mass[k] = t.alpha * std::pow(static_cast<double>(k), -t.gamma) / zeta;
  std::discrete_distribution<std::size_t> dist(mass.begin(), mass.end());
  std::vector<std::size_t> d(n);
  for (auto& x : d) x = dist(rng);
  return d;
}

std::string user_name(std::size_t i, std::size_t width) {
  std::string s = std::to_string(i);
  return "u" + std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

SynthNetwork generate_network(const SynthNetworkSpec& spec) {
  spec.validate();
  const std::size_t types = spec.edge_types.size();

  // A user is isolated when both degrees are 0 for every type.
  double p_iso = 1.0;
  for (const auto& t : spec.edge_types) p_iso *= (1.0 - t.alpha) * (1.0 - t.alpha);
  const std::size_t n0 = static_cast<std::size_t>(std::ceil(static_cast<double>(spec.users) / (1.0 - p_iso)));

  std::mt19937_64 rng(spec.seed);
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> edges(types);
  for (std::size_t ti = 0; ti < types; ++ti) {
    const auto out_deg = sample_degrees(n0, spec.edge_types[ti], rng);
    const auto in_deg = sample_degrees(n0, spec.edge_types[ti], rng);
    std::vector<std::size_t> out_stubs, in_stubs;
    for (std::size_t u = 0; u < n0; ++u) {
      out_stubs.insert(out_stubs.end(), out_deg[u], u);
      in_stubs.insert(in_stubs.end(), in_deg[u], u);
    }
    std::shuffle(out_stubs.begin(), out_stubs.end(), rng);
    std::shuffle(in_stubs.begin(), in_stubs.end(), rng);
    const std::size_t m = std::min(out_stubs.size(), in_stubs.size());
    for (std::size_t k = 0; k < m; ++k) {
      if (out_stubs[k] != in_stubs[k]) edges[ti].emplace(out_stubs[k], in_stubs[k]);
    }
  }

  std::vector<char> connected(n0, 0);
  for (const auto& es : edges) {
    for (const auto& [a, b] : es) connected[a] = connected[b] = 1;
  }
  std::vector<std::size_t> id(n0, 0);
  std::size_t kept = 0;
  for (std::size_t u = 0; u < n0; ++u) {
    if (connected[u]) id[u] = kept++;
  }
  const std::size_t width = std::to_string(kept > 0 ? kept - 1 : 0).size();

  std::uniform_real_distribution<double> opinion(-1.0, 1.0);
  SynthNetwork out;
  out.initial_users = n0;
  out.users = kept;
  std::string& d = out.data;
  d += "User = {";
  for (std::size_t i = 0; i < kept; ++i) d += (i ? ", \"" : "\"") + user_name(i, width) + "\"";
  d += "}\n\nLiberal(User)\nConservative(User)\nPriorLiberal(User) (closed)\n";
  for (std::size_t ti = 0; ti < types; ++ti) d += "Edge" + std::to_string(ti + 1) + "(User, User) (closed)\n";
  d += "\n";
  for (std::size_t i = 0; i < kept; ++i) {
    const double v = (opinion(rng) + 1.0) / 2.0;
    d += "PriorLiberal(\"" + user_name(i, width) + "\") = " + format_number(v) + "\n";
  }
  for (std::size_t ti = 0; ti < types; ++ti) {
    out.edges.push_back(edges[ti].size());
    for (const auto& [a, b] : edges[ti]) {
      d += "Edge" + std::to_string(ti + 1) + "(\"" + user_name(id[a], width) + "\", \"" + user_name(id[b], width) +
           "\") = 1\n";
    }
  }

  const std::string sq = spec.squared ? " ^2" : "";
  std::string& p = out.program;
  p += format_number(spec.opinion_weight) + " : Liberal(U) = PriorLiberal(U)" + sq + "\n";
  p += "Liberal(U) + Conservative(U) = 1 .\n";
  for (std::size_t ti = 0; ti < types; ++ti) {
    const std::string e = "Edge" + std::to_string(ti + 1);
    const std::string w = format_number(spec.edge_types[ti].weight);
    p += w + " : " + e + "(A, B) & Liberal(A) -> Liberal(B)" + sq + "\n";
    p += w + " : " + e + "(A, B) & Conservative(A) -> Conservative(B)" + sq + "\n";
  }
  return out;
}

}  // namespace psl
