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
#include <cstdint>
#include <string>
#include <vector>

namespace psl {

// Degree law for one relationship type: P(d = 0) = 1 - alpha and
// P(d = k) = alpha * k^-gamma / zeta_N(gamma) for 1 <= k < N.
struct EdgeTypeSpec {
  double gamma = 2.5;
  double alpha = 0.5;
  double weight = 0.5;  // propagation rule weight
};

struct SynthNetworkSpec {
  std::size_t users = 1000;  // target after isolated users are removed
  std::vector<EdgeTypeSpec> edge_types = default_edge_types();
  std::uint64_t seed = 0;
  double opinion_weight = 0.5;
  bool squared = false;

  // Six types with gamma 2.0, 2.2, ..., 3.0.
  static std::vector<EdgeTypeSpec> default_edge_types();
  // Throws Error for N < 2, gamma outside [2,3], alpha outside (0,1] or
  // negative weights.
  void validate() const;
};

struct SynthNetwork {
  std::string data;     // data-set text
  std::string program;  // opinion propagation rules
  std::size_t initial_users = 0;
  std::size_t users = 0;
  std::vector<std::size_t> edges;  // per edge type
};

SynthNetwork generate_network(const SynthNetworkSpec& spec);

}  // namespace psl
