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

#include <functional>
#include <vector>

#include "psl/learn.hpp"

namespace psl::detail {

// Fixed-step projected ascent with iterate averaging.
LearnResult averaged_ascent(std::vector<double> weights, std::size_t steps, double step_size,
                            const std::function<std::vector<double>(const std::vector<double>&)>& gradient);

std::vector<double> initial_weights(std::span<const TrainingInstance> instances);

// Sums per-instance gradients computed concurrently; the first exception is rethrown.
std::vector<double> sum_gradients(std::size_t instances, std::size_t templates,
                                  const std::function<std::vector<double>(std::size_t)>& gradient);

}  // namespace psl::detail
