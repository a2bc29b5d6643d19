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

#include "psl/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "psl/error.hpp"

namespace psl {

namespace {

constexpr double kEps = 1e-11;

class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& a, std::span<const double> b, std::size_t num_vars)
      : rows_(a.size()), vars_(num_vars), cols_(num_vars + a.size()),
        t_(rows_, std::vector<double>(cols_ + 1, 0.0)), basis_(rows_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < vars_; ++j) t_[i][j] = sign * a[i][j];
      t_[i][vars_ + i] = 1.0;
      t_[i][cols_] = sign * b[i];
      basis_[i] = vars_ + i;
    }
  }

  // Runs Bland-rule pivots for the given column costs; columns at or beyond
  // `enter_limit` never enter the basis. Returns false if unbounded.
  bool optimize(const std::vector<double>& cost, std::size_t enter_limit) {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        if (reduced_cost(cost, j) > kEps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        if (t_[i][enter] <= kEps) continue;
        const double ratio = t_[i][cols_] / t_[i][enter];
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) v += cost[basis_[i]] * t_[i][cols_];
    return v;
  }

  // Pivots remaining artificial columns out of the basis where possible. A row
  // whose original entries are all zero is redundant and keeps its artificial.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) continue;
      for (std::size_t j = 0; j < vars_; ++j) {
        if (std::abs(t_[i][j]) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> solution() const {
    std::vector<double> x(vars_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) x[basis_[i]] = t_[i][cols_];
    }
    return x;
  }

  std::size_t columns() const { return cols_; }

 private:
  double reduced_cost(const std::vector<double>& cost, std::size_t j) const {
    double r = cost[j];
    for (std::size_t i = 0; i < rows_; ++i) r -= cost[basis_[i]] * t_[i][j];
    return r;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const double f = t_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  std::size_t rows_;
  std::size_t vars_;
  std::size_t cols_;
  std::vector<std::vector<double>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult maximize_standard_form(const std::vector<std::vector<double>>& a, std::span<const double> b,
                                std::span<const double> c) {
  if (a.size() != b.size()) throw DimensionError("LP row count does not match right-hand side");
  for (const auto& row : a) {
    if (row.size() != c.size()) throw DimensionError("LP row width does not match cost vector");
  }
  Tableau tab(a, b, c.size());

  std::vector<double> phase1(tab.columns(), 0.0);
  for (std::size_t j = c.size(); j < tab.columns(); ++j) phase1[j] = -1.0;
  tab.optimize(phase1, tab.columns());
  LpResult result;
  if (tab.objective(phase1) < -1e-9) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  tab.expel_artificials();

  std::vector<double> phase2(tab.columns(), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) phase2[j] = c[j];
  if (!tab.optimize(phase2, c.size())) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  result.status = LpStatus::kOptimal;
  result.x = tab.solution();
  result.objective = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace psl
