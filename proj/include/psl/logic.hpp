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
#include <span>
#include <vector>

#include "psl/model.hpp"

namespace psl {

// Weighted disjunctive clause over Boolean (or [0,1]-valued) variables.
// A variable appears at most once, either as a positive or a negated literal.
struct Clause {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  double weight = 1.0;

  std::size_t size() const { return positive.size() + negative.size(); }
};

// Throws ModelError on overlapping literal sets, repeated variables or a
// negative weight.
void validate_clause(const Clause& clause);

enum class LukOp { kAnd, kOr, kNeg };

double luk_eval(LukOp op, std::span<const double> args);

// min{ sum_{I+} y + sum_{I-} (1 - y), 1 }
double clause_value(const Clause& clause, std::span<const double> y);

// l(y) = 1 - sum_{I+} y - sum_{I-} (1 - y), so max{l, 0} = 1 - clause_value.
LinearFunction clause_to_linfun(const Clause& clause);

// The empty clause can never be satisfied.
inline bool is_degenerate(const Clause& clause) { return clause.size() == 0; }

bool clause_satisfied(const Clause& clause, std::span<const int> assignment);
double boolean_score(std::span<const Clause> clauses, std::span<const int> assignment);

inline constexpr std::size_t kMaxBruteForceVariables = 20;

struct MaxSatSolution {
  std::vector<int> assignment;
  double score = 0.0;
};

// Exhaustive MAX SAT. Ties resolve to the lexicographically smallest
// assignment (variable 0 most significant).
MaxSatSolution maxsat_bruteforce(std::span<const Clause> clauses, std::size_t num_vars);

// Expected weighted satisfaction under independent rounding with P(x_i=1)=p_i.
double expected_score(std::span<const Clause> clauses, std::span<const double> probs);

// p_i = y_i / 2 + 1/4, the 3/4-approximation rounding function.
std::vector<double> rounding_probs(std::span<const double> relaxed);

// Method of conditional probabilities: fixes variables in ascending index
// order to whichever value gives the larger conditional expectation (ties to 0).
std::vector<int> derandomize(std::span<const Clause> clauses, std::span<const double> probs);

inline constexpr std::size_t kMaxLcrClauseLength = 4;

// Optimal value of the clause's local-consistency inner LP over joint-state
// pseudomarginals, solved exactly with the dense simplex. `mu` is indexed by
// variable like an assignment.
double lcr_inner_lp(const Clause& clause, std::span<const double> mu);

// Closed form of the inner LP: w * min{ sum_{I+} mu + sum_{I-} (1 - mu), 1 }.
double lcr_compact_value(const Clause& clause, std::span<const double> mu);

// Boolean potential over up to four variables. Bit j of a state index holds
// the value of vars[j].
struct BooleanPotentialTable {
  std::vector<std::size_t> vars;
  std::vector<double> scores;
};

struct TableClauses {
  std::vector<Clause> clauses;  // one per table entry, in state order
  double weight_shift = 0.0;    // added to every flipped weight
  // For every state x: sum of satisfied clause weights == score(x) + score_offset.
  double score_offset = 0.0;
};

TableClauses boolean_table_to_clauses(const BooleanPotentialTable& table);

}  // namespace psl
