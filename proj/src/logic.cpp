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

#include "psl/logic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>

#include "psl/error.hpp"
#include "psl/simplex.hpp"

namespace psl {

namespace {

void check_index(std::size_t var, std::size_t size) {
  if (var >= size) {
    throw DimensionError("clause references variable " + std::to_string(var) + " but only " +
                         std::to_string(size) + " values were given");
  }
}

double literal_sum(const Clause& clause, std::span<const double> y) {
  double s = 0.0;
  for (auto i : clause.positive) {
    check_index(i, y.size());
    s += y[i];
  }
  for (auto i : clause.negative) {
    check_index(i, y.size());
    s += 1.0 - y[i];
  }
  return s;
}

// Probability that every literal of the clause is false.
double falsified_probability(const Clause& clause, std::span<const double> p) {
  double prod = 1.0;
  for (auto i : clause.positive) prod *= 1.0 - p[i];
  for (auto i : clause.negative) prod *= p[i];
  return prod;
}

void check_probs(std::span<const double> probs) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DimensionError("probabilities must lie in [0,1]");
  }
}

}  // namespace

void validate_clause(const Clause& clause) {
  if (!(clause.weight >= 0.0)) throw ModelError("clause weight must be nonnegative");
  std::set<std::size_t> seen;
  for (auto i : clause.positive) {
    if (!seen.insert(i).second) throw ModelError("variable " + std::to_string(i) + " repeated in clause");
  }
  for (auto i : clause.negative) {
    if (!seen.insert(i).second) throw ModelError("variable " + std::to_string(i) + " repeated in clause");
  }
}

double luk_eval(LukOp op, std::span<const double> args) {
  const std::size_t arity = op == LukOp::kNeg ? 1 : 2;
  if (args.size() != arity) {
    throw Error("Lukasiewicz operator expects " + std::to_string(arity) + " argument(s), got " +
                std::to_string(args.size()));
  }
  for (double a : args) {
    if (!(a >= 0.0 && a <= 1.0)) throw Error("Lukasiewicz arguments must lie in [0,1]");
  }
  switch (op) {
    case LukOp::kAnd:
      return std::max(args[0] + args[1] - 1.0, 0.0);
    case LukOp::kOr:
      return std::min(args[0] + args[1], 1.0);
    case LukOp::kNeg:
      return 1.0 - args[0];
  }
  return 0.0;
}

double clause_value(const Clause& clause, std::span<const double> y) {
  return std::min(literal_sum(clause, y), 1.0);
}

LinearFunction clause_to_linfun(const Clause& clause) {
  LinearFunction fn(1.0 - static_cast<double>(clause.negative.size()));
  for (auto i : clause.positive) fn.add_term(i, -1.0);
  for (auto i : clause.negative) fn.add_term(i, 1.0);
  return fn;
}

bool clause_satisfied(const Clause& clause, std::span<const int> assignment) {
  for (auto i : clause.positive) {
    check_index(i, assignment.size());
    if (assignment[i] != 0) return true;
  }
  for (auto i : clause.negative) {
    check_index(i, assignment.size());
    if (assignment[i] == 0) return true;
  }
  return false;
}

double boolean_score(std::span<const Clause> clauses, std::span<const int> assignment) {
  double s = 0.0;
  for (const auto& c : clauses) {
    if (clause_satisfied(c, assignment)) s += c.weight;
  }
  return s;
}

MaxSatSolution maxsat_bruteforce(std::span<const Clause> clauses, std::size_t num_vars) {
  if (num_vars > kMaxBruteForceVariables) {
    throw Error("brute-force MAX SAT is limited to " + std::to_string(kMaxBruteForceVariables) +
                " variables, got " + std::to_string(num_vars));
  }
  // Variable i lives in bit (n-1-i) so counting upward visits assignments in
  // lexicographic order.
  struct Masks {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;
    double weight = 0.0;
  };
  std::vector<Masks> masks;
  masks.reserve(clauses.size());
  for (const auto& c : clauses) {
    validate_clause(c);
    Masks m{0, 0, c.weight};
    for (auto i : c.positive) {
      check_index(i, num_vars);
      m.pos |= 1u << (num_vars - 1 - i);
    }
    for (auto i : c.negative) {
      check_index(i, num_vars);
      m.neg |= 1u << (num_vars - 1 - i);
    }
    masks.push_back(m);
  }

  const std::uint32_t states = 1u << num_vars;
  std::uint32_t best_state = 0;
  double best = -1.0;
  for (std::uint32_t s = 0; s < states; ++s) {
    double score = 0.0;
    for (const auto& m : masks) {
      if ((s & m.pos) != 0 || (~s & m.neg) != 0) score += m.weight;
    }
    if (score > best) {
      best = score;
      best_state = s;
    }
  }
  MaxSatSolution out;
  out.score = best;
  out.assignment.resize(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) out.assignment[i] = (best_state >> (num_vars - 1 - i)) & 1u;
  return out;
}

double expected_score(std::span<const Clause> clauses, std::span<const double> probs) {
  check_probs(probs);
  double total = 0.0;
  for (const auto& c : clauses) {
    for (auto i : c.positive) check_index(i, probs.size());
    for (auto i : c.negative) check_index(i, probs.size());
    total += c.weight * (1.0 - falsified_probability(c, probs));
  }
  return total;
}

std::vector<double> rounding_probs(std::span<const double> relaxed) {
  std::vector<double> p;
  p.reserve(relaxed.size());
  for (double y : relaxed) {
    if (!(y >= 0.0 && y <= 1.0)) throw DimensionError("relaxed values must lie in [0,1]");
    p.push_back(0.5 * y + 0.25);
  }
  return p;
}

std::vector<int> derandomize(std::span<const Clause> clauses, std::span<const double> probs) {
  check_probs(probs);
  const std::size_t n = probs.size();
  std::vector<std::vector<std::size_t>> occurs(n);
  for (std::size_t j = 0; j < clauses.size(); ++j) {
    for (auto i : clauses[j].positive) {
      check_index(i, n);
      occurs[i].push_back(j);
    }
    for (auto i : clauses[j].negative) {
      check_index(i, n);
      occurs[i].push_back(j);
    }
  }

  std::vector<double> p(probs.begin(), probs.end());
  std::vector<int> assignment(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double expect[2] = {0.0, 0.0};
    for (int value = 0; value < 2; ++value) {
      p[i] = value;
      for (auto j : occurs[i]) {
        expect[value] += clauses[j].weight * (1.0 - falsified_probability(clauses[j], p));
      }
    }
    assignment[i] = expect[1] > expect[0] ? 1 : 0;
    p[i] = assignment[i];
  }
  return assignment;
}

double lcr_inner_lp(const Clause& clause, std::span<const double> mu) {
  validate_clause(clause);
  const std::size_t k = clause.size();
  if (k > kMaxLcrClauseLength) {
    throw Error("inner LP supports clauses of at most " + std::to_string(kMaxLcrClauseLength) + " literals");
  }
  if (clause.weight == 0.0) return 0.0;

  // Literal t < |I+| is positive. Bit t of a joint state is that variable's value.
  std::vector<std::size_t> vars(clause.positive);
  vars.insert(vars.end(), clause.negative.begin(), clause.negative.end());
  for (auto v : vars) {
    check_index(v, mu.size());
    if (!(mu[v] >= 0.0 && mu[v] <= 1.0)) throw DimensionError("pseudomarginals must lie in [0,1]");
  }
  const std::size_t states = std::size_t{1} << k;
  std::size_t false_state = 0;
  for (std::size_t t = clause.positive.size(); t < k; ++t) false_state |= std::size_t{1} << t;

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t t = 0; t < k; ++t) {
    const bool positive = t < clause.positive.size();
    std::vector<double> row(states, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      const bool bit = (s >> t) & 1u;
      if (bit == positive) row[s] = 1.0;
    }
    a.push_back(std::move(row));
    b.push_back(positive ? mu[vars[t]] : 1.0 - mu[vars[t]]);
  }
  a.emplace_back(states, 1.0);
  b.push_back(1.0);

  std::vector<double> cost(states, clause.weight);
  cost[false_state] = 0.0;
  const LpResult lp = maximize_standard_form(a, b, cost);
  if (lp.status != LpStatus::kOptimal) {
    throw Error("local-consistency inner LP unexpectedly not optimal");
  }
  return lp.objective;
}

double lcr_compact_value(const Clause& clause, std::span<const double> mu) {
  return clause.weight * std::min(literal_sum(clause, mu), 1.0);
}

TableClauses boolean_table_to_clauses(const BooleanPotentialTable& table) {
  const std::size_t k = table.vars.size();
  if (k > kMaxLcrClauseLength) throw Error("Boolean tables are limited to 4 variables");
  const std::size_t states = std::size_t{1} << k;
  if (table.scores.size() != states) {
    throw DimensionError("table over " + std::to_string(k) + " variables needs " + std::to_string(states) +
                         " entries");
  }
  if (std::set<std::size_t>(table.vars.begin(), table.vars.end()).size() != k) {
    throw ModelError("Boolean table variables must be distinct");
  }

  // Entry (state s, score v) is the conjunction "x == s" with weight v. Its
  // flip is the disjunction "some x_j != s_j" with weight -v; the two differ by
  // the constant v, so the sum over all entries is score(x) - sum(v).
  TableClauses out;
  double total = 0.0;
  double max_score = 0.0;
  for (double v : table.scores) {
    total += v;
    max_score = std::max(max_score, v);
  }
  out.weight_shift = max_score;
  for (std::size_t s = 0; s < states; ++s) {
    Clause c;
    for (std::size_t j = 0; j < k; ++j) {
      if ((s >> j) & 1u) {
        c.negative.push_back(table.vars[j]);
      } else {
        c.positive.push_back(table.vars[j]);
      }
    }
    c.weight = out.weight_shift - table.scores[s];
    out.clauses.push_back(std::move(c));
  }
  // Exactly 2^k - 1 of the disjunctions hold in any state.
  out.score_offset = static_cast<double>(states - 1) * out.weight_shift - total;
  return out;
}

}  // namespace psl
