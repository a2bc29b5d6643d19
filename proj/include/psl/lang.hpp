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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psl/error.hpp"

namespace psl {

enum class TermKind { kVariable, kConstant, kSumVariable };

struct Term {
  TermKind kind = TermKind::kVariable;
  std::string text;  // variable name without '+', or the unescaped constant

  friend bool operator==(const Term&, const Term&) = default;
};

// Predicate "!=" with two arguments is the functional inequality atom.
inline constexpr std::string_view kNotEqualPredicate = "!=";

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  SourceLocation loc;

  // Locations are ignored so reparsed programs compare equal.
  friend bool operator==(const Atom& a, const Atom& b) {
    return a.predicate == b.predicate && a.args == b.args;
  }
};

struct Formula {
  // kImplies holds {body, head}; kImpliedBy holds {head, body} as written.
  enum class Kind { kAtom, kNot, kAnd, kOr, kImplies, kImpliedBy };

  Kind kind = Kind::kAtom;
  Atom atom;
  std::vector<Formula> children;

  friend bool operator==(const Formula&, const Formula&) = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Coefficient {
  enum class Kind { kNumber, kCardinality, kCall, kNeg, kAdd, kSub, kMul, kDiv };

  Kind kind = Kind::kNumber;
  double value = 0.0;  // kNumber
  std::string name;    // sum variable for kCardinality, function for kCall
  std::vector<Coefficient> args;

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

// One term of a linear combination: [-] [coefficient] [atom]. At least one
// of coefficient and atom is present.
struct Summand {
  bool negated = false;
  std::optional<Coefficient> coeff;
  std::optional<Atom> atom;

  friend bool operator==(const Summand&, const Summand&) = default;
};

enum class Relation { kLessEq, kGreaterEq, kEqual };

struct SelectClause {
  std::string variable;
  Formula formula;
  SourceLocation loc;

  friend bool operator==(const SelectClause& a, const SelectClause& b) {
    return a.variable == b.variable && a.formula == b.formula;
  }
};

struct RuleAst {
  enum class Kind { kLogical, kArithmetic };

  Kind kind = Kind::kLogical;
  std::optional<double> weight;  // empty for hard rules
  bool squared = false;

  Formula formula;  // logical rules, as written

  std::vector<Summand> lhs;  // arithmetic rules
  std::vector<Summand> rhs;
  Relation relation = Relation::kLessEq;
  std::vector<SelectClause> selects;

  SourceLocation begin;
  SourceLocation end;

  bool hard() const { return !weight.has_value(); }

  friend bool operator==(const RuleAst& a, const RuleAst& b) {
    return a.kind == b.kind && a.weight == b.weight && a.squared == b.squared && a.formula == b.formula &&
           a.lhs == b.lhs && a.rhs == b.rhs && a.relation == b.relation && a.selects == b.selects;
  }
};

struct Program {
  std::vector<RuleAst> rules;

  friend bool operator==(const Program&, const Program&) = default;
};

// Throws ParseError on syntax errors and on rule-level semantic errors
// (negative weight, ^2 on a hard rule, duplicate or unknown sum variables,
// logical rules that are not a single disjunctive clause).
Program parse_program(std::string_view text);

// Rewrites a logical rule into a flat disjunction of literals. Arithmetic
// rules are returned unchanged.
RuleAst normalize_logical(const RuleAst& rule);

// Literals of a logical rule, normalizing first if needed.
std::vector<Literal> clause_literals(const RuleAst& rule);

std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const Formula& formula);
std::string to_string(const Coefficient& coeff);
std::string to_string(const RuleAst& rule);
std::string to_string(const Program& program);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

// Coefficient functions usable as @Name[...]. @Min and @Max are built in.
// Register extra functions before parsing or grounding; the registry is not
// synchronized.
using CoefficientFunction = std::function<double(std::span<const double>)>;
void register_coefficient_function(const std::string& name, CoefficientFunction fn);
const CoefficientFunction* find_coefficient_function(const std::string& name);

}  // namespace psl
