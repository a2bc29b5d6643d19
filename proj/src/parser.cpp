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
#include <cmath>
#include <map>
#include <set>

#include "lexer.hpp"
#include "psl/lang.hpp"

namespace psl {

namespace {

using detail::Tok;
using detail::Token;

bool later(const SourceLocation& a, const SourceLocation& b) {
  return a.line != b.line ? a.line > b.line : a.column > b.column;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(detail::tokenize(text)) {}

  Program run() {
    Program program;
    while (cur().kind != Tok::kEnd) {
      if (cur().kind == Tok::kLBrace) fail("select statement must follow an arithmetic rule");
      program.rules.push_back(parse_rule());
    }
    return program;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
  bool at(Tok kind) const { return cur().kind == kind; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(cur().loc, message); }

  const Token& expect(Tok kind, const char* what) {
    if (!at(kind)) fail(std::string("expected ") + what + ", found " + detail::describe(cur()));
    return advance();
  }

  bool at_atom_start() const { return at(Tok::kIdent) && ahead(1).kind == Tok::kLParen; }
  bool at_single_pipe() const { return at(Tok::kPipe) && cur().text == "|"; }
  bool at_weight_prefix() const {
    return (at(Tok::kNumber) && ahead(1).kind == Tok::kColon) ||
           (at(Tok::kMinus) && ahead(1).kind == Tok::kNumber && ahead(2).kind == Tok::kColon);
  }

  RuleAst parse_rule() {
    RuleAst rule;
    rule.begin = cur().loc;
    if (at(Tok::kMinus) && ahead(1).kind == Tok::kNumber && ahead(2).kind == Tok::kColon) {
      fail("rule weight must be nonnegative");
    }
    if (at(Tok::kNumber) && ahead(1).kind == Tok::kColon) {
      rule.weight = advance().number;
      advance();
      if (!std::isfinite(*rule.weight)) throw ParseError(rule.begin, "rule weight must be finite");
    }

    const std::size_t body = pos_;
    try {
      parse_arithmetic(rule);
    } catch (const ParseError& arith) {
      pos_ = body;
      rule.lhs.clear();
      rule.rhs.clear();
      try {
        rule.kind = RuleAst::Kind::kLogical;
        rule.formula = parse_implication();
      } catch (const ParseError& logic) {
        if (later(arith.location(), logic.location())) throw arith;
        throw;
      }
    }

    if (at(Tok::kCaret)) {
      const SourceLocation loc = cur().loc;
      advance();
      if (!at(Tok::kNumber) || cur().number != 2.0) fail("only the exponent ^2 is supported");
      advance();
      if (rule.hard()) throw ParseError(loc, "a hard rule cannot be squared");
      rule.squared = true;
    }
    if (at(Tok::kDot)) {
      if (!rule.hard()) fail("a weighted rule cannot end with '.'");
      advance();
    } else if (rule.hard()) {
      fail("expected '.' after an unweighted rule, found " + detail::describe(cur()));
    }
    rule.end = toks_[pos_ - 1].loc;

    while (at(Tok::kLBrace)) {
      if (rule.kind != RuleAst::Kind::kArithmetic) fail("select statements only apply to arithmetic rules");
      rule.selects.push_back(parse_select());
    }
    validate(rule);
    return rule;
  }

  void parse_arithmetic(RuleAst& rule) {
    rule.lhs = parse_sum();
    switch (cur().kind) {
      case Tok::kLessEq:
        rule.relation = Relation::kLessEq;
        break;
      case Tok::kGreaterEq:
        rule.relation = Relation::kGreaterEq;
        break;
      case Tok::kEq:
        rule.relation = Relation::kEqual;
        break;
      default:
        fail("expected '<=', '>=' or '=', found " + detail::describe(cur()));
    }
    advance();
    rule.rhs = parse_sum();
    rule.kind = RuleAst::Kind::kArithmetic;
  }

  std::vector<Summand> parse_sum() {
    std::vector<Summand> out;
    bool negated = false;
    if (at(Tok::kMinus)) {
      negated = true;
      advance();
    } else if (at(Tok::kPlus)) {
      advance();
    }
    out.push_back(parse_summand(negated));
    while ((at(Tok::kPlus) || at(Tok::kMinus)) && !at_weight_prefix()) {
      negated = at(Tok::kMinus);
      advance();
      out.push_back(parse_summand(negated));
    }
    return out;
  }

  Summand parse_summand(bool negated) {
    Summand s;
    s.negated = negated;
    if (at_atom_start()) {
      s.atom = parse_atom(true);
      return s;
    }
    s.coeff = parse_product();
    if (at(Tok::kStar)) {
      advance();
      if (!at_atom_start()) fail("expected an atom after '*'");
      s.atom = parse_atom(true);
    } else if (at_atom_start() && !cur().line_start) {
      s.atom = parse_atom(true);
    }
    return s;
  }

  static Coefficient binary(Coefficient::Kind kind, Coefficient lhs, Coefficient rhs) {
    Coefficient c;
    c.kind = kind;
    c.args.push_back(std::move(lhs));
    c.args.push_back(std::move(rhs));
    return c;
  }

  // Stops in front of `* Atom(...)`, which multiplies the summand's atom.
  Coefficient parse_product() {
    Coefficient c = parse_factor();
    for (;;) {
      if (at(Tok::kStar) && !(ahead(1).kind == Tok::kIdent && ahead(2).kind == Tok::kLParen)) {
        advance();
        c = binary(Coefficient::Kind::kMul, std::move(c), parse_factor());
      } else if (at(Tok::kSlash)) {
        advance();
        c = binary(Coefficient::Kind::kDiv, std::move(c), parse_factor());
      } else {
        return c;
      }
    }
  }

  // Juxtaposed cardinalities, calls and parenthesized terms multiply, and
  // bind tighter than '*' and '/': `1 / |A| |B|` divides by the product.
  Coefficient parse_factor() {
    Coefficient c = parse_primary();
    while (!cur().line_start && (at_single_pipe() || at(Tok::kAt) || at(Tok::kLParen))) {
      c = binary(Coefficient::Kind::kMul, std::move(c), parse_primary());
    }
    return c;
  }

  Coefficient parse_primary() {
    Coefficient c;
    if (at(Tok::kNumber)) {
      c.kind = Coefficient::Kind::kNumber;
      c.value = advance().number;
    } else if (at_single_pipe()) {
      advance();
      c.kind = Coefficient::Kind::kCardinality;
      c.name = expect(Tok::kIdent, "a sum variable").text;
      if (!at_single_pipe()) fail("expected '|' closing the cardinality");
      advance();
    } else if (at(Tok::kAt)) {
      advance();
      c.kind = Coefficient::Kind::kCall;
      const Token& name = expect(Tok::kIdent, "a function name after '@'");
      c.name = name.text;
      if (find_coefficient_function(c.name) == nullptr) {
        throw ParseError(name.loc, "unknown coefficient function @" + c.name);
      }
      expect(Tok::kLBracket, "'['");
      c.args.push_back(parse_coef_expr());
      while (at(Tok::kComma)) {
        advance();
        c.args.push_back(parse_coef_expr());
      }
      expect(Tok::kRBracket, "']'");
    } else if (at(Tok::kLParen)) {
      advance();
      c = parse_coef_expr();
      expect(Tok::kRParen, "')'");
    } else {
      fail("expected a coefficient or an atom, found " + detail::describe(cur()));
    }
    return c;
  }

  Coefficient parse_coef_expr() {
    Coefficient c;
    if (at(Tok::kMinus)) {
      advance();
      c.kind = Coefficient::Kind::kNeg;
      c.args.push_back(parse_product());
    } else {
      c = parse_product();
    }
    while (at(Tok::kPlus) || at(Tok::kMinus)) {
      const auto kind = at(Tok::kPlus) ? Coefficient::Kind::kAdd : Coefficient::Kind::kSub;
      advance();
      c = binary(kind, std::move(c), parse_product());
    }
    return c;
  }

  Term parse_term(bool allow_sum) {
    Term t;
    if (at(Tok::kPlus)) {
      if (!allow_sum) fail("sum variables are only allowed in arithmetic rules");
      advance();
      t.kind = TermKind::kSumVariable;
      t.text = expect(Tok::kIdent, "a sum variable name after '+'").text;
    } else if (at(Tok::kIdent)) {
      t.kind = TermKind::kVariable;
      t.text = advance().text;
    } else if (at(Tok::kString)) {
      t.kind = TermKind::kConstant;
      t.text = advance().text;
    } else {
      fail("expected a variable or constant, found " + detail::describe(cur()));
    }
    return t;
  }

  Atom parse_atom(bool allow_sum) {
    Atom a;
    a.loc = cur().loc;
    a.predicate = expect(Tok::kIdent, "a predicate name").text;
    expect(Tok::kLParen, "'('");
    a.args.push_back(parse_term(allow_sum));
    while (at(Tok::kComma)) {
      advance();
      a.args.push_back(parse_term(allow_sum));
    }
    expect(Tok::kRParen, "')'");
    return a;
  }

  Formula parse_implication() {
    Formula lhs = parse_disjunction();
    if (!at(Tok::kImplies) && !at(Tok::kImpliedBy)) return lhs;
    Formula f;
    f.kind = at(Tok::kImplies) ? Formula::Kind::kImplies : Formula::Kind::kImpliedBy;
    advance();
    f.children.push_back(std::move(lhs));
    f.children.push_back(parse_disjunction());
    if (at(Tok::kImplies) || at(Tok::kImpliedBy)) fail("implications cannot be chained without parentheses");
    return f;
  }

  Formula parse_disjunction() {
    Formula first = parse_conjunction();
    if (!at(Tok::kPipe)) return first;
    Formula f;
    f.kind = Formula::Kind::kOr;
    append_flat(f, std::move(first));
    while (at(Tok::kPipe)) {
      advance();
      append_flat(f, parse_conjunction());
    }
    return f;
  }

  Formula parse_conjunction() {
    Formula first = parse_unary();
    if (!at(Tok::kAmp)) return first;
    Formula f;
    f.kind = Formula::Kind::kAnd;
    append_flat(f, std::move(first));
    while (at(Tok::kAmp)) {
      advance();
      append_flat(f, parse_unary());
    }
    return f;
  }

  static void append_flat(Formula& parent, Formula child) {
    if (child.kind == parent.kind) {
      for (auto& c : child.children) parent.children.push_back(std::move(c));
    } else {
      parent.children.push_back(std::move(child));
    }
  }

  Formula parse_unary() {
    Formula f;
    if (at(Tok::kBang)) {
      advance();
      f.kind = Formula::Kind::kNot;
      f.children.push_back(parse_unary());
      return f;
    }
    if (at(Tok::kLParen)) {
      advance();
      f = parse_implication();
      expect(Tok::kRParen, "')'");
      return f;
    }
    f.kind = Formula::Kind::kAtom;
    if (at_atom_start()) {
      f.atom = parse_atom(false);
    } else if ((at(Tok::kIdent) || at(Tok::kString)) && ahead(1).kind == Tok::kNotEq) {
      f.atom.loc = cur().loc;
      f.atom.predicate = std::string(kNotEqualPredicate);
      f.atom.args.push_back(parse_term(false));
      advance();
      f.atom.args.push_back(parse_term(false));
    } else {
      fail("expected an atom, found " + detail::describe(cur()));
    }
    return f;
  }

  SelectClause parse_select() {
    SelectClause s;
    s.loc = cur().loc;
    expect(Tok::kLBrace, "'{'");
    s.variable = expect(Tok::kIdent, "a sum variable").text;
    expect(Tok::kColon, "':'");
    s.formula = parse_implication();
    expect(Tok::kRBrace, "'}'");
    return s;
  }

  void validate(const RuleAst& rule) const {
    if (rule.kind == RuleAst::Kind::kLogical) {
      normalize_logical(rule);
      return;
    }
    std::set<std::string> sum_vars;
    std::set<std::string> plain_vars;
    auto scan_atoms = [&](const std::vector<Summand>& side) {
      for (const auto& s : side) {
        if (!s.atom) continue;
        for (const auto& t : s.atom->args) {
          if (t.kind == TermKind::kSumVariable) {
            if (!sum_vars.insert(t.text).second) {
              throw ParseError(s.atom->loc, "sum variable +" + t.text + " is used more than once");
            }
          } else if (t.kind == TermKind::kVariable) {
            plain_vars.insert(t.text);
          }
        }
      }
    };
    scan_atoms(rule.lhs);
    scan_atoms(rule.rhs);
    for (const auto& v : sum_vars) {
      if (plain_vars.contains(v)) {
        throw ParseError(rule.begin, "variable " + v + " is used both as a sum variable and a regular variable");
      }
    }
    auto check_coeff = [&](auto&& self, const Coefficient& c) -> void {
      if (c.kind == Coefficient::Kind::kCardinality && !sum_vars.contains(c.name)) {
        throw ParseError(rule.begin, "|" + c.name + "| does not name a sum variable of this rule");
      }
      for (const auto& a : c.args) self(self, a);
    };
    for (const auto* side : {&rule.lhs, &rule.rhs}) {
      for (const auto& s : *side) {
        if (s.coeff) check_coeff(check_coeff, *s.coeff);
      }
    }
    std::set<std::string> selected;
    for (const auto& sel : rule.selects) {
      if (!sum_vars.contains(sel.variable)) {
        throw ParseError(sel.loc, "select statement for unknown sum variable " + sel.variable);
      }
      if (!selected.insert(sel.variable).second) {
        throw ParseError(sel.loc, "more than one select statement for sum variable " + sel.variable);
      }
      check_select_terms(sel, sel.formula, sum_vars, plain_vars);
    }
  }

  static void check_select_terms(const SelectClause& sel, const Formula& f, const std::set<std::string>& sum_vars,
                                 const std::set<std::string>& plain_vars) {
    if (f.kind != Formula::Kind::kAtom) {
      for (const auto& c : f.children) check_select_terms(sel, c, sum_vars, plain_vars);
      return;
    }
    for (const auto& t : f.atom.args) {
      if (t.kind != TermKind::kVariable || t.text == sel.variable) continue;
      if (sum_vars.contains(t.text)) {
        throw ParseError(f.atom.loc, "select statement for " + sel.variable + " refers to another sum variable " +
                                         t.text);
      }
      if (!plain_vars.contains(t.text)) {
        throw ParseError(f.atom.loc, "select statement refers to variable " + t.text + " not bound by its rule");
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Formula literal(const Formula& atom, bool negated) {
  if (!negated) return atom;
  Formula f;
  f.kind = Formula::Kind::kNot;
  f.children.push_back(atom);
  return f;
}

// Negation normal form; flattens nested disjunctions and conjunctions.
Formula nnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  Formula out;
  auto collect = [&](K kind, std::initializer_list<std::pair<const Formula*, bool>> parts) {
    out.kind = kind;
    for (const auto& [child, neg] : parts) {
      Formula c = nnf(*child, neg);
      if (c.kind == kind) {
        for (auto& g : c.children) out.children.push_back(std::move(g));
      } else {
        out.children.push_back(std::move(c));
      }
    }
  };
  switch (f.kind) {
    case K::kAtom:
      return literal(f, negate);
    case K::kNot:
      return nnf(f.children[0], !negate);
    case K::kAnd:
    case K::kOr: {
      const bool is_or = (f.kind == K::kOr) != negate;
      out.kind = is_or ? K::kOr : K::kAnd;
      for (const auto& child : f.children) {
        Formula c = nnf(child, negate);
        if (c.kind == out.kind) {
          for (auto& g : c.children) out.children.push_back(std::move(g));
        } else {
          out.children.push_back(std::move(c));
        }
      }
      return out;
    }
    case K::kImplies:
      if (negate) {
        collect(K::kAnd, {{&f.children[0], false}, {&f.children[1], true}});
      } else {
        collect(K::kOr, {{&f.children[0], true}, {&f.children[1], false}});
      }
      return out;
    case K::kImpliedBy:
      if (negate) {
        collect(K::kAnd, {{&f.children[0], true}, {&f.children[1], false}});
      } else {
        collect(K::kOr, {{&f.children[0], false}, {&f.children[1], true}});
      }
      return out;
  }
  return out;
}

bool is_literal(const Formula& f) {
  return f.kind == Formula::Kind::kAtom ||
         (f.kind == Formula::Kind::kNot && f.children[0].kind == Formula::Kind::kAtom);
}

std::map<std::string, CoefficientFunction>& registry() {
  static std::map<std::string, CoefficientFunction> functions = [] {
    std::map<std::string, CoefficientFunction> m;
    m["Min"] = [](std::span<const double> a) {
      if (a.empty()) throw Error("@Min needs at least one argument");
      return *std::min_element(a.begin(), a.end());
    };
    m["Max"] = [](std::span<const double> a) {
      if (a.empty()) throw Error("@Max needs at least one argument");
      return *std::max_element(a.begin(), a.end());
    };
    return m;
  }();
  return functions;
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

RuleAst normalize_logical(const RuleAst& rule) {
  if (rule.kind != RuleAst::Kind::kLogical) return rule;
  Formula f = nnf(rule.formula, false);
  if (f.kind == Formula::Kind::kOr) {
    for (const auto& c : f.children) {
      if (!is_literal(c)) {
        throw ParseError(rule.begin,
                         "logical rule is not a single disjunctive clause (conjunction in the head or "
                         "disjunction in the body)");
      }
    }
  } else if (!is_literal(f)) {
    throw ParseError(rule.begin,
                     "logical rule is not a single disjunctive clause (conjunction in the head or "
                     "disjunction in the body)");
  }
  RuleAst out = rule;
  out.formula = std::move(f);
  return out;
}

std::vector<Literal> clause_literals(const RuleAst& rule) {
  if (rule.kind != RuleAst::Kind::kLogical) throw Error("clause_literals needs a logical rule");
  const RuleAst norm = normalize_logical(rule);
  std::vector<Literal> out;
  auto add = [&](const Formula& f) {
    if (f.kind == Formula::Kind::kAtom) {
      out.push_back({f.atom, false});
    } else {
      out.push_back({f.children[0].atom, true});
    }
  };
  if (norm.formula.kind == Formula::Kind::kOr) {
    for (const auto& c : norm.formula.children) add(c);
  } else {
    add(norm.formula);
  }
  return out;
}

void register_coefficient_function(const std::string& name, CoefficientFunction fn) {
  registry()[name] = std::move(fn);
}

const CoefficientFunction* find_coefficient_function(const std::string& name) {
  auto& r = registry();
  auto it = r.find(name);
  return it == r.end() ? nullptr : &it->second;
}

}  // namespace psl
