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

#include <charconv>

#include "psl/lang.hpp"

namespace psl {

namespace {

int precedence(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::kImplies:
    case Formula::Kind::kImpliedBy:
      return 0;
    case Formula::Kind::kOr:
      return 1;
    case Formula::Kind::kAnd:
      return 2;
    default:
      return 3;
  }
}

std::string wrapped(const Formula& f, bool parens) {
  return parens ? "(" + to_string(f) + ")" : to_string(f);
}

bool is_compound(const Coefficient& c) {
  switch (c.kind) {
    case Coefficient::Kind::kNeg:
    case Coefficient::Kind::kAdd:
    case Coefficient::Kind::kSub:
    case Coefficient::Kind::kMul:
    case Coefficient::Kind::kDiv:
      return true;
    default:
      return false;
  }
}

std::string operand(const Coefficient& c) {
  return is_compound(c) ? "(" + to_string(c) + ")" : to_string(c);
}

std::string summands(const std::vector<Summand>& side) {
  std::string out;
  for (std::size_t i = 0; i < side.size(); ++i) {
    const Summand& s = side[i];
    if (i == 0) {
      if (s.negated) out += "-";
    } else {
      out += s.negated ? " - " : " + ";
    }
    if (s.coeff) {
      const auto k = s.coeff->kind;
      const bool additive =
          k == Coefficient::Kind::kAdd || k == Coefficient::Kind::kSub || k == Coefficient::Kind::kNeg;
      out += additive ? "(" + to_string(*s.coeff) + ")" : to_string(*s.coeff);
      if (s.atom) out += " ";
    }
    if (s.atom) out += to_string(*s.atom);
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string to_string(const Term& term) {
  switch (term.kind) {
    case TermKind::kVariable:
      return term.text;
    case TermKind::kSumVariable:
      return "+" + term.text;
    case TermKind::kConstant:
      break;
  }
  std::string out = "\"";
  for (char c : term.text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string to_string(const Atom& atom) {
  if (atom.predicate == kNotEqualPredicate && atom.args.size() == 2) {
    return to_string(atom.args[0]) + " != " + to_string(atom.args[1]);
  }
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(atom.args[i]);
  }
  return out + ")";
}

std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::kAtom:
      return to_string(f.atom);
    case K::kNot:
      return "!" + wrapped(f.children[0], precedence(f.children[0]) < 3);
    case K::kAnd:
    case K::kOr: {
      const int p = precedence(f);
      const char* op = f.kind == K::kAnd ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i > 0) out += op;
        out += wrapped(f.children[i], precedence(f.children[i]) <= p);
      }
      return out;
    }
    case K::kImplies:
    case K::kImpliedBy: {
      const char* op = f.kind == K::kImplies ? " -> " : " <- ";
      return wrapped(f.children[0], precedence(f.children[0]) == 0) + op +
             wrapped(f.children[1], precedence(f.children[1]) == 0);
    }
  }
  return {};
}

std::string to_string(const Coefficient& c) {
  using K = Coefficient::Kind;
  switch (c.kind) {
    case K::kNumber:
      return format_number(c.value);
    case K::kCardinality:
      return "|" + c.name + "|";
    case K::kCall: {
      std::string out = "@" + c.name + "[";
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i > 0) out += ", ";
        out += to_string(c.args[i]);
      }
      return out + "]";
    }
    case K::kNeg:
      return "-" + operand(c.args[0]);
    case K::kAdd:
      return operand(c.args[0]) + " + " + operand(c.args[1]);
    case K::kSub:
      return operand(c.args[0]) + " - " + operand(c.args[1]);
    case K::kMul:
      return operand(c.args[0]) + " * " + operand(c.args[1]);
    case K::kDiv:
      return operand(c.args[0]) + " / " + operand(c.args[1]);
  }
  return {};
}

std::string to_string(const RuleAst& rule) {
  std::string out;
  if (rule.weight) out += format_number(*rule.weight) + " : ";
  if (rule.kind == RuleAst::Kind::kLogical) {
    out += to_string(rule.formula);
  } else {
    static const char* const ops[] = {" <= ", " >= ", " = "};
    out += summands(rule.lhs) + ops[static_cast<int>(rule.relation)] + summands(rule.rhs);
  }
  if (rule.squared) out += " ^2";
  if (rule.hard()) out += " .";
  for (const auto& s : rule.selects) out += " {" + s.variable + " : " + to_string(s.formula) + "}";
  return out;
}

std::string to_string(const Program& program) {
  std::string out;
  for (const auto& r : program.rules) out += to_string(r) + "\n";
  return out;
}

}  // namespace psl
