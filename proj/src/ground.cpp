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
#include <omp.h>

#include "psl/error.hpp"
#include "psl/ground.hpp"

namespace psl {

namespace {

std::string located(const SourceLocation& loc, const std::string& message) {
  return "line " + to_string(loc) + ": " + message;
}

struct ArgSpec {
  enum Kind { kVar, kSum, kConst } kind = kConst;
  std::size_t index = 0;  // rule variable or sum variable
  std::string constant;
};

struct CompiledAtom {
  std::string predicate;
  std::vector<ArgSpec> args;
  const PredicateDef* def = nullptr;  // null for functional predicates
  SourceLocation loc;
  bool negated = false;
};

// Upper bound of the function over the unit box.
double box_max(const LinearFunction& fn) {
  double v = fn.constant();
  for (const auto& t : fn.terms()) v += std::max(t.coeff, 0.0);
  return v;
}

std::vector<std::string> intersect(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Shared by logical and arithmetic grounding: variable bookkeeping, atom
// compilation against the data set, and value lookup.
class RuleGrounder {
 public:
  RuleGrounder(const RuleAst& rule, std::size_t rule_index, const DataSet& data, const VariableTable& vars,
               const GroundOptions& options)
      : rule_(rule), rule_index_(rule_index), data_(data), vars_(vars), options_(options) {}

 protected:
  std::size_t var_id(const std::string& name) {
    auto [it, fresh] = var_ids_.try_emplace(name, var_names_.size());
    if (fresh) {
      var_names_.push_back(name);
      domains_.emplace_back();
      has_domain_.push_back(false);
    }
    return it->second;
  }

  void restrict_domain(std::size_t var, const std::vector<std::string>& consts) {
    if (!has_domain_[var]) {
      domains_[var] = consts;
      has_domain_[var] = true;
    } else {
      domains_[var] = intersect(domains_[var], consts);
    }
  }

  // Resolves the predicate and its argument types. `sum_ids` maps sum variable
  // names for arithmetic rules.
  bool compile(const Atom& atom, bool negated, const std::map<std::string, std::size_t>& sum_ids,
               std::vector<std::vector<std::string>>* sum_domains, bool typed, CompiledAtom& out) {
    out.predicate = atom.predicate;
    out.loc = atom.loc;
    out.negated = negated;
    const bool functional = data_.is_functional(atom.predicate);
    if (functional) {
      if (data_.functional_arity(atom.predicate) != atom.args.size()) {
        errors_.push_back(located(atom.loc, "functional predicate " + atom.predicate + " takes " +
                                                std::to_string(data_.functional_arity(atom.predicate)) + " arguments"));
        return false;
      }
    } else {
      out.def = data_.predicate(atom.predicate);
      if (out.def == nullptr) {
        errors_.push_back(located(atom.loc, "undeclared predicate " + atom.predicate));
        return false;
      }
      if (out.def->arg_types.size() != atom.args.size()) {
        errors_.push_back(located(atom.loc, atom.predicate + " takes " + std::to_string(out.def->arg_types.size()) +
                                                " arguments, got " + std::to_string(atom.args.size())));
        return false;
      }
    }
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      const Term& t = atom.args[i];
      ArgSpec spec;
      const std::vector<std::string>* consts = functional ? nullptr : data_.constants(out.def->arg_types[i]);
      if (t.kind == TermKind::kConstant) {
        spec.kind = ArgSpec::kConst;
        spec.constant = t.text;
        if (consts && !std::binary_search(consts->begin(), consts->end(), t.text)) {
          errors_.push_back(located(atom.loc, "constant \"" + t.text + "\" is not of type " + out.def->arg_types[i]));
          return false;
        }
      } else if (t.kind == TermKind::kSumVariable || sum_ids.contains(t.text)) {
        spec.kind = ArgSpec::kSum;
        spec.index = sum_ids.at(t.text);
        if (consts && typed && sum_domains) {
          auto& d = (*sum_domains)[spec.index];
          d = d.empty() && !sum_typed_[spec.index] ? *consts : intersect(d, *consts);
          sum_typed_[spec.index] = true;
        }
      } else {
        spec.kind = ArgSpec::kVar;
        spec.index = var_id(t.text);
        if (consts && typed) restrict_domain(spec.index, *consts);
      }
      out.args.push_back(std::move(spec));
    }
    return true;
  }

  bool check_domains() {
    bool ok = true;
    for (std::size_t v = 0; v < var_names_.size(); ++v) {
      if (!has_domain_[v]) {
        errors_.push_back(located(rule_.begin, "variable " + var_names_[v] +
                                                   " appears only in functional predicates and cannot be grounded"));
        ok = false;
      }
    }
    return ok;
  }

  AtomId make_atom(const CompiledAtom& a, const std::vector<std::string>& binding,
                   const std::vector<std::string>* sum_binding = nullptr) const {
    AtomId id{a.predicate, {}};
    id.args.reserve(a.args.size());
    for (const auto& s : a.args) {
      switch (s.kind) {
        case ArgSpec::kConst:
          id.args.push_back(s.constant);
          break;
        case ArgSpec::kVar:
          id.args.push_back(binding[s.index]);
          break;
        case ArgSpec::kSum:
          id.args.push_back((*sum_binding)[s.index]);
          break;
      }
    }
    return id;
  }

  struct Value {
    bool in_base = true;
    std::optional<std::size_t> free;
    double value = 0.0;
  };

  Value lookup(const CompiledAtom& a, const AtomId& id) const {
    Value v;
    if (a.def == nullptr) {
      v.value = data_.functional_value(id.predicate, id.args);
      return v;
    }
    if (a.def->explicit_base && !data_.listed(a.predicate).contains(id.args)) {
      v.in_base = false;
      return v;
    }
    v.free = vars_.find_free(id);
    if (!v.free) v.value = data_.value(id).value_or(0.0);
    return v;
  }

  std::string origin(const std::vector<std::string>& binding) const {
    std::string s = "line " + std::to_string(rule_.begin.line) + ":";
    for (std::size_t v = 0; v < var_names_.size(); ++v) {
      s += (v == 0 ? " " : ", ") + var_names_[v] + "=" + to_string(Term{TermKind::kConstant, binding[v]});
    }
    return s;
  }

  // Emits a weighted potential or hard constraint for ℓ <= 0 (or ℓ = 0).
  void emit(GroundRule& gr, const LinearFunction& fn, bool equality) const {
    if (rule_.hard()) {
      if (options_.prune) {
        if (equality && fn.is_constant() && fn.constant() == 0.0) return;
        if (!equality && box_max(fn) <= 0.0) return;
      }
      gr.constraints.push_back(
          {fn, equality ? ConstraintKind::kEquality : ConstraintKind::kAtMostZero, gr.origin});
      return;
    }
    auto add = [&](const LinearFunction& f) {
      if (options_.prune && (f.is_constant() || box_max(f) <= 0.0)) return;
      gr.potentials.push_back(f);
    };
    add(fn);
    if (equality) add(fn.negated());
  }

  void finish(GroundRuleSet& out) const {
    if (!errors_.empty()) throw GroundingError(errors_);
    (void)out;
  }

  const RuleAst& rule_;
  std::size_t rule_index_;
  const DataSet& data_;
  const VariableTable& vars_;
  const GroundOptions& options_;

  std::vector<std::string> var_names_;
  std::map<std::string, std::size_t> var_ids_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<bool> has_domain_;
  std::vector<bool> sum_typed_;
  std::vector<std::string> errors_;
};

class LogicalGrounder : public RuleGrounder {
 public:
  using RuleGrounder::RuleGrounder;

  GroundRuleSet run() {
    GroundRuleSet out;
    const auto literals = clause_literals(rule_);
    const std::map<std::string, std::size_t> no_sums;
    for (const auto& lit : literals) {
      CompiledAtom a;
      if (compile(lit.atom, lit.negated, no_sums, nullptr, true, a)) atoms_.push_back(std::move(a));
    }
    if (!errors_.empty() || !check_domains()) finish(out);

    choose_generators();
    binding_.assign(var_names_.size(), {});
    bound_.assign(var_names_.size(), false);
    search(0);
    std::sort(substitutions_.begin(), substitutions_.end());
    for (const auto& sub : substitutions_) evaluate(sub, out);
    return out;
  }

 private:
  // Literals whose candidate atoms are enumerated directly rather than via
  // the variables' domains: explicit-base predicates, and under pruning the
  // negated closed literals (a zero value there satisfies the clause).
  void choose_generators() {
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      const CompiledAtom& a = atoms_[k];
      if (a.def == nullptr) continue;
      std::vector<const std::vector<std::string>*> cands;
      if (options_.prune && a.def->closed && a.negated) {
        for (const auto& [args, v] : data_.observations(a.predicate)) {
          if (v != 0.0) cands.push_back(&args);
        }
      } else if (a.def->explicit_base) {
        for (const auto& args : data_.listed(a.predicate)) cands.push_back(&args);
      } else {
        continue;
      }
      generators_.push_back({k, std::move(cands)});
    }
    std::stable_sort(generators_.begin(), generators_.end(),
                     [](const auto& x, const auto& y) { return x.second.size() < y.second.size(); });
  }

  void search(std::size_t g) {
    if (g == generators_.size()) {
      enumerate_rest(0);
      return;
    }
    const CompiledAtom& a = atoms_[generators_[g].first];
    std::vector<std::size_t> newly;
    for (const auto* args : generators_[g].second) {
      bool ok = true;
      for (std::size_t i = 0; i < a.args.size() && ok; ++i) {
        const ArgSpec& s = a.args[i];
        const std::string& c = (*args)[i];
        if (s.kind == ArgSpec::kConst) {
          ok = s.constant == c;
        } else if (bound_[s.index]) {
          ok = binding_[s.index] == c;
        } else {
          const auto& d = domains_[s.index];
          ok = std::binary_search(d.begin(), d.end(), c);
          if (ok) {
            binding_[s.index] = c;
            bound_[s.index] = true;
            newly.push_back(s.index);
          }
        }
      }
      if (ok) search(g + 1);
      for (auto v : newly) bound_[v] = false;
      newly.clear();
    }
  }

  void enumerate_rest(std::size_t v) {
    while (v < var_names_.size() && bound_[v]) ++v;
    if (v == var_names_.size()) {
      substitutions_.push_back(binding_);
      return;
    }
    bound_[v] = true;
    for (const auto& c : domains_[v]) {
      binding_[v] = c;
      enumerate_rest(v + 1);
    }
    bound_[v] = false;
  }

  void evaluate(const std::vector<std::string>& sub, GroundRuleSet& out) {
    LinearFunction fn(1.0);
    for (const auto& a : atoms_) {
      const Value v = lookup(a, make_atom(a, sub));
      if (!v.in_base) return;
      if (!a.negated) {
        if (v.free) {
          fn.add_term(*v.free, -1.0);
        } else {
          fn.add_constant(-v.value);
        }
      } else if (v.free) {
        fn.add_constant(-1.0);
        fn.add_term(*v.free, 1.0);
      } else {
        fn.add_constant(-(1.0 - v.value));
      }
    }
    GroundRule gr;
    gr.rule_index = rule_index_;
    for (std::size_t i = 0; i < var_names_.size(); ++i) gr.substitution.emplace_back(var_names_[i], sub[i]);
    gr.origin = origin(sub);
    emit(gr, fn, false);
    if (!gr.potentials.empty() || !gr.constraints.empty()) out.rules.push_back(std::move(gr));
  }

  std::vector<CompiledAtom> atoms_;
  std::vector<std::pair<std::size_t, std::vector<const std::vector<std::string>*>>> generators_;
  std::vector<std::string> binding_;
  std::vector<bool> bound_;
  std::vector<std::vector<std::string>> substitutions_;
};

struct DivisionByZero {};

class ArithmeticGrounder : public RuleGrounder {
 public:
  using RuleGrounder::RuleGrounder;

  GroundRuleSet run() {
    GroundRuleSet out;
    // Sum variables first so their names resolve as sums everywhere.
    for (const auto* side : {&rule_.lhs, &rule_.rhs}) {
      for (const auto& s : *side) {
        if (!s.atom) continue;
        for (const auto& t : s.atom->args) {
          if (t.kind == TermKind::kSumVariable) {
            sum_ids_.emplace(t.text, sum_names_.size());
            sum_names_.push_back(t.text);
          }
        }
      }
    }
    sum_domains_.assign(sum_names_.size(), {});
    sum_typed_.assign(sum_names_.size(), false);
    selects_.assign(sum_names_.size(), nullptr);

    for (std::size_t side = 0; side < 2; ++side) {
      for (const auto& s : side == 0 ? rule_.lhs : rule_.rhs) {
        Term_ t;
        t.side = side;
        t.summand = &s;
        if (s.atom) {
          t.atom.emplace();
          if (!compile(*s.atom, false, sum_ids_, &sum_domains_, true, *t.atom)) continue;
        }
        terms_.push_back(std::move(t));
      }
    }
    for (const auto& sel : rule_.selects) {
      const std::size_t id = sum_ids_.at(sel.variable);
      selects_[id] = &sel;
      compile_select(sel.formula, select_atoms_[id]);
    }
    if (!errors_.empty() || !check_domains()) finish(out);

    std::vector<std::string> binding(var_names_.size());
    enumerate(0, binding, out);
    return out;
  }

 private:
  struct Term_ {
    std::size_t side = 0;
    const Summand* summand = nullptr;
    std::optional<CompiledAtom> atom;
  };

  void compile_select(const Formula& f, std::vector<CompiledAtom>& atoms) {
    if (f.kind != Formula::Kind::kAtom) {
      for (const auto& c : f.children) compile_select(c, atoms);
      return;
    }
    CompiledAtom a;
    if (!compile(f.atom, false, sum_ids_, nullptr, false, a)) return;
    if (a.def != nullptr && !a.def->closed) {
      errors_.push_back(located(f.atom.loc, "select statement uses open predicate " + a.predicate +
                                                "; only closed or functional predicates are allowed"));
    }
    atoms.push_back(std::move(a));
  }

  // Boolean truth of a select formula; atoms count as true unless their
  // observed value is exactly 0.
  bool select_true(const Formula& f, const std::vector<CompiledAtom>& atoms, std::size_t& next,
                   const std::vector<std::string>& binding, const std::vector<std::string>& sums) const {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::kAtom: {
        const CompiledAtom& a = atoms[next++];
        const AtomId id = make_atom(a, binding, &sums);
        if (a.def == nullptr) return data_.functional_value(id.predicate, id.args) != 0.0;
        if (!data_.in_base(id)) return false;
        return data_.value(id).value_or(0.0) != 0.0;
      }
      case K::kNot:
        return !select_true(f.children[0], atoms, next, binding, sums);
      case K::kAnd:
      case K::kOr: {
        // Evaluate every child so `next` stays aligned with the atom list.
        bool acc = f.kind == K::kAnd;
        for (const auto& c : f.children) {
          const bool v = select_true(c, atoms, next, binding, sums);
          acc = f.kind == K::kAnd ? (acc && v) : (acc || v);
        }
        return acc;
      }
      case K::kImplies:
      case K::kImpliedBy: {
        const bool first = select_true(f.children[0], atoms, next, binding, sums);
        const bool second = select_true(f.children[1], atoms, next, binding, sums);
        return f.kind == K::kImplies ? (!first || second) : (first || !second);
      }
    }
    return false;
  }

  double eval(const Coefficient& c, const std::vector<double>& card) const {
    using K = Coefficient::Kind;
    switch (c.kind) {
      case K::kNumber:
        return c.value;
      case K::kCardinality:
        return card[sum_ids_.at(c.name)];
      case K::kCall: {
        std::vector<double> args;
        for (const auto& a : c.args) args.push_back(eval(a, card));
        return (*find_coefficient_function(c.name))(args);
      }
      case K::kNeg:
        return -eval(c.args[0], card);
      case K::kAdd:
        return eval(c.args[0], card) + eval(c.args[1], card);
      case K::kSub:
        return eval(c.args[0], card) - eval(c.args[1], card);
      case K::kMul:
        return eval(c.args[0], card) * eval(c.args[1], card);
      case K::kDiv: {
        const double d = eval(c.args[1], card);
        if (d == 0.0) throw DivisionByZero{};
        return eval(c.args[0], card) / d;
      }
    }
    return 0.0;
  }

  void enumerate(std::size_t v, std::vector<std::string>& binding, GroundRuleSet& out) {
    if (v == var_names_.size()) {
      ground(binding, out);
      return;
    }
    for (const auto& c : domains_[v]) {
      binding[v] = c;
      enumerate(v + 1, binding, out);
    }
  }

  // Adds sign * coeff * atom, expanding its sum variables over the selected
  // constants. Returns false if a non-sum atom is outside the base.
  bool add_atom(const CompiledAtom& a, double scale, const std::vector<std::string>& binding,
                const std::vector<std::vector<std::string>>& selected, LinearFunction& fn) const {
    std::vector<std::size_t> sums;
    for (const auto& s : a.args) {
      if (s.kind == ArgSpec::kSum) sums.push_back(s.index);
    }
    std::vector<std::string> sum_binding(sum_names_.size());
    auto add_one = [&]() -> bool {
      const Value v = lookup(a, make_atom(a, binding, &sum_binding));
      if (!v.in_base) return false;
      if (v.free) {
        fn.add_term(*v.free, scale);
      } else {
        fn.add_constant(scale * v.value);
      }
      return true;
    };
    if (sums.empty()) return add_one();
    std::vector<std::size_t> idx(sums.size(), 0);
    for (auto s : sums) {
      if (selected[s].empty()) return true;
    }
    for (;;) {
      for (std::size_t k = 0; k < sums.size(); ++k) sum_binding[sums[k]] = selected[sums[k]][idx[k]];
      add_one();
      std::size_t k = sums.size();
      for (;;) {
        if (k == 0) return true;
        --k;
        if (++idx[k] < selected[sums[k]].size()) break;
        idx[k] = 0;
      }
    }
  }

  void ground(const std::vector<std::string>& binding, GroundRuleSet& out) {
    std::vector<std::vector<std::string>> selected(sum_names_.size());
    std::vector<double> card(sum_names_.size());
    std::vector<std::string> sums(sum_names_.size());
    for (std::size_t s = 0; s < sum_names_.size(); ++s) {
      for (const auto& c : sum_domains_[s]) {
        if (selects_[s] != nullptr) {
          sums[s] = c;
          std::size_t next = 0;
          if (!select_true(selects_[s]->formula, select_atoms_.at(s), next, binding, sums)) continue;
        }
        selected[s].push_back(c);
      }
      card[s] = static_cast<double>(selected[s].size());
    }

    LinearFunction fn;
    try {
      for (const auto& t : terms_) {
        double scale = t.summand->coeff ? eval(*t.summand->coeff, card) : 1.0;
        if (t.summand->negated) scale = -scale;
        if (t.side == 1) scale = -scale;
        if (!std::isfinite(scale)) throw DivisionByZero{};
        if (!t.atom) {
          fn.add_constant(scale);
        } else if (!add_atom(*t.atom, scale, binding, selected, fn)) {
          return;
        }
      }
    } catch (const DivisionByZero&) {
      warnings_.push_back(located(rule_.begin, "division by zero in a coefficient; dropped grounding " +
                                                   origin(binding)));
      return;
    }
    if (rule_.relation == Relation::kGreaterEq) fn = fn.negated();

    GroundRule gr;
    gr.rule_index = rule_index_;
    for (std::size_t i = 0; i < var_names_.size(); ++i) gr.substitution.emplace_back(var_names_[i], binding[i]);
    gr.origin = origin(binding);
    emit(gr, fn, rule_.relation == Relation::kEqual);
    if (!gr.potentials.empty() || !gr.constraints.empty()) out.rules.push_back(std::move(gr));
  }

 public:
  std::vector<std::string> warnings_;

 private:
  std::map<std::string, std::size_t> sum_ids_;
  std::vector<std::string> sum_names_;
  std::vector<std::vector<std::string>> sum_domains_;
  std::vector<const SelectClause*> selects_;
  std::map<std::size_t, std::vector<CompiledAtom>> select_atoms_;
  std::vector<Term_> terms_;
};

}  // namespace

GroundRuleSet ground_logical_rule(const RuleAst& rule, std::size_t rule_index, const DataSet& data,
                                  const VariableTable& vars, const GroundOptions& options) {
  if (rule.kind != RuleAst::Kind::kLogical) throw Error("ground_logical_rule needs a logical rule");
  return LogicalGrounder(rule, rule_index, data, vars, options).run();
}

GroundRuleSet ground_arithmetic_rule(const RuleAst& rule, std::size_t rule_index, const DataSet& data,
                                     const VariableTable& vars, const GroundOptions& options) {
  if (rule.kind != RuleAst::Kind::kArithmetic) throw Error("ground_arithmetic_rule needs an arithmetic rule");
  ArithmeticGrounder g(rule, rule_index, data, vars, options);
  GroundRuleSet out = g.run();
  out.warnings = std::move(g.warnings_);
  return out;
}

HlMrf ground_program(const Program& program, const DataSet& data, const GroundOptions& options) {
  VariableTable vars = build_variables(data);
  const std::size_t n = program.rules.size();
  std::vector<GroundRuleSet> results(n);
  std::vector<std::vector<std::string>> errors(n);
  const int threads = options.workers > 0 ? options.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < n; ++i) {
    const RuleAst& rule = program.rules[i];
    try {
      results[i] = rule.kind == RuleAst::Kind::kLogical ? ground_logical_rule(rule, i, data, vars, options)
                                                        : ground_arithmetic_rule(rule, i, data, vars, options);
    } catch (const GroundingError& e) {
      errors[i] = e.messages();
    } catch (const std::exception& e) {
      errors[i] = {located(rule.begin, e.what())};
    }
  }

  std::vector<std::string> all_errors;
  for (auto& e : errors) all_errors.insert(all_errors.end(), e.begin(), e.end());
  if (!all_errors.empty()) throw GroundingError(std::move(all_errors));

  HlMrf mrf(std::move(vars));
  std::vector<std::size_t> template_of(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!program.rules[i].hard()) template_of[i] = mrf.add_template(to_string(program.rules[i]), *program.rules[i].weight);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int exponent = program.rules[i].squared ? 2 : 1;
    for (auto& gr : results[i].rules) {
      for (auto& fn : gr.potentials) mrf.add_potential({std::move(fn), exponent, template_of[i], gr.origin});
      for (auto& c : gr.constraints) mrf.add_constraint(std::move(c));
    }
    for (auto& w : results[i].warnings) mrf.add_warning(std::move(w));
  }
  return mrf;
}

}  // namespace psl
