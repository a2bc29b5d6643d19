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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psl/lang.hpp"
#include "psl/model.hpp"

namespace psl {

struct PredicateDef {
  std::string name;
  std::vector<std::string> arg_types;
  bool closed = false;
  // The base holds only listed atoms instead of the full typed cross product.
  bool explicit_base = false;
};

using FunctionalPredicate = std::function<double(std::span<const std::string>)>;

class DataSet {
 public:
  DataSet();  // registers the "!=" functional predicate

  void add_type(const std::string& name, std::vector<std::string> constants);
  void add_predicate(PredicateDef def);
  void observe(const AtomId& atom, double value);
  // Adds an unobserved atom to an explicit-base predicate.
  void add_to_base(const AtomId& atom);
  void register_function(const std::string& name, std::size_t arity, FunctionalPredicate fn);

  // Constants of a type in sorted order, or nullptr for unknown types.
  const std::vector<std::string>* constants(const std::string& type) const;
  std::span<const std::string> type_names() const { return type_order_; }
  const PredicateDef* predicate(const std::string& name) const;
  std::span<const PredicateDef> predicates() const { return predicates_; }

  bool is_functional(const std::string& name) const { return functions_.contains(name); }
  std::size_t functional_arity(const std::string& name) const { return functions_.at(name).first; }
  double functional_value(const std::string& name, std::span<const std::string> args) const;

  bool in_base(const AtomId& atom) const;
  // Observed value; closed atoms default to 0, unobserved open atoms give nullopt.
  std::optional<double> value(const AtomId& atom) const;
  // Base atoms of one predicate, sorted by arguments.
  std::vector<AtomId> base(const std::string& predicate) const;
  std::size_t base_size() const;

  using ArgMap = std::map<std::vector<std::string>, double>;
  const ArgMap& observations(const std::string& predicate) const;
  const std::set<std::vector<std::string>>& listed(const std::string& predicate) const;

 private:
  void check_atom(const AtomId& atom) const;

  std::map<std::string, std::vector<std::string>> types_;
  std::vector<std::string> type_order_;
  std::vector<PredicateDef> predicates_;
  std::map<std::string, std::size_t> predicate_index_;
  std::map<std::string, ArgMap> observations_;
  std::map<std::string, std::set<std::vector<std::string>>> listed_;  // explicit bases
  std::map<std::string, std::pair<std::size_t, FunctionalPredicate>> functions_;
};

// Text format, one statement per line:
//   Type = {"c1", "c2"}
//   Pred(Type1, Type2) (closed) (explicit)
//   Pred("c1", "c2") = 0.7        or  = ?  (listed but unobserved)
DataSet load_data(std::string_view text);
std::string to_text(const DataSet& data);

// Free variables for every unobserved base atom, by predicate declaration
// order then argument order; observations listed explicitly are recorded.
VariableTable build_variables(const DataSet& data);

struct GroundOptions {
  // Drop potentials that are constant or zero over the whole box, and
  // constraints that hold everywhere.
  bool prune = false;
  int workers = 0;  // 0 uses the OpenMP default
};

struct GroundRule {
  std::size_t rule_index = 0;
  std::vector<std::pair<std::string, std::string>> substitution;
  std::vector<LinearFunction> potentials;  // hinge arguments, exponent from the rule
  std::vector<LinearConstraint> constraints;
  std::string origin;
};

struct GroundRuleSet {
  std::vector<GroundRule> rules;
  std::vector<std::string> warnings;
};

// Throws GroundingError with located messages.
GroundRuleSet ground_logical_rule(const RuleAst& rule, std::size_t rule_index, const DataSet& data,
                                  const VariableTable& vars, const GroundOptions& options = {});
GroundRuleSet ground_arithmetic_rule(const RuleAst& rule, std::size_t rule_index, const DataSet& data,
                                     const VariableTable& vars, const GroundOptions& options = {});

// One template per weighted rule in program order, sourced by the printed rule.
HlMrf ground_program(const Program& program, const DataSet& data, const GroundOptions& options = {});

}  // namespace psl
