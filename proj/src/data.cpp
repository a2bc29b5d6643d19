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

#include "lexer.hpp"
#include "psl/error.hpp"
#include "psl/ground.hpp"

namespace psl {

DataSet::DataSet() {
  register_function(std::string(kNotEqualPredicate), 2,
                    [](std::span<const std::string> a) { return a[0] != a[1] ? 1.0 : 0.0; });
}

void DataSet::add_type(const std::string& name, std::vector<std::string> constants) {
  if (types_.contains(name)) throw Error("type " + name + " defined twice");
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
  types_.emplace(name, std::move(constants));
  type_order_.push_back(name);
}

void DataSet::add_predicate(PredicateDef def) {
  if (predicate_index_.contains(def.name) || functions_.contains(def.name)) {
    throw Error("predicate " + def.name + " declared twice");
  }
  if (def.arg_types.empty()) throw Error("predicate " + def.name + " needs at least one argument");
  for (const auto& t : def.arg_types) {
    if (!types_.contains(t)) throw Error("predicate " + def.name + " uses unknown type " + t);
  }
  predicate_index_.emplace(def.name, predicates_.size());
  observations_[def.name];
  listed_[def.name];
  predicates_.push_back(std::move(def));
}

void DataSet::register_function(const std::string& name, std::size_t arity, FunctionalPredicate fn) {
  if (predicate_index_.contains(name)) throw Error("functional predicate " + name + " clashes with a declaration");
  functions_[name] = {arity, std::move(fn)};
}

const std::vector<std::string>* DataSet::constants(const std::string& type) const {
  auto it = types_.find(type);
  return it == types_.end() ? nullptr : &it->second;
}

const PredicateDef* DataSet::predicate(const std::string& name) const {
  auto it = predicate_index_.find(name);
  return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

double DataSet::functional_value(const std::string& name, std::span<const std::string> args) const {
  const auto& [arity, fn] = functions_.at(name);
  if (args.size() != arity) throw Error("functional predicate " + name + " takes " + std::to_string(arity) + " arguments");
  const double v = fn(args);
  if (!(v >= 0.0 && v <= 1.0)) throw Error("functional predicate " + name + " returned a value outside [0,1]");
  return v;
}

void DataSet::check_atom(const AtomId& atom) const {
  const PredicateDef* def = predicate(atom.predicate);
  if (def == nullptr) throw Error("undeclared predicate in " + to_string(atom));
  if (def->arg_types.size() != atom.args.size()) {
    throw Error(to_string(atom) + " has " + std::to_string(atom.args.size()) + " arguments but " + def->name +
                " takes " + std::to_string(def->arg_types.size()));
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const auto& consts = types_.at(def->arg_types[i]);
    if (!std::binary_search(consts.begin(), consts.end(), atom.args[i])) {
      throw Error("constant \"" + atom.args[i] + "\" in " + to_string(atom) + " is not of type " + def->arg_types[i]);
    }
  }
}

void DataSet::observe(const AtomId& atom, double value) {
  check_atom(atom);
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error("observed value " + format_number(value) + " for " + to_string(atom) + " is outside [0,1]");
  }
  auto& obs = observations_[atom.predicate];
  if (!obs.emplace(atom.args, value).second) throw Error(to_string(atom) + " observed twice");
  if (predicate(atom.predicate)->explicit_base) listed_[atom.predicate].insert(atom.args);
}

void DataSet::add_to_base(const AtomId& atom) {
  check_atom(atom);
  if (!predicate(atom.predicate)->explicit_base) return;
  listed_[atom.predicate].insert(atom.args);
}

bool DataSet::in_base(const AtomId& atom) const {
  if (functions_.contains(atom.predicate)) return true;
  const PredicateDef* def = predicate(atom.predicate);
  if (def == nullptr || def->arg_types.size() != atom.args.size()) return false;
  if (def->explicit_base) return listed_.at(def->name).contains(atom.args);
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const auto& consts = types_.at(def->arg_types[i]);
    if (!std::binary_search(consts.begin(), consts.end(), atom.args[i])) return false;
  }
  return true;
}

std::optional<double> DataSet::value(const AtomId& atom) const {
  if (functions_.contains(atom.predicate)) return functional_value(atom.predicate, atom.args);
  const PredicateDef* def = predicate(atom.predicate);
  if (def == nullptr) return std::nullopt;
  const auto& obs = observations_.at(def->name);
  auto it = obs.find(atom.args);
  if (it != obs.end()) return it->second;
  if (def->closed) return 0.0;
  return std::nullopt;
}

std::vector<AtomId> DataSet::base(const std::string& name) const {
  const PredicateDef* def = predicate(name);
  if (def == nullptr) throw Error("undeclared predicate " + name);
  std::vector<AtomId> out;
  if (def->explicit_base) {
    for (const auto& args : listed_.at(name)) out.push_back({name, args});
    return out;
  }
  std::vector<const std::vector<std::string>*> domains;
  for (const auto& t : def->arg_types) {
    domains.push_back(&types_.at(t));
    if (domains.back()->empty()) return out;
  }
  std::vector<std::size_t> idx(domains.size(), 0);
  for (;;) {
    AtomId a{name, {}};
    for (std::size_t i = 0; i < idx.size(); ++i) a.args.push_back((*domains[i])[idx[i]]);
    out.push_back(std::move(a));
    std::size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k]->size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

std::size_t DataSet::base_size() const {
  std::size_t n = 0;
  for (const auto& def : predicates_) {
    if (def.explicit_base) {
      n += listed_.at(def.name).size();
      continue;
    }
    std::size_t m = 1;
    for (const auto& t : def.arg_types) m *= types_.at(t).size();
    n += m;
  }
  return n;
}

const DataSet::ArgMap& DataSet::observations(const std::string& name) const { return observations_.at(name); }

const std::set<std::vector<std::string>>& DataSet::listed(const std::string& name) const { return listed_.at(name); }

namespace {

using detail::Tok;
using detail::Token;

class DataParser {
 public:
  explicit DataParser(std::string_view text) : toks_(detail::tokenize(text)) {}

  DataSet run() {
    while (cur().kind != Tok::kEnd) statement();
    return std::move(data_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(cur().loc, message); }
  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind) fail(std::string("expected ") + what + ", found " + detail::describe(cur()));
    return toks_[pos_++];
  }

  // Wraps semantic errors from DataSet with the statement's location.
  template <typename F>
  void located(const SourceLocation& loc, F&& f) {
    try {
      f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(loc, e.what());
    }
  }

  void statement() {
    const Token& name = expect(Tok::kIdent, "a type, predicate or observation");
    if (cur().kind == Tok::kEq) {
      ++pos_;
      type_definition(name);
    } else if (cur().kind == Tok::kLParen && ahead(1).kind == Tok::kString) {
      observation(name);
    } else if (cur().kind == Tok::kLParen) {
      predicate_definition(name);
    } else {
      fail("expected '=' or '(' after " + detail::describe(name));
    }
  }

  void type_definition(const Token& name) {
    expect(Tok::kLBrace, "'{'");
    std::vector<std::string> constants;
    if (cur().kind != Tok::kRBrace) {
      constants.push_back(expect(Tok::kString, "a quoted constant").text);
      while (cur().kind == Tok::kComma) {
        ++pos_;
        constants.push_back(expect(Tok::kString, "a quoted constant").text);
      }
    }
    expect(Tok::kRBrace, "'}'");
    located(name.loc, [&] { data_.add_type(name.text, std::move(constants)); });
  }

  void predicate_definition(const Token& name) {
    PredicateDef def;
    def.name = name.text;
    expect(Tok::kLParen, "'('");
    def.arg_types.push_back(expect(Tok::kIdent, "a type name").text);
    while (cur().kind == Tok::kComma) {
      ++pos_;
      def.arg_types.push_back(expect(Tok::kIdent, "a type name").text);
    }
    expect(Tok::kRParen, "')'");
    while (cur().kind == Tok::kLParen) {
      ++pos_;
      const Token& tag = expect(Tok::kIdent, "a predicate tag");
      if (tag.text == "closed") {
        def.closed = true;
      } else if (tag.text == "explicit") {
        def.explicit_base = true;
      } else {
        throw ParseError(tag.loc, "unknown predicate tag '" + tag.text + "'");
      }
      expect(Tok::kRParen, "')'");
    }
    located(name.loc, [&] { data_.add_predicate(std::move(def)); });
  }

  void observation(const Token& name) {
    AtomId atom{name.text, {}};
    expect(Tok::kLParen, "'('");
    atom.args.push_back(expect(Tok::kString, "a quoted constant").text);
    while (cur().kind == Tok::kComma) {
      ++pos_;
      atom.args.push_back(expect(Tok::kString, "a quoted constant").text);
    }
    expect(Tok::kRParen, "')'");
    expect(Tok::kEq, "'='");
    if (cur().kind == Tok::kQuestion) {
      ++pos_;
      located(name.loc, [&] { data_.add_to_base(atom); });
      return;
    }
    double sign = 1.0;
    if (cur().kind == Tok::kMinus) {
      sign = -1.0;
      ++pos_;
    }
    const double value = sign * expect(Tok::kNumber, "an observed value").number;
    located(name.loc, [&] { data_.observe(atom, value); });
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  DataSet data_;
};

std::string quoted(const std::string& s) {
  Term t{TermKind::kConstant, s};
  return to_string(t);
}

}  // namespace

DataSet load_data(std::string_view text) { return DataParser(text).run(); }

std::string to_text(const DataSet& data) {
  std::string out;
  for (const auto& name : data.type_names()) {
    out += name + " = {";
    const auto& consts = *data.constants(name);
    for (std::size_t i = 0; i < consts.size(); ++i) {
      if (i > 0) out += ", ";
      out += quoted(consts[i]);
    }
    out += "}\n";
  }
  out += "\n";
  for (const auto& def : data.predicates()) {
    out += def.name + "(";
    for (std::size_t i = 0; i < def.arg_types.size(); ++i) {
      if (i > 0) out += ", ";
      out += def.arg_types[i];
    }
    out += ")";
    if (def.closed) out += " (closed)";
    if (def.explicit_base) out += " (explicit)";
    out += "\n";
  }
  out += "\n";
  auto atom_text = [](const std::string& pred, const std::vector<std::string>& args) {
    std::string s = pred + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i > 0) s += ", ";
      s += quoted(args[i]);
    }
    return s + ")";
  };
  for (const auto& def : data.predicates()) {
    const auto& obs = data.observations(def.name);
    for (const auto& [args, v] : obs) out += atom_text(def.name, args) + " = " + format_number(v) + "\n";
    for (const auto& args : data.listed(def.name)) {
      if (!obs.contains(args)) out += atom_text(def.name, args) + " = ?\n";
    }
  }
  return out;
}

VariableTable build_variables(const DataSet& data) {
  VariableTable vars;
  for (const auto& def : data.predicates()) {
    const auto& obs = data.observations(def.name);
    if (def.closed) {
      for (const auto& [args, v] : obs) vars.add_observed({def.name, args}, v);
      continue;
    }
    for (auto& atom : data.base(def.name)) {
      auto it = obs.find(atom.args);
      if (it != obs.end()) {
        vars.add_observed(std::move(atom), it->second);
      } else if (!def.closed) {
        vars.add_free(std::move(atom));
      }
    }
  }
  return vars;
}

}  // namespace psl
