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

#include "psl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psl/error.hpp"

namespace psl {

std::string to_string(const SourceLocation& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::string out = "grounding failed";
  for (const auto& m : messages) out += "\n  " + m;
  return out;
}

}  // namespace

GroundingError::GroundingError(std::vector<std::string> messages)
    : Error(join_messages(messages)), messages_(std::move(messages)) {}

std::string to_string(const AtomId& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += '"';
    for (char c : atom.args[i]) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  return out + ")";
}

std::size_t VariableTable::add_free(AtomId atom) {
  if (free_index_.contains(atom) || observed_index_.contains(atom)) {
    throw ModelError("atom registered twice: " + to_string(atom));
  }
  const std::size_t index = free_.size();
  free_index_.emplace(atom, index);
  free_.push_back(std::move(atom));
  return index;
}

void VariableTable::add_observed(AtomId atom, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ModelError("observed value outside [0,1] for " + to_string(atom));
  }
  if (free_index_.contains(atom) || observed_index_.contains(atom)) {
    throw ModelError("atom registered twice: " + to_string(atom));
  }
  observed_index_.emplace(atom, observed_.size());
  observed_.push_back({std::move(atom), value});
}

std::optional<std::size_t> VariableTable::find_free(const AtomId& atom) const {
  auto it = free_index_.find(atom);
  if (it == free_index_.end()) return std::nullopt;
  return it->second;
}

LinearFunction::LinearFunction(std::vector<LinearTerm> terms, double constant)
    : constant_(constant) {
  for (const auto& t : terms) add_term(t.var, t.coeff);
}

void LinearFunction::add_term(std::size_t var, double coeff) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), var,
                             [](const LinearTerm& t, std::size_t v) { return t.var < v; });
  if (it != terms_.end() && it->var == var) {
    it->coeff += coeff;
    if (it->coeff == 0.0) terms_.erase(it);
  } else if (coeff != 0.0) {
    terms_.insert(it, {var, coeff});
  }
}

double LinearFunction::squared_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * t.coeff;
  return s;
}

double LinearFunction::operator()(std::span<const double> y) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coeff * y[t.var];
  return v;
}

LinearFunction LinearFunction::negated() const { return scaled(-1.0); }

LinearFunction LinearFunction::scaled(double factor) const {
  LinearFunction out;
  out.constant_ = factor * constant_;
  if (factor == 0.0) return out;
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.coeff *= factor;
  return out;
}

double HingePotential::value(std::span<const double> y) const {
  const double h = std::max(fn(y), 0.0);
  return exponent == 2 ? h * h : h;
}

double LinearConstraint::violation(std::span<const double> y) const {
  const double c = fn(y);
  return kind == ConstraintKind::kEquality ? std::abs(c) : std::max(c, 0.0);
}

std::size_t HlMrf::add_template(std::string source, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ModelError("template weight must be a finite nonnegative number: " + source);
  }
  templates_.push_back({std::move(source), weight, 0});
  return templates_.size() - 1;
}

void HlMrf::check_function(const LinearFunction& fn) const {
  for (const auto& t : fn.terms()) {
    if (t.var >= vars_.num_free()) {
      throw DimensionError("linear function references free variable " + std::to_string(t.var) +
                           " but the model has " + std::to_string(vars_.num_free()));
    }
  }
}

void HlMrf::add_potential(HingePotential potential) {
  if (potential.exponent != 1 && potential.exponent != 2) {
    throw ModelError("potential exponent must be 1 or 2");
  }
  if (potential.template_id >= templates_.size()) {
    throw ModelError("potential references unknown template " +
                     std::to_string(potential.template_id));
  }
  check_function(potential.fn);
  if (potential.fn.is_constant() && potential.fn.constant() <= 0.0) {
    auto [it, fresh] = zero_potentials_.try_emplace(potential.template_id);
    ZeroPotentials& z = it->second;
    if (fresh) {
      z.warning = warnings_.size();
      z.example = potential.origin;
      warnings_.emplace_back();
    }
    ++z.count;
    std::string msg = std::to_string(z.count) + " identically-zero potential(s) from template \"" +
                      templates_[potential.template_id].source + "\"";
    if (!z.example.empty()) msg += ", e.g. " + z.example;
    warnings_[z.warning] = std::move(msg);
  }
  ++templates_[potential.template_id].groundings;
  potentials_.push_back(std::move(potential));
}

void HlMrf::add_constraint(LinearConstraint constraint) {
  check_function(constraint.fn);
  constraints_.push_back(std::move(constraint));
}

std::vector<double> HlMrf::weights() const {
  std::vector<double> w;
  w.reserve(templates_.size());
  for (const auto& t : templates_) w.push_back(t.weight);
  return w;
}

HlMrf HlMrf::with_weights(std::span<const double> weights) const {
  if (weights.size() != templates_.size()) {
    throw DimensionError("expected " + std::to_string(templates_.size()) + " template weights, got " +
                         std::to_string(weights.size()));
  }
  HlMrf copy = *this;
  for (std::size_t q = 0; q < weights.size(); ++q) {
    if (!(weights[q] >= 0.0)) throw ModelError("template weights must be nonnegative");
    copy.templates_[q].weight = weights[q];
  }
  return copy;
}

void validate_assignment(const HlMrf& mrf, std::span<const double> y) {
  if (y.size() != mrf.num_free()) {
    throw DimensionError("assignment has " + std::to_string(y.size()) + " values but the model has " +
                         std::to_string(mrf.num_free()) + " free variables");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw DimensionError("assignment value " + std::to_string(i) + " is outside [0,1]");
    }
  }
}

double energy(const HlMrf& mrf, std::span<const double> y) {
  validate_assignment(mrf, y);
  double e = 0.0;
  for (const auto& p : mrf.potentials()) e += mrf.weight_of(p) * p.value(y);
  return e;
}

FeasibilityReport check_feasible(const HlMrf& mrf, std::span<const double> y, double tol) {
  if (tol < 0.0) throw Error("feasibility tolerance must be nonnegative");
  validate_assignment(mrf, y);
  FeasibilityReport report;
  const auto constraints = mrf.constraints();
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    if (constraints[k].violation(y) > tol) {
      report.feasible = false;
      report.violated.push_back(k);
    }
  }
  return report;
}

std::vector<double> template_features(const HlMrf& mrf, std::span<const double> y) {
  validate_assignment(mrf, y);
  std::vector<double> phi(mrf.templates().size(), 0.0);
  for (const auto& p : mrf.potentials()) phi[p.template_id] += p.value(y);
  return phi;
}

}  // namespace psl
