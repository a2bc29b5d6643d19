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

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psl {

// A ground atom: predicate name plus constant arguments.
struct AtomId {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const AtomId&, const AtomId&) = default;
  friend bool operator==(const AtomId&, const AtomId&) = default;
};

// Renders an atom as `Name("a", "b")` with quotes and backslashes escaped.
std::string to_string(const AtomId& atom);

struct ObservedAtom {
  AtomId atom;
  double value = 0.0;
};

// Free variables y are indexed densely from 0; observed variables x carry their
// fixed value. An atom is either free or observed, never both.
class VariableTable {
 public:
  std::size_t add_free(AtomId atom);
  void add_observed(AtomId atom, double value);

  std::size_t num_free() const { return free_.size(); }
  std::size_t num_observed() const { return observed_.size(); }
  const AtomId& free_atom(std::size_t index) const { return free_.at(index); }
  std::span<const AtomId> free_atoms() const { return free_; }
  std::span<const ObservedAtom> observed() const { return observed_; }
  std::optional<std::size_t> find_free(const AtomId& atom) const;

 private:
  std::vector<AtomId> free_;
  std::vector<ObservedAtom> observed_;
  std::map<AtomId, std::size_t> free_index_;
  std::map<AtomId, std::size_t> observed_index_;
};

struct LinearTerm {
  std::size_t var = 0;
  double coeff = 0.0;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

// Sparse affine function of the free variables. Observed values are folded
// into the constant. Terms stay sorted by variable with no zero coefficients.
class LinearFunction {
 public:
  LinearFunction() = default;
  explicit LinearFunction(double constant) : constant_(constant) {}
  LinearFunction(std::vector<LinearTerm> terms, double constant);

  void add_term(std::size_t var, double coeff);
  void add_constant(double c) { constant_ += c; }

  std::span<const LinearTerm> terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }
  double squared_norm() const;

  double operator()(std::span<const double> y) const;
  LinearFunction negated() const;
  LinearFunction scaled(double factor) const;

  friend bool operator==(const LinearFunction&, const LinearFunction&) = default;

 private:
  std::vector<LinearTerm> terms_;
  double constant_ = 0.0;
};

struct HingePotential {
  LinearFunction fn;
  int exponent = 1;
  std::size_t template_id = 0;
  std::string origin;

  double value(std::span<const double> y) const;
};

enum class ConstraintKind { kEquality, kAtMostZero };

struct LinearConstraint {
  LinearFunction fn;
  ConstraintKind kind = ConstraintKind::kAtMostZero;
  std::string origin;

  // |c| for equalities, max{c, 0} for inequalities.
  double violation(std::span<const double> y) const;
};

struct Template {
  std::string source;
  double weight = 0.0;
  std::size_t groundings = 0;
};

// Hinge-loss MRF with templated weights. Built incrementally, then treated as
// immutable; learning works on copies produced by with_weights().
class HlMrf {
 public:
  HlMrf() = default;
  explicit HlMrf(VariableTable vars) : vars_(std::move(vars)) {}

  std::size_t add_template(std::string source, double weight);
  void add_potential(HingePotential potential);
  void add_constraint(LinearConstraint constraint);

  const VariableTable& variables() const { return vars_; }
  std::size_t num_free() const { return vars_.num_free(); }
  std::span<const HingePotential> potentials() const { return potentials_; }
  std::span<const LinearConstraint> constraints() const { return constraints_; }
  std::span<const Template> templates() const { return templates_; }

  double weight_of(const HingePotential& p) const { return templates_[p.template_id].weight; }
  std::vector<double> weights() const;
  HlMrf with_weights(std::span<const double> weights) const;

  // Non-fatal modeling diagnostics. Identically-zero potentials are reported
  // once per template with a count.
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string message) { warnings_.push_back(std::move(message)); }
  void clear_warnings() {
    warnings_.clear();
    zero_potentials_.clear();
  }

 private:
  void check_function(const LinearFunction& fn) const;

  VariableTable vars_;
  std::vector<HingePotential> potentials_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Template> templates_;
  std::vector<std::string> warnings_;

  struct ZeroPotentials {
    std::size_t warning = 0;  // index into warnings_
    std::size_t count = 0;
    std::string example;
  };
  std::map<std::size_t, ZeroPotentials> zero_potentials_;  // by template
};

// Sum over potentials of weight * (max{l, 0})^p.
double energy(const HlMrf& mrf, std::span<const double> y);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::size_t> violated;
};

FeasibilityReport check_feasible(const HlMrf& mrf, std::span<const double> y, double tol);

// Per-template sums of unweighted potential values.
std::vector<double> template_features(const HlMrf& mrf, std::span<const double> y);

// Throws DimensionError unless y has one value in [0,1] per free variable.
void validate_assignment(const HlMrf& mrf, std::span<const double> y);

inline constexpr int kGroundModelVersion = 1;

// Versioned JSON ground-model format. Serialization is deterministic.
std::string to_json(const HlMrf& mrf);
HlMrf model_from_json(std::string_view text);

}  // namespace psl
