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

#include <string>

#include "json.hpp"
#include "psl/error.hpp"
#include "psl/model.hpp"

namespace psl {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormatName = "psl-ground-model";

Json atom_json(const AtomId& atom) {
  Json j;
  j["predicate"] = atom.predicate;
  j["args"] = atom.args;
  return j;
}

AtomId atom_from(const Json& j) {
  return {j.at("predicate").get<std::string>(), j.at("args").get<std::vector<std::string>>()};
}

Json function_terms(const LinearFunction& fn) {
  Json terms = Json::array();
  for (const auto& t : fn.terms()) terms.push_back(Json::array({t.var, t.coeff}));
  return terms;
}

LinearFunction function_from(const Json& j) {
  LinearFunction fn(j.at("constant").get<double>());
  for (const auto& t : j.at("terms")) {
    fn.add_term(t.at(0).get<std::size_t>(), t.at(1).get<double>());
  }
  return fn;
}

}  // namespace

std::string to_json(const HlMrf& mrf) {
  Json root;
  root["format"] = kFormatName;
  root["version"] = kGroundModelVersion;

  Json free = Json::array();
  for (const auto& atom : mrf.variables().free_atoms()) free.push_back(atom_json(atom));
  root["free"] = std::move(free);

  Json observed = Json::array();
  for (const auto& o : mrf.variables().observed()) {
    Json j = atom_json(o.atom);
    j["value"] = o.value;
    observed.push_back(std::move(j));
  }
  root["observed"] = std::move(observed);

  Json templates = Json::array();
  for (const auto& t : mrf.templates()) {
    templates.push_back({{"source", t.source}, {"weight", t.weight}, {"groundings", t.groundings}});
  }
  root["templates"] = std::move(templates);

  Json potentials = Json::array();
  for (const auto& p : mrf.potentials()) {
    Json j;
    j["template"] = p.template_id;
    j["exponent"] = p.exponent;
    j["constant"] = p.fn.constant();
    j["terms"] = function_terms(p.fn);
    j["origin"] = p.origin;
    potentials.push_back(std::move(j));
  }
  root["potentials"] = std::move(potentials);

  Json constraints = Json::array();
  for (const auto& c : mrf.constraints()) {
    Json j;
    j["kind"] = c.kind == ConstraintKind::kEquality ? "eq" : "le";
    j["constant"] = c.fn.constant();
    j["terms"] = function_terms(c.fn);
    j["origin"] = c.origin;
    constraints.push_back(std::move(j));
  }
  root["constraints"] = std::move(constraints);
  root["warnings"] = mrf.warnings();
  return root.dump(1) + "\n";
}

HlMrf model_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(std::string("ground model is not valid JSON: ") + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != kFormatName) {
      throw ModelError("not a ground-model file");
    }
    const int version = root.at("version").get<int>();
    if (version != kGroundModelVersion) {
      throw ModelError("unsupported ground-model version " + std::to_string(version));
    }
    VariableTable vars;
    for (const auto& a : root.at("free")) vars.add_free(atom_from(a));
    for (const auto& a : root.at("observed")) vars.add_observed(atom_from(a), a.at("value").get<double>());

    HlMrf mrf(std::move(vars));
    std::vector<std::size_t> expected_groundings;
    for (const auto& t : root.at("templates")) {
      mrf.add_template(t.at("source").get<std::string>(), t.at("weight").get<double>());
      expected_groundings.push_back(t.at("groundings").get<std::size_t>());
    }
    for (const auto& p : root.at("potentials")) {
      mrf.add_potential({function_from(p), p.at("exponent").get<int>(), p.at("template").get<std::size_t>(),
                         p.value("origin", std::string{})});
    }
    for (const auto& c : root.at("constraints")) {
      const auto kind = c.at("kind").get<std::string>();
      if (kind != "eq" && kind != "le") throw ModelError("unknown constraint kind '" + kind + "'");
      mrf.add_constraint({function_from(c), kind == "eq" ? ConstraintKind::kEquality : ConstraintKind::kAtMostZero,
                          c.value("origin", std::string{})});
    }
    for (std::size_t q = 0; q < expected_groundings.size(); ++q) {
      if (mrf.templates()[q].groundings != expected_groundings[q]) {
        throw ModelError("template " + std::to_string(q) + " grounding count does not match its potentials");
      }
    }
    if (root.contains("warnings")) {
      mrf.clear_warnings();
      for (const auto& w : root.at("warnings")) mrf.add_warning(w.get<std::string>());
    }
    return mrf;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed ground model: ") + e.what());
  }
}

}  // namespace psl
