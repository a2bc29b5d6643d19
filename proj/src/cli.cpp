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

#include "psl/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "psl/error.hpp"
#include "psl/ground.hpp"
#include "psl/infer.hpp"
#include "psl/lang.hpp"
#include "psl/learn.hpp"
#include "psl/logic.hpp"
#include "psl/synth.hpp"

namespace psl {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error("cannot write " + path);
}

Program load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

DataSet load_dataset(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return load_data(text);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// predicate<TAB>arg1,arg2<TAB>value
std::string format_assignment(const VariableTable& vars, std::span<const double> y, bool boolean = false) {
  std::string out;
  for (std::size_t i = 0; i < vars.num_free(); ++i) {
    const AtomId& atom = vars.free_atom(i);
    out += atom.predicate + "\t";
    for (std::size_t k = 0; k < atom.args.size(); ++k) out += (k ? "," : "") + atom.args[k];
    out += "\t" + (boolean ? std::to_string(static_cast<int>(y[i])) : fixed6(y[i])) + "\n";
  }
  return out;
}

std::vector<double> read_assignment(const VariableTable& vars, const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> y(vars.num_free(), 0.0);
  std::vector<char> seen(vars.num_free(), 0);
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(number) + ": ";
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw Error(where + "expected predicate<TAB>args<TAB>value");
    AtomId atom{line.substr(0, t1), {}};
    std::istringstream args(line.substr(t1 + 1, t2 - t1 - 1));
    for (std::string a; std::getline(args, a, ',');) atom.args.push_back(a);
    double v = 0.0;
    const char* end = line.data() + line.size();
    const auto res = std::from_chars(line.data() + t2 + 1, end, v);
    if (res.ec != std::errc() || res.ptr != end || !(v >= 0.0 && v <= 1.0)) {
      throw Error(where + "value must be a number in [0,1]");
    }
    const auto idx = vars.find_free(atom);
    if (!idx) throw Error(where + to_string(atom) + " is not a free variable of the model");
    y[*idx] = v;
    seen[*idx] = 1;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!seen[i]) throw Error(path + ": no value for " + to_string(vars.free_atom(i)));
  }
  return y;
}

struct ModelArgs {
  std::string model;
  std::string program;
  std::string data;
  std::string weights;
  bool prune = false;
  int workers = 0;

  void add_to(CLI::App* app, bool allow_json) {
    if (allow_json) app->add_option("--model", model, "Ground model JSON written by `ground`");
    app->add_option("--program", program, "Rule file");
    app->add_option("--data", data, "Data file");
    app->add_option("--weights", weights, "Weights file replacing rule weights");
    app->add_flag("--prune", prune, "Drop trivially satisfied ground potentials and constraints");
  }

  HlMrf build(std::ostream& err) const {
    HlMrf mrf;
    if (!model.empty()) {
      if (!program.empty() || !data.empty()) throw Error("give either --model or --program with --data");
      mrf = model_from_json(read_file(model));
    } else {
      if (program.empty() || data.empty()) throw Error("--program and --data are required");
      mrf = ground_program(load_program(program), load_dataset(data), {.prune = prune, .workers = workers});
    }
    for (const auto& w : mrf.warnings()) err << "warning: " << w << "\n";
    if (!weights.empty()) {
      const auto parsed = parse_weights(read_file(weights));
      mrf = apply_weights(mrf, parsed);
    }
    return mrf;
  }
};

void add_solve_options(CLI::App* app, SolveOptions& opts, bool& trace) {
  app->add_option("--rho", opts.rho, "ADMM step size")->check(CLI::PositiveNumber);
  app->add_option("--eps-abs", opts.eps_abs, "Absolute residual tolerance")->check(CLI::PositiveNumber);
  app->add_option("--eps-rel", opts.eps_rel, "Relative residual tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", opts.max_iterations, "Iteration limit");
  app->add_option("--workers", opts.workers, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
  app->add_flag("--trace", trace, "Write per-iteration diagnostics to stderr");
}

SolveResult run_inference(const HlMrf& mrf, SolveOptions opts, bool lazy, bool trace, std::ostream& err) {
  if (trace) opts.trace = [&err](const IterationRecord& r) { err << to_string(r) << "\n"; };
  SolveResult res;
  if (lazy) {
    const LazyResult lr = solve_map_lazy(mrf, opts);
    err << "lazy: " << lr.rounds << " rounds, " << lr.activated_potentials << " potentials and "
        << lr.activated_constraints << " constraints active\n";
    res = lr.result;
  } else {
    res = solve_map(mrf, opts);
  }
  if (res.status == SolveStatus::kInfeasible) throw Error("inference failed: " + res.message);
  err << "status: " << to_string(res.status) << ", iterations: " << res.iterations
      << ", objective: " << format_number(res.objective) << "\n";
  return res;
}

// Reads a ground model as weighted MAX SAT clauses. Every potential must be a
// linear hinge over +-1 coefficients whose observed part is 0 or 1.
std::vector<Clause> model_clauses(const HlMrf& mrf) {
  std::vector<Clause> clauses;
  for (const auto& pot : mrf.potentials()) {
    const double w = mrf.weight_of(pot);
    if (w == 0.0) continue;
    Clause c;
    c.weight = w;
    bool ok = pot.exponent == 1;
    for (const auto& t : pot.fn.terms()) {
      if (t.coeff == -1.0) {
        c.positive.push_back(t.var);
      } else if (t.coeff == 1.0) {
        c.negative.push_back(t.var);
      } else {
        ok = false;
      }
    }
    // l = 1 - sum pos - sum (1 - neg) - observed part
    const double observed = 1.0 - static_cast<double>(c.negative.size()) - pot.fn.constant();
    if (ok && std::abs(observed - 1.0) < 1e-9) continue;  // satisfied by evidence
    if (!ok || std::abs(observed) > 1e-9) {
      throw UnsupportedStructure("round needs disjunctive clauses over Boolean evidence; " + pot.origin +
                                 " does not qualify");
    }
    clauses.push_back(std::move(c));
  }
  return clauses;
}

std::vector<EdgeTypeSpec> parse_edge_types(const std::vector<std::string>& specs) {
  std::vector<EdgeTypeSpec> out;
  for (const auto& s : specs) {
    EdgeTypeSpec t;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(s);
    if (!(in >> t.gamma >> sep1 >> t.alpha >> sep2 >> t.weight) || sep1 != ',' || sep2 != ',' || !in.eof()) {
      throw Error("edge type must be gamma,alpha,weight; got " + s);
    }
    out.push_back(t);
  }
  return out;
}

// Splices "--key=value" for each config line right after the subcommand, so
// later command-line occurrences win.
std::vector<std::string> with_config(std::span<const std::string> args) {
  std::vector<std::string> out(args.begin(), args.end());
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty() || out.empty()) return out;
  std::istringstream in(read_file(path));
  std::vector<std::string> extra;
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw Error(path + ":" + std::to_string(number) + ": expected key=value");
    }
    extra.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  out.insert(out.begin() + 1, extra.begin(), extra.end());
  return out;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic soft logic: grounding, MAP inference and weight learning", "psl"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough(false);

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value file of long options; command-line flags take precedence");
  };
  std::string output;
  auto add_common = [&](CLI::App* sub) {
    add_config(sub);
    sub->add_option("-o,--output", output, "Output file (default stdout)");
  };

  // validate
  std::string v_program, v_data;
  auto* validate = app.add_subcommand("validate", "Parse a program and optionally type-check it against data");
  validate->add_option("--program", v_program, "Rule file")->required();
  validate->add_option("--data", v_data, "Data file to ground against");
  add_config(validate);

  // ground
  ModelArgs g_args;
  auto* ground = app.add_subcommand("ground", "Ground a program over data and write the model as JSON");
  g_args.add_to(ground, false);
  ground->add_option("--workers", g_args.workers, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
  add_common(ground);

  // infer
  ModelArgs i_args;
  SolveOptions i_opts;
  bool i_lazy = false, i_trace = false;
  auto* infer = app.add_subcommand("infer", "MAP inference; writes predicate, arguments and value as TSV");
  i_args.add_to(infer, true);
  add_solve_options(infer, i_opts, i_trace);
  infer->add_flag("--lazy", i_lazy, "Lazy MAP inference");
  infer->add_option("--threshold", i_opts.activation_threshold, "Lazy activation threshold")
      ->check(CLI::NonNegativeNumber);
  add_common(infer);

  // learn
  std::string l_program, l_weights_in;
  std::vector<std::string> l_data, l_truth;
  std::string l_method = "mle";
  std::size_t l_steps = 100, l_max_cuts = 200, l_quadrature = 1025;
  double l_step_size = 1.0, l_c = 0.1;
  std::uint64_t l_seed = 0;
  bool l_prune = false, l_trace = false;
  SolveOptions l_opts;
  auto* learn = app.add_subcommand("learn", "Learn rule weights from training data; writes a weights file");
  learn->add_option("--program", l_program, "Rule file")->required();
  learn->add_option("--data", l_data, "Data file (repeat for several instances)")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  learn->add_option("--truth", l_truth, "Truth TSV for the matching --data")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  learn->add_option("--method", l_method, "mle, mple or lme")->check(CLI::IsMember({"mle", "mple", "lme"}));
  learn->add_option("--steps", l_steps, "Gradient steps (mle, mple)");
  learn->add_option("--step-size", l_step_size, "Gradient step size (mle, mple)")->check(CLI::PositiveNumber);
  learn->add_option("--C", l_c, "Slack penalty (lme)")->check(CLI::PositiveNumber);
  learn->add_option("--max-cuts", l_max_cuts, "Cutting-plane rounds (lme)");
  learn->add_option("--quadrature", l_quadrature, "Quadrature points per variable (mple)");
  learn->add_option("--seed", l_seed, "Simplex sampling seed (mple)");
  learn->add_option("--initial-weights", l_weights_in, "Weights file to start from");
  learn->add_flag("--prune", l_prune, "Drop trivially satisfied ground potentials and constraints");
  add_solve_options(learn, l_opts, l_trace);
  add_common(learn);

  // round
  ModelArgs r_args;
  std::string r_values;
  SolveOptions r_opts;
  bool r_trace = false;
  auto* round = app.add_subcommand("round", "Round a relaxed solution of a clause model to 0/1 values");
  r_args.add_to(round, true);
  round->add_option("--values", r_values, "Relaxed TSV; inferred when omitted");
  add_solve_options(round, r_opts, r_trace);
  add_common(round);

  // synth-network
  SynthNetworkSpec s_spec;
  std::vector<std::string> s_edges;
  std::string s_data_out, s_program_out;
  auto* synth = app.add_subcommand("synth-network", "Generate a power-law social network opinion model");
  synth->add_option("--users", s_spec.users, "Target number of users");
  synth->add_option("--seed", s_spec.seed, "Random seed");
  synth->add_option("--opinion-weight", s_spec.opinion_weight, "Weight of the prior opinion rule");
  synth->add_flag("--squared", s_spec.squared, "Squared hinge potentials");
  synth->add_option("--edge-type", s_edges, "gamma,alpha,weight (repeat; replaces the six defaults)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  synth->add_option("--data-out", s_data_out, "Data file to write")->required();
  synth->add_option("--program-out", s_program_out, "Rule file to write")->required();
  add_config(synth);

  std::vector<std::string> argv;
  try {
    argv = with_config(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (validate->parsed()) {
      const Program program = load_program(v_program);
      out << "program: " << program.rules.size() << " rules\n";
      if (!v_data.empty()) {
        const HlMrf mrf = ground_program(program, load_dataset(v_data), {.prune = true});
        for (const auto& w : mrf.warnings()) err << "warning: " << w << "\n";
        out << "model: " << mrf.num_free() << " variables, " << mrf.potentials().size() << " potentials, "
            << mrf.constraints().size() << " constraints\n";
      }
    } else if (ground->parsed()) {
      write_output(output, to_json(g_args.build(err)), out);
    } else if (infer->parsed()) {
      i_args.workers = i_opts.workers;
      const HlMrf mrf = i_args.build(err);
      const SolveResult res = run_inference(mrf, i_opts, i_lazy, i_trace, err);
      write_output(output, format_assignment(mrf.variables(), res.y), out);
    } else if (learn->parsed()) {
      if (l_data.size() != l_truth.size()) throw Error("give one --truth per --data");
      const Program program = load_program(l_program);
      std::vector<TrainingInstance> instances;
      for (std::size_t k = 0; k < l_data.size(); ++k) {
        HlMrf mrf = ground_program(program, load_dataset(l_data[k]), {.prune = l_prune, .workers = l_opts.workers});
        for (const auto& w : mrf.warnings()) err << "warning: " << w << "\n";
        if (!l_weights_in.empty()) mrf = apply_weights(mrf, parse_weights(read_file(l_weights_in)));
        std::vector<double> truth = read_assignment(mrf.variables(), l_truth[k]);
        instances.push_back({std::move(mrf), std::move(truth)});
      }
      if (l_trace) l_opts.trace = [&err](const IterationRecord& r) { err << to_string(r) << "\n"; };
      std::vector<double> weights;
      if (l_method == "mle") {
        weights = perceptron_train(instances, {l_steps, l_step_size, l_opts}).weights;
      } else if (l_method == "mple") {
        MpleTrainOptions o{l_steps, l_step_size, {}};
        o.mple.quadrature_points = l_quadrature;
        o.mple.seed = l_seed;
        weights = mple_train(instances, o).weights;
      } else {
        const LmeResult r = lme_train(instances, {l_c, 1e-3, l_max_cuts, l_opts});
        err << "lme: " << r.cuts.size() << " cuts, slack " << format_number(r.slack)
            << (r.converged ? "" : ", cut limit reached") << "\n";
        weights = r.weights;
      }
      write_output(output, format_weights(instances[0].mrf, weights), out);
    } else if (round->parsed()) {
      r_args.workers = r_opts.workers;
      const HlMrf mrf = r_args.build(err);
      const std::vector<Clause> clauses = model_clauses(mrf);
      if (!mrf.constraints().empty()) err << "warning: rounding ignores " << mrf.constraints().size() << " hard constraints\n";
      const std::vector<double> relaxed = r_values.empty()
                                              ? run_inference(mrf, r_opts, false, r_trace, err).y
                                              : read_assignment(mrf.variables(), r_values);
      const std::vector<double> probs = rounding_probs(relaxed);
      const std::vector<int> x = derandomize(clauses, probs);
      err << "expected score: " << format_number(expected_score(clauses, probs))
          << ", rounded score: " << format_number(boolean_score(clauses, x)) << "\n";
      const std::vector<double> xd(x.begin(), x.end());
      write_output(output, format_assignment(mrf.variables(), xd, true), out);
    } else if (synth->parsed()) {
      if (!s_edges.empty()) s_spec.edge_types = parse_edge_types(s_edges);
      const SynthNetwork net = generate_network(s_spec);
      write_output(s_data_out, net.data, out);
      write_output(s_program_out, net.program, out);
      std::size_t edges = 0;
      for (auto e : net.edges) edges += e;
      err << "users: " << net.users << " (of " << net.initial_users << " sampled), edges: " << edges << "\n";
    }
  } catch (const GroundingError& e) {
    for (const auto& m : e.messages()) err << "error: " << m << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace psl
