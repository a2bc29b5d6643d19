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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psl/cli.hpp"
#include "psl/ground.hpp"
#include "psl/infer.hpp"
#include "psl/learn.hpp"

namespace psl {
namespace {

namespace fs = std::filesystem;

const std::string kRoot = PSL_SOURCE_DIR;
const std::string kFixtures = kRoot + "/data/fixtures/";

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("psl_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

TEST_F(Cli, ValidateCorpus) {
  for (const auto& entry : fs::directory_iterator(kRoot + "/data/programs")) {
    if (entry.path().extension() != ".psl") continue;
    const Outcome r = run({"validate", "--program", entry.path().string()});
    EXPECT_EQ(r.code, 0) << entry.path() << "\n" << r.err;
  }
  const Outcome r = run({"validate", "--program", kRoot + "/data/programs/cora.psl", "--data",
                     kRoot + "/data/programs/cora.data"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("4 constraints"), std::string::npos);
}

TEST_F(Cli, InferSquaredFixture) {
  const Outcome r = run({"infer", "--program", kFixtures + "squared.psl", "--data", kFixtures + "squared.data",
                     "--eps-abs", "1e-8", "--eps-rel", "1e-8", "--max-iter", "200000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "Label\ta\t0.650000\nLabel\tb\t0.350000\n");
}

TEST_F(Cli, UsageErrors) {
  Outcome r = run({"infer", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"learn", "--program", "x.psl", "--data", "x.data", "--truth", "t", "--method", "svm"}).code, 2);
  EXPECT_EQ(run({"infer", "--rho", "-1"}).code, 2);
  r = run({"infer", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--lazy"), std::string::npos);
}

TEST_F(Cli, RuntimeErrorsCarryLocations) {
  write("bad.psl", "1 : Friends(A, B) -> \n");
  Outcome r = run({"validate", "--program", path("bad.psl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(path("bad.psl") + ":"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":1:") , std::string::npos) << r.err;

  r = run({"infer", "--program", path("missing.psl"), "--data", kFixtures + "squared.data"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("cannot read"), std::string::npos);

  write("unknown.psl", "1 : Nope(A) -> Label(A)\n");
  r = run({"infer", "--program", path("unknown.psl"), "--data", kFixtures + "squared.data"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST_F(Cli, GroundThenInferMatchesOneShot) {
  const std::string prog = kRoot + "/data/programs/cora.psl", data = kRoot + "/data/programs/cora.data";
  ASSERT_EQ(run({"ground", "--program", prog, "--data", data, "-o", path("m.json")}).code, 0);
  const Outcome a = run({"infer", "--model", path("m.json")});
  const Outcome b = run({"infer", "--program", prog, "--data", data});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);

  const HlMrf direct = ground_program(parse_program(slurp(prog)), load_data(slurp(data)));
  const HlMrf loaded = model_from_json(slurp(path("m.json")));
  EXPECT_NEAR(solve_map(direct).objective, solve_map(loaded).objective, 1e-9);
}

TEST_F(Cli, ConfigFileBelowFlags) {
  write("tight.cfg", "# solver\neps-abs = 1e-8\neps-rel=1e-8\nmax-iter=200000\n");
  const std::vector<std::string> base{"infer", "--program", kFixtures + "squared.psl", "--data",
                                      kFixtures + "squared.data", "--config", path("tight.cfg")};
  Outcome r = run(base);
  EXPECT_EQ(r.out, "Label\ta\t0.650000\nLabel\tb\t0.350000\n");
  EXPECT_NE(r.err.find("converged"), std::string::npos);
  auto limited = base;
  limited.insert(limited.end(), {"--max-iter", "2"});
  r = run(limited);
  EXPECT_NE(r.err.find("iterations: 2,"), std::string::npos) << r.err;

  write("bad.cfg", "nonsense\n");
  EXPECT_EQ(run({"infer", "--config", path("bad.cfg")}).code, 2);
  write("unknown.cfg", "colour=blue\n");
  EXPECT_EQ(run({"infer", "--config", path("unknown.cfg")}).code, 2);
}

TEST_F(Cli, TraceAndLazy) {
  const Outcome r = run({"infer", "--program", kFixtures + "squared.psl", "--data", kFixtures + "squared.data",
                     "--trace", "--lazy", "--max-iter", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("iter=1 "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("lazy:"), std::string::npos);
}

TEST_F(Cli, WeightsFileChangesInference) {
  write("w.txt", "# psl-weights v1\n0\t1 : Evidence(A) -> Label(A) ^2\n");
  const Outcome r = run({"infer", "--program", kFixtures + "squared.psl", "--data", kFixtures + "squared.data",
                     "--weights", path("w.txt")});
  EXPECT_EQ(r.code, 0) << r.err;
  write("bad.txt", "# psl-weights v1\n1\tno such rule\n");
  EXPECT_EQ(run({"infer", "--program", kFixtures + "squared.psl", "--data", kFixtures + "squared.data",
                 "--weights", path("bad.txt")})
                .code,
            1);
}

TEST_F(Cli, LearnMethodsWriteWeights) {
  const std::string prog = kRoot + "/data/programs/cora.psl", data = kRoot + "/data/programs/cora.data";
  write("truth.tsv",
        "HasCat\td2,ai\t1\nHasCat\td2,db\t0\nHasCat\td3,ai\t1\nHasCat\td3,db\t0\n"
        "HasCat\td4,ai\t0\nHasCat\td4,db\t1\nHasCat\td5,ai\t0\nHasCat\td5,db\t1\n");
  for (const std::string method : {"mle", "mple", "lme"}) {
    const Outcome r = run({"learn", "--method", method, "--steps", "5", "--program", prog, "--data", data, "--truth",
                       path("truth.tsv"), "-o", path(method + ".w")});
    ASSERT_EQ(r.code, 0) << method << ": " << r.err;
    const auto weights = parse_weights(slurp(path(method + ".w")));
    EXPECT_EQ(weights.size(), 3u);
    EXPECT_EQ(run({"infer", "--program", prog, "--data", data, "--weights", path(method + ".w")}).code, 0);
  }
  write("short.tsv", "HasCat\td2,ai\t1\n");
  const Outcome r = run({"learn", "--program", prog, "--data", data, "--truth", path("short.tsv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no value for"), std::string::npos);
}

TEST_F(Cli, RoundClauseModel) {
  const std::vector<std::string> base{"round", "--prune", "--program", kFixtures + "smokers.psl", "--data",
                                      kFixtures + "smokers.data"};
  const Outcome r = run(base);
  ASSERT_EQ(r.code, 0) << r.err;
  // Derandomized score never falls below the rounding expectation.
  double expected = 0.0, rounded = 0.0;
  ASSERT_EQ(std::sscanf(r.err.substr(r.err.find("expected score")).c_str(),
                        "expected score: %lf, rounded score: %lf", &expected, &rounded),
            2);
  EXPECT_GE(rounded, expected - 1e-9);
  std::istringstream lines(r.out);
  std::size_t count = 0;
  for (std::string line; std::getline(lines, line); ++count) {
    EXPECT_TRUE(line.ends_with("\t0") || line.ends_with("\t1")) << line;
  }
  EXPECT_EQ(count, 4u);
  // Squared potentials are not clauses.
  EXPECT_EQ(run({"round", "--program", kFixtures + "friends.psl", "--data", kFixtures + "friends.data"}).code, 1);
}

TEST_F(Cli, SynthNetworkDeterministic) {
  for (const std::string tag : {"a", "b"}) {
    ASSERT_EQ(run({"synth-network", "--users", "80", "--seed", "5", "--data-out", path(tag + ".data"),
                   "--program-out", path(tag + ".psl")})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("a.data")), slurp(path("b.data")));
  EXPECT_EQ(slurp(path("a.psl")), slurp(path("b.psl")));
  const Outcome x = run({"infer", "--prune", "--program", path("a.psl"), "--data", path("a.data")});
  const Outcome y = run({"infer", "--prune", "--program", path("b.psl"), "--data", path("b.data")});
  EXPECT_EQ(x.code, 0);
  EXPECT_EQ(x.out, y.out);

  EXPECT_EQ(run({"synth-network", "--users", "80", "--edge-type", "2.5,0.5,1", "--edge-type", "3,0.2,0.5",
                 "--data-out", path("c.data"), "--program-out", path("c.psl")})
                .code,
            0);
  EXPECT_NE(slurp(path("c.psl")).find("Edge2"), std::string::npos);
  EXPECT_EQ(slurp(path("c.psl")).find("Edge3"), std::string::npos);
  EXPECT_EQ(run({"synth-network", "--edge-type", "1.5,0.5,1", "--data-out", path("d.data"), "--program-out",
                 path("d.psl")})
                .code,
            1);
}

}  // namespace
}  // namespace psl
