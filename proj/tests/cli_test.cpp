/* Copyright 2026 The Neural Pathways Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "np/weights_io.hpp"
#include "test_util.hpp"

using namespace np;

namespace {

const std::string kNpath = NP_NPATH;
const std::string kQuick =
    " --set stage1_epochs=3 --set stage2_epochs=3 --set baseline_epochs=2 --set width=8 ";

// Runs npath with `args` inside `dir`; stdout goes to dir/stdout.txt.
int npath(const np::testing::TempDir& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.path().string() + "' && '" + kNpath + "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t line_count(const std::filesystem::path& path) {
  const auto text = slurp(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Value column of the csv row whose first two fields are `model,metric`.
std::string metric(const std::string& csv, const std::string& key) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ",", 0) == 0) {
      const auto rest = line.substr(key.size() + 1);
      return rest.substr(0, rest.find(','));
    }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen") {
    np::testing::TempDir dir("cli_gen");
    CHECK(npath(dir, "gen --fn ackley --n 2 --s 150 --out ackley.csv") == 0);
    CHECK(line_count(dir / "ackley.csv") == 22501);
    CHECK(npath(dir, "gen --fn fbm --s 10000 --hurst 0.3 --chunk 1000 --out fbm.csv") == 0);
    CHECK(line_count(dir / "fbm.csv") == 10001);
    CHECK(npath(dir, "gen --fn mixture --classes 3 --dim 4 --per-class 10 --out mix.csv") == 0);
    CHECK(line_count(dir / "mix.csv") == 31);
    CHECK(std::filesystem::exists(dir / "mix.csv.json"));
    CHECK(npath(dir, "gen --n 2") == 2);
    CHECK(npath(dir, "gen --fn sphere --s 10") == 2);
    CHECK(npath(dir, "frobnicate") == 2);
  }

  TEST_CASE("train writes a model and is reproducible across thread counts") {
    np::testing::TempDir dir("cli_train");
    REQUIRE(npath(dir, "gen --fn rastrigin --s 40 --out data.csv") == 0);
    CHECK(npath(dir, "--out m1 --jobs 1" + kQuick + "train --data data.csv --K 4 --baseline") == 0);
    CHECK(npath(dir, "--out m2 --jobs 4" + kQuick + "train --data data.csv --K 4 --baseline") == 0);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto name = "pathway_00" + std::to_string(k) + ".npw";
      REQUIRE(std::filesystem::exists(dir / ("m1/" + name)));
      CHECK(slurp(dir / ("m1/" + name)) == slurp(dir / ("m2/" + name)));
    }
    CHECK_FALSE(std::filesystem::exists(dir / "m1/pathway_004.npw"));
    CHECK(std::filesystem::exists(dir / "m1/manifest.json"));
    CHECK(std::filesystem::exists(dir / "m1/report.csv"));
    CHECK(std::filesystem::exists(dir / "m1/config.conf"));
    CHECK(slurp(dir / "m1/baseline.npw") == slurp(dir / "m2/baseline.npw"));
    CHECK(load_weights(dir / "m1/baseline.npw").index == MultiIndex({2, 16, 16, 16, 1}));
    // the written config reproduces the run
    CHECK(npath(dir, "--config m1/config.conf --out m3 train") == 0);
    CHECK(slurp(dir / "m1/pathway_002.npw") == slurp(dir / "m3/pathway_002.npw"));
    CHECK(npath(dir, "--out m4 train --data missing.csv") == 3);
    CHECK(npath(dir, "--set nope=1 train --data data.csv") == 2);
  }

  TEST_CASE("eval reports routing cost and enforces the budget") {
    np::testing::TempDir dir("cli_eval");
    REQUIRE(npath(dir, "gen --fn ackley --s 40 --out data.csv") == 0);
    REQUIRE(npath(dir, "--out m" + kQuick + "train --data data.csv --K 16 --nu 2") == 0);
    CHECK(npath(dir, "--emit csv eval --model m --router tree") == 0);
    const auto tree = slurp(dir / "stdout.txt");
    CHECK(std::stoul(metric(tree, "pathways,max_queries_per_sample")) <= 8);
    CHECK(npath(dir, "--emit csv eval --model m --router brute") == 0);
    const auto brute = slurp(dir / "stdout.txt");
    CHECK(metric(brute, "pathways,max_queries_per_sample") == "16");
    CHECK(npath(dir, "--emit csv eval --model m --router tree --exact") == 0);
    CHECK(metric(slurp(dir / "stdout.txt"), "pathways,mse") == metric(brute, "pathways,mse"));
    CHECK(npath(dir, "--out ev eval --model m --budget 100000") == 0);
    CHECK(std::filesystem::exists(dir / "ev/metrics.csv"));
    CHECK(slurp(dir / "ev/ledger.csv").rfind("peak_resident,total_loaded,prototype_queries\n", 0) == 0);
    CHECK(npath(dir, "eval --model m --budget 10") == 4);
    CHECK(npath(dir, "eval --model nowhere") == 3);
  }

  TEST_CASE("calc") {
    np::testing::TempDir dir("cli_calc");
    CHECK(npath(dir, "--emit csv calc tree --C 4 --ratio 2 --v 2") == 0);
    const auto tree = slurp(dir / "stdout.txt");
    CHECK(tree.find("height,4\n") != std::string::npos);
    CHECK(tree.find("leaves,16\n") != std::string::npos);
    CHECK(tree.find("nodes,31\n") != std::string::npos);
    CHECK(npath(dir, "--emit csv calc dstar --J 1 --W 2") == 0);
    CHECK(slurp(dir / "stdout.txt").find("dstar,62\n") != std::string::npos);
    CHECK(npath(dir, "--emit csv calc vc --d 5 --n 3 --L 1") == 0);
    CHECK(slurp(dir / "stdout.txt").find("vc_bound,40\n") != std::string::npos);
    CHECK(npath(dir, "--emit csv calc depth --n 1 --m 1 --eps 0.5 --r 0") == 0);
    CHECK(slurp(dir / "stdout.txt").find("depth,32\n") != std::string::npos);
    CHECK(npath(dir, "--emit csv calc scaling --n 2 --alpha 1 --eps 0.01") == 0);
    CHECK(npath(dir, "calc tree --C 4 --ratio 2 --v 1") == 2);
  }
}
