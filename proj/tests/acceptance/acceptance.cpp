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
// Acceptance checks. Usage: np_acceptance [criterion...]; with no argument
// every criterion runs. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "gradient_check.hpp"
#include "np/bounds.hpp"
#include "np/experiment.hpp"
#include "np/manifest.hpp"
#include "np/memory_ledger.hpp"
#include "np/weights_io.hpp"
#include "test_util.hpp"

using namespace np;
using np::testing::random_matrix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Analytic against central-difference gradients.
Outcome gradient_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2026);
  double forward_worst = 0.0, energy_worst = 0.0;
  std::size_t forward_checked = 0, energy_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const MlpParams net = np::testing::random_net(np::testing::random_dims(rng, 8, 4), 7000 + t);
    const Vector x = np::testing::random_vector(rng, static_cast<Eigen::Index>(net.input_dim()));
    const Vector u = np::testing::random_vector(rng, static_cast<Eigen::Index>(net.output_dim()));
    if (np::testing::kink_distance(net, x) < 1e-3) continue;
    forward_worst = std::max(forward_worst, np::testing::gradient_error(net, x, u));
    ++forward_checked;
  }
  const LossKind kinds[] = {LossKind::MSE, LossKind::CrossEntropy, LossKind::WeightedCrossEntropy};
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto r = np::testing::energy_gradient_check(8000 + t, kinds[t % 3]);
    if (r.samples == 0) continue;
    energy_worst = std::max(energy_worst, r.worst);
    ++energy_checked;
  }
  const double secs = seconds_since(start);
  return {forward_worst <= 1e-5 && energy_worst <= 1e-4 && forward_checked >= 50 && energy_checked >= 50 &&
              secs < 60.0,
          "forward max rel err " + fmt(forward_worst) + " over " + std::to_string(forward_checked) +
              " nets, energy max rel err " + fmt(energy_worst) + " over " + std::to_string(energy_checked) +
              " ensembles, " + fmt(secs) + " s"};
}

// 2. Identity-layer insertion leaves every output unchanged.
Outcome deepening_identity() {
  Rng rng(77);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto kind = t % 5 == 4 ? Activation::SuperExpressive : Activation::PReLU;
    const MlpParams net = np::testing::random_net(np::testing::random_dims(rng, 8, 4), 300 + t, kind);
    const MlpParams deep = deepen(net, 1 + rng.below(3), 0.0, 5);
    const Matrix x = random_matrix(rng, static_cast<Eigen::Index>(net.input_dim()), 1000, -3.0, 3.0);
    worst = std::max(worst, (forward_batch(deep, x) - forward_batch(net, x)).cwiseAbs().maxCoeff());
  }
  return {worst == 0.0, "max abs diff " + fmt(worst) + " over 50 nets x 1000 inputs"};
}

// 3. Closed-form values reproduced by tests/oracles/bounds_oracle.py.
Outcome formula_golden_set() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  const auto counts = tree_counts(2, 3);
  expect(counts.leaves == 8 && counts.nodes == 15, "tree_counts(2,3)");
  expect(height_bound(4.0, 1.0, 2.0, 2) == 4, "height_bound");
  const auto dw = bounds::pathway_depth_width(1, 1, 0.5, 0.0);
  expect(dw.depth == 32 && dw.width == 49, "pathway_depth_width");
  for (double eps : {1.0, 0.1, 0.01})
    expect(std::abs(bounds::theorem_delta(1, 1, eps, 0.0, {1.0, 1.0}) * 262.0 / eps - 1.0) < 1e-14, "theorem_delta");
  for (int d = 1; d <= 64; ++d) expect(bounds::vc_pathways_bound(d, 2, 1).ceiling == 8 * d, "vc_pathways_bound");
  expect(bounds::vc_mlp_dstar(1, 2) == 62, "vc_mlp_dstar");
  std::string detail = failed.empty() ? "all values match" : "mismatch:";
  for (const auto& f : failed) detail += " " + f;
  return {failed.empty(), detail};
}

// 4. Voronoi assignment and covering nets against exhaustive scans.
Outcome partition_correctness() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(404);
  const PrototypeSet protos(random_matrix(rng, 3, 32));
  const Matrix x = random_matrix(rng, 3, 100000, -1.5, 1.5);
  std::size_t mismatches = 0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t k = 0; k < 32; ++k) {
      double d = 0.0;
      for (Eigen::Index r = 0; r < 3; ++r) {
        const double diff = x(r, i) - protos.points()(r, static_cast<Eigen::Index>(k));
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    mismatches += assign(x.col(i), protos) != best;
  }
  const Matrix pts = random_matrix(rng, 2, 10000, 0.0, 1.0);
  const double delta = 0.05;
  const auto net = greedy_cover(pts, delta);
  double radius = 0.0, separation = INFINITY;
  const Matrix& c = net.centers;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    radius = std::max(radius, (c.colwise() - pts.col(i)).colwise().norm().minCoeff());
  for (Eigen::Index i = 0; i < c.cols(); ++i)
    for (Eigen::Index j = i + 1; j < c.cols(); ++j) separation = std::min(separation, (c.col(i) - c.col(j)).norm());
  const double secs = seconds_since(start);
  return {mismatches == 0 && radius <= delta && separation >= delta && secs < 60.0,
          std::to_string(mismatches) + " assignment mismatches in 1e5, cover of " + std::to_string(c.cols()) +
              " centers radius " + fmt(radius) + " separation " + fmt(separation) + " (delta " + fmt(delta) +
              "), " + fmt(secs) + " s"};
}

// 5. Budgeted inference keeps one pathway resident.
Outcome memory_accounting() {
  bool ok = true;
  std::string detail;
  for (std::size_t k : {4, 16}) {
    np::testing::TempDir dir("accept_ledger");
    const auto ens = np::testing::random_ensemble(k, 2, 1, {32}, 50 + k);
    const auto tree = build_tree(ens.protos, 2, 0);
    const auto manifest = save_model(ens, dir.path(), &tree);
    const std::size_t one = ens.nets[0].stored_scalar_count();
    const std::size_t tree_limit = 2 * ceil_log(k, 2);
    std::size_t peak = 0, brute_queries = 0, tree_queries = 0;
    Rng rng(k);
    for (int i = 0; i < 200; ++i) {
      const Vector x = np::testing::random_vector(rng, 2);
      const auto b = forward_with_budget(manifest, dir.path(), x, one);
      const auto t = forward_with_budget(manifest, dir.path(), x, one, Router::with_tree(tree));
      ok = ok && b.ledger.peak == one && t.ledger.peak == one && b.ledger.prototype_queries == k &&
           t.ledger.prototype_queries <= tree_limit;
      peak = std::max({peak, b.ledger.peak, t.ledger.peak});
      brute_queries = std::max(brute_queries, b.ledger.prototype_queries);
      tree_queries = std::max(tree_queries, t.ledger.prototype_queries);
    }
    detail += "K=" + std::to_string(k) + ": peak " + std::to_string(peak) + " (pathway " + std::to_string(one) +
              "), queries brute " + std::to_string(brute_queries) + ", tree max " + std::to_string(tree_queries) +
              " (limit " + std::to_string(tree_limit) + ")";
    if (k == 4) detail += "; ";
  }
  return {ok, detail};
}

// 6. Desk-scale regression ordering on 2-D Ackley and Rastrigin.
Outcome regression_ordering() {
  const auto start = std::chrono::steady_clock::now();
  const Protocol protocol = default_regression_protocol();
  bool ok = true;
  std::string detail;
  for (auto fn : {BenchFunction::Ackley, BenchFunction::Rastrigin}) {
    RegressionTask task;
    task.function = fn;
    std::size_t wins = 0;
    double ours = 0.0, base = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto r = run_regression(task.make(seed), protocol, seed);
      std::cerr << to_string(fn) << " seed " << seed << ": pathways " << fmt(r.pathways_mse) << " baseline "
                << fmt(r.baseline_mse) << '\n';
      wins += r.pathways_mse < r.baseline_mse;
      ours += r.pathways_mse / 10.0;
      base += r.baseline_mse / 10.0;
    }
    ok = ok && wins >= 8;
    detail += to_string(fn) + " wins " + std::to_string(wins) + "/10, mean mse " + fmt(ours) + " vs " + fmt(base) + "; ";
  }
  const double secs = seconds_since(start);
  ok = ok && secs <= 1800.0;
  return {ok, detail + fmt(secs) + " s"};
}

// 7. 1-D fBm path with Hurst 0.3.
Outcome holder_ordering() {
  const auto start = std::chrono::steady_clock::now();
  const Protocol protocol = default_regression_protocol();
  RegressionTask task;
  task.kind = RegressionTask::Kind::Fbm;
  task.grid = 10000;
  task.hurst = 0.3;
  double ours = 0.0, base = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = run_regression(task.make(seed), protocol, seed);
    std::cerr << "fbm seed " << seed << ": pathways " << fmt(r.pathways_mse) << " baseline " << fmt(r.baseline_mse)
              << '\n';
    ours += r.pathways_mse / 10.0;
    base += r.baseline_mse / 10.0;
  }
  const double secs = seconds_since(start);
  return {ours <= base && secs <= 1200.0,
          "mean mse pathways " + fmt(ours) + " vs baseline " + fmt(base) + ", " + fmt(secs) + " s"};
}

// 8. Synthetic classification parity.
Outcome classification_parity() {
  const auto start = std::chrono::steady_clock::now();
  const Protocol protocol = default_classification_protocol();
  const ClassificationTask task;
  double w = 0.0, u = 0.0, b = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = run_classification(task.make(seed), protocol, seed);
    std::cerr << "classify seed " << seed << ": weighted " << fmt(r.weighted_accuracy) << " unweighted "
              << fmt(r.unweighted_accuracy) << " baseline " << fmt(r.baseline_accuracy) << '\n';
    w += r.weighted_accuracy / 10.0;
    u += r.unweighted_accuracy / 10.0;
    b += r.baseline_accuracy / 10.0;
  }
  const double secs = seconds_since(start);
  const bool ok = b >= 0.85 && b <= 0.95 && std::abs(w - b) <= 0.02 && std::abs(u - b) <= 0.02 && secs <= 600.0;
  return {ok, "mean accuracy weighted " + fmt(w) + ", unweighted " + fmt(u) + ", baseline " + fmt(b) +
                  " (separation " + fmt(task.separation) + "), " + fmt(secs) + " s"};
}

// 9. Bit-exact persistence and the committed golden file.
Outcome persistence() {
  Rng rng(99);
  std::size_t exact = 0;
  for (int t = 0; t < 100; ++t) {
    np::testing::TempDir dir("accept_persist");
    const std::size_t k = 1 + rng.below(4), n = 1 + rng.below(4), m = 1 + rng.below(3);
    const auto ens = np::testing::random_ensemble(k, n, m, {1 + rng.below(12), 1 + rng.below(12)}, 600 + t);
    save_model(ens, dir.path());
    const auto back = load_model(dir.path()).ensemble;
    bool same = back.protos == ens.protos;
    for (std::size_t i = 0; i < k; ++i) same = same && np::testing::bit_identical(back.nets[i], ens.nets[i]);
    exact += same;
  }
  const auto golden = std::filesystem::path(NP_TEST_DATA_DIR) / "golden_v1.npw";
  const bool golden_ok = np::testing::bit_identical(load_weights(golden), np::testing::golden_net()) &&
                         read_file_bytes(golden) == encode_weights(np::testing::golden_net());
  return {exact == 100 && golden_ok,
          std::to_string(exact) + "/100 models bit-exact, golden file " + (golden_ok ? "matches" : "differs")};
}

int run_npath(const std::filesystem::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" NP_NPATH "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// 10. Training output does not depend on the worker count.
Outcome determinism() {
  const auto start = std::chrono::steady_clock::now();
  np::testing::TempDir dir("accept_determinism");
  if (run_npath(dir.path(), "gen --fn ackley --n 2 --s 150 --out data.csv") != 0) return {false, "gen failed"};
  for (const char* run : {"--jobs 1 --out a", "--jobs 1 --out b", "--jobs 4 --out c"})
    if (run_npath(dir.path(), std::string(run) + " --seed 3 train --data data.csv --K 4") != 0)
      return {false, std::string("train failed: ") + run};
  std::size_t identical = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto name = pathway_file_name(k);
    const auto a = slurp(dir / ("a/" + name));
    identical += !a.empty() && a == slurp(dir / ("b/" + name)) && a == slurp(dir / ("c/" + name));
  }
  const double secs = seconds_since(start);
  return {identical == 4 && secs <= 300.0,
          std::to_string(identical) + "/4 weight files identical across two --jobs 1 runs and a --jobs 4 run, " +
              fmt(secs) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"gradient oracle", gradient_oracle}},
      {2, {"deepening identity", deepening_identity}},
      {3, {"formula golden set", formula_golden_set}},
      {4, {"partition correctness", partition_correctness}},
      {5, {"memory accounting", memory_accounting}},
      {6, {"desk-scale regression ordering", regression_ordering}},
      {7, {"1-D Hoelder ordering", holder_ordering}},
      {8, {"synthetic classification parity", classification_parity}},
      {9, {"persistence", persistence}},
      {10, {"determinism", determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [id, entry] : criteria) selected.push_back(id);

  bool all = true;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    Outcome out;
    try {
      out = it->second.second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "criterion " << id << " (" << it->second.first << "): " << (out.pass ? "PASS" : "FAIL") << " - "
              << out.detail << std::endl;
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
