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
// npath: data generation, training, budgeted evaluation, bound calculators
// and benchmarks for neural pathway ensembles.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "np/bench_data.hpp"
#include "np/bounds.hpp"
#include "np/experiment.hpp"
#include "np/manifest.hpp"
#include "np/memory_ledger.hpp"
#include "np/rng.hpp"
#include "np/trainer.hpp"
#include "np/weights_io.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace np;

namespace {

enum Exit { kOk = 0, kTrainFailure = 1, kUsage = 2, kIo = 3, kBudget = 4 };

constexpr std::uint64_t kTreeStream = 12;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  std::string emit = "table";
  std::vector<std::string> sets;
};

using Row = std::vector<std::string>;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void emit_rows(std::ostream& out, const Row& header, const std::vector<Row>& rows, const std::string& mode) {
  if (mode == "csv") {
    auto line = [&](const Row& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << r[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void write_rows_csv(const fs::path& path, const Row& header, const std::vector<Row>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  emit_rows(out, header, rows, "csv");
  if (!out) throw IoError("error writing " + path.string());
}

/// Defaults, then the config file, then --set pairs, then dedicated flags.
cli::RunConfig resolve_config(const Globals& g) {
  cli::RunConfig config;
  try {
    if (!g.config.empty()) cli::apply_config_file(config, g.config);
    for (const auto& kv : g.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) config.train.seed = *g.seed;
    if (g.out) config.out = *g.out;
    if (g.jobs) config.train.jobs = *g.jobs;
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return config;
}

void validate_or_usage(const cli::RunConfig& config) {
  try {
    config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

Dataset load_dataset(const fs::path& path) {
  if (path.empty()) throw UsageError("no dataset given (use --data or the 'data' config key)");
  if (!fs::exists(path)) throw IoError("dataset " + path.string() + " does not exist");
  return path.extension() == ".npf" ? load_features(path) : load_csv(path);
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string fn;
  std::size_t n = 2;
  std::optional<std::size_t> s;
  std::vector<double> range{-1.0, 1.0};
  double hurst = 0.3;
  std::size_t chunk = 1000;
  std::size_t classes = 8;
  std::optional<std::size_t> dim;
  std::size_t per_class = 1000;
  double separation = 4.5;
};

int cmd_gen(const Globals& g, const GenArgs& a) {
  const std::uint64_t seed = g.seed.value_or(0);
  const fs::path out = g.out.value_or("data.csv");
  nlohmann::json meta{{"generator", a.fn}, {"seed", seed}};
  Dataset data;
  try {
    if (a.fn == "ackley" || a.fn == "rastrigin") {
      if (!a.s) throw UsageError("gen --fn " + a.fn + " requires --s");
      if (a.range.size() != 2 || !(a.range[0] < a.range[1])) throw UsageError("--range needs a < b");
      data = make_function_dataset(bench_function_from_string(a.fn), a.range[0], a.range[1], a.n, *a.s);
      meta.update({{"n", a.n}, {"s", *a.s}, {"range", a.range}});
    } else if (a.fn == "fbm") {
      if (!a.s) throw UsageError("gen --fn fbm requires --s");
      if (*a.s > default_size_cap()) throw UsageError("--s exceeds the size cap " + std::to_string(default_size_cap()));
      data = make_fbm_dataset(a.hurst, *a.s, a.chunk, seed);
      meta.update({{"hurst", a.hurst}, {"s", *a.s}, {"chunk", a.chunk}});
    } else if (a.fn == "mixture") {
      const std::size_t dim = a.dim.value_or(16);
      if (a.classes * a.per_class > default_size_cap()) throw UsageError("mixture exceeds the size cap");
      data = gaussian_mixture(a.classes, dim, a.per_class, a.separation, seed);
      meta.update({{"classes", a.classes}, {"dim", dim}, {"per_class", a.per_class}, {"separation", a.separation}});
    } else {
      throw UsageError("unknown --fn '" + a.fn + "' (ackley, rastrigin, fbm, mixture)");
    }
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  meta["rows"] = data.size();
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_csv(out, data);
  std::ofstream meta_out(out.string() + ".json");
  if (!meta_out) throw IoError("cannot write " + out.string() + ".json");
  meta_out << meta.dump(2) << '\n';
  std::cerr << "wrote " << data.size() << " rows to " << out.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- train

void write_report(const fs::path& dir, const TrainReport& report);

struct TrainArgs {
  std::optional<std::string> data;
  std::optional<std::size_t> k;
  std::optional<std::size_t> nu;
  bool baseline = false;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  cli::RunConfig config = resolve_config(g);
  if (a.data) config.data = *a.data;
  if (a.k) config.prototypes = *a.k;
  if (a.nu) config.arity = *a.nu;
  validate_or_usage(config);

  const Dataset data = load_dataset(config.data);
  if (is_classification_loss(config.train.loss) != data.is_classification())
    throw UsageError("loss '" + to_string(config.train.loss) + "' does not fit dataset " + config.data +
                     (data.is_classification() ? " (use ce-weighted or ce-unweighted)" : " (use mse)"));

  const fs::path dir = config.out;
  fs::create_directories(dir);
  std::ofstream log(dir / "train.log", std::ios::app);
  log << timestamp() << " train start data=" << config.data << '\n';
  const auto start = std::chrono::steady_clock::now();

  auto [train, test] = protocol_split(data, config.train_ratio, config.train.seed);
  std::optional<TargetScaling> scaling;
  if (!data.is_classification() && config.standardize) {
    scaling = TargetScaling::fit(train.targets);
    train = scaling->apply(train);
  }

  PathwayEnsemble ensemble = [&] {
    if (config.prototype_method == "kmeans") {
      auto [trained, report] = train_pathways(train, kmeans_ensemble(train, config.prototypes, config.train), config.train);
      write_report(dir, report);
      return trained;
    }
    auto [trained, report] = train_neural_pathways(train, config.prototypes, config.train);
    write_report(dir, report);
    return trained;
  }();
  if (scaling)
    for (auto& net : ensemble.nets) scaling->fold_into(net);

  std::optional<RoutingTree> tree;
  if (config.arity >= 2) tree = build_tree(ensemble.protos, config.arity, derive_seed(config.train.seed, kTreeStream));
  const Manifest manifest = save_model(ensemble, dir, tree ? &*tree : nullptr);
  save_csv(dir / "test.csv", test);
  if (data.is_classification()) {
    std::ofstream meta(dir / "test.csv.json");
    meta << nlohmann::json{{"classes", data.classes}}.dump() << '\n';
  }
  {
    std::ofstream conf(dir / "config.conf");
    cli::write_config(conf, config);
  }

  if (a.baseline) {
    auto [net, report] = train_baseline(train, config.prototypes, config.train);
    if (scaling) scaling->fold_into(net);
    save_weights(net, dir / "baseline.npw");
    std::ofstream out(dir / "baseline_report.csv");
    write_report_csv(out, report);
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << timestamp() << " train done in " << fmt(seconds) << " s\n";
  std::cerr << "trained " << manifest.size() << " pathways into " << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::optional<std::string> model;
  std::optional<std::string> data;
  std::optional<std::size_t> budget;
  std::string router = "brute";
  std::optional<std::size_t> nu;
  bool exact = false;
  bool per_sample = false;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  cli::RunConfig config = resolve_config(g);
  const fs::path dir = a.model.value_or(g.out.value_or(config.out));
  if (a.router != "brute" && a.router != "tree") throw UsageError("--router must be 'brute' or 'tree'");
  if (a.nu && *a.nu < 2) throw UsageError("--nu must be at least 2");
  Manifest manifest = load_manifest(dir / kManifestFile);
  const Dataset test = load_dataset(a.data ? fs::path(*a.data) : dir / "test.csv");
  if (test.input_dim() != manifest.input_dim) throw UsageError("test data dimension does not match the model");

  if (a.router == "tree" && (!manifest.tree || (a.nu && manifest.tree->arity() != *a.nu)))
    manifest.tree = build_tree(manifest.prototypes, a.nu.value_or(2), derive_seed(config.train.seed, kTreeStream));
  const Router router = a.router == "tree" ? Router{Router::Kind::Tree, nullptr, a.exact} : Router::brute_force();

  const std::size_t budget = a.budget.value_or(config.budget ? config.budget : manifest.largest_pathway());
  PathwayStore store(manifest, dir, budget);

  const bool classify = test.is_classification();
  const Metric metric = classify ? Metric::Accuracy : Metric::MSE;
  std::vector<Row> ledger_rows;
  std::size_t max_queries = 0;
  Matrix pred;
  if (a.per_sample) {
    pred.resize(static_cast<Eigen::Index>(manifest.output_dim), test.inputs.cols());
    for (Eigen::Index c = 0; c < test.inputs.cols(); ++c) {
      const auto result = forward_with_budget(manifest, dir, test.inputs.col(c), budget, router);
      pred.col(c) = result.prediction;
      max_queries = std::max(max_queries, result.ledger.prototype_queries);
      ledger_rows.push_back({std::to_string(result.ledger.peak), std::to_string(result.ledger.total_loaded),
                             std::to_string(result.ledger.prototype_queries)});
    }
  } else {
    for (Eigen::Index c = 0; c < test.inputs.cols(); ++c)
      max_queries = std::max(max_queries, store.route(test.inputs.col(c), router).queries);
    pred = store.forward_batch(test.inputs, router);
    const auto l = store.ledger();
    ledger_rows.push_back({std::to_string(l.peak), std::to_string(l.total_loaded), std::to_string(l.prototype_queries)});
  }

  const std::string metric_name = classify ? "accuracy" : "mse";
  std::vector<Row> metrics{{"pathways", metric_name, fmt(evaluate_predictions(pred, test, metric)),
                            std::to_string(test.size())},
                           {"pathways", "max_queries_per_sample", std::to_string(max_queries),
                            std::to_string(test.size())},
                           {"pathways", "prototype_storage", std::to_string(manifest.size() * manifest.input_dim),
                            std::to_string(test.size())}};
  if (fs::exists(dir / "baseline.npw")) {
    const MlpParams baseline = load_weights(dir / "baseline.npw");
    metrics.push_back({"baseline", metric_name, fmt(evaluate(baseline, test, metric)), std::to_string(test.size())});
  }

  const Row metric_header{"model", "metric", "value", "samples"};
  const Row ledger_header{"peak_resident", "total_loaded", "prototype_queries"};
  emit_rows(std::cout, metric_header, metrics, g.emit);
  std::cout << '\n';
  emit_rows(std::cout, ledger_header, ledger_rows, g.emit);
  if (g.out) {
    fs::create_directories(*g.out);
    write_rows_csv(fs::path(*g.out) / "metrics.csv", metric_header, metrics);
    write_rows_csv(fs::path(*g.out) / "ledger.csv", ledger_header, ledger_rows);
  }
  return kOk;
}

// ---------------------------------------------------------------- calc

struct CalcArgs {
  double doubling = 0, ratio = 0, delta = 0, diam = 0, alpha = 1, lipschitz = 1, eps = 0, r = 0;
  std::size_t v = 2, J = 0, W = 0, n = 1, m = 1, L = 1;
  std::string d = "0";
};

std::string big(const BigInt& v) { return v.str(); }

int cmd_calc(const Globals& g, const std::string& what, const CalcArgs& a) {
  std::vector<Row> rows;
  try {
    if (what == "tree") {
      double delta = a.delta, diam = a.diam;
      if (a.ratio > 0) {
        delta = 1.0;
        diam = a.ratio;
      }
      if (!(delta > 0 && diam > 0)) throw DomainError("tree needs --ratio or both --delta and --diam");
      const auto t = bounds::tree_complexity(a.doubling, delta, diam, a.v);
      rows = {{"height", std::to_string(t.height)}, {"leaves", big(t.leaves)}, {"nodes", big(t.nodes)},
              {"height_raw", fmt(height_bound_raw(a.doubling, delta, diam, a.v))}};
    } else if (what == "dstar") {
      const auto b = bounds::vc_mlp_dstar_bound(a.J, a.W);
      rows = {{"dstar", big(b.ceiling)}, {"dstar_raw", fmt(b.raw)}};
    } else if (what == "vc") {
      BigInt d;
      try {
        d = BigInt(a.d);
      } catch (const std::exception&) {
        throw DomainError("--d must be a non-negative integer");
      }
      const auto b = bounds::vc_pathways_bound(d, a.n, a.L);
      rows = {{"vc_bound", big(b.ceiling)}, {"vc_bound_raw", fmt(b.raw)}};
    } else if (what == "scaling") {
      const auto s = bounds::curse_scaling(a.n, a.alpha, a.eps);
      rows = {{"relu_params ~ eps^(-n/(2 alpha))", fmt(s.relu_params)},
              {"pathway_resident_params ~ eps^-1", fmt(s.resident_params)},
              {"pathway_forward_params ~ (n/alpha) log2(1/eps)/eps", fmt(s.forward_params)}};
    } else if (what == "delta") {
      const bounds::HolderModulus mod{a.alpha, a.lipschitz};
      rows = {{"delta", fmt(bounds::theorem_delta(a.n, a.m, a.eps, a.r, mod))}};
    } else if (what == "depth") {
      const auto dw = bounds::pathway_depth_width(a.n, a.m, a.eps, a.r);
      rows = {{"depth", big(dw.depth)}, {"width", big(dw.width)}};
    } else if (what == "packing") {
      rows = {{"packing_constant", fmt(bounds::packing_constant(a.n, a.m, {a.alpha, a.lipschitz}))}};
    }
  } catch (const DomainError& e) {
    throw UsageError(what + ": " + e.what());
  }
  emit_rows(std::cout, {"quantity", "value"}, rows, g.emit);
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string fn = "ackley";
  std::size_t n = 2;
  std::optional<std::size_t> s;
  std::vector<double> range{-1.0, 1.0};
  double hurst = 0.3;
  std::size_t chunk = 1000;
  std::size_t seeds = 0;
  bool synthetic = false;
  std::optional<std::string> features;
  std::size_t classes = 8, dim = 16, per_class = 1000;
  double separation = 4.5;
};

Protocol protocol_from(const cli::RunConfig& config, const Protocol& defaults, bool config_given) {
  Protocol p = defaults;
  if (config_given) p.config = config.train;
  p.config.jobs = config.train.jobs;
  p.prototypes = config.prototypes;
  p.train_ratio = config.train_ratio;
  p.standardize_targets = config.standardize;
  return p;
}

int cmd_bench(const Globals& g, const std::string& what, const BenchArgs& a) {
  cli::RunConfig config = resolve_config(g);
  validate_or_usage(config);
  const bool custom = !g.config.empty() || !g.sets.empty();
  const std::size_t seeds = a.seeds ? a.seeds : config.seeds;
  const std::uint64_t base = config.train.seed;
  std::vector<Row> per_seed;
  std::vector<Row> summary;
  const Row summary_header{"method", "mean", "std", "seeds"};
  auto row = [&](const std::string& name, const std::vector<double>& v) {
    const Summary s = summarize(v);
    summary.push_back({name, fmt(s.mean), fmt(s.stddev), std::to_string(s.count)});
  };

  if (what == "regression") {
    RegressionTask task;
    try {
      if (a.fn == "fbm") {
        task.kind = RegressionTask::Kind::Fbm;
        task.dim = 1;
        task.grid = a.s.value_or(10000);
        task.hurst = a.hurst;
        task.fbm_chunk = a.chunk;
      } else {
        task.function = bench_function_from_string(a.fn);
        task.dim = a.n;
        task.grid = a.s.value_or(150);
        if (a.range.size() != 2 || !(a.range[0] < a.range[1])) throw DomainError("--range needs a < b");
        task.low = a.range[0];
        task.high = a.range[1];
      }
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    const Protocol p = protocol_from(config, default_regression_protocol(), custom);
    std::vector<double> ours, baseline;
    for (std::size_t i = 0; i < seeds; ++i) {
      const std::uint64_t seed = base + i;
      const auto r = run_regression(task.make(seed), p, seed);
      ours.push_back(r.pathways_mse);
      baseline.push_back(r.baseline_mse);
      per_seed.push_back({std::to_string(seed), fmt(r.pathways_mse), fmt(r.baseline_mse), fmt(r.seconds)});
      std::cerr << "seed " << seed << ": pathways " << fmt(r.pathways_mse) << ", baseline " << fmt(r.baseline_mse) << '\n';
    }
    row("pathways", ours);
    row("baseline", baseline);
    emit_rows(std::cout, summary_header, summary, g.emit);
    if (g.out) {
      fs::create_directories(*g.out);
      write_rows_csv(fs::path(*g.out) / "bench_seeds.csv", {"seed", "pathways_mse", "baseline_mse", "seconds"}, per_seed);
      write_rows_csv(fs::path(*g.out) / "bench_summary.csv", summary_header, summary);
    }
    return kOk;
  }

  if (!a.synthetic && !a.features) throw UsageError("bench classify needs --synthetic or --features PATH");
  ClassificationTask task;
  task.classes = a.classes;
  task.dim = a.dim;
  task.per_class = a.per_class;
  task.separation = a.separation;
  if (a.features) task.features = load_dataset(*a.features);
  const Protocol p = protocol_from(config, default_classification_protocol(), custom);
  std::vector<double> weighted, unweighted, baseline;
  for (std::size_t i = 0; i < seeds; ++i) {
    const std::uint64_t seed = base + i;
    Dataset data;
    try {
      data = task.make(seed);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    const auto r = run_classification(data, p, seed);
    weighted.push_back(r.weighted_accuracy);
    unweighted.push_back(r.unweighted_accuracy);
    baseline.push_back(r.baseline_accuracy);
    per_seed.push_back({std::to_string(seed), fmt(r.weighted_accuracy), fmt(r.unweighted_accuracy),
                        fmt(r.baseline_accuracy), fmt(r.seconds)});
    std::cerr << "seed " << seed << ": weighted " << fmt(r.weighted_accuracy) << ", unweighted "
              << fmt(r.unweighted_accuracy) << ", baseline " << fmt(r.baseline_accuracy) << '\n';
  }
  row("pathways-weighted", weighted);
  row("pathways-unweighted", unweighted);
  row("baseline", baseline);
  emit_rows(std::cout, summary_header, summary, g.emit);
  if (g.out) {
    fs::create_directories(*g.out);
    write_rows_csv(fs::path(*g.out) / "bench_seeds.csv",
                   {"seed", "weighted_accuracy", "unweighted_accuracy", "baseline_accuracy", "seconds"}, per_seed);
    write_rows_csv(fs::path(*g.out) / "bench_summary.csv", summary_header, summary);
  }
  return kOk;
}

void write_report(const fs::path& dir, const TrainReport& report) {
  {
    std::ofstream out(dir / "report.csv");
    if (!out) throw IoError("cannot write " + (dir / "report.csv").string());
    write_report_csv(out, report);
  }
  std::vector<Row> rows;
  for (std::size_t k = 0; k < report.cell_counts.size(); ++k)
    rows.push_back({std::to_string(k), std::to_string(report.cell_counts[k])});
  write_rows_csv(dir / "cells.csv", {"cell", "samples"}, rows);
  for (auto k : report.empty_cells)
    std::cerr << "warning: cell " << k << " received no training samples; its pathway keeps its initial weights\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural pathways: prototype-routed ensembles of small PReLU networks"};
  app.name("npath");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--out", g.out, "output path");
  app.add_option("--jobs", g.jobs, "worker threads for per-cell training")->check(CLI::PositiveNumber);
  app.add_option("--emit", g.emit, "output format")->check(CLI::IsMember({"csv", "table"}));
  app.add_option("--set", g.sets, "override one config key (key=value)");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a benchmark dataset as CSV");
  gen->add_option("--fn", gen_args.fn, "ackley | rastrigin | fbm | mixture")->required();
  gen->add_option("--n", gen_args.n, "input dimension of grid functions");
  gen->add_option("--s", gen_args.s, "grid points per axis, or fBm path length");
  gen->add_option("--range", gen_args.range, "grid interval a b")->expected(2);
  gen->add_option("--hurst", gen_args.hurst, "fBm Hurst index");
  gen->add_option("--chunk", gen_args.chunk, "fBm segment length");
  gen->add_option("--classes", gen_args.classes, "mixture classes");
  gen->add_option("--dim", gen_args.dim, "mixture dimension");
  gen->add_option("--per-class", gen_args.per_class, "mixture samples per class");
  gen->add_option("--separation", gen_args.separation, "distance between mixture means");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "two-stage training into a model directory");
  train->add_option("--data", train_args.data, "dataset (CSV or .npf features)");
  train->add_option("--K", train_args.k, "number of prototypes");
  train->add_option("--nu", train_args.nu, "store a routing tree of this arity");
  train->add_flag("--baseline", train_args.baseline, "also train the width w*sqrt(K) baseline");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "budgeted evaluation of a model directory");
  eval->add_option("--model", eval_args.model, "model directory");
  eval->add_option("--data", eval_args.data, "test data (default: <model>/test.csv)");
  eval->add_option("--budget", eval_args.budget, "resident parameter budget");
  eval->add_option("--router", eval_args.router, "brute | tree");
  eval->add_option("--nu", eval_args.nu, "routing tree arity");
  eval->add_flag("--exact", eval_args.exact, "tree router falls back to exhaustive search");
  eval->add_flag("--per-sample", eval_args.per_sample, "one ledger row per sample");

  CalcArgs calc_args;
  std::string calc_what;
  auto* calc = app.add_subcommand("calc", "closed-form complexity and VC bounds");
  calc->add_option("what", calc_what, "tree | dstar | vc | scaling | delta | depth | packing")
      ->required()
      ->check(CLI::IsMember({"tree", "dstar", "vc", "scaling", "delta", "depth", "packing"}));
  calc->add_option("--C", calc_args.doubling, "doubling constant");
  calc->add_option("--v", calc_args.v, "tree arity");
  calc->add_option("--ratio", calc_args.ratio, "diam / delta");
  calc->add_option("--delta", calc_args.delta, "cover radius");
  calc->add_option("--diam", calc_args.diam, "domain diameter");
  calc->add_option("--J", calc_args.J, "hidden layers");
  calc->add_option("--W", calc_args.W, "width");
  calc->add_option("--d", calc_args.d, "VC dimension of one pathway class");
  calc->add_option("--n", calc_args.n, "input dimension");
  calc->add_option("--m", calc_args.m, "output dimension");
  calc->add_option("--L", calc_args.L, "number of pathways");
  calc->add_option("--alpha", calc_args.alpha, "Hölder exponent");
  calc->add_option("--lipschitz", calc_args.lipschitz, "Hölder constant");
  calc->add_option("--eps", calc_args.eps, "target accuracy");
  calc->add_option("--r", calc_args.r, "rate parameter");

  BenchArgs bench_args;
  std::string bench_what;
  auto* bench = app.add_subcommand("bench", "pathways versus baseline over several seeds");
  bench->add_option("what", bench_what, "regression | classify")
      ->required()
      ->check(CLI::IsMember({"regression", "classify"}));
  bench->add_option("--fn", bench_args.fn, "ackley | rastrigin | fbm");
  bench->add_option("--n", bench_args.n, "input dimension");
  bench->add_option("--s", bench_args.s, "grid points per axis, or fBm length");
  bench->add_option("--range", bench_args.range, "grid interval a b")->expected(2);
  bench->add_option("--hurst", bench_args.hurst, "fBm Hurst index");
  bench->add_option("--chunk", bench_args.chunk, "fBm segment length");
  bench->add_option("--seeds", bench_args.seeds, "number of seeds");
  bench->add_flag("--synthetic", bench_args.synthetic, "Gaussian mixture instead of feature files");
  bench->add_option("--features", bench_args.features, "npf feature file");
  bench->add_option("--classes", bench_args.classes, "mixture classes");
  bench->add_option("--dim", bench_args.dim, "mixture dimension");
  bench->add_option("--per-class", bench_args.per_class, "mixture samples per class");
  bench->add_option("--separation", bench_args.separation, "distance between mixture means");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(g, gen_args);
    if (*train) return cmd_train(g, train_args);
    if (*eval) return cmd_eval(g, eval_args);
    if (*calc) return cmd_calc(g, calc_what, calc_args);
    if (*bench) return cmd_bench(g, bench_what, bench_args);
  } catch (const UsageError& e) {
    std::cerr << "npath: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "npath: budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const IoError& e) {
    std::cerr << "npath: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "npath: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "npath: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "npath: " << e.what() << '\n';
    return kTrainFailure;
  }
  return kUsage;
}
