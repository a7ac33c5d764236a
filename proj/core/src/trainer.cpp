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
#include "np/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include "np/rng.hpp"

namespace np {
namespace {

// Stream identifiers for derive_seed; changing them changes every trained model.
enum Stream : std::uint64_t {
  kPrototypeInit = 1,
  kShallowInit = 2,
  kStage1Shuffle = 3,
  kDeepen = 4,
  kStage2Cell = 5,
  kBaselineInit = 6,
  kBaselineShuffle = 7,
  kKMeans = 8,
  kPathwayInit = 9,
};

template <typename Body>
void parallel_for(std::size_t count, std::size_t jobs, Body&& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  const std::size_t threads = std::min(jobs, count);
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void gather_columns(const Matrix& src, std::span<const std::size_t> idx, Matrix& dst) {
  dst.resize(src.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    dst.col(static_cast<Eigen::Index>(i)) = src.col(static_cast<Eigen::Index>(idx[i]));
}

void freeze_slopes(GradientBuffer& grads) {
  for (auto& layer : grads.layers)
    if (layer.slopes) layer.slopes->setZero();
}

BatchLoss batch_loss(const Matrix& pred, const Matrix& targets, std::span<const int> labels,
                     LossKind loss, std::span<const double> class_weights) {
  if (loss == LossKind::MSE) return mse_batch(pred, targets);
  return cross_entropy_batch(pred, labels, class_weights);
}

EnergyResult energy_impl(const Matrix& inputs, const Matrix& targets, std::span<const int> labels,
                         const PathwayEnsemble& ensemble, LossKind loss, double temperature,
                         std::span<const double> class_weights, std::span<const std::size_t> sample_ids) {
  if (!(temperature > 0.0)) throw DomainError("softmax temperature must be positive");
  const auto k = static_cast<Eigen::Index>(ensemble.size());
  const Eigen::Index batch = inputs.cols();
  const Matrix& protos = ensemble.protos.points();
  if (inputs.rows() != protos.rows())
    throw ShapeError("batch dimension differs from prototype dimension");

  std::vector<ForwardTrace> traces(static_cast<std::size_t>(k));
  std::vector<Matrix> outputs(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i)
    outputs[static_cast<std::size_t>(i)] =
        forward_batch(ensemble.nets[static_cast<std::size_t>(i)], inputs, traces[static_cast<std::size_t>(i)]);

  Matrix dist(k, batch);
  Matrix weights(k, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (Eigen::Index i = 0; i < k; ++i) dist(i, b) = std::sqrt(squared_distance(inputs.col(b), protos.col(i)));
    weights.col(b) = softmax_of_negative(dist.col(b), temperature);
  }

  const Eigen::Index m = outputs.front().rows();
  Matrix pred = Matrix::Zero(m, batch);
  for (Eigen::Index i = 0; i < k; ++i)
    pred += outputs[static_cast<std::size_t>(i)] * weights.row(i).asDiagonal();
  for (Eigen::Index b = 0; b < batch; ++b) {
    if (!pred.col(b).allFinite()) {
      const auto id = sample_ids.empty() ? static_cast<std::size_t>(b) : sample_ids[static_cast<std::size_t>(b)];
      throw NumericError("energy: non-finite combined prediction for sample " + std::to_string(id));
    }
  }

  BatchLoss value = batch_loss(pred, targets, labels, loss, class_weights);
  EnergyResult out;
  out.loss = value.value;
  out.net_grads.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Matrix upstream = value.grad * weights.row(i).asDiagonal();
    out.net_grads.push_back(
        backward_batch(ensemble.nets[static_cast<std::size_t>(i)], traces[static_cast<std::size_t>(i)], upstream));
  }

  // d loss / d logit_j = w_j (g . f_j - g . pred), logit_j = -dist_j / T
  out.prototype_grads = Matrix::Zero(protos.rows(), k);
  const Eigen::RowVectorXd g_pred = (value.grad.array() * pred.array()).colwise().sum();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::RowVectorXd g_f = (value.grad.array() * outputs[static_cast<std::size_t>(i)].array()).colwise().sum();
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double d = dist(i, b);
      if (d == 0.0) continue;
      const double dlogit = weights(i, b) * (g_f[b] - g_pred[b]);
      // d logit / d p = -(1/T) (p - x) / |p - x|
      out.prototype_grads.col(i) -= (dlogit / (temperature * d)) * (protos.col(i) - inputs.col(b));
    }
  }
  return out;
}

std::vector<double> global_class_weights(const Dataset& data, LossKind loss) {
  if (loss != LossKind::WeightedCrossEntropy) return {};
  std::vector<std::size_t> zeros(data.size(), 0);
  return class_weight_vector(cell_histogram(zeros, data.labels, 1).front(), data.classes);
}

void check_data_for(const Dataset& data, LossKind loss) {
  data.validate();
  if (is_classification_loss(loss) != data.is_classification())
    throw DomainError("loss " + to_string(loss) + " does not fit a " +
                      (data.is_classification() ? "classification" : "regression") + " dataset");
}

}  // namespace

void TrainConfig::validate() const {
  if (!(adam.lr > 0.0)) throw DomainError("learning rate must be positive");
  if (batch_size == 0) throw DomainError("batch size must be positive");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  if (!(noise_scale >= 0.0)) throw DomainError("noise scale must be non-negative");
  if (width == 0) throw DomainError("width must be positive");
  if (jobs == 0) throw DomainError("jobs must be positive");
  if (!(final_lr_ratio > 0.0 && final_lr_ratio <= 1.0))
    throw DomainError("final learning-rate ratio must lie in (0, 1]");
}

AdamOptions TrainConfig::adam_at(std::size_t epoch, std::size_t epochs) const {
  AdamOptions out = adam;
  if (final_lr_ratio == 1.0 || epochs < 2) return out;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * t));
  out.lr = adam.lr * (final_lr_ratio + (1.0 - final_lr_ratio) * cosine);
  return out;
}

void PathwayEnsemble::validate() const {
  if (nets.size() != protos.size())
    throw ShapeError("ensemble has " + std::to_string(nets.size()) + " networks for " +
                     std::to_string(protos.size()) + " prototypes");
  for (const auto& net : nets) {
    np::validate(net);
    if (net.input_dim() != protos.dim() || net.output_dim() != nets.front().output_dim())
      throw ShapeError("ensemble networks disagree on input or output width");
  }
}

void TrainReport::append(const TrainReport& other) {
  losses.insert(losses.end(), other.losses.begin(), other.losses.end());
  if (!other.cell_counts.empty()) cell_counts = other.cell_counts;
  if (!other.empty_cells.empty()) empty_cells = other.empty_cells;
  metrics.insert(metrics.end(), other.metrics.begin(), other.metrics.end());
}

void write_report_csv(std::ostream& out, const TrainReport& report) {
  out << "epoch,stage,cell,loss\n";
  const auto precision = out.precision(17);
  for (const auto& r : report.losses) out << r.epoch << ',' << r.stage << ',' << r.cell << ',' << r.loss << '\n';
  out.precision(precision);
}

EnergyResult energy_loss(const Dataset& batch, const PathwayEnsemble& ensemble, LossKind loss,
                         double temperature, std::span<const double> class_weights) {
  check_data_for(batch, loss);
  ensemble.validate();
  return energy_impl(batch.inputs, batch.targets, batch.labels, ensemble, loss, temperature,
                     class_weights, {});
}

std::pair<PathwayEnsemble, TrainReport> discover_prototypes(const Dataset& data, std::size_t count,
                                                            const TrainConfig& config) {
  config.validate();
  check_data_for(data, config.loss);
  if (count == 0) throw DomainError("need at least one prototype");

  PrototypeSet protos = init_prototypes(data.bounds(), count, derive_seed(config.seed, kPrototypeInit));
  std::vector<std::size_t> dims{data.input_dim()};
  dims.insert(dims.end(), config.shallow_hidden_layers, config.width);
  dims.push_back(data.output_dim());
  const MultiIndex index(dims);
  const InitOptions init{InitScheme::GlorotUniform, config.activation, config.activation_slope};
  std::vector<MlpParams> nets;
  for (std::size_t k = 0; k < count; ++k)
    nets.push_back(init_mlp(index, derive_seed(config.seed, kShallowInit, k), init));
  PathwayEnsemble ensemble{std::move(protos), std::move(nets)};

  TrainReport report;
  if (config.stage1_epochs == 0) return {std::move(ensemble), std::move(report)};

  const auto weights = global_class_weights(data, config.loss);
  std::vector<OptimizerState> states;
  for (const auto& net : ensemble.nets) states.push_back(OptimizerState::for_params(net));
  Matrix points = ensemble.protos.points();
  MatrixMoments proto_state = MatrixMoments::zeros_like(points);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, kStage1Shuffle));
  Matrix xb;
  Matrix yb;
  std::vector<int> lb;
  for (std::size_t epoch = 0; epoch < config.stage1_epochs; ++epoch) {
    const AdamOptions adam = config.adam_at(epoch, config.stage1_epochs);
    rng.shuffle(order.begin(), order.end());
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const std::span<const std::size_t> ids(order.data() + start, len);
      gather_columns(data.inputs, ids, xb);
      if (data.is_classification()) {
        lb.resize(len);
        for (std::size_t i = 0; i < len; ++i) lb[i] = data.labels[ids[i]];
      } else {
        gather_columns(data.targets, ids, yb);
      }
      EnergyResult energy =
          energy_impl(xb, yb, lb, ensemble, config.loss, config.temperature, weights, ids);
      total += energy.loss * static_cast<double>(len);
      for (std::size_t k = 0; k < count; ++k) {
        if (!config.train_slopes) freeze_slopes(energy.net_grads[k]);
        adam_update(ensemble.nets[k], energy.net_grads[k], states[k], adam);
      }
      adam_update(points, energy.prototype_grads, proto_state, adam);
      ensemble.protos = PrototypeSet(points);
    }
    report.losses.push_back({epoch, 1, -1, total / static_cast<double>(order.size())});
  }
  return {std::move(ensemble), std::move(report)};
}

PathwayEnsemble kmeans_ensemble(const Dataset& data, std::size_t count, const TrainConfig& config) {
  config.validate();
  data.validate();
  auto clusters = kmeans(data.inputs, count, derive_seed(config.seed, kKMeans));
  std::vector<std::size_t> dims{data.input_dim()};
  dims.insert(dims.end(), config.pathway_hidden_layers(), config.width);
  dims.push_back(data.output_dim());
  const MultiIndex index(dims);
  const InitOptions init{InitScheme::GlorotUniform, config.activation, config.activation_slope};
  std::vector<MlpParams> nets;
  for (std::size_t k = 0; k < count; ++k)
    nets.push_back(init_mlp(index, derive_seed(config.seed, kPathwayInit, k), init));
  return {std::move(clusters.centroids), std::move(nets)};
}

PathwayEnsemble deepen_ensemble(const PathwayEnsemble& ensemble, const TrainConfig& config) {
  if (config.insert_count == 0) return ensemble;
  PathwayEnsemble out{ensemble.protos, {}};
  for (std::size_t k = 0; k < ensemble.size(); ++k)
    out.nets.push_back(deepen(ensemble.nets[k], config.insert_count, config.noise_scale,
                              derive_seed(config.seed, kDeepen, k)));
  return out;
}

std::vector<double> train_network(MlpParams& net, const Dataset& data,
                                  std::span<const std::size_t> indices, LossKind loss,
                                  std::span<const double> class_weights, std::size_t epochs,
                                  const TrainConfig& config, std::uint64_t seed) {
  std::vector<double> history;
  if (indices.empty() || epochs == 0) return history;
  OptimizerState state = OptimizerState::for_params(net);
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(seed);
  Matrix xb;
  Matrix yb;
  std::vector<int> lb;
  ForwardTrace trace;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const AdamOptions adam = config.adam_at(epoch, epochs);
    rng.shuffle(order.begin(), order.end());
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const std::span<const std::size_t> ids(order.data() + start, len);
      gather_columns(data.inputs, ids, xb);
      if (data.is_classification()) {
        lb.resize(len);
        for (std::size_t i = 0; i < len; ++i) lb[i] = data.labels[ids[i]];
      } else {
        gather_columns(data.targets, ids, yb);
      }
      const Matrix pred = forward_batch(net, xb, trace);
      if (!pred.allFinite()) throw NumericError("training produced a non-finite prediction");
      BatchLoss value = batch_loss(pred, yb, lb, loss, class_weights);
      GradientBuffer grads = backward_batch(net, trace, value.grad);
      if (!config.train_slopes) freeze_slopes(grads);
      adam_update(net, grads, state, adam);
      total += value.value * static_cast<double>(len);
    }
    history.push_back(total / static_cast<double>(order.size()));
  }
  return history;
}

std::pair<PathwayEnsemble, TrainReport> train_pathways(const Dataset& data,
                                                       const PathwayEnsemble& ensemble,
                                                       const TrainConfig& config) {
  config.validate();
  check_data_for(data, config.loss);
  ensemble.validate();
  const std::size_t count = ensemble.size();

  const auto assignment = assign_all(data.inputs, ensemble.protos);
  std::vector<std::vector<std::size_t>> cells(count);
  for (std::size_t i = 0; i < assignment.size(); ++i) cells[assignment[i]].push_back(i);

  PathwayEnsemble out = ensemble;
  std::vector<std::vector<double>> histories(count);
  parallel_for(count, config.jobs, [&](std::size_t k) {
    if (cells[k].empty()) return;
    std::vector<double> weights;
    if (config.loss == LossKind::WeightedCrossEntropy) {
      std::map<int, std::size_t> hist;
      for (auto i : cells[k]) ++hist[data.labels[i]];
      weights = class_weight_vector(hist, data.classes);
    }
    histories[k] = train_network(out.nets[k], data, cells[k], config.loss, weights,
                                 config.stage2_epochs, config, derive_seed(config.seed, kStage2Cell, k));
  });

  TrainReport report;
  for (std::size_t k = 0; k < count; ++k) {
    report.cell_counts.push_back(cells[k].size());
    if (cells[k].empty()) report.empty_cells.push_back(k);
    for (std::size_t e = 0; e < histories[k].size(); ++e)
      report.losses.push_back({e, 2, static_cast<long>(k), histories[k][e]});
  }
  return {std::move(out), std::move(report)};
}

std::size_t baseline_width(std::size_t width, std::size_t count) {
  if (count == 0) throw DomainError("baseline needs K >= 1");
  return static_cast<std::size_t>(std::llround(static_cast<double>(width) * std::sqrt(static_cast<double>(count))));
}

std::pair<MlpParams, TrainReport> train_baseline(const Dataset& data, std::size_t count,
                                                 const TrainConfig& config) {
  config.validate();
  check_data_for(data, config.loss);
  std::vector<std::size_t> dims{data.input_dim()};
  dims.insert(dims.end(), config.pathway_hidden_layers(), baseline_width(config.width, count));
  dims.push_back(data.output_dim());
  const InitOptions init{InitScheme::GlorotUniform, config.activation, config.activation_slope};
  MlpParams net = init_mlp(MultiIndex(dims), derive_seed(config.seed, kBaselineInit), init);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  const auto weights = global_class_weights(data, config.loss);
  const auto history = train_network(net, data, all, config.loss, weights, config.baseline_epochs,
                                     config, derive_seed(config.seed, kBaselineShuffle));
  TrainReport report;
  for (std::size_t e = 0; e < history.size(); ++e) report.losses.push_back({e, 0, -1, history[e]});
  report.cell_counts = {data.size()};
  return {std::move(net), std::move(report)};
}

std::pair<PathwayEnsemble, TrainReport> train_neural_pathways(const Dataset& data, std::size_t count,
                                                              const TrainConfig& config) {
  auto [stage1, report] = discover_prototypes(data, count, config);
  auto deepened = deepen_ensemble(stage1, config);
  auto [trained, stage2_report] = train_pathways(data, deepened, config);
  report.append(stage2_report);
  return {std::move(trained), std::move(report)};
}

Routed route(const PathwayEnsemble& ensemble, const Eigen::Ref<const Vector>& x, const Router& router) {
  if (router.kind == Router::Kind::Tree && !router.exact) {
    if (router.tree == nullptr) throw DomainError("tree router without a routing tree");
    if (router.tree->prototype_count() != ensemble.size())
      throw ShapeError("routing tree was built for a different prototype count");
    const auto r = tree_route(*router.tree, x);
    return {r.prototype, r.queries};
  }
  const std::size_t queries = ensemble.size() > 1 ? ensemble.size() : 0;
  return {assign(x, ensemble.protos), queries};
}

Vector infer(const PathwayEnsemble& ensemble, const Eigen::Ref<const Vector>& x, const Router& router) {
  return mlp_forward(ensemble.nets[route(ensemble, x, router).cell], x);
}

Matrix predict(const PathwayEnsemble& ensemble, const Matrix& inputs, const Router& router) {
  std::vector<std::vector<std::size_t>> cells(ensemble.size());
  for (Eigen::Index c = 0; c < inputs.cols(); ++c)
    cells[route(ensemble, inputs.col(c), router).cell].push_back(static_cast<std::size_t>(c));
  Matrix out(static_cast<Eigen::Index>(ensemble.nets.front().output_dim()), inputs.cols());
  Matrix xb;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].empty()) continue;
    gather_columns(inputs, cells[k], xb);
    const Matrix yb = forward_batch(ensemble.nets[k], xb);
    for (std::size_t i = 0; i < cells[k].size(); ++i)
      out.col(static_cast<Eigen::Index>(cells[k][i])) = yb.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

double evaluate_predictions(const Matrix& predictions, const Dataset& test, Metric metric) {
  if (test.size() == 0) throw DomainError("cannot evaluate on an empty test set");
  if (static_cast<std::size_t>(predictions.cols()) != test.size())
    throw ShapeError("prediction count differs from test set size");
  if (metric == Metric::MSE) {
    if (test.is_classification()) throw DomainError("mse metric needs regression targets");
    if (predictions.rows() != test.targets.rows()) throw ShapeError("prediction width differs from targets");
    return (predictions - test.targets).squaredNorm() / static_cast<double>(predictions.size());
  }
  if (!test.is_classification()) throw DomainError("accuracy metric needs class labels");
  std::size_t correct = 0;
  for (Eigen::Index c = 0; c < predictions.cols(); ++c) {
    Eigen::Index best = 0;
    predictions.col(c).maxCoeff(&best);
    if (best == test.labels[static_cast<std::size_t>(c)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double evaluate(const PathwayEnsemble& ensemble, const Dataset& test, Metric metric, const Router& router) {
  return evaluate_predictions(predict(ensemble, test.inputs, router), test, metric);
}

double evaluate(const MlpParams& net, const Dataset& test, Metric metric) {
  return evaluate_predictions(forward_batch(net, test.inputs), test, metric);
}

TargetScaling TargetScaling::fit(const Matrix& targets) {
  if (targets.cols() == 0) throw DomainError("cannot fit target scaling on no samples");
  TargetScaling s;
  s.mean = targets.rowwise().mean();
  s.scale.resize(targets.rows());
  for (Eigen::Index r = 0; r < targets.rows(); ++r) {
    const double var = (targets.row(r).array() - s.mean[r]).square().mean();
    s.scale[r] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Dataset TargetScaling::apply(const Dataset& data) const {
  Dataset out = data;
  out.targets = ((data.targets.colwise() - mean).array().colwise() / scale.array()).matrix();
  return out;
}

void TargetScaling::fold_into(MlpParams& net) const {
  auto& last = net.layers.back();
  if (last.weight.rows() != mean.size()) throw ShapeError("target scaling does not match the output width");
  last.weight = scale.asDiagonal() * last.weight;
  last.bias = (scale.array() * last.bias.array() + mean.array()).matrix();
}

}  // namespace np
