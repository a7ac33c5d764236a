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
#include "np/memory_ledger.hpp"

#include <ostream>
#include <sstream>

#include "np/weights_io.hpp"

namespace np {

MemoryLedger::MemoryLedger(std::size_t budget, std::size_t prototype_storage) {
  state_.budget = budget;
  state_.prototype_storage = prototype_storage;
}

void MemoryLedger::acquire(std::size_t count) {
  std::unique_lock lock(mutex_);
  if (count > state_.budget)
    throw BudgetExceeded("pathway of " + std::to_string(count) + " parameters exceeds the budget of " +
                             std::to_string(state_.budget),
                         count, state_.budget);
  freed_.wait(lock, [&] { return state_.resident + count <= state_.budget; });
  state_.resident += count;
  state_.total_loaded += count;
  state_.peak = std::max(state_.peak, state_.resident);
}

void MemoryLedger::release(std::size_t count) {
  {
    std::lock_guard lock(mutex_);
    if (count > state_.resident) throw DomainError("ledger release exceeds resident parameters");
    state_.resident -= count;
  }
  freed_.notify_all();
}

void MemoryLedger::record_queries(std::size_t count) {
  std::lock_guard lock(mutex_);
  state_.prototype_queries += count;
}

LedgerSnapshot MemoryLedger::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

PathwayStore::PathwayStore(std::filesystem::path dir, std::size_t budget)
    : PathwayStore(load_manifest(dir / kManifestFile), dir, budget) {}

PathwayStore::PathwayStore(Manifest manifest, std::filesystem::path dir, std::size_t budget)
    : manifest_(std::move(manifest)),
      dir_(std::move(dir)),
      ledger_(budget, manifest_.input_dim * manifest_.size()) {
  manifest_.validate();
  const std::size_t largest = manifest_.largest_pathway();
  if (largest > budget)
    throw BudgetExceeded("largest pathway has " + std::to_string(largest) +
                             " parameters, budget is " + std::to_string(budget),
                         largest, budget);
}

Router PathwayStore::resolve(const Router& router) const {
  if (router.kind != Router::Kind::Tree || router.tree != nullptr) return router;
  if (!manifest_.tree) throw DomainError("tree router requested but the model has no routing tree");
  return Router::with_tree(*manifest_.tree, router.exact);
}

Routed PathwayStore::route(const Eigen::Ref<const Vector>& x, const Router& router) const {
  if (static_cast<std::size_t>(x.size()) != manifest_.input_dim)
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(manifest_.input_dim));
  const Router r = resolve(router);
  if (r.kind == Router::Kind::Tree && !r.exact) {
    if (r.tree->prototype_count() != manifest_.size())
      throw ShapeError("routing tree was built for a different prototype count");
    const auto result = tree_route(*r.tree, x);
    return {result.prototype, result.queries};
  }
  const std::size_t k = manifest_.size();
  return {assign(x, manifest_.prototypes), k > 1 ? k : 0};
}

MlpParams PathwayStore::load(std::size_t cell) const {
  const auto& entry = manifest_.pathways.at(cell);
  MlpParams net = load_weights(dir_ / entry.path);
  if (net.stored_scalar_count() != entry.param_count)
    throw FormatError(entry.path + " holds " + std::to_string(net.stored_scalar_count()) +
                      " parameters, manifest says " + std::to_string(entry.param_count));
  return net;
}

Vector PathwayStore::forward(const Eigen::Ref<const Vector>& x, const Router& router) {
  const Routed routed = route(x, router);
  ledger_.record_queries(routed.queries);
  Reservation hold(ledger_, manifest_.pathways[routed.cell].param_count);
  const MlpParams net = load(routed.cell);
  return mlp_forward(net, x);
}

Matrix PathwayStore::forward_batch(const Matrix& inputs, const Router& router) {
  std::vector<std::vector<Eigen::Index>> cells(manifest_.size());
  for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
    const Routed routed = route(inputs.col(c), router);
    ledger_.record_queries(routed.queries);
    cells[routed.cell].push_back(c);
  }
  Matrix out(static_cast<Eigen::Index>(manifest_.output_dim), inputs.cols());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].empty()) continue;
    Reservation hold(ledger_, manifest_.pathways[k].param_count);
    const MlpParams net = load(k);
    Matrix xb(inputs.rows(), static_cast<Eigen::Index>(cells[k].size()));
    for (std::size_t i = 0; i < cells[k].size(); ++i) xb.col(static_cast<Eigen::Index>(i)) = inputs.col(cells[k][i]);
    const Matrix yb = np::forward_batch(net, xb);
    for (std::size_t i = 0; i < cells[k].size(); ++i) out.col(cells[k][i]) = yb.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

BudgetedForward forward_with_budget(const Manifest& manifest, const std::filesystem::path& dir,
                                    const Eigen::Ref<const Vector>& x, std::size_t budget,
                                    const Router& router) {
  PathwayStore store(manifest, dir, budget);
  Vector prediction = store.forward(x, router);
  return {std::move(prediction), store.ledger()};
}

void write_ledger_header(std::ostream& out) { out << "peak_resident,total_loaded,prototype_queries\n"; }

void ledger_report(std::ostream& out, const LedgerSnapshot& ledger) {
  out << ledger.peak << ',' << ledger.total_loaded << ',' << ledger.prototype_queries << '\n';
}

std::string ledger_report(const LedgerSnapshot& ledger) {
  std::ostringstream out;
  write_ledger_header(out);
  ledger_report(out, ledger);
  return out.str();
}

}  // namespace np
