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
#pragma once

#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <string>

#include "np/manifest.hpp"
#include "np/trainer.hpp"

namespace np {

/// Counters of a MemoryLedger at one instant.
struct LedgerSnapshot {
  std::size_t budget = 0;
  std::size_t resident = 0;
  std::size_t peak = 0;
  std::size_t total_loaded = 0;
  std::size_t prototype_queries = 0;
  /// K * n prototype coordinates, held outside the pathway budget.
  std::size_t prototype_storage = 0;

  /// Peak when prototype coordinates are counted as device memory too.
  std::size_t peak_with_prototypes() const noexcept { return peak + prototype_storage; }
};

/// Simulated device memory measured in parameters. Thread safe: a request
/// that fits the budget but not the current free space waits for a release;
/// a request larger than the whole budget throws BudgetExceeded at once.
class MemoryLedger {
 public:
  explicit MemoryLedger(std::size_t budget, std::size_t prototype_storage = 0);

  void acquire(std::size_t count);
  void release(std::size_t count);
  void record_queries(std::size_t count);

  LedgerSnapshot snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable freed_;
  LedgerSnapshot state_;
};

/// Holds one parameter reservation for the lifetime of the guard.
class Reservation {
 public:
  Reservation(MemoryLedger& ledger, std::size_t count) : ledger_(ledger), count_(count) {
    ledger_.acquire(count_);
  }
  ~Reservation() { ledger_.release(count_); }
  Reservation(const Reservation&) = delete;
  Reservation& operator=(const Reservation&) = delete;

 private:
  MemoryLedger& ledger_;
  std::size_t count_;
};

/// Routes inputs against a saved model and loads exactly one pathway per
/// routed cell from disk under a parameter budget. Prototypes (and the
/// routing tree, if any) stay resident.
class PathwayStore {
 public:
  /// Throws BudgetExceeded when the budget cannot hold the largest pathway.
  PathwayStore(std::filesystem::path dir, std::size_t budget);
  PathwayStore(Manifest manifest, std::filesystem::path dir, std::size_t budget);

  const Manifest& manifest() const noexcept { return manifest_; }
  LedgerSnapshot ledger() const { return ledger_.snapshot(); }

  /// With a tree router whose tree pointer is null, the manifest's tree is used.
  Routed route(const Eigen::Ref<const Vector>& x, const Router& router) const;
  Vector forward(const Eigen::Ref<const Vector>& x, const Router& router);
  /// Same outputs as calling forward() per column; each routed cell's
  /// pathway is loaded once for all of its samples.
  Matrix forward_batch(const Matrix& inputs, const Router& router);

 private:
  Router resolve(const Router& router) const;
  MlpParams load(std::size_t cell) const;

  Manifest manifest_;
  std::filesystem::path dir_;
  MemoryLedger ledger_;
};

struct BudgetedForward {
  Vector prediction;
  LedgerSnapshot ledger;
};

/// One budgeted inference on a fresh ledger.
BudgetedForward forward_with_budget(const Manifest& manifest, const std::filesystem::path& dir,
                                    const Eigen::Ref<const Vector>& x, std::size_t budget,
                                    const Router& router = Router::brute_force());

/// Header "peak_resident,total_loaded,prototype_queries".
void write_ledger_header(std::ostream& out);
void ledger_report(std::ostream& out, const LedgerSnapshot& ledger);
std::string ledger_report(const LedgerSnapshot& ledger);

}  // namespace np
