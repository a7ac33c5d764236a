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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "np/trainer.hpp"

namespace np::cli {

/// Training settings plus everything a command needs to locate its inputs.
struct RunConfig {
  TrainConfig train;
  std::string data;              // dataset path (CSV or npf features)
  std::size_t prototypes = 4;    // K
  std::size_t arity = 0;         // nu; 0 builds no routing tree
  std::size_t budget = 0;        // 0: the largest pathway
  std::string out = "model";
  double train_ratio = 0.8;
  bool standardize = true;
  std::string prototype_method = "energy";  // energy | kmeans
  std::size_t seeds = 1;

  /// Sets one key; throws DomainError naming the key for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Every key accepted by set().
  static const std::vector<std::string>& keys();
};

/// Applies "key = value" lines; '#' starts a comment. Errors carry the line number.
void apply_config(RunConfig& config, std::istream& in, const std::string& source = "config");
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// The settings in config-file syntax, one key per line.
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace np::cli
