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
#include <optional>
#include <string>
#include <vector>

#include "np/partition.hpp"
#include "np/routing_tree.hpp"
#include "np/trainer.hpp"

namespace np {

inline constexpr std::uint32_t kManifestVersion = 1;

struct PathwayEntry {
  std::string path;             // relative to the model directory
  std::size_t param_count = 0;  // stored scalars in the weights file
};

/// Description of a saved model: prototypes plus one weights file per pathway.
struct Manifest {
  std::uint32_t version = kManifestVersion;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  PrototypeSet prototypes;
  std::vector<PathwayEntry> pathways;
  std::optional<RoutingTree> tree;

  std::size_t size() const noexcept { return pathways.size(); }
  std::size_t largest_pathway() const noexcept;
  /// Throws FormatError on inconsistent counts, duplicate or absolute paths.
  void validate() const;
};

/// UTF-8 JSON with keys version, n, m, K, prototypes (K rows of n numbers),
/// pathways ([{path, param_count}]) and optionally tree ({arity, nodes}).
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);

void save_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

inline constexpr const char* kManifestFile = "manifest.json";

/// Weights file name of pathway k: pathway_000.npw, pathway_001.npw, ...
std::string pathway_file_name(std::size_t k);

/// Writes manifest.json and one weights file per pathway into `dir` (created if missing).
Manifest save_model(const PathwayEnsemble& ensemble, const std::filesystem::path& dir,
                    const RoutingTree* tree = nullptr);
/// Loads every pathway; checks each against its manifest entry.
struct LoadedModel {
  Manifest manifest;
  PathwayEnsemble ensemble;
};
LoadedModel load_model(const std::filesystem::path& dir);

}  // namespace np
