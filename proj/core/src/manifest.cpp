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
#include "np/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "np/weights_io.hpp"

namespace np {
namespace {

using nlohmann::json;

json vector_json(const Eigen::Ref<const Vector>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from(const json& j, std::size_t dim, const char* what) {
  if (!j.is_array() || j.size() != dim)
    throw FormatError(std::string("manifest: ") + what + " must be an array of " + std::to_string(dim) + " numbers");
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw FormatError(std::string("manifest: ") + what + " holds a non-number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("manifest: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("manifest: key '") + key + "' has the wrong type");
  }
}

}  // namespace

std::size_t Manifest::largest_pathway() const noexcept {
  std::size_t best = 0;
  for (const auto& p : pathways) best = std::max(best, p.param_count);
  return best;
}

void Manifest::validate() const {
  if (version != kManifestVersion) throw FormatError("unsupported manifest version " + std::to_string(version));
  if (pathways.empty()) throw FormatError("manifest lists no pathways");
  if (pathways.size() != prototypes.size())
    throw FormatError("manifest has " + std::to_string(pathways.size()) + " pathways for " +
                      std::to_string(prototypes.size()) + " prototypes");
  if (input_dim != prototypes.dim()) throw FormatError("manifest prototype dimension differs from n");
  if (output_dim == 0) throw FormatError("manifest output dimension must be positive");
  std::set<std::string> seen;
  for (const auto& p : pathways) {
    const std::filesystem::path rel(p.path);
    if (p.path.empty() || rel.is_absolute() || rel.lexically_normal().string().starts_with(".."))
      throw FormatError("manifest pathway path '" + p.path + "' must be relative to the model directory");
    if (!seen.insert(rel.lexically_normal().string()).second)
      throw FormatError("manifest lists '" + p.path + "' twice");
  }
  if (tree && (tree->prototype_count() != prototypes.size() || tree->dim() != input_dim))
    throw FormatError("manifest routing tree does not match the prototypes");
}

std::string manifest_to_json(const Manifest& manifest) {
  manifest.validate();
  json j;
  j["version"] = manifest.version;
  j["n"] = manifest.input_dim;
  j["m"] = manifest.output_dim;
  j["K"] = manifest.size();
  json protos = json::array();
  for (std::size_t k = 0; k < manifest.prototypes.size(); ++k)
    protos.push_back(vector_json(manifest.prototypes.point(k)));
  j["prototypes"] = std::move(protos);
  json paths = json::array();
  for (const auto& p : manifest.pathways) paths.push_back({{"path", p.path}, {"param_count", p.param_count}});
  j["pathways"] = std::move(paths);
  if (manifest.tree) {
    json nodes = json::array();
    for (const auto& node : manifest.tree->nodes()) {
      json jn;
      jn["representative"] = vector_json(node.representative);
      jn["children"] = node.children;
      jn["prototype"] = node.prototype ? json(*node.prototype) : json(nullptr);
      nodes.push_back(std::move(jn));
    }
    j["tree"] = {{"arity", manifest.tree->arity()}, {"nodes", std::move(nodes)}};
  }
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("manifest must be a JSON object");
  const auto version = field<std::uint32_t>(j, "version");
  if (version != kManifestVersion) throw FormatError("unsupported manifest version " + std::to_string(version));
  const auto n = field<std::size_t>(j, "n");
  const auto m = field<std::size_t>(j, "m");
  const auto k = field<std::size_t>(j, "K");
  if (n == 0 || k == 0) throw FormatError("manifest: n and K must be positive");

  const json& jp = j.contains("prototypes") ? j["prototypes"] : json();
  if (!jp.is_array() || jp.size() != k) throw FormatError("manifest: prototypes must list K points");
  Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) points.col(static_cast<Eigen::Index>(i)) = vector_from(jp[i], n, "prototype");

  const json& jw = j.contains("pathways") ? j["pathways"] : json();
  if (!jw.is_array() || jw.size() != k) throw FormatError("manifest: pathways must list K entries");
  std::vector<PathwayEntry> pathways;
  for (const auto& e : jw) {
    if (!e.is_object()) throw FormatError("manifest: pathway entries must be objects");
    pathways.push_back({field<std::string>(e, "path"), field<std::size_t>(e, "param_count")});
  }

  std::optional<RoutingTree> tree;
  if (j.contains("tree") && !j["tree"].is_null()) {
    const json& jt = j["tree"];
    const auto arity = field<std::size_t>(jt, "arity");
    const json& jn = jt.contains("nodes") ? jt["nodes"] : json();
    if (!jn.is_array()) throw FormatError("manifest: tree nodes must be an array");
    std::vector<RoutingNode> nodes;
    for (const auto& node : jn) {
      RoutingNode rn;
      rn.representative = vector_from(node.value("representative", json()), n, "tree representative");
      rn.children = field<std::vector<std::size_t>>(node, "children");
      if (node.contains("prototype") && !node["prototype"].is_null())
        rn.prototype = field<std::size_t>(node, "prototype");
      nodes.push_back(std::move(rn));
    }
    try {
      tree.emplace(arity, k, std::move(nodes));
    } catch (const Error& e) {
      throw FormatError(std::string("manifest: invalid routing tree: ") + e.what());
    }
  }

  try {
    Manifest manifest{version, n, m, PrototypeSet(std::move(points)), std::move(pathways), std::move(tree)};
    manifest.validate();
    return manifest;
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  const std::string text = manifest_to_json(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return manifest_from_json(buffer.str());
}

std::string pathway_file_name(std::size_t k) {
  char name[32];
  std::snprintf(name, sizeof name, "pathway_%03zu.npw", k);
  return name;
}

Manifest save_model(const PathwayEnsemble& ensemble, const std::filesystem::path& dir,
                    const RoutingTree* tree) {
  ensemble.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  Manifest manifest{kManifestVersion, ensemble.protos.dim(), ensemble.nets.front().output_dim(),
                    ensemble.protos, {}, std::nullopt};
  if (tree) manifest.tree = *tree;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const std::string name = pathway_file_name(k);
    save_weights(ensemble.nets[k], dir / name);
    manifest.pathways.push_back({name, ensemble.nets[k].stored_scalar_count()});
  }
  save_manifest(manifest, dir / kManifestFile);
  return manifest;
}

LoadedModel load_model(const std::filesystem::path& dir) {
  Manifest manifest = load_manifest(dir / kManifestFile);
  PathwayEnsemble ensemble{manifest.prototypes, {}};
  for (const auto& entry : manifest.pathways) {
    MlpParams net = load_weights(dir / entry.path);
    if (net.stored_scalar_count() != entry.param_count || net.input_dim() != manifest.input_dim ||
        net.output_dim() != manifest.output_dim)
      throw FormatError(entry.path + " does not match its manifest entry");
    ensemble.nets.push_back(std::move(net));
  }
  return {std::move(manifest), std::move(ensemble)};
}

}  // namespace np
