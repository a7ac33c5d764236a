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
#include <filesystem>
#include <cstring>

#include "doctest.h"
#include "np/manifest.hpp"
#include "np/weights_io.hpp"
#include "test_util.hpp"

using namespace np;
using np::testing::bit_identical;
using np::testing::random_ensemble;

TEST_SUITE("manifest") {
  TEST_CASE("save and load reproduce predictions bit for bit") {
    np::testing::TempDir dir("model");
    const auto ens = random_ensemble(5, 3, 2, {4, 7}, 17);
    const auto manifest = save_model(ens, dir.path());
    CHECK(manifest.size() == 5);
    CHECK(manifest.pathways[1].path == "pathway_001.npw");
    CHECK(manifest.pathways[1].param_count == ens.nets[1].stored_scalar_count());
    CHECK(manifest.largest_pathway() == ens.nets[1].stored_scalar_count());
    CHECK(std::filesystem::exists(dir / kManifestFile));

    const auto loaded = load_model(dir.path());
    CHECK(loaded.ensemble.protos == ens.protos);
    for (std::size_t k = 0; k < 5; ++k) CHECK(bit_identical(loaded.ensemble.nets[k], ens.nets[k]));
    Rng rng(4);
    const Matrix x = np::testing::random_matrix(rng, 3, 1000);
    const Matrix a = predict(ens, x), b = predict(loaded.ensemble, x);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
  }

  TEST_CASE("json round trip with a routing tree") {
    const auto ens = random_ensemble(9, 2, 1, {3}, 5);
    const auto tree = build_tree(ens.protos, 3, 1);
    np::testing::TempDir dir("tree");
    const auto saved = save_model(ens, dir.path(), &tree);
    const auto back = manifest_from_json(manifest_to_json(saved));
    REQUIRE(back.tree.has_value());
    CHECK(back.tree->arity() == 3);
    CHECK(back.tree->nodes().size() == tree.nodes().size());
    CHECK(back.prototypes == saved.prototypes);
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
      const Vector x = np::testing::random_vector(rng, 2);
      CHECK(tree_route(*back.tree, x).prototype == tree_route(tree, x).prototype);
    }
    const auto file = load_manifest(dir / kManifestFile);
    CHECK(file.tree.has_value());
  }

  TEST_CASE("malformed manifests are rejected") {
    CHECK_THROWS_AS(manifest_from_json("not json"), FormatError);
    CHECK_THROWS_AS(manifest_from_json("[]"), FormatError);
    CHECK_THROWS_AS(manifest_from_json(R"({"version":1,"n":1,"m":1,"K":1})"), FormatError);
    const auto ens = random_ensemble(2, 1, 1, {2}, 1);
    np::testing::TempDir dir("bad");
    auto text = manifest_to_json(save_model(ens, dir.path()));
    CHECK_NOTHROW(manifest_from_json(text));
    auto wrong_version = text;
    wrong_version.replace(wrong_version.find("\"version\": 1"), 12, "\"version\": 9");
    CHECK_THROWS_AS(manifest_from_json(wrong_version), FormatError);
    auto absolute = text;
    absolute.replace(absolute.find("pathway_000.npw"), 15, "/etc/passwd.npw");
    CHECK_THROWS_AS(manifest_from_json(absolute), FormatError);
    auto dup = text;
    dup.replace(dup.find("pathway_001.npw"), 15, "pathway_000.npw");
    CHECK_THROWS_AS(manifest_from_json(dup), FormatError);
    CHECK_THROWS_AS(load_manifest(dir / "missing.json"), IoError);
  }

  TEST_CASE("a weights file that disagrees with its entry is rejected") {
    np::testing::TempDir dir("mismatch");
    const auto ens = random_ensemble(2, 2, 1, {3}, 8);
    save_model(ens, dir.path());
    save_weights(np::testing::random_net({2, 6, 1}, 1), dir / pathway_file_name(1));
    CHECK_THROWS_AS(load_model(dir.path()), FormatError);
  }
}
