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
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "np/common.hpp"
#include "np/partition.hpp"

namespace np {

using BigInt = boost::multiprecision::cpp_int;

/// A delta-net of a finite point set: every input lies within `radius` of a
/// center and the centers are pairwise at least `radius` apart.
struct CoveringNet {
  Matrix centers;                         // n x N_delta
  std::vector<std::size_t> center_indices;  // columns of the input that became centers
  double radius = 0.0;
  /// Largest distance from an input point to its nearest center (< radius).
  double covering_radius = 0.0;
};

/// Farthest-point greedy selection starting from the first column.
CoveringNet greedy_cover(const Matrix& points, double delta);

struct RoutingNode {
  Vector representative;
  std::vector<std::size_t> children;     // indices into RoutingTree::nodes()
  std::optional<std::size_t> prototype;  // set on leaves only
};

/// nu-ary hierarchy over a prototype set. Node 0 is the root.
class RoutingTree {
 public:
  /// Validates arity >= 2, fan-out within [1, arity] and that each prototype
  /// index in [0, prototype_count) is held by exactly one leaf.
  RoutingTree(std::size_t arity, std::size_t prototype_count, std::vector<RoutingNode> nodes);

  std::size_t arity() const noexcept { return arity_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t prototype_count() const noexcept { return prototype_count_; }
  std::size_t leaf_count() const noexcept { return prototype_count_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(nodes_.front().representative.size()); }
  const std::vector<RoutingNode>& nodes() const noexcept { return nodes_; }

 private:
  std::size_t arity_;
  std::size_t prototype_count_;
  std::vector<RoutingNode> nodes_;
  std::size_t height_ = 0;
};

/// Recursive nu-way grouping of the prototypes. Each group of c > 1 prototypes
/// is split into ceil(c / nu^(h-1)) clusters of at most nu^(h-1) members, where
/// h = ceil(log_nu c), by k-means followed by capacity-constrained
/// reassignment. The result has height exactly ceil(log_nu K). Node
/// representatives are group centroids; leaves hold the prototypes themselves.
RoutingTree build_tree(const PrototypeSet& protos, std::size_t arity, std::uint64_t seed);

struct RouteResult {
  std::size_t prototype = 0;
  std::size_t queries = 0;  // distance evaluations performed
};

/// Greedy descent to the nearest child representative (lowest index on ties).
/// Not guaranteed to match assign(); see routing_agreement().
RouteResult tree_route(const RoutingTree& tree, const Eigen::Ref<const Vector>& x);

/// Fraction of the columns of `samples` on which tree_route agrees with assign.
double routing_agreement(const RoutingTree& tree, const PrototypeSet& protos, const Matrix& samples);

/// smallest h >= 0 with v^h >= count
std::size_t ceil_log(std::size_t count, std::size_t v);

struct TreeCounts {
  BigInt leaves;
  BigInt nodes;
};

/// Leaves v^h and nodes (v^(h+1) - 1) / (v - 1) of the complete v-ary tree of height h.
TreeCounts tree_counts(std::uint64_t v, std::uint64_t h);

/// The node count with denominator (h - 1) instead of (v - 1), kept for
/// comparison with printed derivations that use it. Empty when h == 1.
std::optional<double> tree_nodes_literal(std::uint64_t v, std::uint64_t h);

/// ceil(log_v(C) * (1 + log2(diam / delta))), clamped at 0. Logarithms other
/// than log_v are base 2.
std::uint64_t height_bound(double doubling, double delta, double diam, std::uint64_t v);
double height_bound_raw(double doubling, double delta, double diam, std::uint64_t v);

/// Doubling constant bound 2^(n+1) for subsets of R^n.
double euclidean_doubling_constant(std::size_t n);

}  // namespace np
