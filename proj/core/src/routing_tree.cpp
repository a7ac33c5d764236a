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
#include "np/routing_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "high_precision.hpp"
#include "np/rng.hpp"

namespace np {
namespace {

using detail::HighFloat;

std::uint64_t ceil_snapped(const HighFloat& value) {
  if (value <= 0) return 0;
  return detail::ceil_to_int(value).convert_to<std::uint64_t>();
}

HighFloat raw_height(double doubling, double delta, double diam, std::uint64_t v) {
  if (!(doubling > 1.0)) throw DomainError("doubling constant C must exceed 1");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!(diam > 0.0)) throw DomainError("diameter must be positive");
  if (v < 2) throw DomainError("tree arity v must be at least 2");
  const HighFloat log_v_c = boost::multiprecision::log(HighFloat(doubling)) /
                            boost::multiprecision::log(HighFloat(v));
  const HighFloat ratio = HighFloat(diam) / HighFloat(delta);
  return log_v_c * (1 + detail::log2(ratio));
}

// k-means centroids, then greedy capacity-constrained assignment: pairs are
// taken in increasing distance and a point joins a centroid while it has room.
std::vector<std::vector<std::size_t>> balanced_groups(const Matrix& points,
                                                      const std::vector<std::size_t>& members,
                                                      std::size_t groups, std::size_t capacity,
                                                      std::uint64_t seed) {
  const auto count = members.size();
  Matrix sub(points.rows(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i)
    sub.col(static_cast<Eigen::Index>(i)) = points.col(static_cast<Eigen::Index>(members[i]));

  Matrix centers = kmeans(sub, groups, seed).centroids.points();
  std::vector<std::size_t> label(count, 0);
  for (int round = 0; round < 20; ++round) {
    struct Pair {
      double d;
      std::size_t point;
      std::size_t group;
    };
    std::vector<Pair> pairs;
    pairs.reserve(count * groups);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t g = 0; g < groups; ++g)
        pairs.push_back({squared_distance(sub.col(static_cast<Eigen::Index>(i)),
                                          centers.col(static_cast<Eigen::Index>(g))),
                         i, g});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.d != b.d) return a.d < b.d;
      if (a.point != b.point) return a.point < b.point;
      return a.group < b.group;
    });
    std::vector<std::size_t> next(count, groups);
    std::vector<std::size_t> fill(groups, 0);
    for (const auto& p : pairs) {
      if (next[p.point] != groups || fill[p.group] >= capacity) continue;
      next[p.point] = p.group;
      ++fill[p.group];
    }
    const bool stable = round > 0 && next == label;
    label = std::move(next);
    if (stable) break;
    Matrix updated = Matrix::Zero(centers.rows(), centers.cols());
    for (std::size_t i = 0; i < count; ++i)
      updated.col(static_cast<Eigen::Index>(label[i])) += sub.col(static_cast<Eigen::Index>(i));
    for (std::size_t g = 0; g < groups; ++g)
      updated.col(static_cast<Eigen::Index>(g)) /= static_cast<double>(fill[g]);
    centers = std::move(updated);
  }
  std::vector<std::vector<std::size_t>> out(groups);
  for (std::size_t i = 0; i < count; ++i) out[label[i]].push_back(members[i]);
  return out;
}

Vector centroid(const Matrix& points, const std::vector<std::size_t>& members) {
  Vector c = Vector::Zero(points.rows());
  for (auto m : members) c += points.col(static_cast<Eigen::Index>(m));
  return c / static_cast<double>(members.size());
}

}  // namespace

CoveringNet greedy_cover(const Matrix& points, double delta) {
  if (points.cols() == 0) throw DomainError("greedy_cover needs a nonempty point set");
  if (!(delta > 0.0)) throw DomainError("greedy_cover needs delta > 0");
  const auto count = static_cast<std::size_t>(points.cols());
  std::vector<double> nearest(count, std::numeric_limits<double>::infinity());
  CoveringNet net;
  net.radius = delta;
  std::size_t next = 0;
  while (true) {
    net.center_indices.push_back(next);
    const auto c = points.col(static_cast<Eigen::Index>(next));
    double far_d = -1.0;
    std::size_t far = 0;
    for (std::size_t i = 0; i < count; ++i) {
      nearest[i] = std::min(nearest[i], std::sqrt(squared_distance(points.col(static_cast<Eigen::Index>(i)), c)));
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    if (far_d < delta) {
      net.covering_radius = far_d;
      break;
    }
    next = far;
  }
  net.centers.resize(points.rows(), static_cast<Eigen::Index>(net.center_indices.size()));
  for (std::size_t i = 0; i < net.center_indices.size(); ++i)
    net.centers.col(static_cast<Eigen::Index>(i)) = points.col(static_cast<Eigen::Index>(net.center_indices[i]));
  return net;
}

RoutingTree::RoutingTree(std::size_t arity, std::size_t prototype_count,
                         std::vector<RoutingNode> nodes)
    : arity_(arity), prototype_count_(prototype_count), nodes_(std::move(nodes)) {
  if (arity_ < 2) throw DomainError("routing tree arity must be at least 2");
  if (nodes_.empty()) throw DomainError("routing tree has no nodes");
  const auto dim = nodes_.front().representative.size();
  std::vector<int> seen(prototype_count_, 0);
  std::vector<int> parents(nodes_.size(), 0);
  // depth-first walk from the root computing the height and checking structure
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    ++visited;
    const auto& node = nodes_[id];
    if (node.representative.size() != dim) throw ShapeError("routing node dimensions differ");
    if (node.prototype) {
      if (!node.children.empty()) throw DomainError("routing leaf has children");
      if (*node.prototype >= prototype_count_) throw DomainError("leaf prototype index out of range");
      ++seen[*node.prototype];
      height_ = std::max(height_, depth);
      continue;
    }
    if (node.children.empty() || node.children.size() > arity_)
      throw DomainError("internal routing node must have between 1 and arity children");
    for (auto child : node.children) {
      if (child >= nodes_.size() || child == 0 || ++parents[child] > 1)
        throw DomainError("routing tree children do not form a tree");
      stack.emplace_back(child, depth + 1);
    }
  }
  if (visited != nodes_.size()) throw DomainError("routing tree has unreachable nodes");
  for (auto s : seen)
    if (s != 1) throw DomainError("each prototype must appear in exactly one leaf");
}

std::size_t ceil_log(std::size_t count, std::size_t v) {
  std::size_t h = 0;
  for (std::size_t reach = 1; reach < count; reach *= v) ++h;
  return h;
}

RoutingTree build_tree(const PrototypeSet& protos, std::size_t arity, std::uint64_t seed) {
  if (arity < 2) throw DomainError("routing tree arity must be at least 2");
  const Matrix& points = protos.points();
  std::vector<RoutingNode> nodes;
  std::vector<std::size_t> all(protos.size());
  std::iota(all.begin(), all.end(), 0);

  // iterative expansion keeps node ids in breadth-first order
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> members;
  };
  nodes.push_back({centroid(points, all), {}, std::nullopt});
  std::vector<Pending> queue{{0, all}};
  std::uint64_t split_counter = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t id = queue[q].node;
    const std::vector<std::size_t> members = std::move(queue[q].members);
    if (members.size() == 1) {
      nodes[id].prototype = members.front();
      nodes[id].representative = points.col(static_cast<Eigen::Index>(members.front()));
      continue;
    }
    const std::size_t h = ceil_log(members.size(), arity);
    std::size_t capacity = 1;
    for (std::size_t i = 0; i + 1 < h; ++i) capacity *= arity;
    const std::size_t groups = (members.size() + capacity - 1) / capacity;
    auto parts = balanced_groups(points, members, groups, capacity,
                                 derive_seed(seed, split_counter++));
    for (auto& part : parts) {
      const std::size_t child = nodes.size();
      nodes.push_back({centroid(points, part), {}, std::nullopt});
      nodes[id].children.push_back(child);
      queue.push_back({child, std::move(part)});
    }
  }
  return RoutingTree(arity, protos.size(), std::move(nodes));
}

RouteResult tree_route(const RoutingTree& tree, const Eigen::Ref<const Vector>& x) {
  if (static_cast<std::size_t>(x.size()) != tree.dim())
    throw ShapeError("point has dimension " + std::to_string(x.size()) +
                     ", routing tree expects " + std::to_string(tree.dim()));
  const auto& nodes = tree.nodes();
  RouteResult result;
  std::size_t id = 0;
  while (!nodes[id].prototype) {
    const auto& children = nodes[id].children;
    if (children.size() == 1) {
      id = children.front();
      continue;
    }
    std::size_t best = children.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (auto child : children) {
      const double d = squared_distance(x, nodes[child].representative);
      ++result.queries;
      if (d < best_d) {
        best_d = d;
        best = child;
      }
    }
    id = best;
  }
  result.prototype = *nodes[id].prototype;
  return result;
}

double routing_agreement(const RoutingTree& tree, const PrototypeSet& protos, const Matrix& samples) {
  if (samples.cols() == 0) return 1.0;
  std::size_t agree = 0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c)
    if (tree_route(tree, samples.col(c)).prototype == assign(samples.col(c), protos)) ++agree;
  return static_cast<double>(agree) / static_cast<double>(samples.cols());
}

TreeCounts tree_counts(std::uint64_t v, std::uint64_t h) {
  if (v < 2) throw DomainError("tree arity v must be at least 2");
  const BigInt base(v);
  BigInt leaves = boost::multiprecision::pow(base, static_cast<unsigned>(h));
  BigInt nodes = (leaves * base - 1) / (base - 1);
  return {std::move(leaves), std::move(nodes)};
}

std::optional<double> tree_nodes_literal(std::uint64_t v, std::uint64_t h) {
  if (h == 1) return std::nullopt;
  return (std::pow(static_cast<double>(v), static_cast<double>(h + 1)) - 1.0) /
         (static_cast<double>(h) - 1.0);
}

std::uint64_t height_bound(double doubling, double delta, double diam, std::uint64_t v) {
  return ceil_snapped(raw_height(doubling, delta, diam, v));
}

double height_bound_raw(double doubling, double delta, double diam, std::uint64_t v) {
  return raw_height(doubling, delta, diam, v).convert_to<double>();
}

double euclidean_doubling_constant(std::size_t n) {
  return std::ldexp(1.0, static_cast<int>(n + 1));
}

}  // namespace np
