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
#include "np/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "np/rng.hpp"

namespace np {
namespace {

bool columns_equal(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    if (m(r, a) != m(r, b)) return false;
  return true;
}

std::size_t first_duplicate(const Matrix& points) {
  for (Eigen::Index j = 1; j < points.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (columns_equal(points, i, j)) return static_cast<std::size_t>(j);
  return static_cast<std::size_t>(points.cols());
}

void check_dim(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos) {
  if (static_cast<std::size_t>(x.size()) != protos.dim())
    throw ShapeError("point has dimension " + std::to_string(x.size()) +
                     ", prototypes live in dimension " + std::to_string(protos.dim()));
}

}  // namespace

PrototypeSet::PrototypeSet(Matrix points) : points_(std::move(points)) {
  if (points_.cols() == 0 || points_.rows() == 0)
    throw DomainError("prototype set must contain at least one point of positive dimension");
  if (!points_.allFinite()) throw DomainError("prototype coordinates must be finite");
  if (first_duplicate(points_) != size())
    throw DomainError("prototypes must be pairwise distinct");
}

Bounds Bounds::of(const Matrix& samples) {
  if (samples.cols() == 0) throw DomainError("bounds of an empty sample set");
  return {samples.rowwise().minCoeff(), samples.rowwise().maxCoeff()};
}

double squared_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t assign(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos) {
  check_dim(x, protos);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < protos.size(); ++i) {
    const double d = squared_distance(x, protos.point(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> assign_all(const Matrix& samples, const PrototypeSet& protos) {
  std::vector<std::size_t> out(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index c = 0; c < samples.cols(); ++c)
    out[static_cast<std::size_t>(c)] = assign(samples.col(c), protos);
  return out;
}

Vector prototype_distances(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos) {
  check_dim(x, protos);
  Vector d(static_cast<Eigen::Index>(protos.size()));
  for (std::size_t i = 0; i < protos.size(); ++i)
    d[static_cast<Eigen::Index>(i)] = std::sqrt(squared_distance(x, protos.point(i)));
  return d;
}

Vector softmax_of_negative(const Eigen::Ref<const Vector>& distances, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("softmax temperature must be positive");
  Vector logits = -distances / temperature;
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp().matrix();
  return w / w.sum();
}

Vector softmax_routing(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos,
                       double temperature) {
  if (!(temperature > 0.0)) throw DomainError("softmax temperature must be positive");
  return softmax_of_negative(prototype_distances(x, protos), temperature);
}

PrototypeSet init_prototypes(const Bounds& bounds, std::size_t count, std::uint64_t seed,
                             std::size_t max_retries) {
  if (count == 0) throw DomainError("need at least one prototype");
  if (bounds.low.size() != bounds.high.size() || bounds.low.size() == 0)
    throw ShapeError("bounds must have matching, non-empty low/high vectors");
  for (Eigen::Index i = 0; i < bounds.low.size(); ++i)
    if (!(bounds.low[i] < bounds.high[i]))
      throw DomainError("bounds need low < high on every coordinate");

  Rng rng(seed);
  const auto n = bounds.low.size();
  Matrix points(n, static_cast<Eigen::Index>(count));
  auto draw = [&](Eigen::Index c) {
    for (Eigen::Index r = 0; r < n; ++r) points(r, c) = rng.uniform(bounds.low[r], bounds.high[r]);
  };
  for (Eigen::Index c = 0; c < points.cols(); ++c) draw(c);
  for (std::size_t attempt = 0;; ++attempt) {
    const std::size_t dup = first_duplicate(points);
    if (dup == count) break;
    if (attempt >= max_retries)
      throw DomainError("could not draw " + std::to_string(count) +
                        " distinct prototypes; the box is degenerate");
    draw(static_cast<Eigen::Index>(dup));
  }
  return PrototypeSet(std::move(points));
}

std::size_t distinct_columns(const Matrix& samples) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(samples.cols()));
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
      if (samples(r, a) < samples(r, b)) return true;
      if (samples(r, b) < samples(r, a)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!columns_equal(samples, order[i - 1], order[i])) ++distinct;
  return distinct;
}

KMeansResult kmeans(const Matrix& features, std::size_t count, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (count == 0) throw DomainError("k-means needs K >= 1");
  if (distinct_columns(features) < count)
    throw DomainError("k-means needs at least " + std::to_string(count) + " distinct samples");

  const Eigen::Index n = features.rows();
  const Eigen::Index samples = features.cols();
  const auto k = static_cast<Eigen::Index>(count);
  Rng rng(seed);

  // k-means++ seeding
  Matrix centers(n, k);
  std::vector<double> d2(static_cast<std::size_t>(samples), std::numeric_limits<double>::infinity());
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(samples)));
  centers.col(0) = features.col(first);
  for (Eigen::Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < samples; ++s) {
      auto& ds = d2[static_cast<std::size_t>(s)];
      ds = std::min(ds, squared_distance(features.col(s), centers.col(c - 1)));
      total += ds;
    }
    double target = rng.uniform() * total;
    Eigen::Index pick = -1;
    for (Eigen::Index s = 0; s < samples; ++s) {
      const double ds = d2[static_cast<std::size_t>(s)];
      if (ds <= 0.0) continue;
      pick = s;
      if (target < ds) break;
      target -= ds;
    }
    centers.col(c) = features.col(pick);
  }

  std::vector<std::size_t> assignment(static_cast<std::size_t>(samples), 0);
  std::vector<double> inertia;
  std::size_t iterations = 0;
  std::vector<Eigen::Index> members(static_cast<std::size_t>(k));
  for (; iterations < std::max<std::size_t>(options.max_iters, 1); ++iterations) {
    double total = 0.0;
    std::vector<double> own(static_cast<std::size_t>(samples));
    for (Eigen::Index s = 0; s < samples; ++s) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = squared_distance(features.col(s), centers.col(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::size_t>(c);
        }
      }
      assignment[static_cast<std::size_t>(s)] = best;
      own[static_cast<std::size_t>(s)] = best_d;
      total += best_d;
    }

    // empty clusters take the point currently farthest from its centroid
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (auto a : assignment) ++sizes[a];
    for (Eigen::Index c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index s = 0; s < samples; ++s) {
        const auto su = static_cast<std::size_t>(s);
        if (sizes[assignment[su]] > 1 && own[su] > far_d) {
          far_d = own[su];
          far = s;
        }
      }
      if (far < 0) break;
      const auto fu = static_cast<std::size_t>(far);
      --sizes[assignment[fu]];
      assignment[fu] = static_cast<std::size_t>(c);
      sizes[static_cast<std::size_t>(c)] = 1;
      total -= own[fu];
      own[fu] = 0.0;
      centers.col(c) = features.col(far);
    }
    inertia.push_back(total);

    Matrix next = Matrix::Zero(n, k);
    for (Eigen::Index s = 0; s < samples; ++s)
      next.col(static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(s)])) += features.col(s);
    double shift = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      next.col(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      shift = std::max(shift, std::sqrt(squared_distance(next.col(c), centers.col(c))));
    }
    centers = std::move(next);
    if (shift < options.tol) {
      ++iterations;
      break;
    }
  }
  return {PrototypeSet(std::move(centers)), std::move(assignment), std::move(inertia), iterations};
}

CellHistogram cell_histogram(std::span<const std::size_t> assignment, std::span<const int> labels,
                             std::size_t cells) {
  if (assignment.size() != labels.size())
    throw ShapeError("assignment and labels differ in length");
  CellHistogram hist(cells);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= cells) throw DomainError("assignment index out of range");
    ++hist[assignment[i]][labels[i]];
  }
  return hist;
}

}  // namespace np
