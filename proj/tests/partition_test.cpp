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
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "np/partition.hpp"
#include "np/rng.hpp"
#include "test_util.hpp"

using namespace np;
using np::testing::random_matrix;

namespace {

std::size_t argmin_scan(const Vector& x, const Matrix& p) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    double d = 0;
    for (Eigen::Index r = 0; r < p.rows(); ++r) d += (x[r] - p(r, i)) * (x[r] - p(r, i));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("prototype set invariants") {
    CHECK_THROWS_AS(PrototypeSet(Matrix(2, 0)), DomainError);
    Matrix dup(2, 2);
    dup << 1, 1, 2, 2;
    CHECK_THROWS_AS(PrototypeSet{dup}, DomainError);
    Matrix nan = Matrix::Zero(1, 1);
    nan(0, 0) = NAN;
    CHECK_THROWS_AS(PrototypeSet{nan}, DomainError);
  }

  TEST_CASE("assign examples") {
    const PrototypeSet one(Matrix::Constant(2, 1, 3.0));
    CHECK(assign(Vector{{-5.0, 9.0}}, one) == 0);
    Matrix p(1, 2);
    p << -1.0, 1.0;
    CHECK(assign(Vector{{0.0}}, PrototypeSet(p)) == 0);
    Matrix q(1, 2);
    q << 1.0, -1.0;
    CHECK(assign(Vector{{0.0}}, PrototypeSet(q)) == 0);
    CHECK(assign(Vector{{-0.5}}, PrototypeSet(q)) == 1);
    CHECK_THROWS_AS(assign(Vector{{0.0, 1.0}}, PrototypeSet(q)), ShapeError);
  }

  TEST_CASE("assign agrees with an exhaustive scan") {
    Rng rng(1);
    const Matrix p = random_matrix(rng, 3, 16);
    const PrototypeSet protos(p);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = np::testing::random_vector(rng, 3, -1.5, 1.5);
      CHECK(assign(x, protos) == argmin_scan(x, p));
    }
  }

  TEST_CASE("assign is invariant under rigid motions") {
    Rng rng(2);
    const Matrix p = random_matrix(rng, 2, 8);
    const double angle = 0.7;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Eigen::Vector2d shift(3.0, -2.0);
    const Matrix moved = (rot * p).colwise() + shift;
    for (int i = 0; i < 500; ++i) {
      const Vector x = np::testing::random_vector(rng, 2);
      CHECK(assign(x, PrototypeSet(p)) == assign(rot * x + shift, PrototypeSet(moved)));
    }
  }

  TEST_CASE("softmax routing") {
    const PrototypeSet one(Matrix::Zero(2, 1));
    CHECK(softmax_routing(Vector{{4.0, 1.0}}, one)[0] == 1.0);

    Matrix p(1, 2);
    p << -1.0, 1.0;
    const Vector half = softmax_routing(Vector{{0.0}}, PrototypeSet(p));
    CHECK(half[0] == 0.5);
    CHECK(half[1] == 0.5);

    const Vector w = softmax_of_negative(Vector{{0.0, 1.0}}, 1.0);
    CHECK(w[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0))).epsilon(1e-15));
    CHECK(w[0] == doctest::Approx(0.7311).epsilon(1e-4));

    CHECK_THROWS_AS(softmax_routing(Vector{{0.0}}, PrototypeSet(p), 0.0), DomainError);
  }

  TEST_CASE("softmax routing is a probability vector, permutation-equivariant, and sharpens to assign") {
    Rng rng(3);
    const Matrix p = random_matrix(rng, 2, 6);
    std::vector<Eigen::Index> perm{3, 0, 5, 1, 4, 2};
    Matrix permuted(2, 6);
    for (Eigen::Index i = 0; i < 6; ++i) permuted.col(i) = p.col(perm[static_cast<std::size_t>(i)]);
    for (int t = 0; t < 200; ++t) {
      const Vector x = np::testing::random_vector(rng, 2);
      const Vector w = softmax_routing(x, PrototypeSet(p), 0.5);
      CHECK(w.minCoeff() >= 0.0);
      CHECK(std::abs(w.sum() - 1.0) <= 1e-12);
      const Vector wp = softmax_routing(x, PrototypeSet(permuted), 0.5);
      for (Eigen::Index i = 0; i < 6; ++i) CHECK(wp[i] == doctest::Approx(w[perm[static_cast<std::size_t>(i)]]).epsilon(1e-14));
      const Vector cold = softmax_routing(x, PrototypeSet(p), 1e-4);
      CHECK(cold[static_cast<Eigen::Index>(assign(x, PrototypeSet(p)))] > 0.99);
    }
  }

  TEST_CASE("init_prototypes") {
    Bounds box{Vector{{0.0, -2.0}}, Vector{{1.0, 2.0}}};
    const auto a = init_prototypes(box, 5, 11), b = init_prototypes(box, 5, 11);
    CHECK(a == b);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(a.point(k)[0] >= 0.0);
      CHECK(a.point(k)[0] <= 1.0);
      CHECK(a.point(k)[1] >= -2.0);
      CHECK(a.point(k)[1] <= 2.0);
    }
    Bounds unit{Vector::Zero(2), Vector::Ones(2)};
    Vector mean = Vector::Zero(2);
    for (std::uint64_t s = 0; s < 10000; ++s) mean += init_prototypes(unit, 4, s).points().rowwise().mean();
    mean /= 10000.0;
    CHECK(std::abs(mean[0] - 0.5) < 0.02);
    CHECK(std::abs(mean[1] - 0.5) < 0.02);

    Bounds flat{Vector::Zero(1), Vector::Zero(1)};
    CHECK_THROWS_AS(init_prototypes(flat, 2, 0), DomainError);
  }

  TEST_CASE("kmeans with K equal to the number of distinct points") {
    Matrix pts(2, 6);
    pts << 0, 1, 5, 0, 1, 5,
           0, 1, 5, 0, 1, 5;
    const auto r = kmeans(pts, 3, 4);
    std::vector<double> xs;
    for (std::size_t k = 0; k < 3; ++k) xs.push_back(r.centroids.point(k)[0]);
    std::sort(xs.begin(), xs.end());
    CHECK(xs == std::vector<double>{0, 1, 5});
    CHECK_THROWS_AS(kmeans(pts, 4, 4), DomainError);
  }

  TEST_CASE("kmeans finds two separated blobs with non-increasing inertia") {
    Rng rng(8);
    Matrix pts(2, 400);
    for (Eigen::Index c = 0; c < 400; ++c) {
      const double cx = c < 200 ? -5.0 : 5.0;
      pts(0, c) = cx + rng.normal(0, 0.5);
      pts(1, c) = rng.normal(0, 0.5);
    }
    const Vector left = pts.leftCols(200).rowwise().mean();
    const Vector right = pts.rightCols(200).rowwise().mean();
    const auto r = kmeans(pts, 2, 1);
    const auto& c = r.centroids;
    const bool order = c.point(0)[0] < c.point(1)[0];
    CHECK((c.point(order ? 0 : 1) - left).norm() < 0.1);
    CHECK((c.point(order ? 1 : 0) - right).norm() < 0.1);
    for (std::size_t i = 1; i < r.inertia.size(); ++i) CHECK(r.inertia[i] <= r.inertia[i - 1] + 1e-9);
  }

  TEST_CASE("cell histogram") {
    const std::vector<std::size_t> cells{0, 0, 0};
    const std::vector<int> labels{0, 0, 1};
    const auto h = cell_histogram(cells, labels, 2);
    CHECK(h[0] == std::map<int, std::size_t>{{0, 2}, {1, 1}});
    CHECK(h[1].empty());

    Rng rng(4);
    std::vector<std::size_t> a(1000);
    std::vector<int> l(1000);
    std::vector<std::vector<std::size_t>> tally(5, std::vector<std::size_t>(3, 0));
    for (std::size_t i = 0; i < 1000; ++i) {
      a[i] = rng.below(5);
      l[i] = static_cast<int>(rng.below(3));
      ++tally[a[i]][static_cast<std::size_t>(l[i])];
    }
    const auto hist = cell_histogram(a, l, 5);
    for (std::size_t k = 0; k < 5; ++k)
      for (int c = 0; c < 3; ++c) {
        const auto it = hist[k].find(c);
        CHECK((it == hist[k].end() ? 0 : it->second) == tally[k][static_cast<std::size_t>(c)]);
      }
    CHECK_THROWS_AS(cell_histogram(a, std::vector<int>(3), 5), ShapeError);
  }

  TEST_CASE("partition property") {
    Rng rng(6);
    const Matrix p = random_matrix(rng, 2, 7);
    const Matrix xs = random_matrix(rng, 2, 2000);
    const auto cells = assign_all(xs, PrototypeSet(p));
    for (Eigen::Index c = 0; c < xs.cols(); ++c) {
      const double own = (xs.col(c) - p.col(static_cast<Eigen::Index>(cells[static_cast<std::size_t>(c)]))).norm();
      for (Eigen::Index i = 0; i < p.cols(); ++i) CHECK(own <= (xs.col(c) - p.col(i)).norm());
    }
  }
}
