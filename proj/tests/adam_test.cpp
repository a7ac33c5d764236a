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
#include <set>

#include "doctest.h"
#include "np/adam.hpp"
#include "np/rng.hpp"
#include "test_util.hpp"

using namespace np;

namespace {

// f(w) = w^2 on a 1x1 matrix parameter.
Matrix quadratic_grad(const Matrix& w) { return 2.0 * w; }

}  // namespace

TEST_SUITE("adam") {
  TEST_CASE("zero gradient leaves parameters unchanged") {
    MlpParams net = np::testing::random_net({3, 4, 2}, 1);
    const auto before = flatten(net.layers);
    OptimizerState state = OptimizerState::for_params(net);
    for (int i = 0; i < 5; ++i) adam_update(net, GradientBuffer::zeros_like(net), state, {});
    CHECK(flatten(net.layers) == before);
    CHECK(state.step == 5);
  }

  TEST_CASE("one step on w^2 from 1 decreases w") {
    Matrix w = Matrix::Constant(1, 1, 1.0);
    MatrixMoments state = MatrixMoments::zeros_like(w);
    adam_update(w, quadratic_grad(w), state, {0.1});
    CHECK(w(0, 0) < 1.0);
    // the first bias-corrected step has length lr
    CHECK(w(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  }

  TEST_CASE("2000 steps on a 1-D quadratic converge") {
    Matrix w = Matrix::Constant(1, 1, 1.0);
    MatrixMoments state = MatrixMoments::zeros_like(w);
    for (int i = 0; i < 2000; ++i) adam_update(w, quadratic_grad(w), state, {0.01});
    CHECK(std::abs(w(0, 0)) < 1e-3);
  }

  TEST_CASE("non-finite gradient is rejected without side effects") {
    MlpParams net = np::testing::random_net({2, 3, 1}, 2);
    OptimizerState state = OptimizerState::for_params(net);
    GradientBuffer g = GradientBuffer::zeros_like(net);
    g.layers[0].weight.setConstant(0.5);
    adam_update(net, g, state, {});
    const auto params = flatten(net.layers);
    const auto first = flatten(state.first.layers);
    g.layers[1].bias[0] = NAN;
    CHECK_THROWS_AS(adam_update(net, g, state, {}), NumericError);
    CHECK(flatten(net.layers) == params);
    CHECK(flatten(state.first.layers) == first);
    CHECK(state.step == 1);

    Matrix w = Matrix::Ones(2, 2);
    MatrixMoments ms = MatrixMoments::zeros_like(w);
    CHECK_THROWS_AS(adam_update(w, Matrix::Constant(2, 2, INFINITY), ms, {}), NumericError);
    CHECK(ms.step == 0);
  }

  TEST_CASE("value form matches the in-place form bit for bit") {
    MlpParams net = np::testing::random_net({2, 5, 3}, 3);
    Rng rng(1);
    GradientBuffer g = GradientBuffer::zeros_like(net);
    auto values = flatten(g.layers);
    for (auto& v : values) v = rng.normal();
    unflatten(g.layers, values);
    OptimizerState state = OptimizerState::for_params(net);
    const auto [next, next_state] = adam_step(net, g, state, {});
    adam_update(net, g, state, {});
    CHECK(flatten(next.layers) == flatten(net.layers));
    CHECK(flatten(next_state.second.layers) == flatten(state.second.layers));
  }
}

TEST_SUITE("rng") {
  TEST_CASE("streams are reproducible and distinct") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 20; ++s)
      for (std::uint64_t k = 0; k < 20; ++k) seeds.insert(derive_seed(s, k));
    CHECK(seeds.size() == 400);
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  }

  TEST_CASE("uniform, below and normal moments") {
    Rng rng(99);
    double sum = 0, sq = 0;
    std::vector<int> counts(7, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      CHECK_UNARY(u >= 0.0);
      CHECK_UNARY(u < 1.0);
      ++counts[rng.below(7)];
      const double z = rng.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
    for (int c : counts) CHECK(std::abs(c - n / 7.0) < 0.02 * n / 7.0);
  }

  TEST_CASE("shuffle is a permutation") {
    Rng rng(5);
    std::vector<int> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i;
    rng.shuffle(v.begin(), v.end());
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 100);
    bool moved = false;
    for (int i = 0; i < 100; ++i) moved |= v[i] != i;
    CHECK(moved);
  }
}
