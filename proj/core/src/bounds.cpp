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
#include "np/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "high_precision.hpp"

namespace np::bounds {
namespace {

using detail::HighFloat;
namespace mp = boost::multiprecision;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void HolderModulus::validate() const {
  require(alpha > 0.0 && alpha <= 1.0, "Hölder exponent alpha must lie in (0, 1]");
  require(lipschitz >= 0.0 && std::isfinite(lipschitz), "Hölder constant L must be finite and >= 0");
}

double modulus_inverse(const HolderModulus& modulus, double s) {
  modulus.validate();
  require(modulus.lipschitz > 0.0, "modulus inverse needs L > 0");
  require(s >= 0.0, "modulus inverse needs s >= 0");
  return std::pow(s / modulus.lipschitz, 1.0 / modulus.alpha);
}

DepthWidth pathway_depth_width(std::size_t n, std::size_t m, double eps, double r) {
  require(n >= 1 && m >= 1, "n and m must be at least 1");
  require(eps > 0.0, "eps must be positive");
  require(r >= 0.0, "r must be non-negative");
  const BigInt blocks = detail::ceil_to_int(mp::pow(HighFloat(eps), -HighFloat(r)));
  DepthWidth out;
  out.depth = BigInt(m) * (19 + 2 * BigInt(n) + 11 * blocks);
  out.width = 16 * BigInt(std::max<std::size_t>(n, 3)) + m;
  return out;
}

double theorem_delta(std::size_t n, std::size_t m, double eps, double r, const HolderModulus& modulus) {
  require(n >= 1 && m >= 1, "n and m must be at least 1");
  require(eps > 0.0, "eps must be positive");
  require(r >= 0.0, "r must be non-negative");
  const double scale = std::pow(eps, -2.0 * r / static_cast<double>(n)) / 2.0;
  const double argument = eps / (131.0 * std::sqrt(static_cast<double>(n * m)));
  return scale * modulus_inverse(modulus, argument);
}

TreeComplexity tree_complexity(double doubling, double delta, double diam, std::uint64_t v) {
  TreeComplexity out;
  out.height = height_bound(doubling, delta, diam, v);
  auto counts = tree_counts(v, out.height);
  out.leaves = std::move(counts.leaves);
  out.nodes = std::move(counts.nodes);
  return out;
}

RealBound vc_mlp_dstar_bound(std::size_t depth, std::size_t width) {
  require(depth >= 1 && width >= 1, "J and W must be at least 1");
  const HighFloat e = mp::exp(HighFloat(1));
  const HighFloat j(depth);
  const HighFloat w(width);
  const HighFloat inner = detail::log2(e * 2 * (j + 1) * w);
  const HighFloat value = j + (j + 1) * w * w * detail::log2(e * 4 * (j + 1) * w * inner);
  return {value.convert_to<double>(), detail::ceil_to_int(value)};
}

BigInt vc_mlp_dstar(std::size_t depth, std::size_t width) {
  return vc_mlp_dstar_bound(depth, width).ceiling;
}

RealBound vc_pathways_bound(const BigInt& base_vc, std::size_t n, std::size_t pathways) {
  require(base_vc >= 1, "base VC dimension d must be at least 1");
  require(n >= 1 && pathways >= 1, "n and L must be at least 1");
  const HighFloat l(pathways);
  const HighFloat log_l = detail::log2(HighFloat(std::max<std::size_t>(2, pathways)));
  HighFloat partition_term = 0;
  if (pathways > 1)
    partition_term = 2 * HighFloat(n + 1) * (l - 1) * detail::log2(3 * l - 3);
  const HighFloat d = base_vc.convert_to<HighFloat>();
  const HighFloat value = 8 * l * log_l * log_l * (d > partition_term ? d : partition_term);
  return {value.convert_to<double>(), detail::ceil_to_int(value)};
}

CurseScaling curse_scaling(std::size_t n, double alpha, double eps) {
  require(n >= 1, "n must be at least 1");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  const double dn = static_cast<double>(n);
  return {std::pow(eps, -dn / (2.0 * alpha)), 1.0 / eps,
          dn / alpha * std::log2(1.0 / eps) / eps};
}

double packing_constant(std::size_t n, std::size_t m, const HolderModulus& modulus) {
  modulus.validate();
  require(modulus.lipschitz > 0.0, "packing constant needs L > 0");
  const double inner = std::pow(modulus.lipschitz, 1.0 / modulus.alpha) * 262.0 *
                       std::pow(static_cast<double>(n * m), 1.0 / (2.0 * modulus.alpha));
  return 1.0 + std::max(1.0, std::log2(inner));
}

}  // namespace np::bounds
