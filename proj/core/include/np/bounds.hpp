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

#include "np/routing_tree.hpp"

// Closed-form size and capacity estimates for prototype-routed MLP ensembles.
// All logarithms are base 2 unless the name says otherwise. Integer-valued
// quantities are exact (arbitrary precision); real-valued ones are evaluated
// with 50 significant digits and reported both raw and ceiled.
namespace np::bounds {

/// omega(t) = L t^alpha with alpha in (0, 1] and L >= 0.
struct HolderModulus {
  double alpha = 1.0;
  double lipschitz = 1.0;

  void validate() const;
};

/// Inverse of the Hölder modulus: (s / L)^(1 / alpha). Throws for L == 0.
double modulus_inverse(const HolderModulus& modulus, double s);

struct DepthWidth {
  BigInt depth;  // m (19 + 2n + 11 ceil(eps^-r))
  BigInt width;  // 16 max{n, 3} + m
};

DepthWidth pathway_depth_width(std::size_t n, std::size_t m, double eps, double r);

/// Packing radius eps^(-2r/n) / 2 * omega^-1(eps / (131 sqrt(n m))).
double theorem_delta(std::size_t n, std::size_t m, double eps, double r, const HolderModulus& modulus);

struct TreeComplexity {
  BigInt leaves;
  std::uint64_t height = 0;
  BigInt nodes;
};

/// Height from height_bound(), leaves v^height, nodes (v^(height+1) - 1) / (v - 1).
TreeComplexity tree_complexity(double doubling, double delta, double diam, std::uint64_t v);

struct RealBound {
  double raw = 0.0;
  BigInt ceiling;
};

/// Upper bound on the VC dimension of thresholded PReLU MLPs with J hidden
/// layers of width W: ceil(J + (J+1) W^2 log2(4e (J+1) W log2(2e (J+1) W))).
RealBound vc_mlp_dstar_bound(std::size_t depth, std::size_t width);
BigInt vc_mlp_dstar(std::size_t depth, std::size_t width);

/// 8 L log(max{2, L})^2 max{d, 2(n+1)(L-1) log(3L-3)}, with the second
/// argument of the max taken as 0 when L == 1.
RealBound vc_pathways_bound(const BigInt& base_vc, std::size_t n, std::size_t pathways);

/// Growth terms (constants omitted, so these are asymptotic rates only).
struct CurseScaling {
  double relu_params;       // eps^(-n / (2 alpha))
  double resident_params;   // eps^-1
  double forward_params;    // (n / alpha) log2(1/eps) / eps
};

CurseScaling curse_scaling(std::size_t n, double alpha, double eps);

/// The constant 1 + max{1, log(L^(1/alpha) 262 (nm)^(1/(2 alpha)))} attached to the packing condition.
double packing_constant(std::size_t n, std::size_t m, const HolderModulus& modulus);

}  // namespace np::bounds
