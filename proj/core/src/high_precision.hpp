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

#include <cstdint>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace np::detail {

using HighFloat = boost::multiprecision::cpp_bin_float_50;

// Inputs arrive as doubles parsed from decimal text (0.1, 1e-3, ...), so a
// value within 1e-12 (relative) of an integer is taken to be that integer
// before the ceiling is applied.
inline HighFloat snap_to_integer(const HighFloat& value) {
  const HighFloat nearest = boost::multiprecision::round(value);
  const HighFloat scale = boost::multiprecision::abs(nearest) > 1 ? boost::multiprecision::abs(nearest) : HighFloat(1);
  if (boost::multiprecision::abs(value - nearest) <= HighFloat("1e-12") * scale) return nearest;
  return value;
}

inline boost::multiprecision::cpp_int ceil_to_int(const HighFloat& value) {
  return boost::multiprecision::ceil(snap_to_integer(value)).convert_to<boost::multiprecision::cpp_int>();
}

inline HighFloat log2(const HighFloat& x) {
  return boost::multiprecision::log(x) / boost::multiprecision::log(HighFloat(2));
}

}  // namespace np::detail
