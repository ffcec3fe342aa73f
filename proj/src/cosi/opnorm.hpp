/*
 * Copyright 2026 The cosi Authors
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
#ifndef COSI_OPNORM_HPP
#define COSI_OPNORM_HPP

// Operator norm estimates. Weighted L^p -> L^p norms are exact for
// p in {1, 2, inf}; other exponents get a power-method lower bound and a
// Riesz-Thorin upper bound. Arbitrary norms get a multi-start ratio ascent,
// which only ever yields lower bounds.

#include "cosi/spaces.hpp"
#include "cosi/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cosi {

using NormFn = std::function<double(const Vector&)>;

struct OperatorNormEstimate {
  double lower = 0.0;
  double upper = kInf;
  std::string method;

  bool exact() const { return upper - lower <= 1e-12 * std::max(upper, 1e-300); }
};

/// ||T||_{L^p(src_w) -> L^p(dst_w)}.
OperatorNormEstimate lp_operator_norm(const Matrix& T, double p, const Vector& src_w, const Vector& dst_w,
                                      std::uint64_t seed = 1, int restarts = 32);

struct AscentOptions {
  int random_starts = 12;
  int refine_evaluations = 40;
  std::uint64_t seed = 1;
  std::vector<Vector> extra_starts;
};

struct AscentResult {
  double value = 0.0;
  Vector argmax;
  int evaluations = 0;
};

/// max_x dst(T x) / src(x) over random starts, `extra_starts` and the
/// coordinate vectors, then a shrinking random local search from the best.
AscentResult operator_norm_ascent(const Matrix& T, const NormFn& src, const NormFn& dst, const AscentOptions& options);

/// Dispatches to the weighted L^p formulas when both spaces are L^p with the
/// same exponent, otherwise to the ascent (lower bound only).
OperatorNormEstimate operator_norm(const Matrix& T, const NormedSpace& src, const NormedSpace& dst,
                                   std::uint64_t seed = 1);

}  // namespace cosi

#endif  // COSI_OPNORM_HPP
