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
#ifndef COSI_CONVEX_HPP
#define COSI_CONVEX_HPP

// Minimisation of sums of l^p norms of affine maps,
//
//     f(v) = sum_k c_k || M_k v + b_k ||_{p_k},
//
// with a duality-gap certificate. Every weighted norm in the library (weighted
// L^p, discrete Sobolev, graph, intersection, sum) is a special case once the
// measure weights are folded into the rows of M_k.
//
// Dual problem:  max sum_k <y_k, b_k>  s.t.  sum_k M_k^T y_k = 0,  ||y_k||_{p_k'} <= c_k.
// Any dual-feasible y gives a lower bound, so the reported gap is rigorous up to
// floating-point rounding.

#include "cosi/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cosi::convex {

/// Hoelder conjugate exponent; 1 <-> inf.
double dual_exponent(double p);

/// Unweighted l^p norm, p in [1, inf].
double plain_norm(const Vector& r, double p);

/// A subgradient of ||.||_p at r with unit dual norm (zero vector when r = 0).
Vector norm_subgradient(const Vector& r, double p);

/// argmin_x 1/2 ||x - v||^2 + lambda ||x||_p. Closed form for p in {1, 2, inf},
/// scalar root-finding otherwise.
Vector prox_norm(const Vector& v, double p, double lambda);

/// Euclidean projection onto the l^1 ball of the given radius.
Vector project_l1_ball(const Vector& v, double radius);

struct Block {
  Matrix map;
  double p = 2.0;
};

/// The fixed part of a problem family: maps, exponents and the factorised
/// normal matrix sum_k M_k^T M_k. Shared by every (offset, scale) instance.
class Structure {
 public:
  Structure(Index vars, std::vector<Block> blocks);

  Index vars() const { return vars_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  Index rows() const { return rows_; }

  /// Solves (sum_k M_k^T M_k) z = rhs.
  Vector normal_solve(const Vector& rhs) const;

 private:
  Index vars_;
  Index rows_ = 0;
  std::vector<Block> blocks_;
  Eigen::LDLT<Matrix> normal_;
};

struct Problem {
  std::shared_ptr<const Structure> structure;
  std::vector<Vector> offsets;
  std::vector<double> scales;
};

enum class Method { Start, Newton, Splitting };

const char* to_string(Method m);

struct Options {
  int max_iterations = 10000;
  double gap_tol = 1e-9;  ///< relative to max(value, 1e-300)
  int restarts = 10;
  std::uint64_t seed = 0x5eedULL;
  bool allow_newton = true;
};

struct Result {
  Vector point;
  double value = 0.0;
  double lower_bound = 0.0;
  bool certified = false;
  int iterations = 0;
  Method method = Method::Start;

  double gap() const { return value - lower_bound; }
};

double objective(const Problem& problem, const Vector& v);

/// Lower bound from a dual candidate built at v. `hint` (one vector per block)
/// replaces the subgradient guess when supplied.
double lower_bound(const Problem& problem, const Vector& v, const std::vector<Vector>* hint = nullptr);

/// Minimises the problem. `starts` are tried first (and certified if
/// possible); then Newton when every exponent lies in (1, inf), then operator
/// splitting, then seeded random restarts. The best primal point and the best
/// lower bound over all attempts are returned.
Result minimize(const Problem& problem, std::span<const Vector> starts, const Options& options = {});

}  // namespace cosi::convex

#endif  // COSI_CONVEX_HPP
