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
#ifndef COSI_SEMIGROUP_HPP
#define COSI_SEMIGROUP_HPP

// Matrix semigroups S_t = exp(-tA). Generators are stored as A; the operator
// generating the semigroup is -A.

#include "cosi/opnorm.hpp"
#include "cosi/spaces.hpp"
#include "cosi/types.hpp"

#include <Eigen/LU>

#include <cstdint>
#include <string>
#include <vector>

namespace cosi {

struct GeneratorRealization {
  Matrix a;
  SpacePtr space;
  double spectral_shift = 0.0;
  std::string label;
};

/// exp(M) by scaling and squaring with diagonal Pade approximants (degree up
/// to 13), scaling chosen from the 1-norm.
Matrix expm(const Matrix& m);

/// exp(-tA). t = 0 gives the identity exactly.
Matrix semigroup_matrix(const Matrix& a, double t);

/// exp(-tA) x.
Vector expm_apply(const Matrix& a, double t, const Vector& x);

/// (A + lambda I)^{-1}, factorised once.
class Resolvent {
 public:
  Resolvent(const Matrix& a, double lambda);
  Vector apply(const Vector& x) const;
  Matrix matrix() const;
  double rcond() const { return rcond_; }

 private:
  Matrix shifted_;
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_ = 0.0;
};

Vector resolvent_apply(const Matrix& a, double lambda, const Vector& x);

/// (I + (t/n) A)^{-n} x with one factorisation.
Vector euler_apply(const Matrix& a, double t, int n, const Vector& x);

struct QuadratureResult {
  Vector value;
  double truncation_bound = 0.0;
  double quadrature_estimate = 0.0;
  double error_bound() const { return truncation_bound + quadrature_estimate; }
  bool approximate = false;
};

struct LaplaceOptions {
  double horizon = 0.0;        ///< T; 0 selects 40 / lambda
  int steps = 400;             ///< panels of the composite rule
  double decay_margin = 0.0;   ///< omega with ||S_t|| <= M e^{omega t}
  double growth_bound = 1.0;   ///< M, in the Euclidean norm
  double tolerance = 1e-8;
};

/// int_0^T e^{-lambda t} exp(-tA) x dt by composite Gauss-Legendre on
/// dyadically graded panels, plus a tail and a quadrature error estimate.
QuadratureResult laplace_resolvent_quadrature(const Matrix& a, double lambda, const Vector& x,
                                              const LaplaceOptions& options = {});

struct SemigroupBound {
  std::vector<double> times;
  std::vector<double> lower;
  std::vector<double> upper;
  double sup_lower = 0.0;
  double sup_upper = 0.0;
};

/// Operator norms of exp(-tA) on `space` over a time grid.
SemigroupBound semigroup_bound(const Matrix& a, const NormedSpace& space, const std::vector<double>& times,
                               std::uint64_t seed = 1);

/// || (x - exp(-hA) x)/h - A x ||_X.
double generator_residual(const Matrix& a, const Vector& x, double h, const NormedSpace& space);

}  // namespace cosi

#endif  // COSI_SEMIGROUP_HPP
