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
#ifndef COSI_INTERP_HPP
#define COSI_INTERP_HPP

// Interpolation functors: the K-functional of a couple, the discrete dyadic
// real method, and the weighted-l^p closed form of the complex method.

#include "cosi/convex.hpp"
#include "cosi/opnorm.hpp"
#include "cosi/report.hpp"
#include "cosi/spaces.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cosi {

struct FunctorDescriptor {
  enum class Method { RealK, ComplexWeightedLp };

  Method method = Method::RealK;
  double theta = 0.5;
  double q = 2.0;  ///< RealK only
  int J = 24;      ///< RealK only: dyadic levels j = -J..J

  static FunctorDescriptor real_k(double theta, double q, int J = 24);
  static FunctorDescriptor complex_lp(double theta);

  /// X0 ∩ X1 is dense in F(X0, X1). Fails only for RealK with q = inf.
  bool property_d() const;

  /// c with ||x||_F <= c (||x||_X0 + ||x||_X1) for every x and every couple.
  double embedding_constant() const;

  std::string describe() const;
};

struct KFunctionalResult {
  double value = 0.0;
  Vector x0;
  Vector x1;
  double gap = 0.0;
  bool certified = true;
  convex::Method method = convex::Method::Start;
};

/// K(t, x) = inf { ||x0||_X0 + t ||x1||_X1 : x0 + x1 = x }. The optimisation
/// structure is built once per couple and reused for every (t, x).
class KFunctional {
 public:
  explicit KFunctional(InterpolationCouple couple, convex::Options options = {});

  const InterpolationCouple& couple() const { return couple_; }

  /// `warm` is an optional starting guess for x0.
  KFunctionalResult operator()(double t, const Vector& x, const Vector* warm = nullptr) const;

 private:
  InterpolationCouple couple_;
  convex::Options options_;
  Index n_ = 0;
  Index aux_ = 0;
  std::size_t first_blocks_ = 0;
  std::vector<Matrix> offset_maps_;  // per X1 block: map applied to x
  std::shared_ptr<const convex::Structure> structure_;
};

KFunctionalResult k_functional(double t, const Vector& x, const InterpolationCouple& couple,
                               const convex::Options& options = {});

struct InterpNormResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool certified = true;
  std::vector<double> k_values;  ///< K(2^j, x), j = -J..J
};

/// Norm of F(X0, X1) for a functor, evaluated on coordinate vectors.
class InterpolatedNorm {
 public:
  InterpolatedNorm(InterpolationCouple couple, FunctorDescriptor functor, convex::Options options = {});

  const FunctorDescriptor& functor() const { return functor_; }
  const InterpolationCouple& couple() const { return kf_.couple(); }

  InterpNormResult evaluate(const Vector& x) const;
  double operator()(const Vector& x) const { return evaluate(x).value; }

 private:
  FunctorDescriptor functor_;
  KFunctional kf_;
  SpacePtr closed_form_;
};

/// ( sum_{j=-J}^{J} [2^{-j theta} K(2^j, x)]^q )^{1/q}, max over j for q = inf.
InterpNormResult real_interp_norm(const Vector& x, const InterpolationCouple& couple, double theta, double q, int J,
                                  const convex::Options& options = {});

/// Weighted L^p with 1/p = (1-theta)/p0 + theta/p1 and
/// w = w0^{(1-theta) p/p0} w1^{theta p/p1}.
SpacePtr complex_interp_space(const InterpolationCouple& couple, double theta);

/// Checks ||T||_{F(X) -> F(Y)} <= M max(||T||_{X0->Y0}, ||T||_{X1->Y1}).
CheckReport interpolated_operator_norm_check(const Matrix& T, const InterpolationCouple& source,
                                             const InterpolationCouple& target, const FunctorDescriptor& functor,
                                             int samples, double tol, std::uint64_t seed = 1);

}  // namespace cosi

#endif  // COSI_INTERP_HPP
