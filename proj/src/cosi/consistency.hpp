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
#ifndef COSI_CONSISTENCY_HPP
#define COSI_CONSISTENCY_HPP

// Verification routines. Each returns a CheckReport and is a pure function of
// its inputs and seed.
//
// In finite dimension every domain is the whole space, so statements of the
// form "D(...) = ..." are checked through their quantitative content: norm
// equivalence with constants that stay bounded under grid refinement.

#include "cosi/elliptic.hpp"
#include "cosi/interp.hpp"
#include "cosi/report.hpp"
#include "cosi/semigroup.hpp"
#include "cosi/spaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cosi {

/// max_d ||(T0 - T1) d||_{X0 ∩ X1} / ||d||_{X0 ∩ X1}; inconclusive when the
/// dense set does not span the coordinate space.
CheckReport check_operator_consistency(const Matrix& t0, const Matrix& t1, const InterpolationCouple& couple,
                                       const std::vector<Vector>& dense_set, double tol);

struct EquivalenceOptions {
  std::vector<double> lambdas;
  std::vector<double> times;
  int n_euler = 4096;
  int samples = 4;
  LaplaceOptions laplace;
};

/// Both directions: Laplace transforms of each semigroup reproduce both
/// resolvents, and Euler iterates built from each resolvent reproduce both
/// semigroups, within the respective error models plus tol.
CheckReport resolvent_semigroup_equivalence(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                            const EquivalenceOptions& options, double tol, std::uint64_t seed);

/// (A + I)^{-1} applied to each basis vector; A0 and A1 must coincide.
std::vector<Vector> domain_intersection_image(const Matrix& a0, const Matrix& a1, const std::vector<Vector>& basis);

/// Core check: images of the basis reproduce it under A + I, span the space,
/// the two generators agree on them, and the generator residual decays like h.
CheckReport generator_domain_core_check(const GeneratorRealization& r0, const GeneratorRealization& r1, double tol,
                                        std::uint64_t seed);

CheckReport adjoint_consistency_check(const Matrix& t0, const Matrix& t1, const InterpolationCouple& source,
                                      const InterpolationCouple& target, const Vector& pairing,
                                      const std::vector<Vector>& dense_set, const std::vector<Vector>& functionals,
                                      double tol);

struct InterpolatedSemigroupOptions {
  std::vector<double> times;       ///< grid for the law and the boundedness assertion
  std::vector<double> continuity;  ///< times for the continuity modulus; empty selects 2^-1..2^-10
  int samples = 4;
  int ascent_starts = 6;
  int ascent_refine = 16;
};

CheckReport interpolated_semigroup_check(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                         const FunctorDescriptor& functor, const InterpolatedSemigroupOptions& options,
                                         double tol, std::uint64_t seed);

struct GeneratorLevel {
  std::string label;
  Matrix a;
  SpacePtr x0;
  SpacePtr x1;
  std::vector<Vector> samples;
};

struct GeneratorInterpolationOptions {
  double bracket_factor = 2.0;  ///< allowed spread of rho_max/rho_min across levels
  double rho_low = 1e-2;
  double rho_high = 1e2;
};

/// rho(x) = ||x||_{F(Graph(A,X0), Graph(A,X1))} / (||x||_F + ||A x||_F) per level.
CheckReport generator_interpolation_check(const std::vector<GeneratorLevel>& levels, const FunctorDescriptor& functor,
                                          const GeneratorInterpolationOptions& options);

CheckReport resolvent_interpolation_check(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                          const FunctorDescriptor& functor, int samples, double tol,
                                          std::uint64_t seed);

CheckReport semigroup_law_check(const GeneratorRealization& r, const std::vector<double>& times, int samples,
                                double tol, std::uint64_t seed);

/// Log-log slope of the relative Euler error against n must be -1 within slope_tol.
CheckReport euler_convergence_check(const Matrix& a, double t, const std::vector<int>& ns, int samples,
                                    double slope_tol, std::uint64_t seed);

/// Halving h must halve the generator residual within `ratio_tol` (relative).
CheckReport generator_residual_check(const GeneratorRealization& r, const std::vector<double>& hs, int samples,
                                     double ratio_tol, std::uint64_t seed);

/// sup_t ||exp(-tA)||_X must stay below `bound` + tol.
CheckReport semigroup_bound_check(const GeneratorRealization& r, const std::vector<double>& times, double bound,
                                  double tol, std::uint64_t seed);

/// Pairwise consistency across an L^p-scale family and per-space semigroup bounds.
CheckReport lp_scale_consistency_check(const EllipticOperator& op, const std::vector<double>& ps,
                                       const std::vector<double>& times, double tol, std::uint64_t seed);

struct GaussianCriteria {
  double c_reference = 1.0;
  double c_tolerance = 0.25;       ///< relative
  double exponent_tolerance = 0.1; ///< relative to d/2
};

CheckReport gaussian_bound_check(const EllipticOperator& op, const GaussianFitOptions& options,
                                 const GaussianCriteria& criteria);

/// Piecewise-constant prolongation of `coarse` cell values onto n points.
Vector prolongate(const Vector& coarse, Index n);

}  // namespace cosi

#endif  // COSI_CONSISTENCY_HPP
