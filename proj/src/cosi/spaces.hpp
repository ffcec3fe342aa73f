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
#ifndef COSI_SPACES_HPP
#define COSI_SPACES_HPP

// Finite-dimensional normed spaces over a discrete measure, and the norms
// built from them: weighted L^p, discrete W^{1,p}, duals, sums,
// intersections and graph norms.

#include "cosi/convex.hpp"
#include "cosi/report.hpp"
#include "cosi/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cosi {

class DiscreteMeasureSpace {
 public:
  explicit DiscreteMeasureSpace(Vector weights);
  static DiscreteMeasureSpace uniform(Index n, double mass = 1.0);

  Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double total() const { return weights_.sum(); }

 private:
  Vector weights_;
};

/// (sum_i w_i |v_i|^p)^(1/p), or max |v_i| for p = inf.
double lp_norm(const Vector& v, double p, const Vector& w);

class NormedSpace;
using SpacePtr = std::shared_ptr<const NormedSpace>;

enum class SpaceKind { WeightedLp, Sobolev, Dual, Sum, Intersection, Graph };

const char* to_string(SpaceKind k);

/// A norm written as N(x) = min_aux sum_k ||M_k [x; aux]||_{p_k}. Every kind
/// except duals has such a representation.
struct NormProgram {
  Index dim = 0;
  Index aux = 0;
  std::vector<convex::Block> blocks;
};

/// Value of a norm that may need an inner optimisation. `lower` and `upper`
/// bracket the exact value; `value` is the estimate reported to callers.
struct NormEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool certified = true;
};

class NormedSpace : public std::enable_shared_from_this<NormedSpace> {
 public:
  static SpacePtr weighted_lp(Vector weights, double p);
  static SpacePtr weighted_lp(const DiscreteMeasureSpace& base, double p) { return weighted_lp(base.weights(), p); }
  /// ( sum_i w_i |u_i|^p + sum_e w_e |(G u)_e|^p )^(1/p); G holds the
  /// difference quotients, one row per edge.
  static SpacePtr sobolev(Vector weights, Matrix gradient, Vector edge_weights, double p);
  /// Dual of `space` under <f, x> = sum_i pairing_i f_i x_i.
  static SpacePtr dual_of(SpacePtr space, Vector pairing);
  static SpacePtr sum(SpacePtr x0, SpacePtr x1);
  static SpacePtr intersection(SpacePtr x0, SpacePtr x1);
  /// ||x||_X + ||A x||_X.
  static SpacePtr graph(Matrix a, SpacePtr space);

  SpaceKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  /// Exponent of WeightedLp / Sobolev kinds, NaN otherwise.
  double exponent() const { return p_; }
  const Vector& weights() const { return weights_; }
  const Vector& pairing() const { return weights_; }
  const Matrix& matrix() const { return matrix_; }
  const Vector& edge_weights() const { return edge_weights_; }
  const SpacePtr& first() const { return a_; }
  const SpacePtr& second() const { return b_; }

  /// False when X0 ∩ X1 cannot be dense in interpolation spaces built from
  /// this space (an L^inf endpoint somewhere inside).
  bool dense_endpoint() const;
  bool has_program() const;
  NormProgram program() const;

  double norm(const Vector& x) const { return norm_estimate(x).value; }
  NormEstimate norm_estimate(const Vector& x) const;

  std::string describe() const;

 private:
  NormedSpace() = default;

  SpaceKind kind_ = SpaceKind::WeightedLp;
  Index dim_ = 0;
  double p_ = 2.0;
  Vector weights_;
  Vector edge_weights_;
  Matrix matrix_;
  SpacePtr a_;
  SpacePtr b_;
};

struct InterpolationCouple {
  InterpolationCouple(SpacePtr x0, SpacePtr x1);
  SpacePtr x0;
  SpacePtr x1;
  Index dim() const { return x0->dim(); }
};

struct DualNormOptions {
  bool force_optimization = false;
  convex::Options solver;
};

struct DualNormResult {
  double value = 0.0;  ///< attained by an explicit vector, so a lower bound
  double upper = 0.0;
  bool certified = true;
  std::string method;
};

/// sup { |<f, x>| : ||x||_X <= 1 } with <f, x> = sum_i pairing_i f_i x_i.
DualNormResult dual_norm(const Vector& f, const NormedSpace& space, const Vector& pairing,
                         const DualNormOptions& options = {});

NormEstimate sum_norm(const Vector& x, const InterpolationCouple& couple);
double intersection_norm(const Vector& x, const InterpolationCouple& couple);
double graph_norm(const Vector& x, const Matrix& a, const NormedSpace& space);

/// Compares the dual norm of the sum space with the larger of the endpoint
/// dual norms for every sample functional.
CheckReport dual_sum_identity_check(const InterpolationCouple& couple, const Vector& pairing,
                                    const std::vector<Vector>& samples, double tol,
                                    const DualNormOptions& options = {});

}  // namespace cosi

#endif  // COSI_SPACES_HPP
