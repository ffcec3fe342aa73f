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
#include "cosi/interp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cosi {

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("interpolation parameter theta must lie in (0, 1)");
}

}  // namespace

FunctorDescriptor FunctorDescriptor::real_k(double theta, double q, int J) {
  require_theta(theta);
  if (!(q >= 1.0)) throw DomainError("real interpolation exponent q must satisfy q >= 1");
  if (J < 1) throw DomainError("dyadic range J must be >= 1");
  FunctorDescriptor f;
  f.method = Method::RealK;
  f.theta = theta;
  f.q = q;
  f.J = J;
  return f;
}

FunctorDescriptor FunctorDescriptor::complex_lp(double theta) {
  require_theta(theta);
  FunctorDescriptor f;
  f.method = Method::ComplexWeightedLp;
  f.theta = theta;
  f.q = std::numeric_limits<double>::quiet_NaN();
  f.J = 0;
  return f;
}

bool FunctorDescriptor::property_d() const { return method == Method::ComplexWeightedLp || std::isfinite(q); }

double FunctorDescriptor::embedding_constant() const {
  if (method == Method::ComplexWeightedLp) return 1.0;
  // K(2^j, x) <= min(1, 2^j) max(||x||_0, ||x||_1).
  if (!std::isfinite(q)) return 1.0;
  double s = 0.0;
  for (int j = -J; j <= J; ++j) s += std::pow(std::exp2(-j * theta) * std::min(1.0, std::exp2(j)), q);
  return std::pow(s, 1.0 / q);
}

std::string FunctorDescriptor::describe() const {
  std::ostringstream os;
  if (method == Method::RealK) {
    os << "real_k(theta=" << theta << ",q=" << q << ",J=" << J << ")";
  } else {
    os << "complex_lp(theta=" << theta << ")";
  }
  return os.str();
}

// Variables v = [x0; aux0; aux1]; X0 blocks see x0, X1 blocks see x - x0.
KFunctional::KFunctional(InterpolationCouple couple, convex::Options options)
    : couple_(std::move(couple)), options_(options) {
  n_ = couple_.dim();
  const NormProgram p0 = couple_.x0->program();
  const NormProgram p1 = couple_.x1->program();
  aux_ = p0.aux + p1.aux;
  const Index vars = n_ + aux_;
  std::vector<convex::Block> blocks;
  for (const auto& b : p0.blocks) {
    Matrix m = Matrix::Zero(b.map.rows(), vars);
    m.leftCols(n_) = b.map.leftCols(n_);
    if (p0.aux) m.middleCols(n_, p0.aux) = b.map.rightCols(p0.aux);
    blocks.push_back({std::move(m), b.p});
  }
  first_blocks_ = blocks.size();
  for (const auto& b : p1.blocks) {
    Matrix m = Matrix::Zero(b.map.rows(), vars);
    m.leftCols(n_) = -b.map.leftCols(n_);
    if (p1.aux) m.middleCols(n_ + p0.aux, p1.aux) = b.map.rightCols(p1.aux);
    offset_maps_.push_back(b.map.leftCols(n_));
    blocks.push_back({std::move(m), b.p});
  }
  structure_ = std::make_shared<convex::Structure>(vars, std::move(blocks));
}

KFunctionalResult KFunctional::operator()(double t, const Vector& x, const Vector* warm) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("k_functional: t must be positive and finite");
  require_same_size(x.size(), n_, "k_functional");
  const auto& blocks = structure_->blocks();
  convex::Problem pb;
  pb.structure = structure_;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (k < first_blocks_) {
      pb.offsets.push_back(Vector::Zero(blocks[k].map.rows()));
      pb.scales.push_back(1.0);
    } else {
      pb.offsets.push_back(offset_maps_[k - first_blocks_] * x);
      pb.scales.push_back(t);
    }
  }
  const Index vars = structure_->vars();
  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(vars));
  Vector all_first = Vector::Zero(vars);
  all_first.head(n_) = x;
  starts.push_back(all_first);
  if (warm) {
    require_same_size(warm->size(), n_, "k_functional warm start");
    Vector w = Vector::Zero(vars);
    w.head(n_) = *warm;
    starts.push_back(w);
  }
  const auto res = convex::minimize(pb, starts, options_);
  KFunctionalResult out;
  out.value = res.value;
  out.x0 = res.point.head(n_);
  out.x1 = x - out.x0;
  out.gap = res.gap();
  out.certified = res.certified;
  out.method = res.method;
  return out;
}

KFunctionalResult k_functional(double t, const Vector& x, const InterpolationCouple& couple,
                               const convex::Options& options) {
  return KFunctional(couple, options)(t, x);
}

InterpolatedNorm::InterpolatedNorm(InterpolationCouple couple, FunctorDescriptor functor, convex::Options options)
    : functor_(functor), kf_(couple, options) {
  if (functor_.method == FunctorDescriptor::Method::ComplexWeightedLp)
    closed_form_ = complex_interp_space(couple, functor_.theta);
}

InterpNormResult InterpolatedNorm::evaluate(const Vector& x) const {
  InterpNormResult out;
  if (closed_form_) {
    out.value = out.lower = out.upper = closed_form_->norm(x);
    return out;
  }
  const double theta = functor_.theta;
  const double q = functor_.q;
  double sv = 0.0;
  double sl = 0.0;
  double su = 0.0;
  Vector warm;
  for (int j = -functor_.J; j <= functor_.J; ++j) {
    const double t = std::exp2(j);
    const auto k = kf_(t, x, warm.size() ? &warm : nullptr);
    warm = k.x0;
    out.k_values.push_back(k.value);
    out.certified = out.certified && k.certified;
    const double s = std::exp2(-j * theta);
    const double v = s * k.value;
    const double l = s * std::max(k.value - k.gap, 0.0);
    if (std::isfinite(q)) {
      sv += std::pow(v, q);
      sl += std::pow(l, q);
    } else {
      sv = std::max(sv, v);
      sl = std::max(sl, l);
    }
  }
  su = sv;
  if (std::isfinite(q)) {
    out.value = std::pow(sv, 1.0 / q);
    out.lower = std::pow(sl, 1.0 / q);
    out.upper = std::pow(su, 1.0 / q);
  } else {
    out.value = out.upper = sv;
    out.lower = sl;
  }
  return out;
}

InterpNormResult real_interp_norm(const Vector& x, const InterpolationCouple& couple, double theta, double q, int J,
                                  const convex::Options& options) {
  return InterpolatedNorm(couple, FunctorDescriptor::real_k(theta, q, J), options).evaluate(x);
}

SpacePtr complex_interp_space(const InterpolationCouple& couple, double theta) {
  require_theta(theta);
  const auto& a = *couple.x0;
  const auto& b = *couple.x1;
  if (a.kind() != SpaceKind::WeightedLp || b.kind() != SpaceKind::WeightedLp)
    throw DomainError("complex_interp_space: both endpoints must be weighted L^p spaces");
  const double p0 = a.exponent();
  const double p1 = b.exponent();
  if (!std::isfinite(p0) || !std::isfinite(p1))
    throw DomainError("complex_interp_space: p = inf endpoint rejected, X0 ∩ X1 is not dense in L^inf");
  const double p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
  const Vector w = (a.weights().array().pow((1.0 - theta) * p / p0) * b.weights().array().pow(theta * p / p1)).matrix();
  return NormedSpace::weighted_lp(w, p);
}

CheckReport interpolated_operator_norm_check(const Matrix& T, const InterpolationCouple& source,
                                             const InterpolationCouple& target, const FunctorDescriptor& functor,
                                             int samples, double tol, std::uint64_t seed) {
  require_same_size(T.cols(), source.dim(), "interpolated_operator_norm_check source");
  require_same_size(T.rows(), target.dim(), "interpolated_operator_norm_check target");
  CheckReport rep("interpolated_operator_norm", "operator_norm_bound");
  rep.set_seed(seed);
  rep.note("functor " + functor.describe());
  const auto m0 = operator_norm(T, *source.x0, *target.x0, seed);
  const auto m1 = operator_norm(T, *source.x1, *target.x1, seed + 1);
  rep.record("endpoint0_norm_lower", m0.lower);
  rep.record("endpoint0_norm_upper", m0.upper);
  rep.record("endpoint1_norm_lower", m1.lower);
  rep.record("endpoint1_norm_upper", m1.upper);
  if (!std::isfinite(m0.upper) || !std::isfinite(m1.upper)) {
    rep.inconclusive("endpoint operator norms have no certified upper bound");
    return rep;
  }
  const double bound = std::max(m0.upper, m1.upper);

  if (functor.method == FunctorDescriptor::Method::ComplexWeightedLp) {
    const SpacePtr fs = complex_interp_space(source, functor.theta);
    const SpacePtr ft = complex_interp_space(target, functor.theta);
    const auto mf = operator_norm(T, *fs, *ft, seed + 2);
    rep.record("interpolated_norm_lower", mf.lower);
    rep.record("interpolated_norm_upper", mf.upper);
    rep.expect_le("interpolated_norm_vs_max", mf.lower, bound, tol);
    const double geometric = std::pow(m0.upper, 1.0 - functor.theta) * std::pow(m1.upper, functor.theta);
    rep.record("riesz_thorin_bound", geometric);
    rep.expect_le("interpolated_norm_vs_riesz_thorin", mf.lower, geometric, tol);
    rep.record("functor_constant", bound > 0.0 ? mf.lower / bound : 0.0);
    return rep;
  }

  const InterpolatedNorm fs(source, functor);
  const InterpolatedNorm ft(target, functor);
  bool certified = true;
  AscentOptions opt;
  opt.seed = seed + 2;
  opt.random_starts = samples;
  const auto res = operator_norm_ascent(
      T,
      [&](const Vector& x) {
        const auto r = fs.evaluate(x);
        certified = certified && r.certified;
        return r.upper;
      },
      [&](const Vector& y) {
        const auto r = ft.evaluate(y);
        certified = certified && r.certified;
        return r.lower;
      },
      opt);
  rep.record("interpolated_norm_lower", res.value);
  rep.record("functor_constant", bound > 0.0 ? res.value / bound : 0.0);
  rep.expect_le("interpolated_norm_vs_max", res.value, bound, tol);
  if (!certified) rep.inconclusive("a K-functional evaluation was not certified by its duality gap");
  return rep;
}

}  // namespace cosi
