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
#include "cosi/opnorm.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace cosi {

namespace {

Vector duality_map(const Vector& v, double p) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = (v[i] > 0 ? 1.0 : (v[i] < 0 ? -1.0 : 0.0)) * std::pow(std::abs(v[i]), p - 1.0);
  return out;
}

double power_method(const Matrix& B, double p, Vector x) {
  const double q = convex::dual_exponent(p);
  double nx = convex::plain_norm(x, p);
  if (nx == 0.0) return 0.0;
  x /= nx;
  double best = convex::plain_norm(B * x, p);
  for (int it = 0; it < 200; ++it) {
    const Vector y = B * x;
    const double ny = convex::plain_norm(y, p);
    if (ny == 0.0) break;
    const Vector z = B.transpose() * duality_map(y / ny, p);
    if (z.cwiseAbs().maxCoeff() == 0.0) break;
    Vector xn = duality_map(z / z.cwiseAbs().maxCoeff(), q);
    nx = convex::plain_norm(xn, p);
    if (nx == 0.0) break;
    xn /= nx;
    const double val = convex::plain_norm(B * xn, p);
    x = xn;
    if (val <= best * (1.0 + 1e-15)) {
      best = std::max(best, val);
      break;
    }
    best = val;
  }
  return best;
}

}  // namespace

OperatorNormEstimate lp_operator_norm(const Matrix& T, double p, const Vector& src_w, const Vector& dst_w,
                                      std::uint64_t seed, int restarts) {
  require_same_size(T.cols(), src_w.size(), "lp_operator_norm source");
  require_same_size(T.rows(), dst_w.size(), "lp_operator_norm target");
  if (!(p >= 1.0)) throw DomainError("lp_operator_norm: exponent p must satisfy p >= 1");
  OperatorNormEstimate est;
  // Reduce to unweighted l^p: B = W'^{1/p} T W^{-1/p}.
  Matrix B = T;
  if (std::isfinite(p)) {
    B = dst_w.array().pow(1.0 / p).matrix().asDiagonal() * T * src_w.array().pow(-1.0 / p).matrix().asDiagonal();
  }
  if (B.size() == 0) {
    est.lower = est.upper = 0.0;
    est.method = "empty";
    return est;
  }
  const double n1 = B.cwiseAbs().colwise().sum().maxCoeff();
  const double ninf = B.cwiseAbs().rowwise().sum().maxCoeff();
  if (p == 1.0) {
    est.lower = est.upper = n1;
    est.method = "column_sum";
    return est;
  }
  if (!std::isfinite(p)) {
    est.lower = est.upper = ninf;
    est.method = "row_sum";
    return est;
  }
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinV);
  const double n2 = svd.singularValues()(0);
  if (p == 2.0) {
    est.lower = est.upper = n2;
    est.method = "singular_value";
    return est;
  }
  // Riesz-Thorin between the exactly computable exponents.
  double upper = std::pow(n1, 1.0 / p) * std::pow(ninf, 1.0 - 1.0 / p);
  if (p < 2.0) {
    const double theta = 2.0 * (1.0 - 1.0 / p);
    upper = std::min(upper, std::pow(n1, 1.0 - theta) * std::pow(n2, theta));
  } else {
    const double theta = 1.0 - 2.0 / p;
    upper = std::min(upper, std::pow(n2, 1.0 - theta) * std::pow(ninf, theta));
  }
  double lower = power_method(B, p, svd.matrixV().col(0));
  for (Index j = 0; j < B.cols(); ++j) lower = std::max(lower, power_method(B, p, Vector::Unit(B.cols(), j)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < restarts; ++r) {
    Vector x(B.cols());
    for (Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    lower = std::max(lower, power_method(B, p, x));
  }
  est.lower = std::min(lower, upper);
  est.upper = upper;
  est.method = "power_method+riesz_thorin";
  return est;
}

AscentResult operator_norm_ascent(const Matrix& T, const NormFn& src, const NormFn& dst, const AscentOptions& options) {
  const Index n = T.cols();
  AscentResult out;
  out.argmax = Vector::Zero(n);
  auto ratio = [&](const Vector& x) {
    ++out.evaluations;
    const double d = src(x);
    if (!(d > 0.0)) return 0.0;
    return dst(T * x) / d;
  };
  auto offer = [&](const Vector& x) {
    const double r = ratio(x);
    if (r > out.value) {
      out.value = r;
      out.argmax = x;
    }
  };
  for (const auto& x : options.extra_starts) {
    require_same_size(x.size(), n, "operator_norm_ascent start");
    offer(x);
  }
  for (Index j = 0; j < n; ++j) offer(Vector::Unit(n, j));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  auto random_vector = [&]() {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = gauss(rng);
    return x;
  };
  for (int r = 0; r < options.random_starts; ++r) offer(random_vector());
  if (out.value == 0.0) return out;
  double step = 0.3;
  for (int k = 0; k < options.refine_evaluations; ++k) {
    const Vector base = out.argmax;
    const Vector cand = base + step * base.norm() * random_vector() / std::sqrt(static_cast<double>(n));
    const double before = out.value;
    offer(cand);
    step = out.value > before ? std::min(step * 1.5, 1.0) : step * 0.85;
  }
  return out;
}

OperatorNormEstimate operator_norm(const Matrix& T, const NormedSpace& src, const NormedSpace& dst, std::uint64_t seed) {
  require_same_size(T.cols(), src.dim(), "operator_norm source");
  require_same_size(T.rows(), dst.dim(), "operator_norm target");
  if (src.kind() == SpaceKind::WeightedLp && dst.kind() == SpaceKind::WeightedLp &&
      src.exponent() == dst.exponent()) {
    return lp_operator_norm(T, src.exponent(), src.weights(), dst.weights(), seed);
  }
  AscentOptions opt;
  opt.seed = seed;
  const auto res = operator_norm_ascent(
      T, [&](const Vector& x) { return src.norm(x); }, [&](const Vector& y) { return dst.norm(y); }, opt);
  OperatorNormEstimate est;
  est.lower = res.value;
  est.method = "ratio_ascent";
  return est;
}

}  // namespace cosi
