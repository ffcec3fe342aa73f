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
#include "cosi/semigroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cosi {

namespace {

double norm1(const Matrix& m) { return m.size() ? m.cwiseAbs().colwise().sum().maxCoeff() : 0.0; }

Matrix pade(const Matrix& a, int degree) {
  static const std::array<double, 4> b3{120., 60., 12., 1.};
  static const std::array<double, 6> b5{30240., 15120., 3360., 420., 30., 1.};
  static const std::array<double, 8> b7{17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static const std::array<double, 10> b9{17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                         2162160.,     110880.,      3960.,       90.,        1.};
  static const std::array<double, 14> b13{64764752532480000., 32382376266240000., 7771770303897600.,
                                          1187353796428800.,  129060195264000.,   10559470521600.,
                                          670442572800.,      33522128640.,       1323241920.,
                                          40840800.,          960960.,            16380.,
                                          182.,               1.};
  const Index n = a.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix u, v;
  if (degree == 13) {
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const auto& b = b13;
    const Matrix inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * I;
    u = a * inner_u;
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * I;
  } else {
    const double* b = degree == 3 ? b3.data() : degree == 5 ? b5.data() : degree == 7 ? b7.data() : b9.data();
    Matrix pw = I;
    Matrix su = b[1] * I;
    Matrix sv = b[0] * I;
    for (int k = 2; k <= degree; k += 2) {
      pw = pw * a2;
      sv += b[k] * pw;
      su += b[k + 1] * pw;
    }
    u = a * su;
    v = sv;
  }
  Eigen::PartialPivLU<Matrix> lu(v - u);
  return lu.solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("expm: matrix must be square");
  const Index n = m.rows();
  if (n == 0) return m;
  if (!m.allFinite()) throw NumericalError("expm: non-finite input");
  const double nrm = norm1(m);
  static const std::array<std::pair<int, double>, 4> small{
      {{3, 1.495585217958292e-2}, {5, 2.539398330063230e-1}, {7, 9.504178996162932e-1}, {9, 2.097847961257068e0}}};
  for (const auto& [deg, theta] : small)
    if (nrm <= theta) return pade(m, deg);
  const double theta13 = 5.371920351148152;
  int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
  if (s > 1000) throw NumericalError("expm: norm too large, scaling would overflow");
  Matrix r = pade(m / std::ldexp(1.0, s), 13);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.allFinite()) throw NumericalError("expm: overflow (t*||A|| = " + std::to_string(nrm) + ")");
  return r;
}

Matrix semigroup_matrix(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw DimensionError("semigroup: generator must be square");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("semigroup: t must be finite and >= 0");
  if (t == 0.0) return Matrix::Identity(a.rows(), a.cols());
  return expm(-t * a);
}

Vector expm_apply(const Matrix& a, double t, const Vector& x) {
  require_same_size(x.size(), a.cols(), "expm_apply");
  if (t == 0.0) {
    if (a.rows() != a.cols()) throw DimensionError("expm_apply: generator must be square");
    return x;
  }
  return semigroup_matrix(a, t) * x;
}

Resolvent::Resolvent(const Matrix& a, double lambda) {
  if (a.rows() != a.cols()) throw DimensionError("resolvent: generator must be square");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("resolvent: lambda must be positive and finite");
  shifted_ = a;
  shifted_.diagonal().array() += lambda;
  lu_.compute(shifted_);
  rcond_ = lu_.rcond();
  if (!(rcond_ >= 1e-12)) {
    throw NumericalError("resolvent: A + lambda I is singular or ill-conditioned (condition estimate " +
                         std::to_string(rcond_ > 0.0 ? 1.0 / rcond_ : kInf) + ")");
  }
}

Vector Resolvent::apply(const Vector& x) const {
  require_same_size(x.size(), shifted_.cols(), "resolvent apply");
  Vector y = lu_.solve(x);
  // One step of iterative refinement keeps the residual at rounding level.
  y += lu_.solve(x - shifted_ * y);
  return y;
}

Matrix Resolvent::matrix() const { return lu_.inverse(); }

Vector resolvent_apply(const Matrix& a, double lambda, const Vector& x) { return Resolvent(a, lambda).apply(x); }

Vector euler_apply(const Matrix& a, double t, int n, const Vector& x) {
  if (a.rows() != a.cols()) throw DimensionError("euler_apply: generator must be square");
  require_same_size(x.size(), a.cols(), "euler_apply");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("euler_apply: t must be positive");
  if (n < 1) throw DomainError("euler_apply: n must be >= 1");
  Matrix m = (t / n) * a;
  m.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() >= 1e-12)) throw NumericalError("euler_apply: I + (t/n) A is singular");
  Vector y = x;
  for (int k = 0; k < n; ++k) y = lu.solve(y);
  return y;
}

namespace {

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGlNodes{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                          0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                          0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGlWeights{0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                            0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                            0.11119051722668724, 0.05061426814518813};

// Integrates e^{-lambda t} S_t x over [lo, hi] with `pieces` equal panels.
Vector integrate_range(const Matrix& a, double lambda, const Vector& x, double lo, double hi, int pieces) {
  const double h = (hi - lo) / pieces;
  std::array<Matrix, 8> node_ops;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) node_ops[i] = semigroup_matrix(a, kGlNodes[i] * h);
  const Matrix step = semigroup_matrix(a, h);
  Vector y = expm_apply(a, lo, x);
  Vector acc = Vector::Zero(x.size());
  for (int k = 0; k < pieces; ++k) {
    const double start = lo + k * h;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const double t = start + kGlNodes[i] * h;
      acc += (kGlWeights[i] * h * std::exp(-lambda * t)) * (node_ops[i] * y);
    }
    y = step * y;
  }
  return acc;
}

Vector graded_rule(const Matrix& a, double lambda, const Vector& x, double T, int steps, int levels) {
  // Panels [0, T 2^-levels], then dyadic [T 2^-k-1, T 2^-k], each split evenly.
  const int per = std::max(1, steps / (levels + 1));
  Vector acc = integrate_range(a, lambda, x, 0.0, std::ldexp(T, -levels), per);
  for (int k = levels; k >= 1; --k) acc += integrate_range(a, lambda, x, std::ldexp(T, -k), std::ldexp(T, -k + 1), per);
  return acc;
}

}  // namespace

QuadratureResult laplace_resolvent_quadrature(const Matrix& a, double lambda, const Vector& x,
                                              const LaplaceOptions& options) {
  if (a.rows() != a.cols()) throw DimensionError("laplace_resolvent_quadrature: generator must be square");
  require_same_size(x.size(), a.cols(), "laplace_resolvent_quadrature");
  if (!(lambda > options.decay_margin))
    throw DomainError("laplace_resolvent_quadrature: lambda must exceed the decay margin");
  if (options.steps < 2) throw DomainError("laplace_resolvent_quadrature: need at least 2 steps");
  const double T = options.horizon > 0.0 ? options.horizon : 40.0 / lambda;
  // Resolve the fastest transient e^{-||A|| t} on the first panel.
  const double scale = std::max(norm1(a) * T, 1.0);
  const int levels = std::clamp(static_cast<int>(std::ceil(std::log2(scale))) + 2, 1, 60);
  QuadratureResult out;
  out.value = graded_rule(a, lambda, x, T, options.steps, levels);
  const Vector coarse = graded_rule(a, lambda, x, T, options.steps / 2, levels);
  const double panels = static_cast<double>((levels + 1) * std::max(1, options.steps / (levels + 1)));
  out.quadrature_estimate = (out.value - coarse).norm() +
                            std::numeric_limits<double>::epsilon() * panels * (out.value.norm() + x.norm() / lambda);
  const double gap = lambda - options.decay_margin;
  out.truncation_bound = options.growth_bound * x.norm() * std::exp(-gap * T) / gap;
  out.approximate = out.error_bound() > options.tolerance * std::max(x.norm() / lambda, 1e-300);
  return out;
}

SemigroupBound semigroup_bound(const Matrix& a, const NormedSpace& space, const std::vector<double>& times,
                               std::uint64_t seed) {
  SemigroupBound out;
  for (double t : times) {
    const auto est = operator_norm(semigroup_matrix(a, t), space, space, seed);
    out.times.push_back(t);
    out.lower.push_back(est.lower);
    out.upper.push_back(est.upper);
    out.sup_lower = std::max(out.sup_lower, est.lower);
    out.sup_upper = std::max(out.sup_upper, est.upper);
  }
  return out;
}

double generator_residual(const Matrix& a, const Vector& x, double h, const NormedSpace& space) {
  if (!(h > 0.0)) throw DomainError("generator_residual: h must be positive");
  require_same_size(x.size(), a.cols(), "generator_residual");
  const Vector diff = (x - expm_apply(a, h, x)) / h - a * x;
  return space.norm(diff);
}

}  // namespace cosi
