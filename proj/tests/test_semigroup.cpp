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

#include "catch_amalgamated.hpp"
#include "cosi/semigroup.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <numbers>
#include <random>

using namespace cosi;
using Catch::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Matrix random_matrix(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Index i = 0; i < n * n; ++i) m.data()[i] = g(rng);
  return m;
}

Matrix tridiag(Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  return a;
}

// Stable, non-normal: positive definite symmetric part plus a skew part.
Matrix random_stable(std::mt19937_64& rng, Index n) {
  const Matrix b = random_matrix(rng, n);
  const Matrix s = random_matrix(rng, n);
  return b * b.transpose() / static_cast<double>(n) + 0.5 * (s - s.transpose()) + 0.1 * Matrix::Identity(n, n);
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("expm agrees with an independent Pade implementation at every scale", "[semigroup][oracle]") {
  std::mt19937_64 rng(1);
  for (double target : {1e-6, 1e-3, 0.01, 0.2, 0.9, 2.0, 5.0, 40.0, 300.0}) {
    for (Index n : {1, 3, 8, 20}) {
      Matrix m = random_matrix(rng, n);
      m *= target / m.cwiseAbs().colwise().sum().maxCoeff();
      if (target > 10.0) m -= target * Matrix::Identity(n, n);
      const Matrix ours = expm(m);
      const Matrix ref = m.exp();
      INFO("||M||_1 = " << target << ", n = " << n);
      CHECK((ours - ref).norm() <= 1e-12 * std::max(1.0, ref.norm()));
    }
  }
}

TEST_CASE("expm_apply examples", "[semigroup]") {
  const Vector x = vec({1, -2, 3});
  for (double t : {0.0, 0.5, 10.0}) CHECK(expm_apply(Matrix::Zero(3, 3), t, x) == x);
  CHECK(expm_apply(Matrix::Identity(1, 1), 1.0, vec({1}))[0] == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(std::exp(-1.0) == Approx(0.3678794).margin(1e-7));

  Matrix r(2, 2);
  r << 0, 1, -1, 0;
  const Vector y = expm_apply(r, std::numbers::pi / 2, vec({1, 0}));
  CHECK(std::abs(y[0]) <= 1e-15);
  CHECK(y[1] == Approx(1.0).epsilon(1e-15));
  // y' = -A y is y1' = -y2, y2' = y1: counter-clockwise rotation by t.
  for (double t : {0.3, 1.7, 5.0}) {
    const Vector z = expm_apply(r, t, vec({1, 0}));
    CHECK(z[0] == Approx(std::cos(t)).margin(1e-14));
    CHECK(z[1] == Approx(std::sin(t)).margin(1e-14));
  }
  CHECK(expm_apply(tridiag(3), 0.0, x) == x);
}

TEST_CASE("expm errors", "[semigroup]") {
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(expm(Matrix::Constant(2, 2, std::nan(""))), NumericalError);
  CHECK_THROWS_AS(expm(Matrix::Identity(2, 2) * 1e6), NumericalError);
  CHECK_THROWS_AS(semigroup_matrix(tridiag(3), -1.0), DomainError);
}

TEST_CASE("resolvent_apply examples", "[semigroup]") {
  const Vector x = vec({2, -4});
  CHECK((resolvent_apply(Matrix::Zero(2, 2), 0.5, x) - x / 0.5).norm() <= 1e-15);
  CHECK((resolvent_apply(Matrix::Identity(2, 2), 1.0, x) - x / 2).norm() <= 1e-15);
  Matrix a(2, 2);
  a << 2, 1, 0, 3;
  const Vector y = resolvent_apply(a, 1.0, vec({1, 1}));
  CHECK(y[0] == Approx(0.25).epsilon(1e-15));
  CHECK(y[1] == Approx(0.25).epsilon(1e-15));
}

TEST_CASE("resolvent residual and errors", "[semigroup]") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = random_stable(rng, 12);
    const Vector x = random_vector(rng, 12);
    const double lambda = 0.25 * (k + 1);
    const Vector y = resolvent_apply(a, lambda, x);
    CHECK(((a + lambda * Matrix::Identity(12, 12)) * y - x).norm() <= 1e-10 * x.norm());
  }
  CHECK_THROWS_AS(resolvent_apply(Matrix::Zero(2, 2), 0.0, vec({1, 1})), DomainError);
  CHECK_THROWS_AS(resolvent_apply(-Matrix::Identity(2, 2), 1.0, vec({1, 1})), NumericalError);
  CHECK_THROWS_AS(resolvent_apply(Matrix::Zero(2, 3), 1.0, vec({1, 1})), DimensionError);
}

TEST_CASE("resolvent identity", "[semigroup][property]") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = random_stable(rng, 10);
    const double l = 0.3 + 0.2 * k, m = 2.0 + 0.1 * k;
    const Matrix rl = Resolvent(a, l).matrix(), rm = Resolvent(a, m).matrix();
    CHECK((rl - rm - (m - l) * rl * rm).norm() <= 1e-9 * rl.norm());
  }
}

TEST_CASE("euler_apply examples", "[semigroup]") {
  const Vector x = vec({1, 2});
  CHECK(euler_apply(Matrix::Zero(2, 2), 1.0, 7, x) == x);
  const Matrix one = Matrix::Identity(1, 1);
  CHECK(euler_apply(one, 1.0, 4, vec({1}))[0] == Approx(0.4096).epsilon(1e-15));
  const double e = euler_apply(one, 1.0, 4096, vec({1}))[0];
  CHECK(std::abs(e - std::exp(-1.0)) <= 1.2e-4);
  CHECK(e - std::exp(-1.0) == Approx(std::exp(-1.0) / (2 * 4096.0)).epsilon(1e-3));
  CHECK_THROWS_AS(euler_apply(one, 1.0, 0, vec({1})), DomainError);
  CHECK_THROWS_AS(euler_apply(-one, 4.0, 4, vec({1})), NumericalError);
}

TEST_CASE("Euler error decreases with order one", "[semigroup][property]") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    const Matrix a = random_stable(rng, 10);
    const Vector x = random_vector(rng, 10);
    const Vector ref = expm_apply(a, 1.0, x);
    std::vector<double> ln, le;
    for (int e = 4; e <= 12; ++e) {
      const int n = 1 << e;
      ln.push_back(std::log(static_cast<double>(n)));
      le.push_back(std::log((euler_apply(a, 1.0, n, x) - ref).norm() / ref.norm()));
    }
    CHECK(std::abs(slope(ln, le) + 1.0) <= 0.15);
  }
}

TEST_CASE("semigroup law", "[semigroup][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Matrix a = random_stable(rng, 6);
    const Vector x = random_vector(rng, 6);
    const double s = u(rng), t = u(rng);
    const Vector lhs = expm_apply(a, s + t, x);
    const Vector rhs = expm_apply(a, s, expm_apply(a, t, x));
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(lhs.norm(), 1e-300));
  }
}

TEST_CASE("laplace_resolvent_quadrature examples", "[semigroup]") {
  LaplaceOptions opts;
  opts.horizon = 60.0;
  const Vector x = vec({1, -1});
  auto q = laplace_resolvent_quadrature(Matrix::Zero(2, 2), 1.0, x, opts);
  CHECK((q.value - x).norm() <= 1e-10);
  q = laplace_resolvent_quadrature(Matrix::Identity(1, 1), 1.0, vec({1}), opts);
  CHECK(q.value[0] == Approx(0.5).epsilon(1e-10));

  std::mt19937_64 rng(6);
  const Matrix a = tridiag(8);
  const Vector y = random_vector(rng, 8);
  LaplaceOptions paper;
  paper.horizon = 40.0;
  paper.steps = 400;
  q = laplace_resolvent_quadrature(a, 1.0, y, paper);
  const Vector direct = resolvent_apply(a, 1.0, y);
  CHECK((q.value - direct).norm() <= 1e-8 * direct.norm());
  CHECK_FALSE(q.approximate);
}

TEST_CASE("Laplace quadrature stays within its own reported bound", "[semigroup][property]") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = k % 2 ? tridiag(10) * (1 + k) : Matrix(random_stable(rng, 10));
    const Vector x = random_vector(rng, 10);
    const double lambda = 0.5 + 0.25 * k;
    LaplaceOptions opts;
    opts.steps = 50 + 20 * k;
    if (k % 2 == 0) {
      opts.growth_bound = expm(-a).norm() * 50.0;
    }
    const auto q = laplace_resolvent_quadrature(a, lambda, x, opts);
    const double err = (q.value - resolvent_apply(a, lambda, x)).norm();
    CHECK(err <= q.error_bound() * (1 + 1e-12) + 1e-15 * x.norm());
  }
}

TEST_CASE("semigroup_bound examples", "[semigroup]") {
  const Vector w = Vector::Ones(6);
  const auto l2 = NormedSpace::weighted_lp(w, 2.0);
  std::vector<double> times;
  for (int k = 0; k <= 80; ++k) times.push_back(0.05 * k);

  auto b = semigroup_bound(tridiag(6), *l2, times);
  CHECK(std::abs(b.sup_lower - 1.0) <= 1e-8);
  CHECK(b.sup_upper <= 1.0 + 1e-8);

  b = semigroup_bound(Matrix::Zero(6, 6), *l2, times);
  CHECK(b.sup_lower == 1.0);

  Matrix a(2, 2);
  a << 1, -8, 0, 1;
  const auto l2small = NormedSpace::weighted_lp(Vector::Ones(2), 2.0);
  b = semigroup_bound(a, *l2small, times);
  double oracle = 0.0;
  for (double t : times) {
    Matrix s(2, 2);
    s << 1, 8 * t, 0, 1;
    s *= std::exp(-t);
    oracle = std::max(oracle, Eigen::JacobiSVD<Matrix>(s).singularValues()[0]);
  }
  CHECK(oracle > 1.0);
  CHECK(b.sup_lower > 1.0);
  CHECK(b.sup_lower == Approx(oracle).epsilon(1e-10));
}

TEST_CASE("generator_residual examples", "[semigroup]") {
  const auto l1 = NormedSpace::weighted_lp(Vector::Ones(3), 1.0);
  for (double h : {1.0, 0.1, 1e-3}) CHECK(generator_residual(Matrix::Zero(3, 3), vec({1, 2, 3}), h, *l1) == 0.0);
  const auto scalar = NormedSpace::weighted_lp(Vector::Ones(1), 2.0);
  for (double h : {0.1, 0.01, 0.001}) {
    const double r = generator_residual(Matrix::Identity(1, 1), vec({1}), h, *scalar);
    CHECK(r == Approx(std::abs((1 - std::exp(-h)) / h - 1)).epsilon(1e-6));
    CHECK(r == Approx(h / 2).epsilon(h));
  }
  CHECK_THROWS_AS(generator_residual(Matrix::Zero(3, 3), vec({1, 2, 3}), 0.0, *l1), DomainError);
}

TEST_CASE("halving h halves the generator residual", "[semigroup][property]") {
  std::mt19937_64 rng(8);
  const auto l2 = NormedSpace::weighted_lp(Vector::Ones(16), 2.0);
  for (int k = 0; k < 5; ++k) {
    const Matrix a = random_matrix(rng, 16);
    const Vector x = random_vector(rng, 16);
    for (int e = 6; e < 10; ++e) {
      const double r0 = generator_residual(a, x, std::ldexp(1.0, -e), *l2);
      const double r1 = generator_residual(a, x, std::ldexp(1.0, -e - 1), *l2);
      CHECK(std::abs(r0 / r1 - 2.0) <= 0.2);
    }
  }
}
