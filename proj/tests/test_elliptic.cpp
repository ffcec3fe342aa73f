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
#include "cosi/elliptic.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

using namespace cosi;
using Catch::Approx;

namespace {

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

EllipticOperator laplacian_1d(int nodes, double h, bool dirichlet) {
  const Grid g(1, nodes, h);
  return assemble_divergence_form(g, CoefficientField::constant(g, Matrix::Identity(1, 1)),
                                  dirichlet ? BoundaryPartition::all(g) : BoundaryPartition::none(g));
}

EllipticOperator plate(int nodes, const Matrix& mu, const std::vector<std::string>& sides) {
  const Grid g(2, nodes, 1.0 / (nodes - 1));
  return assemble_divergence_form(g, CoefficientField::constant(g, mu), BoundaryPartition::sides(g, sides));
}

Matrix anisotropic() {
  Matrix mu(2, 2);
  mu << 2.0, 0.5, 0.5, 1.0;
  return mu;
}

}  // namespace

TEST_CASE("assemble_divergence_form examples", "[elliptic]") {
  const auto op = laplacian_1d(5, 1.0, true);
  Matrix expected(3, 3);
  expected << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  CHECK((op.a - expected).norm() == 0.0);

  Eigen::SelfAdjointEigenSolver<Matrix> es(op.a);
  const double r = std::sqrt(2.0);
  CHECK(es.eigenvalues()[0] == Approx(2 - r).epsilon(1e-14));
  CHECK(es.eigenvalues()[1] == Approx(2.0).epsilon(1e-14));
  CHECK(es.eigenvalues()[2] == Approx(2 + r).epsilon(1e-14));

  const auto neumann = laplacian_1d(7, 0.25, false);
  CHECK(neumann.size() == 7);
  CHECK(neumann.a.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((neumann.a * Vector::Ones(7)).norm() <= 1e-12);
}

TEST_CASE("coefficient fields and boundary partitions", "[elliptic]") {
  const Grid g(2, 4, 1.0 / 3);
  Matrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(CoefficientField::constant(g, bad), DomainError);
  const auto f = CoefficientField::constant(g, anisotropic());
  CHECK(f.symmetric());
  Eigen::SelfAdjointEigenSolver<Matrix> es(anisotropic());
  CHECK(f.ellipticity == Approx(es.eigenvalues()[0]).epsilon(1e-12));
  CHECK(f.bound == Approx(es.eigenvalues()[1]).epsilon(1e-12));
  CHECK_THROWS_AS(BoundaryPartition::sides(g, {"front"}), DomainError);
  CHECK_THROWS_AS(BoundaryPartition::sides(Grid(1, 4, 0.5), {"top"}), DomainError);
  CHECK(BoundaryPartition::sides(g, {"left"}).count() == 4);
  CHECK(BoundaryPartition::sides(g, {"left", "bottom"}).count() == 7);
  CHECK(BoundaryPartition::all(g).count() == 12);
  CHECK(BoundaryPartition::none(g).count() == 0);
  CHECK(g.box_volume() == Approx(16.0 / 9.0));
  CHECK(g.cell_volume() == Approx(1.0 / 9.0));
  CHECK_THROWS_AS(Grid(3, 4, 0.1), DomainError);
  CHECK_THROWS_AS(Grid(1, 4, 0.0), DomainError);
}

TEST_CASE("symmetry, spectrum and the discrete form identity", "[elliptic][property]") {
  const std::vector<EllipticOperator> ops = {
      laplacian_1d(12, 1.0 / 11, true), laplacian_1d(12, 1.0 / 11, false),
      plate(5, Matrix::Identity(2, 2), {"left"}), plate(5, anisotropic(), {"left", "bottom"}),
      plate(5, anisotropic(), {})};
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& op = ops[k];
    const Index n = op.size();
    INFO("operator " << k);
    CHECK((op.a - op.a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * op.a.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (op.a + op.a.transpose()));
    const double lo = es.eigenvalues().minCoeff();
    const bool has_dirichlet = n < op.grid.node_count();
    if (has_dirichlet) {
      CHECK(lo > 0.0);
    } else {
      CHECK(lo >= -1e-10 * es.eigenvalues().maxCoeff());
    }
    // <A e_i, e_j>_M against the form.
    const Matrix mass = op.weights.asDiagonal();
    const Matrix lhs = (mass * op.a).transpose();
    double worst = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(lhs(i, j) - op.form_value(Vector::Unit(n, i), Vector::Unit(n, j))));
    CHECK(worst <= 1e-12 * op.form.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("isotropic form equals the sum over edges of difference quotients", "[elliptic][oracle]") {
  for (const auto& op : {laplacian_1d(9, 0.125, true), plate(5, Matrix::Identity(2, 2), {"left"})}) {
    const Matrix oracle = op.gradient.transpose() * op.edge_weights.asDiagonal() * op.gradient;
    CHECK((oracle - op.form).cwiseAbs().maxCoeff() <= 1e-12 * op.form.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("mass conservation under pure Neumann", "[elliptic][property]") {
  std::mt19937_64 rng(1);
  for (const auto& op : {laplacian_1d(10, 0.1, false), plate(5, anisotropic(), {})}) {
    const Vector x = random_vector(rng, op.size());
    const double m0 = op.weights.dot(x);
    for (double t : {0.001, 0.01, 0.1, 1.0, 10.0}) CHECK(std::abs(op.weights.dot(expm_apply(op.a, t, x)) - m0) <= 1e-9 * std::max(1.0, std::abs(m0)));
  }
}

TEST_CASE("l2 contractivity for symmetric elliptic operators", "[elliptic][property]") {
  for (const auto& op : {laplacian_1d(16, 1.0 / 15, true), laplacian_1d(16, 1.0 / 15, false),
                         plate(5, anisotropic(), {"bottom"})}) {
    for (double t : {1e-4, 1e-2, 0.1, 1.0}) {
      Eigen::JacobiSVD<Matrix> svd(semigroup_matrix(op.a, t));
      CHECK(svd.singularValues()[0] <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("discrete Sobolev norms", "[elliptic]") {
  const auto neumann = laplacian_1d(6, 0.2, false);
  const Vector c = Vector::Constant(6, 1.7);
  for (double p : {1.5, 2.0, 4.0}) {
    const auto s = discrete_sobolev_space(neumann, p);
    CHECK(s.w1p->norm(c) == Approx(lp_norm(c, p, neumann.weights)).epsilon(1e-14));
  }

  const auto op = laplacian_1d(5, 1.0, true);
  const Vector hat = Vector::Unit(3, 1);
  const Vector diffs = op.gradient * hat;
  int nonzero = 0;
  for (Index e = 0; e < diffs.size(); ++e)
    if (diffs[e] != 0.0) {
      ++nonzero;
      CHECK(std::abs(diffs[e]) == 1.0);
    }
  CHECK(nonzero == 2);
  CHECK(discrete_sobolev_space(op, 2.0).w1p->norm(hat) == Approx(std::sqrt(3.0)).epsilon(1e-14));

  CHECK_THROWS_AS(discrete_sobolev_space(op, 1.0), DomainError);
  CHECK_THROWS_AS(discrete_sobolev_space(op, kInf), DomainError);
}

TEST_CASE("W^{-1,2} dual norm of a point mass matches the Riesz solve", "[elliptic][oracle]") {
  for (const auto& op : {laplacian_1d(10, 1.0 / 9, true), plate(4, anisotropic(), {"left"})}) {
    const auto s = discrete_sobolev_space(op, 2.0);
    const Matrix b = Matrix(op.weights.asDiagonal()) + op.gradient.transpose() * op.edge_weights.asDiagonal() * op.gradient;
    const Eigen::LLT<Matrix> llt(b);
    for (Index k = 0; k < op.size(); k += 2) {
      const Vector f = Vector::Unit(op.size(), k);
      const Vector wf = op.weights.cwiseProduct(f);
      const double riesz = std::sqrt(wf.dot(llt.solve(wf)));
      CHECK(s.dual->kind() == SpaceKind::Dual);
      const auto d = dual_norm(f, *s.w1p, op.weights);
      CHECK(d.value == Approx(riesz).epsilon(1e-6));
    }
  }
}

TEST_CASE("lp_scale_family", "[elliptic]") {
  const auto op = laplacian_1d(10, 1.0 / 9, true);
  auto fam = lp_scale_family(op, {2.0});
  REQUIRE(fam.size() == 2);
  CHECK(fam[0].label == "L^2");
  CHECK(fam[1].label == "W^{-1,2}_D");
  const auto b = semigroup_bound(fam[0].a, *fam[0].space, {0.01, 0.1, 1.0});
  CHECK(b.sup_lower <= 1.0 + 1e-10);

  fam = lp_scale_family(op, {1.5, 2.0, 3.0, 6.0});
  REQUIRE(fam.size() == 5);
  CHECK(fam[0].label == "L^1.5");
  for (const auto& r : fam) CHECK((r.a - op.a).norm() == 0.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(fam[k].space->exponent() == std::vector<double>{1.5, 2, 3, 6}[k]);
  const auto w = semigroup_bound(fam[4].a, *fam[4].space, {0.01, 0.1});
  CHECK(std::isfinite(w.sup_lower));
  CHECK(w.sup_lower > 0.0);
}

TEST_CASE("Gaussian fit: equilibrium kernel under pure Neumann", "[elliptic]") {
  const auto op = laplacian_1d(21, 0.05, false);
  const Matrix k = semigroup_matrix(op.a, 20.0) / op.grid.cell_volume();
  CHECK((k.array() - 1.0 / op.grid.box_volume()).abs().maxCoeff() <= 1e-8);
  GaussianFitOptions opts;
  opts.times = {5.0, 10.0, 20.0};
  const auto fit = gaussian_bound_fit(op, opts);
  CHECK(std::isfinite(fit.C));
  CHECK(fit.negative == 0);
  for (double t : opts.times) CHECK(fit.C * std::pow(t, -0.5) >= 1.0 / op.grid.box_volume() * (1 - 1e-9));
}

TEST_CASE("Gaussian fit: boundary-free regime reproduces the heat kernel", "[elliptic][oracle]") {
  const int nodes = 258;
  const auto op = laplacian_1d(nodes, 1.0 / (nodes - 1), true);
  GaussianFitOptions opts;
  for (int k = 0; k < 10; ++k) opts.times.push_back(0.001 * std::pow(100.0, k / 9.0));
  for (int k = 0; k <= 50; ++k) opts.c_grid.push_back(0.5 + 0.05 * k);
  const auto fit = gaussian_bound_fit(op, opts);
  CHECK(std::abs(fit.c - 1.0) <= 0.25);
  CHECK(std::abs(fit.diagonal_exponent - 0.5) <= 0.05);
  CHECK(fit.negative == 0);
  // Free kernel constant (4 pi)^{-1/2}.
  CHECK(fit.C == Approx(1.0 / std::sqrt(4 * std::numbers::pi)).epsilon(0.1));
}
