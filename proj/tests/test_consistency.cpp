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
#include "cosi/consistency.hpp"

#include <cmath>
#include <cstring>
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

Matrix tridiag(Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  return a;
}

std::vector<Vector> basis(Index n) {
  std::vector<Vector> out;
  for (Index i = 0; i < n; ++i) out.push_back(Vector::Unit(n, i));
  return out;
}

SpacePtr lp(Index n, double p) { return NormedSpace::weighted_lp(Vector::Ones(n), p); }

GeneratorRealization realization(const Matrix& a, SpacePtr space, std::string label = {}) {
  return {a, std::move(space), 0.0, std::move(label)};
}

Matrix unit_perturbation(Index n, Index i, Index j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("check_operator_consistency examples", "[consistency]") {
  const Index n = 6;
  const InterpolationCouple c(lp(n, 1.0), lp(n, 4.0));
  const Matrix t0 = tridiag(n);
  auto rep = check_operator_consistency(t0, t0, c, basis(n), 0.0);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("deviation") == 0.0);

  const Matrix t1 = t0 + 1e-3 * unit_perturbation(n, 2, 3);
  rep = check_operator_consistency(t0, t1, c, basis(n), 1e-6);
  CHECK(rep.verdict() == Verdict::Fail);
  CHECK(rep.value("deviation") == Approx(1e-3).epsilon(1.0));
  CHECK(rep.value("deviation") >= 1e-3 / 2);

  const Grid g(1, 10, 1.0 / 9);
  const auto op = assemble_divergence_form(g, CoefficientField::constant(g, Matrix::Identity(1, 1)), BoundaryPartition::all(g));
  const auto fam = lp_scale_family(op, {2.0});
  rep = check_operator_consistency(fam[0].a, fam[1].a, InterpolationCouple(fam[0].space, discrete_sobolev_space(op, 2.0).w1p),
                                   basis(op.size()), 1e-15);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("deviation") == 0.0);
}

TEST_CASE("check_operator_consistency: symmetry, re-spanning, rank", "[consistency][property]") {
  std::mt19937_64 rng(1);
  const Index n = 5;
  const InterpolationCouple c(lp(n, 1.5), lp(n, 3.0));
  const Matrix t0 = tridiag(n);
  const Matrix t1 = t0 + 1e-4 * unit_perturbation(n, 0, 4);
  std::vector<Vector> spanning;
  for (int k = 0; k < 8; ++k) spanning.push_back(random_vector(rng, n));
  const auto a = check_operator_consistency(t0, t1, c, spanning, 1e-6);
  const auto b = check_operator_consistency(t1, t0, c, spanning, 1e-6);
  CHECK(a.verdict() == b.verdict());
  CHECK(a.value("deviation") == Approx(b.value("deviation")).epsilon(1e-12));
  CHECK(check_operator_consistency(t0, t1, c, basis(n), 1e-6).verdict() == a.verdict());
  CHECK(check_operator_consistency(t0, t0, c, spanning, 1e-12).verdict() == Verdict::Pass);

  std::vector<Vector> deficient(spanning.begin(), spanning.begin() + 3);
  CHECK(check_operator_consistency(t0, t0, c, deficient, 1e-12).verdict() == Verdict::Inconclusive);
  CHECK_THROWS(check_operator_consistency(t0, t0, c, {}, 1e-12));
}

TEST_CASE("resolvent_semigroup_equivalence", "[consistency]") {
  const Index n = 12;
  const Matrix a = tridiag(n);
  EquivalenceOptions opts;
  opts.lambdas = {0.5, 1, 2, 4};
  opts.times = {0.25, 1, 4};
  opts.samples = 2;
  auto rep = resolvent_semigroup_equivalence(realization(a, lp(n, 1.0)), realization(a, lp(n, 4.0)), opts, 1e-6, 7);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("resolvent_relative_deviation") == 0.0);
  CHECK(rep.value("semigroup_relative_deviation") == 0.0);

  const Matrix z = Matrix::Zero(3, 3);
  rep = resolvent_semigroup_equivalence(realization(z, lp(3, 2.0)), realization(z, lp(3, 2.0)), opts, 1e-6, 7);
  CHECK(rep.verdict() == Verdict::Pass);

  const Matrix a1 = a + 1e-2 * unit_perturbation(n, 5, 6);
  rep = resolvent_semigroup_equivalence(realization(a, lp(n, 1.0)), realization(a1, lp(n, 4.0)), opts, 1e-6, 7);
  CHECK(rep.verdict() == Verdict::Fail);
  CHECK(rep.value("direction_laplace_excess") > 1e-6);
  CHECK(rep.value("direction_euler_excess") > 1e-6);
  const double scale = rep.value("resolvent_deviation_generator_scale");
  CHECK(scale >= 1e-2 / 3);
  CHECK(scale <= 1e-2 * 3);
}

TEST_CASE("equivalence passes whenever the generators coincide", "[consistency][property]") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int k = 0; k < 3; ++k) {
    const Index n = 6 + 2 * k;
    Matrix b(n, n);
    for (Index i = 0; i < n * n; ++i) b.data()[i] = g(rng);
    const Matrix a = b * b.transpose() / static_cast<double>(n) + 0.1 * Matrix::Identity(n, n);
    EquivalenceOptions opts;
    opts.lambdas = {0.5 + k, 3.0};
    opts.times = {0.1, 2.0};
    opts.samples = 2;
    const auto rep = resolvent_semigroup_equivalence(realization(a, lp(n, 2.0)), realization(a, lp(n, 1.0 + k)), opts,
                                                     1e-6, 100 + k);
    CHECK(rep.verdict() == Verdict::Pass);
  }
}

TEST_CASE("domain_intersection_image examples", "[consistency]") {
  auto img = domain_intersection_image(Matrix::Zero(2, 2), Matrix::Zero(2, 2), basis(2));
  CHECK((img[0] - Vector::Unit(2, 0)).norm() == 0.0);
  CHECK((img[1] - Vector::Unit(2, 1)).norm() == 0.0);
  img = domain_intersection_image(Matrix::Identity(2, 2), Matrix::Identity(2, 2), basis(2));
  CHECK((img[1] - Vector::Unit(2, 1) / 2).norm() <= 1e-16);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 3;
  img = domain_intersection_image(d, d, basis(2));
  CHECK((img[0] - Vector::Unit(2, 0) / 2).norm() <= 1e-16);
  CHECK((img[1] - Vector::Unit(2, 1) / 4).norm() <= 1e-16);
  CHECK_THROWS_AS(domain_intersection_image(d, Matrix::Identity(2, 2), basis(2)), DomainError);
}

TEST_CASE("generator_domain_core_check", "[consistency]") {
  const Index n = 10;
  const Matrix a = tridiag(n);
  auto rep = generator_domain_core_check(realization(a, lp(n, 1.0)), realization(a, lp(n, 3.0)), 1e-9, 3);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("image_rank") == n);
  rep = generator_domain_core_check(realization(a, lp(n, 1.0)), realization(a + 1e-3 * unit_perturbation(n, 1, 2), lp(n, 3.0)),
                                    1e-9, 3);
  CHECK(rep.verdict() == Verdict::Fail);
  CHECK(rep.value("generator_max_entry_difference") == Approx(1e-3));
}

TEST_CASE("adjoint_consistency_check examples", "[consistency]") {
  std::mt19937_64 rng(3);
  const Index n = 4;
  const Vector w = Vector::Ones(n);
  const InterpolationCouple c(lp(n, 1.0), lp(n, 3.0));
  std::vector<Vector> fs;
  for (int k = 0; k < 4; ++k) fs.push_back(random_vector(rng, n));
  auto rep = adjoint_consistency_check(Matrix::Identity(n, n), Matrix::Identity(n, n), c, c, w, basis(n), fs, 1e-12);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("adjoint_action_deviation") == 0.0);

  const InterpolationCouple l2(lp(n, 2.0), lp(n, 2.0));
  const Matrix s = tridiag(n);
  rep = adjoint_consistency_check(s, s, l2, l2, w, basis(n), fs, 1e-12);
  CHECK(rep.verdict() == Verdict::Pass);
  for (const auto& f : fs) CHECK((s.transpose() * f - s * f).norm() <= 1e-14 * (s * f).norm());

  Matrix t(n, n);
  for (Index i = 0; i < n * n; ++i) t.data()[i] = std::normal_distribution<double>()(rng);
  rep = adjoint_consistency_check(t, t, c, c, w, basis(n), fs, 1e-12);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("pairing_deviation") <= 1e-12);
  CHECK(rep.value("adjoint_sum_dual_ratio") > 0.0);

  rep = adjoint_consistency_check(t, t + 1e-3 * unit_perturbation(n, 0, 0), c, c, w, basis(n), fs, 1e-12);
  CHECK(rep.verdict() == Verdict::Fail);
}

TEST_CASE("interpolated_semigroup_check", "[consistency]") {
  InterpolatedSemigroupOptions opts;
  opts.times = {0.25, 1.0};
  opts.samples = 2;
  opts.ascent_starts = 2;
  opts.ascent_refine = 4;
  const auto f = FunctorDescriptor::real_k(0.5, 2.0, 12);

  const Matrix z = Matrix::Zero(3, 3);
  auto rep = interpolated_semigroup_check(realization(z, lp(3, 2.0)), realization(z, lp(3, 4.0)), f, opts, 1e-10, 1);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("semigroup_consistency_deviation") == 0.0);
  CHECK(rep.value("law_relative_deviation") == 0.0);
  CHECK(rep.value("modulus_at_smallest_t") == 0.0);

  const Matrix a = tridiag(6);
  rep = interpolated_semigroup_check(realization(a, lp(6, 2.0)), realization(a, lp(6, 4.0)), f, opts, 1e-6, 2);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("continuity_ratio") <= 1.0 + 1e-6);
  CHECK(rep.value("bound_ratio") <= 1.0 + 1e-6);

  rep = interpolated_semigroup_check(realization(a, lp(6, 2.0)), realization(a, lp(6, 4.0)),
                                     FunctorDescriptor::real_k(0.5, kInf), opts, 1e-6, 2);
  CHECK(rep.verdict() == Verdict::Inconclusive);
  REQUIRE_FALSE(rep.notes().empty());
  bool cited = false;
  for (const auto& note : rep.notes()) cited = cited || note.find("refused") != std::string::npos;
  CHECK(cited);
}

TEST_CASE("generator_interpolation_check examples", "[consistency]") {
  std::mt19937_64 rng(4);
  const auto f = FunctorDescriptor::real_k(0.5, 2.0, 12);
  std::vector<GeneratorLevel> levels;
  for (Index n : {4, 8}) {
    GeneratorLevel lv{"n=" + std::to_string(n), Matrix::Zero(n, n), lp(n, 1.5), lp(n, 3.0), {}};
    for (int k = 0; k < 4; ++k) lv.samples.push_back(random_vector(rng, n));
    levels.push_back(lv);
  }
  auto rep = generator_interpolation_check(levels, f, {});
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("rho_overall_min") == Approx(1.0).epsilon(1e-8));
  CHECK(rep.value("rho_overall_max") == Approx(1.0).epsilon(1e-8));

  levels.clear();
  for (Index n : {4, 8}) {
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = 1.0 + i;
    GeneratorLevel lv{"n=" + std::to_string(n), d, lp(n, 2.0), lp(n, 2.0), {}};
    for (int k = 0; k < 4; ++k) lv.samples.push_back(random_vector(rng, n));
    levels.push_back(lv);
  }
  rep = generator_interpolation_check(levels, f, {});
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("rho_overall_max") / rep.value("rho_overall_min") <= 1.0 + 1e-6);

  CHECK(generator_interpolation_check(levels, FunctorDescriptor::real_k(0.5, kInf), {}).verdict() == Verdict::Inconclusive);
}

TEST_CASE("resolvent_interpolation_check examples", "[consistency]") {
  const auto f = FunctorDescriptor::real_k(0.5, 2.0, 12);
  auto rep = resolvent_interpolation_check(realization(Matrix::Zero(3, 3), lp(3, 2.0)),
                                           realization(Matrix::Zero(3, 3), lp(3, 4.0)), f, 3, 1e-8, 1);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("endpoint0_norm_upper") == Approx(1.0));
  CHECK(rep.value("endpoint1_norm_upper") == Approx(1.0));

  rep = resolvent_interpolation_check(realization(Matrix::Identity(3, 3), lp(3, 2.0)),
                                      realization(Matrix::Identity(3, 3), lp(3, 4.0)), FunctorDescriptor::complex_lp(0.5), 3,
                                      1e-8, 1);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("interpolated_norm_lower") == Approx(0.5).epsilon(1e-12));
  CHECK(rep.value("endpoint0_norm_upper") == Approx(0.5));

  const Grid g(1, 10, 1.0 / 9);
  const auto op = assemble_divergence_form(g, CoefficientField::constant(g, Matrix::Identity(1, 1)), BoundaryPartition::all(g));
  rep = resolvent_interpolation_check(realization(op.a, NormedSpace::weighted_lp(op.weights, 2.0)),
                                      realization(op.a, NormedSpace::weighted_lp(op.weights, 4.0)), f, 3, 1e-8, 5);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("action_deviation") <= 1e-12);
  CHECK(std::isfinite(rep.value("measured_functor_constant")));
}

TEST_CASE("semigroup diagnostics", "[consistency]") {
  const Index n = 8;
  const Matrix a = tridiag(n);
  const auto r = realization(a, lp(n, 3.0));
  CHECK(semigroup_law_check(r, {0.1, 0.5, 2.0}, 3, 1e-9, 1).verdict() == Verdict::Pass);
  const auto e = euler_convergence_check(a, 1.0, {16, 64, 256, 1024}, 2, 0.15, 1);
  CHECK(e.verdict() == Verdict::Pass);
  CHECK(e.value("slope") == Approx(-1.0).margin(0.15));
  CHECK(generator_residual_check(r, {1.0 / 64, 1.0 / 128, 1.0 / 256}, 2, 0.1, 1).verdict() == Verdict::Pass);
  CHECK(semigroup_bound_check(realization(a, lp(n, 2.0)), {0.1, 1.0}, 1.0, 1e-9, 1).verdict() == Verdict::Pass);
  Matrix grow(2, 2);
  grow << 1, -8, 0, 1;
  CHECK(semigroup_bound_check(realization(grow, lp(2, 2.0)), {0.5, 1.0}, 1.0, 1e-9, 1).verdict() == Verdict::Fail);
}

TEST_CASE("lp_scale_consistency_check and gaussian_bound_check", "[consistency]") {
  const Grid g(1, 12, 1.0 / 11);
  const auto op = assemble_divergence_form(g, CoefficientField::constant(g, Matrix::Identity(1, 1)), BoundaryPartition::all(g));
  const auto rep = lp_scale_consistency_check(op, {1.5, 2, 3, 6}, {0.01, 0.1}, 1e-12, 1);
  CHECK(rep.verdict() == Verdict::Pass);
  CHECK(rep.value("pairwise_deviation") == 0.0);
  CHECK(rep.value("semigroup_sup_lower@L^2") <= 1.0 + 1e-10);

  GaussianFitOptions opts;
  opts.times = {0.01, 0.02};
  GaussianCriteria loose;
  loose.c_tolerance = 10.0;
  loose.exponent_tolerance = 10.0;
  const auto gb = gaussian_bound_check(op, opts, loose);
  CHECK(gb.verdict() == Verdict::Pass);
  CHECK(gb.value("C") > 0.0);
}

TEST_CASE("prolongate", "[consistency]") {
  Vector c(4);
  c << 1, 2, 3, 4;
  const Vector p = prolongate(c, 8);
  Vector expected(8);
  expected << 1, 1, 2, 2, 3, 3, 4, 4;
  CHECK(p == expected);
  CHECK(prolongate(c, 4) == c);
  CHECK(prolongate(c, 6).size() == 6);
}

TEST_CASE("reports are deterministic given the seed", "[consistency][property]") {
  const Matrix a = tridiag(6);
  const auto r0 = realization(a, lp(6, 2.0)), r1 = realization(a, lp(6, 4.0));
  InterpolatedSemigroupOptions opts;
  opts.times = {0.5};
  opts.samples = 2;
  opts.ascent_starts = 2;
  opts.ascent_refine = 4;
  const auto f = FunctorDescriptor::real_k(0.5, 2.0, 10);
  const auto x = interpolated_semigroup_check(r0, r1, f, opts, 1e-6, 42);
  const auto y = interpolated_semigroup_check(r0, r1, f, opts, 1e-6, 42);
  REQUIRE(x.measurements().size() == y.measurements().size());
  for (std::size_t k = 0; k < x.measurements().size(); ++k) {
    CHECK(x.measurements()[k].name == y.measurements()[k].name);
    CHECK(std::memcmp(&x.measurements()[k].value, &y.measurements()[k].value, sizeof(double)) == 0);
  }
}
