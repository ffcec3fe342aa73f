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
#include "cosi/consistency.hpp"

#include "cosi/opnorm.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace cosi {

namespace {

std::vector<Vector> random_vectors(Index n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
    out.push_back(v);
  }
  return out;
}

std::vector<Vector> unit_basis(Index n) {
  std::vector<Vector> out;
  for (Index j = 0; j < n; ++j) out.push_back(Vector::Unit(n, j));
  return out;
}

Matrix columns(const std::vector<Vector>& vs, Index n) {
  Matrix m(n, static_cast<Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    require_same_size(vs[j].size(), n, "vector set");
    m.col(static_cast<Index>(j)) = vs[j];
  }
  return m;
}

Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const char* kFiniteReading =
    "finite-dimensional reading: domain identities are checked as norm equivalences whose constants stay bounded";

}  // namespace

Vector prolongate(const Vector& coarse, Index n) {
  if (coarse.size() < 1 || n < 1) throw DimensionError("prolongate: empty input");
  Vector out(n);
  const Index m = coarse.size();
  for (Index i = 0; i < n; ++i) out[i] = coarse[std::min(m - 1, i * m / n)];
  return out;
}

CheckReport check_operator_consistency(const Matrix& t0, const Matrix& t1, const InterpolationCouple& couple,
                                       const std::vector<Vector>& dense_set, double tol) {
  if (dense_set.empty()) throw Error("check_operator_consistency: dense set is empty");
  if (t0.rows() != t1.rows() || t0.cols() != t1.cols())
    throw DimensionError("check_operator_consistency: operators differ in shape");
  require_same_size(t0.cols(), couple.dim(), "check_operator_consistency source");
  require_same_size(t0.rows(), couple.dim(), "check_operator_consistency target");
  CheckReport rep("operator_consistency", "operator_consistency");
  const Index n = couple.dim();
  const Matrix D = columns(dense_set, n);
  const Index rank = numerical_rank(D);
  const Matrix diff = t0 - t1;
  auto cap = [&](const Vector& v) { return couple.x0->norm(v) + couple.x1->norm(v); };
  double dev = 0.0;
  std::vector<Vector> starts;
  for (const auto& d : dense_set) {
    const double nd = cap(d);
    if (nd == 0.0) continue;
    dev = std::max(dev, cap(diff * d) / nd);
    starts.push_back(d);
  }
  if (dev > 0.0) {
    // The dense set spans; the sup over its span is the operator norm of the difference.
    AscentOptions opt;
    opt.extra_starts = starts;
    opt.random_starts = 4;
    opt.refine_evaluations = 4 * static_cast<int>(n);
    dev = std::max(dev, operator_norm_ascent(diff, cap, cap, opt).value);
  }
  rep.record("dense_set_rank", static_cast<double>(rank));
  rep.expect_le("deviation", dev, 0.0, tol);
  if (rank < n)
    rep.inconclusive("dense set spans " + std::to_string(rank) + " of " + std::to_string(n) + " dimensions");
  return rep;
}

CheckReport resolvent_semigroup_equivalence(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                            const EquivalenceOptions& options, double tol, std::uint64_t seed) {
  if (options.lambdas.empty() || options.times.empty())
    throw DomainError("resolvent_semigroup_equivalence: lambda and time grids must be non-empty");
  const Index n = r0.a.rows();
  require_same_size(r1.a.rows(), n, "resolvent_semigroup_equivalence");
  CheckReport rep("resolvent_semigroup_equivalence", "resolvent_semigroup_equivalence");
  rep.set_seed(seed);
  rep.note("Euler iterates use (I + (t/n) A)^{-n}");
  const InterpolationCouple cap(r0.space, r1.space);
  auto cap_norm = [&](const Vector& v) { return cap.x0->norm(v) + cap.x1->norm(v); };

  std::vector<Vector> xs = unit_basis(n);
  for (auto& v : random_vectors(n, options.samples, seed)) xs.push_back(v);
  const Matrix X = columns(xs, n);
  const std::array<const Matrix*, 2> gens{&r0.a, &r1.a};

  double dir1 = 0.0;
  double dir2 = 0.0;
  double res_dev = 0.0;
  double gen_dev = 0.0;
  double sem_dev = 0.0;
  double quad_bound = 0.0;
  for (double lambda : options.lambdas) {
    const Resolvent R0(r0.a, lambda);
    const Resolvent R1(r1.a, lambda);
    const std::array<const Resolvent*, 2> res{&R0, &R1};
    for (int k = 0; k < 2; ++k) {
      for (Index c = 0; c < X.cols(); ++c) {
        const Vector x = X.col(c);
        const auto q = laplace_resolvent_quadrature(*gens[k], lambda, x, options.laplace);
        for (int j = 0; j < 2; ++j) {
          const Vector rx = res[j]->apply(x);
          const double scale = std::max(rx.norm(), 1e-300);
          const double err = (q.value - rx).norm() / scale;
          const double model = q.error_bound() / scale;
          quad_bound = std::max(quad_bound, model);
          dir1 = std::max(dir1, err - model);
        }
      }
    }
    for (Index c = 0; c < X.cols(); ++c) {
      const Vector x = X.col(c);
      const Vector y1 = R1.apply(x);
      const Vector y0 = R0.apply(x);
      res_dev = std::max(res_dev, (y0 - y1).norm() / std::max(y1.norm(), 1e-300));
      // (A0 + lambda)(R0 - R1)(A1 + lambda) x = (A1 - A0) x
      const Vector y = r1.a * x + lambda * x;
      const Vector z = R0.apply(y) - R1.apply(y);
      const Vector w = r0.a * z + lambda * z;
      const double nx = cap_norm(x);
      if (nx > 0.0) gen_dev = std::max(gen_dev, cap_norm(w) / nx);
    }
  }
  double euler_model_max = 0.0;
  for (double t : options.times) {
    const std::array<Matrix, 2> S{semigroup_matrix(r0.a, t), semigroup_matrix(r1.a, t)};
    for (int k = 0; k < 2; ++k) {
      Matrix step = (t / options.n_euler) * *gens[k];
      step.diagonal().array() += 1.0;
      Matrix half = (2.0 * t / options.n_euler) * *gens[k];
      half.diagonal().array() += 1.0;
      Eigen::PartialPivLU<Matrix> lu(step);
      Eigen::PartialPivLU<Matrix> lu_half(half);
      if (!(lu.rcond() >= 1e-12) || !(lu_half.rcond() >= 1e-12))
        throw NumericalError("resolvent_semigroup_equivalence: I + (t/n) A is singular");
      Matrix E = X;
      for (int s = 0; s < options.n_euler; ++s) E = lu.solve(E);
      Matrix Eh = X;
      for (int s = 0; s < options.n_euler / 2; ++s) Eh = lu_half.solve(Eh);
      for (Index c = 0; c < X.cols(); ++c) {
        const double model_abs = 1.5 * (E.col(c) - Eh.col(c)).norm() + 1e-13 * X.col(c).norm();
        for (int j = 0; j < 2; ++j) {
          const Vector sx = S[j] * X.col(c);
          const double scale = std::max(sx.norm(), 1e-300);
          const double err = (E.col(c) - sx).norm() / scale;
          euler_model_max = std::max(euler_model_max, model_abs / scale);
          dir2 = std::max(dir2, err - model_abs / scale);
        }
      }
    }
    for (Index c = 0; c < X.cols(); ++c) {
      const Vector a = S[0] * X.col(c);
      const Vector b = S[1] * X.col(c);
      sem_dev = std::max(sem_dev, (a - b).norm() / std::max(b.norm(), 1e-300));
    }
  }
  rep.record("quadrature_error_model", quad_bound);
  rep.record("euler_error_model", euler_model_max);
  rep.record("resolvent_relative_deviation", res_dev);
  rep.record("semigroup_relative_deviation", sem_dev);
  rep.record("resolvent_deviation_generator_scale", gen_dev);
  rep.expect_le("direction_laplace_excess", std::max(dir1, 0.0), 0.0, tol);
  rep.expect_le("direction_euler_excess", std::max(dir2, 0.0), 0.0, tol);
  return rep;
}

std::vector<Vector> domain_intersection_image(const Matrix& a0, const Matrix& a1, const std::vector<Vector>& basis) {
  if (a0.rows() != a1.rows() || a0.cols() != a1.cols() || (a0 - a1).cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("domain_intersection_image: the generators are not consistent (A0 != A1)");
  const Resolvent R(a0, 1.0);
  std::vector<Vector> out;
  for (const auto& b : basis) {
    Vector y = R.apply(b);
    const Vector back = a0 * y + y;
    if ((back - b).norm() > 1e-10 * std::max(b.norm(), 1e-300))
      throw NumericalError("domain_intersection_image: (A + I) image does not reproduce the basis");
    out.push_back(std::move(y));
  }
  return out;
}

CheckReport generator_domain_core_check(const GeneratorRealization& r0, const GeneratorRealization& r1, double tol,
                                        std::uint64_t seed) {
  CheckReport rep("generator_domain_core", "domain_intersection_image");
  rep.set_seed(seed);
  rep.note(kFiniteReading);
  const Index n = r0.a.rows();
  const auto basis = unit_basis(n);
  std::vector<Vector> image;
  try {
    image = domain_intersection_image(r0.a, r1.a, basis);
  } catch (const DomainError& e) {
    if (r0.a.rows() == r1.a.rows() && r0.a.cols() == r1.a.cols())
      rep.record("generator_max_entry_difference", (r0.a - r1.a).cwiseAbs().maxCoeff());
    rep.fail(e.what());
    return rep;
  }
  double residual = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j)
    residual = std::max(residual, (r0.a * image[j] + image[j] - basis[j]).norm());
  rep.expect_le("image_residual", residual, 0.0, 1e-10);
  const Index rank = numerical_rank(columns(image, n));
  rep.record("image_rank", static_cast<double>(rank));
  if (rank < n) rep.fail("resolvent image of the basis does not span the space");
  const InterpolationCouple cap(r0.space, r1.space);
  const auto cons = check_operator_consistency(r0.a, r1.a, cap, image, tol);
  rep.absorb(cons, "core.");

  // Generator recovery on the core: the residual must decay like h.
  const double anorm = std::max(r0.a.cwiseAbs().rowwise().sum().maxCoeff(), 1.0);
  std::vector<double> hs;
  for (int k = 6; k <= 10; ++k) hs.push_back(std::ldexp(1.0, -k) / anorm);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  double worst = 0.0;
  for (int s = 0; s < 3; ++s) {
    const Vector& x = image[static_cast<std::size_t>(pick(rng))];
    for (const auto& space : {r0.space, r1.space}) {
      for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
        const double a = generator_residual(r0.a, x, hs[k], *space);
        const double b = generator_residual(r0.a, x, hs[k + 1], *space);
        if (a <= 1e-12 * std::max(space->norm(r0.a * x), 1e-300)) continue;
        worst = std::max(worst, std::abs(a / b / 2.0 - 1.0));
      }
    }
  }
  rep.expect_le("residual_halving_deviation", worst, 0.0, 0.1);
  return rep;
}

CheckReport adjoint_consistency_check(const Matrix& t0, const Matrix& t1, const InterpolationCouple& source,
                                      const InterpolationCouple& target, const Vector& pairing,
                                      const std::vector<Vector>& dense_set, const std::vector<Vector>& functionals,
                                      double tol) {
  CheckReport rep("adjoint_consistency", "adjoint_consistency");
  require_same_size(t0.cols(), source.dim(), "adjoint_consistency source");
  require_same_size(t0.rows(), target.dim(), "adjoint_consistency target");
  if (t0.rows() != t1.rows() || t0.cols() != t1.cols()) throw DimensionError("adjoint_consistency: shapes differ");
  require_same_size(pairing.size(), target.dim(), "adjoint_consistency pairing");
  require_same_size(pairing.size(), source.dim(), "adjoint_consistency pairing");
  const Vector winv = pairing.cwiseInverse();
  double pair_dev = 0.0;
  double adj_dev = 0.0;
  double ratio = 0.0;
  std::size_t uncertified = 0;
  const SpacePtr src_sum = NormedSpace::sum(source.x0, source.x1);
  const SpacePtr dst_sum = NormedSpace::sum(target.x0, target.x1);
  for (const auto& f : functionals) {
    require_same_size(f.size(), target.dim(), "adjoint_consistency functional");
    const Vector pf = pairing.cwiseProduct(f);
    for (const auto& x : dense_set) {
      const Vector y0 = t0 * x;
      const Vector y1 = t1 * x;
      const double scale = std::max(pf.norm() * std::max(y0.norm(), y1.norm()), 1e-300);
      pair_dev = std::max(pair_dev, std::abs(pf.dot(y0) - pf.dot(y1)) / scale);
    }
    // T' f represented through the same pairing: T' f = W^{-1} T^T W f.
    const Vector a0 = winv.cwiseProduct(t0.transpose() * pf);
    const Vector a1 = winv.cwiseProduct(t1.transpose() * pf);
    adj_dev = std::max(adj_dev, (a0 - a1).norm() / std::max(std::max(a0.norm(), a1.norm()), 1e-300));
    const auto num = dual_norm(a0, *src_sum, pairing);
    const auto den = dual_norm(f, *dst_sum, pairing);
    if (!num.certified || !den.certified) ++uncertified;
    if (den.value > 0.0) ratio = std::max(ratio, num.value / den.upper);
  }
  rep.expect_le("pairing_deviation", pair_dev, 0.0, tol);
  rep.expect_le("adjoint_action_deviation", adj_dev, 0.0, tol);
  rep.record("adjoint_sum_dual_ratio", ratio);
  if (uncertified) rep.note(std::to_string(uncertified) + " sum-dual norm evaluations were not certified");
  return rep;
}

CheckReport interpolated_semigroup_check(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                         const FunctorDescriptor& functor, const InterpolatedSemigroupOptions& options,
                                         double tol, std::uint64_t seed) {
  CheckReport rep("interpolated_semigroup", "interpolated_semigroup");
  rep.set_seed(seed);
  rep.note("functor " + functor.describe());
  if (!functor.property_d()) {
    rep.inconclusive("refused: functor " + functor.describe() +
                     " lacks the density property (X0 ∩ X1 is not dense in F(X0, X1) for q = inf), so strong "
                     "continuity of the interpolated semigroup cannot be inferred");
    return rep;
  }
  const InterpolationCouple couple(r0.space, r1.space);
  if (!couple.x0->dense_endpoint() || !couple.x1->dense_endpoint()) {
    rep.inconclusive("refused: an endpoint space is L^inf-like, X0 ∩ X1 is not dense in it");
    return rep;
  }
  const Index n = couple.dim();
  std::vector<double> times = options.times;
  if (times.empty()) throw DomainError("interpolated_semigroup_check: empty time grid");
  std::vector<double> cont = options.continuity;
  if (cont.empty())
    for (int k = 1; k <= 10; ++k) cont.push_back(std::ldexp(1.0, -k));

  double cons = 0.0;
  for (double t : times) {
    const Matrix S0 = semigroup_matrix(r0.a, t);
    const Matrix S1 = semigroup_matrix(r1.a, t);
    cons = std::max(cons, (S0 - S1).norm() / std::max(S1.norm(), 1e-300));
  }
  rep.expect_le("semigroup_consistency_deviation", cons, 0.0, tol);
  if (!rep.passed()) return rep;

  const InterpolatedNorm F(couple, functor);
  bool certified = true;
  auto fval = [&](const Vector& v) {
    const auto r = F.evaluate(v);
    certified = certified && r.certified;
    return r;
  };
  const auto xs = random_vectors(n, options.samples, seed);

  // (a) semigroup law in the F norm.
  double law = 0.0;
  for (std::size_t i = 0; i + 1 < times.size() || (times.size() == 1 && i == 0); ++i) {
    const double s = times[i];
    const double t = times.size() == 1 ? times[0] : times[i + 1];
    const Matrix Sst = semigroup_matrix(r0.a, s + t);
    const Matrix SsSt = semigroup_matrix(r0.a, s) * semigroup_matrix(r0.a, t);
    for (const auto& x : xs) {
      const Vector v = Sst * x;
      const double nv = fval(v).lower;
      if (nv > 0.0) law = std::max(law, fval(v - SsSt * x).value / nv);
    }
    if (times.size() == 1) break;
  }
  rep.expect_le("law_relative_deviation", law, 0.0, tol);

  // (b) boundedness through the endpoint bounds.
  double m0 = 0.0, m1 = 0.0, mf = 0.0;
  for (double t : times) {
    const Matrix S = semigroup_matrix(r0.a, t);
    m0 = std::max(m0, operator_norm(S, *couple.x0, *couple.x0, seed).upper);
    m1 = std::max(m1, operator_norm(S, *couple.x1, *couple.x1, seed).upper);
    AscentOptions opt;
    opt.seed = seed + 7;
    opt.random_starts = options.ascent_starts;
    opt.refine_evaluations = options.ascent_refine;
    opt.extra_starts = xs;
    const auto asc = operator_norm_ascent(
        S, [&](const Vector& x) { return fval(x).upper; }, [&](const Vector& y) { return fval(y).lower; }, opt);
    mf = std::max(mf, asc.value);
  }
  rep.record("endpoint0_sup_norm", m0);
  rep.record("endpoint1_sup_norm", m1);
  rep.record("interpolated_sup_norm", mf);
  if (!std::isfinite(m0) || !std::isfinite(m1)) {
    rep.inconclusive("endpoint semigroup norms lack certified upper bounds");
  } else {
    const double bound = std::max(m0, m1);
    rep.record("measured_functor_constant", bound > 0.0 ? mf / bound : 0.0);
    rep.expect_le("bound_ratio", bound > 0.0 ? mf / bound : 0.0, 1.0, tol);
  }

  // (c) continuity modulus against the embedding constant.
  const double cF = functor.embedding_constant();
  rep.record("embedding_constant", cF);
  double worst_ratio = 0.0;
  double measured_c = 0.0;
  double smallest_modulus = 0.0;
  for (double t : cont) {
    const Matrix S = semigroup_matrix(r0.a, t);
    for (const auto& x : xs) {
      const Vector d = S * x - x;
      const double lhs = fval(d).upper;
      const double ends = couple.x0->norm(d) + couple.x1->norm(d);
      if (ends == 0.0) {
        worst_ratio = std::max(worst_ratio, lhs > 0.0 ? kInf : 0.0);
        continue;
      }
      worst_ratio = std::max(worst_ratio, lhs / (cF * ends));
      measured_c = std::max(measured_c, lhs / ends);
    }
    if (t == *std::min_element(cont.begin(), cont.end())) {
      for (const auto& x : xs)
        smallest_modulus = std::max(smallest_modulus, fval(S * x - x).value / std::max(fval(x).lower, 1e-300));
    }
  }
  rep.record("measured_embedding_constant", measured_c);
  rep.record("modulus_at_smallest_t", smallest_modulus);
  rep.expect_le("continuity_ratio", worst_ratio, 1.0, tol);
  if (!certified) rep.inconclusive("a K-functional evaluation was not certified by its duality gap");
  return rep;
}

CheckReport generator_interpolation_check(const std::vector<GeneratorLevel>& levels, const FunctorDescriptor& functor,
                                          const GeneratorInterpolationOptions& options) {
  CheckReport rep("generator_interpolation", "generator_interpolation");
  rep.note(kFiniteReading);
  rep.note("functor " + functor.describe());
  if (levels.empty()) throw DomainError("generator_interpolation_check: no refinement levels");
  if (!functor.property_d()) {
    rep.inconclusive("refused: functor " + functor.describe() + " lacks the density property");
    return rep;
  }
  bool certified = true;
  double bracket_lo = kInf;
  double bracket_hi = 0.0;
  double rho_lo = kInf;
  double rho_hi = 0.0;
  for (const auto& lv : levels) {
    const InterpolationCouple plain(lv.x0, lv.x1);
    const InterpolationCouple graph(NormedSpace::graph(lv.a, lv.x0), NormedSpace::graph(lv.a, lv.x1));
    const InterpolatedNorm F(plain, functor);
    const InterpolatedNorm G(graph, functor);
    double lo = kInf;
    double hi = 0.0;
    for (const auto& x : lv.samples) {
      const auto num = G.evaluate(x);
      const auto d0 = F.evaluate(x);
      const auto d1 = F.evaluate(lv.a * x);
      certified = certified && num.certified && d0.certified && d1.certified;
      const double den = d0.value + d1.value;
      if (!(den > 0.0)) continue;
      const double rho = num.value / den;
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
    rep.record("rho_min@" + lv.label, lo);
    rep.record("rho_max@" + lv.label, hi);
    rep.record("bracket@" + lv.label, hi / lo);
    bracket_lo = std::min(bracket_lo, hi / lo);
    bracket_hi = std::max(bracket_hi, hi / lo);
    rho_lo = std::min(rho_lo, lo);
    rho_hi = std::max(rho_hi, hi);
  }
  const double spread = bracket_hi / bracket_lo;
  rep.record("bracket_spread", spread, options.bracket_factor);
  if (!(spread < options.bracket_factor))
    rep.fail("equivalence bracket varies by " + fmt(spread) + " across levels (allowed < " + fmt(options.bracket_factor) + ")");
  rep.record("rho_overall_min", rho_lo);
  rep.record("rho_overall_max", rho_hi);
  if (!(rho_lo >= options.rho_low && rho_hi <= options.rho_high))
    rep.fail("rho leaves [" + fmt(options.rho_low) + ", " + fmt(options.rho_high) + "]");
  if (!certified) rep.inconclusive("a K-functional evaluation was not certified by its duality gap");
  return rep;
}

CheckReport resolvent_interpolation_check(const GeneratorRealization& r0, const GeneratorRealization& r1,
                                          const FunctorDescriptor& functor, int samples, double tol,
                                          std::uint64_t seed) {
  CheckReport rep("resolvent_interpolation", "resolvent_interpolation");
  rep.set_seed(seed);
  rep.note("functor " + functor.describe());
  if (!functor.property_d()) {
    rep.inconclusive("refused: functor " + functor.describe() + " lacks the density property");
    return rep;
  }
  const InterpolationCouple couple(r0.space, r1.space);
  const Index n = couple.dim();
  const Resolvent R0(r0.a, 1.0);
  const Resolvent R1(r1.a, 1.0);
  const Matrix R = R0.matrix();
  const auto xs = random_vectors(n, samples, seed);
  double action = 0.0;
  for (const auto& x : xs) {
    const Vector direct = R0.apply(x);
    const Vector interpolated = R1.apply(x);
    action = std::max(action, (direct - interpolated).norm() / std::max(direct.norm(), 1e-300));
  }
  rep.expect_le("action_deviation", action, 0.0, 1e-12);
  const auto e0 = operator_norm(R, *couple.x0, *couple.x0, seed);
  const auto e1 = operator_norm(R, *couple.x1, *couple.x1, seed + 1);
  rep.record("endpoint0_norm_upper", e0.upper);
  rep.record("endpoint1_norm_upper", e1.upper);
  double fnorm = 0.0;
  bool certified = true;
  if (functor.method == FunctorDescriptor::Method::ComplexWeightedLp) {
    const SpacePtr fs = complex_interp_space(couple, functor.theta);
    fnorm = operator_norm(R, *fs, *fs, seed + 2).lower;
  } else {
    const InterpolatedNorm F(couple, functor);
    AscentOptions opt;
    opt.seed = seed + 2;
    opt.random_starts = samples;
    opt.refine_evaluations = 16;
    opt.extra_starts = xs;
    fnorm = operator_norm_ascent(
                R,
                [&](const Vector& x) {
                  const auto r = F.evaluate(x);
                  certified = certified && r.certified;
                  return r.upper;
                },
                [&](const Vector& y) {
                  const auto r = F.evaluate(y);
                  certified = certified && r.certified;
                  return r.lower;
                },
                opt)
                .value;
  }
  rep.record("interpolated_norm_lower", fnorm);
  if (!std::isfinite(e0.upper) || !std::isfinite(e1.upper)) {
    rep.inconclusive("endpoint resolvent norms lack certified upper bounds");
  } else {
    const double bound = std::max(e0.upper, e1.upper);
    rep.record("measured_functor_constant", bound > 0.0 ? fnorm / bound : 0.0);
    rep.expect_le("bound_ratio", bound > 0.0 ? fnorm / bound : 0.0, 1.0, tol);
  }
  if (!certified) rep.inconclusive("a K-functional evaluation was not certified by its duality gap");
  return rep;
}

CheckReport semigroup_law_check(const GeneratorRealization& r, const std::vector<double>& times, int samples,
                                double tol, std::uint64_t seed) {
  CheckReport rep("semigroup_law", "semigroup_law");
  rep.set_seed(seed);
  if (times.empty()) throw DomainError("semigroup_law_check: empty time grid");
  const auto xs = random_vectors(r.a.rows(), samples, seed);
  double worst = 0.0;
  for (double s : times) {
    for (double t : times) {
      const Matrix lhs = semigroup_matrix(r.a, s + t);
      const Matrix rhs = semigroup_matrix(r.a, s) * semigroup_matrix(r.a, t);
      for (const auto& x : xs) {
        const Vector a = lhs * x;
        const double na = r.space->norm(a);
        const double d = r.space->norm(a - rhs * x);
        if (na > 0.0) worst = std::max(worst, d / na);
        else worst = std::max(worst, d);
      }
    }
  }
  rep.expect_le("law_relative_deviation", worst, 0.0, tol);
  return rep;
}

CheckReport euler_convergence_check(const Matrix& a, double t, const std::vector<int>& ns, int samples,
                                    double slope_tol, std::uint64_t seed) {
  CheckReport rep("euler_convergence", "euler_convergence");
  rep.set_seed(seed);
  rep.note("Euler iterates use (I + (t/n) A)^{-n}");
  if (ns.size() < 2) throw DomainError("euler_convergence_check: need at least two values of n");
  const auto xs = random_vectors(a.rows(), samples, seed);
  const Matrix S = semigroup_matrix(a, t);
  std::vector<double> lx, ly;
  for (int n : ns) {
    double err = 0.0;
    for (const auto& x : xs) {
      const Vector ref = S * x;
      err = std::max(err, (euler_apply(a, t, n, x) - ref).norm() / std::max(ref.norm(), 1e-300));
    }
    rep.record("relative_error@n=" + std::to_string(n), err);
    if (err > 0.0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() < 2) {
    rep.record("slope", 0.0);
    rep.note("Euler iterates are exact on this generator; no rate to measure");
    return rep;
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.record("slope", slope);
  rep.expect_le("slope_deviation", std::abs(slope + 1.0), 0.0, slope_tol);
  return rep;
}

CheckReport generator_residual_check(const GeneratorRealization& r, const std::vector<double>& hs, int samples,
                                     double ratio_tol, std::uint64_t seed) {
  CheckReport rep("generator_residual", "generator_residual");
  rep.set_seed(seed);
  if (hs.size() < 2) throw DomainError("generator_residual_check: need at least two step sizes");
  std::vector<double> h = hs;
  std::sort(h.begin(), h.end(), std::greater<>());
  const auto xs = random_vectors(r.a.rows(), samples, seed);
  double worst = 0.0;
  double largest = 0.0;
  for (const auto& x : xs) {
    std::vector<double> res;
    for (double step : h) res.push_back(generator_residual(r.a, x, step, *r.space));
    largest = std::max(largest, res.front());
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      if (res[k] <= 1e-12 * std::max(r.space->norm(r.a * x), 1e-300)) continue;
      const double observed = res[k] / res[k + 1];
      const double expected = h[k] / h[k + 1];
      worst = std::max(worst, std::abs(observed / expected - 1.0));
    }
  }
  rep.record("largest_residual", largest);
  rep.expect_le("halving_ratio_deviation", worst, 0.0, ratio_tol);
  return rep;
}

CheckReport semigroup_bound_check(const GeneratorRealization& r, const std::vector<double>& times, double bound,
                                  double tol, std::uint64_t seed) {
  CheckReport rep("semigroup_bound", "semigroup_bound");
  rep.set_seed(seed);
  const auto sb = semigroup_bound(r.a, *r.space, times, seed);
  rep.record("sup_norm_upper", sb.sup_upper);
  rep.expect_le("sup_norm_lower", sb.sup_lower, bound, tol);
  return rep;
}

CheckReport lp_scale_consistency_check(const EllipticOperator& op, const std::vector<double>& ps,
                                       const std::vector<double>& times, double tol, std::uint64_t seed) {
  CheckReport rep("lp_scale_consistency", "lp_scale_consistency");
  rep.set_seed(seed);
  const auto family = lp_scale_family(op, ps);
  const auto basis = unit_basis(op.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (family[i].space->kind() == SpaceKind::Dual || family[j].space->kind() == SpaceKind::Dual) {
        worst = std::max(worst, (family[i].a - family[j].a).cwiseAbs().maxCoeff());
        continue;
      }
      const auto c = check_operator_consistency(family[i].a, family[j].a,
                                                InterpolationCouple(family[i].space, family[j].space), basis, tol);
      worst = std::max(worst, c.value("deviation"));
      if (c.verdict() == Verdict::Inconclusive) rep.inconclusive("pair " + family[i].label + "/" + family[j].label);
    }
  }
  rep.expect_le("pairwise_deviation", worst, 0.0, tol);
  for (const auto& g : family) {
    const auto sb = semigroup_bound(g.a, *g.space, times, seed);
    rep.record("semigroup_sup_lower@" + g.label, sb.sup_lower);
    if (!std::isfinite(sb.sup_lower)) rep.fail("semigroup bound not finite on " + g.label);
  }
  return rep;
}

CheckReport gaussian_bound_check(const EllipticOperator& op, const GaussianFitOptions& options,
                                 const GaussianCriteria& criteria) {
  CheckReport rep("gaussian_bound", "gaussian_bound");
  const auto fit = gaussian_bound_fit(op, options);
  const double half_d = 0.5 * op.grid.dimension;
  rep.record("C", fit.C);
  rep.record("c", fit.c);
  rep.record("diagonal_exponent", fit.diagonal_exponent);
  rep.record("clipped_entries", static_cast<double>(fit.clipped));
  rep.record("negative_entries", static_cast<double>(fit.negative));
  rep.record("near_violations", static_cast<double>(fit.near_violations));
  for (std::size_t k = 0; k < fit.c_grid.size(); ++k) rep.record("C@c=" + fmt(fit.c_grid[k]), fit.C_per_c[k]);
  rep.expect_le("c_relative_deviation", std::abs(fit.c - criteria.c_reference) / criteria.c_reference, 0.0,
                criteria.c_tolerance);
  rep.expect_le("exponent_relative_deviation", std::abs(fit.diagonal_exponent - half_d) / half_d, 0.0,
                criteria.exponent_tolerance);
  if (fit.negative > 0)
    rep.note(std::to_string(fit.negative) + " negative kernel entries; fit restricted to the positive part");
  return rep;
}

}  // namespace cosi
