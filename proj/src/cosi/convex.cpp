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
#include "cosi/convex.hpp"

#include <Eigen/Sparse>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cosi::convex {

namespace {

bool is_finite_p(double p) { return std::isfinite(p); }

// Solves s + kappa * s^(p-1) = a for s in [0, a].
double coordinate_root(double a, double kappa, double p) {
  if (a <= 0.0) return 0.0;
  if (p == 2.0) return a / (1.0 + kappa);
  if (p == 3.0) return 2.0 * a / (1.0 + std::sqrt(1.0 + 4.0 * kappa * a));
  if (p == 1.5) {
    const double sigma = 2.0 * a / (kappa + std::sqrt(kappa * kappa + 4.0 * a));
    return sigma * sigma;
  }
  auto f = [a, kappa, p](double s) {
    const double sp = std::pow(s, p - 2.0);
    return std::make_pair(s + kappa * sp * s - a, 1.0 + kappa * (p - 1.0) * sp);
  };
  // For p < 2 the derivative blows up at 0; start from the upper end.
  return boost::math::tools::newton_raphson_iterate(f, a, 0.0, a, 52);
}

// Internal view of a block with cached sparse/diagonal representations.
struct BlockOps {
  const Matrix* dense = nullptr;
  bool diagonal = false;
  Vector diag;
  bool sparse = false;
  Eigen::SparseMatrix<double> sp;
};

}  // namespace

double dual_exponent(double p) {
  if (p == 1.0) return kInf;
  if (!is_finite_p(p)) return 1.0;
  return p / (p - 1.0);
}

double plain_norm(const Vector& r, double p) {
  if (r.size() == 0) return 0.0;
  if (!is_finite_p(p)) return r.cwiseAbs().maxCoeff();
  if (p == 1.0) return r.cwiseAbs().sum();
  if (p == 2.0) return r.norm();
  const double m = r.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((r.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

Vector norm_subgradient(const Vector& r, double p) {
  Vector g = Vector::Zero(r.size());
  if (r.size() == 0) return g;
  const double m = r.cwiseAbs().maxCoeff();
  if (m == 0.0) return g;
  if (p == 1.0) {
    for (Index i = 0; i < r.size(); ++i) g[i] = (r[i] > 0) - (r[i] < 0);
    return g;
  }
  if (!is_finite_p(p)) {
    std::vector<Index> ties;
    for (Index i = 0; i < r.size(); ++i)
      if (std::abs(r[i]) == m) ties.push_back(i);
    for (Index i : ties) g[i] = (r[i] > 0 ? 1.0 : -1.0) / static_cast<double>(ties.size());
    return g;
  }
  const Vector u = r / m;
  const double n = std::pow(u.cwiseAbs().array().pow(p).sum(), 1.0 / p);
  for (Index i = 0; i < r.size(); ++i) {
    const double a = std::abs(u[i]) / n;
    g[i] = (u[i] > 0 ? 1.0 : (u[i] < 0 ? -1.0 : 0.0)) * std::pow(a, p - 1.0);
  }
  return g;
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (radius <= 0.0) return Vector::Zero(v.size());
  const Vector a = v.cwiseAbs();
  if (a.sum() <= radius) return v;
  std::vector<double> s(a.data(), a.data() + a.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    const double cand = (cum - radius) / static_cast<double>(j + 1);
    if (s[j] - cand > 0.0) tau = cand;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::max(a[i] - tau, 0.0);
    out[i] = v[i] >= 0 ? m : -m;
  }
  return out;
}

Vector prox_norm(const Vector& v, double p, double lambda) {
  if (lambda <= 0.0) return v;
  if (p == 1.0) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
      const double m = std::max(std::abs(v[i]) - lambda, 0.0);
      out[i] = v[i] >= 0 ? m : -m;
    }
    return out;
  }
  if (p == 2.0) {
    const double n = v.norm();
    if (n <= lambda) return Vector::Zero(v.size());
    return (1.0 - lambda / n) * v;
  }
  if (!is_finite_p(p)) return v - project_l1_ball(v, lambda);

  const double q = dual_exponent(p);
  if (plain_norm(v, q) <= lambda) return Vector::Zero(v.size());

  // Work with a = |v| / max|v| so the scalar equations are O(1).
  const double m = v.cwiseAbs().maxCoeff();
  const Vector a = v.cwiseAbs() / m;
  // With x = m s the optimality conditions become s_i + kappa s_i^(p-1) = a_i
  // together with kappa ||s||_p^(p-1) = lambda / m.
  const double target = lambda / m;
  Vector s(a.size());
  auto phi = [&](double log_kappa) {
    const double kappa = std::exp(log_kappa);
    for (Index i = 0; i < a.size(); ++i) s[i] = coordinate_root(a[i], kappa, p);
    const double ns = plain_norm(s, p);
    return kappa * std::pow(ns, p - 1.0) - target;
  };
  double lo = -2.0;
  double hi = 2.0;
  double flo = phi(lo);
  int guard = 0;
  while (flo > 0.0 && guard++ < 200) {
    hi = lo;
    lo -= 4.0;
    flo = phi(lo);
  }
  double fhi = phi(hi);
  guard = 0;
  while (fhi < 0.0 && guard++ < 200) {
    lo = hi;
    flo = fhi;
    hi += 4.0;
    fhi = phi(hi);
  }
  std::uintmax_t iters = 200;
  auto tol = [](double x0, double x1) { return std::abs(x1 - x0) <= 1e-15 * std::max(1.0, std::abs(x0)); };
  auto root = boost::math::tools::toms748_solve(phi, lo, hi, flo, fhi, tol, iters);
  phi(0.5 * (root.first + root.second));
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = (v[i] >= 0 ? 1.0 : -1.0) * m * s[i];
  return out;
}

// ---------------------------------------------------------------------------

Structure::Structure(Index vars, std::vector<Block> blocks) : vars_(vars), blocks_(std::move(blocks)) {
  if (vars_ <= 0) throw DimensionError("convex::Structure: no variables");
  Matrix normal = Matrix::Zero(vars_, vars_);
  for (const auto& b : blocks_) {
    require_same_size(b.map.cols(), vars_, "convex::Structure block");
    if (!(b.p >= 1.0)) throw DomainError("convex::Structure: exponent must be >= 1");
    rows_ += b.map.rows();
    normal.noalias() += b.map.transpose() * b.map;
  }
  normal_.compute(normal);
  if (normal_.info() != Eigen::Success) throw NumericalError("convex::Structure: normal matrix factorisation failed");
  const double dmax = normal.diagonal().cwiseAbs().maxCoeff();
  const double dmin = normal_.vectorD().cwiseAbs().minCoeff();
  if (!(dmin > 1e-13 * dmax)) {
    // Rank deficient: regularise so the least-squares steps stay defined.
    normal.diagonal().array() += 1e-12 * std::max(dmax, 1.0);
    normal_.compute(normal);
  }
}

Vector Structure::normal_solve(const Vector& rhs) const { return normal_.solve(rhs); }

const char* to_string(Method m) {
  switch (m) {
    case Method::Start: return "start";
    case Method::Newton: return "newton";
    case Method::Splitting: return "splitting";
  }
  return "?";
}

namespace {

class Engine {
 public:
  explicit Engine(const Problem& pb) : pb_(pb), s_(*pb.structure) {
    const auto& blocks = s_.blocks();
    if (pb.offsets.size() != blocks.size() || pb.scales.size() != blocks.size())
      throw DimensionError("convex::Problem: offsets/scales do not match blocks");
    ops_.resize(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      require_same_size(pb.offsets[k].size(), blocks[k].map.rows(), "convex::Problem offset");
      if (!(pb.scales[k] >= 0.0)) throw DomainError("convex::Problem: negative scale");
      auto& op = ops_[k];
      const Matrix& M = blocks[k].map;
      op.dense = &M;
      if (M.rows() == M.cols()) {
        Matrix off = M;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() == 0.0) {
          op.diagonal = true;
          op.diag = M.diagonal();
          continue;
        }
      }
      const Index nnz = (M.array() != 0.0).count();
      if (nnz * 4 < M.size()) {
        op.sparse = true;
        op.sp = M.sparseView();
      }
    }
  }

  std::size_t size() const { return ops_.size(); }
  double p(std::size_t k) const { return s_.blocks()[k].p; }
  double c(std::size_t k) const { return pb_.scales[k]; }
  const Vector& b(std::size_t k) const { return pb_.offsets[k]; }

  Vector apply(std::size_t k, const Vector& v) const {
    const auto& op = ops_[k];
    if (op.diagonal) return op.diag.cwiseProduct(v);
    if (op.sparse) return op.sp * v;
    return (*op.dense) * v;
  }
  Vector apply_t(std::size_t k, const Vector& y) const {
    const auto& op = ops_[k];
    if (op.diagonal) return op.diag.cwiseProduct(y);
    if (op.sparse) return op.sp.transpose() * y;
    return op.dense->transpose() * y;
  }
  // H += w * M^T diag(d) M
  void add_gram(std::size_t k, const Vector& d, double w, Matrix& H) const {
    const auto& op = ops_[k];
    if (op.diagonal) {
      H.diagonal().array() += w * (op.diag.array().square() * d.array());
    } else if (op.sparse) {
      Eigen::SparseMatrix<double> t = op.sp.transpose() * d.asDiagonal() * op.sp;
      for (int j = 0; j < t.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(t, j); it; ++it) H(it.row(), it.col()) += w * it.value();
    } else {
      H.noalias() += w * (op.dense->transpose() * d.asDiagonal() * (*op.dense));
    }
  }

  Vector residual(std::size_t k, const Vector& v) const { return apply(k, v) + b(k); }

  // Size of the rounding error committed when evaluating the objective at v.
  double rounding(const Vector& v) const {
    double r = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
      if (c(k) > 0.0) r += c(k) * (plain_norm(apply(k, v), p(k)) + plain_norm(b(k), p(k)));
    return 16.0 * std::numeric_limits<double>::epsilon() * r;
  }

  double objective(const Vector& v) const {
    double f = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
      if (c(k) > 0.0) f += c(k) * plain_norm(residual(k, v), p(k));
    return f;
  }

  double lower_bound(const Vector& v, const std::vector<Vector>* hint) const {
    const std::size_t K = size();
    std::vector<Vector> r(K), y(K);
    std::vector<char> free(K, 0);
    double mag = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      r[k] = residual(k, v);
      if (b(k).size() > 0) mag = std::max(mag, b(k).cwiseAbs().maxCoeff());
      const Vector mv = apply(k, v);
      if (mv.size() > 0) mag = std::max(mag, mv.cwiseAbs().maxCoeff());
    }
    const double tiny = 1e-12 * std::max(mag, 1e-300);
    bool any_free = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (c(k) <= 0.0) {
        y[k] = Vector::Zero(r[k].size());
        continue;
      }
      const bool zero = r[k].size() == 0 || r[k].cwiseAbs().maxCoeff() <= tiny;
      if (zero) {
        free[k] = 1;
        any_free = true;
      }
      if (hint) {
        y[k] = (*hint)[k];
      } else {
        y[k] = zero ? Vector::Zero(r[k].size()) : Vector(c(k) * norm_subgradient(r[k], p(k)));
      }
    }
    auto compute_residual = [&](double& scale) {
      Vector res = Vector::Zero(s_.vars());
      scale = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const Vector t = apply_t(k, y[k]);
        res += t;
        scale += t.norm();
      }
      return res;
    };
    double scale = 0.0;
    Vector res = compute_residual(scale);
    const double resid_tol = 1e-14 * (1.0 + scale);
    if (any_free && res.norm() > resid_tol) {
      Index rows = 0;
      for (std::size_t k = 0; k < K; ++k)
        if (free[k]) rows += r[k].size();
      Matrix MFt(s_.vars(), rows);
      Index off = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (!free[k]) continue;
        MFt.middleCols(off, r[k].size()) = s_.blocks()[k].map.transpose();
        off += r[k].size();
      }
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(MFt);
      const Vector z = cod.solve(-res);
      off = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (!free[k]) continue;
        y[k] += z.segment(off, r[k].size());
        off += r[k].size();
      }
      res = compute_residual(scale);
    }
    if (res.norm() > resid_tol) {
      const Vector z = s_.normal_solve(res);
      for (std::size_t k = 0; k < K; ++k) y[k] -= apply(k, z);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double dn = plain_norm(y[k], dual_exponent(p(k)));
      if (c(k) <= 0.0) {
        if (dn > 0.0) return 0.0;
        continue;
      }
      worst = std::max(worst, dn / c(k));
    }
    double lb = 0.0;
    for (std::size_t k = 0; k < K; ++k) lb += y[k].dot(b(k));
    if (worst > 1.0) lb /= worst;
    return std::max(lb, 0.0);
  }

 private:
  const Problem& pb_;
  const Structure& s_;
  std::vector<BlockOps> ops_;
};

struct Tracker {
  explicit Tracker(const Engine& engine) : e(engine) {}
  const Engine& e;
  Vector point;
  double value = kInf;
  double floor = 0.0;
  double lower = 0.0;
  int iterations = 0;
  Method method = Method::Start;
  double tol = 1e-9;

  void offer(const Vector& v, double val, double lb, Method m) {
    if (val < value) {
      value = val;
      point = v;
      method = m;
      floor = e.rounding(v);
    }
    lower = std::max(lower, lb);
  }
  double gap() const { return value - lower; }
  bool certified() const { return gap() <= tol * std::max(value, 1e-300) + floor; }
};

bool all_smooth(const Engine& e) {
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double p = e.p(k);
    if (e.c(k) > 0.0 && (p <= 1.0 || !std::isfinite(p))) return false;
  }
  return true;
}

// (sum_i (r_i^2 + mu^2)^{p/2})^{1/p} with its gradient g and the Hessian
// pieces: H = d_scale * (diag(d) - g_scale * g g^T).
struct Smoothed {
  double value = 0.0;
  Vector g;
  Vector d;
  double d_scale = 0.0;
  double g_scale = 0.0;
};

Smoothed smoothed_norm(const Vector& r, double p, double mu, bool derivatives) {
  Smoothed out;
  const double m = std::max(r.size() ? r.cwiseAbs().maxCoeff() : 0.0, mu);
  if (m == 0.0) {
    out.g = Vector::Zero(r.size());
    out.d = Vector::Zero(r.size());
    return out;
  }
  const Vector u = r / m;
  const double eta = mu / m;
  const Vector s = (u.array().square() + eta * eta).sqrt().matrix();
  const double S = s.array().pow(p).sum();
  out.value = m * std::pow(S, 1.0 / p);
  if (!derivatives) return out;
  // Gradient is homogeneous of degree 0 in (r, mu); the Hessian of degree -1.
  const double a = std::pow(S, 1.0 / p - 1.0);
  out.g = a * (u.array() * s.array().pow(p - 2.0)).matrix();
  out.d = (s.array().pow(p - 4.0) * ((p - 1.0) * u.array().square() + eta * eta)).matrix();
  out.d_scale = a / m;
  out.g_scale = (p - 1.0) / (S * a * a);
  return out;
}

// Damped Newton on a smoothed objective, driving the smoothing to zero.
// Every accepted iterate is offered with its exact objective and certificate.
void run_newton(const Engine& e, Vector v, Tracker& tr, int max_it) {
  const Index n = v.size();
  const std::size_t K = e.size();
  std::vector<double> ref(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const Vector r = e.residual(k, v);
    ref[k] = std::max(r.size() ? r.cwiseAbs().maxCoeff() : 0.0, e.b(k).size() ? e.b(k).cwiseAbs().maxCoeff() : 0.0);
    if (ref[k] == 0.0) ref[k] = 1.0;
  }
  auto smoothed_value = [&](const Vector& x, double eta) {
    double f = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      if (e.c(k) > 0.0) f += e.c(k) * smoothed_norm(e.residual(k, x), e.p(k), eta * ref[k], false).value;
    return f;
  };
  double lambda = 1e-12;
  int used = 0;
  for (double eta = 1e-1; eta >= 1e-15 && used < max_it; eta *= 0.1) {
    for (int it = 0; it < 40 && used < max_it; ++it, ++used) {
      ++tr.iterations;
      double f = 0.0;
      Vector grad = Vector::Zero(n);
      Matrix H = Matrix::Zero(n, n);
      std::vector<Vector> duals(K);
      for (std::size_t k = 0; k < K; ++k) {
        const double c = e.c(k);
        const Vector r = e.residual(k, v);
        duals[k] = Vector::Zero(r.size());
        if (c <= 0.0) continue;
        const auto sm = smoothed_norm(r, e.p(k), eta * ref[k], true);
        duals[k] = c * sm.g;
        f += c * sm.value;
        if (sm.d_scale == 0.0) continue;
        const Vector Mg = e.apply_t(k, sm.g);
        grad += c * Mg;
        e.add_gram(k, sm.d, c * sm.d_scale, H);
        H.noalias() -= (c * sm.d_scale * sm.g_scale) * Mg * Mg.transpose();
      }
      const Vector hdiag = H.diagonal().cwiseAbs().cwiseMax(1e-300);
      const double dmax = hdiag.maxCoeff();
      bool moved = false;
      double decrement = 0.0;
      for (int tries = 0; tries < 40; ++tries) {
        Matrix Hd = H;
        Hd.diagonal() += lambda * hdiag + Vector::Constant(n, 1e-14 * dmax);
        Eigen::LDLT<Matrix> ldlt(Hd);
        const Vector step = -ldlt.solve(grad);
        const double slope = grad.dot(step);
        if (!step.allFinite() || slope >= 0.0) {
          lambda = std::max(lambda * 10.0, 1e-8);
          continue;
        }
        const double fn = smoothed_value(v + step, eta);
        if (fn <= f + 1e-4 * slope) {
          decrement = -slope;
          v += step;
          lambda = std::max(lambda * 0.1, 1e-12);
          moved = true;
          break;
        }
        lambda = std::max(lambda * 10.0, 1e-8);
      }
      tr.offer(v, e.objective(v), std::max(e.lower_bound(v, nullptr), e.lower_bound(v, &duals)), Method::Newton);
      if (!moved) break;
      if (tr.certified()) return;
      if (decrement <= 1e-24 * std::max(f, 1e-300)) break;
    }
  }
}

void run_splitting(const Engine& e, const Structure& s, Vector v, Tracker& tr, int budget) {
  const std::size_t K = e.size();
  double rho = 1.0;
  const double alpha = 1.6;
  std::vector<Vector> r(K), u(K), mv(K), r_old(K), y(K);
  for (std::size_t k = 0; k < K; ++k) {
    r[k] = e.residual(k, v);
    u[k] = Vector::Zero(r[k].size());
  }
  const int check_every = 20;
  for (int it = 0; it < budget; ++it) {
    ++tr.iterations;
    Vector rhs = Vector::Zero(v.size());
    for (std::size_t k = 0; k < K; ++k) rhs += e.apply_t(k, r[k] - e.b(k) - u[k]);
    v = s.normal_solve(rhs);
    const bool check = (it + 1) % check_every == 0 || it + 1 == budget;
    for (std::size_t k = 0; k < K; ++k) {
      mv[k] = e.residual(k, v);
      const Vector ahat = alpha * mv[k] + (1.0 - alpha) * r[k];
      if (check) r_old[k] = r[k];
      r[k] = prox_norm(ahat + u[k], e.p(k), e.c(k) / rho);
      u[k] += ahat - r[k];
    }
    if (!check) continue;
    double pr = 0.0;
    Vector dr = Vector::Zero(v.size());
    for (std::size_t k = 0; k < K; ++k) {
      pr += (mv[k] - r[k]).squaredNorm();
      dr += e.apply_t(k, r[k] - r_old[k]);
      y[k] = rho * u[k];
    }
    pr = std::sqrt(pr);
    const double dres = rho * dr.norm();
    tr.offer(v, e.objective(v), e.lower_bound(v, &y), Method::Splitting);
    if (tr.certified()) return;
    if (pr > 10.0 * dres) {
      rho *= 2.0;
      for (auto& uk : u) uk *= 0.5;
    } else if (dres > 10.0 * pr) {
      rho *= 0.5;
      for (auto& uk : u) uk *= 2.0;
    }
  }
}

}  // namespace

double objective(const Problem& problem, const Vector& v) { return Engine(problem).objective(v); }

double lower_bound(const Problem& problem, const Vector& v, const std::vector<Vector>* hint) {
  return Engine(problem).lower_bound(v, hint);
}

Result minimize(const Problem& problem, std::span<const Vector> starts, const Options& options) {
  const Structure& S = *problem.structure;
  // Homogeneity: f(beta v; beta b) / gamma for normalised scales.
  double beta = 0.0;
  for (const auto& b : problem.offsets)
    if (b.size()) beta = std::max(beta, b.cwiseAbs().maxCoeff());
  double gamma = 0.0;
  for (double c : problem.scales) gamma = std::max(gamma, c);

  Result out;
  if (beta == 0.0 || gamma == 0.0) {
    out.point = Vector::Zero(S.vars());
    out.certified = true;
    return out;
  }
  Problem scaled{problem.structure, problem.offsets, problem.scales};
  for (auto& b : scaled.offsets) b /= beta;
  for (auto& c : scaled.scales) c /= gamma;
  const Engine e(scaled);

  Tracker tr(e);
  tr.tol = options.gap_tol;
  std::vector<Vector> norm_starts;
  for (const auto& st : starts) {
    require_same_size(st.size(), S.vars(), "convex::minimize start");
    norm_starts.push_back(st / beta);
  }
  if (norm_starts.empty()) norm_starts.push_back(Vector::Zero(S.vars()));
  for (const auto& st : norm_starts) {
    tr.offer(st, e.objective(st), e.lower_bound(st, nullptr), Method::Start);
    if (tr.certified()) break;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_near = [&](const Vector& base, double spread) {
    Vector v(base.size());
    for (Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    return Vector(base + spread * v / std::sqrt(static_cast<double>(v.size())));
  };

  if (!tr.certified() && options.allow_newton && all_smooth(e)) {
    Vector start = Vector::Zero(S.vars());
    for (const auto& st : norm_starts) start += st;
    start /= static_cast<double>(norm_starts.size());
    run_newton(e, start, tr, 400);
  }
  if (!tr.certified()) run_splitting(e, S, tr.point, tr, options.max_iterations);
  if (!tr.certified() && tr.gap() > 1e-4 * std::max(tr.value, 1e-300)) {
    const int per = std::max(options.max_iterations / std::max(options.restarts, 1), 100);
    for (int i = 0; i < options.restarts && !tr.certified(); ++i) {
      run_splitting(e, S, random_near(tr.point, std::max(tr.point.norm(), 1.0)), tr, per);
    }
  }

  out.point = tr.point * beta;
  out.value = tr.value * beta * gamma;
  out.lower_bound = std::min(tr.lower, tr.value) * beta * gamma;
  out.certified = tr.certified();
  out.iterations = tr.iterations;
  out.method = tr.method;
  return out;
}

}  // namespace cosi::convex
