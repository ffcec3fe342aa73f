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
#include "cosi/elliptic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace cosi {

Grid::Grid(int dimension_, int nodes_, double h_) : dimension(dimension_), nodes(nodes_), h(h_) {
  if (dimension != 1 && dimension != 2) throw DomainError("grid: dimension must be 1 or 2");
  if (nodes < 2) throw DomainError("grid: need at least 2 nodes per axis");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid: mesh width h must be positive");
}

Index Grid::node_count() const { return dimension == 1 ? nodes : static_cast<Index>(nodes) * nodes; }

double Grid::cell_volume() const { return dimension == 1 ? h : h * h; }

Vector Grid::position(Index node) const {
  Vector x(dimension);
  x[0] = static_cast<double>(node % nodes) * h;
  if (dimension == 2) x[1] = static_cast<double>(node / nodes) * h;
  return x;
}

bool Grid::on_boundary(Index node) const {
  const Index i = node % nodes;
  if (i == 0 || i == nodes - 1) return true;
  if (dimension == 2) {
    const Index j = node / nodes;
    return j == 0 || j == nodes - 1;
  }
  return false;
}

BoundaryPartition BoundaryPartition::none(const Grid& g) { return {std::vector<char>(g.node_count(), 0)}; }

BoundaryPartition BoundaryPartition::all(const Grid& g) {
  BoundaryPartition b = none(g);
  for (Index k = 0; k < g.node_count(); ++k) b.dirichlet[k] = g.on_boundary(k);
  return b;
}

BoundaryPartition BoundaryPartition::sides(const Grid& g, const std::vector<std::string>& names) {
  BoundaryPartition b = none(g);
  const Index n = g.nodes;
  for (const auto& s : names) {
    const bool y_side = s == "bottom" || s == "top";
    if (s != "left" && s != "right" && !y_side) throw DomainError("boundary side '" + s + "' is not one of left/right/bottom/top");
    if (y_side && g.dimension == 1) throw DomainError("boundary side '" + s + "' needs a 2-D grid");
    for (Index k = 0; k < g.node_count(); ++k) {
      const Index i = k % n;
      const Index j = k / n;
      if ((s == "left" && i == 0) || (s == "right" && i == n - 1) || (s == "bottom" && j == 0) ||
          (s == "top" && j == n - 1))
        b.dirichlet[k] = 1;
    }
  }
  return b;
}

std::size_t BoundaryPartition::count() const {
  return static_cast<std::size_t>(std::count(dirichlet.begin(), dirichlet.end(), 1));
}

CoefficientField CoefficientField::constant(const Grid& g, const Matrix& mu) {
  return from_nodes(g, std::vector<Matrix>(g.node_count(), mu));
}

CoefficientField CoefficientField::from_nodes(const Grid& g, std::vector<Matrix> mu) {
  if (static_cast<Index>(mu.size()) != g.node_count()) throw DimensionError("coefficient field: one matrix per node");
  CoefficientField f;
  f.ellipticity = kInf;
  for (const auto& m : mu) {
    if (m.rows() != g.dimension || m.cols() != g.dimension)
      throw DimensionError("coefficient field: matrices must be d x d");
    if (!m.allFinite()) throw DomainError("coefficient field: non-finite entry");
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    f.ellipticity = std::min(f.ellipticity, es.eigenvalues().minCoeff());
    Eigen::JacobiSVD<Matrix> svd(m);
    f.bound = std::max(f.bound, svd.singularValues()(0));
  }
  if (!(f.ellipticity > 0.0))
    throw DomainError("coefficient field is not elliptic: min over cells of xi.mu xi = " + std::to_string(f.ellipticity));
  f.mu = std::move(mu);
  return f;
}

bool CoefficientField::symmetric() const {
  for (const auto& m : mu)
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

EllipticOperator assemble_divergence_form(const Grid& grid, const CoefficientField& mu, const BoundaryPartition& d) {
  const Index N = grid.node_count();
  if (static_cast<Index>(mu.mu.size()) != N) throw DimensionError("assemble: coefficient field does not match grid");
  if (static_cast<Index>(d.dirichlet.size()) != N) throw DimensionError("assemble: boundary partition does not match grid");
  for (Index k = 0; k < N; ++k)
    if (d.dirichlet[k] && !grid.on_boundary(k)) throw DomainError("assemble: Dirichlet node is not on the boundary");

  EllipticOperator op;
  op.grid = grid;
  std::vector<Index> slot(N, -1);
  for (Index k = 0; k < N; ++k) {
    if (d.dirichlet[k]) continue;
    slot[k] = static_cast<Index>(op.unknowns.size());
    op.unknowns.push_back(k);
  }
  const Index n = static_cast<Index>(op.unknowns.size());
  if (n == 0) throw DomainError("assemble: every node is Dirichlet, no unknowns left");
  const double h = grid.h;
  const double vol = grid.cell_volume();
  const Index nx = grid.nodes;

  Matrix S = Matrix::Zero(n, n);
  std::vector<std::pair<Index, Index>> edges;  // (a, b) grid nodes, b = a + e_axis
  std::vector<int> axis_of;
  for (Index k = 0; k < N; ++k) {
    const Index i = k % nx;
    const Index j = k / nx;
    if (i + 1 < nx) {
      edges.push_back({k, k + 1});
      axis_of.push_back(0);
    }
    if (grid.dimension == 2 && j + 1 < nx) {
      edges.push_back({k, k + nx});
      axis_of.push_back(1);
    }
  }
  std::vector<std::pair<Index, Index>> kept;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    const int ax = axis_of[e];
    const double m = harmonic(mu.mu[a](ax, ax), mu.mu[b](ax, ax));
    const double c = vol * m / (h * h);
    const Index sa = slot[a];
    const Index sb = slot[b];
    if (sa >= 0) S(sa, sa) += c;
    if (sb >= 0) S(sb, sb) += c;
    if (sa >= 0 && sb >= 0) {
      S(sa, sb) -= c;
      S(sb, sa) -= c;
    }
    if (sa >= 0 || sb >= 0) kept.push_back(edges[e]);
  }

  bool off_diagonal = false;
  if (grid.dimension == 2)
    for (const auto& m : mu.mu)
      if (m(0, 1) != 0.0 || m(1, 0) != 0.0) off_diagonal = true;
  if (off_diagonal) {
    // Mixed terms on each quad from averaged difference quotients.
    for (Index j = 0; j + 1 < nx; ++j) {
      for (Index i = 0; i + 1 < nx; ++i) {
        const std::array<Index, 4> c{i + nx * j, i + 1 + nx * j, i + nx * (j + 1), i + 1 + nx * (j + 1)};
        double mxy = 0.0;
        double myx = 0.0;
        for (Index k : c) {
          mxy += 0.25 * mu.mu[k](0, 1);
          myx += 0.25 * mu.mu[k](1, 0);
        }
        // dx = (-u0 + u1 - u2 + u3) / 2h, dy = (-u0 - u1 + u2 + u3) / 2h
        const std::array<double, 4> gx{-0.5 / h, 0.5 / h, -0.5 / h, 0.5 / h};
        const std::array<double, 4> gy{-0.5 / h, -0.5 / h, 0.5 / h, 0.5 / h};
        for (int r = 0; r < 4; ++r) {
          const Index sr = slot[c[r]];
          if (sr < 0) continue;
          for (int s = 0; s < 4; ++s) {
            const Index ss = slot[c[s]];
            if (ss < 0) continue;
            // t[u, v] = int mu grad u . grad v: row index belongs to v, column to u.
            S(sr, ss) += vol * (mxy * gy[s] * gx[r] + myx * gx[s] * gy[r]);
          }
        }
      }
    }
    const Matrix sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -1e-12 * es.eigenvalues().cwiseAbs().maxCoeff())
      throw DomainError("assemble: mixed-term discretisation is not positive semidefinite for this coefficient field "
                        "(min eigenvalue " + std::to_string(lo) + ")");
  }

  op.form = S;
  op.a = S / vol;
  op.weights = Vector::Constant(n, vol);
  op.gradient = Matrix::Zero(static_cast<Index>(kept.size()), n);
  for (std::size_t e = 0; e < kept.size(); ++e) {
    const auto [a, b] = kept[e];
    if (slot[a] >= 0) op.gradient(static_cast<Index>(e), slot[a]) = -1.0 / h;
    if (slot[b] >= 0) op.gradient(static_cast<Index>(e), slot[b]) = 1.0 / h;
  }
  op.edge_weights = Vector::Constant(static_cast<Index>(kept.size()), vol);
  return op;
}

SobolevPair discrete_sobolev_space(const EllipticOperator& op, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw DomainError("discrete_sobolev_space: p must lie in (1, inf); the dual construction needs reflexivity");
  SobolevPair out;
  out.w1p = NormedSpace::sobolev(op.weights, op.gradient, op.edge_weights, p);
  out.dual = NormedSpace::dual_of(out.w1p, op.weights);
  return out;
}

std::vector<GeneratorRealization> lp_scale_family(const EllipticOperator& op, const std::vector<double>& ps) {
  std::vector<GeneratorRealization> out;
  for (double p : ps) {
    char label[32];
    std::snprintf(label, sizeof label, "L^%g", p);
    out.push_back({op.a, NormedSpace::weighted_lp(op.weights, p), 0.0, label});
  }
  out.push_back({op.a, discrete_sobolev_space(op, 2.0).dual, 0.0, "W^{-1,2}_D"});
  return out;
}

GaussianFit gaussian_bound_fit(const EllipticOperator& op, const GaussianFitOptions& options) {
  if (options.times.empty()) throw DomainError("gaussian_bound_fit: empty time grid");
  if (!(options.quantile > 0.0 && options.quantile <= 1.0)) throw DomainError("gaussian_bound_fit: quantile must lie in (0, 1]");
  const Matrix& A = op.a;
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(A.cwiseAbs().maxCoeff(), 1.0))
    throw DomainError("gaussian_bound_fit: needs a symmetric generator");
  GaussianFit fit;
  fit.c_grid = options.c_grid;
  if (fit.c_grid.empty())
    for (double c = 0.5; c <= 3.0 + 1e-12; c += 0.25) fit.c_grid.push_back(c);

  const int d = op.grid.dimension;
  const Index n = op.size();
  const double vol = op.grid.cell_volume();
  std::vector<Vector> pos;
  Vector centre = Vector::Zero(d);
  for (Index k : op.unknowns) {
    pos.push_back(op.grid.position(k));
    centre += pos.back();
  }
  centre /= static_cast<double>(n);
  Index mid = 0;
  for (Index k = 1; k < n; ++k)
    if ((pos[k] - centre).norm() < (pos[mid] - centre).norm()) mid = k;

  // Per c: log of the bound's required C, collected over all admissible entries.
  const std::size_t nc = fit.c_grid.size();
  std::vector<std::vector<double>> logs(nc);
  std::vector<double> diag_t;
  std::vector<double> diag_k;
  std::vector<std::pair<double, double>> kept;  // (log K + d/2 log t, r^2 / (4 t))
  for (double t : options.times) {
    if (!(t > 0.0)) throw DomainError("gaussian_bound_fit: times must be positive");
    // Scaling and squaring keeps small kernel entries accurate in the relative
    // sense; a spectral decomposition would bury them under absolute rounding.
    const Matrix K = semigroup_matrix(A, t) / vol;
    diag_t.push_back(t);
    diag_k.push_back(K(mid, mid));
    const double lt = 0.5 * d * std::log(t);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double k = K(i, j);
        if (k < 0.0 && k < -options.clip) ++fit.negative;
        if (!(k > options.clip)) {
          ++fit.clipped;
          continue;
        }
        const double r2 = (pos[i] - pos[j]).squaredNorm();
        kept.push_back({std::log(k) + lt, r2 / (4.0 * t)});
      }
    }
  }
  for (std::size_t ci = 0; ci < nc; ++ci) {
    const double c = fit.c_grid[ci];
    std::vector<double> v;
    v.reserve(kept.size());
    for (const auto& [a, b] : kept) v.push_back(a + b / c);
    double value;
    if (options.quantile >= 1.0) {
      value = *std::max_element(v.begin(), v.end());
    } else {
      const auto idx = static_cast<std::size_t>(std::ceil(options.quantile * static_cast<double>(v.size()))) - 1;
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
      value = v[idx];
    }
    fit.C_per_c.push_back(std::exp(value));
  }
  const double cmin = *std::min_element(fit.C_per_c.begin(), fit.C_per_c.end());
  for (std::size_t ci = 0; ci < nc; ++ci) {
    if (fit.C_per_c[ci] <= cmin * (1.0 + 1e-12)) {
      fit.C = fit.C_per_c[ci];
      fit.c = fit.c_grid[ci];
      break;
    }
  }
  const double logC = std::log(fit.C);
  for (const auto& [a, b] : kept)
    if (a + b / fit.c >= logC + std::log1p(-1e-3)) ++fit.near_violations;

  // Least-squares slope of log K_t(x, x) against log t.
  const std::size_t m = diag_t.size();
  if (m >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double x = std::log(diag_t[k]);
      const double y = std::log(diag_k[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.diagonal_exponent = -slope;
  }
  return fit;
}

}  // namespace cosi
