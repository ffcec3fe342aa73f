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
#ifndef COSI_ELLIPTIC_HPP
#define COSI_ELLIPTIC_HPP

// Divergence-form operators -div(mu grad u) on 1-D and 2-D vertex grids with
// Dirichlet conditions on a chosen set of boundary nodes and natural
// (Neumann) conditions elsewhere.

#include "cosi/semigroup.hpp"
#include "cosi/spaces.hpp"
#include "cosi/types.hpp"

#include <string>
#include <vector>

namespace cosi {

/// `nodes` points per axis, boundary included. Each node owns a cell of
/// volume h^d; the box is the union of the cells.
struct Grid {
  Grid(int dimension, int nodes, double h);

  int dimension;
  int nodes;
  double h;

  Index node_count() const;
  double cell_volume() const;
  /// Cell centre (= node position) of a node.
  Vector position(Index node) const;
  bool on_boundary(Index node) const;
  double box_volume() const { return static_cast<double>(node_count()) * cell_volume(); }
};

struct BoundaryPartition {
  std::vector<char> dirichlet;  ///< per grid node

  static BoundaryPartition none(const Grid& g);
  static BoundaryPartition all(const Grid& g);
  /// Sides by name: "left", "right" (x axis), "bottom", "top" (y axis).
  static BoundaryPartition sides(const Grid& g, const std::vector<std::string>& names);
  std::size_t count() const;
};

struct CoefficientField {
  std::vector<Matrix> mu;  ///< per grid node, d x d
  double ellipticity = 0.0;
  double bound = 0.0;

  static CoefficientField constant(const Grid& g, const Matrix& mu);
  static CoefficientField from_nodes(const Grid& g, std::vector<Matrix> mu);
  bool symmetric() const;
};

struct EllipticOperator {
  Grid grid{1, 2, 1.0};
  std::vector<Index> unknowns;  ///< grid node of each unknown
  Matrix a;                     ///< generator matrix, A = M^{-1} S
  Matrix form;                  ///< S, with t[u, v] = u^T S v
  Matrix gradient;              ///< difference quotients, one row per edge
  Vector edge_weights;          ///< h^d per edge
  Vector weights;               ///< cell volumes of the unknowns

  Index size() const { return a.rows(); }
  double form_value(const Vector& u, const Vector& v) const { return u.dot(form * v); }
};

EllipticOperator assemble_divergence_form(const Grid& grid, const CoefficientField& mu, const BoundaryPartition& d);

struct SobolevPair {
  SpacePtr w1p;   ///< W^{1,p}_D
  SpacePtr dual;  ///< W^{-1,p'}_D under the L^2 pairing
};

SobolevPair discrete_sobolev_space(const EllipticOperator& op, double p);

/// One realization per p on L^p(cell volumes), plus one on W^{-1,2}_D.
std::vector<GeneratorRealization> lp_scale_family(const EllipticOperator& op, const std::vector<double>& ps);

struct GaussianFitOptions {
  std::vector<double> times;
  std::vector<double> c_grid;  ///< empty selects {0.5, 0.75, ..., 3}
  double quantile = 1.0;       ///< fraction of entries that must satisfy the bound
  double clip = 1e-30;
};

struct GaussianFit {
  double C = 0.0;
  double c = 0.0;
  std::vector<double> c_grid;
  std::vector<double> C_per_c;
  double diagonal_exponent = 0.0;  ///< -slope of log K_t(x, x) against log t at the centre
  std::size_t clipped = 0;
  std::size_t negative = 0;
  std::size_t near_violations = 0;  ///< entries within 1e-3 of the fitted bound
};

/// Fits K_t(x, y) <= C t^{-d/2} exp(-|x-y|^2 / (4 c t)), K_t = exp(-tA)_{xy} / h^d.
GaussianFit gaussian_bound_fit(const EllipticOperator& op, const GaussianFitOptions& options);

}  // namespace cosi

#endif  // COSI_ELLIPTIC_HPP
