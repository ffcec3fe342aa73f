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
#include "cosi/spaces.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cosi {

namespace {

void require_positive_weights(const Vector& w, const char* what) {
  for (Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw DomainError(std::string(what) + ": weights must be positive and finite");
}

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0)) throw DomainError(std::string(what) + ": exponent p must satisfy p >= 1");
}

Vector row_scale(const Vector& w, double p) {
  if (!std::isfinite(p)) return Vector::Ones(w.size());
  return w.array().pow(1.0 / p).matrix();
}

// Appends the blocks of `prog`, whose argument is L * v and whose auxiliary
// variables sit at columns [aux_off, aux_off + prog.aux) of v.
void embed(const NormProgram& prog, const Matrix& L, Index aux_off, Index vars, std::vector<convex::Block>& out) {
  for (const auto& b : prog.blocks) {
    Matrix m = Matrix::Zero(b.map.rows(), vars);
    m.noalias() = b.map.leftCols(prog.dim) * L;
    if (prog.aux > 0) m.middleCols(aux_off, prog.aux) += b.map.rightCols(prog.aux);
    out.push_back({std::move(m), b.p});
  }
}

NormEstimate evaluate(const NormProgram& prog, const Vector& x, const std::vector<Vector>& starts) {
  NormEstimate est;
  if (prog.aux == 0) {
    double s = 0.0;
    for (const auto& b : prog.blocks) s += convex::plain_norm(b.map * x, b.p);
    est.value = est.lower = est.upper = s;
    return est;
  }
  std::vector<convex::Block> blocks;
  convex::Problem pb;
  for (const auto& b : prog.blocks) {
    blocks.push_back({b.map.rightCols(prog.aux), b.p});
    pb.offsets.push_back(b.map.leftCols(prog.dim) * x);
    pb.scales.push_back(1.0);
  }
  pb.structure = std::make_shared<convex::Structure>(prog.aux, std::move(blocks));
  const auto res = convex::minimize(pb, starts);
  est.value = est.upper = res.value;
  est.lower = res.lower_bound;
  est.certified = res.certified;
  return est;
}

}  // namespace

DiscreteMeasureSpace::DiscreteMeasureSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw DimensionError("DiscreteMeasureSpace: need at least one atom");
  require_positive_weights(weights_, "DiscreteMeasureSpace");
}

DiscreteMeasureSpace DiscreteMeasureSpace::uniform(Index n, double mass) {
  return DiscreteMeasureSpace(Vector::Constant(n, mass));
}

double lp_norm(const Vector& v, double p, const Vector& w) {
  require_same_size(v.size(), w.size(), "lp_norm");
  require_exponent(p, "lp_norm");
  if (!std::isfinite(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  require_positive_weights(w, "lp_norm");
  if (v.size() == 0) return 0.0;
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  if (p == 1.0) return w.dot(v.cwiseAbs());
  return m * std::pow((w.array() * (v.cwiseAbs().array() / m).pow(p)).sum(), 1.0 / p);
}

const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::WeightedLp: return "lp";
    case SpaceKind::Sobolev: return "sobolev";
    case SpaceKind::Dual: return "dual";
    case SpaceKind::Sum: return "sum";
    case SpaceKind::Intersection: return "intersection";
    case SpaceKind::Graph: return "graph";
  }
  return "?";
}

SpacePtr NormedSpace::weighted_lp(Vector weights, double p) {
  require_exponent(p, "weighted_lp");
  if (weights.size() < 1) throw DimensionError("weighted_lp: empty weight vector");
  require_positive_weights(weights, "weighted_lp");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::WeightedLp;
  s->dim_ = weights.size();
  s->p_ = p;
  s->weights_ = std::move(weights);
  return s;
}

SpacePtr NormedSpace::sobolev(Vector weights, Matrix gradient, Vector edge_weights, double p) {
  require_exponent(p, "sobolev");
  if (weights.size() < 1) throw DimensionError("sobolev: empty weight vector");
  require_positive_weights(weights, "sobolev");
  require_positive_weights(edge_weights, "sobolev edges");
  require_same_size(gradient.cols(), weights.size(), "sobolev gradient columns");
  require_same_size(gradient.rows(), edge_weights.size(), "sobolev gradient rows");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::Sobolev;
  s->dim_ = weights.size();
  s->p_ = p;
  s->weights_ = std::move(weights);
  s->matrix_ = std::move(gradient);
  s->edge_weights_ = std::move(edge_weights);
  return s;
}

SpacePtr NormedSpace::dual_of(SpacePtr space, Vector pairing) {
  require_same_size(pairing.size(), space->dim(), "dual_of pairing");
  require_positive_weights(pairing, "dual_of pairing");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::Dual;
  s->dim_ = space->dim();
  s->p_ = std::numeric_limits<double>::quiet_NaN();
  s->weights_ = std::move(pairing);
  s->a_ = std::move(space);
  return s;
}

SpacePtr NormedSpace::sum(SpacePtr x0, SpacePtr x1) {
  require_same_size(x0->dim(), x1->dim(), "sum space");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::Sum;
  s->dim_ = x0->dim();
  s->p_ = std::numeric_limits<double>::quiet_NaN();
  s->a_ = std::move(x0);
  s->b_ = std::move(x1);
  return s;
}

SpacePtr NormedSpace::intersection(SpacePtr x0, SpacePtr x1) {
  require_same_size(x0->dim(), x1->dim(), "intersection space");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::Intersection;
  s->dim_ = x0->dim();
  s->p_ = std::numeric_limits<double>::quiet_NaN();
  s->a_ = std::move(x0);
  s->b_ = std::move(x1);
  return s;
}

SpacePtr NormedSpace::graph(Matrix a, SpacePtr space) {
  if (a.rows() != a.cols()) throw DimensionError("graph: operator must be square");
  require_same_size(a.rows(), space->dim(), "graph operator");
  auto s = std::shared_ptr<NormedSpace>(new NormedSpace());
  s->kind_ = SpaceKind::Graph;
  s->dim_ = space->dim();
  s->p_ = std::numeric_limits<double>::quiet_NaN();
  s->matrix_ = std::move(a);
  s->a_ = std::move(space);
  return s;
}

bool NormedSpace::dense_endpoint() const {
  switch (kind_) {
    case SpaceKind::WeightedLp:
    case SpaceKind::Sobolev: return std::isfinite(p_);
    case SpaceKind::Dual: return !(a_->kind() == SpaceKind::WeightedLp && a_->exponent() == 1.0);
    case SpaceKind::Graph: return a_->dense_endpoint();
    case SpaceKind::Sum:
    case SpaceKind::Intersection: return a_->dense_endpoint() && b_->dense_endpoint();
  }
  return true;
}

bool NormedSpace::has_program() const {
  switch (kind_) {
    case SpaceKind::WeightedLp:
    case SpaceKind::Sobolev: return true;
    case SpaceKind::Dual: return false;
    case SpaceKind::Graph: return a_->has_program();
    case SpaceKind::Sum:
    case SpaceKind::Intersection: return a_->has_program() && b_->has_program();
  }
  return false;
}

NormProgram NormedSpace::program() const {
  NormProgram prog;
  prog.dim = dim_;
  const Index n = dim_;
  switch (kind_) {
    case SpaceKind::WeightedLp:
      prog.blocks.push_back({Matrix(row_scale(weights_, p_).asDiagonal()), p_});
      return prog;
    case SpaceKind::Sobolev: {
      Matrix m(n + matrix_.rows(), n);
      m.topRows(n) = row_scale(weights_, p_).asDiagonal();
      m.bottomRows(matrix_.rows()) = row_scale(edge_weights_, p_).asDiagonal() * matrix_;
      prog.blocks.push_back({std::move(m), p_});
      return prog;
    }
    case SpaceKind::Dual:
      throw DomainError("dual spaces have no finite norm program; evaluate them through dual_norm");
    case SpaceKind::Graph:
    case SpaceKind::Intersection: {
      const NormProgram p0 = a_->program();
      const NormProgram p1 = (kind_ == SpaceKind::Graph ? a_ : b_)->program();
      prog.aux = p0.aux + p1.aux;
      const Index vars = n + prog.aux;
      Matrix L0 = Matrix::Zero(n, vars);
      L0.leftCols(n).setIdentity();
      Matrix L1 = L0;
      if (kind_ == SpaceKind::Graph) L1.leftCols(n) = matrix_;
      embed(p0, L0, n, vars, prog.blocks);
      embed(p1, L1, n + p0.aux, vars, prog.blocks);
      return prog;
    }
    case SpaceKind::Sum: {
      const NormProgram p0 = a_->program();
      const NormProgram p1 = b_->program();
      prog.aux = n + p0.aux + p1.aux;
      const Index vars = n + prog.aux;
      Matrix L0 = Matrix::Zero(n, vars);
      L0.middleCols(n, n).setIdentity();
      Matrix L1 = Matrix::Zero(n, vars);
      L1.leftCols(n).setIdentity();
      L1.middleCols(n, n) = -Matrix::Identity(n, n);
      embed(p0, L0, 2 * n, vars, prog.blocks);
      embed(p1, L1, 2 * n + p0.aux, vars, prog.blocks);
      return prog;
    }
  }
  return prog;
}

NormEstimate NormedSpace::norm_estimate(const Vector& x) const {
  require_same_size(x.size(), dim_, "norm");
  NormEstimate est;
  switch (kind_) {
    case SpaceKind::WeightedLp:
      est.value = est.lower = est.upper = lp_norm(x, p_, weights_);
      return est;
    case SpaceKind::Sobolev: {
      const NormProgram prog = program();
      return evaluate(prog, x, {});
    }
    case SpaceKind::Dual: {
      const DualNormResult d = dual_norm(x, *a_, weights_);
      est.value = est.lower = d.value;
      est.upper = d.upper;
      est.certified = d.certified;
      return est;
    }
    case SpaceKind::Graph:
    case SpaceKind::Intersection: {
      const NormEstimate e0 = a_->norm_estimate(x);
      const NormEstimate e1 = kind_ == SpaceKind::Graph ? a_->norm_estimate(matrix_ * x) : b_->norm_estimate(x);
      est.value = e0.value + e1.value;
      est.lower = e0.lower + e1.lower;
      est.upper = e0.upper + e1.upper;
      est.certified = e0.certified && e1.certified;
      return est;
    }
    case SpaceKind::Sum: {
      if (!has_program()) throw DomainError("sum norm: both summands need a norm program");
      const NormProgram prog = program();
      Vector all_in_first = Vector::Zero(prog.aux);
      all_in_first.head(dim_) = x;
      return evaluate(prog, x, {Vector::Zero(prog.aux), all_in_first});
    }
  }
  return est;
}

std::string NormedSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::WeightedLp: os << "lp(p=" << p_ << ",n=" << dim_ << ")"; break;
    case SpaceKind::Sobolev: os << "sobolev(p=" << p_ << ",n=" << dim_ << ")"; break;
    case SpaceKind::Dual: os << "dual(" << a_->describe() << ")"; break;
    case SpaceKind::Sum: os << "sum(" << a_->describe() << "," << b_->describe() << ")"; break;
    case SpaceKind::Intersection: os << "intersection(" << a_->describe() << "," << b_->describe() << ")"; break;
    case SpaceKind::Graph: os << "graph(" << a_->describe() << ")"; break;
  }
  return os.str();
}

InterpolationCouple::InterpolationCouple(SpacePtr a, SpacePtr b) : x0(std::move(a)), x1(std::move(b)) {
  if (!x0 || !x1) throw Error("InterpolationCouple: null space");
  require_same_size(x0->dim(), x1->dim(), "InterpolationCouple");
}

DualNormResult dual_norm(const Vector& f, const NormedSpace& space, const Vector& pairing,
                         const DualNormOptions& options) {
  const Index n = space.dim();
  require_same_size(f.size(), n, "dual_norm functional");
  require_same_size(pairing.size(), n, "dual_norm pairing");
  require_positive_weights(pairing, "dual_norm pairing");
  DualNormResult out;
  const Vector g = pairing.cwiseProduct(f);
  if (g.cwiseAbs().maxCoeff() == 0.0) {
    out.method = "zero";
    return out;
  }
  if (!options.force_optimization) {
    if (space.kind() == SpaceKind::WeightedLp) {
      const double p = space.exponent();
      out.method = "holder";
      if (!std::isfinite(p)) {
        out.value = g.cwiseAbs().sum();
      } else {
        const Vector h = g.cwiseQuotient(space.weights());
        out.value = lp_norm(h, convex::dual_exponent(p), space.weights());
      }
      out.upper = out.value;
      return out;
    }
    if (space.kind() == SpaceKind::Dual) {
      if ((space.pairing() - pairing).cwiseAbs().maxCoeff() > 0.0)
        throw DomainError("dual_norm: bidual with a pairing different from the inner dual");
      const NormEstimate e = space.first()->norm_estimate(f);
      out.value = e.value;
      out.upper = e.upper;
      out.certified = e.certified;
      out.method = "bidual";
      return out;
    }
  }
  if (!space.has_program()) throw DomainError("dual_norm: " + space.describe() + " has no norm program");

  // 1 / min { N(x) : <g, x> = 1 }, with x = g/|g|^2 + Z z and Z spanning g's complement.
  const NormProgram prog = space.program();
  out.method = "optimization";
  const Vector xp = g / g.squaredNorm();
  Eigen::HouseholderQR<Matrix> qr{Matrix(g)};
  const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix Z = Q.rightCols(n - 1);
  const Index vars = (n - 1) + prog.aux;
  if (vars == 0) {
    double s = 0.0;
    for (const auto& b : prog.blocks) s += convex::plain_norm(b.map * xp, b.p);
    out.value = out.upper = 1.0 / s;
    return out;
  }
  std::vector<convex::Block> blocks;
  convex::Problem pb;
  for (const auto& b : prog.blocks) {
    Matrix m(b.map.rows(), vars);
    m.leftCols(n - 1) = b.map.leftCols(n) * Z;
    if (prog.aux > 0) m.rightCols(prog.aux) = b.map.rightCols(prog.aux);
    blocks.push_back({std::move(m), b.p});
    pb.offsets.push_back(b.map.leftCols(n) * xp);
    pb.scales.push_back(1.0);
  }
  pb.structure = std::make_shared<convex::Structure>(vars, std::move(blocks));
  const std::vector<Vector> starts{Vector::Zero(vars)};
  const auto res = convex::minimize(pb, starts, options.solver);
  out.value = 1.0 / res.value;
  out.upper = res.lower_bound > 0.0 ? 1.0 / res.lower_bound : kInf;
  out.certified = res.certified;
  return out;
}

NormEstimate sum_norm(const Vector& x, const InterpolationCouple& couple) {
  return NormedSpace::sum(couple.x0, couple.x1)->norm_estimate(x);
}

double intersection_norm(const Vector& x, const InterpolationCouple& couple) {
  return couple.x0->norm(x) + couple.x1->norm(x);
}

double graph_norm(const Vector& x, const Matrix& a, const NormedSpace& space) {
  if (a.rows() != a.cols()) throw DimensionError("graph_norm: operator must be square");
  require_same_size(a.cols(), x.size(), "graph_norm operator");
  return space.norm(x) + space.norm(a * x);
}

CheckReport dual_sum_identity_check(const InterpolationCouple& couple, const Vector& pairing,
                                    const std::vector<Vector>& samples, double tol,
                                    const DualNormOptions& options) {
  CheckReport rep("dual_sum_identity", "dual_sum_identity");
  const SpacePtr sum = NormedSpace::sum(couple.x0, couple.x1);
  double worst = 0.0;
  double worst_bracket = 0.0;
  std::size_t uncertified = 0;
  for (const auto& f : samples) {
    const DualNormResult lhs = dual_norm(f, *sum, pairing, options);
    const DualNormResult d0 = dual_norm(f, *couple.x0, pairing, options);
    const DualNormResult d1 = dual_norm(f, *couple.x1, pairing, options);
    if (!lhs.certified || !d0.certified || !d1.certified) ++uncertified;
    const double rhs = std::max(d0.value, d1.value);
    worst = std::max(worst, std::abs(lhs.value - rhs));
    if (std::isfinite(lhs.upper)) worst_bracket = std::max(worst_bracket, lhs.upper - lhs.value);
  }
  rep.record("samples", static_cast<double>(samples.size()));
  rep.record("dual_bracket_width", worst_bracket);
  rep.expect_le("max_deviation", worst, 0.0, tol);
  if (uncertified > 0)
    rep.inconclusive(std::to_string(uncertified) + " dual-norm evaluations were not certified by a duality gap");
  return rep;
}

}  // namespace cosi
