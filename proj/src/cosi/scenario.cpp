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
#include "cosi/scenario.hpp"

#include "cosi/consistency.hpp"
#include "cosi/semigroup.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

namespace cosi {

namespace {

using Json = nlohmann::json;

std::string where(const std::string& source, const YAML::Mark& m) {
  std::ostringstream os;
  if (!source.empty()) os << source << ": ";
  os << "line " << m.line + 1 << ", column " << m.column + 1;
  return os.str();
}

class Context {
 public:
  explicit Context(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ScenarioError(where(source_, at.Mark()) + ": " + msg);
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    const std::string s = n.Scalar();
    if (s == "inf" || s == ".inf" || s == "Inf" || s == ".Inf" || s == "infinity") return kInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || std::isnan(v)) fail(n, what + " must be a number, got '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(n, what + " must be a number, got '" + s + "'");
    }
  }

  long long integer(const YAML::Node& n, const std::string& what) const {
    const double v = number(n, what);
    if (!(std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15)) fail(n, what + " must be an integer");
    return static_cast<long long>(v);
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& what) const {
    std::vector<double> out;
    if (n.IsMap()) {
      // {from, to, count}: geometric spacing.
      for (const auto& kv : n) {
        const std::string k = kv.first.Scalar();
        if (k != "from" && k != "to" && k != "count") fail(kv.first, what + ": unknown key '" + k + "'");
      }
      if (!n["from"] || !n["to"] || !n["count"]) fail(n, what + ": geometric grid needs from, to and count");
      const double a = number(n["from"], what + ".from");
      const double b = number(n["to"], what + ".to");
      const long long c = integer(n["count"], what + ".count");
      if (!(a > 0.0 && b > 0.0 && c >= 1)) fail(n, what + ": geometric grid needs from > 0, to > 0, count >= 1");
      for (long long k = 0; k < c; ++k)
        out.push_back(c == 1 ? a : a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(c - 1)));
      return out;
    }
    if (!n.IsSequence()) fail(n, what + " must be a list of numbers");
    for (const auto& e : n) out.push_back(number(e, what));
    return out;
  }

  std::vector<int> integers(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list of integers");
    std::vector<int> out;
    for (const auto& e : n) out.push_back(static_cast<int>(integer(e, what)));
    return out;
  }

  Matrix matrix(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a non-empty list of rows");
    const Index rows = static_cast<Index>(n.size());
    Index cols = -1;
    Matrix m;
    for (Index i = 0; i < rows; ++i) {
      const auto row = numbers(n[static_cast<std::size_t>(i)], what + " row");
      if (cols < 0) {
        cols = static_cast<Index>(row.size());
        m.resize(rows, cols);
      }
      if (static_cast<Index>(row.size()) != cols) fail(n[static_cast<std::size_t>(i)], what + ": ragged rows");
      for (Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void check_keys(const Context& ctx, const YAML::Node& n, const std::set<std::string>& allowed, const std::string& what) {
  if (!n.IsMap()) ctx.fail(n, what + " must be a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.Scalar();
    if (!allowed.count(k)) ctx.fail(kv.first, what + ": unknown key '" + k + "'");
  }
}

double exponent(const Context& ctx, const YAML::Node& n, const std::string& what) {
  const double p = ctx.number(n, what);
  if (!(p >= 1.0)) ctx.fail(n, what + " = " + n.Scalar() + " violates the constraint 1 <= p <= inf");
  return p;
}

double theta(const Context& ctx, const YAML::Node& n, const std::string& what) {
  const double t = ctx.number(n, what);
  if (!(t > 0.0 && t < 1.0)) ctx.fail(n, what + " = " + n.Scalar() + " violates the constraint 0 < theta < 1");
  return t;
}

Json to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      Json o = Json::object();
      for (const auto& kv : n) o[kv.first.Scalar()] = to_json(kv.second);
      return o;
    }
    case YAML::NodeType::Sequence: {
      Json a = Json::array();
      for (const auto& e : n) a.push_back(to_json(e));
      return a;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      if (s == "true") return true;
      if (s == "false") return false;
      if (s == "null" || s == "~") return nullptr;
      try {
        std::size_t used = 0;
        const long long i = std::stoll(s, &used);
        if (used == s.size()) return i;
      } catch (const std::logic_error&) {
      }
      try {
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used == s.size() && std::isfinite(d)) return d;
      } catch (const std::logic_error&) {
      }
      return s;
    }
    default:
      return nullptr;
  }
}

Matrix tridiag(Index n, double diag, double off) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = diag;
    if (i > 0) m(i, i - 1) = off;
    if (i + 1 < n) m(i, i + 1) = off;
  }
  return m;
}

EllipticOperator elliptic_from(const Context& ctx, const YAML::Node& n, int dimension, int nodes, double h,
                               const std::string& what) {
  if (dimension != 1 && dimension != 2) ctx.fail(n, what + ": dimension must be 1 or 2");
  if (nodes < 3) ctx.fail(n, what + ": at least 3 nodes per axis are required");
  if (!(h > 0.0)) ctx.fail(n, what + ": h must be positive");
  const Grid grid(dimension, nodes, h);
  Matrix mu = Matrix::Identity(dimension, dimension);
  if (n["mu"]) {
    const auto& m = n["mu"];
    if (m.IsScalar()) mu *= ctx.number(m, what + ".mu");
    else mu = ctx.matrix(m, what + ".mu");
    if (mu.rows() != dimension || mu.cols() != dimension) ctx.fail(m, what + ".mu must be " + std::to_string(dimension) + " x " + std::to_string(dimension));
  }
  BoundaryPartition bd = BoundaryPartition::all(grid);
  if (n["dirichlet"]) {
    const auto& d = n["dirichlet"];
    if (d.IsScalar()) {
      const std::string s = d.Scalar();
      if (s == "all") bd = BoundaryPartition::all(grid);
      else if (s == "none") bd = BoundaryPartition::none(grid);
      else ctx.fail(d, what + ".dirichlet must be all, none or a list of sides");
    } else if (d.IsSequence()) {
      std::vector<std::string> sides;
      for (const auto& e : d) {
        const std::string s = ctx.text(e, what + ".dirichlet");
        if (s != "left" && s != "right" && s != "bottom" && s != "top") ctx.fail(e, what + ": unknown side '" + s + "'");
        if (dimension == 1 && (s == "bottom" || s == "top")) ctx.fail(e, what + ": side '" + s + "' needs dimension 2");
        sides.push_back(s);
      }
      bd = BoundaryPartition::sides(grid, sides);
    } else {
      ctx.fail(d, what + ".dirichlet must be all, none or a list of sides");
    }
  }
  try {
    return assemble_divergence_form(grid, CoefficientField::constant(grid, mu), bd);
  } catch (const Error& e) {
    ctx.fail(n, what + ": " + e.what());
  }
}

std::vector<Vector> random_set(Index n, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = g(rng);
    out.push_back(v);
  }
  return out;
}

std::vector<Vector> basis_set(Index n) {
  std::vector<Vector> out;
  for (Index j = 0; j < n; ++j) out.push_back(Vector::Unit(n, j));
  return out;
}

/// Parameters of one check; every key must be consumed.
class Params {
 public:
  Params(const Context& ctx, const Scenario& sc, const YAML::Node& node, std::string check)
      : ctx_(ctx), sc_(sc), node_(node), check_(std::move(check)) {
    used_ = {"name", "type", "tol"};
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) {
    used_.insert(key);
    const YAML::Node n = node_[key];
    if (!n) ctx_.fail(node_, "check '" + check_ + "' is missing parameter '" + key + "'");
    return n;
  }

  double num(const std::string& key) { return ctx_.number(get(key), label(key)); }
  double num(const std::string& key, double def) { return has(key) ? num(key) : (used_.insert(key), def); }
  int integer(const std::string& key, int def) {
    used_.insert(key);
    if (!has(key)) return def;
    const auto v = ctx_.integer(node_[key], label(key));
    if (v < 1) ctx_.fail(node_[key], label(key) + " must be positive");
    return static_cast<int>(v);
  }
  std::vector<double> nums(const std::string& key) { return ctx_.numbers(get(key), label(key)); }
  std::vector<double> positive_nums(const std::string& key) {
    auto v = nums(key);
    if (v.empty()) ctx_.fail(node_[key], label(key) + " must not be empty");
    for (double x : v)
      if (!(x > 0.0)) ctx_.fail(node_[key], label(key) + " entries must be positive");
    return v;
  }
  std::vector<double> positive_nums(const std::string& key, std::vector<double> def) {
    if (!has(key)) {
      used_.insert(key);
      return def;
    }
    return positive_nums(key);
  }

  const GeneratorDecl& generator(const std::string& key) { return lookup_generator(get(key)); }
  const SpaceDecl& space(const std::string& key) { return lookup_space(get(key)); }
  const FunctorDecl& functor(const std::string& key) {
    const auto n = get(key);
    const std::string id = ctx_.text(n, label(key));
    const auto it = sc_.functors.find(id);
    if (it == sc_.functors.end()) ctx_.fail(n, "check '" + check_ + "' references undeclared functor '" + id + "'");
    return it->second;
  }
  std::pair<const GeneratorDecl*, const GeneratorDecl*> generator_pair(const std::string& key) {
    const auto n = pair_node(key);
    return {&lookup_generator(n[0]), &lookup_generator(n[1])};
  }
  std::pair<const SpaceDecl*, const SpaceDecl*> space_pair(const std::string& key) {
    const auto n = pair_node(key);
    return {&lookup_space(n[0]), &lookup_space(n[1])};
  }
  const EllipticOperator& elliptic(const std::string& key) {
    const auto n = node_[key];
    const auto& g = generator(key);
    if (!g.elliptic) ctx_.fail(n, "check '" + check_ + "': generator '" + g.id + "' is not an elliptic recipe");
    return *g.elliptic;
  }

  Vector pairing(Index n) {
    if (!has("pairing")) {
      used_.insert("pairing");
      return Vector::Ones(n);
    }
    const auto v = positive_nums("pairing");
    if (static_cast<Index>(v.size()) != n) ctx_.fail(node_["pairing"], label("pairing") + " has the wrong length");
    return Eigen::Map<const Vector>(v.data(), n);
  }

  void require_dims(Index a, Index b, const std::string& what) {
    if (a != b)
      ctx_.fail(node_, "check '" + check_ + "': " + what + " dimensions differ (" + std::to_string(a) + " vs " +
                           std::to_string(b) + ")");
  }

  [[noreturn]] void fail(const std::string& msg) const { ctx_.fail(node_, "check '" + check_ + "': " + msg); }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.Scalar();
      if (!used_.count(k)) ctx_.fail(kv.first, "check '" + check_ + "': unknown parameter '" + k + "'");
    }
  }

  const Scenario& scenario() const { return sc_; }

 private:
  std::string label(const std::string& key) const { return "check '" + check_ + "' parameter " + key; }

  YAML::Node pair_node(const std::string& key) {
    const auto n = get(key);
    if (!n.IsSequence() || n.size() != 2) ctx_.fail(n, label(key) + " must list exactly two ids");
    return n;
  }

  const GeneratorDecl& lookup_generator(const YAML::Node& n) {
    const std::string id = ctx_.text(n, "generator id");
    const auto it = sc_.generators.find(id);
    if (it == sc_.generators.end()) ctx_.fail(n, "check '" + check_ + "' references undeclared generator '" + id + "'");
    return it->second;
  }

  const SpaceDecl& lookup_space(const YAML::Node& n) {
    const std::string id = ctx_.text(n, "space id");
    const auto it = sc_.spaces.find(id);
    if (it == sc_.spaces.end()) ctx_.fail(n, "check '" + check_ + "' references undeclared space '" + id + "'");
    return it->second;
  }

  const Context& ctx_;
  const Scenario& sc_;
  YAML::Node node_;
  std::string check_;
  std::set<std::string> used_;
};

GeneratorRealization realization(const GeneratorDecl& g, const SpaceDecl& s, Params& p) {
  p.require_dims(g.a.rows(), s.space->dim(), "generator '" + g.id + "' and space '" + s.id + "'");
  GeneratorRealization r;
  r.a = g.a;
  r.space = s.space;
  r.label = g.id + "@" + s.id;
  return r;
}

std::pair<GeneratorRealization, GeneratorRealization> realization_pair(Params& p) {
  const auto [g0, g1] = p.generator_pair("generators");
  const auto [s0, s1] = p.space_pair("spaces");
  return {realization(*g0, *s0, p), realization(*g1, *s1, p)};
}

using Builder = std::function<CheckRunner(Params&, double tol)>;

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table = {
      {"semigroup_law",
       [](Params& p, double tol) -> CheckRunner {
         const auto r = realization(p.generator("generator"), p.space("space"), p);
         const auto times = p.positive_nums("times");
         const int samples = p.integer("samples", 4);
         return [=](std::uint64_t seed) { return semigroup_law_check(r, times, samples, tol, seed); };
       }},
      {"euler_convergence",
       [](Params& p, double tol) -> CheckRunner {
         const Matrix a = p.generator("generator").a;
         const double t = p.num("t", 1.0);
         if (!(t > 0.0)) p.fail("t must be positive");
         std::vector<int> ns;
         for (double v : p.positive_nums("ns")) ns.push_back(static_cast<int>(v));
         const int samples = p.integer("samples", 4);
         return [=](std::uint64_t seed) { return euler_convergence_check(a, t, ns, samples, tol, seed); };
       }},
      {"generator_residual",
       [](Params& p, double tol) -> CheckRunner {
         const auto r = realization(p.generator("generator"), p.space("space"), p);
         const auto hs = p.positive_nums("hs");
         const int samples = p.integer("samples", 4);
         return [=](std::uint64_t seed) { return generator_residual_check(r, hs, samples, tol, seed); };
       }},
      {"semigroup_bound",
       [](Params& p, double tol) -> CheckRunner {
         const auto r = realization(p.generator("generator"), p.space("space"), p);
         const auto times = p.positive_nums("times");
         const double bound = p.num("bound");
         return [=](std::uint64_t seed) { return semigroup_bound_check(r, times, bound, tol, seed); };
       }},
      {"operator_consistency",
       [](Params& p, double tol) -> CheckRunner {
         const auto [g0, g1] = p.generator_pair("generators");
         const auto [s0, s1] = p.space_pair("spaces");
         p.require_dims(g0->a.rows(), g1->a.rows(), "operator");
         p.require_dims(g0->a.rows(), s0->space->dim(), "operator and space");
         p.require_dims(s0->space->dim(), s1->space->dim(), "space");
         const Matrix t0 = g0->a, t1 = g1->a;
         const InterpolationCouple couple(s0->space, s1->space);
         const int dense = p.integer("dense_samples", 0);
         return [=](std::uint64_t seed) {
           std::mt19937_64 rng(seed);
           const auto set = dense > 0 ? random_set(t0.rows(), dense, rng) : basis_set(t0.rows());
           auto rep = check_operator_consistency(t0, t1, couple, set, tol);
           rep.set_seed(seed);
           return rep;
         };
       }},
      {"resolvent_semigroup_equivalence",
       [](Params& p, double tol) -> CheckRunner {
         const auto rs = realization_pair(p);
         EquivalenceOptions o;
         o.lambdas = p.positive_nums("lambdas");
         o.times = p.positive_nums("times");
         o.n_euler = p.integer("n_euler", 4096);
         o.samples = p.integer("samples", 4);
         o.laplace.steps = p.integer("steps", o.laplace.steps);
         o.laplace.growth_bound = p.num("growth_bound", 1.0);
         return [=](std::uint64_t seed) { return resolvent_semigroup_equivalence(rs.first, rs.second, o, tol, seed); };
       }},
      {"generator_domain_core",
       [](Params& p, double tol) -> CheckRunner {
         const auto rs = realization_pair(p);
         return [=](std::uint64_t seed) { return generator_domain_core_check(rs.first, rs.second, tol, seed); };
       }},
      {"adjoint_consistency",
       [](Params& p, double tol) -> CheckRunner {
         const auto [g0, g1] = p.generator_pair("operators");
         const auto [a0, a1] = p.space_pair("source");
         const auto [b0, b1] = p.space_pair("target");
         p.require_dims(g0->a.rows(), g1->a.rows(), "operator");
         p.require_dims(g0->a.cols(), a0->space->dim(), "operator and source");
         p.require_dims(g0->a.rows(), b0->space->dim(), "operator and target");
         p.require_dims(a0->space->dim(), a1->space->dim(), "source");
         p.require_dims(b0->space->dim(), b1->space->dim(), "target");
         p.require_dims(a0->space->dim(), b0->space->dim(), "source and target");
         const Matrix t0 = g0->a, t1 = g1->a;
         const InterpolationCouple src(a0->space, a1->space), dst(b0->space, b1->space);
         const Vector pairing = p.pairing(t0.rows());
         const int functionals = p.integer("functionals", 8);
         const int dense = p.integer("dense_samples", 0);
         return [=](std::uint64_t seed) {
           std::mt19937_64 rng(seed);
           const auto set = dense > 0 ? random_set(t0.cols(), dense, rng) : basis_set(t0.cols());
           const auto fs = random_set(t0.rows(), functionals, rng);
           auto rep = adjoint_consistency_check(t0, t1, src, dst, pairing, set, fs, tol);
           rep.set_seed(seed);
           return rep;
         };
       }},
      {"dual_sum_identity",
       [](Params& p, double tol) -> CheckRunner {
         const auto [s0, s1] = p.space_pair("spaces");
         p.require_dims(s0->space->dim(), s1->space->dim(), "space");
         const InterpolationCouple couple(s0->space, s1->space);
         const Vector pairing = p.pairing(couple.dim());
         const int samples = p.integer("samples", 100);
         return [=](std::uint64_t seed) {
           std::mt19937_64 rng(seed);
           auto rep = dual_sum_identity_check(couple, pairing, random_set(couple.dim(), samples, rng), tol);
           rep.set_seed(seed);
           return rep;
         };
       }},
      {"interpolated_semigroup",
       [](Params& p, double tol) -> CheckRunner {
         const auto rs = realization_pair(p);
         const auto f = p.functor("functor").functor;
         InterpolatedSemigroupOptions o;
         o.times = p.positive_nums("times");
         o.continuity = p.positive_nums("continuity", {});
         o.samples = p.integer("samples", o.samples);
         o.ascent_starts = p.integer("ascent_starts", o.ascent_starts);
         o.ascent_refine = p.integer("ascent_refine", o.ascent_refine);
         return [=](std::uint64_t seed) { return interpolated_semigroup_check(rs.first, rs.second, f, o, tol, seed); };
       }},
      {"generator_interpolation",
       [](Params& p, double tol) -> CheckRunner {
         if (!p.scenario().ladder) p.fail("generator_interpolation needs a ladder section");
         const auto f = p.functor("functor").functor;
         const double p0 = p.num("p0");
         const double p1 = p.num("p1");
         if (!(p0 >= 1.0) || !(p1 >= 1.0)) p.fail("p0 and p1 violate the constraint 1 <= p <= inf");
         const int samples = p.integer("samples", 40);
         const int coarse = p.integer("coarse", 16);
         GeneratorInterpolationOptions o;
         o.bracket_factor = p.num("bracket_factor", o.bracket_factor);
         o.rho_low = p.num("rho_low", o.rho_low);
         o.rho_high = p.num("rho_high", o.rho_high);
         if (!(o.bracket_factor > 1.0 && o.rho_low > 0.0 && o.rho_high > o.rho_low)) p.fail("invalid bracket limits");
         (void)tol;
         const auto ladder = *p.scenario().ladder;
         return [=](std::uint64_t seed) {
           std::mt19937_64 rng(seed);
           const auto base = random_set(coarse, samples, rng);
           std::vector<GeneratorLevel> levels;
           for (std::size_t k = 0; k < ladder.levels.size(); ++k) {
             const auto& op = ladder.levels[k];
             GeneratorLevel lv;
             lv.label = "n=" + std::to_string(ladder.sizes[k]);
             lv.a = op.a;
             lv.x0 = NormedSpace::weighted_lp(op.weights, p0);
             lv.x1 = NormedSpace::weighted_lp(op.weights, p1);
             for (const auto& c : base) lv.samples.push_back(prolongate(c, op.size()));
             levels.push_back(std::move(lv));
           }
           auto rep = generator_interpolation_check(levels, f, o);
           rep.set_seed(seed);
           return rep;
         };
       }},
      {"resolvent_interpolation",
       [](Params& p, double tol) -> CheckRunner {
         const auto rs = realization_pair(p);
         const auto f = p.functor("functor").functor;
         const int samples = p.integer("samples", 6);
         return [=](std::uint64_t seed) {
           return resolvent_interpolation_check(rs.first, rs.second, f, samples, tol, seed);
         };
       }},
      {"interpolated_operator_norm",
       [](Params& p, double tol) -> CheckRunner {
         const Matrix t = p.generator("operator").a;
         const auto [a0, a1] = p.space_pair("source");
         const auto [b0, b1] = p.space_pair("target");
         p.require_dims(t.cols(), a0->space->dim(), "operator and source");
         p.require_dims(t.rows(), b0->space->dim(), "operator and target");
         p.require_dims(a0->space->dim(), a1->space->dim(), "source");
         p.require_dims(b0->space->dim(), b1->space->dim(), "target");
         const InterpolationCouple src(a0->space, a1->space), dst(b0->space, b1->space);
         const auto f = p.functor("functor").functor;
         const int samples = p.integer("samples", 6);
         return [=](std::uint64_t seed) {
           return interpolated_operator_norm_check(t, src, dst, f, samples, tol, seed);
         };
       }},
      {"lp_scale_consistency",
       [](Params& p, double tol) -> CheckRunner {
         const EllipticOperator op = p.elliptic("generator");
         const auto ps = p.positive_nums("ps");
         for (double x : ps)
           if (!(x >= 1.0)) p.fail("ps violate the constraint 1 <= p <= inf");
         const auto times = p.positive_nums("times");
         return [=](std::uint64_t seed) { return lp_scale_consistency_check(op, ps, times, tol, seed); };
       }},
      {"gaussian_bound",
       [](Params& p, double tol) -> CheckRunner {
         const EllipticOperator op = p.elliptic("generator");
         GaussianFitOptions o;
         o.times = p.positive_nums("times");
         if (p.has("c_step")) {
           const double step = p.num("c_step");
           const double lo = p.num("c_min", 0.5);
           const double hi = p.num("c_max", 3.0);
           if (!(step > 0.0 && lo > 0.0 && hi >= lo)) p.fail("c grid needs c_step > 0 and 0 < c_min <= c_max");
           for (int k = 0; lo + k * step <= hi + 1e-12; ++k) o.c_grid.push_back(lo + k * step);
         } else {
           o.c_grid = p.positive_nums("c_grid", {});
         }
         o.quantile = p.num("quantile", 1.0);
         if (!(o.quantile > 0.0 && o.quantile <= 1.0)) p.fail("quantile must lie in (0, 1]");
         o.clip = p.num("clip", o.clip);
         GaussianCriteria c;
         c.c_reference = p.num("c_reference", 1.0);
         c.c_tolerance = tol;
         c.exponent_tolerance = p.num("exponent_tolerance", 0.1);
         return [=](std::uint64_t seed) {
           auto rep = gaussian_bound_check(op, o, c);
           rep.set_seed(seed);
           return rep;
         };
       }},
  };
  return table;
}

void parse_generators(const Context& ctx, const YAML::Node& n, Scenario& sc) {
  if (!n.IsMap()) ctx.fail(n, "generators must be a mapping of id to recipe");
  for (const auto& kv : n) {
    const std::string id = kv.first.Scalar();
    const YAML::Node g = kv.second;
    const std::string what = "generator '" + id + "'";
    if (!g.IsMap() || !g["type"]) ctx.fail(g, what + " needs a type");
    const std::string type = ctx.text(g["type"], what + ".type");
    GeneratorDecl d;
    d.id = id;
    if (type == "matrix") {
      check_keys(ctx, g, {"type", "rows"}, what);
      if (!g["rows"]) ctx.fail(g, what + " needs rows");
      d.a = ctx.matrix(g["rows"], what + ".rows");
      if (d.a.rows() != d.a.cols()) ctx.fail(g["rows"], what + " must be square");
    } else if (type == "tridiag") {
      check_keys(ctx, g, {"type", "n", "diag", "off"}, what);
      if (!g["n"]) ctx.fail(g, what + " needs n");
      const auto size = ctx.integer(g["n"], what + ".n");
      if (size < 1) ctx.fail(g["n"], what + ".n must be positive");
      const double diag = g["diag"] ? ctx.number(g["diag"], what + ".diag") : 2.0;
      const double off = g["off"] ? ctx.number(g["off"], what + ".off") : -1.0;
      d.a = tridiag(size, diag, off);
    } else if (type == "zero") {
      check_keys(ctx, g, {"type", "dim"}, what);
      if (!g["dim"]) ctx.fail(g, what + " needs dim");
      const auto size = ctx.integer(g["dim"], what + ".dim");
      if (size < 1) ctx.fail(g["dim"], what + ".dim must be positive");
      d.a = Matrix::Zero(size, size);
    } else if (type == "elliptic") {
      check_keys(ctx, g, {"type", "dimension", "nodes", "h", "mu", "dirichlet"}, what);
      const int dim = g["dimension"] ? static_cast<int>(ctx.integer(g["dimension"], what + ".dimension")) : 1;
      if (!g["nodes"]) ctx.fail(g, what + " needs nodes");
      const int nodes = static_cast<int>(ctx.integer(g["nodes"], what + ".nodes"));
      const double h = g["h"] ? ctx.number(g["h"], what + ".h") : 1.0 / (nodes - 1);
      d.elliptic = elliptic_from(ctx, g, dim, nodes, h, what);
      d.a = d.elliptic->a;
    } else if (type == "perturb") {
      check_keys(ctx, g, {"type", "base", "row", "col", "delta"}, what);
      if (!g["base"] || !g["row"] || !g["col"] || !g["delta"]) ctx.fail(g, what + " needs base, row, col and delta");
      const std::string base = ctx.text(g["base"], what + ".base");
      const auto it = sc.generators.find(base);
      if (it == sc.generators.end())
        ctx.fail(g["base"], what + " references undeclared generator '" + base + "' (declare it earlier)");
      d.a = it->second.a;
      const auto r = ctx.integer(g["row"], what + ".row");
      const auto c = ctx.integer(g["col"], what + ".col");
      if (r < 0 || c < 0 || r >= d.a.rows() || c >= d.a.cols()) ctx.fail(g, what + ": entry outside the matrix");
      d.a(r, c) += ctx.number(g["delta"], what + ".delta");
    } else {
      ctx.fail(g["type"], what + ": unknown type '" + type + "'");
    }
    sc.generators[id] = std::move(d);
  }
}

void parse_spaces(const Context& ctx, const YAML::Node& n, Scenario& sc) {
  if (!n.IsMap()) ctx.fail(n, "spaces must be a mapping of id to declaration");
  for (const auto& kv : n) {
    const std::string id = kv.first.Scalar();
    const YAML::Node s = kv.second;
    const std::string what = "space '" + id + "'";
    if (!s.IsMap() || !s["type"]) ctx.fail(s, what + " needs a type");
    const std::string type = ctx.text(s["type"], what + ".type");
    auto generator = [&]() -> const GeneratorDecl& {
      if (!s["generator"]) ctx.fail(s, what + " needs a generator");
      const std::string g = ctx.text(s["generator"], what + ".generator");
      const auto it = sc.generators.find(g);
      if (it == sc.generators.end()) ctx.fail(s["generator"], what + " references undeclared generator '" + g + "'");
      return it->second;
    };
    auto member = [&](const YAML::Node& m) -> SpacePtr {
      const std::string other = ctx.text(m, what + " member");
      const auto it = sc.spaces.find(other);
      if (it == sc.spaces.end()) ctx.fail(m, what + " references undeclared space '" + other + "' (declare it earlier)");
      return it->second.space;
    };
    SpaceDecl d;
    d.id = id;
    try {
      if (type == "lp") {
        check_keys(ctx, s, {"type", "p", "dim", "weights", "generator"}, what);
        if (!s["p"]) ctx.fail(s, what + " needs p");
        const double p = exponent(ctx, s["p"], what + ".p");
        const int given = (s["dim"] ? 1 : 0) + (s["weights"] ? 1 : 0) + (s["generator"] ? 1 : 0);
        if (given != 1) ctx.fail(s, what + " needs exactly one of dim, weights, generator");
        Vector w;
        if (s["dim"]) {
          const auto dim = ctx.integer(s["dim"], what + ".dim");
          if (dim < 1) ctx.fail(s["dim"], what + ".dim must be positive");
          w = Vector::Ones(dim);
        } else if (s["weights"]) {
          const auto v = ctx.numbers(s["weights"], what + ".weights");
          w = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
        } else {
          const auto& g = generator();
          w = g.elliptic ? g.elliptic->weights : Vector::Ones(g.a.rows());
        }
        d.space = NormedSpace::weighted_lp(w, p);
      } else if (type == "sobolev" || type == "sobolev_dual") {
        check_keys(ctx, s, {"type", "p", "generator"}, what);
        if (!s["p"]) ctx.fail(s, what + " needs p");
        const double p = exponent(ctx, s["p"], what + ".p");
        if (!(p > 1.0 && std::isfinite(p))) ctx.fail(s["p"], what + ".p violates the constraint 1 < p < inf");
        const auto& g = generator();
        if (!g.elliptic) ctx.fail(s["generator"], what + ": generator '" + g.id + "' is not an elliptic recipe");
        const auto pair = discrete_sobolev_space(*g.elliptic, p);
        d.space = type == "sobolev" ? pair.w1p : pair.dual;
      } else if (type == "sum" || type == "intersection") {
        check_keys(ctx, s, {"type", "of"}, what);
        if (!s["of"] || !s["of"].IsSequence() || s["of"].size() != 2) ctx.fail(s, what + " needs of: [a, b]");
        const SpacePtr a = member(s["of"][0]);
        const SpacePtr b = member(s["of"][1]);
        d.space = type == "sum" ? NormedSpace::sum(a, b) : NormedSpace::intersection(a, b);
      } else {
        ctx.fail(s["type"], what + ": unknown type '" + type + "'");
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      ctx.fail(s, what + ": " + e.what());
    }
    sc.spaces[id] = std::move(d);
  }
}

void parse_functors(const Context& ctx, const YAML::Node& n, Scenario& sc) {
  if (!n.IsMap()) ctx.fail(n, "functors must be a mapping of id to declaration");
  for (const auto& kv : n) {
    const std::string id = kv.first.Scalar();
    const YAML::Node f = kv.second;
    const std::string what = "functor '" + id + "'";
    if (!f.IsMap() || !f["type"]) ctx.fail(f, what + " needs a type");
    const std::string type = ctx.text(f["type"], what + ".type");
    if (!f["theta"]) ctx.fail(f, what + " needs theta");
    FunctorDecl d;
    d.id = id;
    if (type == "real_k") {
      check_keys(ctx, f, {"type", "theta", "q", "J"}, what);
      const double th = theta(ctx, f["theta"], what + ".theta");
      const double q = f["q"] ? exponent(ctx, f["q"], what + ".q") : 2.0;
      const int J = f["J"] ? static_cast<int>(ctx.integer(f["J"], what + ".J")) : 24;
      if (J < 1) ctx.fail(f["J"], what + ".J must be positive");
      d.functor = FunctorDescriptor::real_k(th, q, J);
    } else if (type == "complex_lp") {
      check_keys(ctx, f, {"type", "theta"}, what);
      d.functor = FunctorDescriptor::complex_lp(theta(ctx, f["theta"], what + ".theta"));
    } else {
      ctx.fail(f["type"], what + ": unknown type '" + type + "'");
    }
    sc.functors[id] = d;
  }
}

void parse_ladder(const Context& ctx, const YAML::Node& n, Scenario& sc) {
  check_keys(ctx, n, {"sizes", "dimension", "mu", "dirichlet"}, "ladder");
  if (!n["sizes"]) ctx.fail(n, "ladder needs sizes");
  Ladder l;
  l.sizes = ctx.integers(n["sizes"], "ladder.sizes");
  if (l.sizes.empty()) ctx.fail(n["sizes"], "ladder.sizes must not be empty");
  const int dim = n["dimension"] ? static_cast<int>(ctx.integer(n["dimension"], "ladder.dimension")) : 1;
  if (dim != 1) ctx.fail(n["dimension"], "ladder supports dimension 1 only");
  for (int s : l.sizes) {
    if (s < 1) ctx.fail(n["sizes"], "ladder sizes must be positive");
    l.levels.push_back(elliptic_from(ctx, n, dim, s + 2, 1.0 / (s + 1), "ladder level " + std::to_string(s)));
  }
  sc.ladder = std::move(l);
}

void parse_checks(const Context& ctx, const YAML::Node& n, Scenario& sc) {
  if (!n.IsSequence()) ctx.fail(n, "checks must be a list");
  std::set<std::string> names;
  for (const auto& c : n) {
    if (!c.IsMap()) ctx.fail(c, "each check must be a mapping");
    if (!c["name"]) ctx.fail(c, "check without a name");
    const std::string name = ctx.text(c["name"], "check name");
    if (!names.insert(name).second) ctx.fail(c["name"], "duplicate check name '" + name + "'");
    if (!c["type"]) ctx.fail(c, "check '" + name + "' needs a type");
    const std::string type = ctx.text(c["type"], "check type");
    const auto it = builders().find(type);
    if (it == builders().end()) ctx.fail(c["type"], "check '" + name + "': unknown type '" + type + "'");
    if (!c["tol"]) ctx.fail(c, "check '" + name + "' needs tol");
    const double tol = ctx.number(c["tol"], "check '" + name + "' tol");
    if (!(tol > 0.0 && std::isfinite(tol))) ctx.fail(c["tol"], "check '" + name + "': tol must be strictly positive");
    Params params(ctx, sc, c, name);
    CheckDecl d;
    d.name = name;
    d.type = type;
    d.tol = tol;
    d.run = it->second(params, tol);
    params.finish();
    sc.checks.push_back(std::move(d));
  }
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest computation failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::uint64_t derive_seed(std::uint64_t scenario_seed, const std::string& check_name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : check_name) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = scenario_seed + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> check_types() {
  std::vector<std::string> out;
  for (const auto& kv : builders()) out.push_back(kv.first);
  return out;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const Context ctx(source);
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(where(source, e.mark) + ": parse error: " + e.msg);
  }
  if (!doc.IsMap()) throw ScenarioError((source.empty() ? std::string() : source + ": ") + "scenario must be a mapping");
  check_keys(ctx, doc, {"name", "description", "seed", "spaces", "generators", "functors", "ladder", "checks"},
             "scenario");
  Scenario sc;
  sc.source = source;
  if (!doc["name"]) ctx.fail(doc, "scenario needs a name");
  sc.name = ctx.text(doc["name"], "name");
  if (!doc["seed"]) ctx.fail(doc, "scenario needs an explicit seed");
  const auto seed = ctx.integer(doc["seed"], "seed");
  if (seed < 0) ctx.fail(doc["seed"], "seed must be non-negative");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.canonical = to_json(doc).dump();
  sc.digest = sha256_hex(sc.canonical);
  if (doc["generators"]) parse_generators(ctx, doc["generators"], sc);
  if (doc["spaces"]) parse_spaces(ctx, doc["spaces"], sc);
  if (doc["functors"]) parse_functors(ctx, doc["functors"], sc);
  if (doc["ladder"]) parse_ladder(ctx, doc["ladder"], sc);
  if (doc["checks"]) parse_checks(ctx, doc["checks"], sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace cosi
