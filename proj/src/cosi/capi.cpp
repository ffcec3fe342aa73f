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
#include "cosi/cosi.h"

#include "cosi/interp.hpp"
#include "cosi/opnorm.hpp"
#include "cosi/runner.hpp"
#include "cosi/scenario.hpp"
#include "cosi/semigroup.hpp"
#include "cosi/spaces.hpp"

#include <cmath>
#include <string>

#ifndef COSI_FIXTURE_DIR
#define COSI_FIXTURE_DIR "fixtures"
#endif

struct cosi_space {
  cosi::SpacePtr ptr;
};

struct cosi_scenario {
  cosi::Scenario sc;
};

struct cosi_run {
  cosi::RunReport report;
  std::string table;
  std::string tree;
};

namespace {

thread_local std::string g_last_error;

cosi_status fail(cosi_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
cosi_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const cosi::ScenarioError& e) {
    return fail(COSI_ERR_SCENARIO, e.what());
  } catch (const cosi::DimensionError& e) {
    return fail(COSI_ERR_DIMENSION, e.what());
  } catch (const cosi::DomainError& e) {
    return fail(COSI_ERR_DOMAIN, e.what());
  } catch (const cosi::NumericalError& e) {
    return fail(COSI_ERR_NUMERICAL, e.what());
  } catch (const cosi::ConvergenceError& e) {
    return fail(COSI_ERR_CONVERGENCE, e.what());
  } catch (const cosi::RefusedError& e) {
    return fail(COSI_ERR_REFUSED, e.what());
  } catch (const cosi::Error& e) {
    return fail(COSI_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(COSI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(COSI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(COSI_ERR_INTERNAL, "unknown exception");
  }
}

#define COSI_REQUIRE(cond, what) \
  if (!(cond)) return fail(COSI_ERR_INVALID_ARGUMENT, what)

cosi::Vector vec(const double* x, size_t n) { return Eigen::Map<const cosi::Vector>(x, static_cast<Eigen::Index>(n)); }

cosi::Matrix mat(const double* a, size_t rows, size_t cols) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(a, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void store(const cosi::Matrix& m, double* out) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

void store(const cosi::Vector& v, double* out) { Eigen::Map<cosi::Vector>(out, v.size()) = v; }

}  // namespace

extern "C" {

const char* cosi_version(void) { return cosi::tool_version(); }

const char* cosi_status_string(cosi_status status) {
  switch (status) {
    case COSI_OK: return "ok";
    case COSI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case COSI_ERR_DIMENSION: return "dimension mismatch";
    case COSI_ERR_DOMAIN: return "parameter out of range";
    case COSI_ERR_NUMERICAL: return "numerical failure";
    case COSI_ERR_CONVERGENCE: return "no convergence";
    case COSI_ERR_REFUSED: return "refused";
    case COSI_ERR_SCENARIO: return "scenario error";
    case COSI_ERR_IO: return "i/o error";
    case COSI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cosi_last_error(void) { return g_last_error.c_str(); }

const char* cosi_fixture_dir(void) { return COSI_FIXTURE_DIR; }

cosi_status cosi_space_weighted_lp(const double* weights, size_t n, double p, cosi_space** out) {
  COSI_REQUIRE(weights && out && n > 0, "cosi_space_weighted_lp: null pointer or empty weights");
  return guard([&] {
    *out = new cosi_space{cosi::NormedSpace::weighted_lp(vec(weights, n), p)};
    return COSI_OK;
  });
}

cosi_status cosi_space_sum(const cosi_space* a, const cosi_space* b, cosi_space** out) {
  COSI_REQUIRE(a && b && out, "cosi_space_sum: null pointer");
  return guard([&] {
    *out = new cosi_space{cosi::NormedSpace::sum(a->ptr, b->ptr)};
    return COSI_OK;
  });
}

cosi_status cosi_space_intersection(const cosi_space* a, const cosi_space* b, cosi_space** out) {
  COSI_REQUIRE(a && b && out, "cosi_space_intersection: null pointer");
  return guard([&] {
    *out = new cosi_space{cosi::NormedSpace::intersection(a->ptr, b->ptr)};
    return COSI_OK;
  });
}

cosi_status cosi_space_dual(const cosi_space* a, const double* pairing, cosi_space** out) {
  COSI_REQUIRE(a && pairing && out, "cosi_space_dual: null pointer");
  return guard([&] {
    *out = new cosi_space{cosi::NormedSpace::dual_of(a->ptr, vec(pairing, static_cast<size_t>(a->ptr->dim())))};
    return COSI_OK;
  });
}

void cosi_space_free(cosi_space* space) { delete space; }

size_t cosi_space_dim(const cosi_space* space) { return space ? static_cast<size_t>(space->ptr->dim()) : 0; }

cosi_status cosi_space_norm(const cosi_space* space, const double* x, size_t n, double* out) {
  COSI_REQUIRE(space && x && out, "cosi_space_norm: null pointer");
  return guard([&] {
    *out = space->ptr->norm(vec(x, n));
    return COSI_OK;
  });
}

cosi_status cosi_dual_norm(const cosi_space* space, const double* pairing, const double* f, size_t n, double* value,
                           double* upper, int* certified) {
  COSI_REQUIRE(space && pairing && f && value, "cosi_dual_norm: null pointer");
  return guard([&] {
    const auto r = cosi::dual_norm(vec(f, n), *space->ptr, vec(pairing, n));
    *value = r.value;
    if (upper) *upper = r.upper;
    if (certified) *certified = r.certified ? 1 : 0;
    return COSI_OK;
  });
}

cosi_status cosi_k_functional(const cosi_space* x0, const cosi_space* x1, double t, const double* x, size_t n,
                              double* value, int* certified) {
  COSI_REQUIRE(x0 && x1 && x && value, "cosi_k_functional: null pointer");
  return guard([&] {
    const auto r = cosi::k_functional(t, vec(x, n), cosi::InterpolationCouple(x0->ptr, x1->ptr));
    *value = r.value;
    if (certified) *certified = r.certified ? 1 : 0;
    return COSI_OK;
  });
}

cosi_status cosi_real_interp_norm(const cosi_space* x0, const cosi_space* x1, double theta, double q, int J,
                                  const double* x, size_t n, double* value, int* certified) {
  COSI_REQUIRE(x0 && x1 && x && value, "cosi_real_interp_norm: null pointer");
  return guard([&] {
    const auto r = cosi::real_interp_norm(vec(x, n), cosi::InterpolationCouple(x0->ptr, x1->ptr), theta, q, J);
    *value = r.value;
    if (certified) *certified = r.certified ? 1 : 0;
    return COSI_OK;
  });
}

cosi_status cosi_expm(const double* a, size_t n, double* out) {
  COSI_REQUIRE(a && out && n > 0, "cosi_expm: null pointer or empty matrix");
  return guard([&] {
    store(cosi::expm(mat(a, n, n)), out);
    return COSI_OK;
  });
}

cosi_status cosi_semigroup_apply(const double* a, size_t n, double t, const double* x, double* out) {
  COSI_REQUIRE(a && x && out && n > 0, "cosi_semigroup_apply: null pointer or empty matrix");
  return guard([&] {
    store(cosi::expm_apply(mat(a, n, n), t, vec(x, n)), out);
    return COSI_OK;
  });
}

cosi_status cosi_resolvent_apply(const double* a, size_t n, double lambda, const double* x, double* out) {
  COSI_REQUIRE(a && x && out && n > 0, "cosi_resolvent_apply: null pointer or empty matrix");
  return guard([&] {
    store(cosi::resolvent_apply(mat(a, n, n), lambda, vec(x, n)), out);
    return COSI_OK;
  });
}

cosi_status cosi_euler_apply(const double* a, size_t n, double t, int steps, const double* x, double* out) {
  COSI_REQUIRE(a && x && out && n > 0, "cosi_euler_apply: null pointer or empty matrix");
  return guard([&] {
    store(cosi::euler_apply(mat(a, n, n), t, steps, vec(x, n)), out);
    return COSI_OK;
  });
}

cosi_status cosi_lp_operator_norm(const double* t, size_t rows, size_t cols, double p, double* lower, double* upper) {
  COSI_REQUIRE(t && lower && upper && rows > 0 && cols > 0, "cosi_lp_operator_norm: null pointer or empty matrix");
  return guard([&] {
    const auto r = cosi::lp_operator_norm(mat(t, rows, cols), p, cosi::Vector::Ones(static_cast<Eigen::Index>(cols)),
                                          cosi::Vector::Ones(static_cast<Eigen::Index>(rows)));
    *lower = r.lower;
    *upper = r.upper;
    return COSI_OK;
  });
}

cosi_status cosi_scenario_load(const char* path, cosi_scenario** out) {
  COSI_REQUIRE(path && out, "cosi_scenario_load: null pointer");
  return guard([&] {
    *out = new cosi_scenario{cosi::load_scenario(path)};
    return COSI_OK;
  });
}

cosi_status cosi_scenario_parse(const char* text, cosi_scenario** out) {
  COSI_REQUIRE(text && out, "cosi_scenario_parse: null pointer");
  return guard([&] {
    *out = new cosi_scenario{cosi::parse_scenario(text)};
    return COSI_OK;
  });
}

void cosi_scenario_free(cosi_scenario* scenario) { delete scenario; }

const char* cosi_scenario_name(const cosi_scenario* s) { return s ? s->sc.name.c_str() : ""; }

const char* cosi_scenario_digest(const cosi_scenario* s) { return s ? s->sc.digest.c_str() : ""; }

uint64_t cosi_scenario_seed(const cosi_scenario* s) { return s ? s->sc.seed : 0; }

size_t cosi_scenario_check_count(const cosi_scenario* s) { return s ? s->sc.checks.size() : 0; }

size_t cosi_scenario_ladder_levels(const cosi_scenario* s) {
  return s && s->sc.ladder ? s->sc.ladder->levels.size() : 0;
}

cosi_status cosi_run_scenario(const cosi_scenario* scenario, const cosi_run_options* options, cosi_run** out) {
  COSI_REQUIRE(scenario && out, "cosi_run_scenario: null pointer");
  return guard([&] {
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    if (options) {
      jobs = options->jobs;
      if (options->has_seed) seed = options->seed;
    }
    auto* run = new cosi_run{cosi::run_scenario(scenario->sc, jobs, seed), {}, {}};
    run->table = cosi::format_table(run->report);
    run->tree = cosi::format_tree(run->report);
    *out = run;
    return COSI_OK;
  });
}

void cosi_run_free(cosi_run* run) { delete run; }

int cosi_run_exit_code(const cosi_run* run) { return run ? run->report.exit_code() : 1; }

size_t cosi_run_check_count(const cosi_run* run) { return run ? run->report.checks.size() : 0; }

const char* cosi_run_check_name(const cosi_run* run, size_t index) {
  if (!run || index >= run->report.checks.size()) return "";
  return run->report.checks[index].report.name().c_str();
}

const char* cosi_run_check_verdict(const cosi_run* run, size_t index) {
  if (!run || index >= run->report.checks.size()) return "";
  return cosi::to_string(run->report.checks[index].report.verdict());
}

const char* cosi_run_table(const cosi_run* run) { return run ? run->table.c_str() : ""; }

const char* cosi_run_tree(const cosi_run* run) { return run ? run->tree.c_str() : ""; }

cosi_status cosi_run_emit(const cosi_run* run, const char* dir, int tree, int table) {
  COSI_REQUIRE(run && dir, "cosi_run_emit: null pointer");
  return guard([&] {
    try {
      cosi::emit_report(run->report, dir, cosi::OutputFormats{tree != 0, table != 0});
    } catch (const cosi::Error& e) {
      return fail(COSI_ERR_IO, e.what());
    }
    return COSI_OK;
  });
}

}  // extern "C"
