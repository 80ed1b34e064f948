#include "mulpart/mulpart.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "mulpart/asymptotics.hpp"
#include "mulpart/config.hpp"
#include "mulpart/diagnostics.hpp"
#include "mulpart/errors.hpp"
#include "mulpart/partition_function.hpp"
#include "mulpart/sampler.hpp"
#include "mulpart/verify.hpp"

struct mulpart_ensemble {
  mulpart::EnsembleConfig cfg;
};
struct mulpart_table {
  mulpart::CoefficientTable table;
};
struct mulpart_rng {
  mulpart::RngStream rng;
};
struct mulpart_partition {
  mulpart::Partition p;
};
struct mulpart_rejection {
  mulpart::RejectionSampler s;
};
struct mulpart_exact {
  mulpart::ExactSampler s;
};

namespace {

thread_local std::string g_last_error;

mulpart_status fail(mulpart_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
mulpart_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MULPART_OK;
  } catch (const mulpart::Error& e) {
    return fail(static_cast<mulpart_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MULPART_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MULPART_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MULPART_ERR_INTERNAL, "unknown failure");
  }
}

#define REQUIRE_ARG(p)                                                       \
  do {                                                                       \
    if (!(p)) return fail(MULPART_ERR_PARAM, "null argument: " #p);          \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mulpart_regime to_c(mulpart::Regime r) {
  switch (r) {
    case mulpart::Regime::ErgodicPoleAtOne: return MULPART_REGIME_ERGODIC_POLE_AT_ONE;
    case mulpart::Regime::ErgodicSupercritical: return MULPART_REGIME_ERGODIC_SUPERCRITICAL;
    case mulpart::Regime::EssentialSubcritical: return MULPART_REGIME_ESSENTIAL_SUBCRITICAL;
    case mulpart::Regime::NonergodicGrandCanonical: return MULPART_REGIME_NONERGODIC;
    case mulpart::Regime::OutOfScope: return MULPART_REGIME_OUT_OF_SCOPE;
  }
  return MULPART_REGIME_OUT_OF_SCOPE;
}

mulpart::CoefficientMode to_cpp(mulpart_coeff_mode m) {
  switch (m) {
    case MULPART_COEFF_EXACT: return mulpart::CoefficientMode::Exact;
    case MULPART_COEFF_FLOAT: return mulpart::CoefficientMode::Float;
    default: return mulpart::CoefficientMode::Auto;
  }
}

mulpart_partition* wrap(mulpart::Partition p) { return new mulpart_partition{std::move(p)}; }

}  // namespace

extern "C" {

const char* mulpart_last_error(void) { return g_last_error.c_str(); }

const char* mulpart_status_name(mulpart_status s) {
  switch (s) {
    case MULPART_OK: return "ok";
    case MULPART_ERR_PARAM: return "ParamError";
    case MULPART_ERR_DOMAIN: return "DomainError";
    case MULPART_ERR_REGIME: return "RegimeError";
    case MULPART_ERR_NEGATIVE_COEFFICIENT: return "NegativeCoefficientError";
    case MULPART_ERR_QUADRATURE: return "QuadratureError";
    case MULPART_ERR_CONVERGENCE: return "ConvergenceError";
    case MULPART_ERR_TRUNCATION: return "TruncationError";
    case MULPART_ERR_TAIL: return "TailError";
    case MULPART_ERR_BUDGET: return "BudgetExhausted";
    case MULPART_ERR_TABLE: return "TableError";
    case MULPART_ERR_FIT_UNSTABLE: return "FitUnstable";
    case MULPART_ERR_UNKNOWN_NAME: return "UnknownName";
    case MULPART_ERR_CONFIG: return "ConfigError";
    case MULPART_ERR_IO: return "IoError";
    case MULPART_ERR_INTERNAL: return "InternalError";
  }
  return "unknown";
}

const char* mulpart_regime_name(mulpart_regime r) {
  switch (r) {
    case MULPART_REGIME_ERGODIC_POLE_AT_ONE: return "ErgodicPoleAtOne";
    case MULPART_REGIME_ERGODIC_SUPERCRITICAL: return "ErgodicSupercritical";
    case MULPART_REGIME_ESSENTIAL_SUBCRITICAL: return "EssentialSubcritical";
    case MULPART_REGIME_NONERGODIC: return "NonergodicGrandCanonical";
    case MULPART_REGIME_OUT_OF_SCOPE: return "OutOfScope";
  }
  return "unknown";
}

void mulpart_string_free(char* s) { std::free(s); }

// --- ensembles --------------------------------------------------------------

mulpart_status mulpart_ensemble_create(const char* name_or_path, mulpart_ensemble** out) {
  REQUIRE_ARG(name_or_path);
  REQUIRE_ARG(out);
  return guarded([&] { *out = new mulpart_ensemble{mulpart::resolve_ensemble(name_or_path)}; });
}

mulpart_status mulpart_ensemble_from_json(const char* json_text, mulpart_ensemble** out) {
  REQUIRE_ARG(json_text);
  REQUIRE_ARG(out);
  return guarded([&] { *out = new mulpart_ensemble{mulpart::parse_config(json_text)}; });
}

void mulpart_ensemble_free(mulpart_ensemble* e) { delete e; }

const char* mulpart_ensemble_name(const mulpart_ensemble* e) { return e ? e->cfg.name.c_str() : ""; }

mulpart_status mulpart_ensemble_regime(const mulpart_ensemble* e, mulpart_regime* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  *out = to_c(e->cfg.ensemble.regime());
  return MULPART_OK;
}

mulpart_status mulpart_ensemble_rho(const mulpart_ensemble* e, double* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  *out = e->cfg.ensemble.rho();
  return MULPART_OK;
}

mulpart_status mulpart_ensemble_numerics(const mulpart_ensemble* e, double* eps, double* hit_threshold,
                                         long long* budget, mulpart_coeff_mode* mode) {
  REQUIRE_ARG(e);
  const auto& n = e->cfg.numerics;
  if (eps) *eps = n.eps;
  if (hit_threshold) *hit_threshold = n.hit_threshold;
  if (budget) *budget = n.budget;
  if (mode)
    *mode = n.coefficients == mulpart::CoefficientMode::Exact   ? MULPART_COEFF_EXACT
            : n.coefficients == mulpart::CoefficientMode::Float ? MULPART_COEFF_FLOAT
                                                                : MULPART_COEFF_AUTO;
  return MULPART_OK;
}

// --- asymptotics ------------------------------------------------------------

mulpart_status mulpart_moments(const mulpart_ensemble* e, double x, double* mean, double* var) {
  REQUIRE_ARG(e);
  return guarded([&] {
    const auto m = mulpart::moments(e->cfg.ensemble, x);
    if (mean) *mean = m.mean;
    if (var) *var = m.var;
  });
}

mulpart_status mulpart_omega(const mulpart_ensemble* e, double* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] { *out = mulpart::omega(e->cfg.ensemble); });
}

mulpart_status mulpart_sigma_sq(const mulpart_ensemble* e, double* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] { *out = mulpart::sigma_sq(e->cfg.ensemble); });
}

mulpart_status mulpart_limit_shape(const mulpart_ensemble* e, double t, double* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] { *out = mulpart::limit_shape(e->cfg.ensemble, t); });
}

mulpart_status mulpart_shape_curve(const mulpart_ensemble* e, double t_max, int grid_size, double* t, double* phi) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(t);
  REQUIRE_ARG(phi);
  return guarded([&] {
    const auto c = mulpart::shape_curve(e->cfg.ensemble, t_max, grid_size);
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      t[i] = c.grid[i].first;
      phi[i] = c.grid[i].second;
    }
  });
}

mulpart_status mulpart_solve_tilt(const mulpart_ensemble* e, long long n, mulpart_tilt* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] {
    const auto s = mulpart::solve_tilt(e->cfg.ensemble, n, e->cfg.numerics.tilt);
    *out = {s.x, s.tau, 1.0 / s.tau, s.mean, s.variance, s.residual, s.iterations};
  });
}

// --- coefficients -----------------------------------------------------------

mulpart_status mulpart_table_build(const mulpart_ensemble* e, long long n_max, mulpart_coeff_mode mode,
                                   int retain_prefix_tables, mulpart_table** out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] {
    mulpart::CoefficientOptions opt;
    opt.mode = to_cpp(mode);
    opt.retain_tables = retain_prefix_tables != 0;
    *out = new mulpart_table{mulpart::CoefficientTable::build(e->cfg.ensemble, n_max, opt)};
  });
}

void mulpart_table_free(mulpart_table* t) { delete t; }

int mulpart_table_exact(const mulpart_table* t) { return t && t->table.exact() ? 1 : 0; }

mulpart_status mulpart_table_coefficient(const mulpart_table* t, long long m, char** out) {
  REQUIRE_ARG(t);
  REQUIRE_ARG(out);
  return guarded([&] { *out = dup_string(t->table.a_string(m)); });
}

mulpart_status mulpart_point_mass(const mulpart_ensemble* e, double x, long long m, const mulpart_table* t,
                                  double* out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(t);
  REQUIRE_ARG(out);
  return guarded([&] { *out = mulpart::point_mass(e->cfg.ensemble, x, m, t->table); });
}

// --- rng and partitions -----------------------------------------------------

mulpart_status mulpart_rng_create(uint64_t seed, uint64_t stream, mulpart_rng** out) {
  REQUIRE_ARG(out);
  return guarded([&] { *out = new mulpart_rng{mulpart::RngStream(seed, stream)}; });
}

void mulpart_rng_free(mulpart_rng* r) { delete r; }

void mulpart_partition_free(mulpart_partition* p) { delete p; }

long long mulpart_partition_weight(const mulpart_partition* p) { return p ? p->p.weight() : 0; }

long long mulpart_partition_num_parts(const mulpart_partition* p) { return p ? p->p.num_parts() : 0; }

mulpart_status mulpart_partition_counts(const mulpart_partition* p, long long* parts, long long* counts, size_t cap,
                                        size_t* len) {
  REQUIRE_ARG(p);
  REQUIRE_ARG(len);
  *len = p->p.counts().size();
  std::size_t i = 0;
  for (auto [k, r] : p->p.counts()) {
    if (i >= cap) break;
    if (parts) parts[i] = k;
    if (counts) counts[i] = r;
    ++i;
  }
  return MULPART_OK;
}

mulpart_status mulpart_partition_json(const mulpart_partition* p, uint64_t seed, uint64_t stream, char** out) {
  REQUIRE_ARG(p);
  REQUIRE_ARG(out);
  return guarded([&] { *out = dup_string(p->p.to_json(seed, stream)); });
}

// --- samplers ---------------------------------------------------------------

mulpart_status mulpart_sample_grand(const mulpart_ensemble* e, double x, mulpart_rng* rng, mulpart_partition** out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(rng);
  REQUIRE_ARG(out);
  return guarded([&] { *out = wrap(mulpart::sample_grand(e->cfg.ensemble, x, rng->rng)); });
}

mulpart_status mulpart_rejection_create(const mulpart_ensemble* e, long long n, long long budget,
                                        mulpart_rejection** out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(out);
  return guarded([&] {
    if (n < 1) throw mulpart::ParamError("rejection sampling needs n >= 1");
    const long long b = budget > 0 ? budget : e->cfg.numerics.budget;
    *out = new mulpart_rejection{mulpart::RejectionSampler(e->cfg.ensemble, n, b)};
  });
}

void mulpart_rejection_free(mulpart_rejection* s) { delete s; }

mulpart_status mulpart_rejection_draw(mulpart_rejection* s, mulpart_rng* rng, mulpart_partition** out) {
  REQUIRE_ARG(s);
  REQUIRE_ARG(rng);
  REQUIRE_ARG(out);
  return guarded([&] { *out = wrap(s->s.draw(rng->rng)); });
}

mulpart_status mulpart_rejection_stats(const mulpart_rejection* s, long long* attempts, long long* accepted,
                                       long long* budget) {
  REQUIRE_ARG(s);
  if (attempts) *attempts = s->s.attempts();
  if (accepted) *accepted = s->s.accepted();
  if (budget) *budget = s->s.budget();
  return MULPART_OK;
}

mulpart_status mulpart_exact_create(const mulpart_ensemble* e, const mulpart_table* t, mulpart_exact** out) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(t);
  REQUIRE_ARG(out);
  return guarded([&] { *out = new mulpart_exact{mulpart::ExactSampler(e->cfg.ensemble, t->table)}; });
}

void mulpart_exact_free(mulpart_exact* s) { delete s; }

mulpart_status mulpart_exact_draw(const mulpart_exact* s, long long n, mulpart_rng* rng, mulpart_partition** out) {
  REQUIRE_ARG(s);
  REQUIRE_ARG(rng);
  REQUIRE_ARG(out);
  return guarded([&] { *out = wrap(s->s.draw(n, rng->rng)); });
}

// --- diagnostics ------------------------------------------------------------

mulpart_status mulpart_concentration(const mulpart_ensemble* e, long long n, int replicas, uint64_t seed, double eps,
                                     double hit_threshold, char** report_json, char** sup_csv) {
  REQUIRE_ARG(e);
  return guarded([&] {
    mulpart::ConcentrationOptions opt;
    opt.seed = seed;
    opt.eps = eps > 0.0 ? eps : e->cfg.numerics.eps;
    opt.hit_threshold = hit_threshold > 0.0 ? hit_threshold : e->cfg.numerics.hit_threshold;
    opt.budget = e->cfg.numerics.budget;
    const auto r = mulpart::concentration_experiment(e->cfg.ensemble, n, replicas, opt);
    if (report_json) *report_json = dup_string(r.to_json());
    if (sup_csv) *sup_csv = dup_string(r.sup_csv());
  });
}

mulpart_status mulpart_variance_ratio(const mulpart_ensemble* e, const double* x, size_t len, char** report_json) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(x);
  REQUIRE_ARG(report_json);
  return guarded([&] {
    const auto r = mulpart::variance_ratio_probe(e->cfg.ensemble, std::vector<double>(x, x + len));
    nlohmann::ordered_json j;
    j["expected_limit"] = r.expected_limit;
    j["nonergodic"] = r.nonergodic;
    j["points"] = nlohmann::ordered_json::array();
    for (auto [xv, ratio] : r.points) j["points"].push_back({{"x", xv}, {"ratio", ratio}});
    *report_json = dup_string(j.dump(2));
  });
}

mulpart_status mulpart_degenerate_shape(const mulpart_ensemble* e, long long n, int replicas, uint64_t seed,
                                        char** report_json) {
  REQUIRE_ARG(e);
  REQUIRE_ARG(report_json);
  return guarded([&] {
    const auto r = mulpart::degenerate_shape_probe(e->cfg.ensemble, n, replicas, seed);
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["M"] = r.M;
    j["mean"] = r.mean;
    j["q10"] = r.q10;
    j["median"] = r.median;
    j["q90"] = r.q90;
    j["conjectural"] = r.conjectural;
    *report_json = dup_string(j.dump(2));
  });
}

mulpart_status mulpart_verify(const char* suite, const mulpart_ensemble* e, uint64_t seed, long long n,
                              char** report_json, int* all_passed) {
  REQUIRE_ARG(suite);
  return guarded([&] {
    mulpart::verify::Options opt;
    opt.seed = seed;
    if (n > 0) opt.n = n;
    if (e) {
      opt.ensemble = e->cfg.ensemble;
      opt.eps = e->cfg.numerics.eps;
      opt.hit_threshold = e->cfg.numerics.hit_threshold;
    }
    const auto results = mulpart::verify::run(suite, opt);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    if (report_json) *report_json = dup_string(mulpart::verify::to_json(results));
    if (all_passed) *all_passed = all ? 1 : 0;
  });
}

}  // extern "C"
