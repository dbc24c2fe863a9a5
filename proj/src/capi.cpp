#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "psa/conditions.hpp"
#include "psa/error.hpp"
#include "psa/estimators.hpp"
#include "psa/prime_engine.hpp"
#include "psa/psa.h"
#include "psa/quadrature.hpp"
#include "psa/summation.hpp"

struct psa_engine {
  psa::PrimeEngine engine;
};

struct psa_function {
  psa::FunctionSpec spec;
  bool closed_main;
  std::string label;
};

struct psa_report {
  std::vector<psa::ConditionResult> conditions;
};

namespace {

thread_local std::string last_error;

psa_status to_status(psa::ErrorCode code) {
  using psa::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return PSA_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_range: return PSA_ERR_INVALID_RANGE;
    case ErrorCode::range_too_large: return PSA_ERR_RANGE_TOO_LARGE;
    case ErrorCode::unknown_id: return PSA_ERR_UNKNOWN_ID;
    case ErrorCode::invalid_params: return PSA_ERR_INVALID_PARAMS;
    case ErrorCode::hypothesis_violation: return PSA_ERR_HYPOTHESIS;
    case ErrorCode::max_subdivisions: return PSA_ERR_MAX_SUBDIVISIONS;
    case ErrorCode::overflow: return PSA_ERR_OVERFLOW;
    case ErrorCode::io: return PSA_ERR_IO;
    case ErrorCode::callback_failed: return PSA_ERR_CALLBACK;
  }
  return PSA_ERR_INTERNAL;
}

psa_status fail(psa_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Body>
psa_status guarded(Body&& body) noexcept {
  try {
    body();
    return PSA_OK;
  } catch (const psa::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PSA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PSA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PSA_ERR_INTERNAL, "unknown exception");
  }
}

#define PSA_REQUIRE(cond)                                                       \
  do {                                                                          \
    if (!(cond)) return fail(PSA_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

psa::ErrorModel to_model(const psa_model* model) {
  psa::ErrorModel out;
  if (model == nullptr) return out;
  out.kind = static_cast<psa::ModelKind>(model->kind);
  out.c = model->c;
  out.c1 = model->c1;
  out.c2 = model->c2;
  out.epsilon = model->epsilon;
  out.theta = model->theta;
  return out;
}

void fill(const psa::ExactSum& in, psa_exact_sum* out) {
  out->n = in.n;
  out->value = in.value;
  out->terms = in.terms;
  out->compensation = in.compensation;
  out->log_space = in.log_space() ? 1 : 0;
  out->log_abs = in.log_value ? in.log_value->log_abs : 0.0;
  out->sign = in.log_value ? in.log_value->sign : (in.value > 0 ? 1 : (in.value < 0 ? -1 : 0));
}

std::vector<psa::Integer> to_grid(const uint64_t* grid, size_t len) {
  return std::vector<psa::Integer>(grid, grid + len);
}

psa_status copy_grid(const std::vector<psa::Integer>& grid, uint64_t* out, size_t capacity, size_t* len) {
  *len = grid.size();
  if (out != nullptr) std::copy_n(grid.begin(), std::min(capacity, grid.size()), out);
  return PSA_OK;
}

}  // namespace

extern "C" {

PSA_API const char* psa_last_error(void) { return last_error.c_str(); }

PSA_API const char* psa_status_name(psa_status status) {
  switch (status) {
    case PSA_OK: return "ok";
    case PSA_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case PSA_ERR_INVALID_RANGE: return "invalid-range";
    case PSA_ERR_RANGE_TOO_LARGE: return "range-too-large";
    case PSA_ERR_UNKNOWN_ID: return "unknown-id";
    case PSA_ERR_INVALID_PARAMS: return "invalid-params";
    case PSA_ERR_HYPOTHESIS: return "hypothesis-violation";
    case PSA_ERR_MAX_SUBDIVISIONS: return "max-subdivision-exceeded";
    case PSA_ERR_OVERFLOW: return "overflow";
    case PSA_ERR_IO: return "io";
    case PSA_ERR_CALLBACK: return "callback-failed";
    case PSA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

PSA_API psa_status psa_engine_create(uint64_t segment_odds, const char* cache_dir, unsigned threads,
                                     psa_engine** out) {
  PSA_REQUIRE(out != nullptr);
  *out = nullptr;
  return guarded([&] {
    auto config = psa::EngineConfig::from_environment();
    if (segment_odds != 0) config.segment_odds = static_cast<std::size_t>(segment_odds);
    if (cache_dir != nullptr) {
      config.cache_dir.reset();
      if (*cache_dir != '\0') config.cache_dir = std::filesystem::path(cache_dir);
    }
    config.threads = threads == 0 ? 1 : threads;
    *out = new psa_engine{psa::PrimeEngine(std::move(config))};
  });
}

PSA_API void psa_engine_destroy(psa_engine* engine) { delete engine; }

PSA_API psa_status psa_prime_count(psa_engine* engine, uint64_t n, uint64_t* count) {
  PSA_REQUIRE(engine != nullptr && count != nullptr);
  return guarded([&] { *count = engine->engine.prime_count(n); });
}

PSA_API psa_status psa_sieve_range(const psa_engine* engine, uint64_t lo, uint64_t hi, uint8_t* bits,
                                   size_t bits_len, uint64_t* count) {
  PSA_REQUIRE(engine != nullptr);
  return guarded([&] {
    const auto segment = engine->engine.sieve_range(lo, hi);
    if (count != nullptr) *count = segment.count();
    if (bits == nullptr) return;
    const std::size_t needed = (segment.odd_count() + 7) / 8;
    if (bits_len < needed) throw psa::Error(psa::ErrorCode::invalid_argument, "bitset buffer too small");
    const auto words = segment.words();
    for (std::size_t b = 0; b < needed; ++b) bits[b] = static_cast<uint8_t>(words[b / 8] >> (8 * (b % 8)));
  });
}

PSA_API psa_status psa_stream_primes(const psa_engine* engine, uint64_t n, psa_prime_visitor visit, void* user) {
  PSA_REQUIRE(engine != nullptr && visit != nullptr);
  return guarded([&] {
    if (n < 2) throw psa::Error(psa::ErrorCode::invalid_range, "stream_primes requires n >= 2");
    const bool completed = engine->engine.stream_primes(n, [&](psa::Integer p) { return visit(p, user) == 0; });
    if (!completed) throw psa::Error(psa::ErrorCode::callback_failed, "visitor aborted the prime stream");
  });
}

PSA_API psa_status psa_function_create(const char* id, const double* m, const double* k, psa_function** out) {
  PSA_REQUIRE(id != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    psa::FunctionParams params;
    if (m != nullptr) params.m = *m;
    if (k != nullptr) params.k = *k;
    auto entry = psa::catalog_entry(id, params);
    auto label = entry.spec.label();
    *out = new psa_function{std::move(entry.spec), entry.closed_main, std::move(label)};
  });
}

PSA_API void psa_function_destroy(psa_function* fn) { delete fn; }

PSA_API const char* psa_function_label(const psa_function* fn) { return fn ? fn->label.c_str() : ""; }

PSA_API psa_status psa_function_info_get(const psa_function* fn, psa_function_info* info) {
  PSA_REQUIRE(fn != nullptr && info != nullptr);
  info->monotone = static_cast<psa_monotone>(fn->spec.monotone());
  info->growth = static_cast<psa_growth>(fn->spec.growth());
  info->has_closed_main = fn->closed_main ? 1 : 0;
  return PSA_OK;
}

PSA_API psa_status psa_function_eval(const psa_function* fn, double t, double* value, double* deriv) {
  PSA_REQUIRE(fn != nullptr);
  return guarded([&] {
    if (value != nullptr) *value = fn->spec.eval(t);
    if (deriv != nullptr) *deriv = fn->spec.deriv(t);
  });
}

PSA_API psa_status psa_function_validate(const psa_function* fn, size_t* violations) {
  PSA_REQUIRE(fn != nullptr && violations != nullptr);
  return guarded([&] { *violations = psa::validate(fn->spec).size(); });
}

PSA_API psa_status psa_integrate(psa_integrand g, void* user, double a, double b, double rel_tol,
                                 psa_quad_result* out) {
  PSA_REQUIRE(g != nullptr && out != nullptr);
  return guarded([&] {
    const auto r = psa::integrate([g, user](double t) { return g(t, user); }, a, b, rel_tol);
    *out = psa_quad_result{r.value, r.abs_error_estimate, r.subdivisions};
  });
}

PSA_API psa_status psa_li_main(const psa_function* fn, double n, double rel_tol, psa_quad_result* out) {
  PSA_REQUIRE(fn != nullptr && out != nullptr);
  return guarded([&] {
    const auto r = psa::li_main(fn->spec, n, rel_tol);
    *out = psa_quad_result{r.value, r.abs_error_estimate, r.subdivisions};
  });
}

PSA_API psa_status psa_parts_identity_check(const psa_function* fn, double n, psa_parts_identity* out) {
  PSA_REQUIRE(fn != nullptr && out != nullptr);
  return guarded([&] {
    const auto r = psa::parts_identity(fn->spec, n);
    *out = psa_parts_identity{r.lhs, r.rhs, r.rel_diff};
  });
}

PSA_API psa_status psa_exact_sum_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                         psa_exact_sum* out) {
  PSA_REQUIRE(engine != nullptr && fn != nullptr && out != nullptr);
  return guarded([&] { fill(psa::exact_sum(fn->spec, n, engine->engine), out); });
}

PSA_API psa_status psa_abel_sum_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                        psa_exact_sum* out) {
  PSA_REQUIRE(engine != nullptr && fn != nullptr && out != nullptr);
  return guarded([&] { fill(psa::abel_sum(fn->spec, n, engine->engine), out); });
}

PSA_API psa_status psa_log_product_primes(const psa_engine* engine, uint64_t n, double* out) {
  PSA_REQUIRE(engine != nullptr && out != nullptr);
  return guarded([&] { *out = psa::log_product_primes(n, engine->engine); });
}

PSA_API void psa_model_default(psa_model* model) {
  if (model == nullptr) return;
  const psa::ErrorModel defaults;
  *model = psa_model{PSA_MODEL_CRUDE, defaults.c, defaults.c1, defaults.c2, defaults.epsilon, defaults.theta};
}

PSA_API psa_status psa_estimate_compute(const psa_function* fn, double n, const psa_model* model,
                                        psa_estimate* out) {
  PSA_REQUIRE(fn != nullptr && out != nullptr);
  return guarded([&] {
    const auto est = psa::estimate(fn->spec, n, to_model(model));
    *out = psa_estimate{est.n, est.main, est.bound};
  });
}

PSA_API psa_status psa_closed_main(const psa_function* fn, double n, double* out, int* supported) {
  PSA_REQUIRE(fn != nullptr && out != nullptr && supported != nullptr);
  return guarded([&] {
    const auto v = psa::closed_main(fn->spec, n);
    *supported = v ? 1 : 0;
    if (v) *out = *v;
  });
}

PSA_API psa_status psa_product_bound_log(double n, const psa_model* model, double* out) {
  PSA_REQUIRE(out != nullptr);
  return guarded([&] { *out = psa::product_bound_log(n, to_model(model)); });
}

PSA_API psa_status psa_consistency_transform(const psa_function* fn, double n, psa_consistency* out) {
  PSA_REQUIRE(fn != nullptr && out != nullptr);
  return guarded([&] {
    const auto r = psa::consistency_transform(fn->spec, n);
    *out = psa_consistency{r.main_li,     r.main_crude,  r.difference,
                           r.predicted_difference, r.crude_bound, r.bound_ratio,
                           r.within_crude_bound ? 1 : 0};
  });
}

PSA_API psa_status psa_b_sum(uint64_t n, double* out) {
  PSA_REQUIRE(out != nullptr);
  return guarded([&] { *out = psa::b_sum(n).value; });
}

PSA_API psa_status psa_default_grid(uint64_t* grid, size_t capacity, size_t* len) {
  PSA_REQUIRE(len != nullptr);
  return copy_grid(psa::default_grid(), grid, capacity, len);
}

PSA_API psa_status psa_default_prime_grid(uint64_t* grid, size_t capacity, size_t* len) {
  PSA_REQUIRE(len != nullptr);
  return copy_grid(psa::default_prime_grid(), grid, capacity, len);
}

PSA_API psa_status psa_check_sufficient(const psa_function* fn, const uint64_t* grid, size_t len,
                                        psa_report** out) {
  PSA_REQUIRE(fn != nullptr && grid != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    auto report = psa::check_sufficient(fn->spec, to_grid(grid, len));
    *out = new psa_report{std::move(report.conditions)};
  });
}

PSA_API psa_status psa_check_necessary(const psa_function* fn, const uint64_t* primes, size_t len,
                                       psa_report** out) {
  PSA_REQUIRE(fn != nullptr && primes != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    auto report = psa::check_necessary(fn->spec, to_grid(primes, len));
    *out = new psa_report{std::move(report.conditions)};
  });
}

PSA_API psa_status psa_check_monotone_increasing(const psa_function* fn, psa_report** out) {
  PSA_REQUIRE(fn != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    auto check = psa::check_monotone_increasing(fn->spec);
    psa::ConditionResult result{"increasing_unbounded", check.verdict, std::move(check.probe), check.note};
    *out = new psa_report{{std::move(result)}};
  });
}

PSA_API psa_status psa_ratio_trail(const psa_engine* engine, const psa_function* fn, const uint64_t* grid,
                                   size_t len, psa_report** out) {
  PSA_REQUIRE(engine != nullptr && fn != nullptr && grid != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    auto trail = psa::ratio_trail(fn->spec, to_grid(grid, len), engine->engine);
    *out = new psa_report{{std::move(trail)}};
  });
}

PSA_API void psa_report_destroy(psa_report* report) { delete report; }

PSA_API size_t psa_report_condition_count(const psa_report* report) {
  return report ? report->conditions.size() : 0;
}

PSA_API const char* psa_report_condition_name(const psa_report* report, size_t i) {
  if (!report || i >= report->conditions.size()) return "";
  return report->conditions[i].name.c_str();
}

PSA_API psa_verdict psa_report_condition_verdict(const psa_report* report, size_t i) {
  if (!report || i >= report->conditions.size()) return PSA_INCONCLUSIVE;
  return static_cast<psa_verdict>(report->conditions[i].verdict);
}

PSA_API const char* psa_report_condition_note(const psa_report* report, size_t i) {
  if (!report || i >= report->conditions.size()) return "";
  return report->conditions[i].note.c_str();
}

PSA_API int psa_report_condition_log_scale(const psa_report* report, size_t i) {
  if (!report || i >= report->conditions.size()) return 0;
  return report->conditions[i].log_scale ? 1 : 0;
}

PSA_API size_t psa_report_evidence_count(const psa_report* report, size_t i) {
  if (!report || i >= report->conditions.size()) return 0;
  return report->conditions[i].evidence.size();
}

PSA_API psa_status psa_report_evidence(const psa_report* report, size_t i, size_t j, double* n, double* statistic) {
  PSA_REQUIRE(report != nullptr && n != nullptr && statistic != nullptr);
  if (i >= report->conditions.size() || j >= report->conditions[i].evidence.size())
    return fail(PSA_ERR_INVALID_ARGUMENT, "evidence index out of range");
  *n = report->conditions[i].evidence[j].n;
  *statistic = report->conditions[i].evidence[j].statistic;
  return PSA_OK;
}

PSA_API int psa_report_any_fails(const psa_report* report) {
  if (!report) return 0;
  return std::any_of(report->conditions.begin(), report->conditions.end(),
                     [](const psa::ConditionResult& c) { return c.verdict == psa::Verdict::fails; })
             ? 1
             : 0;
}

PSA_API const char* psa_verdict_name(psa_verdict verdict) {
  return psa::to_string(static_cast<psa::Verdict>(verdict));
}

PSA_API psa_status psa_table_row_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                         const psa_model* model, psa_table_row* out) {
  PSA_REQUIRE(engine != nullptr && fn != nullptr && out != nullptr);
  return guarded([&] {
    const auto& spec = fn->spec;
    if (spec.growth() == psa::Growth::exponential)
      throw psa::Error(psa::ErrorCode::hypothesis_violation,
                       spec.label() + " grows exponentially; its sums are only available in log space");
    auto m = to_model(model);
    const double x = static_cast<double>(n);
    const auto exact = psa::exact_sum(spec, n, engine->engine);
    const auto crude = psa::estimate_crude(spec, x, m);
    const auto pnt = psa::estimate_pnt(spec, x, m);
    const auto rh = psa::estimate_rh(spec, x, m);
    const double err = exact.value - pnt.main;
    *out = psa_table_row{n,
                         exact.value,
                         crude.main,
                         crude.bound,
                         pnt.main,
                         pnt.bound,
                         rh.bound,
                         exact.value / pnt.main,
                         err,
                         std::fabs(err) / pnt.bound,
                         std::fabs(err) / rh.bound};
  });
}

PSA_API psa_status psa_product_row_compute(const psa_engine* engine, uint64_t n, const psa_model* model,
                                           psa_product_row* out) {
  PSA_REQUIRE(engine != nullptr && out != nullptr);
  return guarded([&] {
    auto m = to_model(model);
    const double x = static_cast<double>(n);
    const double theta = psa::log_product_primes(n, engine->engine);
    m.kind = psa::ModelKind::crude;
    const double crude = psa::product_bound_log(x, m);
    m.kind = psa::ModelKind::rh;
    const double rh = psa::product_bound_log(x, m);
    *out = psa_product_row{n, theta, crude, rh, std::min(crude, rh) - theta};
  });
}

}  // extern "C"
