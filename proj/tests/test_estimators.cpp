#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "psa/error.hpp"
#include "psa/estimators.hpp"
#include "psa/summation.hpp"

using namespace psa;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected psa::Error");
  return ErrorCode::invalid_argument;
}

double piece_total(const AsymptoticEstimate& est, Piece::Role role) {
  double total = 0.0;
  for (const auto& p : est.pieces) {
    if (p.role == role) total += p.value;
  }
  return total;
}

std::vector<FunctionSpec> monotone_catalog() {
  return {builtin("one"), builtin("log"), builtin("recip"), builtin("power", {.m = 1.0}),
          builtin("power", {.m = 0.5})};
}

ErrorModel with_kind(ModelKind kind) {
  ErrorModel m;
  m.kind = kind;
  return m;
}

}  // namespace

TEST_CASE("crude estimate for f = 1") {
  for (const double n : {1e3, 1e6, 1e9}) {
    const auto est = estimate_crude(builtin("one"), n);
    const double L = std::log(n);
    CHECK(est.main == doctest::Approx(n / L).epsilon(1e-14));
    CHECK(est.bound == doctest::Approx(n / (L * L)).epsilon(1e-14));
    CHECK(est.model.kind == ModelKind::crude);
  }
  CHECK(estimate_crude(builtin("one"), 1e6).main == doctest::Approx(72382.4).epsilon(1e-6));
}

TEST_CASE("crude estimate for power m=1") {
  const auto est = estimate_crude(builtin("power", {.m = 1.0}), 1e6);
  const double expected = 1e12 / std::log(1e6) - 37607950277.8372804;
  CHECK(oracle::rel_diff(est.main, expected) <= 1e-9);
  CHECK(est.pieces.size() == 4);
}

TEST_CASE("crude estimate does not need monotonicity") {
  const auto est = estimate_crude(builtin("log_over_t"), 1e5);
  CHECK(std::isfinite(est.main));
  CHECK(est.bound > 0);
}

TEST_CASE("pnt estimate examples") {
  const double n = 1e6;
  const auto one = estimate_pnt(builtin("one"), n);
  CHECK(oracle::rel_diff(one.main, 78626.5039956820644) <= 1e-9);
  CHECK(one.bound == doctest::Approx(n * std::exp(-std::sqrt(std::log(n)))).epsilon(1e-14));

  const auto log = estimate_pnt(builtin("log"), n);
  CHECK(log.main == doctest::Approx(n - 2).epsilon(1e-10));
  const double boundary = std::log(n) * n * std::exp(-std::sqrt(std::log(n)));
  CHECK(log.pieces[1].value == doctest::Approx(boundary).epsilon(1e-14));
  CHECK(log.pieces[1].value > log.pieces[2].value);

  const auto recip = estimate_pnt(builtin("recip"), n);
  CHECK(oracle::rel_diff(recip.main, 2.99230483505767513) <= 1e-9);
  CHECK(oracle::rel_diff(recip.main, std::log(std::log(n)) - std::log(std::log(2.0))) <= 1e-9);
}

TEST_CASE("theta changes the pnt exponent") {
  ErrorModel model;
  model.theta = 0.6;
  const auto est = estimate_pnt(builtin("one"), 1e6, model);
  CHECK(est.bound == doctest::Approx(1e6 * std::exp(-std::pow(std::log(1e6), 0.6))).epsilon(1e-14));
  CHECK(est.model.theta == 0.6);
}

TEST_CASE("rh estimate examples") {
  const auto one = estimate_rh(builtin("one"), 1e4);
  CHECK(one.bound == doctest::Approx(100 * std::log(1e4)).epsilon(1e-14));
  CHECK(one.bound == doctest::Approx(921.034).epsilon(1e-6));
  CHECK(one.main == estimate_pnt(builtin("one"), 1e4).main);

  const double n = 1e6;
  const auto log = estimate_rh(builtin("log"), n);
  const auto anti = [](double t) { return 2 * std::sqrt(t) * (std::log(t) - 2); };
  const double expected = std::sqrt(n) * std::log(n) * std::log(n) + anti(n) - anti(2);
  CHECK(oracle::rel_diff(log.bound, expected) <= 1e-6);
  for (const auto& p : log.pieces) CHECK(p.value > 0);
}

TEST_CASE("pnt and rh share the main term") {
  for (const auto& f : monotone_catalog()) {
    for (const double n : {1e3, 1e5, 1e7}) CHECK(estimate_pnt(f, n).main == estimate_rh(f, n).main);
  }
}

TEST_CASE("pieces sum to main and bound") {
  for (const auto& f : monotone_catalog()) {
    for (const auto kind : {ModelKind::crude, ModelKind::pnt, ModelKind::rh}) {
      for (const double n : {1e3, 1e6}) {
        const auto est = estimate(f, n, with_kind(kind));
        CHECK(est.model.kind == kind);
        CHECK(oracle::rel_diff(piece_total(est, Piece::Role::main), est.main) <= 1e-12);
        CHECK(oracle::rel_diff(piece_total(est, Piece::Role::bound), est.bound) <= 1e-12);
        CHECK(est.bound >= 0.0);
      }
    }
  }
}

TEST_CASE("hypothesis and argument errors") {
  CHECK(code_of([] { estimate_pnt(builtin("log_over_t"), 1e4); }) == ErrorCode::hypothesis_violation);
  CHECK(code_of([] { estimate_rh(builtin("log_over_t"), 1e4); }) == ErrorCode::hypothesis_violation);
  CHECK(code_of([] { estimate_pnt(builtin("exp2"), 1e6); }) == ErrorCode::overflow);
  CHECK(code_of([] { estimate_crude(builtin("one"), 2.0); }) == ErrorCode::invalid_argument);
  ErrorModel bad;
  bad.c = 0;
  CHECK(code_of([&] { estimate_pnt(builtin("one"), 1e4, bad); }) == ErrorCode::invalid_argument);
  bad = {};
  bad.epsilon = 0.5;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  bad = {};
  bad.theta = 1.5;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  bad = {};
  bad.c2 = -1;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  CHECK_NOTHROW(ErrorModel{}.validate());
}

TEST_CASE("exact sum over the li main term converges to 1") {
  PrimeEngine engine([] {
    EngineConfig c;
    c.segment_odds = 1 << 16;
    return c;
  }());
  auto distances = [&](const FunctionSpec& f) {
    std::vector<double> distance;
    for (const Integer n : {Integer{1000}, Integer{10'000}, Integer{100'000}, Integer{1'000'000}}) {
      const double ratio = exact_sum(f, n, engine).value / estimate_pnt(f, static_cast<double>(n)).main;
      distance.push_back(std::fabs(ratio - 1.0));
    }
    return distance;
  };
  for (const auto& f : monotone_catalog()) {
    if (f.family() == Family::power && f.params().m == 1.0) continue;
    const auto distance = distances(f);
    CAPTURE(f.label());
    CHECK(distance[2] < distance[1]);
    CHECK(distance[3] < distance[2]);
  }

  // For f = t the prime-counting fluctuation dominates at this scale: the sum
  // of primes sits 0.145% below the integral at 10^5 but 0.153% below at 10^6.
  const auto p1 = distances(builtin("power", {.m = 1.0}));
  CHECK(p1[2] < p1[1]);
  CHECK(p1[2] == doctest::Approx(0.00144834).epsilon(1e-4));
  CHECK(p1[3] == doctest::Approx(0.00153022).epsilon(1e-4));
  CHECK(p1[3] < 0.01);
}

TEST_CASE("bounds decay relative to the main term") {
  const std::vector<double> grid{1e3, 1e4, 1e5, 1e6, 1e7};
  for (const auto kind : {ModelKind::pnt, ModelKind::rh}) {
    for (const auto& f : monotone_catalog()) {
      std::vector<double> rel;
      for (const double n : grid) {
        const auto est = estimate(f, n, with_kind(kind));
        rel.push_back(est.bound / std::fabs(est.main));
      }
      CAPTURE(f.label());
      CAPTURE(to_string(kind));
      CHECK(rel.back() < rel.front());
      if (f.family() == Family::one) {
        for (std::size_t i = 2; i < rel.size(); ++i) CHECK(rel[i] < rel[i - 1]);
      }
    }
  }
}

TEST_CASE("rh bound overtakes pnt bound for f = 1") {
  double previous = INFINITY;
  for (const double n : {1e6, 1e8, 1e10, 1e12}) {
    const double ratio = estimate_rh(builtin("one"), n).bound / estimate_pnt(builtin("one"), n).bound;
    const double L = std::log(n);
    CHECK(ratio == doctest::Approx(std::exp(std::sqrt(L) + std::log(L) - L / 2)).epsilon(1e-12));
    CHECK(ratio < previous);
    previous = ratio;
  }
}

TEST_CASE("closed_main examples") {
  const double n = 1e6;
  CHECK(*closed_main(builtin("power", {.m = 1.0}), n) == doctest::Approx(1e12 / (2 * std::log(n))));
  CHECK(*closed_main(builtin("power", {.m = 1.0}), n) == doctest::Approx(3.6191e10).epsilon(1e-4));
  CHECK(*closed_main(builtin("one"), n) == doctest::Approx(72382.4).epsilon(1e-6));
  CHECK(*closed_main(builtin("recip"), std::exp(std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*closed_main(builtin("log"), n) == n);
  CHECK(*closed_main(builtin("log_over_t"), n) == doctest::Approx(std::log(n)));
  CHECK(*closed_main(builtin("power_log", {.m = 1.0, .k = 2.0}), n) ==
        doctest::Approx(n * n * std::log(n) / 2));
  CHECK_FALSE(closed_main(builtin("exp2"), n).has_value());
}

TEST_CASE("closed form tracks quadrature to within 3/log n") {
  for (const double m : {0.0, 1.0, 2.0}) {
    const auto f = builtin("power", {.m = m});
    for (const double n : {1e4, 1e6}) {
      const double rel = std::fabs(*closed_main(f, n) / li_main(f, n).value - 1.0);
      CAPTURE(m);
      CAPTURE(n);
      CHECK(rel <= 3.0 / std::log(n));
    }
  }
}

TEST_CASE("product_bound_log examples") {
  ErrorModel crude;
  CHECK(product_bound_log(10, crude) == doctest::Approx(10 + 10 / std::log(10.0)));
  CHECK(product_bound_log(10, crude) == doctest::Approx(14.343).epsilon(1e-4));
  CHECK(product_bound_log(10, crude) > std::log(210.0));
  ErrorModel rh = with_kind(ModelKind::rh);
  CHECK(product_bound_log(1e6, rh) == doctest::Approx(1e6 + std::pow(1e6, 0.55)));
  CHECK(product_bound_log(1e6, rh) - 1e6 == doctest::Approx(1995.26).epsilon(1e-5));
  CHECK(product_bound_log(2, crude) > std::log(2.0));
  CHECK(product_bound_log(2, rh) > std::log(2.0));
  CHECK(product_bound_log(1e6, with_kind(ModelKind::pnt)) == product_bound_log(1e6, crude));
  CHECK_THROWS_AS(product_bound_log(1.5, crude), Error);
}

TEST_CASE("consistency transform") {
  for (const auto& f : monotone_catalog()) {
    for (const double n : {1e3, 1e5, 1e7}) {
      const auto c = consistency_transform(f, n);
      CAPTURE(f.label());
      CAPTURE(n);
      CHECK(c.difference == doctest::Approx(c.predicted_difference).epsilon(1e-7));
      if (f.family() == Family::one) {
        // the difference is n/log^2 n (1 + 2/log n + ...), just above the crude bound
        CHECK(c.bound_ratio > 1.0);
        CHECK(c.bound_ratio < 1.0 + 4.0 / std::log(n));
      } else {
        CHECK(c.within_crude_bound);
      }
    }
  }
}
