#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "psa/conditions.hpp"
#include "psa/error.hpp"
#include "psa/quadrature.hpp"

using namespace psa;

namespace {

PrimeEngine& engine() {
  static PrimeEngine instance([] {
    EngineConfig config;
    config.segment_odds = 1 << 18;
    return config;
  }());
  return instance;
}

// sum_{k=2}^{p} f(k)/log k in long double
template <class F>
long double smooth_sum(F&& f, Integer p) {
  long double s = 0.0L;
  for (Integer k = 2; k <= p; ++k) s += f(static_cast<long double>(k)) / std::log(static_cast<long double>(k));
  return s;
}

std::vector<FunctionSpec> admissible() {
  return {builtin("recip"), builtin("log"), builtin("power", {.m = 1.0}), builtin("log_over_t"),
          builtin("power", {.m = 0.5})};
}

}  // namespace

TEST_CASE("b_sum examples") {
  CHECK(b_sum(2).value == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-15));
  CHECK(b_sum(2).value == doctest::Approx(1.442695).epsilon(1e-6));
  CHECK(b_sum(3).value == doctest::Approx(2.35293426751580080).epsilon(1e-15));
  const double li = integrate([](double t) { return 1.0 / std::log(t); }, 2, 1e6, 1e-10).value;
  CHECK(std::fabs(b_sum(1'000'000).value / li - 1.0) <= 0.005);
  CHECK_THROWS_AS(b_sum(1), Error);
}

TEST_CASE("b_sums is strictly increasing and bounded below") {
  const std::vector<Integer> grid{2, 3, 10, 57, 1000, 4321, 100'000};
  const auto sums = b_sums(grid);
  REQUIRE(sums.size() == grid.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    CHECK(sums[i].n == grid[i]);
    CHECK(sums[i].value >= 1.0 / std::log(static_cast<double>(grid[i])));
    CHECK(sums[i].value == doctest::Approx(b_sum(grid[i]).value).epsilon(1e-14));
    if (i > 0) CHECK(sums[i].value > sums[i - 1].value);
  }
  CHECK_THROWS_AS(b_sums({10, 10}), Error);
}

TEST_CASE("B(n)/pi(n) tends to 1") {
  const auto sums = b_sums({100'000, 1'000'000, 10'000'000});
  const double r5 = sums[0].value / static_cast<double>(engine().prime_count(100'000));
  const double r6 = sums[1].value / static_cast<double>(engine().prime_count(1'000'000));
  const double r7 = sums[2].value / static_cast<double>(engine().prime_count(10'000'000));
  CHECK(r6 >= 0.99);
  CHECK(r6 <= 1.03);
  CHECK(std::fabs(r7 - 1) < std::fabs(r5 - 1));
}

TEST_CASE("default grids") {
  CHECK(default_grid() == std::vector<Integer>{1000, 10'000, 100'000, 1'000'000, 10'000'000});
  const auto primes = default_prime_grid();
  CHECK(primes == std::vector<Integer>{1009, 10'007, 100'003, 1'000'003, 10'000'019});
  for (std::size_t i = 0; i < primes.size(); ++i) {
    CHECK(oracle::is_prime(primes[i]));
    for (Integer k = default_grid()[i]; k < primes[i]; ++k) CHECK_FALSE(oracle::is_prime(k));
  }
}

TEST_CASE("sufficient conditions for recip") {
  const auto report = check_sufficient(builtin("recip"), default_grid());
  CHECK_FALSE(report.any_fails());
  const auto& c1 = report.at("ratio_away_from_one");
  CHECK(c1.verdict == Verdict::holds);
  // S(n) / (1/log n) = -log n (log log n - log log 2), unbounded and far from 1
  for (const auto& e : c1.evidence) {
    const double expected = -std::log(e.n) * (std::log(std::log(e.n)) - std::log(std::log(2.0)));
    CHECK(e.statistic == doctest::Approx(expected).epsilon(1e-8));
  }
  for (std::size_t i = 1; i < c1.evidence.size(); ++i)
    CHECK(c1.evidence[i].statistic < c1.evidence[i - 1].statistic);
  CHECK(report.at("monotone_nonzero_derivative").verdict == Verdict::holds);
  const auto& c3 = report.at("integral_diverges");
  CHECK(c3.verdict == Verdict::holds);
  // S(n) = -(log log n - log log 2)
  for (const auto& e : c3.evidence) {
    CHECK(e.statistic == doctest::Approx(-(std::log(std::log(e.n)) - std::log(std::log(2.0)))).epsilon(1e-8));
  }
}

TEST_CASE("sufficient conditions for power m=1") {
  const auto report = check_sufficient(builtin("power", {.m = 1.0}), default_grid());
  CHECK_FALSE(report.any_fails());
  for (const auto& c : report.conditions) CHECK(c.verdict == Verdict::holds);
  const auto& c1 = report.at("ratio_away_from_one");
  CHECK(c1.evidence.back().statistic == doctest::Approx(0.5).epsilon(0.1));
  for (std::size_t i = 1; i < c1.evidence.size(); ++i)
    CHECK(std::fabs(c1.evidence[i].statistic - 0.5) < std::fabs(c1.evidence[i - 1].statistic - 0.5));
}

TEST_CASE("constant f is degenerate-convergent") {
  for (const auto& f : {builtin("one"), builtin("power", {.m = 0.0})}) {
    const auto report = check_sufficient(f, default_grid());
    REQUIRE(report.conditions.size() == 3);
    for (const auto& c : report.conditions) {
      CHECK(c.verdict == Verdict::degenerate_convergent);
      CHECK(c.evidence.size() == default_grid().size());
    }
    CHECK_FALSE(report.any_fails());
  }
}

TEST_CASE("no admissible catalog function fails the sufficient conditions") {
  for (const auto& f : admissible()) {
    const auto report = check_sufficient(f, default_grid());
    CAPTURE(f.label());
    CHECK_FALSE(report.any_fails());
    for (const auto& c : report.conditions) CHECK(c.evidence.size() >= 4);
  }
  const auto lot = check_sufficient(builtin("log_over_t"), default_grid());
  CHECK(lot.at("monotone_nonzero_derivative").verdict == Verdict::inconclusive);
}

TEST_CASE("exp2 fails condition 1 and is evaluated in log space") {
  const auto report = check_sufficient(builtin("exp2"), default_grid());
  CHECK(report.at("ratio_away_from_one").verdict == Verdict::fails);
  const auto& c3 = report.at("integral_diverges");
  CHECK(c3.log_scale);
  for (const auto& e : c3.evidence) CHECK(std::isfinite(e.statistic));
  // log S(n) ~ n log 2 + log n - log log n
  CHECK(c3.evidence.back().statistic ==
        doctest::Approx(1e7 * std::log(2.0) + std::log(1e7) - std::log(std::log(1e7))).epsilon(1e-9));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(check_sufficient(builtin("recip"), {1000, 10'000, 100'000}), Error);
  CHECK_THROWS_AS(check_sufficient(builtin("recip"), {1000, 10'000, 10'000, 100'000}), Error);
  CHECK_THROWS_AS(check_necessary(builtin("recip"), {11, 13, 15, 17}), Error);
  CHECK_THROWS_AS(check_necessary(builtin("recip"), {11, 13, 17}), Error);
  CHECK_THROWS_AS(ratio_trail(builtin("recip"), {1000, 100, 10'000, 100'000}, engine()), Error);
}

TEST_CASE("threshold overrides change verdicts") {
  ConditionThresholds strict;
  strict.ratio_distance = 0.6;
  const auto report = check_sufficient(builtin("power", {.m = 1.0}), default_grid(), strict);
  CHECK(report.at("ratio_away_from_one").verdict == Verdict::inconclusive);
}

TEST_CASE("monotone increasing check") {
  const auto p2 = check_monotone_increasing(builtin("power", {.m = 2.0}));
  CHECK(p2.verdict == Verdict::holds);
  for (const auto& e : p2.probe) CHECK(e.statistic == doctest::Approx(0.5).epsilon(1e-12));

  const auto log = check_monotone_increasing(builtin("log"));
  CHECK(log.verdict == Verdict::holds);
  for (const auto& e : log.probe) CHECK(e.statistic == doctest::Approx(std::log(e.n)).epsilon(1e-12));

  CHECK(check_monotone_increasing(builtin("recip")).verdict == Verdict::fails);
  CHECK(check_monotone_increasing(builtin("one")).verdict == Verdict::fails);
  // f/(n f') = 1/(n log 2) -> 0
  CHECK(check_monotone_increasing(builtin("exp2")).verdict == Verdict::fails);
}

TEST_CASE("necessary condition examples") {
  const auto one = check_necessary(builtin("one"), default_prime_grid());
  CHECK(one.at("necessary_ratio_to_zero").verdict == Verdict::holds);
  for (const auto& e : one.conditions[0].evidence)
    CHECK(e.statistic == doctest::Approx(1.0 / b_sum(static_cast<Integer>(e.n)).value).epsilon(1e-12));

  const auto recip = check_necessary(builtin("recip"), {101, 1009, 10'007, 100'003});
  CHECK(recip.conditions[0].verdict == Verdict::holds);
  for (const auto& e : recip.conditions[0].evidence) {
    const auto p = static_cast<Integer>(e.n);
    const double direct = static_cast<double>((1.0L / p) / smooth_sum([](long double t) { return 1.0L / t; }, p));
    CHECK(e.statistic == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(recip.conditions[0].evidence[0].statistic == doctest::Approx(0.00425833076059906614).epsilon(1e-12));

  const auto exp2 = check_necessary(builtin("exp2"), {11, 101, 997, 10'007});
  const auto& r = exp2.conditions[0];
  CHECK(r.verdict == Verdict::fails);
  CHECK(r.evidence[0].statistic == doctest::Approx(1.13720529215877231).epsilon(1e-12));
  CHECK(r.evidence[2].statistic > r.evidence[0].statistic);
  // r(p) ~ log(p)/2
  CHECK(r.evidence[3].statistic / (std::log(10'007.0) / 2) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("log-space r(p) for exp2 agrees with direct evaluation at p <= 30") {
  const std::vector<Integer> primes{11, 13, 17, 19, 23, 29};
  const auto report = check_necessary(builtin("exp2"), primes);
  const auto& ev = report.conditions[0].evidence;
  REQUIRE(ev.size() == primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const Integer p = primes[i];
    const long double direct = std::exp2(static_cast<long double>(p)) /
                               smooth_sum([](long double t) { return std::exp2(t); }, p);
    CHECK(std::fabs(ev[i].statistic / static_cast<double>(direct) - 1.0) <= 1e-9);
  }
}

TEST_CASE("prime-sum ratio trail") {
  const std::vector<Integer> grid{1000, 10'000, 100'000, 1'000'000};
  for (const auto& f : {builtin("one"), builtin("log"), builtin("log_over_t"), builtin("power", {.m = 1.0})}) {
    const auto trail = ratio_trail(f, grid, engine());
    CAPTURE(f.label());
    CHECK(std::fabs(trail.evidence.back().statistic - 1.0) <= 0.1);
    // f = t: |ratio - 1| ticks up from 10^5 to 10^6 with the prime fluctuation
    CHECK(trail.verdict == (f.family() == Family::power ? Verdict::inconclusive : Verdict::holds));
  }

  // Both recip sums grow like log log n with different constants, so the ratio
  // creeps toward 1 far more slowly.
  const auto recip = ratio_trail(builtin("recip"), grid, engine());
  CHECK(recip.evidence.back().statistic == doctest::Approx(0.8441).epsilon(1e-3));
  for (std::size_t i = 1; i < recip.evidence.size(); ++i)
    CHECK(recip.evidence[i].statistic > recip.evidence[i - 1].statistic);
  CHECK(recip.verdict == Verdict::holds);

  // direct check of one grid point
  const auto primes = oracle::primes_up_to(10'000);
  long double num = 0.0L;
  for (const auto p : primes) num += std::log(static_cast<long double>(p));
  const long double den = smooth_sum([](long double t) { return std::log(t); }, 10'000);
  const auto log_trail = ratio_trail(builtin("log"), grid, engine());
  CHECK(log_trail.evidence[1].statistic == doctest::Approx(static_cast<double>(num / den)).epsilon(1e-12));
}

TEST_CASE("exp2 prime-sum ratio diverges from 1") {
  const auto trail = ratio_trail(builtin("exp2"), {101, 1009, 10'007, 100'003}, engine());
  CHECK(trail.verdict == Verdict::fails);
  for (const auto& e : trail.evidence) CHECK(std::isfinite(e.statistic));
  CHECK(std::fabs(trail.evidence.back().statistic - 1.0) >= 0.5);
}
