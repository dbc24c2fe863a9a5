#include "psa/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psa/error.hpp"
#include "psa/quadrature.hpp"
#include "psa/summation.hpp"

namespace psa {

namespace {

constexpr std::size_t kMinGridPoints = 4;
constexpr Integer kMaxGrid = 1'000'000'000;
constexpr double kSlack = 1e-9;

void validate_grid(const std::vector<Integer>& grid, Integer min_value, const char* what) {
  if (grid.size() < kMinGridPoints)
    throw Error(ErrorCode::invalid_argument, std::string(what) + " needs at least 4 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < min_value || grid[i] > kMaxGrid)
      throw Error(ErrorCode::invalid_argument,
                  std::string(what) + " point " + std::to_string(grid[i]) + " is out of range");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw Error(ErrorCode::invalid_argument, std::string(what) + " must be strictly increasing");
  }
}

bool is_prime_trial(Integer n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (Integer d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

double decades(double from, double to) { return std::log10(to / from); }

std::size_t top_half_start(std::size_t size) { return size / 2; }

// log|S| and sign of S = int_2^n t f'(t)/log t dt, with the integrand scaled
// by 1/|f(n)| so exponential f stays representable. Also returns the
// condition-1 ratio S / (n f(n) / log n).
struct SlopeIntegral {
  SignedLog log_integral;
  double ratio;
};

SlopeIntegral slope_integral(const FunctionSpec& spec, double n) {
  const SignedLog f_n = spec.log_eval(n);
  if (f_n.sign == 0) throw Error(ErrorCode::invalid_argument, spec.label() + " vanishes at n");
  const double scale = f_n.log_abs;
  const auto scaled = integrate(
      [&spec, scale](double t) {
        const SignedLog d = spec.log_deriv(t);
        if (d.sign == 0) return 0.0;
        return d.sign * std::exp(d.log_abs - scale) * t / std::log(t);
      },
      2.0, n, kMainRelTol);
  const double I = scaled.value;
  SlopeIntegral out;
  out.ratio = I * std::log(n) / n * f_n.sign;
  if (I == 0.0) {
    out.log_integral = SignedLog{-INFINITY, 0};
  } else {
    out.log_integral = SignedLog{std::log(std::fabs(I)) + scale, I > 0 ? 1 : -1};
  }
  return out;
}

Verdict condition_one_verdict(const std::vector<Evidence>& ev, double threshold) {
  const std::size_t start = top_half_start(ev.size());
  bool all_far = true, all_near = true, non_shrinking = true, non_growing = true;
  for (std::size_t i = start; i < ev.size(); ++i) {
    const double d = std::fabs(ev[i].statistic - 1.0);
    all_far = all_far && d >= threshold;
    all_near = all_near && d < threshold;
    if (i > start) {
      const double prev = std::fabs(ev[i - 1].statistic - 1.0);
      non_shrinking = non_shrinking && d >= prev - kSlack * std::max(1.0, prev);
      non_growing = non_growing && d <= prev + kSlack * std::max(1.0, prev);
    }
  }
  if (all_far && non_shrinking) return Verdict::holds;
  if (all_near && non_growing) return Verdict::fails;
  return Verdict::inconclusive;
}

// Divergence of |S| from log-magnitudes. "holds" when |S| increases at every
// step and either grows by the configured fraction per decade or its
// per-decade increments decay no faster than 1/log n (harmonic comparison,
// which still diverges, like log log n).
Verdict condition_three_verdict(const std::vector<Integer>& grid, const std::vector<SignedLog>& s,
                                double growth) {
  bool increasing = true, geometric = true;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double step = s[i + 1].log_abs - s[i].log_abs;
    increasing = increasing && s[i].sign != 0 && step > 0.0;
    geometric = geometric && step >= decades(double(grid[i]), double(grid[i + 1])) * std::log1p(growth);
  }
  if (increasing && geometric) return Verdict::holds;

  if (increasing) {
    bool harmonic = true;
    double previous = -INFINITY;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double a = std::exp(s[i].log_abs);
      const double b = std::exp(s[i + 1].log_abs);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        harmonic = false;
        break;
      }
      const double per_decade = (b - a) / decades(double(grid[i]), double(grid[i + 1]));
      const double scaled = per_decade * std::log(double(grid[i]));
      harmonic = harmonic && scaled >= previous * (1.0 - kSlack);
      previous = scaled;
    }
    if (harmonic) return Verdict::holds;
  }

  bool stalled = true;
  for (std::size_t i = top_half_start(s.size()); i + 1 < s.size(); ++i)
    stalled = stalled && (s[i + 1].sign == 0 || s[i + 1].log_abs <= s[i].log_abs);
  return stalled ? Verdict::fails : Verdict::inconclusive;
}

}  // namespace

const char* to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::degenerate_convergent: return "degenerate-convergent";
  }
  return "unknown";
}

bool ConditionReport::any_fails() const {
  return std::any_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.verdict == Verdict::fails; });
}

const ConditionResult& ConditionReport::at(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw Error(ErrorCode::invalid_argument, "no condition named " + name);
}

BSum b_sum(Integer n) {
  if (n < 2) throw Error(ErrorCode::invalid_range, "b_sum requires n >= 2");
  return b_sums({n}).front();
}

std::vector<BSum> b_sums(const std::vector<Integer>& grid) {
  std::vector<BSum> out;
  out.reserve(grid.size());
  CompensatedSum acc;
  Integer k = 2;
  for (const Integer n : grid) {
    if (n < 2 || (!out.empty() && n <= out.back().n))
      throw Error(ErrorCode::invalid_argument, "b_sums grid must be increasing and >= 2");
    for (; k <= n; ++k) acc.add(1.0 / std::log(static_cast<double>(k)));
    out.push_back({n, acc.value()});
  }
  return out;
}

std::vector<Integer> default_grid() { return {1'000, 10'000, 100'000, 1'000'000, 10'000'000}; }

std::vector<Integer> default_prime_grid() {
  std::vector<Integer> out;
  for (Integer n : default_grid()) {
    while (!is_prime_trial(n)) ++n;
    out.push_back(n);
  }
  return out;
}

ConditionReport check_sufficient(const FunctionSpec& spec, const std::vector<Integer>& grid,
                                 const ConditionThresholds& thresholds) {
  validate_grid(grid, 3, "sufficient-condition grid");
  ConditionReport report;
  report.function_id = spec.label();
  report.grid = grid;

  ConditionResult c1{"ratio_away_from_one", Verdict::inconclusive, {}, {}};
  ConditionResult c2{"monotone_nonzero_derivative", Verdict::inconclusive, {}, {}};
  ConditionResult c3{"integral_diverges", Verdict::inconclusive, {}, {}};

  if (spec.monotone() == Monotone::constant) {
    for (const Integer n : grid) {
      c1.evidence.push_back({double(n), 0.0});
      c2.evidence.push_back({double(n), 0.0});
      c3.evidence.push_back({double(n), 0.0});
    }
    for (auto* c : {&c1, &c2, &c3}) {
      c->verdict = Verdict::degenerate_convergent;
      c->note = "f' == 0: the prime-sum ratio reduces to A(n)/B(n) -> 1";
    }
    report.conditions = {c1, c2, c3};
    return report;
  }

  std::vector<SignedLog> magnitudes;
  const bool log_scale = spec.growth() == Growth::exponential;
  c3.log_scale = log_scale;
  for (const Integer n : grid) {
    const auto s = slope_integral(spec, double(n));
    c1.evidence.push_back({double(n), s.ratio});
    c3.evidence.push_back({double(n), log_scale ? s.log_integral.log_abs : s.log_integral.value()});
    magnitudes.push_back(s.log_integral);
    c2.evidence.push_back({double(n), double(spec.log_deriv(double(n)).sign)});
  }

  c1.verdict = condition_one_verdict(c1.evidence, thresholds.ratio_distance);
  c3.verdict = condition_three_verdict(grid, magnitudes, thresholds.divergence_growth);

  if (spec.monotone() == Monotone::none) {
    c2.verdict = Verdict::inconclusive;
    c2.note = "f is not monotone on [2, inf)";
  } else {
    const int expected = spec.monotone() == Monotone::increasing ? 1 : -1;
    const bool ok = std::all_of(c2.evidence.begin(), c2.evidence.end(),
                                [expected](const Evidence& e) { return e.statistic == expected; });
    c2.verdict = ok ? Verdict::holds : Verdict::fails;
    c2.note = "statistic is sign(f'(n))";
  }
  if (log_scale) c3.note = "statistic is log|integral|";

  report.conditions = {c1, c2, c3};
  return report;
}

MonotoneCheck check_monotone_increasing(const FunctionSpec& spec, const ConditionThresholds& thresholds) {
  MonotoneCheck out;
  std::vector<double> log_f;
  bool positive_slope = true;
  for (int e = 1; e <= 12; ++e) {
    const double n = std::pow(10.0, e);
    const SignedLog f = spec.log_eval(n);
    const SignedLog d = spec.log_deriv(n);
    positive_slope = positive_slope && d.sign > 0;
    log_f.push_back(f.sign > 0 ? f.log_abs : -INFINITY);
    const double q = d.sign > 0 && f.sign != 0 ? f.sign * std::exp(f.log_abs - std::log(n) - d.log_abs) : 0.0;
    out.probe.push_back({n, q});
  }

  if (spec.monotone() != Monotone::increasing || !positive_slope) {
    out.verdict = Verdict::fails;
    out.note = "f is not increasing with f' > 0";
    return out;
  }
  for (std::size_t i = 0; i + 1 < log_f.size(); ++i) {
    if (!(log_f[i + 1] > log_f[i])) {
      out.verdict = Verdict::fails;
      out.note = "f does not grow on the probe grid";
      return out;
    }
  }

  const std::size_t start = top_half_start(out.probe.size());
  bool decreasing = true;
  double min_q = INFINITY;
  for (std::size_t i = start; i < out.probe.size(); ++i) {
    min_q = std::min(min_q, out.probe[i].statistic);
    if (i > start) decreasing = decreasing && out.probe[i].statistic < out.probe[i - 1].statistic;
  }
  const double first = out.probe[start].statistic;
  const double last = out.probe.back().statistic;
  if (decreasing && last < thresholds.increasing_ratio_floor) {
    out.verdict = Verdict::fails;
    out.note = "f/(n f') tends to 0";
  } else if (min_q >= thresholds.increasing_ratio_floor && last >= 0.5 * first) {
    out.verdict = Verdict::holds;
  } else {
    out.verdict = Verdict::inconclusive;
  }
  return out;
}

ConditionReport check_necessary(const FunctionSpec& spec, const std::vector<Integer>& prime_grid,
                                const ConditionThresholds& thresholds) {
  validate_grid(prime_grid, 2, "prime grid");
  for (const Integer p : prime_grid)
    if (!is_prime_trial(p)) throw Error(ErrorCode::invalid_argument, std::to_string(p) + " is not prime");

  ConditionReport report;
  report.function_id = spec.label();
  report.grid = prime_grid;
  ConditionResult r{"necessary_ratio_to_zero", Verdict::inconclusive, {}, {}};

  const bool log_space = spec.growth() == Growth::exponential;
  LogSumAccumulator log_acc;
  CompensatedSum acc;
  std::size_t next = 0;
  std::vector<double> log_r;
  for (Integer k = 2; next < prime_grid.size(); ++k) {
    const double t = static_cast<double>(k);
    if (log_space) {
      const SignedLog f = spec.log_eval(t);
      log_acc.add(SignedLog{f.log_abs - std::log(std::log(t)), f.sign});
    } else {
      acc.add(spec.eval(t) / std::log(t));
    }
    if (k != prime_grid[next]) continue;
    if (log_space) {
      const double lr = spec.log_eval(t).log_abs - log_acc.value().log_abs;
      log_r.push_back(lr);
      r.evidence.push_back({t, std::exp(lr)});
    } else {
      const double ratio = std::fabs(spec.eval(t) / acc.value());
      log_r.push_back(std::log(ratio));
      r.evidence.push_back({t, ratio});
    }
    ++next;
  }

  bool decaying = true;
  for (std::size_t i = 0; i + 1 < log_r.size(); ++i) {
    const double dec = decades(r.evidence[i].n, r.evidence[i + 1].n);
    decaying = decaying && log_r[i + 1] - log_r[i] <= dec * std::log1p(-thresholds.necessary_decay);
  }
  bool non_decreasing = true;
  for (std::size_t i = top_half_start(log_r.size()); i + 1 < log_r.size(); ++i)
    non_decreasing = non_decreasing && log_r[i + 1] >= log_r[i];
  const bool above = r.evidence.back().statistic > thresholds.necessary_fail_level;

  if (decaying) {
    r.verdict = Verdict::holds;
  } else if (non_decreasing && above) {
    r.verdict = Verdict::fails;
    r.note = "r(p) does not tend to 0; the prime-sum ratio cannot converge to 1";
  } else {
    r.verdict = Verdict::inconclusive;
  }
  if (log_space) r.note += r.note.empty() ? "evaluated in log space" : " (evaluated in log space)";
  report.conditions = {r};
  return report;
}

ConditionResult ratio_trail(const FunctionSpec& spec, const std::vector<Integer>& grid,
                            const PrimeEngine& engine) {
  validate_grid(grid, 2, "ratio grid");
  ConditionResult out{"prime_sum_ratio", Verdict::inconclusive, {}, {}};
  const bool log_space = spec.growth() == Growth::exponential;

  CompensatedSum primes, smooth;
  LogSumAccumulator log_primes, log_smooth;
  std::size_t next = 0;
  engine.for_each_segment(grid.back(), [&](const SieveSegment& segment) {
    for (Integer k = segment.lo(); k < segment.hi(); ++k) {
      const double t = static_cast<double>(k);
      const bool prime = segment.is_prime(k);
      if (log_space) {
        const SignedLog f = spec.log_eval(t);
        if (prime) log_primes.add(f);
        log_smooth.add(SignedLog{f.log_abs - std::log(std::log(t)), f.sign});
      } else {
        const double f = spec.eval(t);
        if (prime) primes.add(f);
        smooth.add(f / std::log(t));
      }
      if (k == grid[next]) {
        double ratio;
        if (log_space) {
          const auto a = log_primes.value();
          const auto b = log_smooth.value();
          ratio = a.sign * b.sign * std::exp(a.log_abs - b.log_abs);
        } else {
          ratio = primes.value() / smooth.value();
        }
        out.evidence.push_back({t, ratio});
        ++next;
      }
    }
  });

  const std::size_t start = top_half_start(out.evidence.size());
  bool approaching = true, far = true;
  for (std::size_t i = start; i < out.evidence.size(); ++i) {
    const double d = std::fabs(out.evidence[i].statistic - 1.0);
    far = far && d >= 0.5;
    if (i > start) approaching = approaching && d <= std::fabs(out.evidence[i - 1].statistic - 1.0);
  }
  out.verdict = approaching ? Verdict::holds : (far ? Verdict::fails : Verdict::inconclusive);
  return out;
}

}  // namespace psa
