#include "psa/summation.hpp"

#include <string>

#include "psa/error.hpp"

namespace psa {

namespace {

void require_n(Integer n) {
  if (n < 2) throw Error(ErrorCode::invalid_range, "prime sums require n >= 2");
}

double checked(double term, const FunctionSpec& spec, Integer k) {
  if (!std::isfinite(term))
    throw Error(ErrorCode::overflow, spec.label() + " is not finite at k=" + std::to_string(k) +
                                         " (declared growth: " + to_string(spec.growth()) + ")");
  return term;
}

}  // namespace

void LogSumAccumulator::Stream::add(double x) {
  if (x <= max) {
    scaled.add(std::exp(x - max));
  } else {
    if (std::isfinite(max)) scaled.scale(std::exp(max - x));
    scaled.add(1.0);
    max = x;
  }
}

void LogSumAccumulator::add(SignedLog term) {
  if (term.sign > 0) positive_.add(term.log_abs);
  if (term.sign < 0) negative_.add(term.log_abs);
}

SignedLog LogSumAccumulator::value() const {
  const bool has_pos = std::isfinite(positive_.max);
  const bool has_neg = std::isfinite(negative_.max);
  if (!has_pos && !has_neg) return SignedLog{-INFINITY, 0};
  if (!has_neg) return SignedLog{positive_.log_value(), 1};
  if (!has_pos) return SignedLog{negative_.log_value(), -1};
  const double lp = positive_.log_value();
  const double ln = negative_.log_value();
  if (lp == ln) return SignedLog{-INFINITY, 0};
  // log|e^lp - e^ln| = hi + log(1 - e^(lo - hi))
  const double hi = std::max(lp, ln);
  const double lo = std::min(lp, ln);
  return SignedLog{hi + std::log1p(-std::exp(lo - hi)), lp > ln ? 1 : -1};
}

ExactSum exact_sum(const FunctionSpec& spec, Integer n, const PrimeEngine& engine) {
  require_n(n);
  ExactSum out;
  out.n = n;
  if (spec.growth() == Growth::exponential) {
    LogSumAccumulator acc;
    engine.stream_primes(n, [&](Integer p) {
      acc.add(spec.log_eval(static_cast<double>(p)));
      ++out.terms;
    });
    const auto lv = acc.value();
    out.log_value = lv;
    out.value = lv.value();
    return out;
  }

  CompensatedSum acc;
  engine.stream_primes(n, [&](Integer p) {
    acc.add(checked(spec.eval(static_cast<double>(p)), spec, p));
    ++out.terms;
  });
  out.value = acc.value();
  out.compensation = acc.compensation();
  return out;
}

ExactSum abel_sum(const FunctionSpec& spec, Integer n, const PrimeEngine& engine) {
  require_n(n);
  CompensatedSum integral;  // sum_{k<n} A(k) (f(k+1) - f(k))
  Integer count = 0;
  double f_k = checked(spec.eval(2.0), spec, 2);
  engine.for_each_segment(n, [&](const SieveSegment& segment) {
    for (Integer k = segment.lo(); k < segment.hi(); ++k) {
      if (segment.is_prime(k)) ++count;
      if (k == n) break;
      const double f_next = checked(spec.eval(static_cast<double>(k + 1)), spec, k + 1);
      if (count != 0) integral.add(static_cast<double>(count) * (f_next - f_k));
      f_k = f_next;
    }
  });

  CompensatedSum total;
  total.add(static_cast<double>(count) * f_k);
  total.add(-integral.value());

  ExactSum out;
  out.n = n;
  out.terms = count;
  out.value = total.value();
  out.compensation = integral.compensation() + total.compensation();
  return out;
}

double log_product_primes(Integer n, const PrimeEngine& engine) {
  static const FunctionSpec log_spec = builtin("log");
  return exact_sum(log_spec, n, engine).value;
}

}  // namespace psa
