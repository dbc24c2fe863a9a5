#pragma once

#include <cmath>
#include <optional>

#include "psa/functions.hpp"
#include "psa/prime_engine.hpp"

namespace psa {

// Neumaier's variant of Kahan summation: the running residual also captures
// the low-order bits lost when a term is larger than the partial sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  void scale(double factor) noexcept {
    sum_ *= factor;
    compensation_ *= factor;
  }

  double value() const noexcept { return sum_ + compensation_; }
  double compensation() const noexcept { return compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Streaming log-sum-exp over signed terms. Positive and negative terms are
// accumulated separately against their own running maxima.
class LogSumAccumulator {
 public:
  void add(SignedLog term);
  SignedLog value() const;

 private:
  struct Stream {
    double max = -INFINITY;
    CompensatedSum scaled;  // sum of exp(x - max)
    void add(double x);
    double log_value() const { return max + std::log(scaled.value()); }
  };
  Stream positive_;
  Stream negative_;
};

struct ExactSum {
  Integer n = 0;
  double value = 0.0;  // +/-inf when only the log-space value is representable
  std::optional<SignedLog> log_value;  // set for exponential-growth functions
  Integer terms = 0;   // pi(n)
  double compensation = 0.0;

  bool log_space() const noexcept { return log_value.has_value(); }
};

// Sum of f(p) over primes p <= n with compensated accumulation; exponential
// growth functions are accumulated in log space.
ExactSum exact_sum(const FunctionSpec& spec, Integer n, const PrimeEngine& engine);

// A(n) f(n) - sum_{k=2}^{n-1} A(k) (f(k+1) - f(k)), which is the Abel
// summation form with the step-function integral evaluated exactly.
ExactSum abel_sum(const FunctionSpec& spec, Integer n, const PrimeEngine& engine);

// log of the product of primes <= n, i.e. Chebyshev theta(n).
double log_product_primes(Integer n, const PrimeEngine& engine);

}  // namespace psa
