#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "psa/functions.hpp"

namespace psa {

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t subdivisions = 1;
};

struct QuadOptions {
  std::size_t max_intervals = 1'000'000;
  // Integrate in u = log t once b / a exceeds this ratio.
  double log_substitution_ratio = 1e3;
};

inline constexpr double kMainRelTol = 1e-9;
inline constexpr double kBoundRelTol = 1e-6;
inline constexpr double kMinRelTol = 1e-12;
inline constexpr double kMaxRelTol = 1e-2;
inline constexpr double kAbsTolFloor = 1e-14;

using Integrand = std::function<double(double)>;

// Globally adaptive Simpson quadrature with Richardson extrapolation. Requires
// 2 <= a <= b and rel_tol in [1e-12, 1e-2]. Refines the panel with the largest
// error estimate until the summed estimate is below max(rel_tol*|value|, 1e-14).
// Throws max_subdivisions past options.max_intervals and overflow when g
// returns a non-finite value.
QuadResult integrate(const Integrand& g, double a, double b, double rel_tol,
                     const QuadOptions& options = {});

// Integral of f(t) / log t over [2, n].
QuadResult li_main(const FunctionSpec& spec, double n, double rel_tol = kMainRelTol);

enum class Weight { crude, pnt, rh };

const char* to_string(Weight weight) noexcept;

// crude: t |f'(t)| / log^2 t
// pnt:   t |f'(t)| exp(-c (log t)^theta)
// rh:    |f'(t)| t^(1/2) log t
QuadResult remainder_integral(const FunctionSpec& spec, double n, Weight weight, double c,
                              double rel_tol = kBoundRelTol, double theta = 0.5);

// J1(t) = integral of 1/log u over [2, t], from a cumulative table at
// breakpoints 2 * 2^i plus one local integration. Memoizes lazily; not safe
// for concurrent use, keep one instance per thread.
class LogIntegralTable {
 public:
  double operator()(double t);
  std::size_t breakpoints() const noexcept { return points_.size(); }

 private:
  std::vector<double> points_{2.0};
  std::vector<double> cumulative_{0.0};
};

// Integration-by-parts identity for the li-type main term:
//   integral of J1(t) f'(t) over [2, n]  ==  f(n) J1(n) - integral of f(t)/log t
struct PartsIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;  // max(|f(n) J1(n)|, |li_main|)
  double rel_diff = 0.0;
};

PartsIdentity parts_identity(const FunctionSpec& spec, double n, double rel_tol = 1e-10);

}  // namespace psa
