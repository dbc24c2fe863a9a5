#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psa/functions.hpp"
#include "psa/quadrature.hpp"

namespace psa {

enum class ModelKind { crude, pnt, rh };

const char* to_string(ModelKind kind) noexcept;

// Constants of the three remainder models. None are fixed by theory; the
// defaults make the bounds concrete and every one is user-overridable.
struct ErrorModel {
  ModelKind kind = ModelKind::crude;
  double c = 1.0;         // pnt: exp(-c (log n)^theta)
  double c1 = 1.0;        // crude product bound
  double c2 = 1.0;        // rh product bound
  double epsilon = 0.05;  // rh product bound exponent 1/2 + epsilon
  double theta = 0.5;     // pnt exponent on log n

  // Throws invalid_argument unless constants are positive, epsilon in (0, 1/2)
  // and theta in (0, 1].
  void validate() const;
};

struct Piece {
  enum class Role { main, bound };
  std::string label;
  double value;
  Role role;
};

struct AsymptoticEstimate {
  double n = 0.0;
  double main = 0.0;
  double bound = 0.0;
  ErrorModel model;
  std::vector<Piece> pieces;
};

// n f(n)/log n - int t f'/log t,  bound n|f(n)|/log^2 n + int t|f'|/log^2 t.
// Needs only a continuous derivative, no monotonicity.
AsymptoticEstimate estimate_crude(const FunctionSpec& spec, double n, ErrorModel model = {});

// int f/log t,  bound |f(n)| n e^{-c (log n)^theta} + int t|f'| e^{-c (log t)^theta}.
// Throws hypothesis_violation when spec is not monotone.
AsymptoticEstimate estimate_pnt(const FunctionSpec& spec, double n, ErrorModel model = {});

// int f/log t,  bound |f(n)| sqrt(n) log n + int |f'| sqrt(t) log t.
// Throws hypothesis_violation when spec is not monotone.
AsymptoticEstimate estimate_rh(const FunctionSpec& spec, double n, ErrorModel model = {});

AsymptoticEstimate estimate(const FunctionSpec& spec, double n, const ErrorModel& model);

// Closed-form leading term where the family has one; nullopt otherwise.
std::optional<double> closed_main(const FunctionSpec& spec, double n);

// Log of the upper bound on the product of primes <= n:
// n + c1 n / log n (crude, pnt) or n + c2 n^{1/2 + epsilon} (rh).
double product_bound_log(double n, const ErrorModel& model);

// Both main terms side by side. The difference is exactly
// -2 f(2)/log 2 + int f/log^2 t (integration by parts), reported as
// predicted_difference so the two routes can be compared.
struct ConsistencyComparison {
  double main_li = 0.0;
  double main_crude = 0.0;
  double difference = 0.0;
  double predicted_difference = 0.0;
  double crude_bound = 0.0;
  double bound_ratio = 0.0;  // |difference| / crude_bound
  bool within_crude_bound = false;
};

ConsistencyComparison consistency_transform(const FunctionSpec& spec, double n);

}  // namespace psa
