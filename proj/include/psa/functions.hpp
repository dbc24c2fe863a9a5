#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psa {

enum class Family { one, log, recip, log_over_t, power, power_log, exp2 };

// `constant` marks f' == 0; it is monotone in the weak sense and admitted
// wherever a monotone f is required.
enum class Monotone { increasing, decreasing, constant, none };

enum class Growth { bounded, polylog, polynomial, exponential };

const char* to_string(Family family) noexcept;
const char* to_string(Monotone monotone) noexcept;
const char* to_string(Growth growth) noexcept;

// log|x| together with the sign of x; sign == 0 encodes x == 0.
struct SignedLog {
  double log_abs = 0.0;
  int sign = 0;

  double value() const;
};

struct FunctionParams {
  std::optional<double> m;  // power exponent
  std::optional<double> k;  // log power
};

// A differentiable function on [2, inf) plus the metadata the estimators and
// condition checks rely on. Immutable once built.
class FunctionSpec {
 public:
  using RealFn = std::function<double(double)>;
  using LogFn = std::function<SignedLog(double)>;

  FunctionSpec(std::string id, Family family, FunctionParams params, Monotone monotone,
               Growth growth, RealFn eval, RealFn deriv, LogFn log_eval, LogFn log_deriv);

  const std::string& id() const noexcept { return id_; }
  Family family() const noexcept { return family_; }
  const FunctionParams& params() const noexcept { return params_; }
  Monotone monotone() const noexcept { return monotone_; }
  Growth growth() const noexcept { return growth_; }

  double eval(double t) const { return eval_(t); }
  double deriv(double t) const { return deriv_(t); }
  double operator()(double t) const { return eval_(t); }

  bool has_log_eval() const noexcept { return static_cast<bool>(log_eval_); }
  SignedLog log_eval(double t) const;
  SignedLog log_deriv(double t) const;

  // Human-readable id with parameters, e.g. "power(m=1)".
  std::string label() const;

 private:
  std::string id_;
  Family family_;
  FunctionParams params_;
  Monotone monotone_;
  Growth growth_;
  RealFn eval_;
  RealFn deriv_;
  LogFn log_eval_;
  LogFn log_deriv_;
};

struct CatalogEntry {
  FunctionSpec spec;
  bool closed_main;  // false marks a quadrature-only entry
};

// Built-in families: one, log, recip, log_over_t, power (m > -1),
// power_log (m > -1, integer k >= 0), exp2. Throws unknown_id or
// invalid_params.
FunctionSpec builtin(std::string_view id, const FunctionParams& params = {});
CatalogEntry catalog_entry(std::string_view id, const FunctionParams& params = {});
const std::vector<std::string_view>& builtin_ids();

inline constexpr std::array<double, 5> kProbeGrid{2.0, 10.0, 100.0, 1e4, 1e6};
inline constexpr double kDerivativeTolerance = 1e-6;

struct Violation {
  enum class Kind { derivative_mismatch, monotonicity, missing_log_eval };
  Kind kind;
  double t;
  std::string detail;
};

// Empty iff the derivative matches a central difference on the probe grid and
// the monotone flag agrees with the derivative's sign there.
std::vector<Violation> validate(const FunctionSpec& spec);

}  // namespace psa
