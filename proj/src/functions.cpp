#include "psa/functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "psa/error.hpp"

namespace psa {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

SignedLog signed_log(double x) {
  if (x == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
}

void reject_params(std::string_view id, const FunctionParams& params) {
  if (params.m || params.k)
    throw Error(ErrorCode::invalid_params, std::string(id) + " takes no parameters");
}

double require_m(std::string_view id, const FunctionParams& params) {
  if (!params.m) throw Error(ErrorCode::invalid_params, std::string(id) + " requires parameter m");
  const double m = *params.m;
  if (!std::isfinite(m) || m <= -1.0)
    throw Error(ErrorCode::invalid_params,
                std::string(id) + " requires m > -1 (got " + std::to_string(m) + ")");
  return m;
}

FunctionSpec make_power(const FunctionParams& params) {
  if (params.k) throw Error(ErrorCode::invalid_params, "power takes only parameter m");
  const double m = require_m("power", params);
  const Monotone mono = m > 0 ? Monotone::increasing : (m < 0 ? Monotone::decreasing : Monotone::constant);
  const Growth growth = m > 0 ? Growth::polynomial : Growth::bounded;
  return FunctionSpec(
      "power", Family::power, params, mono, growth,
      [m](double t) { return std::pow(t, m); },
      [m](double t) { return m == 0.0 ? 0.0 : m * std::pow(t, m - 1.0); },
      [m](double t) { return SignedLog{m * std::log(t), 1}; },
      [m](double t) {
        if (m == 0.0) return signed_log(0.0);
        return SignedLog{std::log(std::fabs(m)) + (m - 1.0) * std::log(t), m > 0 ? 1 : -1};
      });
}

FunctionSpec make_power_log(const FunctionParams& params) {
  const double m = require_m("power_log", params);
  const double k = params.k.value_or(0.0);
  if (!(k >= 0.0) || std::floor(k) != k)
    throw Error(ErrorCode::invalid_params, "power_log requires an integer k >= 0");
  FunctionParams stored{m, k};

  Monotone mono;
  if (m == 0.0 && k == 0.0) {
    mono = Monotone::constant;
  } else if (m >= 0.0) {
    mono = Monotone::increasing;
  } else if (k == 0.0 || -k / m <= kLn2) {
    // m log t + k < 0 for every t >= 2
    mono = Monotone::decreasing;
  } else {
    mono = Monotone::none;
  }
  const Growth growth = m > 0 ? Growth::polynomial : (m == 0.0 && k > 0 ? Growth::polylog : Growth::bounded);

  return FunctionSpec(
      "power_log", Family::power_log, stored, mono, growth,
      [m, k](double t) { return std::pow(t, m) * std::pow(std::log(t), k); },
      [m, k](double t) {
        const double L = std::log(t);
        const double slope = m * L + k;
        if (slope == 0.0) return 0.0;
        return std::pow(t, m - 1.0) * std::pow(L, k - 1.0) * slope;
      },
      [m, k](double t) { return SignedLog{m * std::log(t) + k * std::log(std::log(t)), 1}; },
      [m, k](double t) {
        const double L = std::log(t);
        const auto slope = signed_log(m * L + k);
        if (slope.sign == 0) return slope;
        return SignedLog{(m - 1.0) * L + (k - 1.0) * std::log(L) + slope.log_abs, slope.sign};
      });
}

}  // namespace

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::one: return "one";
    case Family::log: return "log";
    case Family::recip: return "recip";
    case Family::log_over_t: return "log_over_t";
    case Family::power: return "power";
    case Family::power_log: return "power_log";
    case Family::exp2: return "exp2";
  }
  return "unknown";
}

const char* to_string(Monotone monotone) noexcept {
  switch (monotone) {
    case Monotone::increasing: return "increasing";
    case Monotone::decreasing: return "decreasing";
    case Monotone::constant: return "constant";
    case Monotone::none: return "none";
  }
  return "unknown";
}

const char* to_string(Growth growth) noexcept {
  switch (growth) {
    case Growth::bounded: return "bounded";
    case Growth::polylog: return "polylog";
    case Growth::polynomial: return "polynomial";
    case Growth::exponential: return "exponential";
  }
  return "unknown";
}

FunctionSpec::FunctionSpec(std::string id, Family family, FunctionParams params, Monotone monotone,
                           Growth growth, RealFn eval, RealFn deriv, LogFn log_eval, LogFn log_deriv)
    : id_(std::move(id)),
      family_(family),
      params_(params),
      monotone_(monotone),
      growth_(growth),
      eval_(std::move(eval)),
      deriv_(std::move(deriv)),
      log_eval_(std::move(log_eval)),
      log_deriv_(std::move(log_deriv)) {
  if (!eval_ || !deriv_) throw Error(ErrorCode::invalid_argument, "function spec needs eval and deriv");
  if (growth_ == Growth::exponential && (!log_eval_ || !log_deriv_))
    throw Error(ErrorCode::invalid_argument, "exponential-growth functions must provide log_eval");
}

SignedLog FunctionSpec::log_eval(double t) const {
  return log_eval_ ? log_eval_(t) : signed_log(eval_(t));
}

SignedLog FunctionSpec::log_deriv(double t) const {
  return log_deriv_ ? log_deriv_(t) : signed_log(deriv_(t));
}

std::string FunctionSpec::label() const {
  std::ostringstream out;
  out << id_;
  if (params_.m || params_.k) {
    out << '(';
    if (params_.m) out << "m=" << *params_.m;
    if (params_.m && params_.k) out << ',';
    if (params_.k) out << "k=" << *params_.k;
    out << ')';
  }
  return out.str();
}

FunctionSpec builtin(std::string_view id, const FunctionParams& params) {
  if (id == "one") {
    reject_params(id, params);
    return FunctionSpec(
        "one", Family::one, {}, Monotone::constant, Growth::bounded,
        [](double) { return 1.0; }, [](double) { return 0.0; },
        [](double) { return SignedLog{0.0, 1}; }, [](double) { return signed_log(0.0); });
  }
  if (id == "log") {
    reject_params(id, params);
    return FunctionSpec(
        "log", Family::log, {}, Monotone::increasing, Growth::polylog,
        [](double t) { return std::log(t); }, [](double t) { return 1.0 / t; },
        [](double t) { return SignedLog{std::log(std::log(t)), 1}; },
        [](double t) { return SignedLog{-std::log(t), 1}; });
  }
  if (id == "recip") {
    reject_params(id, params);
    return FunctionSpec(
        "recip", Family::recip, {}, Monotone::decreasing, Growth::bounded,
        [](double t) { return 1.0 / t; }, [](double t) { return -1.0 / (t * t); },
        [](double t) { return SignedLog{-std::log(t), 1}; },
        [](double t) { return SignedLog{-2.0 * std::log(t), -1}; });
  }
  if (id == "log_over_t") {
    reject_params(id, params);
    // Rises on [2, e] and falls afterwards, so it is not monotone on [2, inf).
    return FunctionSpec(
        "log_over_t", Family::log_over_t, {}, Monotone::none, Growth::bounded,
        [](double t) { return std::log(t) / t; },
        [](double t) { return (1.0 - std::log(t)) / (t * t); },
        [](double t) { return SignedLog{std::log(std::log(t)) - std::log(t), 1}; },
        [](double t) {
          const auto slope = signed_log(1.0 - std::log(t));
          if (slope.sign == 0) return slope;
          return SignedLog{slope.log_abs - 2.0 * std::log(t), slope.sign};
        });
  }
  if (id == "power") return make_power(params);
  if (id == "power_log") return make_power_log(params);
  if (id == "exp2") {
    reject_params(id, params);
    return FunctionSpec(
        "exp2", Family::exp2, {}, Monotone::increasing, Growth::exponential,
        [](double t) { return std::exp2(t); }, [](double t) { return kLn2 * std::exp2(t); },
        [](double t) { return SignedLog{t * kLn2, 1}; },
        [](double t) { return SignedLog{std::log(kLn2) + t * kLn2, 1}; });
  }
  throw Error(ErrorCode::unknown_id, "unknown function id '" + std::string(id) + "'");
}

CatalogEntry catalog_entry(std::string_view id, const FunctionParams& params) {
  auto spec = builtin(id, params);
  const bool closed = spec.family() != Family::exp2;
  return CatalogEntry{std::move(spec), closed};
}

const std::vector<std::string_view>& builtin_ids() {
  static const std::vector<std::string_view> ids{"one", "log", "recip", "log_over_t",
                                                 "power", "power_log", "exp2"};
  return ids;
}

std::vector<Violation> validate(const FunctionSpec& spec) {
  std::vector<Violation> violations;
  if (spec.growth() == Growth::exponential && !spec.has_log_eval())
    violations.push_back({Violation::Kind::missing_log_eval, 0.0, "exponential growth without log_eval"});

  for (const double t : kProbeGrid) {
    const double d = spec.deriv(t);
    const double h = t * 1e-6;
    const double up = spec.eval(t + h);
    const double down = spec.eval(t - h);
    if (std::isfinite(d) && std::isfinite(up) && std::isfinite(down) && std::fabs(d) >= 1e-300) {
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::fabs(d - fd) / std::max(std::fabs(d), 1e-12);
      if (rel > kDerivativeTolerance) {
        std::ostringstream msg;
        msg << "deriv(" << t << ")=" << d << " but central difference gives " << fd;
        violations.push_back({Violation::Kind::derivative_mismatch, t, msg.str()});
      }
    }

    const int sign = spec.log_deriv(t).sign;
    bool consistent = true;
    switch (spec.monotone()) {
      case Monotone::increasing: consistent = sign >= 0; break;
      case Monotone::decreasing: consistent = sign <= 0; break;
      case Monotone::constant: consistent = sign == 0; break;
      case Monotone::none: break;
    }
    if (!consistent) {
      std::ostringstream msg;
      msg << "monotone flag '" << to_string(spec.monotone()) << "' contradicts derivative sign "
          << sign << " at t=" << t;
      violations.push_back({Violation::Kind::monotonicity, t, msg.str()});
    }
  }
  return violations;
}

}  // namespace psa
