#include "psa/estimators.hpp"

#include <cmath>
#include <string>

#include "psa/error.hpp"

namespace psa {

namespace {

void require_n(double n) {
  if (!(n >= 3.0) || !std::isfinite(n)) throw Error(ErrorCode::invalid_argument, "estimates require n >= 3");
}

void require_monotone(const FunctionSpec& spec, const char* model) {
  if (spec.monotone() == Monotone::none)
    throw Error(ErrorCode::hypothesis_violation,
                spec.label() + " is not monotone on [2, inf); the " + std::string(model) +
                    " model requires a monotone f");
}

double finite_eval(const FunctionSpec& spec, double n) {
  const double v = spec.eval(n);
  if (!std::isfinite(v))
    throw Error(ErrorCode::overflow, spec.label() + " overflows at n=" + std::to_string(n));
  return v;
}

void total_up(AsymptoticEstimate& est) {
  est.main = 0.0;
  est.bound = 0.0;
  for (const auto& piece : est.pieces) (piece.role == Piece::Role::main ? est.main : est.bound) += piece.value;
}

AsymptoticEstimate li_based(const FunctionSpec& spec, double n, const ErrorModel& model) {
  AsymptoticEstimate est;
  est.n = n;
  est.model = model;
  est.pieces.push_back({"integral f(t)/log t", li_main(spec, n).value, Piece::Role::main});
  return est;
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::crude: return "crude";
    case ModelKind::pnt: return "pnt";
    case ModelKind::rh: return "rh";
  }
  return "unknown";
}

void ErrorModel::validate() const {
  if (!(c > 0.0) || !(c1 > 0.0) || !(c2 > 0.0))
    throw Error(ErrorCode::invalid_argument, "model constants c, c1, c2 must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0, 1/2)");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::invalid_argument, "theta must lie in (0, 1]");
}

AsymptoticEstimate estimate_crude(const FunctionSpec& spec, double n, ErrorModel model) {
  require_n(n);
  model.validate();
  model.kind = ModelKind::crude;
  const double f_n = finite_eval(spec, n);
  const double L = std::log(n);

  double integral = 0.0;
  if (spec.monotone() != Monotone::constant) {
    integral = integrate([&spec](double t) { return t * spec.deriv(t) / std::log(t); }, 2.0, n, kMainRelTol).value;
  }

  AsymptoticEstimate est;
  est.n = n;
  est.model = model;
  est.pieces = {
      {"boundary n f(n)/log n", n * f_n / L, Piece::Role::main},
      {"-integral t f'(t)/log t", -integral, Piece::Role::main},
      {"boundary n |f(n)|/log^2 n", n * std::fabs(f_n) / (L * L), Piece::Role::bound},
      {"integral t |f'(t)|/log^2 t", remainder_integral(spec, n, Weight::crude, model.c).value,
       Piece::Role::bound},
  };
  total_up(est);
  return est;
}

AsymptoticEstimate estimate_pnt(const FunctionSpec& spec, double n, ErrorModel model) {
  require_n(n);
  model.validate();
  require_monotone(spec, "pnt");
  model.kind = ModelKind::pnt;
  const double f_n = finite_eval(spec, n);
  auto est = li_based(spec, n, model);
  const double decay = std::exp(-model.c * std::pow(std::log(n), model.theta));
  est.pieces.push_back({"boundary |f(n)| n exp(-c log^theta n)", std::fabs(f_n) * n * decay, Piece::Role::bound});
  est.pieces.push_back({"integral t |f'(t)| exp(-c log^theta t)",
                        remainder_integral(spec, n, Weight::pnt, model.c, kBoundRelTol, model.theta).value,
                        Piece::Role::bound});
  total_up(est);
  return est;
}

AsymptoticEstimate estimate_rh(const FunctionSpec& spec, double n, ErrorModel model) {
  require_n(n);
  model.validate();
  require_monotone(spec, "rh");
  model.kind = ModelKind::rh;
  const double f_n = finite_eval(spec, n);
  auto est = li_based(spec, n, model);
  est.pieces.push_back({"boundary |f(n)| n^(1/2) log n", std::fabs(f_n) * std::sqrt(n) * std::log(n),
                        Piece::Role::bound});
  est.pieces.push_back({"integral |f'(t)| t^(1/2) log t",
                        remainder_integral(spec, n, Weight::rh, model.c).value, Piece::Role::bound});
  total_up(est);
  return est;
}

AsymptoticEstimate estimate(const FunctionSpec& spec, double n, const ErrorModel& model) {
  switch (model.kind) {
    case ModelKind::crude: return estimate_crude(spec, n, model);
    case ModelKind::pnt: return estimate_pnt(spec, n, model);
    case ModelKind::rh: return estimate_rh(spec, n, model);
  }
  throw Error(ErrorCode::invalid_argument, "unknown model kind");
}

std::optional<double> closed_main(const FunctionSpec& spec, double n) {
  require_n(n);
  const double L = std::log(n);
  switch (spec.family()) {
    case Family::one: return n / L;
    case Family::log: return n;
    case Family::recip: return std::log(L);
    case Family::log_over_t: return L;
    case Family::power: {
      const double m = spec.params().m.value_or(0.0);
      return std::pow(n, m + 1.0) / ((m + 1.0) * L);
    }
    case Family::power_log: {
      // one integration-by-parts step: n^{m+1} log^{k-1} n / (m+1)
      const double m = spec.params().m.value_or(0.0);
      const double k = spec.params().k.value_or(0.0);
      return std::pow(n, m + 1.0) * std::pow(L, k - 1.0) / (m + 1.0);
    }
    case Family::exp2: return std::nullopt;
  }
  return std::nullopt;
}

double product_bound_log(double n, const ErrorModel& model) {
  if (!(n >= 2.0)) throw Error(ErrorCode::invalid_argument, "product bound requires n >= 2");
  model.validate();
  if (model.kind == ModelKind::rh) return n + model.c2 * std::pow(n, 0.5 + model.epsilon);
  return n + model.c1 * n / std::log(n);
}

ConsistencyComparison consistency_transform(const FunctionSpec& spec, double n) {
  const auto crude = estimate_crude(spec, n);
  ConsistencyComparison out;
  out.main_li = li_main(spec, n).value;
  out.main_crude = crude.main;
  out.difference = out.main_li - out.main_crude;
  const double tail =
      integrate([&spec](double t) {
        const double L = std::log(t);
        return spec.eval(t) / (L * L);
      }, 2.0, n, kMainRelTol).value;
  out.predicted_difference = -2.0 * spec.eval(2.0) / std::log(2.0) + tail;
  out.crude_bound = crude.bound;
  out.bound_ratio = crude.bound > 0.0 ? std::fabs(out.difference) / crude.bound : INFINITY;
  out.within_crude_bound = std::fabs(out.difference) <= crude.bound;
  return out;
}

}  // namespace psa
