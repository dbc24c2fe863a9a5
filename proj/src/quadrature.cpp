#include "psa/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "psa/error.hpp"
#include "psa/summation.hpp"

namespace psa {

namespace {

struct Panel {
  double a, b;
  double fa, fl, fm, fr, fb;  // samples at a, a+h/4, midpoint, b-h/4, b
  double coarse, fine, err;

  double value() const { return fine + (fine - coarse) / 15.0; }
  bool operator<(const Panel& other) const { return err < other.err; }
};

class PanelBuilder {
 public:
  explicit PanelBuilder(const Integrand& g) : g_(g) {}

  double sample(double x) const {
    const double y = g_(x);
    if (!std::isfinite(y))
      throw Error(ErrorCode::overflow, "integrand is not finite at t=" + std::to_string(x));
    return y;
  }

  Panel make(double a, double b, double fa, double fm, double fb) const {
    const double m = 0.5 * (a + b);
    const double fl = sample(0.5 * (a + m));
    const double fr = sample(0.5 * (m + b));
    const double h = b - a;
    const double coarse = h / 6.0 * (fa + 4.0 * fm + fb);
    const double fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
    return Panel{a, b, fa, fl, fm, fr, fb, coarse, fine, std::fabs(fine - coarse) / 15.0};
  }

 private:
  const Integrand& g_;
};

QuadResult adaptive_simpson(const Integrand& g, double a, double b, double rel_tol,
                            std::size_t max_intervals) {
  PanelBuilder builder(g);
  std::priority_queue<Panel> active;
  std::vector<Panel> frozen;

  // A few initial panels so a lucky coarse sample cannot fake convergence.
  constexpr int kInitialPanels = 8;
  double value = 0.0;
  double err = 0.0;
  double left = a;
  double f_left = builder.sample(a);
  for (int i = 1; i <= kInitialPanels; ++i) {
    const double right = i == kInitialPanels ? b : a + (b - a) * i / kInitialPanels;
    const double f_right = builder.sample(right);
    const Panel p = builder.make(left, right, f_left, builder.sample(0.5 * (left + right)), f_right);
    value += p.value();
    err += p.err;
    active.push(p);
    left = right;
    f_left = f_right;
  }

  std::size_t iterations = 0;
  auto resum = [&] {
    value = 0.0;
    err = 0.0;
    auto copy = active;
    while (!copy.empty()) {
      value += copy.top().value();
      err += copy.top().err;
      copy.pop();
    }
    for (const auto& p : frozen) value += p.value();
  };

  while (!active.empty() && err > std::max(rel_tol * std::fabs(value), kAbsTolFloor)) {
    if (active.size() + frozen.size() >= max_intervals)
      throw Error(ErrorCode::max_subdivisions,
                  "quadrature exceeded " + std::to_string(max_intervals) + " subintervals");
    const Panel p = active.top();
    active.pop();
    value -= p.value();
    err -= p.err;

    const double m = 0.5 * (p.a + p.b);
    if (!(p.a < 0.5 * (p.a + m)) || !(0.5 * (m + p.b) < p.b)) {
      // Panel cannot be bisected further in double precision.
      frozen.push_back(p);
      value += p.value();
      continue;
    }
    const Panel lo = builder.make(p.a, m, p.fa, p.fl, p.fm);
    const Panel hi = builder.make(m, p.b, p.fm, p.fr, p.fb);
    value += lo.value() + hi.value();
    err += lo.err + hi.err;
    active.push(lo);
    active.push(hi);
    if (++iterations % 4096 == 0) resum();
  }

  // Final value is re-accumulated with compensation from the panel list.
  CompensatedSum total;
  double total_err = 0.0;
  std::size_t panels = frozen.size() + active.size();
  for (const auto& p : frozen) total.add(p.value());
  while (!active.empty()) {
    total.add(active.top().value());
    total_err += active.top().err;
    active.pop();
  }
  return QuadResult{total.value(), total_err, panels};
}

}  // namespace

const char* to_string(Weight weight) noexcept {
  switch (weight) {
    case Weight::crude: return "crude";
    case Weight::pnt: return "pnt";
    case Weight::rh: return "rh";
  }
  return "unknown";
}

QuadResult integrate(const Integrand& g, double a, double b, double rel_tol, const QuadOptions& options) {
  if (!(a >= 2.0) || !(b >= a) || !std::isfinite(b))
    throw Error(ErrorCode::invalid_argument, "integrate requires 2 <= a <= b < inf");
  if (!(rel_tol >= kMinRelTol && rel_tol <= kMaxRelTol))
    throw Error(ErrorCode::invalid_argument, "rel_tol must lie in [1e-12, 1e-2]");
  if (a == b) return QuadResult{0.0, 0.0, 1};

  if (b / a > options.log_substitution_ratio) {
    const Integrand in_log = [&g](double u) {
      const double t = std::exp(u);
      return g(t) * t;
    };
    return adaptive_simpson(in_log, std::log(a), std::log(b), rel_tol, options.max_intervals);
  }
  return adaptive_simpson(g, a, b, rel_tol, options.max_intervals);
}

QuadResult li_main(const FunctionSpec& spec, double n, double rel_tol) {
  if (!(n >= 3.0)) throw Error(ErrorCode::invalid_argument, "li_main requires n >= 3");
  return integrate([&spec](double t) { return spec.eval(t) / std::log(t); }, 2.0, n, rel_tol);
}

QuadResult remainder_integral(const FunctionSpec& spec, double n, Weight weight, double c,
                              double rel_tol, double theta) {
  if (!(n >= 3.0)) throw Error(ErrorCode::invalid_argument, "remainder_integral requires n >= 3");
  if (weight == Weight::pnt && !(c > 0.0))
    throw Error(ErrorCode::invalid_argument, "pnt weight requires c > 0");
  if (spec.monotone() == Monotone::constant) return QuadResult{0.0, 0.0, 1};

  Integrand g;
  switch (weight) {
    case Weight::crude:
      g = [&spec](double t) {
        const double L = std::log(t);
        return t * std::fabs(spec.deriv(t)) / (L * L);
      };
      break;
    case Weight::pnt:
      g = [&spec, c, theta](double t) {
        return t * std::fabs(spec.deriv(t)) * std::exp(-c * std::pow(std::log(t), theta));
      };
      break;
    case Weight::rh:
      g = [&spec](double t) { return std::fabs(spec.deriv(t)) * std::sqrt(t) * std::log(t); };
      break;
  }
  return integrate(g, 2.0, n, rel_tol);
}

double LogIntegralTable::operator()(double t) {
  if (!(t >= 2.0)) throw Error(ErrorCode::invalid_argument, "J1 is defined for t >= 2");
  const auto inv_log = [](double u) { return 1.0 / std::log(u); };
  while (points_.back() < t) {
    const double lo = points_.back();
    const double hi = 2.0 * lo;
    cumulative_.push_back(cumulative_.back() + integrate(inv_log, lo, hi, kMinRelTol).value);
    points_.push_back(hi);
  }
  const auto it = std::upper_bound(points_.begin(), points_.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(points_.begin(), it)) - 1;
  if (points_[i] == t) return cumulative_[i];
  return cumulative_[i] + integrate(inv_log, points_[i], t, kMinRelTol).value;
}

PartsIdentity parts_identity(const FunctionSpec& spec, double n, double rel_tol) {
  LogIntegralTable j1;
  PartsIdentity out;
  if (spec.monotone() != Monotone::constant) {
    out.lhs = integrate([&](double t) { return j1(t) * spec.deriv(t); }, 2.0, n, rel_tol).value;
  }
  const double boundary = spec.eval(n) * j1(n);
  const double main = li_main(spec, n, rel_tol).value;
  out.rhs = boundary - main;
  out.scale = std::max(std::fabs(boundary), std::fabs(main));
  out.rel_diff = out.scale > 0.0 ? std::fabs(out.lhs - out.rhs) / out.scale : std::fabs(out.lhs - out.rhs);
  return out;
}

}  // namespace psa
