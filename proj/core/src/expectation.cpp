#include "brw/expectation.hpp"

#include <cmath>
#include <stdexcept>

namespace brw {

void ExpectationParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("expectation: lambda > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("expectation: alpha > 0");
  if (!(v0 > 0.0)) throw std::invalid_argument("expectation: v0 > 0");
}

namespace {

// (e^{eps t} - 1)/eps, continuous through eps = 0.
double expm1_ratio(double eps, double t) {
  if (eps == 0.0) return t;
  return std::expm1(eps * t) / eps;
}

}  // namespace

double v_closed(const ExpectationParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("v_closed: t >= 0");
  const double eps = p.lambda - p.alpha;
  return p.v0 * std::exp(-t) * (1.0 + p.lambda * expm1_ratio(eps, t));
}

double v_dot_closed(const ExpectationParams& p, double t) {
  const double eps = p.lambda - p.alpha;
  const double g = 1.0 + p.lambda * expm1_ratio(eps, t);
  const double g_dot = p.lambda * std::exp(eps * t);
  return p.v0 * std::exp(-t) * (g_dot - g);
}

double s_closed(const ExpectationParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("s_closed: t >= 0");
  return p.v0 * std::exp((p.lambda / (1.0 + p.alpha) - 1.0) * t);
}

namespace {

struct State {
  double v;
  double w;  // dv/dt
};

State deriv(const ExpectationParams& p, const State& s) {
  const double a = p.lambda - p.alpha - 2.0;
  const double b = p.lambda - p.alpha - 1.0;
  return {s.w, a * s.w + b * s.v};
}

State rk4_step(const ExpectationParams& p, const State& s, double h) {
  const State k1 = deriv(p, s);
  const State k2 = deriv(p, {s.v + 0.5 * h * k1.v, s.w + 0.5 * h * k1.w});
  const State k3 = deriv(p, {s.v + 0.5 * h * k2.v, s.w + 0.5 * h * k2.w});
  const State k4 = deriv(p, {s.v + h * k3.v, s.w + h * k3.w});
  return {s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
          s.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

}  // namespace

OdeTrajectory integrate_ode(const ExpectationParams& p, double h, double t_max) {
  p.validate();
  if (!(h > 0.0) || !(t_max > 0.0))
    throw std::invalid_argument("integrate_ode: h > 0 and t_max > 0");
  OdeTrajectory out;
  State s{p.v0, (p.lambda - 1.0) * p.v0};
  double t = 0.0;
  out.t.push_back(t);
  out.v.push_back(s.v);
  out.v_dot.push_back(s.w);
  const long steps = static_cast<long>(std::llround(t_max / h));
  for (long i = 0; i < steps; ++i) {
    const State full = rk4_step(p, s, h);
    const State half = rk4_step(p, rk4_step(p, s, 0.5 * h), 0.5 * h);
    const double scale = std::max({1.0, std::fabs(full.v), std::fabs(half.v)});
    if (std::fabs(full.v - half.v) / scale > 1e-6) out.step_warning = true;
    s = full;  // the full step defines the reproducible fixed-step grid
    t = h * static_cast<double>(i + 1);
    out.t.push_back(t);
    out.v.push_back(s.v);
    out.v_dot.push_back(s.w);
  }
  return out;
}

RegimeReport compare_regime(const ExpectationParams& p) {
  p.validate();
  if (p.lambda > p.alpha + 1.0)
    return {1, "diverges like lambda/(lambda-alpha) v0 e^((lambda-alpha-1)t); "
               "eventually above the matched constant-rate curve"};
  if (p.lambda == p.alpha + 1.0)
    return {2, "matched constant-rate curve stays at v0; ageing curve rises to "
               "v0*lambda"};
  if (p.lambda > p.alpha)
    return {3, "decays like lambda/(lambda-alpha) v0 e^((lambda-alpha-1)t); "
               "matched curve eventually above"};
  if (p.lambda == p.alpha)
    return {4, "decays like alpha t v0 e^-t; matched curve eventually above"};
  return {5, "decays like alpha/(alpha-lambda) v0 e^-t; matched curve "
             "eventually above"};
}

std::optional<double> peak_time(const ExpectationParams& p) {
  p.validate();
  if (p.lambda <= 1.0) return std::nullopt;           // never increases
  if (p.lambda >= p.alpha + 1.0) return std::nullopt; // no interior maximum
  // v_dot(0) = (lambda-1) v0 > 0 and v -> 0, so the derivative changes
  // sign exactly once; bracket it and bisect.
  double lo = 0.0, hi = 1.0;
  while (v_dot_closed(p, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) return std::nullopt;  // numerically flat; give up
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (v_dot_closed(p, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace brw
