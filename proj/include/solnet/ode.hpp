#pragma once

// Dormand-Prince 5(4) with step-size control, generic over the state type.
// The state needs +, -, scalar * and an error measure supplied by the caller.

#include <algorithm>
#include <cmath>
#include <functional>

#include "errors.hpp"

namespace solnet {

struct OdeOptions {
  double rtol = 1e-13;
  double atol = 1e-14;
  double min_step = 1e-14;
  int max_steps = 200000;
};

template <typename State, typename Rhs, typename Norm>
State integrate_dopri5(Rhs&& rhs, State y, double t0, double t1, Norm&& err_norm,
                       const OdeOptions& opt = {}) {
  if (t0 == t1) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::min(0.05, std::abs(t1 - t0));
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  State k1 = rhs(t, y);
  for (int step = 0; step < opt.max_steps; ++step) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    State k2 = rhs(t + c2 * h, y + (h * a21) * k1);
    State k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    State k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    State k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    State k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = rhs(t + h, y5);
    State errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = err_norm(errv, y, y5, opt.atol, opt.rtol);
    if (!std::isfinite(err)) fail(ErrorKind::integration_failure, "non-finite ODE state");
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      if (dir * (t - t1) >= 0) return y;
    }
    double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (std::abs(h) < opt.min_step) fail(ErrorKind::integration_failure, "ODE step size underflow");
  }
  fail(ErrorKind::integration_failure, "ODE step budget exhausted");
}

/// Scalar convenience wrapper.
inline double integrate_scalar(const std::function<double(double, double)>& rhs, double y0,
                               double t0, double t1, const OdeOptions& opt = {}) {
  auto norm = [](double e, double y, double y1, double atol, double rtol) {
    return std::abs(e) / (atol + rtol * std::max(std::abs(y), std::abs(y1)));
  };
  return integrate_dopri5(rhs, y0, t0, t1, norm, opt);
}

}  // namespace solnet
