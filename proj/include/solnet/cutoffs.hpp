#pragma once

#include <cmath>

#include "circle_diffeo.hpp"

namespace solnet {

/// C-infinity transition: 0 for x <= 0, 1 for x >= 1.
template <typename X>
X smooth_transition(const X& x) {
  double v = value_of(x);
  if (v <= 0.0) return x * 0.0;
  if (v >= 1.0) return x * 0.0 + 1.0;
  X a = exp(-1.0 / x);
  X b = exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

/// Degree-9 smoothstep (C^4): 0 for x <= 0, 1 for x >= 1.
template <typename X>
X smoothstep9(const X& x) {
  double v = value_of(x);
  if (v <= 0.0) return x * 0.0;
  if (v >= 1.0) return x * 0.0 + 1.0;
  X x2 = x * x;
  X x5 = x2 * x2 * x;
  X poly = 126.0 - 420.0 * x + 540.0 * x2 - 315.0 * x2 * x + 70.0 * x2 * x2;
  return x5 * poly;
}

/// t_1 in the line picture: 1 on (-inf, 1], 0 on [2, inf).
template <typename X>
X t1_profile(const X& t) {
  return 1.0 - smoothstep9(t - 1.0);
}

/// Cutoff h_+ (0 on [-pi, 0], 1 on [pi/2, pi]) or h_- (its mirror), as periodic functions.
inline VectorField half_cutoff(bool plus) {
  auto core = [plus](auto r) {
    // r is in [-pi, pi]; the left limit at -1 is passed as r = pi.
    return plus ? smooth_transition(r / (kPi / 2)) : smooth_transition(-r / (kPi / 2));
  };
  auto v = [core](double x, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    return core(r);
  };
  auto s = [core](double x, int n, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    return core(RSeries::variable(r, n));
  };
  return VectorField(v, s, {kPi}, plus ? "h_plus" : "h_minus", SupportKind::interval);
}

/// Even C-infinity bump in u: 1 for |u| <= w1, 0 for |u| >= w2.
template <typename X>
X bump(const X& u, double w1, double w2) {
  double v = std::abs(value_of(u));
  if (v <= w1) return u * 0.0 + 1.0;
  if (v >= w2) return u * 0.0;
  X a = value_of(u) > 0 ? u : -1.0 * u;
  return 1.0 - smooth_transition((a - w1) / (w2 - w1));
}

}  // namespace solnet
