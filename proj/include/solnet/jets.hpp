#pragma once

// Finite jets at -1 (theta = pi): jets of flows, their inversion, B_n membership and the
// splitting gamma = Exp(g) o gamma_under for piecewise smooth gamma.

#include <cmath>
#include <vector>

#include "circle_diffeo.hpp"
#include "cutoffs.hpp"

namespace solnet {

inline constexpr int kDefaultJetOrder = 8;

enum class JetSide { left, right, two_sided };

/// Derivatives (lambda_0, ..., lambda_n) at -1. lambda_0 is the image angle (pi for a fixed -1).
/// For two-sided jets `values` is the left side (theta -> pi from below, the R_+ end of the
/// line picture) and `right_values` the right side.
struct JetAtMinusOne {
  JetSide side = JetSide::left;
  std::vector<double> values;
  std::vector<double> right_values;

  int order() const { return static_cast<int>(values.size()) - 1; }
  const std::vector<double>& left() const { return values; }
  const std::vector<double>& right() const { return side == JetSide::two_sided ? right_values : values; }

  static JetAtMinusOne identity(int n) {
    JetAtMinusOne j;
    j.values.assign(n + 1, 0.0);
    j.values[0] = kPi;
    if (n >= 1) j.values[1] = 1.0;
    return j;
  }
  static JetAtMinusOne zero_field(int n) {
    JetAtMinusOne j;
    j.values.assign(n + 1, 0.0);
    return j;
  }
};

inline void check_jet_order(int n) {
  require(n >= 0 && n <= kDefaultJetOrder, ErrorKind::unsupported_order, "jet order exceeds supported maximum (8)");
}

inline std::vector<double> one_side_jets(const AngleFunction& g, int n, Side side, bool is_map) {
  RSeries s = g.series(kPi, n + 1, side);
  std::vector<double> d = s.derivatives();
  if (is_map) {
    double sh;
    double r = reduce_angle(d[0], sh);
    d[0] = r == -kPi ? kPi : r;
  }
  return d;
}

/// Two-sided jets of a circle map at -1.
inline JetAtMinusOne jets_at_minus_one(const CircleMap& g, int n = kDefaultJetOrder) {
  require(n >= 0 && n + 1 <= kMaxSeriesTerms, ErrorKind::unsupported_order, "jet order too large");
  JetAtMinusOne j;
  j.side = JetSide::two_sided;
  j.values = one_side_jets(g, n, Side::left, true);
  j.right_values = one_side_jets(g, n, Side::right, true);
  return j;
}

/// Two-sided jets of a vector field at -1.
inline JetAtMinusOne field_jets_at_minus_one(const VectorField& f, int n = kDefaultJetOrder) {
  JetAtMinusOne j;
  j.side = JetSide::two_sided;
  j.values = one_side_jets(f, n, Side::left, false);
  j.right_values = one_side_jets(f, n, Side::right, false);
  return j;
}

namespace detail {

inline RSeries jet_to_series(const std::vector<double>& d, double shift_const) {
  int n = static_cast<int>(d.size());
  RSeries s(0.0, n);
  double fact = 1.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) fact *= k;
    s[k] = d[k] / fact;
  }
  s[0] -= shift_const;
  return s;
}

// Flow of the field with jet `fj` (lambda_0 = lambda_1 = 0) through the jet ODE.
inline std::vector<double> flow_jets(const std::vector<double>& fj, double t) {
  int n = static_cast<int>(fj.size()) - 1;
  require(std::abs(fj[0]) < 1e-14 && (n < 1 || std::abs(fj[1]) < 1e-14), ErrorKind::precondition,
          "field jets must have lambda_0 = lambda_1 = 0");
  RSeries fser = jet_to_series(fj, 0.0);
  RSeries a = RSeries::variable(0.0, n + 1);  // displacement from pi
  auto rhs = [&fser](double, const RSeries& y) { return compose(fser, y.without_constant()); };
  OdeOptions opt;
  opt.rtol = 1e-14;
  opt.atol = 1e-15;
  RSeries out = integrate_dopri5(rhs, a, 0.0, t, series_error_norm, opt);
  std::vector<double> d = out.derivatives();
  d[0] = kPi;
  return d;
}

}  // namespace detail

/// Jets of Exp(t f) at -1 from the jets of f (f in b_1).
inline JetAtMinusOne jet_of_exp(const JetAtMinusOne& fjets, double t) {
  check_jet_order(fjets.order());
  JetAtMinusOne out;
  out.side = fjets.side;
  out.values = detail::flow_jets(fjets.values, t);
  if (fjets.side == JetSide::two_sided) out.right_values = detail::flow_jets(fjets.right_values, t);
  return out;
}

/// Composition of jets of maps fixing -1: jets of a o b.
inline std::vector<double> compose_jets(const std::vector<double>& a, const std::vector<double>& b) {
  int n = static_cast<int>(std::min(a.size(), b.size()));
  RSeries sa = detail::jet_to_series(a, kPi), sb = detail::jet_to_series(b, kPi);
  RSeries c = compose(sa.truncated(n), sb.truncated(n));
  std::vector<double> d = c.derivatives();
  d[0] = kPi;
  return d;
}

namespace detail {

inline std::vector<double> invert_one(const std::vector<double>& target) {
  int n = static_cast<int>(target.size()) - 1;
  require(n < 1 || std::abs(target[1] - 1.0) < 1e-12, ErrorKind::precondition, "target jets need lambda_1 = 1");
  std::vector<double> g(n + 1, 0.0);
  // d(output_k)/d(g_k) = 1 and output_k depends only on g_2..g_k: the correction below is a
  // Newton step with the unit-triangular Jacobian replaced by its diagonal, exact after n steps.
  for (int it = 0; it < 50; ++it) {
    std::vector<double> cur = flow_jets(g, 1.0);
    double res = 0.0;
    for (int k = 2; k <= n; ++k) {
      double r = target[k] - cur[k];
      res = std::max(res, std::abs(r) / std::max(1.0, std::abs(target[k])));
      g[k] += r;
    }
    if (res < 1e-14) return g;
    if (it > n + 3 && res < 1e-12) return g;
  }
  fail(ErrorKind::numeric, "jet inversion did not converge");
}

}  // namespace detail

/// Field jets g with jet_of_exp(g, 1) = target (target in B_1).
inline JetAtMinusOne invert_jets(const JetAtMinusOne& target) {
  check_jet_order(target.order());
  JetAtMinusOne g;
  g.side = target.side;
  g.values = detail::invert_one(target.values);
  if (target.side == JetSide::two_sided) g.right_values = detail::invert_one(target.right_values);
  return g;
}

/// gamma in B_n: fixes -1; for n >= 1 also gamma' = 1; derivatives 2..n vanish (both sides).
inline bool b_n_membership(const CircleMap& g, int n, double tol) {
  JetAtMinusOne j = jets_at_minus_one(g, std::max(n, 1));
  for (const auto* side : {&j.values, &j.right_values}) {
    const auto& d = *side;
    if (circular_distance(d[0], kPi) > tol) return false;
    if (n >= 1 && std::abs(d[1] - 1.0) > tol) return false;
    for (int k = 2; k <= n; ++k)
      if (std::abs(d[k]) > tol) return false;
  }
  return true;
}

/// Field equal to the polynomial with the given one-sided jets near -1 on each side,
/// cut off by a C-infinity bump; C^1 across -1.
inline VectorField glued_jet_field(const JetAtMinusOne& g, double w1 = 0.3, double w2 = 0.8) {
  auto left = std::make_shared<RSeries>(detail::jet_to_series(g.left(), 0.0));
  auto right = std::make_shared<RSeries>(detail::jet_to_series(g.right(), 0.0));
  auto eval = [left, right, w1, w2](auto r, bool use_left) {
    // r is the local coordinate u = theta - pi (left) or theta + pi (right), as a double or series.
    const RSeries& p = use_left ? *left : *right;
    decltype(r) acc = r * 0.0;
    for (int k = p.terms() - 1; k >= 0; --k) acc = acc * r + p[k];
    return acc * bump(r, w1, w2);
  };
  auto v = [eval](double x, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    return r > 0 ? eval(r - kPi, true) : eval(r + kPi, false);
  };
  auto s = [eval](double x, int n, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    return r > 0 ? eval(RSeries::variable(r - kPi, n), true) : eval(RSeries::variable(r + kPi, n), false);
  };
  return VectorField(v, s, {kPi}, "glued_jet_field", SupportKind::interval);
}

struct PsOneDecomposition {
  VectorField g;
  CircleMap gamma_under;
  JetAtMinusOne g_jets;
  double jet_mismatch = 0.0;  ///< max over k <= n of |left - right| jets of gamma_under
};

/// gamma = Exp(g) o gamma_under with gamma_under = Exp(-g) o gamma smooth at -1 through order n.
inline PsOneDecomposition decompose_psone(const CircleMap& gamma, int n = kDefaultJetOrder) {
  check_jet_order(n);
  JetAtMinusOne j = jets_at_minus_one(gamma, n);
  for (const auto* side : {&j.values, &j.right_values}) {
    require(circular_distance((*side)[0], kPi) < 1e-10, ErrorKind::precondition, "gamma must fix -1");
    require(n < 1 || std::abs((*side)[1] - 1.0) < 1e-9, ErrorKind::precondition, "gamma'(-1) must be 1");
  }
  PsOneDecomposition out;
  out.g_jets = invert_jets(j);
  out.g = glued_jet_field(out.g_jets);
  out.gamma_under = compose(exp_field(out.g, -1.0), gamma);
  JetAtMinusOne ju = jets_at_minus_one(out.gamma_under, n);
  for (int k = 1; k <= n; ++k) out.jet_mismatch = std::max(out.jet_mismatch, std::abs(ju.values[k] - ju.right_values[k]));
  return out;
}

}  // namespace solnet
