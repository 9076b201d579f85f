#pragma once

// Orientation-preserving circle maps represented by their lifts, vector fields on the circle,
// the exponential flow, Cayley transform, pushforward and the Schwarzian derivative.
//
// Side convention: a breakpoint b is approached from Side::left (angles < b) or Side::right
// (angles > b). At -1 (theta = pi) the left side is the end of R_+ in the line picture.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ode.hpp"
#include "series.hpp"

namespace solnet {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Side { left, right };

enum class MapClass { smooth, piecewise_c1, piecewise_c0, sobolev };

inline MapClass weakest(MapClass a, MapClass b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

inline const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::smooth: return "smooth";
    case MapClass::piecewise_c1: return "piecewise-smooth-C1";
    case MapClass::piecewise_c0: return "piecewise-smooth-C0";
    case MapClass::sobolev: return "sobolev";
  }
  return "?";
}

/// Reduces theta to r in [-pi, pi) with theta = r + 2 pi k.
inline double reduce_angle(double theta, double& shift) {
  double k = std::floor((theta + kPi) / kTwoPi);
  double r = theta - kTwoPi * k;
  if (r >= kPi) {
    r -= kTwoPi;
    k += 1;
  } else if (r < -kPi) {
    r += kTwoPi;
    k -= 1;
  }
  shift = kTwoPi * k;
  return r;
}

/// Angle in [0, 2 pi).
inline double wrap_positive(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline double circular_distance(double a, double b) {
  double d = std::abs(wrap_positive(a) - wrap_positive(b));
  return std::min(d, kTwoPi - d);
}

/// Moves x onto the nearest listed breakpoint (mod 2 pi) when closer than tol.
inline double snap_to(double x, const std::vector<double>& bps, double tol = 1e-11) {
  for (double b : bps) {
    double r = wrap_positive(x);
    double d = r - b;
    if (d > kPi) d -= kTwoPi;
    if (d < -kPi) d += kTwoPi;
    if (std::abs(d) < tol) return x - d;
  }
  return x;
}

inline std::vector<double> normalized_breakpoints(std::vector<double> bps) {
  for (double& b : bps) b = wrap_positive(b);
  std::sort(bps.begin(), bps.end());
  std::vector<double> out;
  for (double b : bps)
    if (out.empty() || std::abs(b - out.back()) > 1e-12) out.push_back(b);
  if (out.size() > 1 && kTwoPi - out.back() + out.front() < 1e-12) out.pop_back();
  return out;
}

using ValueFn = std::function<double(double, Side)>;
using SeriesFn = std::function<RSeries(double, int, Side)>;

/// A locally smooth function given by one generic callable (double or RSeries argument).
struct LocalFn {
  std::function<double(double)> value;
  std::function<RSeries(const RSeries&)> series;
};

template <typename F>
LocalFn local_fn(F f) {
  return LocalFn{[f](double x) { return static_cast<double>(f(x)); },
                 [f](const RSeries& x) { return static_cast<RSeries>(f(x)); }};
}

// ---------------------------------------------------------------------------------------------
// Periodic functions shared by maps and fields

/// A function of the angle with one-sided evaluation; used as the common core of
/// CircleMap (lift, quasi-periodic) and VectorField (periodic).
class AngleFunction {
 public:
  AngleFunction() = default;
  AngleFunction(ValueFn v, SeriesFn s, std::vector<double> bps)
      : value_(std::move(v)), series_(std::move(s)), bps_(normalized_breakpoints(std::move(bps))) {}

  double operator()(double theta, Side side = Side::right) const { return value_(theta, side); }
  RSeries series(double theta, int terms, Side side = Side::right) const {
    if (terms == 1) return RSeries(value_(theta, side), 1);
    return series_(theta, terms, side);
  }
  /// Evaluation at a series argument (chain rule through Taylor composition).
  RSeries apply(const RSeries& x, Side side = Side::right) const {
    if (x.terms() == 1) return RSeries(value_(x[0], side), 1);
    return compose(series_(x[0], x.terms(), side), x.without_constant());
  }
  double derivative(double theta, Side side = Side::right, int k = 1) const {
    return series(theta, k + 1, side).derivative(k);
  }
  const std::vector<double>& breakpoints() const { return bps_; }
  bool valid() const { return static_cast<bool>(value_); }

 protected:
  ValueFn value_;
  SeriesFn series_;
  std::vector<double> bps_;
};

// ---------------------------------------------------------------------------------------------
// Circle maps

class CircleMap : public AngleFunction {
 public:
  CircleMap()
      : AngleFunction([](double x, Side) { return x; },
                      [](double x, int n, Side) { return RSeries::variable(x, n); }, {}),
        cls_(MapClass::smooth),
        label_("identity"),
        is_identity_(true) {}
  CircleMap(ValueFn v, SeriesFn s, MapClass cls, std::vector<double> bps, std::string label = "")
      : AngleFunction(std::move(v), std::move(s), std::move(bps)), cls_(cls), label_(std::move(label)) {
    if (bps_.empty() && cls_ != MapClass::sobolev) cls_ = MapClass::smooth;
  }

  MapClass map_class() const { return cls_; }
  const std::string& label() const { return label_; }
  bool is_identity() const { return is_identity_; }

  /// Value at a point of the circle represented in (-pi, pi].
  double circle_value(double theta, Side side = Side::right) const {
    double s;
    double r = reduce_angle((*this)(theta, side), s);
    return r == -kPi ? kPi : r;
  }

 private:
  MapClass cls_ = MapClass::smooth;
  std::string label_;
  bool is_identity_ = false;
};

template <typename F>
CircleMap make_smooth_map(F f, std::string label) {
  return CircleMap([f](double x, Side) { return static_cast<double>(f(x)); },
                   [f](double x, int n, Side) { return static_cast<RSeries>(f(RSeries::variable(x, n))); },
                   MapClass::smooth, {}, std::move(label));
}

/// Evaluates pieces defined on [starts[i], starts[i+1]) within [-pi, pi), extended
/// equivariantly (`periodic_offset` = 2 pi for lifts, 0 for periodic functions).
struct PiecewiseEval {
  std::vector<double> starts;  // starts[0] == -pi, increasing
  std::vector<LocalFn> pieces;
  double periodic_offset = kTwoPi;

  // Chooses the piece and local argument for theta with the side rule.
  std::size_t locate(double theta, Side side, double& r, double& shift) const {
    r = reduce_angle(theta, shift);
    std::size_t i = 0;
    while (i + 1 < starts.size() && r >= starts[i + 1]) ++i;
    if (side == Side::left && r == starts[i]) {
      if (i == 0) {
        r += kTwoPi;
        shift -= kTwoPi;
        return pieces.size() - 1;
      }
      return i - 1;
    }
    return i;
  }
  double value(double theta, Side side) const {
    double r, shift;
    std::size_t i = locate(theta, side, r, shift);
    return pieces[i].value(r) + shift / kTwoPi * periodic_offset;
  }
  RSeries series(double theta, int n, Side side) const {
    double r, shift;
    std::size_t i = locate(theta, side, r, shift);
    RSeries s = pieces[i].series(RSeries::variable(r, n));
    s += shift / kTwoPi * periodic_offset;
    return s;
  }
};

inline CircleMap make_piecewise_map(std::vector<double> starts, std::vector<LocalFn> pieces, MapClass cls,
                                    std::string label) {
  require(!starts.empty() && starts.size() == pieces.size() && starts[0] == -kPi, ErrorKind::invalid_map,
          "piecewise map needs pieces starting at -pi");
  auto pe = std::make_shared<PiecewiseEval>(PiecewiseEval{starts, std::move(pieces), kTwoPi});
  std::vector<double> bps(starts.begin(), starts.end());
  return CircleMap([pe](double x, Side s) { return pe->value(x, s); },
                   [pe](double x, int n, Side s) { return pe->series(x, n, s); }, cls, bps, std::move(label));
}

/// Equivariance and strict monotonicity on a grid with `per_gap` points per breakpoint gap.
inline void validate_map(const CircleMap& g, int per_gap = 16) {
  std::vector<double> bps = g.breakpoints();
  std::vector<double> grid;
  if (bps.empty()) {
    for (int i = 0; i < 4 * per_gap; ++i) grid.push_back(kTwoPi * i / (4 * per_gap));
  } else {
    for (std::size_t j = 0; j < bps.size(); ++j) {
      double a = bps[j], b = j + 1 < bps.size() ? bps[j + 1] : bps[0] + kTwoPi;
      for (int i = 0; i < per_gap; ++i) grid.push_back(a + (b - a) * (i + 0.5) / per_gap);
    }
  }
  std::sort(grid.begin(), grid.end());
  double prev = -INFINITY;
  for (double x : grid) {
    double v = g(x);
    require(std::isfinite(v), ErrorKind::invalid_map, "lift is not finite");
    require(v > prev, ErrorKind::invalid_map, "lift is not strictly increasing");
    prev = v;
    require(std::abs(g(x + kTwoPi) - v - kTwoPi) < 1e-9, ErrorKind::invalid_map, "lift is not equivariant");
  }
  require(g(grid.front() + kTwoPi) > prev, ErrorKind::invalid_map, "lift is not strictly increasing");
}

// ---------------------------------------------------------------------------------------------
// Moebius group (line picture s -> (a s + b)/(c s + d))

struct MobiusElement {
  double a = 1, b = 0, c = 0, d = 1;

  static MobiusElement normalized(double a, double b, double c, double d) {
    double det = a * d - b * c;
    require(det > 0 && std::isfinite(det), ErrorKind::domain, "Moebius element needs ad - bc > 0");
    double s = 1.0 / std::sqrt(det);
    return {a * s, b * s, c * s, d * s};
  }
  static MobiusElement rotation(double alpha) {
    return {std::cos(alpha / 2), std::sin(alpha / 2), -std::sin(alpha / 2), std::cos(alpha / 2)};
  }
  static MobiusElement dilation(double t) { return {std::exp(t / 2), 0, 0, std::exp(-t / 2)}; }
  static MobiusElement translation(double t) { return {1, t, 0, 1}; }

  double determinant() const { return a * d - b * c; }
  MobiusElement operator*(const MobiusElement& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  MobiusElement inverse() const { return {d, -b, -c, a}; }
  /// Equality in PSL(2,R).
  bool equals(const MobiusElement& o, double tol = 1e-12) const {
    auto close = [&](double s) {
      return std::abs(a - s * o.a) < tol && std::abs(b - s * o.b) < tol && std::abs(c - s * o.c) < tol &&
             std::abs(d - s * o.d) < tol;
    };
    return close(1.0) || close(-1.0);
  }
};

/// Lift theta -> theta + 2 arg(alpha + beta e^{-i theta}) of the Cayley-conjugated element.
inline CircleMap mobius_map(const MobiusElement& m, std::string label = "mobius") {
  MobiusElement n = MobiusElement::normalized(m.a, m.b, m.c, m.d);
  std::complex<double> alpha(n.a + n.d, n.b - n.c), beta(n.d - n.a, n.b + n.c);
  std::complex<double> rho = beta / alpha;
  double p = rho.real(), q = rho.imag(), base = 2.0 * std::arg(alpha);
  auto f = [p, q, base](auto x) {
    auto cx = cos(x);
    auto sx = sin(x);
    auto re = 1.0 + p * cx + q * sx;
    auto im = q * cx - p * sx;
    return x + 2.0 * atan2(im, re) + base;
  };
  return make_smooth_map(f, std::move(label));
}

inline CircleMap identity_map() { return CircleMap(); }

inline CircleMap rotation(double alpha) {
  return make_smooth_map([alpha](auto x) { return x + alpha; }, "rotation");
}
inline CircleMap dilation(double t) { return mobius_map(MobiusElement::dilation(t), "dilation"); }
inline CircleMap translation(double t) { return mobius_map(MobiusElement::translation(t), "translation"); }

// ---------------------------------------------------------------------------------------------
// Cayley transform C(z) = i(1 - z)/(1 + z) = tan(theta/2)

inline double cayley(double theta) {
  double s;
  double r = reduce_angle(theta, s);
  require(std::abs(std::abs(r) - kPi) > 1e-14 && r != -kPi, ErrorKind::domain, "Cayley transform undefined at -1");
  return std::tan(r / 2);
}
inline double cayley_inv(double s) { return 2.0 * std::atan(s); }
inline std::complex<double> cayley_z(std::complex<double> z) {
  const std::complex<double> i(0, 1);
  require(std::abs(1.0 + z) > 1e-300, ErrorKind::domain, "Cayley transform undefined at -1");
  return i * (1.0 - z) / (1.0 + z);
}
inline std::complex<double> cayley_inv_z(std::complex<double> s) {
  const std::complex<double> i(0, 1);
  return (1.0 + i * s) / (1.0 - i * s);
}

// ---------------------------------------------------------------------------------------------
// Vector fields (periodic functions of the angle)

enum class SupportKind { full_circle, interval, half_line };

class VectorField : public AngleFunction {
 public:
  VectorField() : VectorField(trig({0.0}, {})) {}
  VectorField(ValueFn v, SeriesFn s, std::vector<double> bps, std::string label = "",
              SupportKind support = SupportKind::full_circle)
      : AngleFunction(std::move(v), std::move(s), std::move(bps)), label_(std::move(label)), support_(support) {}

  /// f = sum_k cos_k cos(k theta) + sum_{k>=1} sin_k sin(k theta); sin list starts at k = 1.
  static VectorField trig(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    auto c = std::make_shared<std::vector<double>>(std::move(cos_coeffs));
    auto s = std::make_shared<std::vector<double>>(std::move(sin_coeffs));
    auto eval = [c, s](auto x) {
      decltype(x) acc = x * 0.0;
      for (std::size_t k = 0; k < c->size(); ++k)
        if ((*c)[k] != 0.0) acc = acc + (*c)[k] * cos(static_cast<double>(k) * x);
      for (std::size_t k = 0; k < s->size(); ++k)
        if ((*s)[k] != 0.0) acc = acc + (*s)[k] * sin(static_cast<double>(k + 1) * x);
      return acc;
    };
    VectorField f([eval](double x, Side) { return eval(x); },
                  [eval](double x, int n, Side) { return eval(RSeries::variable(x, n)); }, {}, "trig");
    f.cos_ = *c;
    f.sin_ = *s;
    f.is_trig_ = true;
    return f;
  }
  static VectorField constant(double v) { return trig({v}, {}); }

  template <typename F>
  static VectorField smooth(F f, std::string label) {
    return VectorField([f](double x, Side) { return static_cast<double>(f(x)); },
                       [f](double x, int n, Side) { return static_cast<RSeries>(f(RSeries::variable(x, n))); }, {},
                       std::move(label));
  }

  bool is_trig() const { return is_trig_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  int trig_degree() const {
    return static_cast<int>(std::max(cos_.empty() ? 0 : cos_.size() - 1, sin_.size()));
  }
  const std::string& label() const { return label_; }
  SupportKind support() const { return support_; }

  friend VectorField operator+(const VectorField& f, const VectorField& g) {
    if (f.is_trig_ && g.is_trig_) {
      auto add = [](std::vector<double> a, const std::vector<double>& b) {
        if (a.size() < b.size()) a.resize(b.size(), 0.0);
        for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
        return a;
      };
      return trig(add(f.cos_, g.cos_), add(f.sin_, g.sin_));
    }
    std::vector<double> bps = f.breakpoints();
    bps.insert(bps.end(), g.breakpoints().begin(), g.breakpoints().end());
    return VectorField([f, g](double x, Side s) { return f(x, s) + g(x, s); },
                       [f, g](double x, int n, Side s) { return f.series(x, n, s) + g.series(x, n, s); }, bps,
                       "sum");
  }
  friend VectorField operator*(double a, const VectorField& f) {
    if (f.is_trig_) {
      std::vector<double> c = f.cos_, s = f.sin_;
      for (double& v : c) v *= a;
      for (double& v : s) v *= a;
      return trig(c, s);
    }
    return VectorField([f, a](double x, Side s) { return a * f(x, s); },
                       [f, a](double x, int n, Side s) { return a * f.series(x, n, s); }, f.breakpoints(),
                       f.label(), f.support());
  }
  friend VectorField operator-(const VectorField& f, const VectorField& g) { return f + (-1.0) * g; }
  /// Pointwise product (e.g. cutoff times field).
  friend VectorField operator*(const VectorField& f, const VectorField& g) {
    std::vector<double> bps = f.breakpoints();
    bps.insert(bps.end(), g.breakpoints().begin(), g.breakpoints().end());
    return VectorField([f, g](double x, Side s) { return f(x, s) * g(x, s); },
                       [f, g](double x, int n, Side s) { return f.series(x, n, s) * g.series(x, n, s); }, bps,
                       "product");
  }

 private:
  std::vector<double> cos_, sin_;
  bool is_trig_ = false;
  std::string label_;
  SupportKind support_ = SupportKind::full_circle;
};

/// The translation generator 1 + cos(theta).
inline VectorField translation_generator() { return VectorField::trig({1.0, 1.0}, {}); }
/// The dilation generator sin(theta).
inline VectorField dilation_generator() { return VectorField::trig({0.0}, {1.0}); }

/// Line-coordinate description of a field: density g(t) on R, constant outside [t_lo, t_hi].
struct LineProfile {
  LocalFn g;
  double t_lo = -INFINITY, t_hi = INFINITY;
  double g_minus_inf = 0.0, g_plus_inf = 0.0;
};

/// Pullback of a line density g via Cayley: f(theta) = (1 + cos theta) g(tan(theta/2)).
inline VectorField field_from_line(LineProfile prof, std::string label = "line", SupportKind support =
                                                                                      SupportKind::half_line) {
  auto p = std::make_shared<LineProfile>(std::move(prof));
  auto eval_v = [p](double x, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    if (std::abs(r) == kPi) return 0.0;
    double t = std::tan(r / 2);
    double gv = t > p->t_hi ? p->g_plus_inf : (t < p->t_lo ? p->g_minus_inf : p->g.value(t));
    return (1.0 + std::cos(r)) * gv;
  };
  auto eval_s = [p](double x, int n, Side side) {
    double sh;
    double r = reduce_angle(x, sh);
    if (r == -kPi && side == Side::left) r = kPi;
    RSeries X = RSeries::variable(r, n);
    RSeries w = 1.0 + cos(X);
    bool at_end = std::abs(r) == kPi;
    double t = at_end ? (r > 0 ? INFINITY : -INFINITY) : std::tan(r / 2);
    if (t > p->t_hi) return w * p->g_plus_inf;
    if (t < p->t_lo) return w * p->g_minus_inf;
    return w * p->g.series(tan(X / 2.0));
  };
  std::vector<double> bps;
  if (p->g_minus_inf != p->g_plus_inf) bps.push_back(kPi);
  return VectorField(eval_v, eval_s, bps, std::move(label), support);
}

/// Line density of a field under the geometric rule: (C_* f)(t) = (1 + t^2)/2 f(2 atan t).
inline RSeries line_density(const VectorField& f, const RSeries& t) {
  RSeries th = 2.0 * atan(t);
  return (1.0 + t * t) / 2.0 * f.apply(th);
}
inline double line_density(const VectorField& f, double t) {
  return (1.0 + t * t) / 2.0 * f(2.0 * std::atan(t));
}

// ---------------------------------------------------------------------------------------------
// Group operations

inline CircleMap invert(const CircleMap& g);

namespace detail {

// Solves g(x) = y for an increasing lift; Newton safeguarded by bisection.
inline double solve_lift(const CircleMap& g, double y, Side side) {
  double guess = y - (g(y, side) - y);
  double lo = guess, hi = guess, step = 0.25;
  for (int i = 0; g(lo, side) > y; ++i) {
    lo -= step;
    step *= 2;
    require(i < 60, ErrorKind::invalid_map, "inverse bracket not found");
  }
  step = 0.25;
  for (int i = 0; g(hi, side) < y; ++i) {
    hi += step;
    step *= 2;
    require(i < 60, ErrorKind::invalid_map, "inverse bracket not found");
  }
  double x = std::clamp(guess, lo, hi);
  for (int it = 0; it < 200; ++it) {
    RSeries s = g.series(x, 2, side);
    double fx = s[0] - y;
    if (fx == 0.0) return x;
    if (fx > 0) hi = x; else lo = x;
    double xn = s[1] > 0 ? x - fx / s[1] : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 2e-16 * std::max(1.0, std::abs(x))) {
      return xn;
    }
    x = xn;
  }
  return x;
}

}  // namespace detail

inline CircleMap compose(const CircleMap& g1, const CircleMap& g2) {
  if (g1.is_identity()) return g2;
  if (g2.is_identity()) return g1;
  const std::vector<double> b1 = g1.breakpoints();
  auto v = [g1, g2, b1](double x, Side s) { return g1(snap_to(g2(x, s), b1), s); };
  auto ser = [g1, g2, b1](double x, int n, Side s) {
    RSeries X = g2.series(x, n, s);
    X[0] = snap_to(X[0], b1);
    return g1.apply(X, s);
  };
  std::vector<double> bps = g2.breakpoints();
  if (!b1.empty()) {
    CircleMap inv2 = invert(g2);
    for (double b : b1) bps.push_back(inv2(b));
  }
  return CircleMap(v, ser, weakest(g1.map_class(), g2.map_class()), bps, "compose");
}

inline CircleMap compose(std::initializer_list<CircleMap> maps) {
  CircleMap out;
  for (const CircleMap& m : maps) out = compose(out, m);
  return out;
}

inline CircleMap invert(const CircleMap& g) {
  if (g.is_identity()) return g;
  const std::vector<double> bg = g.breakpoints();
  auto v = [g, bg](double y, Side s) { return snap_to(detail::solve_lift(g, y, s), bg); };
  auto ser = [g, bg](double y, int n, Side s) {
    double x = snap_to(detail::solve_lift(g, y, s), bg);
    RSeries f = g.series(x, n, s);
    f[0] = y;
    return revert(f, x);
  };
  std::vector<double> bps;
  for (double b : bg) bps.push_back(g(b));
  return CircleMap(v, ser, g.map_class(), bps, "inverse");
}

// ---------------------------------------------------------------------------------------------
// Exponential flow: d/dt Exp(tf)(theta) = f(Exp(tf)(theta))

inline double series_error_norm(const RSeries& e, const RSeries& y0, const RSeries& y1, double atol, double rtol) {
  double m = 0.0;
  for (int k = 0; k < e.terms(); ++k) {
    double sc = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
    m = std::max(m, std::abs(e[k]) / sc);
  }
  return m;
}

inline CircleMap exp_field(const VectorField& f, double t, double tol = 1e-13) {
  if (t == 0.0) return identity_map();
  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 0.1;
  auto v = [f, t, opt](double x, Side s) {
    return integrate_scalar([&f, s](double, double y) { return f(y, s); }, x, 0.0, t, opt);
  };
  auto ser = [f, t, opt](double x, int n, Side s) {
    auto rhs = [&f, s](double, const RSeries& y) { return f.apply(y, s); };
    return integrate_dopri5(rhs, RSeries::variable(x, n), 0.0, t, series_error_norm, opt);
  };
  // Breakpoints of f that are zeros of f stay fixed and remain breakpoints of the flow.
  std::vector<double> bps;
  for (double b : f.breakpoints())
    if (std::abs(f(b, Side::left)) < 1e-14 && std::abs(f(b, Side::right)) < 1e-14) bps.push_back(b);
  return CircleMap(v, ser, bps.empty() ? MapClass::smooth : MapClass::piecewise_c1, bps, "exp_field");
}

// ---------------------------------------------------------------------------------------------
// psi_t: identity on [-pi, 0), dilation delta(t) on [0, pi)

inline CircleMap psi_t(double t) {
  if (t == 0.0) return identity_map();
  CircleMap d = dilation(t);
  LocalFn id{[](double x) { return x; }, [](const RSeries& x) { return x; }};
  LocalFn dl{[d](double x) { return d(x); }, [d](const RSeries& x) { return d.apply(x); }};
  return make_piecewise_map({-kPi, 0.0}, {id, dl}, MapClass::piecewise_c0, "psi_t");
}

// ---------------------------------------------------------------------------------------------
// Pushforward (gamma_* f)(theta) = gamma'(gamma^{-1} theta) f(gamma^{-1} theta)

inline VectorField pushforward(const CircleMap& g, const VectorField& f) {
  if (g.is_identity()) return f;
  CircleMap gi = invert(g);
  auto v = [g, gi, f](double y, Side s) {
    double x = gi(y, s);
    return g.derivative(x, s) * f(x, s);
  };
  auto ser = [g, gi, f](double y, int n, Side s) {
    RSeries X = gi.series(y, n, s);
    RSeries dg = g.series(X[0], n + 1 > kMaxSeriesTerms ? n : n + 1, s).differentiate();
    return compose(dg, X.without_constant()).truncated(n) * f.apply(X, s);
  };
  std::vector<double> bps;
  for (double b : f.breakpoints()) bps.push_back(g(b));
  for (double b : g.breakpoints()) bps.push_back(g(b));
  return VectorField(v, ser, bps, "pushforward", f.support());
}

// ---------------------------------------------------------------------------------------------
// Schwarzian derivative in z = e^{i theta}

/// {gamma, z} at z = e^{i theta}. With phi the lift and d/dz = -i conj(z) d/dtheta applied to
/// gamma(e^{i theta}) = e^{i phi(theta)}, this reduces to z^{-2} ((1 - phi'^2)/2 - S_theta(phi)).
inline std::complex<double> schwarzian_z(const CircleMap& g, double theta, double guard = 1e-3) {
  for (double b : g.breakpoints())
    require(circular_distance(theta, b) > guard, ErrorKind::smoothness, "Schwarzian requested at a breakpoint");
  if (g.is_identity()) return {0.0, 0.0};
  RSeries s = g.series(theta, 4);
  double p1 = s.derivative(1), p2 = s.derivative(2), p3 = s.derivative(3);
  double sth = p3 / p1 - 1.5 * (p2 / p1) * (p2 / p1);
  std::complex<double> z = std::polar(1.0, theta);
  return ((1.0 - p1 * p1) / 2.0 - sth) / (z * z);
}

/// Real bracket (1 - phi'^2)/2 - S_theta(phi) = z^2 {gamma, z}, used by the beta cocycle.
inline double schwarzian_real(const CircleMap& g, double theta, Side side = Side::right) {
  if (g.is_identity()) return 0.0;
  RSeries s = g.series(theta, 4, side);
  double p1 = s.derivative(1), p2 = s.derivative(2), p3 = s.derivative(3);
  return (1.0 - p1 * p1) / 2.0 - (p3 / p1 - 1.5 * (p2 / p1) * (p2 / p1));
}

}  // namespace solnet
