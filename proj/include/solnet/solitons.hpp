#pragma once

// Elements of Diff(S^1, -1) (smooth away from -1, one-sided jets at -1), the invariant r,
// soliton descriptors, localized smooth extensions, the translation cover and the
// square-root map.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "circle_diffeo.hpp"
#include "cutoffs.hpp"
#include "fourier_sobolev.hpp"
#include "jets.hpp"
#include "quadrature.hpp"

namespace solnet {

/// Glued map fixing -1 together with its two-sided jets there.
class NonsmoothDiffeo {
 public:
  NonsmoothDiffeo() : jets_(JetAtMinusOne::identity(kDefaultJetOrder)) {
    jets_.side = JetSide::two_sided;
    jets_.right_values = jets_.values;
  }

  /// `minus` on the R_- side (theta in [-pi, 0)), `plus` on the R_+ side (theta in [0, pi)).
  static NonsmoothDiffeo from_pieces(const CircleMap& minus, const CircleMap& plus, int order = kDefaultJetOrder) {
    require(minus.breakpoints().empty() && plus.breakpoints().empty(), ErrorKind::invalid_map, "pieces must be smooth");
    require(std::abs(minus(-kPi) + kPi) < 1e-12, ErrorKind::invalid_map, "minus piece does not fix -1");
    require(std::abs(plus(kPi) - kPi) < 1e-12, ErrorKind::invalid_map, "plus piece does not fix -1");
    require(std::abs(minus(0.0) - plus(0.0)) < 1e-12, ErrorKind::invalid_map, "pieces disagree at 1");
    if (minus.is_identity() && plus.is_identity()) return from_map(identity_map(), order);
    LocalFn lm{[minus](double x) { return minus(x); }, [minus](const RSeries& x) { return minus.apply(x); }};
    LocalFn lp{[plus](double x) { return plus(x); }, [plus](const RSeries& x) { return plus.apply(x); }};
    return from_map(make_piecewise_map({-kPi, 0.0}, {lm, lp}, MapClass::piecewise_c0, "nonsmooth_pair"), order);
  }

  static NonsmoothDiffeo from_map(const CircleMap& g, int order = kDefaultJetOrder) {
    check_jet_order(order);
    validate_map(g);
    NonsmoothDiffeo nu;
    nu.map_ = g;
    nu.jets_ = jets_at_minus_one(g, order);
    for (const auto* side : {&nu.jets_.values, &nu.jets_.right_values}) {
      require(circular_distance((*side)[0], kPi) < 1e-12, ErrorKind::invalid_map, "map does not fix -1");
      require(order < 1 || (*side)[1] > 0.0, ErrorKind::invalid_map, "one-sided derivative at -1 is not positive");
    }
    return nu;
  }

  const CircleMap& map() const { return map_; }
  const JetAtMinusOne& jets() const { return jets_; }
  double operator()(double theta, Side side = Side::right) const { return map_(theta, side); }

  NonsmoothDiffeo inverse() const { return from_map(invert(map_), jets_.order()); }

 private:
  CircleMap map_;
  JetAtMinusOne jets_;
};

inline NonsmoothDiffeo compose(const NonsmoothDiffeo& a, const NonsmoothDiffeo& b) {
  return NonsmoothDiffeo::from_map(compose(a.map(), b.map()), std::min(a.jets().order(), b.jets().order()));
}

struct OneSidedData {
  double d_minus = 1.0;  ///< derivative at -1 from the R_- side (theta -> -pi from above)
  double d_plus = 1.0;   ///< derivative at -1 from the R_+ side (theta -> pi from below)
  double r = 1.0;        ///< d_plus / d_minus
};

inline OneSidedData one_sided_data(const NonsmoothDiffeo& nu) {
  const JetAtMinusOne& j = nu.jets();
  require(j.order() >= 1, ErrorKind::invalid_map, "jets of order >= 1 are needed");
  OneSidedData d;
  d.d_plus = j.left()[1];
  d.d_minus = j.right()[1];
  require(d.d_plus > 0 && d.d_minus > 0, ErrorKind::invalid_map, "zero one-sided derivative");
  d.r = d.d_plus / d.d_minus;
  return d;
}

/// nu o R_pi o nu^{-1} o R_pi, for nu fixing 1.
inline CircleMap nu_pi(const NonsmoothDiffeo& nu) {
  if (nu.map().is_identity()) return identity_map();
  require(circular_distance(nu(0.0), 0.0) < 1e-12, ErrorKind::precondition,
          "nu must fix 1; compose with a smooth map fixing -1 first");
  CircleMap r = rotation(kPi);
  return compose({nu.map(), r, invert(nu.map()), r});
}

// ---------------------------------------------------------------------------------------------
// Descriptors and classification

struct SolitonDescriptor {
  enum class Kind { automorphic, typeIII };
  std::optional<NonsmoothDiffeo> nu;
  std::function<double(double)> map;  ///< the (possibly non-invertible on S^1) map theta -> image
  double r = 1.0;
  Kind kind = Kind::automorphic;
  std::optional<std::pair<double, double>> range_interval;  ///< image arc for typeIII
};

inline SolitonDescriptor make_soliton(const NonsmoothDiffeo& nu) {
  SolitonDescriptor s;
  s.nu = nu;
  CircleMap m = nu.map();
  s.map = [m](double x) { return m(x); };
  s.r = one_sided_data(nu).r;
  require(s.r > 0, ErrorKind::invalid_map, "r must be positive");
  return s;
}

inline constexpr double kDefaultRTol = 1e-9;

inline bool is_proper(const SolitonDescriptor& s, double tol = kDefaultRTol) {
  require(s.kind == SolitonDescriptor::Kind::automorphic, ErrorKind::precondition, "is_proper needs an automorphic soliton");
  return std::abs(s.r - 1.0) > tol;
}

inline bool equivalent(const SolitonDescriptor& a, const SolitonDescriptor& b, double tol = kDefaultRTol) {
  require(a.kind == SolitonDescriptor::Kind::automorphic && b.kind == SolitonDescriptor::Kind::automorphic,
          ErrorKind::precondition, "equivalence is decided for automorphic solitons");
  return std::abs(a.r - b.r) < tol * std::max(a.r, b.r);
}

/// Index of the first equivalent descriptor for each entry.
inline std::vector<int> equivalence_representatives(const std::vector<SolitonDescriptor>& ss, double tol = kDefaultRTol) {
  std::vector<int> rep(ss.size());
  for (std::size_t i = 0; i < ss.size(); ++i) {
    rep[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < i; ++j)
      if (rep[j] == static_cast<int>(j) && equivalent(ss[i], ss[j], tol)) {
        rep[i] = static_cast<int>(j);
        break;
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Localized smooth extension

struct LineInterval {
  double lo = -INFINITY, hi = INFINITY;
};

namespace detail {

inline double line_to_angle(double s) {
  if (s == INFINITY) return kPi;
  if (s == -INFINITY) return -kPi;
  return cayley_inv(s);
}

// Taylor polynomial (in u = theta - b) of log nu' at a breakpoint b from one side.
inline RSeries log_derivative_taylor(const CircleMap& g, double b, Side side, int order) {
  RSeries s = g.series(b, order + 2, side);
  RSeries d = s.differentiate();
  RSeries l = log(d);
  l[0] = std::log(d[0]);
  return l;  // coefficients in u
}

template <typename X>
X horner(const RSeries& p, const X& u) {
  X acc = u * 0.0;
  for (int k = p.terms() - 1; k >= 0; --k) acc = acc * u + p[k];
  return acc;
}

}  // namespace detail

/// Smooth circle map equal to nu on the arc C^{-1}(I). Beyond a breakpoint adjacent to the arc,
/// log nu' continues as its one-sided Taylor polynomial; a cutoff then blends it into a
/// constant slope fixed so that the map has degree one.
inline CircleMap localized_extension(const NonsmoothDiffeo& nu, LineInterval I, int order = kDefaultJetOrder) {
  const CircleMap g = nu.map();
  if (g.breakpoints().empty()) return g;
  require(I.lo < I.hi, ErrorKind::domain, "empty interval");
  require(std::isfinite(I.lo) || std::isfinite(I.hi), ErrorKind::domain, "interval must avoid a neighbourhood of -1");
  check_jet_order(order);
  const double ta = detail::line_to_angle(I.lo), tb = detail::line_to_angle(I.hi);
  for (double b : g.breakpoints())
    for (double q : {b - kTwoPi, b, b + kTwoPi})
      require(!(q > ta + 1e-12 && q < tb - 1e-12), ErrorKind::precondition, "nu has a breakpoint inside the interval");
  const double w = std::min(0.25, (kTwoPi - (tb - ta)) / 4.0);
  require(w > 1e-3, ErrorKind::domain, "interval leaves no room for the extension");

  // Cut points: breakpoints at or just beyond each end.
  std::optional<double> bR, bL;
  for (double b : g.breakpoints())
    for (double q : {b - kTwoPi, b, b + kTwoPi}) {
      if (q >= tb - 1e-12 && q <= tb + w && (!bR || q < *bR)) bR = q;
      if (q <= ta + 1e-12 && q >= ta - w && (!bL || q > *bL)) bL = q;
    }
  auto pR = std::make_shared<RSeries>(bR ? detail::log_derivative_taylor(g, *bR, Side::left, order) : RSeries());
  auto pL = std::make_shared<RSeries>(bL ? detail::log_derivative_taylor(g, *bL, Side::right, order) : RSeries());

  auto log_slope = [g](double x, int n) {
    RSeries s = g.series(x, n + 1);
    RSeries d = s.differentiate();
    RSeries l = log(d);
    l[0] = std::log(d[0]);
    return l;
  };
  // Extended log nu' near the right and left ends, as a series in the local variable.
  auto ext_right = [=](double x, int n) -> RSeries {
    if (bR && x > *bR) return detail::horner(*pR, RSeries::variable(x - *bR, n));
    return log_slope(x, n);
  };
  auto ext_left = [=](double x, int n) -> RSeries {
    if (bL && x < *bL) return detail::horner(*pL, RSeries::variable(x - *bL, n));
    return log_slope(x, n);
  };
  auto psi_right = [=](double x, int n, double kappa) {
    RSeries chi = 1.0 - smooth_transition(RSeries::variable((x - tb) / w, n) * 1.0);
    // d/dx of the cutoff argument is 1/w: rescale the series.
    double sc = 1.0;
    for (int k = 1; k < n; ++k) {
      sc /= w;
      chi[k] *= sc;
    }
    return chi * ext_right(x, n) + (1.0 - chi) * kappa;
  };
  const double cl = ta + kTwoPi - w;  // start of the left transition (shifted by a period)
  auto psi_left = [=](double x, int n, double kappa) {
    RSeries chi = smooth_transition(RSeries::variable((x - cl) / w, n) * 1.0);
    double sc = 1.0;
    for (int k = 1; k < n; ++k) {
      sc /= w;
      chi[k] *= sc;
    }
    return chi * ext_left(x - kTwoPi, n) + (1.0 - chi) * kappa;
  };
  auto integral = [](const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    NodeSet ns = composite_panels(a, b, {}, (b - a) / 8.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) acc += ns.w[i] * f(ns.x[i]);
    return acc;
  };
  const double ga = g(ta, Side::right), gb = g(tb, Side::left);
  const double len_c = (cl) - (tb + w);
  auto total = [&](double kappa) {
    double iR = integral([&](double x) { return std::exp(psi_right(x, 1, kappa)[0]); }, tb, tb + w);
    double iL = integral([&](double x) { return std::exp(psi_left(x, 1, kappa)[0]); }, cl, ta + kTwoPi);
    return gb - ga + iR + iL + std::exp(kappa) * len_c - kTwoPi;
  };
  double lo = -60.0, hi = 10.0;
  require(total(lo) < 0 && total(hi) > 0, ErrorKind::numeric, "extension slope not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (total(mid) < 0 ? lo : hi) = mid;
  }
  const double kappa = 0.5 * (lo + hi);
  const double iR_full = integral([&](double x) { return std::exp(psi_right(x, 1, kappa)[0]); }, tb, tb + w);

  auto eval = [=](double x, int n) -> RSeries {
    double sh;
    double r = reduce_angle(x - ta, sh) + ta;  // r in [ta - pi, ta + pi)
    if (r < ta) r += kTwoPi;                    // r in [ta, ta + 2 pi)
    double shift = x - r;
    RSeries out;
    if (r <= tb) {
      out = g.series(r, n, r == tb ? Side::left : Side::right);
    } else if (r < tb + w) {
      double v = gb + integral([&](double y) { return std::exp(psi_right(y, 1, kappa)[0]); }, tb, r);
      out = n == 1 ? RSeries(v, 1) : exp(psi_right(r, n - 1, kappa)).integrate(v);
    } else if (r <= cl) {
      out = RSeries::variable(gb + iR_full + std::exp(kappa) * (r - tb - w), n);
      out[1] = n > 1 ? std::exp(kappa) : 0.0;
      if (n > 1)
        for (int k = 2; k < n; ++k) out[k] = 0.0;
    } else {
      double v = ga + kTwoPi - integral([&](double y) { return std::exp(psi_left(y, 1, kappa)[0]); }, r, ta + kTwoPi);
      out = n == 1 ? RSeries(v, 1) : exp(psi_left(r, n - 1, kappa)).integrate(v);
    }
    out[0] += shift;
    return out.truncated(n);
  };
  return CircleMap([eval](double x, Side) { return eval(x, 1)[0]; }, [eval](double x, int n, Side) { return eval(x, n); },
                   MapClass::smooth, {}, "localized_extension");
}

// ---------------------------------------------------------------------------------------------
// Translation cover: tau(t) = Exp(t h_- t) o middle(t) o Exp(t h_+ t)

struct TranslationCover {
  CircleMap minus, middle, plus;
  double product_residual = 0.0;
  double epsilon = 0.0;  ///< middle(t) is the identity on (pi - eps, pi + eps)
};

inline TranslationCover translation_cover(double t, double product_tol = 1e-8, double identity_tol = 1e-10) {
  require(std::abs(t) <= 1.0, ErrorKind::domain, "translation_cover needs |t| <= 1");
  TranslationCover c;
  if (t == 0.0) {
    c.epsilon = kPi;
    return c;
  }
  HalfCutoffs hc = half_cutoffs();
  c.minus = exp_field(hc.h_minus_t, t);
  c.plus = exp_field(hc.h_plus_t, t);
  c.middle = compose({exp_field(hc.h_minus_t, -t), translation(t), exp_field(hc.h_plus_t, -t)});
  CircleMap prod = compose({c.minus, c.middle, c.plus});
  CircleMap tau = translation(t);
  for (int i = 0; i < 256; ++i) {
    double x = -kPi + kTwoPi * (i + 0.5) / 256;
    c.product_residual = std::max(c.product_residual, std::abs(prod(x) - tau(x)));
  }
  require(c.product_residual < product_tol, ErrorKind::consistency, "translation cover does not multiply to tau(t)");
  const double step = 1e-3;
  auto reach = [&](double dir) {
    double e = 0.0;
    for (double d = step; d < kPi; d += step) {
      double x = kPi + dir * d;
      if (std::abs(c.middle(x) - x) > identity_tol) break;
      e = d;
    }
    return e;
  };
  c.epsilon = std::min(reach(-1.0), reach(1.0));
  require(c.epsilon > 0.0, ErrorKind::consistency, "middle factor is not trivial near -1");
  return c;
}

// ---------------------------------------------------------------------------------------------
// Conjugation by nu

/// nu o gamma o nu^{-1} for smooth gamma fixing -1; C^1 at -1 is certified.
inline CircleMap conjugated_map(const NonsmoothDiffeo& nu, const CircleMap& gamma, double tol = 1e-9) {
  if (gamma.is_identity()) return gamma;
  require(gamma.breakpoints().empty(), ErrorKind::precondition, "gamma must be smooth");
  require(circular_distance(gamma(kPi), kPi) < 1e-12, ErrorKind::precondition, "gamma must fix -1");
  CircleMap out = compose({nu.map(), gamma, invert(nu.map())});
  double dl = out.derivative(kPi, Side::left), dr = out.derivative(kPi, Side::right);
  require(std::abs(dl - dr) < tol, ErrorKind::smoothness, "conjugated map is not C^1 at -1");
  return out;
}

// ---------------------------------------------------------------------------------------------
// Square-root map

inline double square_root_map(double theta) {
  double sh;
  return 0.5 * reduce_angle(theta, sh);
}

inline SolitonDescriptor square_root_soliton() {
  SolitonDescriptor s;
  s.kind = SolitonDescriptor::Kind::typeIII;
  s.map = square_root_map;
  s.r = 1.0;
  s.range_interval = std::make_pair(-kPi / 2, kPi / 2);
  return s;
}

/// The partner gamma^(2)(phi) = gamma(2 phi) / 2 on the double cover coordinate.
inline CircleMap two_cover_partner(const CircleMap& g) {
  return CircleMap([g](double x, Side s) { return 0.5 * g(2.0 * x, s); },
                   [g](double x, int n, Side s) { return 0.5 * g.apply(RSeries::variable(x, n) * 2.0, s); },
                   g.map_class(), {}, "two_cover_partner");
}

/// max |sqrt(gamma(theta)) - partner(sqrt(theta))| over grid points with theta, gamma(theta) in (-pi, pi).
inline double square_root_intertwining_residual(const CircleMap& gamma, const CircleMap& partner, int grid = 256) {
  double res = 0.0;
  for (int i = 0; i < grid; ++i) {
    double th = -kPi + kTwoPi * (i + 0.5) / grid;
    double gt = gamma(th);
    if (gt <= -kPi + 1e-9 || gt >= kPi - 1e-9) continue;
    res = std::max(res, std::abs(square_root_map(gt) - partner(square_root_map(th))));
  }
  return res;
}

}  // namespace solnet
