#pragma once

// Truncated Taylor series with normalised coefficients c[k] = f^(k)(x0) / k!.
// Used as a forward-mode AD scalar for lifts, vector fields and flows.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace solnet {

inline constexpr int kMaxSeriesTerms = 13;  ///< orders 0..12

template <typename T>
class Series {
 public:
  Series() : n_(1) { c_.fill(T(0)); }
  Series(T value, int terms) : n_(terms) {
    require(terms >= 1 && terms <= kMaxSeriesTerms, ErrorKind::unsupported_order,
            "series order exceeds supported maximum");
    c_.fill(T(0));
    c_[0] = value;
  }

  static Series constant(T value, int terms) { return Series(value, terms); }
  /// The independent variable x0 + eps.
  static Series variable(T x0, int terms) {
    Series s(x0, terms);
    if (terms > 1) s.c_[1] = T(1);
    return s;
  }

  int terms() const { return n_; }
  int order() const { return n_ - 1; }
  T value() const { return c_[0]; }
  T& operator[](int k) { return c_[k]; }
  const T& operator[](int k) const { return c_[k]; }

  /// k-th derivative at the expansion point.
  T derivative(int k) const {
    T f = T(1);
    for (int i = 2; i <= k; ++i) f *= T(i);
    return c_[k] * f;
  }
  std::vector<T> derivatives() const {
    std::vector<T> out(n_);
    for (int k = 0; k < n_; ++k) out[k] = derivative(k);
    return out;
  }

  /// Series of f'; loses one order.
  Series differentiate() const {
    Series d(T(0), std::max(1, n_ - 1));
    for (int k = 1; k < n_; ++k) d.c_[k - 1] = T(k) * c_[k];
    return d;
  }
  /// Antiderivative with constant term `c0`; gains one order (capped).
  Series integrate(T c0) const {
    int m = std::min(kMaxSeriesTerms, n_ + 1);
    Series r(c0, m);
    for (int k = 1; k < m; ++k) r.c_[k] = c_[k - 1] / T(k);
    return r;
  }
  Series truncated(int terms) const {
    Series r = *this;
    r.n_ = std::min(n_, terms);
    for (int k = r.n_; k < kMaxSeriesTerms; ++k) r.c_[k] = T(0);
    return r;
  }
  /// Same series with the constant term removed.
  Series without_constant() const {
    Series r = *this;
    r.c_[0] = T(0);
    return r;
  }

  Series& operator+=(const Series& o) {
    n_ = std::min(n_, o.n_);
    for (int k = 0; k < n_; ++k) c_[k] += o.c_[k];
    clear_tail();
    return *this;
  }
  Series& operator-=(const Series& o) {
    n_ = std::min(n_, o.n_);
    for (int k = 0; k < n_; ++k) c_[k] -= o.c_[k];
    clear_tail();
    return *this;
  }
  Series& operator+=(T s) { c_[0] += s; return *this; }
  Series& operator-=(T s) { c_[0] -= s; return *this; }
  Series& operator*=(T s) {
    for (int k = 0; k < n_; ++k) c_[k] *= s;
    return *this;
  }
  Series& operator/=(T s) {
    for (int k = 0; k < n_; ++k) c_[k] /= s;
    return *this;
  }

  friend Series operator-(Series a) {
    for (int k = 0; k < a.n_; ++k) a.c_[k] = -a.c_[k];
    return a;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator+(Series a, T s) { return a += s; }
  friend Series operator+(T s, Series a) { return a += s; }
  friend Series operator-(Series a, T s) { return a -= s; }
  friend Series operator-(T s, const Series& a) { return (-a) += s; }
  friend Series operator*(Series a, T s) { return a *= s; }
  friend Series operator*(T s, Series a) { return a *= s; }
  friend Series operator/(Series a, T s) { return a /= s; }

  friend Series operator*(const Series& a, const Series& b) {
    int n = std::min(a.n_, b.n_);
    Series r(T(0), n);
    for (int k = 0; k < n; ++k) {
      T acc = T(0);
      for (int i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
      r.c_[k] = acc;
    }
    return r;
  }
  friend Series operator/(const Series& a, const Series& b) {
    int n = std::min(a.n_, b.n_);
    require(b.c_[0] != T(0), ErrorKind::numeric, "series division by zero");
    Series q(T(0), n);
    for (int k = 0; k < n; ++k) {
      T acc = a.c_[k];
      for (int i = 1; i <= k; ++i) acc -= b.c_[i] * q.c_[k - i];
      q.c_[k] = acc / b.c_[0];
    }
    return q;
  }
  friend Series operator/(T s, const Series& b) { return Series(s, b.n_) / b; }

 private:
  void clear_tail() {
    for (int k = n_; k < kMaxSeriesTerms; ++k) c_[k] = T(0);
  }

  std::array<T, kMaxSeriesTerms> c_;
  int n_;
};

using RSeries = Series<double>;
using CSeries = Series<std::complex<double>>;

template <typename T>
Series<T> exp(const Series<T>& a) {
  using std::exp;
  Series<T> e(exp(a[0]), a.terms());
  for (int k = 1; k < a.terms(); ++k) {
    T acc = T(0);
    for (int j = 1; j <= k; ++j) acc += T(j) * a[j] * e[k - j];
    e[k] = acc / T(k);
  }
  return e;
}

template <typename T>
Series<T> log(const Series<T>& a) {
  using std::log;
  Series<T> l(log(a[0]), a.terms());
  for (int k = 1; k < a.terms(); ++k) {
    T acc = a[k];
    for (int j = 1; j < k; ++j) acc -= T(j) * l[j] * a[k - j] / T(k);
    l[k] = acc / a[0];
  }
  return l;
}

template <typename T>
Series<T> sqrt(const Series<T>& a) {
  using std::sqrt;
  Series<T> s(sqrt(a[0]), a.terms());
  for (int k = 1; k < a.terms(); ++k) {
    T acc = a[k];
    for (int j = 1; j < k; ++j) acc -= s[j] * s[k - j];
    s[k] = acc / (T(2) * s[0]);
  }
  return s;
}

/// sin and cos together (shared recurrence).
template <typename T>
void sincos(const Series<T>& a, Series<T>& s, Series<T>& c) {
  using std::cos;
  using std::sin;
  s = Series<T>(sin(a[0]), a.terms());
  c = Series<T>(cos(a[0]), a.terms());
  for (int k = 1; k < a.terms(); ++k) {
    T as = T(0), ac = T(0);
    for (int j = 1; j <= k; ++j) {
      as += T(j) * a[j] * c[k - j];
      ac += T(j) * a[j] * s[k - j];
    }
    s[k] = as / T(k);
    c[k] = -ac / T(k);
  }
}

template <typename T>
Series<T> sin(const Series<T>& a) {
  Series<T> s, c;
  sincos(a, s, c);
  return s;
}

template <typename T>
Series<T> cos(const Series<T>& a) {
  Series<T> s, c;
  sincos(a, s, c);
  return c;
}

template <typename T>
Series<T> tan(const Series<T>& a) {
  Series<T> s, c;
  sincos(a, s, c);
  return s / c;
}

inline RSeries atan(const RSeries& a) {
  if (a.terms() == 1) return RSeries(std::atan(a[0]), 1);
  RSeries d = a.differentiate() / (1.0 + a.truncated(a.terms() - 1) * a.truncated(a.terms() - 1));
  return d.integrate(std::atan(a[0])).truncated(a.terms());
}

/// atan2 with the principal value at the expansion point, continued smoothly.
inline RSeries atan2(const RSeries& y, const RSeries& x) {
  int n = std::min(y.terms(), x.terms());
  if (n == 1) return RSeries(std::atan2(y[0], x[0]), 1);
  RSeries yt = y.truncated(n - 1), xt = x.truncated(n - 1);
  RSeries d = (xt * y.differentiate() - yt * x.differentiate()) / (xt * xt + yt * yt);
  return d.integrate(std::atan2(y[0], x[0])).truncated(n);
}

template <typename T>
Series<T> pow(const Series<T>& a, int p) {
  require(p >= 0, ErrorKind::domain, "negative integer power of a series");
  Series<T> r(T(1), a.terms()), base = a;
  while (p > 0) {
    if (p & 1) r = r * base;
    base = base * base;
    p >>= 1;
  }
  return r;
}

/// outer(x0 + u) with u = inner (a series without constant term); Horner in u.
template <typename T>
Series<T> compose(const Series<T>& outer, const Series<T>& inner_no_const) {
  int n = inner_no_const.terms();
  Series<T> u = inner_no_const.without_constant();
  int m = std::min(outer.terms(), n);
  Series<T> r(outer[m - 1], n);
  for (int k = m - 2; k >= 0; --k) {
    r = r * u;
    r += outer[k];
  }
  return r;
}

/// Series reversion: given F(x0 + eps) = y0 + a1 eps + ..., returns G with F(x0 + G(d)) = y0 + d,
/// G expressed as a series in d with G(0) = 0 (constant term x0 added back).
inline RSeries revert(const RSeries& f, double x0) {
  int n = f.terms();
  require(n >= 2 && f[1] != 0.0, ErrorKind::numeric, "series reversion needs a nonzero linear term");
  RSeries d = RSeries::variable(0.0, n);
  RSeries g = d / f[1];
  RSeries fl = f.without_constant();
  for (int it = 0; it < n; ++it) {
    // g <- (d - (F(x0+g) - y0 - a1 g)) / a1
    RSeries fg = compose(fl, g);
    g = g + (d - fg) / f[1];
  }
  g += x0;
  return g;
}

}  // namespace solnet

namespace solnet {

// Scalar overloads so generic lambdas can call sin(x), exp(x), ... on double or RSeries alike.
using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

inline double value_of(double x) { return x; }
inline double value_of(const RSeries& s) { return s[0]; }
inline double pow(double x, int p) { return std::pow(x, p); }

}  // namespace solnet
