#pragma once

// Fourier coefficients, H^s and 3/2 norms, the oscillatory integrals
// lambda_{m,n}(gamma) = (1/2pi) int e^{-i m theta} e^{i n gamma(theta)} d theta, D^s diagnostics,
// and the vector-field families t, t_n, h_+-.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "circle_diffeo.hpp"
#include "cutoffs.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace solnet {

using cd = std::complex<double>;

struct FourierSeries {
  int K = 0;
  std::vector<cd> coeffs;  ///< index k + K for k in [-K, K]
  bool real = false;

  FourierSeries() = default;
  explicit FourierSeries(int k, bool is_real = false) : K(k), coeffs(2 * k + 1, cd(0.0, 0.0)), real(is_real) {}

  cd operator[](int k) const { return std::abs(k) > K ? cd(0.0, 0.0) : coeffs[k + K]; }
  cd& at(int k) {
    require(std::abs(k) <= K, ErrorKind::out_of_range, "Fourier mode outside stored range");
    return coeffs[k + K];
  }
  /// Synthesis sum_k c_k e^{i k theta}.
  cd eval(double theta) const {
    cd acc(0.0, 0.0);
    for (int k = -K; k <= K; ++k) acc += coeffs[k + K] * std::polar(1.0, k * theta);
    return acc;
  }
  /// Largest |k| with a coefficient above tol.
  int max_mode(double tol = 1e-14) const {
    for (int k = K; k > 0; --k)
      if (std::abs((*this)[k]) > tol || std::abs((*this)[-k]) > tol) return k;
    return 0;
  }
  bool reality_holds(double tol = 1e-12) const {
    for (int k = 1; k <= K; ++k)
      if (std::abs((*this)[-k] - std::conj((*this)[k])) > tol) return false;
    return std::abs((*this)[0].imag()) <= tol;
  }
  FourierSeries truncated(int k_new) const {
    FourierSeries out(k_new, real);
    for (int k = -std::min(K, k_new); k <= std::min(K, k_new); ++k) out.at(k) = (*this)[k];
    return out;
  }
  static FourierSeries single_mode(int k, cd value = {1.0, 0.0}, int K = -1) {
    FourierSeries f(std::max(K, std::abs(k)));
    f.at(k) = value;
    return f;
  }
};

/// Quadrature nodes on [0, 2pi) resolving frequencies up to `max_freq`, split at breakpoints.
inline NodeSet circle_nodes(const std::vector<double>& bps, double max_freq, int min_panels = 16) {
  double h = std::min(kTwoPi / min_panels, 4.0 / std::max(1.0, max_freq));
  if (bps.empty()) return composite_panels(0.0, kTwoPi, {}, h);
  // Integrate over [b0, b0 + 2pi) so every breakpoint is a panel edge.
  double b0 = bps.front();
  std::vector<double> cuts;
  for (double b : bps) cuts.push_back(b);
  for (double b : bps) cuts.push_back(b + kTwoPi);
  return composite_panels(b0, b0 + kTwoPi, cuts, h);
}

/// Fourier coefficients from function values at the given nodes.
inline FourierSeries fourier_from_nodes(const NodeSet& ns, const std::vector<double>& values, int K) {
  FourierSeries out(K, true);
  std::vector<cd> acc(2 * K + 1, cd(0.0, 0.0));
  for (std::size_t j = 0; j < ns.size(); ++j) {
    cd step = std::polar(1.0, -ns.x[j]);
    cd e = std::polar(values[j] * ns.w[j], 0.0);
    acc[K] += e;
    cd ep = e, em = e;
    cd stepc = std::conj(step);
    for (int k = 1; k <= K; ++k) {
      ep *= step;
      em *= stepc;
      acc[K + k] += ep;
      acc[K - k] += em;
    }
  }
  for (int i = 0; i < 2 * K + 1; ++i) out.coeffs[i] = acc[i] / kTwoPi;
  return out;
}

/// f_k = (1/2pi) int e^{-ik theta} f d theta. Trapezoid with M >= 4K samples for smooth f,
/// Gauss panels split at the breakpoints otherwise.
inline FourierSeries fourier_coeffs(const std::function<double(double)>& f, int K, const std::vector<double>& bps = {},
                                    int samples = 0) {
  require(K >= 0, ErrorKind::domain, "negative cutoff");
  if (bps.empty()) {
    int M = samples > 0 ? samples : std::max(8 * K, 256);
    require(M >= 4 * K, ErrorKind::resolution, "need at least 4K samples");
    NodeSet ns;
    for (int j = 0; j < M; ++j) {
      ns.x.push_back(kTwoPi * j / M);
      ns.w.push_back(kTwoPi / M);
    }
    std::vector<double> v(M);
    for (int j = 0; j < M; ++j) v[j] = f(ns.x[j]);
    return fourier_from_nodes(ns, v, K);
  }
  NodeSet ns = circle_nodes(bps, std::max(K, 16));
  std::vector<double> v(ns.size());
  for (std::size_t j = 0; j < ns.size(); ++j) v[j] = f(ns.x[j]);
  return fourier_from_nodes(ns, v, K);
}

inline FourierSeries fourier_coeffs(const VectorField& f, int K) {
  if (f.is_trig()) {
    FourierSeries out(K, true);
    const auto& c = f.cos_coeffs();
    const auto& s = f.sin_coeffs();
    for (std::size_t k = 0; k < c.size() && static_cast<int>(k) <= K; ++k) {
      int kk = static_cast<int>(k);
      if (kk == 0) {
        out.at(0) += c[0];
      } else {
        out.at(kk) += c[k] / 2.0;
        out.at(-kk) += c[k] / 2.0;
      }
    }
    for (std::size_t k = 0; k < s.size() && static_cast<int>(k) + 1 <= K; ++k) {
      int kk = static_cast<int>(k) + 1;
      out.at(kk) += cd(0.0, -s[k] / 2.0);
      out.at(-kk) += cd(0.0, s[k] / 2.0);
    }
    return out;
  }
  return fourier_coeffs([&f](double x) { return f(x); }, K, f.breakpoints());
}

/// Coefficients from 2K+1 (or more) equispaced samples on [0, 2pi).
inline FourierSeries fourier_from_samples(const std::vector<double>& samples, int K) {
  require(static_cast<int>(samples.size()) >= 2 * K + 1, ErrorKind::resolution, "need at least 2K+1 samples");
  int M = static_cast<int>(samples.size());
  NodeSet ns;
  for (int j = 0; j < M; ++j) {
    ns.x.push_back(kTwoPi * j / M);
    ns.w.push_back(kTwoPi / M);
  }
  return fourier_from_nodes(ns, samples, K);
}

inline double h_s_norm(const FourierSeries& f, double s) {
  double acc = 0.0;
  for (int k = -f.K; k <= f.K; ++k) acc += std::pow(1.0 + double(k) * k, s) * std::norm(f[k]);
  return std::sqrt(acc);
}

inline double norm_3_2(const FourierSeries& f) {
  double acc = 0.0;
  for (int k = -f.K; k <= f.K; ++k) acc += std::abs(f[k]) * (1.0 + std::pow(std::abs(double(k)), 1.5));
  return acc;
}

/// Constant C with ||f||_{3/2} <= C ||f||_{H^s} (Cauchy-Schwarz), finite for s > 2.
inline double norm_3_2_embedding_constant(double s, int kmax = 200000) {
  require(s > 2.0, ErrorKind::domain, "embedding needs s > 2");
  double acc = 1.0;  // k = 0 term: (1 + 0)^2 / 1
  for (int k = 1; k <= kmax; ++k) {
    double num = 1.0 + std::pow(double(k), 1.5);
    acc += 2.0 * num * num / std::pow(1.0 + double(k) * k, s);
  }
  // Integral tail bound for k > kmax of 2 (2 k^3) / k^{2s}.
  acc += 4.0 * std::pow(double(kmax), 4.0 - 2.0 * s) / (2.0 * s - 4.0);
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------------------------
// Oscillatory integrals

/// Nodes and sampled lift of a circle map, reused for many (m, n).
class LambdaGrid {
 public:
  LambdaGrid(const CircleMap& g, int quad_points) {
    const auto& bps = g.breakpoints();
    int segments = std::max<int>(1, bps.size());
    int panels = std::max(segments, (quad_points + 15) / 16);
    double h = kTwoPi / panels;
    if (bps.empty()) {
      nodes_ = composite_panels(0.0, kTwoPi, {}, h);
    } else {
      double b0 = bps.front();
      std::vector<double> cuts(bps.begin(), bps.end());
      for (double b : bps) cuts.push_back(b + kTwoPi);
      nodes_ = composite_panels(b0, b0 + kTwoPi, cuts, h);
    }
    lift_.resize(nodes_.size());
    parallel_for(nodes_.size(), [&](std::size_t j) { lift_[j] = g(nodes_.x[j]); });
  }

  std::size_t size() const { return nodes_.size(); }

  cd lambda(int m, int n) const {
    cd acc(0.0, 0.0);
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      acc += nodes_.w[j] * std::polar(1.0, n * lift_[j] - m * nodes_.x[j]);
    return acc / kTwoPi;
  }

  /// Block lambda(ms[i], ns[j]) via one complex matrix product.
  Eigen::MatrixXcd block(const std::vector<int>& ms, const std::vector<int>& ns) const {
    const Eigen::Index Q = static_cast<Eigen::Index>(nodes_.size());
    Eigen::MatrixXcd E(static_cast<Eigen::Index>(ms.size()), Q);
    Eigen::MatrixXcd G(Q, static_cast<Eigen::Index>(ns.size()));
    parallel_for(ms.size(), [&](std::size_t i) {
      for (Eigen::Index j = 0; j < Q; ++j) E(i, j) = std::polar(nodes_.w[j] / kTwoPi, -ms[i] * nodes_.x[j]);
    });
    parallel_for(ns.size(), [&](std::size_t i) {
      for (Eigen::Index j = 0; j < Q; ++j) G(j, i) = std::polar(1.0, ns[i] * lift_[j]);
    });
    return E * G;
  }

 private:
  NodeSet nodes_;
  std::vector<double> lift_;
};

inline int default_quad_points(int m, int n) { return std::max(256, 16 * (std::abs(m) + std::abs(n)) + 256); }

inline cd lambda_mn(const CircleMap& g, int m, int n, int quad_points = 0) {
  if (quad_points <= 0) quad_points = default_quad_points(m, n);
  require(quad_points >= 8 * (std::abs(m) + std::abs(n)), ErrorKind::resolution,
          "quad_points must be at least 8(|m|+|n|)");
  return LambdaGrid(g, quad_points).lambda(m, n);
}

struct DecayReport {
  std::vector<std::pair<int, int>> grid;
  std::vector<double> values;    ///< |lambda_{m,n}|
  std::vector<double> weighted;  ///< |lambda| (|m|+|n|)^{s-1}
  double s = 0.0;
  int pmax = 0;
  double sup_weighted = 0.0;
  double fitted_constant = 0.0;
  double fitted_exponent = 0.0;
  bool degenerate = false;  ///< fewer than two antidiagonals above the noise floor
  double self_check = 0.0;  ///< max change under doubled quadrature (when requested)
};

/// |lambda_{m,n}| on m > 0, n < 0, |m| + |n| <= pmax, with sup and a log-log fit of the
/// antidiagonal maxima above the noise floor.
inline DecayReport lambda_decay_report(const CircleMap& g, double s, int pmax, int quad_points = 0,
                                       bool self_check = false, double noise_floor = 1e-13) {
  require(pmax >= 2, ErrorKind::domain, "pmax must be at least 2");
  if (quad_points <= 0) quad_points = default_quad_points(pmax, 0);
  std::vector<int> ms, ns;
  for (int m = 1; m < pmax; ++m) ms.push_back(m);
  for (int n = 1; n < pmax; ++n) ns.push_back(-n);
  Eigen::MatrixXcd L = LambdaGrid(g, quad_points).block(ms, ns);
  Eigen::MatrixXcd L2;
  if (self_check) L2 = LambdaGrid(g, 2 * quad_points).block(ms, ns);
  DecayReport r;
  r.s = s;
  r.pmax = pmax;
  std::vector<double> antidiag_max(pmax + 1, 0.0);
  for (int p = 2; p <= pmax; ++p) {
    for (int m = 1; m < p; ++m) {
      int n = -(p - m);
      double v = std::abs(L(m - 1, -n - 1));
      r.grid.emplace_back(m, n);
      r.values.push_back(v);
      double w = v * std::pow(double(p), s - 1.0);
      r.weighted.push_back(w);
      r.sup_weighted = std::max(r.sup_weighted, w);
      antidiag_max[p] = std::max(antidiag_max[p], v);
      if (self_check) r.self_check = std::max(r.self_check, std::abs(L(m - 1, -n - 1) - L2(m - 1, -n - 1)));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int p = 2; p <= pmax; ++p) {
    if (antidiag_max[p] <= noise_floor) continue;
    double x = std::log(double(p)), y = std::log(antidiag_max[p]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) {
    r.degenerate = true;
    return r;
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  double icpt = (sy - slope * sx) / cnt;
  r.fitted_exponent = -slope;
  r.fitted_constant = std::exp(icpt);
  return r;
}

/// h_s norm of the periodic function lift(theta) - theta.
inline double ds_membership(const CircleMap& g, double s, int K = 256) {
  if (g.is_identity()) return 0.0;
  FourierSeries f = fourier_coeffs([&g](double x) { return g(x) - x; }, K, g.breakpoints());
  return h_s_norm(f, s);
}

// ---------------------------------------------------------------------------------------------
// Vector-field families

/// t_n with line density t_1(t/n).
inline VectorField translation_family(int n) {
  require(n >= 1, ErrorKind::domain, "translation_family needs n >= 1");
  double dn = n;
  LineProfile p;
  p.g = local_fn([dn](auto t) { return t1_profile(t / dn); });
  p.t_lo = dn;
  p.t_hi = 2.0 * dn;
  p.g_minus_inf = 1.0;
  p.g_plus_inf = 0.0;
  return field_from_line(p, "t_n", SupportKind::half_line);
}

struct HalfCutoffs {
  VectorField h_minus_t, h_plus_t, t_minus, t_plus;
};

inline HalfCutoffs half_cutoffs() {
  VectorField t = translation_generator();
  HalfCutoffs out;
  out.h_minus_t = half_cutoff(false) * t;
  out.h_plus_t = half_cutoff(true) * t;
  out.t_minus = translation_family(1);
  out.t_plus = t - out.t_minus;
  return out;
}

/// int |f^{(k)}| over the circle, panels split at breakpoints.
inline double l1_derivative_norm(const VectorField& f, int k, double max_panel = 0.02) {
  std::vector<double> cuts = f.breakpoints();
  for (double& c : cuts) c = c > kPi ? c - kTwoPi : c;
  NodeSet ns = composite_panels(-kPi, kPi, cuts, max_panel);
  double acc = 0.0;
  for (std::size_t j = 0; j < ns.size(); ++j) acc += ns.w[j] * std::abs(f.series(ns.x[j], k + 1).derivative(k));
  return acc;
}

}  // namespace solnet
