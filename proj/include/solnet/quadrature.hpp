#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <vector>

#include "errors.hpp"

namespace solnet {

struct GaussRule {
  std::vector<double> x;  ///< nodes on [-1, 1]
  std::vector<double> w;
};

/// Gauss-Legendre rule via Newton on the three-term recurrence.
inline GaussRule make_gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}

/// Cached rule; thread-safe.
inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// Composite Gauss panels over [a, b], split at `cuts` (points inside are honoured exactly),
/// each sub-interval covered by panels of length <= max_panel.
inline NodeSet composite_panels(double a, double b, std::vector<double> cuts, double max_panel,
                                int points_per_panel = 16) {
  require(b > a, ErrorKind::domain, "empty integration interval");
  const GaussRule& g = gauss_legendre(points_per_panel);
  std::vector<double> edges{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > a + 1e-15 && c < b - 1e-15) edges.push_back(c);
  edges.push_back(b);
  NodeSet ns;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    double lo = edges[e], hi = edges[e + 1];
    int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      double m = lo + (p + 0.5) * h, r = 0.5 * h;
      for (int i = 0; i < points_per_panel; ++i) {
        ns.x.push_back(m + r * g.x[i]);
        ns.w.push_back(r * g.w[i]);
      }
    }
  }
  return ns;
}

/// Globally adaptive Gauss-Legendre: the panel with the largest halving error is split until
/// the summed error estimate is below tol or max_panels is reached (noisy integrands stop there).
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12, int max_panels = 4096) {
  const GaussRule& g = gauss_legendre(12);
  auto rule = [&](double lo, double hi) {
    double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo), s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(m + r * g.x[i]);
    return s * r;
  };
  struct Panel {
    double lo, hi, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto make = [&](double lo, double hi) {
    double mid = 0.5 * (lo + hi);
    double l = rule(lo, mid), r = rule(mid, hi);
    return Panel{lo, hi, l + r, std::abs(l + r - rule(lo, hi))};
  };
  std::priority_queue<Panel> heap;
  heap.push(make(a, b));
  double total_err = heap.top().err;
  while (total_err > tol && static_cast<int>(heap.size()) < max_panels) {
    Panel p = heap.top();
    heap.pop();
    double mid = 0.5 * (p.lo + p.hi);
    Panel l = make(p.lo, mid), r = make(mid, p.hi);
    total_err += l.err + r.err - p.err;
    heap.push(l);
    heap.push(r);
  }
  double sum = 0.0;
  for (; !heap.empty(); heap.pop()) sum += heap.top().value;
  return sum;
}

}  // namespace solnet
