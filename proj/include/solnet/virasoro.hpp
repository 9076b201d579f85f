#pragma once

// Truncated lowest-weight Virasoro modules on the partition basis
// L_{-mu_1} ... L_{-mu_k} v (mu_1 >= ... >= mu_k >= 1), smeared stress tensor, cocycles,
// the Schwarzian beta cocycle and quantum energy inequality checks.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "circle_diffeo.hpp"
#include "cutoffs.hpp"
#include "fourier_sobolev.hpp"
#include "quadrature.hpp"

namespace solnet {

struct ModuleParams {
  double c = 1.0;
  double h = 0.0;
  int N = 8;
};

using Partition = std::vector<int>;

inline int partition_level(const Partition& p) {
  int s = 0;
  for (int v : p) s += v;
  return s;
}

/// All partitions of `level` in non-increasing order, lexicographically descending.
inline std::vector<Partition> partitions_of(int level) {
  std::vector<Partition> out;
  Partition cur;
  std::function<void(int, int)> rec = [&](int rem, int maxp) {
    if (rem == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(rem, maxp); p >= 1; --p) {
      cur.push_back(p);
      rec(rem - p, p);
      cur.pop_back();
    }
  };
  rec(level, level);
  return out;
}

using ModuleVector = Eigen::VectorXcd;

struct StressMatrix {
  FourierSeries f;
  Eigen::MatrixXcd matrix;
  int exact_level = 0;  ///< rows and columns at levels <= exact_level are exact
  int exact_dim = 0;    ///< basis size through exact_level
};

class VermaModule {
 public:
  using Sparse = std::map<Partition, double>;

  explicit VermaModule(ModuleParams p) : params_(p) {
    require(p.N >= 0, ErrorKind::domain, "truncation level must be >= 0");
    offsets_.push_back(0);
    for (int l = 0; l <= p.N; ++l) {
      for (const Partition& q : partitions_of(l)) {
        index_[q] = static_cast<int>(basis_.size());
        basis_.push_back(q);
      }
      offsets_.push_back(static_cast<int>(basis_.size()));
    }
  }

  const ModuleParams& params() const { return params_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int level_offset(int l) const { return offsets_[l]; }
  int level_dim(int l) const { return offsets_[l + 1] - offsets_[l]; }
  int dim_through(int l) const { return l < 0 ? 0 : offsets_[std::min(l, params_.N) + 1]; }
  const std::vector<Partition>& basis() const { return basis_; }
  int index_of(const Partition& p) const { return index_.at(p); }
  int level_of(int idx) const { return partition_level(basis_[idx]); }

  /// L_n on a basis state, reduced to normal order; components above level N are dropped.
  const Sparse& reduce(int n, const Partition& mu) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto key = std::make_pair(n, mu);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Sparse out = reduce_uncached(n, mu);
    return memo_.emplace(key, std::move(out)).first->second;
  }

  /// Applies L_n; sets `truncated` when nonzero components above level N were dropped.
  ModuleVector apply_ln(int n, const ModuleVector& v, bool* truncated = nullptr) const {
    require(std::abs(n) <= params_.N, ErrorKind::out_of_range, "|n| exceeds truncation level");
    ModuleVector out = ModuleVector::Zero(dim());
    bool dropped = false;
    for (int i = 0; i < dim(); ++i) {
      if (v[i] == std::complex<double>(0.0, 0.0)) continue;
      if (level_of(i) - n > params_.N) {
        dropped = true;
        continue;
      }
      for (const auto& [p, coef] : reduce(n, basis_[i])) out[index_.at(p)] += coef * v[i];
    }
    if (truncated) *truncated = dropped;
    return out;
  }

  /// Real matrix of L_n on the <= N block (columns whose image leaves the block are truncated).
  const Eigen::MatrixXd& ln_matrix(int n) const {
    require(std::abs(n) <= params_.N, ErrorKind::out_of_range, "|n| exceeds truncation level");
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = ln_cache_.find(n);
    if (it != ln_cache_.end()) return it->second;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
      if (level_of(j) - n > params_.N || level_of(j) - n < 0) continue;
      for (const auto& [p, coef] : reduce(n, basis_[j])) M(index_.at(p), j) += coef;
    }
    return ln_cache_.emplace(n, std::move(M)).first->second;
  }

  /// Shapovalov matrix at one level.
  Eigen::MatrixXd gram(int level) const {
    require(level >= 0 && level <= params_.N, ErrorKind::out_of_range, "level outside module");
    int d = level_dim(level), o = level_offset(level);
    Eigen::MatrixXd G(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) G(a, b) = gram_entry(basis_[o + a], basis_[o + b]);
    return G;
  }

  /// Block-diagonal Gram matrix over levels <= N.
  Eigen::MatrixXd gram_full() const {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim(), dim());
    for (int l = 0; l <= params_.N; ++l) G.block(level_offset(l), level_offset(l), level_dim(l), level_dim(l)) = gram(l);
    return G;
  }

  std::complex<double> inner(const ModuleVector& u, const ModuleVector& w) const {
    ensure_gram();
    return u.dot(gram_cache_ * w);
  }

  const Eigen::MatrixXd& gram_cached() const {
    ensure_gram();
    return gram_cache_;
  }

  /// Matrix of T(f) = sum_n f_n L_n.
  StressMatrix stress_matrix(const FourierSeries& f) const {
    int M = f.max_mode();
    require(M <= params_.N, ErrorKind::truncation, "field mode exceeds truncation level");
    StressMatrix s;
    s.f = f;
    s.matrix = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int n = -M; n <= M; ++n) {
      if (f[n] == std::complex<double>(0.0, 0.0)) continue;
      s.matrix += f[n] * ln_matrix(n).cast<std::complex<double>>();
    }
    s.exact_level = params_.N - M;
    s.exact_dim = dim_through(s.exact_level);
    return s;
  }

 private:
  void ensure_gram() const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (gram_cache_.rows() != dim()) gram_cache_ = gram_full();
  }

  static void add(Sparse& acc, const Partition& p, double c) {
    if (c == 0.0) return;
    acc[p] += c;
  }

  Sparse reduce_uncached(int n, const Partition& mu) const {
    Sparse out;
    int lev = partition_level(mu);
    if (lev - n > params_.N || lev - n < 0) return out;
    if (mu.empty()) {
      if (n == 0) add(out, mu, params_.h);
      if (n < 0) add(out, Partition{-n}, 1.0);
      return out;
    }
    if (n < 0 && -n >= mu[0]) {
      Partition q{-n};
      q.insert(q.end(), mu.begin(), mu.end());
      add(out, q, 1.0);
      return out;
    }
    // L_n L_{-m} X = L_{-m} L_n X + (n + m) L_{n-m} X + delta_{n,m} (n^3 - n) c / 12 X
    int m = mu[0];
    Partition rest(mu.begin() + 1, mu.end());
    for (const auto& [p, coef] : reduce(n, rest))
      for (const auto& [q, c2] : reduce(-m, p)) add(out, q, coef * c2);
    if (n + m != 0)
      for (const auto& [p, coef] : reduce(n - m, rest)) add(out, p, (n + m) * coef);
    if (n == m) add(out, rest, (double(n) * n * n - n) * params_.c / 12.0);
    for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
    return out;
  }

  // <L_{-mu} v, L_{-nu} v> = <L_{-mu_2..} v, L_{mu_1} L_{-nu} v>
  double gram_entry(const Partition& mu, const Partition& nu) const {
    if (partition_level(mu) != partition_level(nu)) return 0.0;
    if (mu.empty()) return nu.empty() ? 1.0 : 0.0;
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto key = std::make_pair(mu, nu);
    auto it = gram_memo_.find(key);
    if (it != gram_memo_.end()) return it->second;
    Partition rest(mu.begin() + 1, mu.end());
    double acc = 0.0;
    for (const auto& [p, coef] : reduce(mu[0], nu)) acc += coef * gram_entry(rest, p);
    gram_memo_.emplace(key, acc);
    return acc;
  }

  ModuleParams params_;
  std::vector<Partition> basis_;
  std::vector<int> offsets_;
  std::map<Partition, int> index_;
  mutable std::recursive_mutex mu_;
  mutable std::map<std::pair<int, Partition>, Sparse> memo_;
  mutable std::map<std::pair<Partition, Partition>, double> gram_memo_;
  mutable std::map<int, Eigen::MatrixXd> ln_cache_;
  mutable Eigen::MatrixXd gram_cache_;
};

/// Level-l Kac (Gram) determinant and its smallest eigenvalue.
struct GramReport {
  int level = 0;
  double det = 0.0;
  double min_eigenvalue = 0.0;
};

inline GramReport gram_report(double c, double h, int level) {
  VermaModule mod({c, h, level});
  Eigen::MatrixXd G = mod.gram(level);
  GramReport r;
  r.level = level;
  r.det = G.determinant();
  r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
  return r;
}

// ---------------------------------------------------------------------------------------------
// Unitarity classification with the printed discrete-series formulas

struct UnitarityVerdict {
  enum Kind { none, continuous, discrete } kind = none;
  int m = 0, p = 0, q = 0;
  std::string str() const {
    if (kind == continuous) return "continuous";
    if (kind == discrete) return "discrete(" + std::to_string(m) + "," + std::to_string(p) + "," + std::to_string(q) + ")";
    return "none";
  }
};

inline double discrete_c(int m) { return 1.0 - 6.0 / ((m + 2.0) * (m + 3.0)); }
inline double discrete_h(int m, int p, int q) {
  double a = p * (m + 1.0) - q * double(m);
  return (a * a - 1.0) / (4.0 * m * (m + 1.0));
}

inline UnitarityVerdict unitarity_classify(double c, double h, double tol = 1e-9) {
  UnitarityVerdict v;
  if (c >= 1.0 && h >= 0.0) {
    v.kind = UnitarityVerdict::continuous;
    return v;
  }
  if (c >= 1.0 || h < -tol) return v;
  // (m+2)(m+3) = 6/(1-c); try the nearest integers.
  double prod = 6.0 / (1.0 - c);
  double mr = (-5.0 + std::sqrt(1.0 + 4.0 * prod)) / 2.0;
  for (int m = std::max(3, int(std::floor(mr)) - 1); m <= int(std::ceil(mr)) + 1; ++m) {
    if (std::abs(discrete_c(m) - c) > tol) continue;
    for (int p = 1; p <= m - 1; ++p)
      for (int q = 1; q <= p; ++q)
        if (std::abs(discrete_h(m, p, q) - h) <= tol) {
          v.kind = UnitarityVerdict::discrete;
          v.m = m;
          v.p = p;
          v.q = q;
          return v;
        }
  }
  return v;
}

// ---------------------------------------------------------------------------------------------
// Cocycles

/// Complex Gelfand-Fuchs form (1/48 pi) int (f g''' - f''' g).
inline std::complex<double> gf_cocycle_complex(const FourierSeries& f, const FourierSeries& g) {
  int K = std::max(f.K, g.K);
  std::complex<double> acc(0.0, 0.0);
  for (int k = -K; k <= K; ++k) acc += std::complex<double>(0.0, -double(k) * k * k) * f[-k] * g[k];
  return acc / 12.0;
}

/// Complex Virasoro form -(1/24 pi) int (f''' + f') g.
inline std::complex<double> vir_cocycle_complex(const FourierSeries& f, const FourierSeries& g) {
  int K = std::max(f.K, g.K);
  std::complex<double> acc(0.0, 0.0);
  for (int k = -K; k <= K; ++k) acc += std::complex<double>(0.0, -(double(k) * k * k - k)) * f[-k] * g[k];
  return acc / 12.0;
}

inline double real_part_checked(std::complex<double> z) {
  require(std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z.real())), ErrorKind::domain,
          "cocycle of non-real fields");
  return z.real();
}

inline double gf_cocycle(const FourierSeries& f, const FourierSeries& g) { return real_part_checked(gf_cocycle_complex(f, g)); }
inline double vir_cocycle(const FourierSeries& f, const FourierSeries& g) { return real_part_checked(vir_cocycle_complex(f, g)); }

/// Fourier coefficients of the bracket [f, g] = f' g - f g'.
inline FourierSeries bracket(const FourierSeries& f, const FourierSeries& g) {
  FourierSeries out(f.K + g.K, f.real && g.real);
  for (int a = -f.K; a <= f.K; ++a)
    for (int b = -g.K; b <= g.K; ++b)
      out.at(a + b) += std::complex<double>(0.0, double(a - b)) * f[a] * g[b];
  return out;
}

enum class CentralTerm { vir, gf };

struct CommutatorReport {
  double residual = 0.0;
  int exact_level = 0;
  int exact_block_dim = 0;
};

/// max-entry norm of i[T(g),T(f)] - T(g'f - f'g) - c omega(g,f) on the exact block.
inline CommutatorReport commutator_check(const VermaModule& mod, const FourierSeries& f, const FourierSeries& g,
                                         CentralTerm term = CentralTerm::vir) {
  int M = std::max(f.max_mode(), g.max_mode());
  int exact = mod.params().N - 2 * M;
  require(exact >= 0, ErrorKind::truncation, "exact block is empty");
  const std::complex<double> I(0.0, 1.0);
  StressMatrix Tf = mod.stress_matrix(f), Tg = mod.stress_matrix(g);
  FourierSeries br = bracket(g, f);  // g' f - g f'
  StressMatrix Tb = mod.stress_matrix(br);
  std::complex<double> omega = term == CentralTerm::vir ? vir_cocycle_complex(g, f) : gf_cocycle_complex(g, f);
  int d = mod.dim_through(exact);
  Eigen::MatrixXcd lhs = I * (Tg.matrix * Tf.matrix.leftCols(d) - Tf.matrix * Tg.matrix.leftCols(d));
  Eigen::MatrixXcd R = lhs - Tb.matrix.leftCols(d);
  R.topRows(d) -= mod.params().c * omega * Eigen::MatrixXcd::Identity(d, d);
  CommutatorReport rep;
  rep.residual = R.cwiseAbs().maxCoeff();
  rep.exact_level = exact;
  rep.exact_block_dim = d;
  return rep;
}

// ---------------------------------------------------------------------------------------------
// beta cocycle: (c / 24 pi) int {gamma, z} f e^{2 i theta} d theta

/// Integral over [a, b] (default the whole circle). With breakpoints of gamma inside the range,
/// f must vanish there (otherwise gamma is not smooth on supp f).
inline double beta_cocycle(const CircleMap& g, const VectorField& f, double c, std::optional<std::pair<double, double>> range = {},
                           double max_panel = kTwoPi / 32) {
  if (g.is_identity()) return 0.0;
  double a = -kPi, b = kPi;
  if (range) {
    a = range->first;
    b = range->second;
  }
  std::vector<double> cuts;
  auto add_cuts = [&](const std::vector<double>& bps) {
    for (double p : bps)
      for (double q : {p - kTwoPi, p, p + kTwoPi})
        if (q >= a && q <= b) cuts.push_back(q);
  };
  add_cuts(g.breakpoints());
  add_cuts(f.breakpoints());
  if (!range) {
    for (double p : g.breakpoints())
      require(std::abs(f(p, Side::left)) < 1e-12 && std::abs(f(p, Side::right)) < 1e-12, ErrorKind::domain,
              "breakpoint of gamma inside the support of f");
  }
  NodeSet ns = composite_panels(a, b, cuts, max_panel);
  std::vector<double> vals(ns.size());
  parallel_for(ns.size(), [&](std::size_t j) {
    double fv = f(ns.x[j]);
    vals[j] = fv == 0.0 ? 0.0 : schwarzian_real(g, ns.x[j]) * fv;
  });
  double acc = 0.0;
  for (std::size_t j = 0; j < ns.size(); ++j) acc += ns.w[j] * vals[j];
  return c / (24.0 * kPi) * acc;
}

// ---------------------------------------------------------------------------------------------
// Quantum energy inequality

/// -(c / 12 pi) int (d/dt sqrt(C_* f))^2 dt with the geometric line density.
inline double qei_bound(const VectorField& f, double c, double tail_cut = 1e-14) {
  auto dens = [&f](double t) { return line_density(f, t); };
  // Locate the tail cutoff on each side.
  auto find_tail = [&](double sign) {
    double T = 1.0;
    for (int i = 0; i < 60; ++i, T *= 1.5) {
      bool small = true;
      for (double s = T; s <= 4 * T; s += T / 8)
        if (std::abs(dens(sign * s)) >= tail_cut) small = false;
      if (small) return sign * T;
    }
    fail(ErrorKind::precondition, "line density C_*f does not decay");
  };
  double lo = find_tail(-1.0), hi = find_tail(1.0);
  for (int i = 0; i <= 4096; ++i) {
    double t = lo + (hi - lo) * i / 4096.0;
    require(dens(t) >= -1e-14, ErrorKind::precondition, "line density C_*f is negative");
  }
  auto integrand = [&f](double t) {
    RSeries g = line_density(f, RSeries::variable(t, 2));
    if (g[0] <= 0.0) return 0.0;
    return g[1] * g[1] / (4.0 * g[0]);
  };
  double I = 0.0;
  const int pieces = 64;
  for (int i = 0; i < pieces; ++i) {
    double a = lo + (hi - lo) * i / pieces, b = lo + (hi - lo) * (i + 1) / pieces;
    I += integrate_adaptive(integrand, a, b, 1e-15, 512);
  }
  return -c / (12.0 * kPi) * I;
}

/// Orthonormal basis (w.r.t. the Gram form) of the quotient by null vectors, levels <= L.
inline Eigen::MatrixXcd quotient_basis(const VermaModule& mod, int L, double null_tol = 1e-10) {
  std::vector<Eigen::VectorXcd> cols;
  for (int l = 0; l <= L; ++l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mod.gram(l));
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      double lam = es.eigenvalues()[i];
      require(lam > -null_tol * scale, ErrorKind::precondition, "Gram form is not positive semidefinite");
      if (lam <= null_tol * scale) continue;
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(mod.dim());
      v.segment(mod.level_offset(l), mod.level_dim(l)) = es.eigenvectors().col(i).cast<std::complex<double>>() / std::sqrt(lam);
      cols.push_back(v);
    }
  }
  Eigen::MatrixXcd B(mod.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = cols[i];
  return B;
}

struct QeiReport {
  double bound = 0.0;
  double min_expectation = 0.0;
  double min_gap = 0.0;
  double min_eigenvalue = 0.0;  ///< smallest eigenvalue of T(f) on the exact block (quotient)
  int exact_level = 0;
  int trials = 0;
};

/// Random unit vectors on levels <= N - K with K = N / 2. Only modes |n| <= N - K enter
/// <psi, T(f) psi> there, so truncating f at K = N/2 is exact for these expectations.
inline QeiReport qei_check(const VermaModule& mod, const VectorField& f, double c, int trials, std::uint64_t seed,
                           std::optional<double> bound = {}) {
  int N = mod.params().N;
  int K = N / 2;
  int L = N - K;
  FourierSeries fs = fourier_coeffs(f, K);
  StressMatrix T = mod.stress_matrix(fs);
  QeiReport r;
  r.bound = bound ? *bound : qei_bound(f, c);
  r.exact_level = L;
  r.trials = trials;
  Eigen::MatrixXcd B = quotient_basis(mod, L);
  Eigen::MatrixXcd H = B.adjoint() * mod.gram_cached().cast<std::complex<double>>() * T.matrix * B;
  H = 0.5 * (H + H.adjoint().eval());
  r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues().minCoeff();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  r.min_expectation = INFINITY;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd a(B.cols());
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = {nd(rng), nd(rng)};
    a /= a.norm();
    double e = a.dot(H * a).real();
    r.min_expectation = std::min(r.min_expectation, e);
  }
  r.min_gap = r.min_expectation - r.bound;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Transformed translation generator

struct TransformedGenerator {
  VectorField field;  ///< Exp(t h_- t)_* t
  double beta = 0.0;  ///< beta(Exp(t h_- t), t) restricted to supp(h_- t)
  double neighbourhood_residual = 0.0;
  CircleMap flow;
};

inline TransformedGenerator transformed_generator(double t, double c) {
  require(std::abs(t) <= 2.0, ErrorKind::domain, "transformed_generator needs |t| <= 2");
  VectorField tt = translation_generator();
  TransformedGenerator out;
  if (t == 0.0) {
    out.field = tt;
    out.flow = identity_map();
    return out;
  }
  HalfCutoffs hc = half_cutoffs();
  out.flow = exp_field(hc.h_minus_t, t);
  out.field = pushforward(out.flow, tt);
  out.beta = beta_cocycle(out.flow, tt, c, std::make_pair(-kPi, 0.0));
  for (int i = 1; i < 64; ++i) {
    double th = -kPi + 0.2 * i / 64.0;
    out.neighbourhood_residual = std::max(out.neighbourhood_residual, std::abs(out.field(th) - tt(th)));
    double th2 = kPi - 0.2 * i / 64.0;
    out.neighbourhood_residual = std::max(out.neighbourhood_residual, std::abs(out.field(th2) - tt(th2)));
  }
  return out;
}

}  // namespace solnet
