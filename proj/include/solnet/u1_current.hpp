#pragma once

// U(1)-current one-particle space H_1 (Fourier modes 1 <= |k| <= K), the real-linear operator
// V(gamma) f = f o gamma^{-1}, its antilinear part A = J[V,J]/2, Hilbert-Schmidt sweeps, and a
// truncated bosonic Fock space with Weyl operators and second quantization.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "circle_diffeo.hpp"
#include "fourier_sobolev.hpp"
#include "parallel.hpp"

namespace solnet {

/// Modes f_k for 1 <= |k| <= K; the constant mode is quotiented out.
struct OneParticleVector {
  int K = 0;
  std::vector<cd> modes;  ///< index k + K; the k = 0 slot is always zero

  OneParticleVector() = default;
  explicit OneParticleVector(int k) : K(k), modes(2 * k + 1, cd(0.0, 0.0)) {}

  static OneParticleVector from_fourier(const FourierSeries& f, int K) {
    OneParticleVector v(K);
    for (int k = 1; k <= K; ++k) {
      v.modes[K + k] = f[k];
      v.modes[K - k] = f[-k];
    }
    return v;
  }

  cd operator[](int k) const { return (k == 0 || std::abs(k) > K) ? cd(0.0, 0.0) : modes[k + K]; }
  cd& at(int k) {
    require(k != 0 && std::abs(k) <= K, ErrorKind::out_of_range, "one-particle mode outside 1..K");
    return modes[k + K];
  }
  bool is_real(double tol = 1e-12) const {
    for (int k = 1; k <= K; ++k)
      if (std::abs(modes[K - k] - std::conj(modes[K + k])) > tol) return false;
    return true;
  }
  OneParticleVector operator+(const OneParticleVector& o) const {
    OneParticleVector r(std::max(K, o.K));
    for (int k = -r.K; k <= r.K; ++k)
      if (k != 0) r.modes[k + r.K] = (*this)[k] + o[k];
    return r;
  }
  OneParticleVector operator*(double a) const {
    OneParticleVector r = *this;
    for (auto& c : r.modes) c *= a;
    return r;
  }

  /// Coordinates in the orthonormal basis e_k / sqrt|k|, ordered k = -K..-1, 1..K.
  Eigen::VectorXcd orthonormal() const {
    Eigen::VectorXcd x(2 * K);
    for (int k = -K; k <= K; ++k)
      if (k != 0) x[k < 0 ? k + K : k + K - 1] = std::sqrt(double(std::abs(k))) * (*this)[k];
    return x;
  }
  static OneParticleVector from_orthonormal(const Eigen::VectorXcd& x) {
    int K = static_cast<int>(x.size()) / 2;
    OneParticleVector v(K);
    for (int k = -K; k <= K; ++k)
      if (k != 0) v.modes[k + K] = x[k < 0 ? k + K : k + K - 1] / std::sqrt(double(std::abs(k)));
    return v;
  }
};

/// J: positive modes times i, negative modes times -i.
inline OneParticleVector complex_structure(const OneParticleVector& v) {
  OneParticleVector r = v;
  const cd I(0.0, 1.0);
  for (int k = 1; k <= v.K; ++k) {
    r.modes[v.K + k] *= I;
    r.modes[v.K - k] *= -I;
  }
  return r;
}

/// <f, g> = sum_{k >= 1} k f_k conj(g_k).
inline cd inner(const OneParticleVector& f, const OneParticleVector& g) {
  cd acc(0.0, 0.0);
  for (int k = 1; k <= std::max(f.K, g.K); ++k) acc += double(k) * f[k] * std::conj(g[k]);
  return acc;
}

/// Squared seminorm sum_{k >= 1} k |f_k|^2.
inline double seminorm_sq(const OneParticleVector& f) {
  double acc = 0.0;
  for (int k = 1; k <= f.K; ++k) acc += k * std::norm(f[k]);
  return acc;
}

/// (1/4 pi) int f g' d theta for real f, g.
inline double symplectic_form(const OneParticleVector& f, const OneParticleVector& g) {
  require(f.is_real() && g.is_real(), ErrorKind::domain, "symplectic form needs real vectors");
  cd acc(0.0, 0.0);
  for (int k = -std::max(f.K, g.K); k <= std::max(f.K, g.K); ++k)
    if (k != 0) acc += cd(0.0, double(k)) * f[-k] * g[k];
  return 0.5 * acc.real();
}

// ---------------------------------------------------------------------------------------------

/// Real-linear operator on modes <= K in the orthonormal basis e_k / sqrt|k| (complexified).
/// Index order k = -K..-1, 1..K.
struct RealLinearOp {
  int K = 0;
  Eigen::MatrixXcd M;

  static int index(int k, int K) { return k < 0 ? k + K : k + K - 1; }
  cd entry(int m, int n) const { return M(index(m, K), index(n, K)); }

  /// Blocks: rows (output sign), columns (input sign).
  Eigen::MatrixXcd pos_pos() const { return M.block(K, K, K, K); }
  Eigen::MatrixXcd pos_neg() const { return M.block(K, 0, K, K); }
  Eigen::MatrixXcd neg_pos() const { return M.block(0, K, K, K); }
  Eigen::MatrixXcd neg_neg() const { return M.block(0, 0, K, K); }

  OneParticleVector apply(const OneParticleVector& v) const {
    require(v.K == K, ErrorKind::domain, "mode cutoff mismatch");
    return OneParticleVector::from_orthonormal(M * v.orthonormal());
  }

  static Eigen::MatrixXcd j_matrix(int K) {
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(2 * K, 2 * K);
    for (int i = 0; i < K; ++i) {
      J(i, i) = cd(0.0, -1.0);
      J(K + i, K + i) = cd(0.0, 1.0);
    }
    return J;
  }
};

namespace detail {

inline int lambda_quad_points(const CircleMap& ginv, int K) {
  // Resolve frequencies up to K (1 + max slope of the inverse map).
  double slope = 1.0;
  for (int i = 0; i < 256; ++i) {
    double x = -kPi + kTwoPi * (i + 0.5) / 256;
    slope = std::max(slope, std::abs(ginv.series(x, 2)[1]));
  }
  return 16 * static_cast<int>(std::ceil(K * (1.0 + slope))) + 256;
}

inline Eigen::MatrixXcd scaled_block(const LambdaGrid& grid, const std::vector<int>& ms, const std::vector<int>& ns) {
  Eigen::MatrixXcd B(static_cast<Eigen::Index>(ms.size()), static_cast<Eigen::Index>(ns.size()));
  // Row chunks in parallel; each chunk is one GEMM.
  const std::size_t chunk = 32;
  std::size_t nchunks = (ms.size() + chunk - 1) / chunk;
  parallel_for(nchunks, [&](std::size_t c) {
    std::size_t lo = c * chunk, hi = std::min(ms.size(), lo + chunk);
    std::vector<int> sub(ms.begin() + lo, ms.begin() + hi);
    B.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)) = grid.block(sub, ns);
  });
  for (Eigen::Index i = 0; i < B.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j) B(i, j) *= std::sqrt(double(std::abs(ms[i])) / std::abs(ns[j]));
  return B;
}

inline std::vector<int> mode_range(int lo, int hi) {
  std::vector<int> v;
  for (int k = lo; k <= hi; ++k)
    if (k != 0) v.push_back(k);
  return v;
}

}  // namespace detail

/// V(gamma): entry (m, n) = sqrt(|m|/|n|) lambda_{m,n}(gamma^{-1}); the k = 0 row is dropped.
inline RealLinearOp v_gamma(const CircleMap& g, int K, int quad_points = 0) {
  require(K >= 1, ErrorKind::domain, "K must be >= 1");
  RealLinearOp V;
  V.K = K;
  if (g.is_identity()) {
    V.M = Eigen::MatrixXcd::Identity(2 * K, 2 * K);
    return V;
  }
  CircleMap ginv = invert(g);
  if (quad_points <= 0) quad_points = detail::lambda_quad_points(ginv, K);
  LambdaGrid grid(ginv, quad_points);
  std::vector<int> all = detail::mode_range(-K, K);
  V.M = detail::scaled_block(grid, all, all);
  return V;
}

/// A = J [V, J] / 2.
inline RealLinearOp a_operator(const RealLinearOp& V) {
  Eigen::MatrixXcd J = RealLinearOp::j_matrix(V.K);
  RealLinearOp A;
  A.K = V.K;
  A.M = 0.5 * (J * (V.M * J - J * V.M));
  return A;
}

inline RealLinearOp a_operator(const CircleMap& g, int K, int quad_points = 0) { return a_operator(v_gamma(g, K, quad_points)); }

struct HsSweep {
  std::vector<int> cutoffs;
  std::vector<double> hs;
  std::string verdict;  ///< converged | diverging | inconclusive
  double tail = 0.0;    ///< last increment
  double growth = 0.0;  ///< last relative growth
};

struct VerdictThresholds {
  double converged_tail = 1e-6;
  double diverging_growth = 0.10;
};

inline std::string hs_verdict(const std::vector<double>& hs, VerdictThresholds th, double* tail = nullptr,
                              double* growth = nullptr) {
  if (hs.size() < 2) return "inconclusive";
  double a = hs[hs.size() - 2], b = hs.back();
  double t = b - a;
  double gr = a > 0 ? b / a - 1.0 : (b > 0 ? INFINITY : 0.0);
  if (tail) *tail = t;
  if (growth) *growth = gr;
  if (t < th.converged_tail) return "converged";
  if (gr > th.diverging_growth) return "diverging";
  return "inconclusive";
}

/// Frobenius norms of A at increasing cutoffs, from one grid at the largest cutoff and
/// shell-by-shell accumulation (monotone by construction).
inline HsSweep hs_norm_sweep(const CircleMap& g, std::vector<int> cutoffs, VerdictThresholds th = {}, int quad_points = 0) {
  require(!cutoffs.empty(), ErrorKind::domain, "empty cutoff list");
  for (std::size_t i = 0; i < cutoffs.size(); ++i)
    require(cutoffs[i] >= 1 && (i == 0 || cutoffs[i] > cutoffs[i - 1]), ErrorKind::domain, "cutoffs must increase");
  HsSweep out;
  out.cutoffs = cutoffs;
  int K = cutoffs.back();
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(K, K);  // |A_{m,-n}|^2 + |A_{-m,n}|^2, m,n = 1..K
  if (!g.is_identity()) {
    CircleMap ginv = invert(g);
    if (quad_points <= 0) quad_points = detail::lambda_quad_points(ginv, K);
    LambdaGrid grid(ginv, quad_points);
    std::vector<int> pos = detail::mode_range(1, K), neg;
    for (int k : pos) neg.push_back(-k);
    // For a real map lambda_{-m,n} = conj(lambda_{m,-n}), so both opposite-sign blocks have equal moduli.
    Eigen::MatrixXcd pn = detail::scaled_block(grid, pos, neg);
    sq = 2.0 * pn.cwiseAbs2();
  }
  double acc = 0.0;
  int prev = 0;
  for (int Kc : cutoffs) {
    for (int shell = prev + 1; shell <= Kc; ++shell) {
      for (int j = 0; j < shell; ++j) acc += sq(shell - 1, j);
      for (int i = 0; i < shell - 1; ++i) acc += sq(i, shell - 1);
    }
    prev = Kc;
    out.hs.push_back(std::sqrt(acc));
  }
  out.verdict = hs_verdict(out.hs, th, &out.tail, &out.growth);
  return out;
}

/// Partial sum of sum_{p=2}^{pmax} C^2 (p-1)(2 + log p) / p^{2(s-1)}.
inline double hs_series_bound(double s, double C, long pmax) {
  require(s > 1.5, ErrorKind::domain, "hs_series_bound needs s > 3/2");
  double acc = 0.0;
  for (long p = 2; p <= pmax; ++p) acc += (p - 1.0) * (2.0 + std::log(double(p))) / std::pow(double(p), 2.0 * (s - 1.0));
  return C * C * acc;
}

// ---------------------------------------------------------------------------------------------
// Truncated Fock space

class TruncatedFock {
 public:
  TruncatedFock(std::vector<int> modes, int n_max) : modes_(std::move(modes)), n_max_(n_max) {
    require(!modes_.empty(), ErrorKind::domain, "Fock space needs at least one mode");
    require(n_max_ >= 1, ErrorKind::domain, "n_max must be >= 1");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      require(modes_[i] >= 1, ErrorKind::domain, "Fock modes must be positive");
      for (std::size_t j = 0; j < i; ++j) require(modes_[i] != modes_[j], ErrorKind::domain, "duplicate Fock mode");
    }
    dim_ = 1;
    for (std::size_t i = 0; i < modes_.size(); ++i) dim_ *= (n_max_ + 1);
  }

  const std::vector<int>& modes() const { return modes_; }
  int n_max() const { return n_max_; }
  int dim() const { return dim_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }

  /// Occupations of basis state `idx` (first mode most significant).
  std::vector<int> occupation(int idx) const {
    std::vector<int> occ(modes_.size());
    for (int i = mode_count() - 1; i >= 0; --i) {
      occ[i] = idx % (n_max_ + 1);
      idx /= (n_max_ + 1);
    }
    return occ;
  }
  int index_of(const std::vector<int>& occ) const {
    int idx = 0;
    for (int o : occ) idx = idx * (n_max_ + 1) + o;
    return idx;
  }
  int slot_of(int mode) const {
    for (int i = 0; i < mode_count(); ++i)
      if (modes_[i] == mode) return i;
    return -1;
  }

  /// Annihilator of mode slot i (truncated).
  Eigen::MatrixXcd annihilator(int i) const {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int idx = 0; idx < dim_; ++idx) {
      std::vector<int> occ = occupation(idx);
      if (occ[i] == 0) continue;
      double amp = std::sqrt(double(occ[i]));
      occ[i] -= 1;
      a(index_of(occ), idx) = amp;
    }
    return a;
  }

  /// Basis states with total occupation <= n_max / 2.
  std::vector<int> safe_sector() const {
    std::vector<int> out;
    for (int idx = 0; idx < dim_; ++idx) {
      int tot = 0;
      for (int o : occupation(idx)) tot += o;
      if (tot <= n_max_ / 2) out.push_back(idx);
    }
    return out;
  }

 private:
  std::vector<int> modes_;
  int n_max_;
  int dim_ = 1;
};

namespace detail {

/// exp(G) for anti-Hermitian G through the Hermitian eigenproblem of iG.
inline Eigen::MatrixXcd exp_anti_hermitian(const Eigen::MatrixXcd& G) {
  const cd I(0.0, 1.0);
  Eigen::MatrixXcd H = I * G;
  H = 0.5 * (H + H.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, -es.eigenvalues()[i]);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Restriction of columns to a sector.
inline Eigen::MatrixXcd sector_columns(const Eigen::MatrixXcd& M, const std::vector<int>& sector) {
  Eigen::MatrixXcd out(M.rows(), static_cast<Eigen::Index>(sector.size()));
  for (std::size_t j = 0; j < sector.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(sector[j]);
  return out;
}

/// W(f) = exp(sum_k alpha_k a_k^dagger - conj(alpha_k) a_k), alpha_k = sqrt(k/2) conj(f_k).
inline Eigen::MatrixXcd weyl_matrix(const TruncatedFock& fock, const OneParticleVector& f) {
  require(f.is_real(), ErrorKind::domain, "Weyl operators take real one-particle vectors");
  for (int k = 1; k <= f.K; ++k)
    require(std::abs(f[k]) == 0.0 || fock.slot_of(k) >= 0, ErrorKind::domain, "vector has a mode outside the Fock modes");
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(fock.dim(), fock.dim());
  for (int i = 0; i < fock.mode_count(); ++i) {
    int k = fock.modes()[i];
    cd alpha = std::sqrt(0.5 * k) * std::conj(f[k]);
    if (alpha == cd(0.0, 0.0)) continue;
    Eigen::MatrixXcd a = fock.annihilator(i);
    G += alpha * a.adjoint() - std::conj(alpha) * a;
  }
  return detail::exp_anti_hermitian(G);
}

/// Coordinates x_k = sqrt(k) f_k on the Fock modes.
inline Eigen::VectorXcd fock_coordinates(const TruncatedFock& fock, const OneParticleVector& f) {
  Eigen::VectorXcd x(fock.mode_count());
  for (int i = 0; i < fock.mode_count(); ++i) x[i] = std::sqrt(double(fock.modes()[i])) * f[fock.modes()[i]];
  return x;
}

/// u f for u unitary on the coordinates x_k = sqrt(k) f_k (positive modes), keeping f real.
inline OneParticleVector apply_mode_unitary(const TruncatedFock& fock, const Eigen::MatrixXcd& u, const OneParticleVector& f) {
  require(u.rows() == fock.mode_count() && u.cols() == fock.mode_count(), ErrorKind::domain, "unitary size mismatch");
  Eigen::VectorXcd y = u * fock_coordinates(fock, f);
  int K = f.K;
  for (int k : fock.modes()) K = std::max(K, k);
  OneParticleVector out(K);
  for (int k = 1; k <= f.K; ++k) {
    out.modes[K + k] = f[k];
    out.modes[K - k] = f[-k];
  }
  for (int i = 0; i < fock.mode_count(); ++i) {
    int k = fock.modes()[i];
    out.modes[K + k] = y[i] / std::sqrt(double(k));
    out.modes[K - k] = std::conj(out.modes[K + k]);
  }
  return out;
}

/// Gamma(u) = exp(dGamma(log conj u)) with dGamma(X) = sum X_ij a_i^dagger a_j. The Weyl
/// amplitudes carry conj(f_k), so the covariance Gamma(u) W(f) Gamma(u)^dagger = W(u f) needs
/// the conjugate matrix on the Fock modes. Exact on the sectors of total occupation <= n_max.
inline Eigen::MatrixXcd second_quantize(const TruncatedFock& fock, const Eigen::MatrixXcd& u) {
  int d = fock.mode_count();
  require(u.rows() == d && u.cols() == d, ErrorKind::domain, "unitary size mismatch");
  require((u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10, ErrorKind::domain,
          "second_quantize needs a unitary");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.conjugate());
  Eigen::MatrixXcd T = schur.matrixT();
  Eigen::MatrixXcd Q = schur.matrixU();
  Eigen::VectorXcd lg(d);
  for (int i = 0; i < d; ++i) lg[i] = cd(0.0, std::arg(T(i, i)));
  Eigen::MatrixXcd X = Q * lg.asDiagonal() * Q.adjoint();
  std::vector<Eigen::MatrixXcd> a;
  for (int i = 0; i < d; ++i) a.push_back(fock.annihilator(i));
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(fock.dim(), fock.dim());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (X(i, j) != cd(0.0, 0.0)) G += X(i, j) * a[i].adjoint() * a[j];
  return detail::exp_anti_hermitian(G);
}

}  // namespace solnet
