#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solnet/fourier_sobolev.hpp"
#include "solnet/jets.hpp"

using namespace solnet;

namespace {

FourierSeries random_band_limited(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> nd;
  FourierSeries f(K, true);
  f.at(0) = nd(rng);
  for (int k = 1; k <= K; ++k) {
    f.at(k) = cd(nd(rng), nd(rng)) / double(k * k);
    f.at(-k) = std::conj(f[k]);
  }
  return f;
}

double total_variation_sum(const FourierSeries& f, int K) {
  double acc = 0.0;
  for (int k = -K; k <= K; ++k) acc += std::abs(f[k]) * (1.0 + std::pow(std::abs(k), 1.5));
  return acc;
}

CircleMap smooth_non_mobius() { return exp_field(VectorField::trig({0.0}, {0.0, 0.3}), 1.0); }

// C^1 map with a second-derivative jump at -1 only.
CircleMap psone_map() {
  JetAtMinusOne target = JetAtMinusOne::identity(6);
  target.side = JetSide::two_sided;
  target.values[2] = 0.3;
  target.right_values = JetAtMinusOne::identity(6).values;
  return exp_field(glued_jet_field(invert_jets(target)), 1.0);
}

}  // namespace

TEST(FourierCoeffs, SingleModesAndTranslationGenerator) {
  FourierSeries c3 = fourier_coeffs([](double x) { return std::cos(3 * x); }, 8);
  FourierSeries s3 = fourier_coeffs([](double x) { return std::sin(3 * x); }, 8);
  for (int k = -8; k <= 8; ++k) {
    cd e3 = c3[k] + cd(0, 1) * s3[k];  // coefficients of e^{3 i theta}
    EXPECT_NEAR(std::abs(e3 - (k == 3 ? cd(1, 0) : cd(0, 0))), 0.0, 1e-14);
  }
  for (const FourierSeries& t : {fourier_coeffs(translation_generator(), 6),
                                 fourier_coeffs([](double x) { return 1.0 + std::cos(x); }, 6)}) {
    EXPECT_NEAR(std::abs(t[0] - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(t[1] - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(t[-1] - 0.5), 0.0, 1e-14);
    for (int k = 2; k <= 6; ++k) EXPECT_LT(std::abs(t[k]) + std::abs(t[-k]), 1e-14);
    EXPECT_TRUE(t.reality_holds());
  }
}

TEST(FourierCoeffs, TriangleWaveClosedForm) {
  // |theta| on [-pi, pi]: f_0 = pi/2, f_k = ((-1)^k - 1)/(pi k^2).
  FourierSeries f = fourier_coeffs(
      [](double x) {
        double s;
        return std::abs(reduce_angle(x, s));
      },
      64, {0.0, kPi});
  EXPECT_NEAR(f[0].real(), kPi / 2, 1e-12);
  for (int k = 1; k <= 64; ++k) {
    double exact = ((k % 2 ? -1.0 : 1.0) - 1.0) / (kPi * k * k);
    EXPECT_NEAR(f[k].real(), exact, 1e-12);
    EXPECT_NEAR(f[k].imag(), 0.0, 1e-12);
  }
}

TEST(FourierCoeffs, ResolutionGuardAndParsevalRoundTrip) {
  EXPECT_THROW(fourier_coeffs([](double x) { return x; }, 64, {}, 100), Error);
  std::mt19937_64 rng(3);
  FourierSeries f = random_band_limited(rng, 12);
  std::vector<double> samples(25);
  for (int j = 0; j < 25; ++j) samples[j] = f.eval(kTwoPi * j / 25).real();
  FourierSeries g = fourier_from_samples(samples, 12);
  for (int k = -12; k <= 12; ++k) EXPECT_NEAR(std::abs(g[k] - f[k]), 0.0, 1e-10);
  for (int j = 0; j < 25; ++j) EXPECT_NEAR(g.eval(kTwoPi * j / 25).real(), samples[j], 1e-10);
}

TEST(HsNorm, DefinitionAndNormAxioms) {
  EXPECT_NEAR(h_s_norm(FourierSeries::single_mode(5), 1.5), std::pow(26.0, 0.75), 1e-12);
  EXPECT_EQ(h_s_norm(FourierSeries(4, true), 2.0), 0.0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    FourierSeries f = random_band_limited(rng, 10), g = random_band_limited(rng, 10), sum(10, true), sc(10, true);
    for (int k = -10; k <= 10; ++k) {
      sum.at(k) = f[k] + g[k];
      sc.at(k) = -2.5 * f[k];
    }
    EXPECT_LE(h_s_norm(f, 1.2), h_s_norm(f, 2.2));
    EXPECT_NEAR(h_s_norm(sc, 1.7), 2.5 * h_s_norm(f, 1.7), 1e-12 * h_s_norm(sc, 1.7));
    EXPECT_LE(h_s_norm(sum, 1.7), h_s_norm(f, 1.7) + h_s_norm(g, 1.7) + 1e-12);
  }
}

TEST(Norm32, SingleModeAndEmbedding) {
  EXPECT_NEAR(norm_3_2(FourierSeries::single_mode(-4)), 1.0 + 8.0, 1e-12);
  // Cauchy-Schwarz: ||f||_{3/2} <= sqrt(sum (1+|k|^{3/2})^2 / (1+k^2)^s) ||f||_{H^s}
  double C = norm_3_2_embedding_constant(2.2);
  double direct = 0.0;
  for (int k = -200000; k <= 200000; ++k) direct += std::pow(1.0 + std::pow(std::abs(k), 1.5), 2) / std::pow(1.0 + double(k) * k, 2.2);
  // The library adds an integral bound for the slowly decaying tail, so C is a slight overestimate.
  EXPECT_GE(C, std::sqrt(direct));
  EXPECT_LT(C, 1.01 * std::sqrt(direct));
  std::mt19937_64 rng(100);
  for (int t = 0; t < 100; ++t) {
    FourierSeries f = random_band_limited(rng, 30);
    EXPECT_LE(norm_3_2(f), C * h_s_norm(f, 2.2));
  }
}

TEST(Norm32, PartialSumsSeparateC1FromC0) {
  auto c0 = [](double x) {
    double s;
    return std::abs(reduce_angle(x, s));
  };
  auto c1 = [](double x) {
    double s;
    double r = reduce_angle(x, s);
    return r * std::abs(r) * (kPi - std::abs(r));  // C^1, second derivative jumps at 0 and pi
  };
  std::vector<double> p0, p1;
  for (int K : {64, 256, 1024}) {
    p0.push_back(total_variation_sum(fourier_coeffs(c0, K, {0.0, kPi}), K));
    p1.push_back(total_variation_sum(fourier_coeffs(c1, K, {0.0, kPi}), K));
  }
  EXPECT_GT(p0[2] / p0[1], 1.3);  // grows like sqrt(K)
  EXPECT_GT(p0[1] / p0[0], 1.3);
  EXPECT_LT(p1[2] / p1[1] - 1.0, 0.1);  // converges like K^{-1/2}
  EXPECT_LT(p1[2] - p1[1], p1[1] - p1[0]);
}

TEST(Lambda, IdentityAndRotation) {
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      EXPECT_NEAR(std::abs(lambda_mn(identity_map(), m, n) - (m == n ? cd(1, 0) : cd(0, 0))), 0.0, 1e-13);
      cd expect = m == n ? std::polar(1.0, n * 0.7) : cd(0, 0);
      EXPECT_NEAR(std::abs(lambda_mn(rotation(0.7), m, n) - expect), 0.0, 1e-13);
    }
  EXPECT_THROW(lambda_mn(identity_map(), 10, -10, 100), Error);
}

TEST(Lambda, SmoothMapsDecayFast) {
  // Exp(0.3 sin) is a Moebius dilation: its opposite-sign lambdas vanish identically.
  CircleMap mob = exp_field(VectorField::trig({0.0}, {0.3}), 1.0);
  CircleMap gen = smooth_non_mobius();
  LambdaGrid gm(mob, 2048), gg(gen, 2048);
  double worst_mob = 0.0, head = 0.0, tail = 0.0;
  for (int p = 2; p <= 60; ++p)
    for (int m = 1; m < p; ++m) {
      worst_mob = std::max(worst_mob, std::abs(gm.lambda(m, m - p)) * std::pow(p, 4));
      double w = std::abs(gg.lambda(m, m - p)) * std::pow(p, 4);
      (p <= 30 ? head : tail) = std::max(p <= 30 ? head : tail, w);
    }
  EXPECT_LT(worst_mob, 1e-6);
  // The weighted sequence is bounded and already decreasing: the far half stays below the near half.
  EXPECT_TRUE(std::isfinite(head));
  EXPECT_LT(tail, head);
  EXPECT_GT(std::abs(gg.lambda(1, -3)), 1e-3);  // non-trivial
}

TEST(Lambda, DoubledQuadratureSelfConsistency) {
  for (const CircleMap& g : {smooth_non_mobius(), psi_t(0.5), psone_map()}) {
    LambdaGrid a(g, 1024), b(g, 2048);
    for (int p = 2; p <= 64; p += 6)
      for (int m = 1; m < p; m += 5) EXPECT_LT(std::abs(a.lambda(m, m - p) - b.lambda(m, m - p)), 1e-9);
  }
}

TEST(DecayReport, SmoothMapBeatsEveryRequiredRate) {
  DecayReport r96 = lambda_decay_report(smooth_non_mobius(), 4.0, 96);
  DecayReport r48 = lambda_decay_report(smooth_non_mobius(), 4.0, 48);
  EXPECT_FALSE(r96.degenerate);
  EXPECT_GE(r96.fitted_exponent, 3.0);
  EXPECT_LE(r96.sup_weighted, r48.sup_weighted + 1e-15);
  for (double v : r96.values) EXPECT_GE(v, 0.0);
  EXPECT_TRUE(std::isfinite(r96.fitted_exponent));
}

TEST(DecayReport, SecondDerivativeJumpStaysBelowRate) {
  DecayReport r = lambda_decay_report(psone_map(), 2.4, 96, 0, true);
  EXPECT_FALSE(r.degenerate);
  EXPECT_TRUE(std::isfinite(r.sup_weighted));
  EXPECT_LT(r.sup_weighted, 10.0);
  EXPECT_LT(r.self_check, 1e-9);
}

TEST(DecayReport, DegenerateCasesAreFlagged) {
  EXPECT_TRUE(lambda_decay_report(identity_map(), 2.4, 32).degenerate);
  EXPECT_TRUE(lambda_decay_report(rotation(0.4), 2.4, 32).degenerate);
  DecayReport mob = lambda_decay_report(exp_field(VectorField::trig({0.0}, {0.3}), 1.0), 2.4, 32);
  EXPECT_TRUE(mob.degenerate);
  EXPECT_LT(mob.sup_weighted, 1e-11);
}

TEST(DsMembership, Examples) {
  EXPECT_EQ(ds_membership(identity_map(), 2.0), 0.0);
  EXPECT_NEAR(ds_membership(rotation(0.3), 2.0), 0.3, 1e-12);
  std::vector<double> hi, lo;
  for (int K : {64, 128, 256, 512}) {
    hi.push_back(ds_membership(psi_t(0.5), 2.4, K));
    lo.push_back(ds_membership(psi_t(0.5), 1.2, K));
  }
  for (int i = 1; i < 4; ++i) EXPECT_GT(hi[i] / hi[i - 1], 1.2);
  EXPECT_LT(lo[3] / lo[2] - 1.0, 0.01);
}

TEST(TranslationFamily, LinePictureFormula) {
  for (int n : {1, 3, 8}) {
    VectorField tn = translation_family(n);
    for (double x : {-3.0, -1.0, 0.2, 1.5, 2.5, 2.9, 3.1}) {
      double t = std::tan(x / 2) / n;
      double u = t - 1.0;
      double step = u * u * u * u * u * (126 - 420 * u + 540 * u * u - 315 * u * u * u + 70 * u * u * u * u);
      double t1 = t <= 1 ? 1.0 : (t >= 2 ? 0.0 : 1.0 - step);
      EXPECT_NEAR(tn(x), (1.0 + std::cos(x)) * t1, 1e-13);
    }
  }
}

TEST(TranslationFamily, L1ConvergenceBelowTailBound) {
  const int n = 32;
  VectorField diff = translation_generator() - translation_family(n);
  NodeSet ns = composite_panels(-kPi, kPi, {2 * std::atan(double(n)), 2 * std::atan(2.0 * n)}, 1e-3);
  double l1 = 0.0;
  for (std::size_t j = 0; j < ns.size(); ++j) l1 += ns.w[j] * std::abs(diff(ns.x[j]));
  double tail = integrate_adaptive([](double t) { return 4.0 / std::pow(1 + t * t, 2); }, n, 1e6, 1e-15);
  EXPECT_GT(l1, 0.0);
  EXPECT_LT(l1, tail);
}

TEST(TranslationFamily, H22DistanceDecreases) {
  double prev = INFINITY;
  for (int n : {4, 8, 16, 32}) {
    VectorField diff = translation_generator() - translation_family(n);
    double v = h_s_norm(fourier_coeffs(diff, 4096), 2.2);
    EXPECT_LT(v, prev) << "n=" << n;
    prev = v;
  }
}

TEST(TranslationFamily, ThirdDerivativeL1Bounded) {
  std::vector<double> v;
  for (int n : {4, 8, 16, 32, 64}) v.push_back(l1_derivative_norm(translation_family(n), 3, 0.002));
  double mx = *std::max_element(v.begin(), v.end()), mn = *std::min_element(v.begin(), v.end());
  EXPECT_LT(mx, 2.0 * mn);
  EXPECT_LT(mx, 100.0);
}

TEST(HalfCutoffs, SupportsAndSplitting) {
  HalfCutoffs hc = half_cutoffs();
  VectorField t = translation_generator();
  for (int i = 0; i < 4096; ++i) {
    double x = -kPi + kTwoPi * (i + 0.5) / 4096;
    EXPECT_EQ(hc.h_minus_t(x) * hc.h_plus_t(x), 0.0);
    EXPECT_NEAR(hc.t_minus(x) + hc.t_plus(x), t(x), 1e-12);
    if (x < -kPi / 2) EXPECT_NEAR(hc.h_minus_t(x), t(x), 1e-12);
    if (x > kPi / 2) EXPECT_NEAR(hc.h_plus_t(x), t(x), 1e-12);
    if (x < 0) EXPECT_EQ(hc.h_plus_t(x), 0.0);
  }
}
