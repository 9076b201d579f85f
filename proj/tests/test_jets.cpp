#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solnet/cutoffs.hpp"
#include "solnet/jets.hpp"

using namespace solnet;

namespace {

// Faa di Bruno through partial Bell polynomials: derivatives of a o b at a point from the
// derivatives a_k of the outer map (at b_0) and b_k of the inner map.
std::vector<double> faa_di_bruno(const std::vector<double>& a, const std::vector<double>& b) {
  int n = static_cast<int>(std::min(a.size(), b.size())) - 1;
  auto binom = [](int p, int q) {
    double r = 1.0;
    for (int i = 1; i <= q; ++i) r = r * (p - q + i) / i;
    return r;
  };
  // B[m][k] = B_{m,k}(b_1, ..., b_{m-k+1})
  std::vector<std::vector<double>> B(n + 1, std::vector<double>(n + 1, 0.0));
  B[0][0] = 1.0;
  for (int m = 1; m <= n; ++m)
    for (int k = 1; k <= m; ++k)
      for (int i = 1; i <= m - k + 1; ++i) B[m][k] += binom(m - 1, i - 1) * b[i] * B[m - i][k - 1];
  std::vector<double> out(n + 1, 0.0);
  out[0] = a[0];
  for (int m = 1; m <= n; ++m)
    for (int k = 1; k <= m; ++k) out[m] += a[k] * B[m][k];
  return out;
}

JetAtMinusOne random_field_jets(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JetAtMinusOne j = JetAtMinusOne::zero_field(n);
  for (int k = 2; k <= n; ++k) j.values[k] = u(rng);
  return j;
}

// 0.3 on |theta| <= 0.5, zero for |theta| >= 1.5 (periodically); all jets at -1 vanish.
VectorField centred_bump_field(double height) {
  return VectorField::smooth(
      [height](auto x) {
        double x0 = value_of(x);
        double shift = kTwoPi * std::round(x0 / kTwoPi);
        return height * bump(x - shift, 0.5, 1.5);
      },
      "centred_bump");
}

}  // namespace

TEST(FaaDiBrunoOracle, AgreesWithDirectChainRule) {
  // exp(sin(x)) at x = 0.3 against Taylor-mode arithmetic.
  double x = 0.3;
  RSeries ref = exp(sin(RSeries::variable(x, 6)));
  std::vector<double> a(6, std::exp(std::sin(x)));
  std::vector<double> b = sin(RSeries::variable(x, 6)).derivatives();
  std::vector<double> c = faa_di_bruno(a, b);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(c[k], ref.derivative(k), 1e-12);
}

TEST(JetOfExp, ZeroFieldGivesIdentity) {
  JetAtMinusOne j = jet_of_exp(JetAtMinusOne::zero_field(8), 1.7);
  EXPECT_NEAR(j.values[0], kPi, 1e-15);
  EXPECT_NEAR(j.values[1], 1.0, 1e-15);
  for (int k = 2; k <= 8; ++k) EXPECT_NEAR(j.values[k], 0.0, 1e-15);
}

TEST(JetOfExp, GroupLawAgainstFaaDiBruno) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    JetAtMinusOne f = random_field_jets(rng, 8);
    std::vector<double> a = jet_of_exp(f, 0.4).values, b = jet_of_exp(f, 0.7).values, ab = jet_of_exp(f, 1.1).values;
    std::vector<double> c = faa_di_bruno(a, b);
    for (int k = 1; k <= 8; ++k) EXPECT_NEAR(c[k], ab[k], 1e-9 * std::max(1.0, std::abs(ab[k])));
    std::vector<double> lib = compose_jets(a, b);
    for (int k = 1; k <= 8; ++k) EXPECT_NEAR(lib[k], c[k], 1e-10 * std::max(1.0, std::abs(c[k])));
  }
}

TEST(JetOfExp, MatchesFiniteDifferencesOfTheFlow) {
  // Trig field with a double zero at -1: (1 + cos)(0.3 + 0.2 sin).
  VectorField f = VectorField::trig({0.3, 0.3}, {0.2, 0.1});
  CircleMap g = exp_field(f, 0.8);
  JetAtMinusOne j = jet_of_exp(field_jets_at_minus_one(f, 4), 0.8);
  auto fd = [&g](double h) {
    double p1 = g(kPi + h), m1 = g(kPi - h), p2 = g(kPi + 2 * h), m2 = g(kPi - 2 * h), c0 = g(kPi);
    return std::vector<double>{(p1 - m1) / (2 * h), (p1 - 2 * c0 + m1) / (h * h), (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h)};
  };
  // One Richardson step removes the h^2 error term of the central stencils.
  std::vector<double> d1 = fd(0.02), d2 = fd(0.01);
  for (int k = 1; k <= 3; ++k) {
    double rich = (4 * d2[k - 1] - d1[k - 1]) / 3;
    EXPECT_NEAR(rich, j.values[k], 1e-6) << "order " << k;
  }
}

TEST(JetOfExp, RejectsUnsupportedOrder) {
  EXPECT_THROW(jet_of_exp(JetAtMinusOne::zero_field(9), 1.0), Error);
  JetAtMinusOne bad = JetAtMinusOne::zero_field(4);
  bad.values[1] = 0.5;
  EXPECT_THROW(jet_of_exp(bad, 1.0), Error);
}

TEST(InvertJets, IdentityAndRoundTrip) {
  JetAtMinusOne z = invert_jets(JetAtMinusOne::identity(8));
  for (double v : z.values) EXPECT_NEAR(v, 0.0, 1e-14);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    JetAtMinusOne g = random_field_jets(rng, 6);
    JetAtMinusOne back = invert_jets(jet_of_exp(g, 1.0));
    for (int k = 0; k <= 6; ++k) EXPECT_NEAR(back.values[k], g.values[k], 1e-8);
  }
}

TEST(InvertJets, PrescribedTargetIsReached) {
  JetAtMinusOne target = JetAtMinusOne::identity(3);
  target.values[2] = 0.5;
  JetAtMinusOne g = invert_jets(target);
  JetAtMinusOne again = jet_of_exp(g, 1.0);
  EXPECT_NEAR(again.values[2], 0.5, 1e-10);
  EXPECT_NEAR(again.values[3], 0.0, 1e-10);
  target.values[1] = 1.1;
  EXPECT_THROW(invert_jets(target), Error);
}

TEST(BnMembership, Examples) {
  for (int n : {0, 1, 4, 8}) EXPECT_TRUE(b_n_membership(identity_map(), n, 1e-12));
  CircleMap d = dilation(0.4);
  EXPECT_TRUE(b_n_membership(d, 0, 1e-12));
  EXPECT_FALSE(b_n_membership(d, 1, 1e-6));
  EXPECT_TRUE(b_n_membership(translation(0.5), 1, 1e-12));
  EXPECT_TRUE(b_n_membership(exp_field(centred_bump_field(0.3), 1.0), 8, 1e-7));
  EXPECT_FALSE(b_n_membership(rotation(0.2), 0, 1e-9));
}

TEST(DecomposePsOne, MapWithTrivialJetsIsUnchanged) {
  CircleMap gamma = exp_field(centred_bump_field(0.3), 1.0);
  PsOneDecomposition d = decompose_psone(gamma, 6);
  for (double v : d.g_jets.values) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double v : d.g_jets.right_values) EXPECT_NEAR(v, 0.0, 1e-12);
  for (int i = 0; i < 32; ++i) {
    double x = -kPi + kTwoPi * (i + 0.5) / 32;
    EXPECT_NEAR(d.gamma_under(x), gamma(x), 1e-10);
  }
}

TEST(DecomposePsOne, OneSidedJetsAreAbsorbed) {
  // gamma with left jets (lambda_2, lambda_3) = (0.3, 0) and trivial right jets.
  JetAtMinusOne target = JetAtMinusOne::identity(6);
  target.side = JetSide::two_sided;
  target.values[2] = 0.3;
  target.right_values = JetAtMinusOne::identity(6).values;
  CircleMap gamma = exp_field(glued_jet_field(invert_jets(target)), 1.0);
  JetAtMinusOne gj = jets_at_minus_one(gamma, 3);
  ASSERT_NEAR(gj.values[2], 0.3, 1e-9);
  ASSERT_NEAR(gj.values[3], 0.0, 1e-9);
  ASSERT_NEAR(gj.right_values[2], 0.0, 1e-12);

  PsOneDecomposition d = decompose_psone(gamma, 6);
  EXPECT_LT(d.jet_mismatch, 1e-8);
  EXPECT_TRUE(b_n_membership(d.gamma_under, 6, 1e-7));
  CircleMap rebuilt = compose(exp_field(d.g, 1.0), d.gamma_under);
  for (int i = 0; i < 64; ++i) {
    double x = -kPi + kTwoPi * (i + 0.5) / 64;
    EXPECT_NEAR(rebuilt(x), gamma(x), 1e-6);
  }
}

TEST(DecomposePsOne, RejectsMapsOutsideBOne) {
  EXPECT_THROW(decompose_psone(dilation(0.3), 4), Error);
  EXPECT_THROW(decompose_psone(rotation(0.3), 4), Error);
}
