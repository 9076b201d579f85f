#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "solnet/circle_diffeo.hpp"
#include "solnet/fourier_sobolev.hpp"

using namespace solnet;

namespace {

std::vector<double> grid(int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(-kPi + kTwoPi * (i + 0.5) / n);
  return g;
}

// Fixed-step classical RK4 for d theta/dt = f(theta); independent of the library integrator.
template <typename F>
double rk4_flow(F f, double x, double t, int steps = 4000) {
  double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

CircleMap small_flow(double a, double b, double c) { return exp_field(VectorField::trig({0.0, a, c}, {b, 0.1 * a}), 1.0); }

}  // namespace

TEST(Compose, RotationsAdd) {
  CircleMap r = compose(rotation(0.4), rotation(-1.1));
  for (double x : grid(64)) EXPECT_NEAR(r(x), x - 0.7, 1e-12);
}

TEST(Compose, WithInverseIsIdentity) {
  CircleMap g = exp_field(VectorField::trig({0.0}, {0.3}), 1.0);
  CircleMap id1 = compose(g, invert(g)), id2 = compose(invert(g), g);
  for (double x : grid(64)) {
    EXPECT_NEAR(id1(x), x, 1e-9);
    EXPECT_NEAR(id2(x), x, 1e-9);
  }
}

TEST(Compose, Associative) {
  CircleMap a = small_flow(0.2, 0.1, 0.05), b = small_flow(-0.1, 0.3, 0.0), c = rotation(0.3);
  CircleMap l = compose(compose(a, b), c), r = compose(a, compose(b, c));
  for (double x : grid(64)) EXPECT_NEAR(l(x), r(x), 1e-9);
}

TEST(Compose, BreakpointsArePulledBack) {
  CircleMap g = compose(psi_t(0.5), rotation(0.3));
  std::vector<double> b = g.breakpoints();
  ASSERT_EQ(b.size(), 2u);
  // psi_t breaks at 0 and pi; the rotation moves their preimages by -0.3.
  EXPECT_NEAR(circular_distance(b[0], -0.3) * circular_distance(b[0], kPi - 0.3) +
                  circular_distance(b[1], -0.3) * circular_distance(b[1], kPi - 0.3),
              0.0, 1e-9);
  EXPECT_EQ(g.map_class(), MapClass::piecewise_c0);
}

TEST(Mobius, DilationsFormAOneParameterGroup) {
  MobiusElement p = MobiusElement::dilation(0.3) * MobiusElement::dilation(0.5);
  EXPECT_TRUE(p.equals(MobiusElement::dilation(0.8)));
  EXPECT_NEAR(MobiusElement::normalized(2, 1, 1, 3).determinant(), 1.0, 1e-12);
  CircleMap m = compose(dilation(0.3), dilation(0.5)), d = dilation(0.8);
  for (double x : grid(64)) EXPECT_NEAR(m(x), d(x), 1e-12);
}

TEST(Mobius, LinePictureIsLinearFractional) {
  // The circle map must act on s = tan(theta/2) as s -> (a s + b)/(c s + d).
  MobiusElement e = MobiusElement::normalized(1.3, 0.4, -0.2, 0.9);
  CircleMap m = mobius_map(e);
  for (double s : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    double image = (e.a * s + e.b) / (e.c * s + e.d);
    EXPECT_NEAR(std::tan(m(cayley_inv(s)) / 2), image, 1e-10);
  }
}

TEST(Invert, Basics) {
  EXPECT_TRUE(invert(identity_map()).is_identity());
  CircleMap r = invert(rotation(0.9));
  for (double x : grid(64)) EXPECT_NEAR(r(x), x - 0.9, 1e-12);
}

TEST(Invert, ExpOfFieldAgainstBackwardRk4) {
  VectorField f = VectorField::trig({0.0, 0.2}, {});
  CircleMap inv = invert(exp_field(f, 1.0));
  for (double x : grid(32)) EXPECT_NEAR(inv(x), rk4_flow([](double y) { return 0.2 * std::cos(y); }, x, -1.0), 1e-8);
}

TEST(ExpField, ZeroTimeAndConstantField) {
  EXPECT_TRUE(exp_field(VectorField::trig({0.0}, {1.0}), 0.0).is_identity());
  CircleMap r = exp_field(VectorField::constant(1.0), 0.7);
  for (double x : grid(32)) EXPECT_NEAR(r(x), x + 0.7, 1e-10);
}

TEST(ExpField, TranslationGeneratorTranslatesTheLine) {
  CircleMap tr = exp_field(translation_generator(), 0.6);
  for (double s : {-4.0, -1.0, 0.0, 0.3, 2.0}) EXPECT_NEAR(std::tan(tr(cayley_inv(s)) / 2), s + 0.6, 1e-8);
}

TEST(ExpField, OneParameterLawAndRk4Oracle) {
  VectorField f = VectorField::trig({0.1, 0.2}, {0.0, 0.15});
  CircleMap a = exp_field(f, 0.4), b = exp_field(f, 0.9), ab = exp_field(f, 1.3);
  CircleMap c = compose(a, b);
  auto fv = [](double y) { return 0.1 + 0.2 * std::cos(y) + 0.15 * std::sin(2 * y); };
  for (double x : grid(32)) {
    EXPECT_NEAR(c(x), ab(x), 1e-8);
    EXPECT_NEAR(ab(x), rk4_flow(fv, x, 1.3), 1e-9);
  }
}

TEST(ExpField, TaylorSeriesMatchesFiniteDifferences) {
  CircleMap g = exp_field(VectorField::trig({0.0, 0.3}, {0.2}), 1.0);
  const double x = 0.4, h = 1e-3;
  RSeries s = g.series(x, 4);
  EXPECT_NEAR(s.derivative(1), (g(x + h) - g(x - h)) / (2 * h), 1e-6);
  EXPECT_NEAR(s.derivative(2), (g(x + h) - 2 * g(x) + g(x - h)) / (h * h), 1e-5);
}

TEST(Cayley, Values) {
  EXPECT_EQ(cayley(0.0), 0.0);
  EXPECT_NEAR(cayley(kPi / 2), 1.0, 1e-15);
  std::complex<double> i(0, 1), z = i;
  EXPECT_NEAR(std::abs(cayley_z(z) - i * (1.0 - i) / (1.0 + i)), 0.0, 1e-15);
  EXPECT_NEAR(cayley_z(std::polar(1.0, 0.8)).real(), cayley(0.8), 1e-14);
  for (double t : {0.3, -0.3, 2.0, -2.0}) EXPECT_NEAR(cayley_inv(cayley(t)), t, 1e-14);
  EXPECT_THROW(cayley(kPi), Error);
  EXPECT_THROW(cayley(-kPi), Error);
}

TEST(Pushforward, IdentityAndChainRule) {
  VectorField f = VectorField::trig({0.1, 0.3}, {0.2, -0.1});
  VectorField p = pushforward(identity_map(), f);
  for (double x : grid(32)) EXPECT_NEAR(p(x), f(x), 1e-12);
  CircleMap g1 = small_flow(0.2, -0.1, 0.1), g2 = small_flow(-0.15, 0.2, -0.05);
  VectorField lhs = pushforward(compose(g1, g2), f), rhs = pushforward(g1, pushforward(g2, f));
  for (double x : grid(32)) EXPECT_NEAR(lhs(x), rhs(x), 1e-8);
}

TEST(Pushforward, MatchesPointwiseDefinition) {
  // (g_* f)(g(x)) = g'(x) f(x)
  VectorField f = VectorField::trig({0.0, 0.5}, {0.3});
  CircleMap g = small_flow(0.2, 0.1, 0.1);
  VectorField p = pushforward(g, f);
  for (double x : grid(16)) EXPECT_NEAR(p(g(x)), g.derivative(x) * f(x), 1e-10);
}

TEST(Pushforward, DilationRescalesTranslationFamily) {
  // In the line picture a dilation acts as s -> e^t s; a density g(s) is pushed to e^t g(e^{-t} s),
  // so pushing t_1 by the dilation with e^t = n gives n t_n.
  for (int n : {2, 4}) {
    VectorField p = pushforward(dilation(std::log(double(n))), translation_family(1));
    VectorField tn = translation_family(n);
    for (double s : {-5.0, 0.5, 1.5, 2.5, 3.7, 6.0, 9.0}) {
      EXPECT_NEAR(line_density(p, s), n * line_density(tn, s), 1e-9) << "n=" << n << " s=" << s;
    }
  }
  EXPECT_NEAR(std::tan(dilation(0.7)(cayley_inv(1.0)) / 2), std::exp(0.7), 1e-12);
}

TEST(Schwarzian, VanishesOnMobiusAndIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    MobiusElement e = MobiusElement::normalized(1.5 + u(rng), u(rng), u(rng), 1.5 + u(rng));
    CircleMap m = mobius_map(e);
    for (double x : grid(16)) EXPECT_LT(std::abs(schwarzian_z(m, x)), 1e-8);
  }
  EXPECT_EQ(schwarzian_z(identity_map(), 0.3), std::complex<double>(0.0, 0.0));
}

TEST(Schwarzian, ChainRuleCocycle) {
  CircleMap g1 = small_flow(0.2, 0.1, 0.15), g2 = small_flow(-0.1, 0.25, -0.1);
  CircleMap g12 = compose(g1, g2);
  for (double x : grid(16)) {
    double phi = g2(x), dphi = g2.derivative(x);
    std::complex<double> z = std::polar(1.0, x);
    // d gamma2 / dz at z = e^{ix}: phi'(x) e^{i(phi - x)}
    std::complex<double> dg = dphi * std::polar(1.0, phi - x);
    std::complex<double> rhs = schwarzian_z(g1, phi) * dg * dg + schwarzian_z(g2, x);
    EXPECT_LT(std::abs(schwarzian_z(g12, x) - rhs), 1e-7);
    (void)z;
  }
}

TEST(Schwarzian, GuardBandAroundBreakpoints) {
  EXPECT_THROW(schwarzian_z(psi_t(0.5), 1e-4), Error);
  EXPECT_NO_THROW(schwarzian_z(psi_t(0.5), 0.5));
}

TEST(PsiT, GluedDilation) {
  EXPECT_TRUE(psi_t(0.0).is_identity());
  CircleMap p = psi_t(0.7);
  EXPECT_NEAR(p(0.0), 0.0, 1e-15);
  EXPECT_NEAR(p(-1.0), -1.0, 1e-15);
  EXPECT_NEAR(p(1.0), dilation(0.7)(1.0), 1e-15);
  // derivative from theta -> pi^- is the dilation's derivative at -1, e^{-0.7}; from the other side 1
  EXPECT_NEAR(p.derivative(kPi, Side::left) / p.derivative(kPi, Side::right), std::exp(-0.7), 1e-10);
  EXPECT_EQ(p.map_class(), MapClass::piecewise_c0);
  EXPECT_NO_THROW(validate_map(p));
}

TEST(Validate, RejectsDecreasingLift) {
  CircleMap bad = make_smooth_map([](auto x) { return x - 1.5 * sin(x); }, "bad");
  EXPECT_THROW(validate_map(bad), Error);
  EXPECT_NO_THROW(validate_map(small_flow(0.2, 0.1, 0.1)));
}

TEST(LineDensity, GeometricCayleyRule) {
  // 1 + cos(theta) generates s -> s + t, so its density is identically 1.
  for (double s : {-10.0, -1.0, 0.0, 3.0}) EXPECT_NEAR(line_density(translation_generator(), s), 1.0, 1e-12);
  // sin(theta) generates s -> e^t s: density s.
  for (double s : {-2.0, 0.5, 4.0}) EXPECT_NEAR(line_density(dilation_generator(), s), s, 1e-12);
}
