// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmwcov/numerics/laplace.hpp"
#include "mmwcov/numerics/quadrature.hpp"
#include "mmwcov/numerics/special.hpp"

using namespace mmwcov;
using namespace mmwcov::numerics;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(Quadrature, PolynomialIsExact) {
  EXPECT_NEAR(integrate_1d([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-14);
}

TEST(Quadrature, ReversedBoundsFlipSign) {
  EXPECT_NEAR(integrate_1d([](double x) { return std::cos(x); }, 1.0, 0.0), -std::sin(1.0), 1e-12);
}

TEST(Quadrature, SemiInfiniteExponential) {
  EXPECT_NEAR(integrate_1d([](double x) { return std::exp(-x); }, 0.0, kInf), 1.0, 1e-8);
  EXPECT_NEAR(integrate_1d([](double x) { return std::exp(x); }, -kInf, 0.0), 1.0, 1e-8);
}

TEST(Quadrature, WholeLineGaussian) {
  EXPECT_NEAR(integrate_1d([](double x) { return std::exp(-x * x); }, -kInf, kInf), std::sqrt(std::numbers::pi), 1e-8);
}

TEST(Quadrature, EndpointSingularity) {
  const QuadratureSpec spec{1e-10, 1e-12, 4000, 1e-9};
  EXPECT_NEAR(integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec), 2.0, 1e-8);
}

TEST(Quadrature, BreakpointAtKink) {
  const double br[] = {1.0 / 3.0};
  const auto r = integrate_1d_result([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, {}, br);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, (1.0 / 9.0 + 4.0 / 9.0) / 2.0, 1e-14);
  EXPECT_EQ(r.subdivisions, 0);
}

TEST(Quadrature, NonConvergenceCarriesEstimate) {
  const QuadratureSpec spec{1e-12, 1e-14, 3, 1e-9};
  auto f = [](double x) { return std::sin(1.0 / x); };
  EXPECT_FALSE(integrate_1d_result(f, 1e-4, 1.0, spec).converged);
  try {
    integrate_1d(f, 1e-4, 1.0, spec);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.estimate()));
    EXPECT_GT(e.error_bound(), 0.0);
  }
}

TEST(Quadrature, RejectsBadInput) {
  EXPECT_THROW(integrate_1d([](double) { return 1.0; }, std::nan(""), 1.0), DomainError);
  EXPECT_THROW(integrate_1d([](double) { return 1.0; }, 0.0, 1.0, QuadratureSpec{0.0, 1e-10, 10, 1e-9}), DomainError);
}

TEST(Quadrature, TriangleAndRectangle2d) {
  const double tri = integrate_2d([](double, double) { return 1.0; }, 0.0, 1.0, [](double) { return 0.0; },
                                  [](double x) { return x; });
  EXPECT_NEAR(tri, 0.5, 1e-12);
  const double rect = integrate_2d([](double x, double y) { return x * y; }, 0.0, 2.0, 0.0, 3.0);
  EXPECT_NEAR(rect, 2.0 * 4.5, 1e-11);
}

TEST(Special, GammaValues) {
  EXPECT_NEAR(special_gamma(5.0), 24.0, 1e-12);
  EXPECT_NEAR(special_gamma(0.5), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_THROW(special_gamma(-1.0), DomainError);
}

// Γ(n, x) = (n-1)! e^-x Σ_{k<n} x^k/k! for integer n.
TEST(Special, UpperGammaIntegerSeries) {
  for (int n : {1, 2, 3, 5}) {
    for (double x : {0.1, 1.0, 4.0, 12.0}) {
      double sum = 0.0, term = 1.0;
      for (int k = 0; k < n; ++k) {
        sum += term;
        term *= x / (k + 1);
      }
      const double expect = factorial(n - 1) * std::exp(-x) * sum;
      EXPECT_NEAR(special_gamma_upper(n, x), expect, 1e-12 * std::max(1.0, expect)) << n << " " << x;
      EXPECT_NEAR(special_gamma_q(n, x), std::exp(-x) * sum, 1e-13);
    }
  }
}

TEST(Special, LowerGammaMatchesQuadrature) {
  for (double a : {0.7, 2.5, 3.0}) {
    for (double x : {0.3, 2.0, 9.0}) {
      const double q = integrate_1d([a](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, x,
                                    QuadratureSpec{1e-12, 1e-14, 4000, 1e-9});
      EXPECT_NEAR(special_gamma_lower(a, x), q, 1e-9) << a << " " << x;
      EXPECT_NEAR(special_gamma_p(a, x) + special_gamma_q(a, x), 1.0, 1e-14);
    }
  }
}

TEST(Special, ErfMatchesQuadrature) {
  for (double x : {0.0, 0.2, 1.0, 2.5}) {
    const double q =
        2.0 / std::sqrt(std::numbers::pi) * integrate_1d([](double t) { return std::exp(-t * t); }, 0.0, x);
    EXPECT_NEAR(special_erf(x), q, 1e-12);
  }
  EXPECT_NEAR(special_erf(-0.4), -special_erf(0.4), 1e-15);
}

// I_x(2, 3) = Σ_{j=2}^{4} C(4, j) x^j (1-x)^(4-j).
TEST(Special, IncompleteBetaPolynomial) {
  for (double x : {0.05, 0.3, 0.5, 0.9}) {
    const double y = 1.0 - x;
    const double expect = 6 * x * x * y * y + 4 * x * x * x * y + x * x * x * x;
    EXPECT_NEAR(special_ibeta(2, 3, x), expect, 1e-14);
  }
}

TEST(Special, Combinatorics) {
  EXPECT_EQ(binomial(5, 2), 10.0);
  EXPECT_EQ(binomial(6, 0), 1.0);
  EXPECT_EQ(factorial(5), 120.0);
  EXPECT_EQ(factorial(0), 1.0);
}

// Exponent F(s) = -c(1 - e^-s), F^(k) = (-1)^k c e^-s; L^(k) by hand.
TEST(Laplace, RecursionMatchesClosedForm) {
  const double c = 1.7;
  LaplaceEvaluator lt{[c](double s, int k) {
                        if (k == 0) return -c * (1.0 - std::exp(-s));
                        return (k % 2 ? -1.0 : 1.0) * c * std::exp(-s);
                      },
                      3};
  for (double s : {0.1, 0.8, 2.0}) {
    const auto d = laplace_derivatives(lt, s, 3);
    const double e = std::exp(-s);
    const double L = std::exp(-c * (1.0 - e));
    EXPECT_NEAR(d[0], L, 1e-15);
    EXPECT_NEAR(d[1], -c * e * L, 1e-14);
    EXPECT_NEAR(d[2], (c * e + c * c * e * e) * L, 1e-14);
    EXPECT_NEAR(d[3], -(c * e + 3 * c * c * e * e + c * c * c * e * e * e) * L, 1e-13);
  }
}

TEST(Laplace, FiniteDifferenceAgreement) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  LaplaceEvaluator lt{[](double s, int k) {
                        // F(s) = -log1p(s)·2: derivatives (-1)^k·2·(k-1)!/(1+s)^k.
                        if (k == 0) return -2.0 * std::log1p(s);
                        return (k % 2 ? -1.0 : 1.0) * 2.0 * factorial(k - 1) / std::pow(1.0 + s, k);
                      },
                      2};
  for (int i = 0; i < 10; ++i) {
    const double s = u(rng), h = 1e-4;
    const auto d = laplace_derivatives(lt, s, 2);
    const double fd1 = (lt(s + h) - lt(s - h)) / (2 * h);
    const double fd2 = (lt(s + h) - 2 * lt(s) + lt(s - h)) / (h * h);
    EXPECT_NEAR(d[1] / fd1, 1.0, 1e-6);
    EXPECT_NEAR(d[2] / fd2, 1.0, 1e-5);
  }
}

// With h ~ Gamma(m, 1/m) and constant interference the mixture reduces to
// the gamma ccdf: exponent F(s) = -s·I.
TEST(Laplace, MixtureEqualsGammaCcdf) {
  const double I = 0.8;
  for (int m : {1, 2, 3}) {
    LaplaceEvaluator lt{[I](double s, int k) { return k == 0 ? -s * I : (k == 1 ? -I : 0.0); }, m};
    const double s = m * 1.3;  // P(h > 1.3 I) with s = m·threshold
    EXPECT_NEAR(gamma_ccdf_mixture(lt, s, m), special_gamma_q(m, s * I), 1e-13) << m;
  }
  LaplaceEvaluator lt{[](double, int) { return 0.0; }, 0};
  EXPECT_THROW(laplace_derivatives(lt, 1.0, 1), DomainError);
  EXPECT_THROW(gamma_ccdf_mixture(lt, 1.0, 0), DomainError);
}
