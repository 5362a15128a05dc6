#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wperm/gamma.hpp"

using namespace wperm;

namespace {

// Stirling series for log Gamma, accurate for |z| >= 10 off the negative axis.
Complex stirling_log_gamma(Complex z) {
    const Complex z2 = z * z;
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + 1.0 / (12.0 * z) -
           1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2) - 1.0 / (1680.0 * z * z2 * z2 * z2);
}

// Composite Simpson on [0, 1] of x^{a-1} (1-x)^{b-1}, a, b >= 1.
double beta_integral(double a, double b) {
    const int N = 200000;
    const double h = 1.0 / N;
    double s = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double x = i * h;
        const double f = std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0);
        s += f * ((i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return s * h / 3.0;
}

}  // namespace

TEST(Gamma, FactorialsAtPositiveIntegers) {
    double f = 1.0;
    for (int n = 1; n <= 20; ++n) {
        EXPECT_NEAR(complex_gamma(Complex(n, 0)).real() / f, 1.0, 1e-13) << n;
        f *= n;
    }
}

TEST(Gamma, HalfIntegersAndReflection) {
    const double sp = std::sqrt(std::numbers::pi);
    EXPECT_NEAR(complex_gamma(Complex(0.5, 0)).real(), sp, 1e-13);
    EXPECT_NEAR(complex_gamma(Complex(-0.5, 0)).real(), -2.0 * sp, 1e-12);
    EXPECT_NEAR(complex_gamma(Complex(-1.5, 0)).real(), 4.0 * sp / 3.0, 1e-12);
}

TEST(Gamma, PolesThrowAndReciprocalVanishes) {
    for (int k = 0; k >= -5; --k) {
        EXPECT_THROW(complex_gamma(Complex(k, 0)), domain_error);
        EXPECT_EQ(reciprocal_gamma(Complex(k, 0)), Complex(0, 0));
    }
}

TEST(Gamma, MatchesStirlingSeriesAwayFromOrigin) {
    for (double re : {10.0, 15.0, 30.0}) {
        for (double im : {-20.0, -3.0, 0.0, 4.0, 25.0}) {
            const Complex z(re, im);
            const Complex ratio = std::exp(std::log(complex_gamma(z)) - stirling_log_gamma(z));
            EXPECT_NEAR(std::abs(ratio - 1.0), 0.0, 1e-11) << z;
        }
    }
}

TEST(Gamma, RecurrenceHoldsOnComplexGrid) {
    for (double re = -3.7; re <= 4.0; re += 0.9) {
        for (double im = -2.0; im <= 2.0; im += 0.8) {
            const Complex z(re, im);
            const Complex lhs = complex_gamma(z + 1.0);
            const Complex rhs = z * complex_gamma(z);
            EXPECT_LT(std::abs(lhs - rhs), 1e-11 * std::max(1.0, std::abs(lhs))) << z;
        }
    }
}

TEST(Gamma, BetaFunctionMatchesIntegral) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.5, 1.5}, std::pair{3.0, 4.25}}) {
        const double via_gamma =
            (complex_gamma(Complex(a, 0)) * complex_gamma(Complex(b, 0)) / complex_gamma(Complex(a + b, 0))).real();
        EXPECT_NEAR(via_gamma, beta_integral(a, b), 1e-9);
    }
}

TEST(Gamma, ConjugateSymmetry) {
    const Complex z(1.3, 2.2);
    EXPECT_LT(std::abs(complex_gamma(std::conj(z)) - std::conj(complex_gamma(z))), 1e-14);
}
