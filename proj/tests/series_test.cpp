#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wperm/series.hpp"

using namespace wperm;

namespace {

Rational factorial(int n) {
    Rational f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

Series<Rational> random_rational_series(std::mt19937& gen, std::size_t order) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 7);
    std::vector<Rational> c(order + 1, Rational(0));
    for (std::size_t k = 1; k <= order; ++k) c[k] = Rational(num(gen), den(gen));
    return Series<Rational>(c);
}

}  // namespace

TEST(Series, ExpOfIdentityGivesInverseFactorials) {
    std::vector<Rational> g(16, Rational(0));
    g[1] = 1;
    auto f = series_exp(Series<Rational>(g));
    for (int n = 0; n <= 15; ++n) EXPECT_EQ(f[n], 1 / factorial(n)) << n;
}

TEST(Series, ExpOfLogarithmicSeriesGivesGeometric) {
    // exp(sum t^m / m) = 1 / (1 - t)
    std::vector<Rational> g(31, Rational(0));
    for (int m = 1; m <= 30; ++m) g[m] = Rational(1, m);
    auto f = series_exp(Series<Rational>(g));
    for (int n = 0; n <= 30; ++n) EXPECT_EQ(f[n], Rational(1));
}

TEST(Series, ExpAndLogAreInverse) {
    std::mt19937 gen(11);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = random_rational_series(gen, 12);
        auto back = series_log(series_exp(g));
        for (std::size_t k = 0; k <= 12; ++k) EXPECT_EQ(back[k], g[k]);
    }
}

TEST(Series, ExpTurnsSumsIntoProducts) {
    std::mt19937 gen(5);
    auto a = random_rational_series(gen, 10);
    auto b = random_rational_series(gen, 10);
    auto lhs = series_exp(series_add(a, b));
    auto rhs = series_mul(series_exp(a), series_exp(b));
    for (std::size_t k = 0; k <= 10; ++k) EXPECT_EQ(lhs[k], rhs[k]);
}

TEST(Series, ScaledFloatSeriesRecoversTrueCoefficients) {
    // g(t) = 2 sum t^m/m has exp(g) = (1-t)^{-2}, [t^n] = n + 1; stored with
    // scale 0.5 the coefficient is (n + 1) 0.5^n.
    const std::size_t N = 40;
    std::vector<double> plain(N + 1, 0.0);
    std::vector<double> scaled(N + 1, 0.0);
    for (std::size_t m = 1; m <= N; ++m) {
        plain[m] = 2.0 / static_cast<double>(m);
        scaled[m] = plain[m] * std::pow(0.5, static_cast<double>(m));
    }
    auto fp = series_exp(Series<double>(plain));
    auto fs = series_exp(Series<double>(scaled, 0.5));
    for (std::size_t n = 0; n <= N; ++n) {
        EXPECT_NEAR(coefficient(fp, n), static_cast<double>(n + 1), 1e-9 * static_cast<double>(n + 1));
        EXPECT_NEAR(coefficient(fs, n) / static_cast<double>(n + 1), 1.0, 1e-12);
        EXPECT_NEAR(coefficient(fs, n, Convention::scaled), static_cast<double>(n + 1) * std::pow(0.5, n), 1e-12);
    }
}

TEST(Series, SparseAndDensePathsAgree) {
    const std::size_t N = 200;
    std::vector<double> sparse(N + 1, 0.0);
    for (std::size_t m : {1u, 3u, 7u}) sparse[m] = 1.0 / static_cast<double>(m);
    std::vector<double> dense = sparse;
    for (std::size_t m = 8; m <= N; ++m) dense[m] = 1e-300;  // forces the dense loop, numerically invisible
    auto a = series_exp(Series<double>(sparse));
    auto b = series_exp(Series<double>(dense));
    for (std::size_t n = 0; n <= N; ++n) EXPECT_NEAR(a[n], b[n], 1e-12 * std::max(1.0, std::abs(a[n])));
}

TEST(Series, MultiplicationTruncatesToShorterOperand) {
    Series<Rational> a(std::vector<Rational>{1, 1, 1, 1});
    Series<Rational> b(std::vector<Rational>{1, -1});
    auto c = series_mul(a, b);
    EXPECT_EQ(c.order(), 1u);
    EXPECT_EQ(c[0], 1);
    EXPECT_EQ(c[1], 0);
}

TEST(Series, ErrorsOnDomainViolations) {
    EXPECT_THROW(series_exp(Series<Rational>(std::vector<Rational>{1, 1})), domain_error);
    EXPECT_THROW(series_log(Series<Rational>(std::vector<Rational>{2, 1})), domain_error);
    Series<double> a(std::vector<double>{0, 1}, 1.0);
    Series<double> b(std::vector<double>{0, 1}, 0.5);
    EXPECT_THROW(series_add(a, b), scale_mismatch);
    EXPECT_THROW(series_mul(a, b), scale_mismatch);
    EXPECT_THROW(coefficient(a, 2), domain_error);
    EXPECT_THROW(Series<Rational>(std::vector<Rational>{1}, 0.5), domain_error);
    EXPECT_THROW(Series<double>(std::vector<double>{}, 1.0), domain_error);
}

TEST(Series, ComplexExpMatchesRealPart) {
    const std::size_t N = 25;
    std::vector<double> g(N + 1, 0.0);
    for (std::size_t m = 1; m <= N; ++m) g[m] = 1.0 / static_cast<double>(m * m);
    auto real = series_exp(Series<double>(g));
    auto cplx = series_exp(to_complex(Series<double>(g)));
    for (std::size_t n = 0; n <= N; ++n) {
        EXPECT_NEAR(cplx[n].real(), real[n], 1e-14);
        EXPECT_EQ(cplx[n].imag(), 0.0);
    }
}

TEST(Scalar, ParseDecimalIsExact) {
    EXPECT_EQ(parse_decimal("0.1"), Rational(1, 10));
    EXPECT_EQ(parse_decimal("-2/4"), Rational(-1, 2));
    EXPECT_EQ(parse_decimal("1e-3"), Rational(1, 1000));
    EXPECT_EQ(parse_decimal("2.5E2"), Rational(250));
    EXPECT_THROW(parse_decimal("abc"), parse_error);
}
