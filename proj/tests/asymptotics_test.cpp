#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wperm/asymptotics.hpp"
#include "wperm/exact.hpp"
#include "wperm/harness.hpp"

using namespace wperm;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Asymptotics, UniformHnIsExactlyOne) {
    const auto p = predict_h_n(parse_model("uniform"), RestrictionSet::full(1000));
    EXPECT_NEAR(p.value.real(), 1.0, 1e-14);
    EXPECT_EQ(p.value.imag(), 0.0);
}

TEST(Asymptotics, EwensHnAgainstRisingFactorial) {
    // (theta)_n / n! = Gamma(n + theta) / (Gamma(theta) Gamma(n + 1))
    for (const char* spec : {"0.5", "2", "3.5"}) {
        const double theta = std::stod(spec);
        const auto model = parse_model(std::string("ewens:theta=") + spec);
        double prev = 1.0;
        for (std::size_t n : {100u, 400u, 1600u}) {
            const double exact = std::exp(std::lgamma(n + theta) - std::lgamma(theta) - std::lgamma(n + 1.0));
            const double err = rel(predict_h_n(model, RestrictionSet::full(n)).value.real(), exact);
            EXPECT_LT(err, 2.0 * theta * theta / static_cast<double>(n)) << theta << " " << n;
            EXPECT_LT(err, prev);
            prev = err;
        }
    }
}

TEST(Asymptotics, RestrictedHnConvergesAlongLadder) {
    const auto rep = verify_hn_asymptotics(parse_model("ewens:theta=2"), parse_restriction("exclude:1,3"),
                                           {100, 200, 400, 800});
    EXPECT_TRUE(rep.all_passed()) << rep.metrics.at("average_error_ratio");
}

TEST(Asymptotics, CharTAtZeroIsOne) {
    const auto model = parse_model("ewens:theta=2");
    EXPECT_EQ(predict_char_T(model, RestrictionSet::full(50), 0.0).value, Complex(1.0, 0.0));
    EXPECT_EQ(mod_poisson_limit(2.0, 0.0), Complex(1.0, 0.0));
}

TEST(Asymptotics, CharTPredictionApproachesExact) {
    const auto model = parse_model("ewens:theta=2");
    const auto fam = parse_restriction("exclude-log");
    double prev = 1e9;
    for (std::size_t n : {250u, 1000u, 4000u}) {
        const auto A = fam.at(n);
        double worst = 0.0;
        for (double s : {-1.0, 0.5, 1.2}) worst = std::max(worst, std::abs(predict_char_T(model, A, s).value - char_T(model, A, s)));
        EXPECT_LT(worst, prev) << n;
        prev = worst;
    }
    EXPECT_LT(prev, 0.02);
}

TEST(Asymptotics, ModPoissonParameterOfUniformIsLogN) {
    EXPECT_NEAR(mod_poisson_parameter(parse_model("uniform"), RestrictionSet::full(500)), std::log(500.0), 1e-12);
}

TEST(Asymptotics, CharBPredictionForSmallCycles) {
    const auto model = parse_model("ewens:theta=1");
    const std::size_t n = 3000;
    for (double x : {0.3, 0.5}) {
        for (double s : {0.7, -1.5}) {
            const auto p = predict_char_B(model, n, x, s);
            const Complex exact = char_B(model, n, {Block{prefix_set(n, x), s}});
            EXPECT_LT(std::abs(p.value - exact), 5e-3) << x << " " << s;
        }
    }
    EXPECT_THROW(predict_char_B(model, n, 1.0, 0.1), domain_error);
}

TEST(Asymptotics, TwoSingularityReducesToOneWithoutSecondWeight) {
    const auto model = parse_model("ewens:theta=3/2");
    const auto a = predict_coefficient(model, {}, Complex(0.8, 0.3), 700);
    const auto b = predict_coefficient_two_sing(model, Complex(0.8, 0.3), Complex(0.0, 0.0), {}, 700);
    EXPECT_LT(std::abs(a.value - b.value), 1e-15 * std::abs(a.value));
}

TEST(Asymptotics, ParityCharacteristicFunction) {
    const auto model = parse_model("uniform");
    EXPECT_LT(std::abs(parity_char_exact(model, 300, 0.0, 0.0) - 1.0), 1e-12);
    double prev = 1e9;
    for (std::size_t n : {125u, 250u, 500u}) {
        const double err = std::abs(parity_char_exact(model, n, 0.6, -0.4) - predict_parity_char(model, n, 0.6, -0.4).value);
        EXPECT_LT(err, prev) << n;
        prev = err;
    }
}

TEST(Asymptotics, PoissonDirichletMoments) {
    EXPECT_EQ(pd_moment_limit(1.0, 0), 1.0);
    for (unsigned b = 1; b <= 5; ++b) EXPECT_NEAR(pd_moment_limit(1.0, b), 1.0 / (b + 1.0), 1e-15);
    // Beta(1, theta) moment via Gamma: b! Gamma(theta + 1) / Gamma(theta + b + 1)
    for (double theta : {0.5, 2.0, 3.7}) {
        for (unsigned b = 1; b <= 4; ++b) {
            const double via_gamma = std::exp(std::lgamma(b + 1.0) + std::lgamma(theta + 1.0) - std::lgamma(theta + b + 1.0));
            EXPECT_NEAR(pd_moment_limit(theta, b), via_gamma, 1e-13);
        }
    }
}

TEST(Asymptotics, ExactEllOneMomentsApproachTheLimit) {
    const auto model = parse_model("ewens:theta=2");
    for (unsigned b = 1; b <= 3; ++b) {
        double prev = 1.0;
        for (std::size_t n : {100u, 1000u}) {
            const auto law = ell1_law<double>(model, RestrictionSet::full(n));
            double m = 0.0;
            for (std::size_t i = 0; i < law.support.size(); ++i)
                m += law.probs[i] * std::pow(static_cast<double>(law.support[i][0]) / static_cast<double>(n), b);
            const double err = std::abs(m - pd_moment_limit(2.0, b));
            EXPECT_LT(err, prev);
            prev = err;
        }
        EXPECT_LT(prev, 5e-3);
    }
}

TEST(BetaFamily, SingularFactorAgainstBinomialSeries) {
    // uniform weights, f = (1 - t)^{-beta}: [t^n] f e^g = (beta + 1)_n / n!
    const auto model = parse_model("uniform");
    for (double beta : {0.5, 1.0, 2.5}) {
        const std::size_t n = 2000;
        const double exact = std::exp(std::lgamma(n + beta + 1.0) - std::lgamma(beta + 1.0) - std::lgamma(n + 1.0));
        BetaFamilyInput in;
        in.kind = BetaKind::f_singular;
        in.beta = beta;
        in.n = n;
        EXPECT_LT(rel(beta_family_prediction(model, in).value.real(), exact), beta * (beta + 1.0) / n) << beta;
    }
}

TEST(BetaFamily, DerivativeOfGWithShift) {
    // f = g'' for Ewens(theta): [t^{n-2}] g'' e^g  ~ theta 1! n^{theta+1} / Gamma(theta + 2)
    const auto model = parse_model("ewens:theta=2");
    const std::size_t n = 3000;
    const std::size_t b = 1;
    // exact: g'' e^g = theta (1-t)^{-2} (1-t)^{-theta}, coefficient (theta + 2)_{n-2} / (n-2)! times theta
    const double theta = 2.0;
    const double N = static_cast<double>(n - b - 1);
    const double exact = theta * std::exp(std::lgamma(N + theta + 2.0) - std::lgamma(theta + 2.0) - std::lgamma(N + 1.0));
    BetaFamilyInput in;
    in.kind = BetaKind::f_singular;
    in.beta = static_cast<double>(b + 1);
    in.amplitude = theta;
    in.n = n;
    in.shift = b + 1;
    EXPECT_LT(rel(beta_family_prediction(model, in).value.real(), exact), 5e-3);
}

TEST(BetaFamily, PolynomialFactor) {
    // [t^n] (1 + t) / (1 - t) = 2 for n >= 1
    BetaFamilyInput in;
    in.kind = BetaKind::polynomial_factor;
    in.polynomial = {1.0, 1.0};
    in.n = 100;
    EXPECT_NEAR(beta_family_prediction(parse_model("uniform"), in).value.real(), 2.0, 1e-14);
    in.polynomial = {1.0, -1.0};
    EXPECT_THROW(beta_family_prediction(parse_model("uniform"), in), domain_error);
}

TEST(Asymptotics, WarningsOutsideValidatedRange) {
    const auto model = parse_model("uniform");
    EXPECT_FALSE(predict_coefficient(model, {}, Complex(3.0, 0.0), 200).warnings.empty());
    EXPECT_TRUE(predict_coefficient(model, {}, Complex(1.0, 0.0), 200).warnings.empty());
    // d_n = n/2 breaks the growth condition
    const auto half = RestrictionSet(200, [](std::size_t m) { return m > 100; }, "half", false);
    EXPECT_FALSE(predict_h_n(model, half).warnings.empty());
}
