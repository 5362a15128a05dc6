#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "wperm/exact.hpp"
#include "wperm/harness.hpp"

using namespace wperm;

namespace {

// Unsigned Stirling numbers of the first kind: c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k).
std::vector<std::vector<BigInt>> stirling_first(std::size_t N) {
    std::vector<std::vector<BigInt>> c(N + 1, std::vector<BigInt>(N + 1, 0));
    c[0][0] = 1;
    for (std::size_t n = 1; n <= N; ++n)
        for (std::size_t k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + BigInt(n - 1) * c[n - 1][k];
    return c;
}

Rational factorial(std::size_t n) {
    Rational f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= static_cast<long long>(k);
    return f;
}

}  // namespace

TEST(BruteForce, UniformDegreeThreeCycleTypes) {
    const auto law = brute_force_oracle(parse_model("uniform"), RestrictionSet::full(3), {});
    EXPECT_EQ(law.prob(Outcome{1, 1, 1}), Rational(1, 6));
    EXPECT_EQ(law.prob(Outcome{2, 1}), Rational(1, 2));
    EXPECT_EQ(law.prob(Outcome{3}), Rational(1, 3));
    const auto T = brute_force_oracle(parse_model("uniform"), RestrictionSet::full(3), {Statistic::total, {}, 0});
    EXPECT_EQ(T.prob(1), Rational(1, 3));
    EXPECT_EQ(T.prob(2), Rational(1, 2));
    EXPECT_EQ(T.prob(3), Rational(1, 6));
}

TEST(BruteForce, RestrictedToOneAndThree) {
    const auto A = RestrictionSet::allowing(3, IndexSet({1, 3}));
    const auto law = brute_force_oracle(parse_model("uniform"), A, {});
    EXPECT_EQ(law.prob(Outcome{3}), Rational(2, 3));
    EXPECT_EQ(law.prob(Outcome{1, 1, 1}), Rational(1, 3));
    EXPECT_EQ(law_T<Rational>(parse_model("uniform"), A).prob(1), Rational(2, 3));
}

TEST(Exact, SeriesAgreesWithBruteForceForBuiltins) {
    const auto rep = verify_exactness(builtin_models(), builtin_restrictions(), 8);
    for (const auto& n : rep.notes) ADD_FAILURE() << n;
    EXPECT_TRUE(rep.all_passed());
    EXPECT_GT(rep.metrics.at("comparisons"), 100.0);
}

TEST(Exact, ExtraRestrictionsAgreeWithBruteForce) {
    const std::vector<RestrictionFamily> fams{parse_restriction("even"), parse_restriction("tail:a=0.5"),
                                              parse_restriction("allow:2,3,5")};
    const auto rep = verify_exactness({parse_model("ewens:theta=1/3")}, fams, 9);
    for (const auto& n : rep.notes) ADD_FAILURE() << n;
    EXPECT_TRUE(rep.all_passed());
}

TEST(Exact, EwensClosedForm) {
    for (const char* t : {"2", "1/2", "3.5"}) {
        const auto model = parse_model(std::string("ewens:theta=") + t);
        const Rational theta = model.vartheta_exact();
        auto h = h_table<Rational>(model, RestrictionSet::full(40));
        Rational closed = 1;
        for (std::size_t n = 0; n <= 40; ++n) {
            if (n > 0) closed *= (theta + static_cast<long long>(n - 1)) / Rational(static_cast<long long>(n));
            EXPECT_EQ((*h)[n], closed) << t << " n=" << n;
        }
    }
}

TEST(Exact, NumberOfCyclesIsStirlingForUniform) {
    const std::size_t N = 25;
    const auto c = stirling_first(N);
    const auto law = law_T<Rational>(parse_model("uniform"), RestrictionSet::full(N));
    for (std::size_t k = 1; k <= N; ++k) EXPECT_EQ(law.prob(k), Rational(c[N][k]) / factorial(N)) << k;
    EXPECT_EQ(law.total(), Rational(1));
}

TEST(Exact, EllOneIsUniformUnderUniformWeights) {
    const auto law = ell1_law<Rational>(parse_model("uniform"), RestrictionSet::full(10));
    ASSERT_EQ(law.support.size(), 10u);
    for (const auto& p : law.probs) EXPECT_EQ(p, Rational(1, 10));
}

TEST(Exact, FallingFactorialMomentMatchesLaw) {
    const auto model = parse_model("ewens:theta=2");
    const auto A = parse_restriction("exclude:2").at(30);
    const auto law = ell1_law<Rational>(model, A);
    for (std::size_t b = 1; b <= 4; ++b) {
        Rational direct = 0;
        for (std::size_t i = 0; i < law.support.size(); ++i) {
            Rational f = 1;
            for (std::size_t j = 1; j <= b; ++j) f *= static_cast<long long>(law.support[i][0]) - static_cast<long long>(j);
            direct += f * law.probs[i];
        }
        EXPECT_EQ(ell1_falling_factorial_moment<Rational>(model, A, b), direct) << b;
    }
}

TEST(Exact, JointCountsAndBlockCountsAgreeWithBruteForce) {
    const auto model = parse_model("perturbed:theta=1,overrides=1:3;2:1/2");
    const auto A = RestrictionSet::full(9);
    auto joint = joint_cycle_count_law<Rational>(model, A, IndexSet({1, 2}));
    auto brute = brute_force_oracle(model, A, {Statistic::counts, IndexSet({1, 2}), 0});
    joint.canonicalize();
    brute.canonicalize();
    EXPECT_EQ(joint.support, brute.support);
    EXPECT_EQ(joint.probs, brute.probs);

    auto b = law_count_in<Rational>(model, A, IndexSet::range(1, 3));
    auto bb = brute_force_oracle(model, A, {Statistic::b_count, {}, 3});
    b.canonicalize();
    bb.canonicalize();
    EXPECT_EQ(b.support, bb.support);
    EXPECT_EQ(b.probs, bb.probs);
    EXPECT_THROW(joint_cycle_count_law<Rational>(model, RestrictionSet::excluding(9, IndexSet({2})), IndexSet({2})),
                 domain_error);
}

TEST(Exact, FloatTableTracksRationalTable) {
    const auto model = parse_model("perturbed:theta=3/2,overrides=1:3;2:1/2");
    const auto A = parse_restriction("odd").at(120);
    auto hq = h_table<Rational>(model, A);
    auto hd = h_table<double>(model, A);
    for (std::size_t n = 0; n <= 120; ++n) {
        const double q = to_double((*hq)[n]);
        if (q == 0.0) {
            EXPECT_EQ((*hd)[n], 0.0);
        } else {
            EXPECT_NEAR((*hd)[n] / q, 1.0, 1e-12) << n;
        }
    }
}

TEST(Exact, DegenerateMeasureIsReported) {
    const auto even3 = parse_restriction("even").at(3);
    EXPECT_EQ(brute_force_h_n(parse_model("uniform"), even3), Rational(0));
    EXPECT_THROW(law_T<Rational>(parse_model("uniform"), even3), degenerate_measure);
    EXPECT_THROW(ell1_law<double>(parse_model("uniform"), even3), degenerate_measure);
}

TEST(CharacteristicFunctions, CharTMatchesLawOfT) {
    const auto model = parse_model("ewens:theta=2");
    const auto A = parse_restriction("exclude:2").at(60);
    const auto law = law_T<double>(model, A);
    for (double s : {0.0, 0.3, -1.1, 2.5}) {
        Complex direct(0.0, 0.0);
        for (std::size_t i = 0; i < law.support.size(); ++i)
            direct += law.probs[i] * std::polar(1.0, s * static_cast<double>(law.support[i][0]));
        EXPECT_LT(std::abs(char_T(model, A, s) - direct), 1e-12) << s;
    }
    EXPECT_EQ(char_T(model, A, 0.0), Complex(1.0, 0.0));
}

TEST(CharacteristicFunctions, CharBMatchesBlockLaw) {
    const auto model = parse_model("uniform");
    const auto A = RestrictionSet::full(50);
    const IndexSet D = IndexSet::range(1, 7);
    const auto law = law_count_in<double>(model, A, D);
    for (double s : {0.4, -2.0}) {
        Complex direct(0.0, 0.0);
        for (std::size_t i = 0; i < law.support.size(); ++i)
            direct += law.probs[i] * std::polar(1.0, s * static_cast<double>(law.support[i][0]));
        EXPECT_LT(std::abs(char_B(model, A, {Block{D, s}}) - direct), 1e-12);
    }
    EXPECT_THROW(char_B(model, A, {Block{IndexSet({1, 2}), 0.1}, Block{IndexSet({2, 3}), 0.2}}), domain_error);
}

TEST(Cache, ConcurrentReadersSeeOneTable) {
    const auto model = parse_model("ewens:theta=7/3");
    const auto A = RestrictionSet::full(300);
    std::vector<std::shared_ptr<const std::vector<Rational>>> got(4);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < got.size(); ++i) pool.emplace_back([&, i] { got[i] = h_table<Rational>(model, A); });
    for (auto& t : pool) t.join();
    for (const auto& g : got) EXPECT_EQ(*g, *got[0]);
    EXPECT_EQ(h_n<Rational>(model, A), (*got[0])[300]);
}
