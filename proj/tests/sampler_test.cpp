#include <gtest/gtest.h>

#include <cmath>

#include "wperm/exact.hpp"
#include "wperm/harness.hpp"
#include "wperm/sampler.hpp"
#include "wperm/stats.hpp"

using namespace wperm;

namespace {

template <class Draw>
EmpiricalLaw collect(std::size_t draws, Draw&& draw) {
    EmpiricalLaw law;
    for (std::size_t i = 0; i < draws; ++i) law.add(draw().cycle_type());
    return law;
}

ExactLaw<double> exact_types(const WeightModel& model, const RestrictionSet& A) {
    return to_double_law(brute_force_oracle(model, A, {Statistic::cycle_type, {}, 0}));
}

}  // namespace

TEST(CycleCountVector, FromLengths) {
    const auto cv = CycleCountVector::from_lengths(10, {3, 1, 3, 2, 1});
    EXPECT_EQ(cv.count(1), 2u);
    EXPECT_EQ(cv.count(3), 2u);
    EXPECT_EQ(cv.count(5), 0u);
    EXPECT_EQ(cv.total(), 5u);
    EXPECT_EQ(cv.weighted_sum(), 10u);
    EXPECT_EQ(cv.count_between(2, 3), 3u);
    EXPECT_EQ(cv.ordered_lengths(), (std::vector<std::size_t>{3, 3, 2, 1, 1}));
    EXPECT_EQ(cv, CycleCountVector::from_lengths(10, {1, 1, 2, 3, 3}));
}

TEST(SequentialSampler, DegreeOne) {
    const SequentialSampler s(parse_model("uniform"), RestrictionSet::full(1));
    RngStream rng(1, 0);
    EXPECT_EQ(s.draw(rng).ordered_lengths(), (std::vector<std::size_t>{1}));
}

TEST(SequentialSampler, DrawsArePermutationsOfN) {
    for (const auto& model : builtin_models()) {
        for (const auto& fam : builtin_restrictions()) {
            for (std::size_t n : {7u, 150u, 600u}) {
                const auto A = fam.at(n);
                const SequentialSampler s(model, A);
                RngStream rng(3, n);
                for (int i = 0; i < 50; ++i) {
                    const auto cv = s.draw(rng);
                    ASSERT_EQ(cv.weighted_sum(), n);
                    for (std::size_t m : cv.ordered_lengths()) ASSERT_TRUE(A.contains(m)) << fam.spec << " " << m;
                }
            }
        }
    }
}

TEST(SequentialSampler, Deterministic) {
    const SequentialSampler s(parse_model("ewens:theta=2"), RestrictionSet::full(300));
    RngStream a(42, 9);
    RngStream b(42, 9);
    RngStream c(42, 10);
    bool differs = false;
    for (int i = 0; i < 20; ++i) {
        const auto x = s.draw(a);
        EXPECT_EQ(x, s.draw(b));
        differs = differs || !(x == s.draw(c));
    }
    EXPECT_TRUE(differs);
}

TEST(SequentialSampler, ChiSquareAgainstBruteForce) {
    for (const auto& model : builtin_models()) {
        for (const auto& fam : builtin_restrictions()) {
            for (std::size_t n : {5u, 8u}) {
                const auto A = fam.at(n);
                const SequentialSampler s(model, A);
                RngStream rng(11, n);
                const auto law = collect(100000, [&] { return s.draw(rng); });
                const auto res = chi_square(law, exact_types(model, A));
                EXPECT_GT(res.p_value, 1e-4) << model.spec() << " " << fam.spec << " n=" << n << " chi2=" << res.statistic;
            }
        }
    }
}

TEST(SequentialSampler, OddLengthsOnly) {
    const auto A = RestrictionSet::allowing(5, IndexSet({1, 3}));
    const SequentialSampler s(parse_model("uniform"), A);
    RngStream rng(5, 0);
    // types 1^5 (weight 1/120) and 3 1^2 (weight 1/6): probabilities 1/21 and 20/21
    const auto law = collect(100000, [&] { return s.draw(rng); });
    EXPECT_NEAR(law.prob({3, 1, 1}), 20.0 / 21.0, 4e-3);
    EXPECT_NEAR(law.prob({1, 1, 1, 1, 1}), 1.0 / 21.0, 4e-3);
}

TEST(SequentialSampler, DegenerateThrows) {
    EXPECT_THROW(SequentialSampler(parse_model("uniform"), parse_restriction("even").at(3)), degenerate_measure);
    EXPECT_NO_THROW(SequentialSampler(parse_model("uniform"), parse_restriction("odd").at(4)));
}

TEST(SequentialSampler, LargeDegreeFloatTable) {
    const SequentialSampler s(parse_model("uniform"), RestrictionSet::full(5000));
    RngStream rng(8, 0);
    std::vector<double> fixed_points;
    for (int i = 0; i < 4000; ++i) fixed_points.push_back(static_cast<double>(s.draw(rng).count(1)));
    // C_1 is close to Poisson(1)
    EXPECT_NEAR(mean(fixed_points), 1.0, 0.06);
    EXPECT_NEAR(variance(fixed_points), 1.0, 0.1);
}

TEST(ConditionedPoisson, TiltBelowRadius) {
    const double t = choose_tilt(parse_model("ewens:theta=2"), RestrictionSet::full(100));
    EXPECT_GT(t, 0.97);
    EXPECT_LT(t, 1.0);
    // the uniform sum of t^m over m <= n stays below n: the cap is used
    EXPECT_DOUBLE_EQ(choose_tilt(parse_model("uniform"), RestrictionSet::full(100)), 1.0 - 1.0 / 200.0);
}

TEST(ConditionedPoisson, ChiSquareAgainstBruteForce) {
    for (const auto& model : builtin_models()) {
        const auto A = RestrictionSet::full(8);
        ConditionedPoissonSampler s(model, A);
        RngStream rng(13, 0);
        const auto law = collect(50000, [&] { return s.draw(rng); });
        const auto res = chi_square(law, exact_types(model, A));
        EXPECT_GT(res.p_value, 1e-4) << model.spec();
        EXPECT_GT(s.stats().acceptance_rate(), 0.0);
    }
}

TEST(ConditionedPoisson, RestrictedSupport) {
    const auto A = parse_restriction("exclude:2").at(9);
    ConditionedPoissonSampler s(parse_model("ewens:theta=2"), A);
    RngStream rng(17, 0);
    for (int i = 0; i < 500; ++i) {
        const auto cv = s.draw(rng);
        ASSERT_EQ(cv.weighted_sum(), 9u);
        ASSERT_EQ(cv.count(2), 0u);
    }
}

TEST(Rng, PoissonMoments) {
    for (double mu : {0.3, 4.0, 55.0}) {
        RngStream rng(21, static_cast<std::uint64_t>(mu * 10));
        std::vector<double> xs;
        for (int i = 0; i < 40000; ++i) xs.push_back(static_cast<double>(rng.poisson(mu)));
        EXPECT_NEAR(mean(xs), mu, 5.0 * std::sqrt(mu / 40000.0));
        EXPECT_NEAR(variance(xs), mu, 0.05 * mu + 0.02);
    }
}

TEST(Rng, UniformRange) {
    RngStream rng(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open0();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(Gem, StickBreakingMoments) {
    RngStream rng(2, 2);
    std::vector<double> first;
    std::vector<double> largest;
    for (int i = 0; i < 40000; ++i) {
        const auto g = sample_gem(1.0, 60, rng);
        first.push_back(g.fragments[0]);
        largest.push_back(g.sorted[0]);
        ASSERT_TRUE(std::is_sorted(g.sorted.rbegin(), g.sorted.rend()));
    }
    EXPECT_NEAR(mean(first), 0.5, 0.006);
    // Golomb-Dickman constant
    EXPECT_NEAR(mean(largest), 0.6243299885, 0.005);
}
