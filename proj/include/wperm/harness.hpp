#pragma once

// Verification of the limit theorems against exact laws, asymptotic
// predictions and Monte Carlo. Every check returns a ComparisonReport whose
// verdict is a pure function of its recorded checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wperm/asymptotics.hpp"
#include "wperm/errors.hpp"
#include "wperm/exact.hpp"
#include "wperm/model.hpp"
#include "wperm/parallel.hpp"
#include "wperm/precise.hpp"
#include "wperm/sampler.hpp"
#include "wperm/stats.hpp"

namespace wperm {

enum class Verdict { pass, warn, fail };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::warn: return "warn";
        case Verdict::fail: return "fail";
    }
    return "?";
}

// One gated comparison. A failed soft check downgrades the verdict to warn.
struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=", ">=", "<", "==", "monotone"
    bool passed = false;
    bool soft = false;
};

struct ReportRow {
    std::size_t n = 0;
    std::string quantity;
    double exact = std::numeric_limits<double>::quiet_NaN();
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double empirical = std::numeric_limits<double>::quiet_NaN();
    double distance = std::numeric_limits<double>::quiet_NaN();
};

struct ComparisonReport {
    std::string check;
    std::string model;
    std::string restriction;
    std::vector<std::size_t> ladder;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<ReportRow> rows;
    std::map<std::string, double> metrics;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    Verdict verdict() const {
        bool warn = false;
        for (const auto& c : checks) {
            if (c.passed) continue;
            if (!c.soft) return Verdict::fail;
            warn = true;
        }
        return warn ? Verdict::warn : Verdict::pass;
    }
    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }

    void at_most(std::string name, double value, double threshold, bool soft = false) {
        checks.push_back({std::move(name), value, threshold, "<=", value <= threshold, soft});
    }
    void at_least(std::string name, double value, double threshold, bool soft = false) {
        checks.push_back({std::move(name), value, threshold, ">=", value >= threshold, soft});
    }
    void less_than(std::string name, double value, double threshold, bool soft = false) {
        checks.push_back({std::move(name), value, threshold, "<", value < threshold, soft});
    }
    void holds(std::string name, bool ok, bool soft = false) {
        checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok, soft});
    }

    // Strict decrease along a ladder of at least three rungs: one
    // non-monotone step gives a warning, more than one fails. With two rungs
    // this is a plain comparison.
    void decreasing(const std::string& name, const std::vector<double>& values) {
        if (values.size() < 2) return;
        if (values.size() == 2) {
            less_than(name + " (n=" + std::to_string(ladder.at(1)) + " vs n=" + std::to_string(ladder.at(0)) + ")",
                      values[1], values[0]);
            return;
        }
        std::size_t bad = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] < values[i - 1])) ++bad;
        Check c{name + " decreasing along ladder", static_cast<double>(bad), 0.0, "monotone", bad == 0, bad <= 1};
        checks.push_back(c);
    }
};

// Gating thresholds. Defaults mirror tests/fixtures/thresholds.json.
struct Thresholds {
    double chi2_alpha = 1e-3;
    double poisson_tv = 0.02;
    double clt_mean = 0.05;
    double clt_var_lo = 0.85;
    double clt_var_hi = 1.15;
    double pd_moment = 5e-3;
    double pd_mean = 0.01;
    double flt_var_band = 0.1;
    double flt_corr = 0.05;
    double tightness_slope = 1.6;
    double parity_corr = 0.05;
    double sampler_tv = 0.02;
    double hn_ratio = 0.75;
    double hn_float_rel = 1e-10;
};

struct McOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

enum class Centering { restriction_series, theta_log };

namespace detail {

// Stream ids: check tag in the top bits, degree in the middle, chunk below.
inline std::uint64_t stream_base(std::uint64_t tag, std::size_t n) {
    return (tag << 48) | (static_cast<std::uint64_t>(n) << 20);
}

// Draws `samples` permutations and returns one column per feature.
template <class Sampler, class Features>
std::vector<std::vector<double>> sample_columns(const Sampler& sampler, const McOptions& mc, std::uint64_t base,
                                                std::size_t n_features, Features features) {
    auto chunks = run_chunks(mc.samples, mc.seed, base, mc.threads,
                             [&](RngStream& rng, std::size_t begin, std::size_t end) {
                                 std::vector<double> rows;
                                 rows.reserve((end - begin) * n_features);
                                 for (std::size_t i = begin; i < end; ++i) {
                                     const CycleCountVector cv = sampler.draw(rng);
                                     if (cv.weighted_sum() != cv.n()) throw sampling_error("draw violates sum m C_m = n");
                                     features(cv, rows);
                                 }
                                 return rows;
                             });
    std::vector<std::vector<double>> cols(n_features);
    for (auto& c : cols) c.reserve(mc.samples);
    for (const auto& rows : chunks)
        for (std::size_t i = 0; i < rows.size(); ++i) cols[i % n_features].push_back(rows[i]);
    return cols;
}

inline double sum_allowed_over_m(const WeightModel& model, const RestrictionSet& A, std::size_t lo, std::size_t hi,
                                 int parity = -1) {
    double s = 0.0;
    for (std::size_t m = std::max<std::size_t>(lo, 1); m <= std::min(hi, A.n()); ++m) {
        if (!A.contains(m)) continue;
        if (parity >= 0 && static_cast<int>(m % 2) != parity) continue;
        s += model.theta_normalized(m) / static_cast<double>(m);
    }
    return s;
}

template <class T>
bool laws_equal(ExactLaw<T> a, ExactLaw<T> b) {
    a.canonicalize();
    b.canonicalize();
    return a.support == b.support && a.probs == b.probs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact-side checks.

inline std::vector<WeightModel> builtin_models() {
    return {parse_model("uniform"), parse_model("ewens:theta=2"),
            parse_model("perturbed:theta=1,overrides=1:3;2:1/2")};
}

inline std::vector<RestrictionFamily> builtin_restrictions() {
    return {parse_restriction("full"), parse_restriction("odd"), parse_restriction("exclude:2")};
}

// Series laws (h_n, T, C_1, ell_1) against the partition brute force,
// rational arithmetic, every model x restriction x n <= n_max.
inline ComparisonReport verify_exactness(const std::vector<WeightModel>& models,
                                         const std::vector<RestrictionFamily>& families, std::size_t n_max) {
    ComparisonReport rep;
    rep.check = "exactness";
    for (std::size_t n = 1; n <= n_max; ++n) rep.ladder.push_back(n);
    std::size_t compared = 0;
    std::size_t mismatches = 0;
    auto tally = [&](bool ok, const std::string& what) {
        ++compared;
        if (!ok) {
            ++mismatches;
            rep.notes.push_back("mismatch: " + what);
        }
    };
    for (const auto& model : models) {
        for (const auto& fam : families) {
            for (std::size_t n = 1; n <= n_max; ++n) {
                const RestrictionSet A = fam.at(n);
                const std::string where = model.spec() + " / " + fam.spec + " / n=" + std::to_string(n);
                const Rational brute_h = brute_force_h_n(model, A);
                tally((*h_table<Rational>(model, A))[n] == brute_h, "h_n table " + where);
                tally(h_n<Rational>(model, A) == brute_h, "h_n series " + where);
                if (brute_h == 0) continue;
                tally(detail::laws_equal(law_T<Rational>(model, A),
                                         brute_force_oracle(model, A, {Statistic::total, {}, 0})),
                      "T " + where);
                const auto brute_c1 = brute_force_oracle(model, A, {Statistic::counts, IndexSet({1}), 0});
                if (A.contains(1)) {
                    tally(detail::laws_equal(joint_cycle_count_law<Rational>(model, A, IndexSet({1})), brute_c1),
                          "C_1 " + where);
                } else {
                    ExactLaw<Rational> zero;
                    zero.add(Outcome{0}, Rational(1));
                    tally(detail::laws_equal(zero, brute_c1), "C_1 " + where);
                }
                tally(detail::laws_equal(ell1_law<Rational>(model, A),
                                         brute_force_oracle(model, A, {Statistic::ell1, {}, 0})),
                      "ell_1 " + where);
            }
        }
    }
    rep.metrics["comparisons"] = static_cast<double>(compared);
    rep.metrics["mismatches"] = static_cast<double>(mismatches);
    rep.holds("series laws equal brute force exactly", mismatches == 0 && compared > 0);
    return rep;
}

// h_n against the rising-factorial closed form (vartheta)_n / n! for an Ewens
// model: exactly in rationals up to n_rational, to a relative tolerance in
// floats up to n_float.
inline ComparisonReport verify_hn_closed_form(const Rational& vartheta, std::size_t n_rational, std::size_t n_float,
                                              const Thresholds& th = {}) {
    ComparisonReport rep;
    const WeightModel model = WeightModel::ewens(vartheta);
    rep.check = "hn-closed-form";
    rep.model = model.spec();
    rep.restriction = "full";
    rep.ladder = {n_rational, n_float};
    auto hq = h_table<Rational>(model, RestrictionSet::full(n_rational));
    Rational closed = 1;
    bool exact_ok = true;
    for (std::size_t n = 0; n <= n_rational; ++n) {
        if (n > 0) closed *= (vartheta + Rational(static_cast<long long>(n - 1))) / Rational(static_cast<long long>(n));
        if ((*hq)[n] != closed) exact_ok = false;
    }
    rep.holds("rational h_n == (vartheta)_n/n! for n <= " + std::to_string(n_rational), exact_ok);

    auto hd = h_table<double>(model, RestrictionSet::full(n_float));
    double worst = 0.0;
    double log_closed = 0.0;
    const double vt = to_double(vartheta);
    const double log_r = std::log(model.r());
    for (std::size_t n = 0; n <= n_float; ++n) {
        if (n > 0) log_closed += std::log((vt + static_cast<double>(n - 1)) / static_cast<double>(n));
        const double expect = std::exp(log_closed + static_cast<double>(n) * log_r);
        worst = std::max(worst, std::abs((*hd)[n] - expect) / expect);
    }
    rep.rows.push_back({n_float, "max relative error (float)", std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), worst});
    rep.metrics["float_max_rel_error"] = worst;
    rep.at_most("float relative error for n <= " + std::to_string(n_float), worst, th.hn_float_rel);
    return rep;
}

// Relative error of the h_n leading term along a ladder; the ratio of
// consecutive errors must average at most th.hn_ratio. Built-in models are
// measured at high precision (the error can sit far below double
// resolution) and the float predict_h_n is checked against that leading term.
inline ComparisonReport verify_hn_asymptotics(const WeightModel& model, const RestrictionFamily& family,
                                              const std::vector<std::size_t>& ladder, const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "hn-asymptotics";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = ladder;
    const bool precise = supports_precise(model);
    std::vector<double> log_errs;
    double float_gap = 0.0;
    for (std::size_t n : ladder) {
        const RestrictionSet A = family.at(n);
        const double exact = (*h_table<double>(model, A))[n];
        const Prediction p = predict_h_n(model, A);
        const double pred = p.value.real();
        double log_err = std::log10(std::abs(pred - exact) / std::abs(exact));
        if (precise) {
            log_err = precise_h_n_log10_error(model, A);
            const double lead = static_cast<double>(precise_h_n_prediction(model, A));
            float_gap = std::max(float_gap, std::abs(pred - lead) / lead);
            rep.metrics["log10_error_n" + std::to_string(n)] = log_err;
        }
        log_errs.push_back(log_err);
        rep.rows.push_back({n, "r^n h_n", exact, pred, std::numeric_limits<double>::quiet_NaN(), std::pow(10.0, log_err)});
        for (const auto& w : p.warnings) rep.notes.push_back("n=" + std::to_string(n) + ": " + w);
    }
    double ratio_sum = 0.0;
    for (std::size_t i = 1; i < log_errs.size(); ++i) ratio_sum += std::pow(10.0, log_errs[i] - log_errs[i - 1]);
    const double avg = log_errs.size() > 1 ? ratio_sum / static_cast<double>(log_errs.size() - 1) : 0.0;
    rep.metrics["average_error_ratio"] = avg;
    if (precise) {
        rep.notes.push_back("errors measured with " + std::to_string(std::numeric_limits<Precise>::digits10) +
                            "-digit arithmetic");
        rep.metrics["float_vs_precise_leading_term"] = float_gap;
        rep.at_most("float predict_h_n vs precise leading term", float_gap, th.hn_float_rel);
    }
    rep.decreasing("log10 relative error", log_errs);
    rep.at_most("average consecutive error ratio", avg, th.hn_ratio);
    return rep;
}

// TV distance between the exact joint law of (C_m)_{m in M} and the product
// of Poisson(theta_m r^m / m) laws.
inline ComparisonReport verify_poisson_cycle_counts(const WeightModel& model, const RestrictionFamily& family,
                                                    const IndexSet& M, const std::vector<std::size_t>& ladder,
                                                    const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "poisson";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = ladder;
    std::vector<double> mu;
    for (std::size_t m : M) mu.push_back(model.theta_normalized(m) / static_cast<double>(m));
    std::vector<double> tvs;
    std::vector<double> log_tvs;
    // one marked length on a built-in model: measured at high precision
    const bool precise = M.size() == 1 && supports_precise(model);
    for (std::size_t n : ladder) {
        const RestrictionSet A = family.at(n);
        for (std::size_t m : M)
            if (!A.contains(m)) throw domain_error("M escapes A_n at n = " + std::to_string(n));
        const auto law = joint_cycle_count_law<double>(model, A, M);
        double diff = 0.0;
        double q_on_support = 0.0;
        std::vector<std::map<std::size_t, double>> marginals(M.size());
        for (std::size_t i = 0; i < law.support.size(); ++i) {
            double q = 1.0;
            for (std::size_t j = 0; j < M.size(); ++j) {
                q *= poisson_pmf(law.support[i][j], mu[j]);
                marginals[j][law.support[i][j]] += law.probs[i];
            }
            diff += std::abs(law.probs[i] - q);
            q_on_support += q;
        }
        double tv = 0.5 * (diff + std::max(0.0, 1.0 - q_on_support));
        if (precise) {
            const double log_tv = precise_poisson_log10_tv(model, A, M.members().front());
            rep.metrics["log10_tv_n" + std::to_string(n)] = log_tv;
            tv = std::pow(10.0, log_tv);
            log_tvs.push_back(log_tv);
        }
        tvs.push_back(tv);
        rep.rows.push_back({n, "TV(C_M, Poisson)", law.mean(), mu.front(), std::numeric_limits<double>::quiet_NaN(), tv});
        if (M.size() >= 2) {
            double d = 0.0;
            for (std::size_t i = 0; i < law.support.size(); ++i) {
                double prod = 1.0;
                for (std::size_t j = 0; j < M.size(); ++j) prod *= marginals[j][law.support[i][j]];
                d += std::abs(law.probs[i] - prod);
            }
            rep.metrics["tv_product_n" + std::to_string(n)] = 0.5 * d;
        }
    }
    rep.metrics["tv_last"] = tvs.back();
    for (std::size_t i = 0; i < ladder.size(); ++i)
        rep.at_most("TV at n=" + std::to_string(ladder[i]), tvs[i], th.poisson_tv);
    if (precise) {
        rep.notes.push_back("TV measured with " + std::to_string(std::numeric_limits<Precise>::digits10) +
                            "-digit arithmetic");
        rep.decreasing("log10 TV", log_tvs);
    } else {
        rep.decreasing("TV", tvs);
    }
    return rep;
}

// max_s |char_T(s) exp(-(e^{is}-1) lambda_n) - Gamma(vartheta)/Gamma(vartheta e^{is})|.
inline double mod_poisson_deviation(const WeightModel& model, const RestrictionSet& A,
                                    const std::vector<double>& s_grid) {
    const double lambda = mod_poisson_parameter(model, A);
    double worst = 0.0;
    for (double s : s_grid) {
        const Complex residue = char_T(model, A, s) * std::exp(-(std::polar(1.0, s) - 1.0) * lambda);
        worst = std::max(worst, std::abs(residue - mod_poisson_limit(model.vartheta(), s)));
    }
    return worst;
}

inline std::vector<double> symmetric_grid(double half_width, std::size_t points) {
    std::vector<double> g;
    for (std::size_t i = 0; i < points; ++i)
        g.push_back(-half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
}

inline ComparisonReport verify_mod_poisson_T(const WeightModel& model, const RestrictionFamily& family,
                                             const std::vector<std::size_t>& ladder,
                                             const std::vector<double>& s_grid) {
    ComparisonReport rep;
    rep.check = "modpoisson";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = ladder;
    std::vector<double> devs;
    for (std::size_t n : ladder) {
        const RestrictionSet A = family.at(n);
        const double d = mod_poisson_deviation(model, A, s_grid);
        devs.push_back(d);
        rep.rows.push_back({n, "max |residue - limit|", std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), d});
    }
    rep.decreasing("max residue deviation", devs);
    return rep;
}

// ---------------------------------------------------------------------------
// Monte Carlo checks.

// Standardized T = (T - center) / sqrt(vartheta log n). Mean and variance use
// the first mc.samples draws; the KS distance uses ks_samples draws (at least
// mc.samples) to resolve the ladder trend.
inline ComparisonReport verify_clt_T(const WeightModel& model, const RestrictionFamily& family,
                                     const std::vector<std::size_t>& ladder, const McOptions& mc,
                                     std::size_t ks_samples = 0, Centering centering = Centering::restriction_series,
                                     const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "clt";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = ladder;
    rep.seed = mc.seed;
    rep.samples = mc.samples;
    ks_samples = std::max(ks_samples, mc.samples);
    std::vector<double> ks;
    double last_mean = 0.0;
    double last_var = 0.0;
    for (std::size_t n : ladder) {
        const RestrictionSet A = family.at(n);
        const SequentialSampler sampler(model, A);
        McOptions opts = mc;
        opts.samples = ks_samples;
        const double logn = std::log(static_cast<double>(n));
        const double center = centering == Centering::restriction_series
                                  ? detail::sum_allowed_over_m(model, A, 1, n)
                                  : model.vartheta() * logn;
        const double sd = std::sqrt(model.vartheta() * logn);
        auto cols = detail::sample_columns(sampler, opts, detail::stream_base(1, n), 1,
                                           [&](const CycleCountVector& cv, std::vector<double>& out) {
                                               out.push_back((static_cast<double>(cv.total()) - center) / sd);
                                           });
        const std::vector<double> head(cols[0].begin(), cols[0].begin() + static_cast<std::ptrdiff_t>(mc.samples));
        last_mean = mean(head);
        last_var = variance(head);
        const double d = ks_normal(cols[0]);
        ks.push_back(d);
        rep.rows.push_back({n, "standardized T", 0.0, 1.0, last_mean, d});
        rep.metrics["mean_n" + std::to_string(n)] = last_mean;
        rep.metrics["var_n" + std::to_string(n)] = last_var;
        rep.metrics["ks_n" + std::to_string(n)] = d;
    }
    rep.metrics["ks_samples"] = static_cast<double>(ks_samples);
    rep.at_most("|mean| at n=" + std::to_string(ladder.back()), std::abs(last_mean), th.clt_mean);
    rep.at_least("variance lower bound", last_var, th.clt_var_lo);
    rep.at_most("variance upper bound", last_var, th.clt_var_hi);
    rep.decreasing("KS distance", ks);
    return rep;
}

struct GemOracle {
    std::vector<std::vector<double>> marginals;  // j-th largest fragment samples
    double largest_mean = 0.0;
    double largest_se = 0.0;
};

inline GemOracle gem_oracle(double vartheta, std::size_t depth, std::size_t draws, std::uint64_t seed,
                            unsigned threads = 0) {
    const std::size_t stick_depth = std::max<std::size_t>(depth, static_cast<std::size_t>(std::ceil(40.0 * vartheta)) + 10);
    auto chunks = run_chunks(draws, seed, detail::stream_base(7, 0), threads,
                             [&](RngStream& rng, std::size_t begin, std::size_t end) {
                                 std::vector<double> rows;
                                 for (std::size_t i = begin; i < end; ++i) {
                                     const GemDraw g = sample_gem(vartheta, stick_depth, rng);
                                     rows.insert(rows.end(), g.sorted.begin(), g.sorted.begin() + static_cast<std::ptrdiff_t>(depth));
                                 }
                                 return rows;
                             });
    GemOracle out;
    out.marginals.resize(depth);
    for (const auto& rows : chunks)
        for (std::size_t i = 0; i < rows.size(); ++i) out.marginals[i % depth].push_back(rows[i]);
    out.largest_mean = mean(out.marginals[0]);
    out.largest_se = standard_error(out.marginals[0]);
    return out;
}

// (a) exact moments of ell_1/n against the Beta(1, vartheta) moments;
// (b) sampled ell^(j)/n against stick-breaking Poisson-Dirichlet marginals.
inline ComparisonReport verify_pd_large_cycles(const WeightModel& model, const RestrictionFamily& family,
                                               std::size_t n_exact, std::size_t n_mc, const McOptions& mc,
                                               std::size_t depth = 3, std::size_t gem_draws = 1000000,
                                               const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "pd";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = {n_exact, n_mc};
    rep.seed = mc.seed;
    rep.samples = mc.samples;

    const auto law = ell1_law<double>(model, family.at(n_exact));
    double worst = 0.0;
    for (unsigned b = 0; b <= 4; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < law.support.size(); ++i)
            m += law.probs[i] * std::pow(static_cast<double>(law.support[i][0]) / static_cast<double>(n_exact), b);
        const double lim = pd_moment_limit(model.vartheta(), b);
        const double dev = std::abs(m - lim);
        if (b >= 1) worst = std::max(worst, dev);
        rep.rows.push_back({n_exact, "E[(l1/n)^" + std::to_string(b) + "]", m, lim,
                            std::numeric_limits<double>::quiet_NaN(), dev});
    }
    rep.at_most("max moment deviation b=1..4 at n=" + std::to_string(n_exact), worst, th.pd_moment);

    const SequentialSampler sampler(model, family.at(n_mc));
    auto cols = detail::sample_columns(sampler, mc, detail::stream_base(2, n_mc), depth,
                                       [&](const CycleCountVector& cv, std::vector<double>& out) {
                                           const auto lengths = cv.ordered_lengths();
                                           for (std::size_t j = 0; j < depth; ++j)
                                               out.push_back(j < lengths.size()
                                                                 ? static_cast<double>(lengths[j]) / static_cast<double>(n_mc)
                                                                 : 0.0);
                                       });
    const GemOracle oracle = gem_oracle(model.vartheta(), depth, gem_draws, mc.seed, mc.threads);
    const double emp = mean(cols[0]);
    rep.rows.push_back({n_mc, "E[l(1)/n]", std::numeric_limits<double>::quiet_NaN(), oracle.largest_mean, emp,
                        std::abs(emp - oracle.largest_mean)});
    rep.metrics["empirical_largest_mean"] = emp;
    rep.metrics["empirical_largest_se"] = standard_error(cols[0]);
    rep.metrics["oracle_largest_mean"] = oracle.largest_mean;
    rep.metrics["oracle_largest_se"] = oracle.largest_se;
    rep.metrics["oracle_draws"] = static_cast<double>(gem_draws);
    rep.at_most("|E[l(1)/n] - oracle| at n=" + std::to_string(n_mc), std::abs(emp - oracle.largest_mean), th.pd_mean);
    for (std::size_t j = 0; j < depth; ++j) {
        const double d = ks_two_sample(cols[j], oracle.marginals[j]);
        const double crit = ks_critical(th.chi2_alpha, cols[j].size(), oracle.marginals[j].size()) +
                            1.0 / static_cast<double>(n_mc);
        rep.metrics["ks_l" + std::to_string(j + 1)] = d;
        rep.rows.push_back({n_mc, "KS l(" + std::to_string(j + 1) + ")/n vs PD", std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), d});
        rep.at_most("KS of l(" + std::to_string(j + 1) + ")/n vs PD marginal", d, crit, true);
    }
    return rep;
}

namespace detail {

inline std::size_t count_up_to(const CycleCountVector& cv, std::size_t cap, int parity = -1) {
    std::size_t c = 0;
    for (const auto& [m, k] : cv.entries()) {
        if (m > cap) break;
        if (parity >= 0 && static_cast<int>(m % 2) != parity) continue;
        c += k;
    }
    return c;
}

}  // namespace detail

struct FltOptions {
    std::vector<double> x_grid{0.25, 0.5, 0.75};
    // measured and reported, not gated
    std::vector<double> x_report{};
    // increments (x0, x1] and (x1, x2]
    double inc_x0 = 0.0;
    double inc_x1 = 0.4;
    double inc_x2 = 0.9;
    // tightness triples (c - delta/2, c, c + delta/2)
    double tight_center = 0.5;
    std::vector<double> tight_deltas{0.4, 0.2, 0.1, 0.05};
    Centering centering = Centering::restriction_series;
};

// Functional CLT for B_n(x) under a full or tail restriction. `a` is the
// tail exponent (0 for the full measure): the limit variance is max(x-a, 0).
inline ComparisonReport verify_flt_core(const std::string& name, const WeightModel& model,
                                        const RestrictionFamily& family, double a, std::size_t n,
                                        const McOptions& mc, const FltOptions& opt, bool gate_increments,
                                        const Thresholds& th) {
    ComparisonReport rep;
    rep.check = name;
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = {n};
    rep.seed = mc.seed;
    rep.samples = mc.samples;
    const RestrictionSet A = family.at(n);
    const double logn = std::log(static_cast<double>(n));
    const double sd = std::sqrt(model.vartheta() * logn);

    std::vector<double> xs = opt.x_grid;
    const std::size_t gated = xs.size();
    xs.insert(xs.end(), opt.x_report.begin(), opt.x_report.end());
    const std::size_t inc_at = xs.size();
    xs.insert(xs.end(), {opt.inc_x0, opt.inc_x1, opt.inc_x2});
    const std::size_t tight_at = xs.size();
    for (double d : opt.tight_deltas) xs.insert(xs.end(), {opt.tight_center - d / 2, opt.tight_center, opt.tight_center + d / 2});

    std::vector<std::size_t> caps;
    std::vector<double> centers;
    for (double x : xs) {
        const std::size_t cap = detail::floor_pow(n, x);
        caps.push_back(cap);
        centers.push_back(opt.centering == Centering::restriction_series
                              ? detail::sum_allowed_over_m(model, A, 1, cap)
                              : std::max(x - a, 0.0) * model.vartheta() * logn);
    }
    const SequentialSampler sampler(model, A);
    auto cols = detail::sample_columns(sampler, mc, detail::stream_base(3 + static_cast<std::uint64_t>(a * 1000), n),
                                       xs.size(), [&](const CycleCountVector& cv, std::vector<double>& out) {
                                           for (std::size_t i = 0; i < xs.size(); ++i)
                                               out.push_back((static_cast<double>(detail::count_up_to(cv, caps[i])) - centers[i]) / sd);
                                       });
    for (std::size_t i = 0; i < inc_at; ++i) {
        const double x = xs[i];
        const double target = std::max(x - a, 0.0);
        const double v = variance(cols[i]);
        const double m = mean(cols[i]);
        std::ostringstream xs_str;
        xs_str << x;
        std::ostringstream label;
        label << "|Var B(" << x << ") - " << target << "|";
        rep.rows.push_back({n, "Var B(" + xs_str.str() + ")", std::numeric_limits<double>::quiet_NaN(), target, v,
                            std::abs(v - target)});
        rep.metrics["mean_x" + xs_str.str()] = m;
        rep.metrics["var_x" + xs_str.str()] = v;
        if (i < gated) rep.at_most(label.str(), std::abs(v - target), th.flt_var_band);
    }
    if (gate_increments) {
        std::vector<double> d1(mc.samples);
        std::vector<double> d2(mc.samples);
        for (std::size_t k = 0; k < mc.samples; ++k) {
            d1[k] = cols[inc_at + 1][k] - cols[inc_at][k];
            d2[k] = cols[inc_at + 2][k] - cols[inc_at + 1][k];
        }
        const double corr = correlation(d1, d2);
        rep.metrics["increment_correlation"] = corr;
        rep.at_most("|corr| of disjoint increments", std::abs(corr), th.flt_corr);

        std::vector<double> deltas;
        std::vector<double> stats;
        for (std::size_t t = 0; t < opt.tight_deltas.size(); ++t) {
            const auto& lo = cols[tight_at + 3 * t];
            const auto& mid = cols[tight_at + 3 * t + 1];
            const auto& hi = cols[tight_at + 3 * t + 2];
            double acc = 0.0;
            for (std::size_t k = 0; k < mc.samples; ++k) {
                const double u = mid[k] - lo[k];
                const double w = hi[k] - mid[k];
                acc += u * u * w * w;
            }
            const double stat = acc / static_cast<double>(mc.samples);
            deltas.push_back(opt.tight_deltas[t]);
            stats.push_back(stat);
            rep.rows.push_back({n, "tightness moment, delta=" + std::to_string(opt.tight_deltas[t]),
                                std::numeric_limits<double>::quiet_NaN(), opt.tight_deltas[t] * opt.tight_deltas[t] / 4,
                                stat, std::numeric_limits<double>::quiet_NaN()});
        }
        const double slope = loglog_slope(deltas, stats);
        rep.metrics["tightness_slope"] = slope;
        rep.at_least("tightness log-log slope", slope, th.tightness_slope);
    }
    return rep;
}

inline ComparisonReport verify_flt(const WeightModel& model, const RestrictionFamily& family, std::size_t n,
                                   const McOptions& mc, const FltOptions& opt = {}, const Thresholds& th = {}) {
    return verify_flt_core("flt", model, family, 0.0, n, mc, opt, true, th);
}

// A_n = {ceil(n^a), ..., n}; variance profile max(x - a, 0).
inline ComparisonReport verify_flt_restricted(const WeightModel& model, double a, std::size_t n, const McOptions& mc,
                                              FltOptions opt = {}, const Thresholds& th = {}) {
    std::ostringstream spec;
    spec << "tail:a=" << a;
    const RestrictionFamily family = parse_restriction(spec.str());
    return verify_flt_core("flt-restricted", model, family, a, n, mc, opt, false, th);
}

// Exact parity characteristic function E[exp(i s1 B_ev(1) + i s2 B_odd(1))].
inline Complex parity_char_exact(const WeightModel& model, std::size_t n, double s1, double s2) {
    const Complex e1 = std::polar(1.0, s1);
    const Complex e2 = std::polar(1.0, s2);
    const double hn = (*h_table<double>(model, RestrictionSet::full(n)))[n];
    return exact_scaled_coefficient(model, n, 0.5 * (e1 + e2), {}, 0, 0.5 * (e1 - e2)) / hn;
}

struct ParityOptions {
    std::vector<std::size_t> exact_ladder{250, 500};
    double s_max = std::numbers::pi / 4;
    std::size_t s_points = 5;
    Centering centering = Centering::restriction_series;
};

// Even/odd cycle counts under the full measure: Monte Carlo correlation at
// x = 1 and the exact joint characteristic function against the
// two-singularity prediction.
inline ComparisonReport verify_flt_parity(const WeightModel& model, std::size_t n, const McOptions& mc,
                                          const ParityOptions& opt = {}, const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "flt-parity";
    rep.model = model.spec();
    rep.restriction = "full";
    rep.ladder = opt.exact_ladder;
    rep.seed = mc.seed;
    rep.samples = mc.samples;

    const std::vector<double> grid = symmetric_grid(opt.s_max, opt.s_points);
    std::vector<double> errs;
    for (std::size_t m : opt.exact_ladder) {
        double worst = 0.0;
        for (double s1 : grid) {
            for (double s2 : grid) {
                const Complex ex = parity_char_exact(model, m, s1, s2);
                const Prediction p = predict_parity_char(model, m, s1, s2);
                worst = std::max(worst, std::abs(ex - p.value));
            }
        }
        errs.push_back(worst);
        rep.rows.push_back({m, "max |parity char - prediction|", std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), worst});
    }
    rep.decreasing("parity char error", errs);

    const RestrictionSet A = RestrictionSet::full(n);
    const double logn = std::log(static_cast<double>(n));
    const double sd = std::sqrt(0.5 * model.vartheta() * logn);
    const std::vector<double> xs{0.5, 1.0};
    std::vector<std::size_t> caps;
    std::vector<double> centers;
    for (double x : xs) {
        const std::size_t cap = detail::floor_pow(n, x);
        caps.push_back(cap);
        for (int parity : {0, 1}) {
            centers.push_back(opt.centering == Centering::restriction_series
                                  ? detail::sum_allowed_over_m(model, A, 1, cap, parity)
                                  : x * 0.5 * model.vartheta() * logn);
        }
    }
    const SequentialSampler sampler(model, A);
    auto cols = detail::sample_columns(sampler, mc, detail::stream_base(5, n), 2 * xs.size(),
                                       [&](const CycleCountVector& cv, std::vector<double>& out) {
                                           for (std::size_t i = 0; i < xs.size(); ++i)
                                               for (int parity : {0, 1})
                                                   out.push_back((static_cast<double>(detail::count_up_to(cv, caps[i], parity)) -
                                                                  centers[2 * i + static_cast<std::size_t>(parity)]) / sd);
                                       });
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::ostringstream tag;
        tag << xs[i];
        rep.metrics["var_even_x" + tag.str()] = variance(cols[2 * i]);
        rep.metrics["var_odd_x" + tag.str()] = variance(cols[2 * i + 1]);
    }
    const double corr = correlation(cols[2], cols[3]);
    rep.metrics["corr_even_odd_x1"] = corr;
    rep.at_most("|corr(B_ev(1), B_odd(1))|", std::abs(corr), th.parity_corr);
    return rep;
}

// Sequential vs conditioned-Poisson samplers: TV between empirical cycle-type
// laws and chi-square of each against the exact law.
inline ComparisonReport verify_samplers(const WeightModel& model, const RestrictionFamily& family, std::size_t n,
                                        const McOptions& mc, const Thresholds& th = {}) {
    ComparisonReport rep;
    rep.check = "samplers";
    rep.model = model.spec();
    rep.restriction = family.spec;
    rep.ladder = {n};
    rep.seed = mc.seed;
    rep.samples = mc.samples;
    const RestrictionSet A = family.at(n);
    const ExactLaw<double> exact = to_double_law(brute_force_oracle(model, A, {Statistic::cycle_type, {}, 0}));

    const SequentialSampler seq(model, A);
    const double tilt = choose_tilt(model, A);
    auto collect = [&](auto make_draw, std::uint64_t tag) {
        auto chunks = run_chunks(mc.samples, mc.seed, detail::stream_base(tag, n), mc.threads,
                                 [&](RngStream& rng, std::size_t begin, std::size_t end) {
                                     auto draw = make_draw();
                                     EmpiricalLaw law;
                                     for (std::size_t i = begin; i < end; ++i) {
                                         const CycleCountVector cv = draw(rng);
                                         if (cv.weighted_sum() != n) throw sampling_error("draw violates sum m C_m = n");
                                         law.add(cv.cycle_type());
                                     }
                                     return law;
                                 });
        EmpiricalLaw out;
        for (const auto& c : chunks) out.merge(c);
        return out;
    };
    const EmpiricalLaw seq_law = collect([&] { return [&](RngStream& rng) { return seq.draw(rng); }; }, 10);
    const EmpiricalLaw cp_law = collect(
        [&] {
            return [cp = ConditionedPoissonSampler(model, A, tilt)](RngStream& rng) mutable { return cp.draw(rng); };
        },
        11);
    const double tv = tv_distance(as_map(seq_law), as_map(cp_law));
    const auto chi_seq = chi_square(seq_law, exact);
    const auto chi_cp = chi_square(cp_law, exact);
    rep.metrics["tilt"] = tilt;
    rep.metrics["tv_seq_cp"] = tv;
    rep.metrics["tv_seq_exact"] = tv_distance(as_map(seq_law), as_map(exact));
    rep.metrics["tv_cp_exact"] = tv_distance(as_map(cp_law), as_map(exact));
    rep.metrics["chi2_seq"] = chi_seq.statistic;
    rep.metrics["chi2_seq_p"] = chi_seq.p_value;
    rep.metrics["chi2_cp"] = chi_cp.statistic;
    rep.metrics["chi2_cp_p"] = chi_cp.p_value;
    rep.metrics["chi2_dof"] = static_cast<double>(chi_seq.dof);
    rep.rows.push_back({n, "TV(sequential, conditioned Poisson)", std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), tv});
    rep.at_most("TV between samplers", tv, th.sampler_tv);
    rep.at_least("chi-square p (sequential)", chi_seq.p_value, th.chi2_alpha);
    rep.at_least("chi-square p (conditioned Poisson)", chi_cp.p_value, th.chi2_alpha);
    return rep;
}

}  // namespace wperm
