#pragma once

// Distances and summary statistics used by the verification harness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "wperm/errors.hpp"
#include "wperm/exact.hpp"

namespace wperm {

// Empirical law of outcomes: counts per outcome.
class EmpiricalLaw {
public:
    void add(const Outcome& o, std::size_t k = 1) {
        counts_[o] += k;
        total_ += k;
    }
    void merge(const EmpiricalLaw& other) {
        for (const auto& [o, c] : other.counts_) counts_[o] += c;
        total_ += other.total_;
    }
    std::size_t total() const noexcept { return total_; }
    const std::map<Outcome, std::size_t>& counts() const noexcept { return counts_; }
    double prob(const Outcome& o) const {
        auto it = counts_.find(o);
        return (it == counts_.end() || total_ == 0) ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_);
    }

private:
    std::map<Outcome, std::size_t> counts_;
    std::size_t total_ = 0;
};

// Total variation between two laws on a countable set, by exact summation
// over the merged support.
inline double tv_distance(const std::map<Outcome, double>& p, const std::map<Outcome, double>& q) {
    double acc = 0.0;
    for (const auto& [o, pv] : p) {
        auto it = q.find(o);
        acc += std::abs(pv - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [o, qv] : q)
        if (!p.count(o)) acc += std::abs(qv);
    return 0.5 * acc;
}

inline std::map<Outcome, double> as_map(const ExactLaw<double>& law) {
    std::map<Outcome, double> out;
    for (std::size_t i = 0; i < law.support.size(); ++i) out[law.support[i]] += law.probs[i];
    return out;
}

inline std::map<Outcome, double> as_map(const EmpiricalLaw& law) {
    std::map<Outcome, double> out;
    for (const auto& [o, c] : law.counts()) out[o] = static_cast<double>(c) / static_cast<double>(law.total());
    return out;
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;
};

inline double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

// Pearson goodness of fit against an exact law. Outcomes whose expected count
// falls below min_expected are pooled into one bin.
inline ChiSquareResult chi_square(const EmpiricalLaw& observed, const ExactLaw<double>& expected,
                                  double min_expected = 5.0) {
    const double N = static_cast<double>(observed.total());
    if (N == 0) throw domain_error("chi_square: no observations");
    ChiSquareResult res;
    double pooled_e = 0.0;
    double pooled_o = 0.0;
    double seen_e = 0.0;
    double seen_o = 0.0;
    for (std::size_t i = 0; i < expected.support.size(); ++i) {
        const double e = N * expected.probs[i];
        auto it = observed.counts().find(expected.support[i]);
        const double o = it == observed.counts().end() ? 0.0 : static_cast<double>(it->second);
        seen_e += e;
        seen_o += o;
        if (e < min_expected) {
            pooled_e += e;
            pooled_o += o;
            continue;
        }
        res.statistic += (o - e) * (o - e) / e;
        ++res.bins;
    }
    // observations outside the exact support count against the pooled bin
    pooled_o += N - seen_o;
    pooled_e += std::max(0.0, N - seen_e);
    if (pooled_e > 0.0) {
        res.statistic += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++res.bins;
    } else if (pooled_o > 0.0) {
        res.statistic = std::numeric_limits<double>::infinity();
    }
    res.dof = res.bins > 0 ? res.bins - 1 : 0;
    res.p_value = std::isinf(res.statistic) ? 0.0 : chi_square_sf(res.statistic, res.dof);
    return res;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// sup_x |F_n(x) - Phi(x)|, checked on both sides of every jump.
inline double ks_normal(std::vector<double> xs) {
    if (xs.empty()) throw domain_error("ks_normal: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double phi = normal_cdf(xs[i]);
        d = std::max({d, std::abs(static_cast<double>(i) / n - phi), std::abs(static_cast<double>(j) / n - phi)});
        i = j;
    }
    return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw domain_error("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic two-sample KS critical value at level alpha.
inline double ks_critical(double alpha, std::size_t na, std::size_t nb) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(static_cast<double>(na + nb) / (static_cast<double>(na) * static_cast<double>(nb)));
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw domain_error("mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw domain_error("variance: need at least two values");
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

inline double covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw domain_error("covariance: size mismatch");
    const double mx = mean(xs);
    const double my = mean(ys);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
    return acc / static_cast<double>(xs.size() - 1);
}

inline double correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double vx = variance(xs);
    const double vy = variance(ys);
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return covariance(xs, ys) / std::sqrt(vx * vy);
}

inline double standard_error(const std::vector<double>& xs) {
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw domain_error("loglog_slope: need two or more points");
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw domain_error("loglog_slope: values must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    return covariance(lx, ly) / variance(lx);
}

// Poisson(mean) probability mass, computed in log space.
inline double poisson_pmf(std::size_t k, double mu) {
    if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace wperm
