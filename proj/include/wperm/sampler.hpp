#pragma once

// Random A_n-weighted permutations, represented by their cycle counts.
//
// Two independent algorithms:
//  * sequential: draw the length of the cycle through the smallest remaining
//    element from its exact law theta_k h_{m-k} / (m h_m), remove it, repeat;
//  * conditioned Poisson: draw independent Poisson(theta_k t^k / k) counts and
//    accept when sum k C_k = n.
// plus the GEM stick-breaking reference for the Poisson-Dirichlet limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/exact.hpp"
#include "wperm/model.hpp"
#include "wperm/rng.hpp"

namespace wperm {

// Sparse (C_1, ..., C_n).
class CycleCountVector {
public:
    CycleCountVector() = default;
    explicit CycleCountVector(std::size_t n) : n_(n) {}

    static CycleCountVector from_lengths(std::size_t n, std::vector<std::size_t> lengths) {
        std::sort(lengths.begin(), lengths.end());
        CycleCountVector out(n);
        for (std::size_t i = 0; i < lengths.size();) {
            std::size_t j = i;
            while (j < lengths.size() && lengths[j] == lengths[i]) ++j;
            out.entries_.emplace_back(lengths[i], j - i);
            i = j;
        }
        return out;
    }

    std::size_t n() const noexcept { return n_; }
    // (length, count) pairs with count > 0, increasing length.
    const std::vector<std::pair<std::size_t, std::size_t>>& entries() const noexcept { return entries_; }

    std::size_t count(std::size_t m) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(m, std::size_t{0}));
        return (it != entries_.end() && it->first == m) ? it->second : 0;
    }
    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& e : entries_) t += e.second;
        return t;
    }
    std::size_t weighted_sum() const {
        std::size_t s = 0;
        for (const auto& e : entries_) s += e.first * e.second;
        return s;
    }
    // Cycles whose length lies in [lo, hi].
    std::size_t count_between(std::size_t lo, std::size_t hi) const {
        std::size_t t = 0;
        for (const auto& [m, c] : entries_)
            if (m >= lo && m <= hi) t += c;
        return t;
    }
    // Cycle lengths in decreasing order (l^(1), l^(2), ...).
    std::vector<std::size_t> ordered_lengths() const {
        std::vector<std::size_t> out;
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) out.insert(out.end(), it->second, it->first);
        return out;
    }
    Outcome cycle_type() const { return ordered_lengths(); }

    friend bool operator==(const CycleCountVector&, const CycleCountVector&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> entries_;
};

// Sequential sampler with a precomputed h-table for the fixed set A_n. The
// same set is used at every reduced degree.
class SequentialSampler {
public:
    SequentialSampler(const WeightModel& model, const RestrictionSet& A) : n_(A.n()) {
        weights_.assign(n_ + 1, 0.0);
        if (n_ <= exact_table_limit) {
            // exact rational table, converted once
            auto hq = h_table<Rational>(model, A);
            if ((*hq)[n_] == 0) throw degenerate_measure(n_);
            // scale by r^k so that the float weights stay comparable
            h_.resize(n_ + 1);
            Rational rk = 1;
            for (std::size_t k = 0; k <= n_; ++k) {
                h_[k] = to_double((*hq)[k] * rk);
                rk *= model.r_exact();
            }
        } else {
            auto hd = h_table<double>(model, A);
            if ((*hd)[n_] == 0.0) throw degenerate_measure(n_);
            h_ = *hd;
        }
        for (std::size_t k = 1; k <= n_; ++k)
            if (A.contains(k)) weights_[k] = model.theta_normalized(k);
    }

    std::size_t n() const noexcept { return n_; }

    // Draws cycle lengths in the order of the sequential construction
    // (ell_1, ell_2, ...).
    std::vector<std::size_t> draw_lengths(RngStream& rng) const {
        std::vector<std::size_t> lengths;
        std::size_t m = n_;
        while (m > 0) {
            const double target = rng.uniform() * static_cast<double>(m) * h_[m];
            double acc = 0.0;
            std::size_t pick = 0;
            for (std::size_t k = 1; k <= m; ++k) {
                const double w = weights_[k] * h_[m - k];
                if (w <= 0.0) continue;
                acc += w;
                pick = k;
                if (acc > target) break;
            }
            // pick == 0 would mean h_m > 0 with no admissible k, impossible
            if (pick == 0) throw sampling_error("sequential sampler: no admissible cycle length");
            lengths.push_back(pick);
            m -= pick;
        }
        return lengths;
    }

    CycleCountVector draw(RngStream& rng) const { return CycleCountVector::from_lengths(n_, draw_lengths(rng)); }

    static constexpr std::size_t exact_table_limit = 200;

private:
    std::size_t n_;
    std::vector<double> h_;        // r^k h_k
    std::vector<double> weights_;  // theta_k r^k 1{k in A}
};

inline CycleCountVector sample_sequential(const WeightModel& model, const RestrictionSet& A, RngStream& rng) {
    return SequentialSampler(model, A).draw(rng);
}

// Tilt t* in (0, r) with sum_{m in A_n} theta_m t^m = n (the mean of
// sum m k_m under the tilted Poisson measure), capped at r(1 - 1/(2n)).
inline double choose_tilt(const WeightModel& model, const RestrictionSet& A) {
    const std::size_t n = A.n();
    const double r = model.r();
    const double cap = r * (1.0 - 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(n, 1))));
    auto mean_v = [&](double t) {
        double s = 0.0;
        const double rho = t / r;
        double p = 1.0;
        for (std::size_t m = 1; m <= n; ++m) {
            p *= rho;
            if (A.contains(m)) s += model.theta_normalized(m) * p;
        }
        return s;
    };
    const double target = static_cast<double>(n);
    if (mean_v(cap) <= target) return cap;
    double lo = 0.0;
    double hi = cap;
    if (!(mean_v(lo) < target)) return r * (1.0 - 1.0 / static_cast<double>(std::max<std::size_t>(n, 2)));
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mean_v(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct ConditionedPoissonStats {
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate() const { return attempts ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0; }
};

// Rejection sampler on the tilted Poisson product space. Coordinates m > n and
// m outside A_n are never drawn (mean 0 / certain rejection).
class ConditionedPoissonSampler {
public:
    ConditionedPoissonSampler(const WeightModel& model, const RestrictionSet& A, double tilt = 0.0,
                              std::uint64_t max_attempts = 100000000)
        : n_(A.n()), max_attempts_(max_attempts) {
        tilt_ = tilt > 0.0 ? tilt : choose_tilt(model, A);
        if (!(tilt_ > 0.0 && tilt_ < model.r())) throw domain_error("tilt must lie in (0, r)");
        const double rho = tilt_ / model.r();
        double p = 1.0;
        for (std::size_t m = 1; m <= n_; ++m) {
            p *= rho;
            if (A.contains(m)) {
                lengths_.push_back(m);
                means_.push_back(model.theta_normalized(m) * p / static_cast<double>(m));
            }
        }
        if (n_ > 0 && lengths_.empty()) throw degenerate_measure(n_);
    }

    double tilt() const noexcept { return tilt_; }
    const ConditionedPoissonStats& stats() const noexcept { return stats_; }

    CycleCountVector draw(RngStream& rng) {
        CycleCountVector out(n_);
        if (n_ == 0) return out;
        std::vector<std::size_t> lengths;
        for (std::uint64_t attempt = 0; attempt < max_attempts_; ++attempt) {
            ++stats_.attempts;
            lengths.clear();
            std::size_t v = 0;
            bool over = false;
            for (std::size_t j = 0; j < lengths_.size(); ++j) {
                std::uint64_t k = rng.poisson(means_[j]);
                if (k == 0) continue;
                v += static_cast<std::size_t>(k) * lengths_[j];
                if (v > n_) {
                    over = true;
                    break;
                }
                lengths.insert(lengths.end(), static_cast<std::size_t>(k), lengths_[j]);
            }
            if (!over && v == n_) {
                ++stats_.accepted;
                return CycleCountVector::from_lengths(n_, std::move(lengths));
            }
        }
        throw sampling_error("conditioned Poisson sampler: acceptance collapsed (bad tilt?)");
    }

private:
    std::size_t n_;
    std::uint64_t max_attempts_;
    double tilt_ = 0.0;
    std::vector<std::size_t> lengths_;
    std::vector<double> means_;
    ConditionedPoissonStats stats_;
};

inline CycleCountVector sample_conditioned_poisson(const WeightModel& model, const RestrictionSet& A, RngStream& rng,
                                                   double tilt = 0.0) {
    ConditionedPoissonSampler sampler(model, A, tilt);
    return sampler.draw(rng);
}

struct GemDraw {
    std::vector<double> fragments;  // stick-breaking order
    std::vector<double> sorted;     // decreasing (Poisson-Dirichlet truncation)
};

// Stick breaking with V_i ~ Beta(1, vartheta) drawn as 1 - U^{1/vartheta}.
inline GemDraw sample_gem(double vartheta, std::size_t depth, RngStream& rng) {
    if (depth < 1) throw domain_error("sample_gem needs depth >= 1");
    if (!(vartheta > 0.0)) throw domain_error("sample_gem needs vartheta > 0");
    GemDraw out;
    out.fragments.reserve(depth);
    double remaining = 1.0;
    for (std::size_t i = 0; i < depth; ++i) {
        const double v = 1.0 - std::pow(rng.uniform_open0(), 1.0 / vartheta);
        out.fragments.push_back(v * remaining);
        remaining *= 1.0 - v;
    }
    out.sorted = out.fragments;
    std::sort(out.sorted.begin(), out.sorted.end(), std::greater<>());
    return out;
}

}  // namespace wperm
