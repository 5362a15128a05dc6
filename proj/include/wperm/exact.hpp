#pragma once

// Exact finite-n laws of cycle statistics under the A_n-weighted measure.
//
// Everything here is coefficient extraction from exp(sum_{m in A_n}
// theta_m t^m / m) with markers attached to some of the exponent terms. Float
// computations store coefficients rescaled by r^n, so ratios of coefficients
// of equal total degree need no unscaling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/model.hpp"
#include "wperm/scalar.hpp"
#include "wperm/series.hpp"

namespace wperm {

using Outcome = std::vector<std::size_t>;

// Partition lambda_1 >= lambda_2 >= ... of n, i.e. the cycle type of a
// permutation.
class CycleType {
public:
    explicit CycleType(std::vector<std::size_t> parts) : parts_(std::move(parts)) {
        std::sort(parts_.begin(), parts_.end(), std::greater<>());
        for (std::size_t p : parts_)
            if (p == 0) throw domain_error("cycle lengths must be positive");
    }

    const std::vector<std::size_t>& parts() const noexcept { return parts_; }
    std::size_t degree() const {
        std::size_t s = 0;
        for (std::size_t p : parts_) s += p;
        return s;
    }
    // T, the number of cycles.
    std::size_t length() const noexcept { return parts_.size(); }
    std::size_t count(std::size_t m) const {
        return static_cast<std::size_t>(std::count(parts_.begin(), parts_.end(), m));
    }
    // z_lambda = prod_m m^{C_m} C_m!
    BigInt z() const {
        BigInt out = 1;
        std::size_t i = 0;
        while (i < parts_.size()) {
            std::size_t j = i;
            while (j < parts_.size() && parts_[j] == parts_[i]) ++j;
            std::size_t c = j - i;
            for (std::size_t k = 1; k <= c; ++k) out *= BigInt(parts_[i]) * BigInt(k);
            i = j;
        }
        return out;
    }

    friend bool operator==(const CycleType&, const CycleType&) = default;

private:
    std::vector<std::size_t> parts_;
};

// Calls fn(parts) for every partition of n, parts in non-increasing order.
template <class Fn>
void for_each_partition(std::size_t n, Fn&& fn) {
    std::vector<std::size_t> parts;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t remaining, std::size_t max_part) {
        if (remaining == 0) {
            fn(static_cast<const std::vector<std::size_t>&>(parts));
            return;
        }
        for (std::size_t p = std::min(remaining, max_part); p >= 1; --p) {
            parts.push_back(p);
            rec(remaining - p, p);
            parts.pop_back();
        }
    };
    rec(n, n);
}

template <SeriesScalar T>
struct ExactLaw {
    std::vector<Outcome> support;
    std::vector<T> probs;

    T total() const {
        T s(0);
        for (const auto& p : probs) s += p;
        return s;
    }

    T prob(const Outcome& o) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == o) return probs[i];
        return T(0);
    }

    // Univariate convenience: mass at a scalar outcome.
    T prob(std::size_t k) const { return prob(Outcome{k}); }

    void add(const Outcome& o, const T& p) {
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i] == o) {
                probs[i] += p;
                return;
            }
        }
        support.push_back(o);
        probs.push_back(p);
    }

    // Sorts outcomes lexicographically; useful before comparing two laws.
    void canonicalize() {
        std::vector<std::size_t> idx(support.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
        std::vector<Outcome> s;
        std::vector<T> p;
        for (std::size_t i : idx) {
            s.push_back(support[i]);
            p.push_back(probs[i]);
        }
        support = std::move(s);
        probs = std::move(p);
    }

    // Mean of a univariate law (first coordinate), in floating point.
    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) m += static_cast<double>(support[i].at(0)) * to_double_prob(probs[i]);
        return m;
    }

    static double to_double_prob(const T& p) {
        if constexpr (is_rational_v<T>) {
            return to_double(p);
        } else if constexpr (is_complex_v<T>) {
            return p.real();
        } else {
            return p;
        }
    }
};

template <SeriesScalar T>
ExactLaw<double> to_double_law(const ExactLaw<T>& law) {
    ExactLaw<double> out;
    out.support = law.support;
    for (const auto& p : law.probs) out.probs.push_back(ExactLaw<T>::to_double_prob(p));
    return out;
}

namespace detail {

// Scale used for float tables of a model: r, so stored values are r^n h_n.
template <SeriesScalar T>
double table_scale(const WeightModel& model) {
    if constexpr (is_rational_v<T>) {
        return 1.0;
    } else {
        return model.r();
    }
}

// Stored coefficient theta_m / m (times r^m for floats).
template <SeriesScalar T>
T weight_over_m(const WeightModel& model, std::size_t m) {
    if constexpr (is_rational_v<T>) {
        return model.theta_exact(m) / Rational(static_cast<long long>(m));
    } else {
        return T(model.theta_normalized(m) / static_cast<double>(m));
    }
}

// theta_m (times r^m for floats).
template <SeriesScalar T>
T weight(const WeightModel& model, std::size_t m) {
    if constexpr (is_rational_v<T>) {
        return model.theta_exact(m);
    } else {
        return T(model.theta_normalized(m));
    }
}

}  // namespace detail

// Incrementally extendable table h_0, h_1, ... for one (model, restriction
// rule); float tables hold r^k h_k.
template <SeriesScalar T>
class HTable {
public:
    explicit HTable(double scale) : scale_(scale) {}

    // Extends the table to index N using membership from A (A.n() >= N).
    void extend(const WeightModel& model, const RestrictionSet& A, std::size_t N) {
        if (N + 1 <= h_.size()) return;
        if (A.n() < N) throw domain_error("h-table extension needs the restriction up to the requested degree");
        std::size_t old = kg_.size();
        kg_.resize(N + 1, T(0));
        for (std::size_t k = std::max<std::size_t>(old, 1); k <= N; ++k) {
            kg_[k] = A.contains(k) ? detail::weight<T>(model, k) : T(0);
        }
        detail::extend_exp(kg_, h_, N);
    }

    const std::vector<T>& values() const noexcept { return h_; }
    double scale() const noexcept { return scale_; }

private:
    double scale_;
    std::vector<T> kg_{T(0)};
    std::vector<T> h_;
};

// Process-wide cache of h-tables keyed by (model, restriction digest, kind).
// Readers take a shared lock; a missing or too-short table is (re)built under
// the exclusive lock.
template <SeriesScalar T>
class HTableCache {
public:
    static HTableCache& instance() {
        static HTableCache cache;
        return cache;
    }

    std::shared_ptr<const std::vector<T>> get(const WeightModel& model, const RestrictionSet& A, std::size_t N) {
        const std::string key = model.spec() + "|" + A.digest();
        {
            std::shared_lock lock(mutex_);
            auto it = tables_.find(key);
            if (it != tables_.end() && it->second.snapshot->size() > N) return it->second.snapshot;
        }
        std::unique_lock lock(mutex_);
        auto& entry = tables_[key];
        if (!entry.table) entry.table = std::make_shared<HTable<T>>(detail::table_scale<T>(model));
        if (!entry.snapshot || entry.snapshot->size() <= N) {
            entry.table->extend(model, A, N);
            entry.snapshot = std::make_shared<const std::vector<T>>(entry.table->values());
        }
        return entry.snapshot;
    }

    void clear() {
        std::unique_lock lock(mutex_);
        tables_.clear();
    }

private:
    struct Entry {
        std::shared_ptr<HTable<T>> table;
        std::shared_ptr<const std::vector<T>> snapshot;
    };
    std::shared_mutex mutex_;
    std::map<std::string, Entry> tables_;
};

// h_0(A), ..., h_N(A) (float kinds: r^k h_k), N defaults to A.n().
template <SeriesScalar T>
std::shared_ptr<const std::vector<T>> h_table(const WeightModel& model, const RestrictionSet& A) {
    return HTableCache<T>::instance().get(model, A, A.n());
}

// h_n(A_n) = [t^n] exp(g_Theta - L_{D_n}), computed directly through series
// arithmetic (no cache).
template <SeriesScalar T>
T h_n(const WeightModel& model, const RestrictionSet& A, Convention convention = Convention::true_value) {
    const std::size_t n = A.n();
    if (n == 0) return T(1);
    const double scale = detail::table_scale<T>(model);
    auto f = series_exp(allowed_series<T>(model, A, n, scale));
    return coefficient(f, n, convention);
}

namespace detail {

template <SeriesScalar T>
T require_nonzero_h(const std::vector<T>& h, std::size_t n) {
    if (is_zero(h.at(n))) throw degenerate_measure(n);
    return h[n];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Brute force over cycle types.

enum class Statistic { cycle_type, counts, total, b_count, ell1, ordered };

struct StatisticSpec {
    Statistic kind = Statistic::cycle_type;
    IndexSet M;           // for counts
    std::size_t b = 0;    // for b_count: number of cycles of length <= b
};

// Law of a statistic by enumerating every partition of n, weighting
// prod theta_{lambda_i} 1{lambda_i in A_n} / z_lambda and normalizing by the
// total weight. Independent of the series machinery.
inline ExactLaw<Rational> brute_force_oracle(const WeightModel& model, const RestrictionSet& A,
                                             const StatisticSpec& stat) {
    const std::size_t n = A.n();
    if (n > 12) throw domain_error("brute force oracle is limited to n <= 12");
    ExactLaw<Rational> law;
    Rational total = 0;
    for_each_partition(n, [&](const std::vector<std::size_t>& parts) {
        Rational w = 1;
        for (std::size_t p : parts) {
            if (!A.contains(p)) return;
            w *= model.theta_exact(p);
        }
        if (w == 0) return;
        CycleType ct(parts);
        w /= Rational(ct.z());
        total += w;
        switch (stat.kind) {
            case Statistic::cycle_type:
            case Statistic::ordered:
                law.add(ct.parts(), w);
                break;
            case Statistic::counts: {
                Outcome o;
                for (std::size_t m : stat.M) o.push_back(ct.count(m));
                law.add(o, w);
                break;
            }
            case Statistic::total:
                law.add(Outcome{ct.length()}, w);
                break;
            case Statistic::b_count: {
                std::size_t c = 0;
                for (std::size_t p : parts)
                    if (p <= stat.b) ++c;
                law.add(Outcome{c}, w);
                break;
            }
            case Statistic::ell1:
                // element 1 lies in a k-cycle with probability k C_k / n
                for (std::size_t k = 1; k <= n; ++k) {
                    std::size_t c = ct.count(k);
                    if (c == 0) continue;
                    law.add(Outcome{k}, w * Rational(static_cast<long long>(k * c), static_cast<long long>(n)));
                }
                break;
        }
    });
    if (n == 0) {
        law.support = {Outcome{}};
        law.probs = {Rational(1)};
        return law;
    }
    if (total == 0) throw degenerate_measure(n);
    for (auto& p : law.probs) p /= total;
    law.canonicalize();
    return law;
}

// Normalization h_n by brute force (sum over admissible cycle types).
inline Rational brute_force_h_n(const WeightModel& model, const RestrictionSet& A) {
    Rational total = 0;
    if (A.n() == 0) return 1;
    for_each_partition(A.n(), [&](const std::vector<std::size_t>& parts) {
        Rational w = 1;
        for (std::size_t p : parts) {
            if (!A.contains(p)) return;
            w *= model.theta_exact(p);
        }
        total += w / Rational(CycleType(parts).z());
    });
    return total;
}

// ---------------------------------------------------------------------------
// Series-based laws.

// Law of T, the number of cycles: P[T = k] = [t^n] (g_A)^k / k! / h_n.
template <SeriesScalar T>
ExactLaw<T> law_T(const WeightModel& model, const RestrictionSet& A) {
    const std::size_t n = A.n();
    ExactLaw<T> law;
    if (n == 0) {
        law.support = {Outcome{0}};
        law.probs = {T(1)};
        return law;
    }
    const double scale = detail::table_scale<T>(model);
    auto gA = allowed_series<T>(model, A, n, scale);
    auto h = h_table<T>(model, A);
    const T hn = detail::require_nonzero_h(*h, n);
    auto power = Series<T>::one(n, scale);
    for (std::size_t k = 1; k <= n; ++k) {
        power = series_scale_by(series_mul(power, gA), T(1) / T(static_cast<long long>(k)));
        bool all_zero = true;
        for (const auto& c : power.coeffs()) {
            if (!is_zero(c)) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) break;
        if (!is_zero(power[n])) {
            law.support.push_back(Outcome{k});
            law.probs.push_back(power[n] / hn);
        }
    }
    return law;
}

// Law of the number of cycles whose length lies in D:
// P[B = k] = [t^n] exp(g_A - L_{D'}) L_{D'}^k / k! / h_n with D' = D n A_n.
template <SeriesScalar T>
ExactLaw<T> law_count_in(const WeightModel& model, const RestrictionSet& A, const IndexSet& D) {
    const std::size_t n = A.n();
    ExactLaw<T> law;
    if (n == 0) {
        law.support = {Outcome{0}};
        law.probs = {T(1)};
        return law;
    }
    const double scale = detail::table_scale<T>(model);
    auto h = h_table<T>(model, A);
    const T hn = detail::require_nonzero_h(*h, n);
    RestrictionSet marked(n, [&](std::size_t m) { return A.contains(m) && D.contains(m); }, "marked", false);
    RestrictionSet rest(n, [&](std::size_t m) { return A.contains(m) && !D.contains(m); }, "rest", false);
    const auto rest_exp = series_exp(allowed_series<T>(model, rest, n, scale));
    const auto LD = allowed_series<T>(model, marked, n, scale);
    auto power = Series<T>::one(n, scale);
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) power = series_scale_by(series_mul(power, LD), T(1) / T(static_cast<long long>(k)));
        T acc(0);
        bool any = false;
        for (std::size_t j = 0; j <= n; ++j) {
            if (is_zero(power[j])) continue;
            any = true;
            acc += power[j] * rest_exp[n - j];
        }
        if (!any) break;
        if (!is_zero(acc)) {
            law.support.push_back(Outcome{k});
            law.probs.push_back(acc / hn);
        }
    }
    return law;
}

// Exact joint law of (C_m)_{m in M}. The exponent is split into the marked
// part sum_{m in M} theta_m t^m/m, expanded explicitly as a polynomial over
// count vectors, and the unmarked remainder whose exponential is a plain
// series.
template <SeriesScalar T>
ExactLaw<T> joint_cycle_count_law(const WeightModel& model, const RestrictionSet& A, const IndexSet& M) {
    const std::size_t n = A.n();
    for (std::size_t m : M) {
        if (!A.contains(m)) throw domain_error("marker set M must be contained in A_n (m = " + std::to_string(m) + ")");
    }
    ExactLaw<T> law;
    if (M.empty()) {
        law.support = {Outcome{}};
        law.probs = {T(1)};
        return law;
    }
    const double scale = detail::table_scale<T>(model);
    auto h = h_table<T>(model, A);
    const T hn = detail::require_nonzero_h(*h, n);

    // remainder: exp of allowed minus M
    std::vector<char> in_m(n + 1, 0);
    for (std::size_t m : M) in_m[m] = 1;
    RestrictionSet rest(n, [&](std::size_t m) { return A.contains(m) && !in_m[m]; }, "rest", false);
    auto rest_exp = series_exp(allowed_series<T>(model, rest, n, scale));

    const auto& ms = M.members();
    std::vector<T> base(ms.size());
    for (std::size_t j = 0; j < ms.size(); ++j) base[j] = detail::weight_over_m<T>(model, ms[j]);

    Outcome counts(ms.size(), 0);
    // depth-first over count vectors with sum m_j c_j <= n
    std::function<void(std::size_t, std::size_t, T)> rec = [&](std::size_t j, std::size_t used, T w) {
        if (j == ms.size()) {
            T p = w * rest_exp[n - used] / hn;
            if (!is_zero(p)) {
                law.support.push_back(counts);
                law.probs.push_back(p);
            }
            return;
        }
        T wc = w;
        for (std::size_t c = 0; used + c * ms[j] <= n; ++c) {
            if (c > 0) wc = wc * base[j] / T(static_cast<long long>(c));
            counts[j] = c;
            rec(j + 1, used + c * ms[j], wc);
        }
        counts[j] = 0;
    };
    rec(0, 0, T(1));
    return law;
}

// Law of ell_1, the length of the cycle containing element 1:
// P[ell_1 = k] = theta_k / n * h_{n-k}(A_n) / h_n(A_n) * 1{k in A_n}.
template <SeriesScalar T>
ExactLaw<T> ell1_law(const WeightModel& model, const RestrictionSet& A) {
    const std::size_t n = A.n();
    if (n == 0) throw domain_error("ell1 law needs n >= 1");
    auto h = h_table<T>(model, A);
    const T hn = detail::require_nonzero_h(*h, n);
    ExactLaw<T> law;
    const T denom = hn * T(static_cast<long long>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        if (!A.contains(k)) continue;
        T p = detail::weight<T>(model, k) * (*h)[n - k] / denom;
        if (is_zero(p)) continue;
        law.support.push_back(Outcome{k});
        law.probs.push_back(p);
    }
    return law;
}

// E[(ell_1 - 1)_b] with the falling factorial (x)_b = x (x-1) ... (x-b+1).
template <SeriesScalar T>
T ell1_falling_factorial_moment(const WeightModel& model, const RestrictionSet& A, std::size_t b) {
    const std::size_t n = A.n();
    if (b < 1) throw domain_error("falling factorial moment needs b >= 1");
    if (b + 1 > n) return T(0);
    auto h = h_table<T>(model, A);
    const T hn = detail::require_nonzero_h(*h, n);
    T acc(0);
    for (std::size_t k = b + 1; k <= n; ++k) {
        if (!A.contains(k)) continue;
        T falling(1);
        for (std::size_t i = 1; i <= b; ++i) falling *= T(static_cast<long long>(k - i));
        acc += falling * detail::weight<T>(model, k) * (*h)[n - k];
    }
    return acc / (hn * T(static_cast<long long>(n)));
}

// ---------------------------------------------------------------------------
// Characteristic functions (complex float, scaled by r).

namespace detail {

// Allowed exponent as a complex scaled series.
inline Series<Complex> allowed_complex(const WeightModel& model, const RestrictionSet& A) {
    return to_complex(allowed_series<double>(model, A, A.n(), model.r()));
}

inline double h_scaled(const WeightModel& model, const RestrictionSet& A) {
    auto h = h_table<double>(model, A);
    return require_nonzero_h(*h, A.n());
}

}  // namespace detail

// E[exp(i s T)] = [t^n] exp(e^{is} (g - L_{D_n})) / h_n.
inline Complex char_T(const WeightModel& model, const RestrictionSet& A, double s) {
    const std::size_t n = A.n();
    if (n == 0) return Complex(1.0, 0.0);
    const double hn = detail::h_scaled(model, A);
    auto expo = series_scale_by(detail::allowed_complex(model, A), std::polar(1.0, s));
    return series_exp(expo)[n] / hn;
}

struct Block {
    IndexSet lengths;
    double s = 0.0;
};

// Joint characteristic function E[exp(i sum_j s_j B_j)] where B_j counts the
// cycles whose length lies in block j: [t^n] exp(g_A + sum_j (e^{i s_j} - 1)
// L_{D_j}) / h_n.
inline Complex char_B(const WeightModel& model, const RestrictionSet& A, const std::vector<Block>& blocks) {
    const std::size_t n = A.n();
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (!blocks[i].lengths.disjoint(blocks[j].lengths)) throw domain_error("char_B: overlapping blocks");
    if (n == 0) return Complex(1.0, 0.0);
    const double hn = detail::h_scaled(model, A);
    std::vector<Complex> c = detail::allowed_complex(model, A).coeffs();
    for (const auto& blk : blocks) {
        const Complex marker = std::polar(1.0, blk.s) - 1.0;
        for (std::size_t m : blk.lengths) {
            if (m > n || !A.contains(m)) continue;
            c[m] += marker * (model.theta_normalized(m) / static_cast<double>(m));
        }
    }
    return series_exp(Series<Complex>(std::move(c), model.r()))[n] / hn;
}

// Unrestricted measure convenience overload.
inline Complex char_B(const WeightModel& model, std::size_t n, const std::vector<Block>& blocks) {
    return char_B(model, RestrictionSet::full(n), blocks);
}

// r^{n-b} [t^{n-b}] exp(w g(t) + w2 g(-t) + sum_j v_j L_{D_j}(t)).
// Used as the exact side of the coefficient asymptotics.
inline Complex exact_scaled_coefficient(const WeightModel& model, std::size_t n, Complex w,
                                        const std::vector<std::pair<IndexSet, Complex>>& v, std::size_t b = 0,
                                        Complex w2 = Complex(0.0, 0.0)) {
    if (b > n) throw domain_error("exact_scaled_coefficient: b exceeds n");
    const std::size_t N = n - b;
    std::vector<Complex> c(N + 1, Complex(0.0, 0.0));
    for (std::size_t m = 1; m <= N; ++m) {
        const double base = model.theta_normalized(m) / static_cast<double>(m);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        c[m] = (w + w2 * sign) * base;
    }
    for (const auto& [D, vj] : v) {
        for (std::size_t m : D) {
            if (m > N) break;
            c[m] += vj * (model.theta_normalized(m) / static_cast<double>(m));
        }
    }
    if (N == 0) return Complex(1.0, 0.0);
    return series_exp(Series<Complex>(std::move(c), model.r()))[N];
}

}  // namespace wperm
