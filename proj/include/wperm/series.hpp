#pragma once

// Dense truncated power series over exact rationals, doubles or complex
// doubles.
//
// A series of truncation order N stores N + 1 coefficients. Float series may
// carry a scale rho > 0: the stored value at index n is (true coefficient) *
// rho^n. Choosing rho equal to the radius of convergence keeps coefficients of
// exp(g) polynomially bounded instead of growing like rho^-n. Rational series
// always have scale 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/scalar.hpp"

namespace wperm {

enum class Convention { true_value, scaled };

template <SeriesScalar T>
class Series {
public:
    using value_type = T;

    Series() : coeffs_(1, T(0)) {}

    explicit Series(std::vector<T> coeffs, double scale = 1.0)
        : coeffs_(std::move(coeffs)), scale_(scale) {
        if (coeffs_.empty()) throw domain_error("series needs at least one coefficient");
        if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw domain_error("series scale must be positive and finite");
        if constexpr (is_rational_v<T>) {
            if (scale_ != 1.0) throw domain_error("rational series must have scale 1");
        }
    }

    static Series zero(std::size_t order, double scale = 1.0) {
        return Series(std::vector<T>(order + 1, T(0)), scale);
    }

    static Series one(std::size_t order, double scale = 1.0) {
        std::vector<T> c(order + 1, T(0));
        c[0] = T(1);
        return Series(std::move(c), scale);
    }

    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    double scale() const noexcept { return scale_; }
    const std::vector<T>& coeffs() const noexcept { return coeffs_; }

    // Stored (scaled) coefficient.
    const T& operator[](std::size_t n) const { return coeffs_[n]; }

    Series truncated(std::size_t order) const {
        if (order > this->order()) throw domain_error("cannot extend a series by truncation");
        return Series(std::vector<T>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(order) + 1), scale_);
    }

private:
    std::vector<T> coeffs_;
    double scale_ = 1.0;
};

namespace detail {

template <class T>
void require_same_scale(const Series<T>& a, const Series<T>& b) {
    if (a.scale() != b.scale()) {
        throw scale_mismatch("series scales differ: " + std::to_string(a.scale()) + " vs " +
                             std::to_string(b.scale()));
    }
}

}  // namespace detail

template <SeriesScalar T>
Series<T> series_add(const Series<T>& a, const Series<T>& b) {
    detail::require_same_scale(a, b);
    std::size_t n = std::min(a.order(), b.order());
    std::vector<T> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = a[i] + b[i];
    return Series<T>(std::move(c), a.scale());
}

template <SeriesScalar T>
Series<T> series_sub(const Series<T>& a, const Series<T>& b) {
    detail::require_same_scale(a, b);
    std::size_t n = std::min(a.order(), b.order());
    std::vector<T> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = a[i] - b[i];
    return Series<T>(std::move(c), a.scale());
}

template <SeriesScalar T>
Series<T> series_scale_by(const Series<T>& a, const T& factor) {
    std::vector<T> c(a.coeffs());
    for (auto& x : c) x *= factor;
    return Series<T>(std::move(c), a.scale());
}

// Cauchy product truncated to the shorter operand.
template <SeriesScalar T>
Series<T> series_mul(const Series<T>& a, const Series<T>& b) {
    detail::require_same_scale(a, b);
    std::size_t n = std::min(a.order(), b.order());
    std::vector<T> c(n + 1, T(0));
    for (std::size_t i = 0; i <= n; ++i) {
        if (is_zero(a[i])) continue;
        for (std::size_t j = 0; i + j <= n; ++j) {
            if (is_zero(b[j])) continue;
            c[i + j] += a[i] * b[j];
        }
    }
    return Series<T>(std::move(c), a.scale());
}

namespace detail {

// Continues the exponential recurrence n F_n = sum_{k=1}^{n} kg_k F_{n-k}
// from f.size() up to index n_max. `kg` holds k * g_k and must cover n_max.
template <SeriesScalar T>
void extend_exp(const std::vector<T>& kg, std::vector<T>& f, std::size_t n_max) {
    if (f.empty()) f.push_back(T(1));
    std::vector<std::size_t> support;
    for (std::size_t k = 1; k <= n_max; ++k)
        if (!is_zero(kg[k])) support.push_back(k);
    const std::size_t start = f.size();
    f.resize(n_max + 1, T(0));
    if constexpr (is_rational_v<T>) {
        for (std::size_t n = start; n <= n_max; ++n) {
            Rational acc = 0;
            for (std::size_t k : support) {
                if (k > n) break;
                if (f[n - k] != 0) acc += kg[k] * f[n - k];
            }
            f[n] = acc / static_cast<long long>(n);
        }
    } else {
        // The dense inner product vectorizes; a sparse walk only pays off
        // when g has few nonzero coefficients.
        const bool sparse = support.size() * 4 < n_max;
        for (std::size_t n = start; n <= n_max; ++n) {
            T acc(0);
            if (sparse) {
                for (std::size_t k : support) {
                    if (k > n) break;
                    acc += kg[k] * f[n - k];
                }
            } else {
                const T* kp = kg.data();
                const T* fp = f.data();
                for (std::size_t k = 1; k <= n; ++k) acc += kp[k] * fp[n - k];
            }
            f[n] = acc / static_cast<double>(n);
        }
    }
}

}  // namespace detail

// exp(g) for g with zero constant term, through the recurrence
// n F_n = sum_{k=1}^{n} k g_k F_{n-k} obtained from F' = g' F.
// The recurrence commutes with coefficient scaling, so the result carries the
// scale of g.
template <SeriesScalar T>
Series<T> series_exp(const Series<T>& g) {
    if (!is_zero(g[0])) throw domain_error("series_exp requires a zero constant term");
    const std::size_t n_max = g.order();
    std::vector<T> kg(n_max + 1, T(0));
    for (std::size_t k = 1; k <= n_max; ++k)
        if (!is_zero(g[k])) kg[k] = g[k] * T(static_cast<long long>(k));
    std::vector<T> f;
    detail::extend_exp(kg, f, n_max);
    return Series<T>(std::move(f), g.scale());
}

// Inverse of series_exp: g with exp(g) = f, for f_0 = 1.
template <SeriesScalar T>
Series<T> series_log(const Series<T>& f) {
    if (!(f[0] == T(1))) throw domain_error("series_log requires constant term 1");
    const std::size_t n_max = f.order();
    // n g_n = n f_n - sum_{k=1}^{n-1} k g_k f_{n-k}
    std::vector<T> kg(n_max + 1, T(0));
    for (std::size_t n = 1; n <= n_max; ++n) {
        T acc = f[n] * T(static_cast<long long>(n));
        for (std::size_t k = 1; k < n; ++k) {
            if (is_zero(kg[k]) || is_zero(f[n - k])) continue;
            acc -= kg[k] * f[n - k];
        }
        kg[n] = acc;
    }
    std::vector<T> g(n_max + 1, T(0));
    for (std::size_t n = 1; n <= n_max; ++n) g[n] = kg[n] / T(static_cast<long long>(n));
    return Series<T>(std::move(g), f.scale());
}

// [t^n] f. With Convention::true_value the stored value is divided by scale^n.
template <SeriesScalar T>
T coefficient(const Series<T>& f, std::size_t n, Convention convention = Convention::true_value) {
    if (n > f.order()) {
        throw domain_error("coefficient index " + std::to_string(n) + " beyond truncation order " +
                           std::to_string(f.order()));
    }
    if (convention == Convention::scaled || f.scale() == 1.0) return f[n];
    if constexpr (is_rational_v<T>) {
        return f[n];
    } else {
        return f[n] * std::exp(-static_cast<double>(n) * std::log(f.scale()));
    }
}

// Lifts a real-valued series to complex coefficients.
inline Series<Complex> to_complex(const Series<double>& a) {
    std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
    return Series<Complex>(std::move(c), a.scale());
}

}  // namespace wperm
