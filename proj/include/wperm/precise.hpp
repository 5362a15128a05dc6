#pragma once

// High-precision evaluation for models whose constants are exact rationals
// with r = 1 (uniform, ewens, perturbed). Used where the quantity under test
// is far below double resolution, e.g. the h_n error for fixed-size excluded
// sets, which decays super-exponentially.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/model.hpp"
#include "wperm/scalar.hpp"

namespace wperm {

template <unsigned Digits>
using PreciseFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>>;

using Precise = PreciseFloat<1000>;

template <class P = Precise>
P to_precise(const Rational& q) {
    return P(boost::multiprecision::numerator(q)) / P(boost::multiprecision::denominator(q));
}

inline bool supports_precise(const WeightModel& model) {
    return model.family() != Family::custom && model.r_exact() == 1;
}

// Exact K for the built-in families: sum over overrides of (theta_m - vartheta)/m.
inline Rational exact_K(const WeightModel& model, std::size_t horizon) {
    if (!supports_precise(model)) throw domain_error("exact K needs a built-in model");
    Rational k = 0;
    if (model.family() != Family::finitely_perturbed) return k;
    for (std::size_t m = 1; m <= horizon; ++m) {
        const Rational d = model.theta_exact(m) - model.vartheta_exact();
        if (d != 0) k += d / Rational(static_cast<long long>(m));
    }
    return k;
}

// h_0(A), ..., h_N(A) from m h_m = sum_{k in A, k <= m} theta_k h_{m-k}. All
// terms are nonnegative, so the relative error stays at the working precision.
template <class P = Precise>
std::vector<P> precise_h_table(const WeightModel& model, const RestrictionSet& A) {
    if (!supports_precise(model)) throw domain_error("precise h-table needs a built-in model");
    const std::size_t n = A.n();
    std::vector<P> w(n + 1, P(0));
    std::vector<std::size_t> allowed;
    for (std::size_t k = 1; k <= n; ++k) {
        if (!A.contains(k)) continue;
        allowed.push_back(k);
        w[k] = to_precise<P>(model.theta_exact(k));
    }
    std::vector<P> h(n + 1, P(0));
    h[0] = 1;
    for (std::size_t m = 1; m <= n; ++m) {
        P s = 0;
        for (std::size_t k : allowed) {
            if (k > m) break;
            s += w[k] * h[m - k];
        }
        h[m] = s / static_cast<unsigned long long>(m);
    }
    return h;
}

// exp(K - L_D(1)) n^{vartheta - 1} / Gamma(vartheta), the leading term of h_n.
template <class P = Precise>
P precise_h_n_prediction(const WeightModel& model, const RestrictionSet& A) {
    const std::size_t n = A.n();
    Rational LD = 0;
    for (std::size_t m : A.excluded()) LD += model.theta_exact(m) / Rational(static_cast<long long>(m));
    const P vt = to_precise<P>(model.vartheta_exact());
    const P K = to_precise<P>(exact_K(model, n));
    return exp(K - to_precise<P>(LD) + (vt - 1) * log(P(static_cast<unsigned long long>(n)))) / boost::math::tgamma(vt);
}

// log10 of |prediction - h_n| / h_n; -infinity when they agree exactly.
template <class P = Precise>
double precise_h_n_log10_error(const WeightModel& model, const RestrictionSet& A) {
    const auto h = precise_h_table<P>(model, A);
    const P exact = h[A.n()];
    if (exact == 0) throw degenerate_measure(A.n());
    const P rel = abs(precise_h_n_prediction<P>(model, A) - exact) / exact;
    if (rel == 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(log10(rel));
}

// log10 of TV(law of C_m, Poisson(theta_m / m)) for one cycle length m in A.
// P[C_m = k] = (theta_m/m)^k / k! * h_{n-mk}(A \ {m}) / h_n(A).
template <class P = Precise>
double precise_poisson_log10_tv(const WeightModel& model, const RestrictionSet& A, std::size_t m) {
    if (!A.contains(m)) throw domain_error("cycle length outside A_n");
    const std::size_t n = A.n();
    const RestrictionSet without(n, [&A, m](std::size_t k) { return k != m && A.contains(k); }, "precise", false);
    const auto h = precise_h_table<P>(model, A);
    const auto g = precise_h_table<P>(model, without);
    if (h[n] == 0) throw degenerate_measure(n);
    const P mu = to_precise<P>(model.theta_exact(m) / Rational(static_cast<long long>(m)));
    const P e = exp(-mu);
    P diff = 0;
    P q_total = 0;
    P term = 1;  // mu^k / k!
    for (std::size_t k = 0; m * k <= n; ++k) {
        if (k > 0) term = term * mu / static_cast<unsigned long long>(k);
        const P p = term * g[n - m * k] / h[n];
        const P q = term * e;
        diff += abs(p - q);
        q_total += q;
    }
    const P tv = (diff + (1 - q_total)) / 2;
    if (tv <= 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(log10(tv));
}

}  // namespace wperm
