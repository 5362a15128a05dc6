#pragma once

// Leading-order coefficient asymptotics for exp(w g(t) + sum_j v_j L_{D_j}(t))
// and the limit laws derived from them. Every prediction returns the leading
// term only; the claimed error order travels with it as a tag.
//
// Values are returned in r^{n-b}-rescaled form (the same convention as the
// scaled float series), so they compare directly against stored coefficients.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/gamma.hpp"
#include "wperm/model.hpp"
#include "wperm/scalar.hpp"

namespace wperm {

enum class ErrorOrder { dbar_over_n, n_pow_x_minus_1, little_o_1, two_singularity };

inline std::string to_string(ErrorOrder e) {
    switch (e) {
        case ErrorOrder::dbar_over_n: return "O(dbar_n/n)";
        case ErrorOrder::n_pow_x_minus_1: return "O(n^(x-1))";
        case ErrorOrder::little_o_1: return "o(1)";
        case ErrorOrder::two_singularity: return "O(n^(max(Re w2,0)-1))";
    }
    return "?";
}

struct Prediction {
    std::string quantity;
    std::size_t n = 0;
    Complex value{0.0, 0.0};
    ErrorOrder error_order = ErrorOrder::dbar_over_n;
    // value = (true quantity) * exp(log_scale); 0 for quantities that are
    // probabilities or characteristic functions.
    double log_scale = 0.0;
    std::string inputs_digest;
    std::vector<std::string> warnings;

    Complex unscaled() const { return value * std::exp(-log_scale); }
};

// Marker attached to one restriction set: v_j L_{D_j}(t).
struct MarkedSet {
    IndexSet D;
    Complex v{0.0, 0.0};
};

namespace detail {

inline std::size_t d_of(const IndexSet& D) { return D.empty() ? 1 : D.max(); }

inline std::string digest_of(const WeightModel& model, std::size_t n, const std::vector<MarkedSet>& sets,
                             const std::string& extra) {
    std::ostringstream os;
    os << model.spec() << "|n=" << n;
    for (const auto& s : sets) {
        os << "|D(" << s.D.size() << ",max=" << d_of(s.D) << ")v=" << s.v.real() << (s.v.imag() < 0 ? "" : "+")
           << s.v.imag() << "i";
    }
    if (!extra.empty()) os << "|" << extra;
    return os.str();
}

inline void check_growth(Prediction& p, std::size_t n, std::size_t dbar) {
    if (n >= 2 && growth_condition_diagnostic(dbar, n, 1.0) > 0.0) {
        p.warnings.push_back("growth condition C log n - n/d_n < 0 fails at this n (dbar_n = " + std::to_string(dbar) + ")");
    }
}

inline void check_uniformity(Prediction& p, std::initializer_list<Complex> ws, const std::vector<MarkedSet>& sets) {
    // validated range for the uniformity radius
    constexpr double bound = 2.0;
    bool out = false;
    for (Complex w : ws) out = out || std::abs(w) > bound;
    for (const auto& s : sets) out = out || std::abs(s.v) > bound;
    if (out) p.warnings.push_back("|w| or |v_j| exceeds the validated bound 2");
}

inline Complex n_pow(std::size_t n, Complex e) { return std::exp(e * std::log(static_cast<double>(n))); }

}  // namespace detail

// r^{n-b} [t^{n-b}] exp(w g(t) + sum_j v_j L_{D_j}(t))
//   ~ e^{K w} n^{w vartheta - 1} exp(sum_j v_j L_{D_j}(r)) / Gamma(w vartheta).
inline Prediction predict_coefficient(const WeightModel& model, const std::vector<MarkedSet>& sets, Complex w,
                                      std::size_t n, std::size_t b = 0) {
    if (n == 0) throw domain_error("predict_coefficient needs n >= 1");
    if (b > n) throw domain_error("predict_coefficient: b exceeds n");
    Prediction p;
    p.quantity = "coefficient";
    p.n = n;
    p.error_order = ErrorOrder::dbar_over_n;
    p.log_scale = static_cast<double>(n - b) * std::log(model.r());
    Complex exponent = model.K() * w + (w * model.vartheta() - 1.0) * std::log(static_cast<double>(n));
    std::size_t dbar = 1;
    for (const auto& s : sets) {
        exponent += s.v * L_D_at_r(model, s.D);
        dbar = std::max(dbar, detail::d_of(s.D));
    }
    const Complex rg = reciprocal_gamma(w * model.vartheta());
    p.value = (rg == Complex(0.0, 0.0)) ? Complex(0.0, 0.0) : std::exp(exponent) * rg;
    if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag())) {
        throw domain_error("predict_coefficient: non-finite intermediate value");
    }
    std::ostringstream extra;
    extra << "w=" << w.real() << "," << w.imag() << "|b=" << b;
    p.inputs_digest = detail::digest_of(model, n, sets, extra.str());
    detail::check_growth(p, n, dbar);
    detail::check_uniformity(p, {w}, sets);
    return p;
}

// r^n h_n(A_n) ~ exp(-L_{D_n}(r)) n^{vartheta-1} e^K / Gamma(vartheta).
inline Prediction predict_h_n(const WeightModel& model, const RestrictionSet& A) {
    auto p = predict_coefficient(model, {MarkedSet{A.excluded(), Complex(-1.0, 0.0)}}, Complex(1.0, 0.0), A.n());
    p.quantity = "h_n";
    return p;
}

// E[exp(i s T)] ~ n^{vartheta(e^{is}-1)} e^{(K - L_{D_n}(r))(e^{is}-1)} Gamma(vartheta)/Gamma(e^{is} vartheta).
inline Prediction predict_char_T(const WeightModel& model, const RestrictionSet& A, double s) {
    const std::size_t n = A.n();
    if (n == 0) throw domain_error("predict_char_T needs n >= 1");
    Prediction p;
    p.quantity = "char_T";
    p.n = n;
    p.error_order = ErrorOrder::dbar_over_n;
    const Complex z = std::polar(1.0, s);
    const double vt = model.vartheta();
    const double LD = L_D_at_r(model, A.excluded());
    const Complex lead = std::exp(vt * (z - 1.0) * std::log(static_cast<double>(n)) + (model.K() - LD) * (z - 1.0));
    p.value = (s == 0.0) ? Complex(1.0, 0.0) : lead * complex_gamma(vt) * reciprocal_gamma(z * vt);
    std::ostringstream extra;
    extra << "s=" << s << "|A=" << A.digest();
    p.inputs_digest = detail::digest_of(model, n, {}, extra.str());
    detail::check_growth(p, n, A.d_n());
    return p;
}

// Mod-Poisson parameter K + vartheta log n - L_{D_n}(r).
inline double mod_poisson_parameter(const WeightModel& model, const RestrictionSet& A) {
    return model.K() + model.vartheta() * std::log(static_cast<double>(A.n())) - L_D_at_r(model, A.excluded());
}

// Gamma(vartheta) / Gamma(vartheta e^{is}), the mod-Poisson limiting function.
inline Complex mod_poisson_limit(double vartheta, double s) {
    if (s == 0.0) return Complex(1.0, 0.0);
    return complex_gamma(vartheta) * reciprocal_gamma(vartheta * std::polar(1.0, s));
}

// D_x = {1, ..., floor(n^x)}.
inline IndexSet prefix_set(std::size_t n, double x) { return IndexSet::range(1, detail::floor_pow(n, x)); }

// E[exp(i s B_n(x))] ~ exp((e^{is} - 1) L_{D_x}(r)), 0 <= x < 1.
inline Prediction predict_char_B(const WeightModel& model, std::size_t n, double x, double s) {
    if (!(x >= 0.0 && x < 1.0)) throw domain_error("predict_char_B needs 0 <= x < 1");
    Prediction p;
    p.quantity = "char_B";
    p.n = n;
    p.error_order = ErrorOrder::n_pow_x_minus_1;
    const IndexSet Dx = prefix_set(n, x);
    p.value = std::exp((std::polar(1.0, s) - 1.0) * L_D_at_r(model, Dx));
    std::ostringstream extra;
    extra << "x=" << x << "|s=" << s;
    p.inputs_digest = detail::digest_of(model, n, {}, extra.str());
    return p;
}

// Joint characteristic function of block counts with every block below n:
// prod_j exp((e^{i s_j} - 1) L_{D_j}(r)).
inline Prediction predict_char_blocks(const WeightModel& model, std::size_t n,
                                      const std::vector<std::pair<IndexSet, double>>& blocks) {
    Prediction p;
    p.quantity = "char_blocks";
    p.n = n;
    p.error_order = ErrorOrder::dbar_over_n;
    Complex e(0.0, 0.0);
    std::size_t dbar = 1;
    std::vector<MarkedSet> sets;
    for (const auto& [D, s] : blocks) {
        const Complex v = std::polar(1.0, s) - 1.0;
        e += v * L_D_at_r(model, D);
        dbar = std::max(dbar, detail::d_of(D));
        sets.push_back({D, v});
    }
    p.value = std::exp(e);
    p.inputs_digest = detail::digest_of(model, n, sets, "");
    detail::check_growth(p, n, dbar);
    return p;
}

// Two singularities at +-r:
// r^{n-b} [t^{n-b}] exp(w1 g(t) + w2 g(-t) + sum_j v_j L_{D_j}(t))
//   ~ e^{K w1} n^{w1 vartheta - 1} e^{w2 g(-r)} exp(sum_j v_j L_{D_j}(r)) / Gamma(w1 vartheta).
inline Prediction predict_coefficient_two_sing(const WeightModel& model, Complex w1, Complex w2,
                                               const std::vector<MarkedSet>& sets, std::size_t n,
                                               std::size_t b = 0) {
    if (w1.real() < 0.0) throw domain_error("two-singularity prediction needs Re(w1) >= 0");
    Prediction p = predict_coefficient(model, sets, w1, n, b);
    p.quantity = "coefficient_two_sing";
    p.error_order = ErrorOrder::two_singularity;
    if (w2 != Complex(0.0, 0.0)) {
        const GEvaluation g_minus_r = evaluate_g(model, -model.r());
        p.value *= std::exp(w2 * g_minus_r.value);
        if (g_minus_r.smoothed) p.warnings.push_back("g(-r) evaluated by averaging oscillating partial sums");
    }
    std::ostringstream extra;
    extra << "|w2=" << w2.real() << "," << w2.imag();
    p.inputs_digest += extra.str();
    detail::check_uniformity(p, {w1, w2}, sets);
    return p;
}

// Parity markers at x = 1: E[exp(i s1 B_ev(1) + i s2 B_odd(1))] through
// w1 = (e^{is1} + e^{is2})/2 and w2 = (e^{is1} - e^{is2})/2, divided by the
// predicted h_n.
inline Prediction predict_parity_char(const WeightModel& model, std::size_t n, double s1, double s2) {
    const Complex e1 = std::polar(1.0, s1);
    const Complex e2 = std::polar(1.0, s2);
    Prediction coef = predict_coefficient_two_sing(model, 0.5 * (e1 + e2), 0.5 * (e1 - e2), {}, n);
    Prediction h = predict_h_n(model, RestrictionSet::full(n));
    coef.value /= h.value;
    coef.log_scale = 0.0;
    coef.quantity = "parity_char";
    return coef;
}

// b-th moment of Beta(1, vartheta): b! Gamma(vartheta + 1) / Gamma(vartheta + b + 1).
inline double pd_moment_limit(double vartheta, unsigned b) {
    if (!(vartheta > 0.0)) throw domain_error("pd_moment_limit needs vartheta > 0");
    double out = 1.0;
    for (unsigned i = 1; i <= b; ++i) out *= static_cast<double>(i) / (vartheta + static_cast<double>(i));
    return out;
}

enum class BetaKind { f_singular, polynomial_factor };

struct BetaFamilyInput {
    BetaKind kind = BetaKind::f_singular;
    // f_singular: f(t) = amplitude (1 - t/r)^{-beta} (1 + O(t - r)).
    double beta = 0.0;
    double amplitude = 1.0;
    // polynomial_factor: true coefficients of P_n, nonnegative.
    std::vector<double> polynomial;
    // Caller's declaration that P_n(r(1 + 1/d_n)) = P_n(r)(1 + o(1)).
    bool polynomial_flat_declared = true;
    // Optional marked restriction v L_D.
    IndexSet D;
    double v = 0.0;
    std::size_t n = 0;
    // Extraction index is n - shift.
    std::size_t shift = 0;
};

// Leading term of [t^{n-shift}] f exp(g + v L_D) or [t^n] P_n exp(g + v L_D),
// scaled by r^{n-shift}.
inline Prediction beta_family_prediction(const WeightModel& model, const BetaFamilyInput& in) {
    if (in.n == 0 || in.shift > in.n) throw domain_error("beta_family_prediction: bad n / shift");
    Prediction p;
    p.n = in.n;
    p.log_scale = static_cast<double>(in.n - in.shift) * std::log(model.r());
    const double LD = in.D.empty() ? 0.0 : L_D_at_r(model, in.D);
    const double logn = std::log(static_cast<double>(in.n));
    const double vt = model.vartheta();
    if (in.kind == BetaKind::f_singular) {
        if (in.beta < 0.0) throw domain_error("beta_family_prediction: beta must be >= 0");
        p.quantity = "coefficient_f_singular";
        p.error_order = ErrorOrder::dbar_over_n;
        p.value = in.amplitude * std::exp(model.K() + (vt + in.beta - 1.0) * logn + in.v * LD) *
                  reciprocal_gamma(Complex(vt + in.beta, 0.0));
    } else {
        p.quantity = "coefficient_polynomial_factor";
        p.error_order = ErrorOrder::little_o_1;
        double Pr = 0.0;
        double rk = 1.0;
        for (double c : in.polynomial) {
            if (c < 0.0) throw domain_error("beta_family_prediction: polynomial coefficients must be nonnegative");
            Pr += c * rk;
            rk *= model.r();
        }
        p.log_scale = static_cast<double>(in.n) * std::log(model.r());
        p.value = Pr * std::exp(model.K() + (vt - 1.0) * logn + in.v * LD) * reciprocal_gamma(Complex(vt, 0.0));
        if (!in.polynomial_flat_declared) p.warnings.push_back("P_n(r(1+1/d_n)) = P_n(r)(1+o(1)) not declared");
    }
    std::ostringstream extra;
    extra << "beta=" << in.beta << "|shift=" << in.shift;
    p.inputs_digest = detail::digest_of(model, in.n, {}, extra.str());
    return p;
}

}  // namespace wperm
