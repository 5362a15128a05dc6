#pragma once

// Gamma function on the complex plane (Lanczos, g = 7, nine coefficients),
// with the reflection formula for Re z < 1/2.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "wperm/errors.hpp"
#include "wperm/scalar.hpp"

namespace wperm {

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coefficients = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_gamma_pole(Complex z) {
    if (z.imag() != 0.0 || z.real() > 0.0) return false;
    return z.real() == std::round(z.real());
}

// Gamma for Re z >= 1/2.
inline Complex lanczos_gamma(Complex z) {
    z -= 1.0;
    Complex x = lanczos_coefficients[0];
    for (std::size_t i = 1; i < lanczos_coefficients.size(); ++i) x += lanczos_coefficients[i] / (z + static_cast<double>(i));
    const Complex t = z + lanczos_g + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

}  // namespace detail

// Gamma(z). Throws domain_error at the poles z = 0, -1, -2, ...
inline Complex complex_gamma(Complex z) {
    if (detail::is_gamma_pole(z)) throw domain_error("Gamma has a pole at a nonpositive integer");
    if (z.real() < 0.5) {
        const double pi = std::numbers::pi;
        return pi / (std::sin(pi * z) * detail::lanczos_gamma(1.0 - z));
    }
    return detail::lanczos_gamma(z);
}

// 1 / Gamma(z), entire: returns 0 at the poles.
inline Complex reciprocal_gamma(Complex z) {
    if (detail::is_gamma_pole(z)) return Complex(0.0, 0.0);
    if (z.real() < 0.5) {
        const double pi = std::numbers::pi;
        return std::sin(pi * z) * detail::lanczos_gamma(1.0 - z) / pi;
    }
    return 1.0 / detail::lanczos_gamma(z);
}

}  // namespace wperm
