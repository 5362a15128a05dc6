#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "wperm/errors.hpp"

namespace wperm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Complex = std::complex<double>;

enum class ScalarKind { rational, real, complex };

inline std::string to_string(ScalarKind k) {
    switch (k) {
        case ScalarKind::rational: return "rational";
        case ScalarKind::real: return "real";
        case ScalarKind::complex: return "complex";
    }
    return "?";
}

inline ScalarKind parse_scalar_kind(std::string_view s) {
    if (s == "rational" || s == "exact") return ScalarKind::rational;
    if (s == "real" || s == "float" || s == "double") return ScalarKind::real;
    if (s == "complex") return ScalarKind::complex;
    throw parse_error("unknown scalar kind '" + std::string(s) + "'");
}

template <class T>
inline constexpr bool is_rational_v = std::is_same_v<T, Rational>;

template <class T>
inline constexpr bool is_complex_v = std::is_same_v<T, Complex>;

template <class T>
concept SeriesScalar = is_rational_v<T> || std::is_same_v<T, double> || is_complex_v<T>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

// Converts an exact rational into the requested scalar kind.
template <SeriesScalar T>
T from_rational(const Rational& q) {
    if constexpr (is_rational_v<T>) {
        return q;
    } else if constexpr (is_complex_v<T>) {
        return Complex(to_double(q), 0.0);
    } else {
        return to_double(q);
    }
}

template <SeriesScalar T>
T from_double(double x) {
    if constexpr (is_rational_v<T>) {
        return Rational(x);  // exact binary value
    } else {
        return T(x);
    }
}

template <SeriesScalar T>
bool is_zero(const T& x) {
    if constexpr (is_rational_v<T>) {
        return x == 0;
    } else {
        return x == T(0);
    }
}

// Parses a decimal literal ("2", "-0.5", "1.25e-3", "3/4") into an exact rational.
inline Rational parse_decimal(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw parse_error("empty number");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_decimal(s.substr(0, slash));
        Rational den = parse_decimal(s.substr(slash + 1));
        if (den == 0) throw parse_error("zero denominator in '" + s + "'");
        return num / den;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }
    BigInt mantissa = 0;
    long long exponent = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) --exponent;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw parse_error("malformed number '" + s + "'");
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw parse_error("malformed number '" + s + "'");
        ++pos;
        try {
            std::size_t used = 0;
            long long e = std::stoll(s.substr(pos), &used);
            if (pos + used != s.size()) throw parse_error("malformed exponent in '" + s + "'");
            exponent += e;
        } catch (const std::logic_error&) {
            throw parse_error("malformed exponent in '" + s + "'");
        }
    }
    if (exponent > 4000 || exponent < -4000) throw parse_error("exponent out of range in '" + s + "'");
    Rational value(mantissa);
    BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0) {
        value /= Rational(ten_pow);
    } else {
        value *= Rational(ten_pow);
    }
    return negative ? Rational(-value) : value;
}

}  // namespace wperm
