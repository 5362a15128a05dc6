#pragma once

#include <stdexcept>
#include <string>

namespace wperm {

// Base of every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arithmetic between series carrying different coefficient scales.
class scale_mismatch : public error {
public:
    using error::error;
};

// An operation was called outside its mathematical domain
// (nonzero constant term in exp, pole of Gamma, index past truncation, ...).
class domain_error : public error {
public:
    using error::error;
};

// h_n(A_n) = 0: no permutation of degree n has all its cycle lengths in A_n.
class degenerate_measure : public error {
public:
    explicit degenerate_measure(std::size_t n)
        : error("degenerate measure: h_" + std::to_string(n) + " = 0 (no admissible permutation)"),
          degree(n) {}
    std::size_t degree;
};

// Malformed model / restriction / config strings.
class parse_error : public error {
public:
    using error::error;
};

// A Monte Carlo routine could not produce a draw (e.g. rejection sampler ran
// out of attempts).
class sampling_error : public error {
public:
    using error::error;
};

}  // namespace wperm
