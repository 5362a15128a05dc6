#pragma once

// CSV and JSON emission. Floats are printed with 17 significant digits so
// that every number round-trips exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wperm/asymptotics.hpp"
#include "wperm/exact.hpp"
#include "wperm/harness.hpp"
#include "wperm/sampler.hpp"

namespace wperm {

using json = nlohmann::json;

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_value(const Rational& q) { return q.str(); }
inline std::string format_value(double x) { return format_double(x); }
inline std::string format_value(const Complex& z) { return format_double(z.real()) + "+" + format_double(z.imag()) + "i"; }

// Multivariate outcomes are joined with spaces.
inline std::string format_outcome(const Outcome& o) {
    std::string s;
    for (std::size_t i = 0; i < o.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(o[i]);
    }
    return s;
}

template <SeriesScalar T>
void write_law_csv(std::ostream& os, const ExactLaw<T>& law) {
    os << "outcome,probability\n";
    for (std::size_t i = 0; i < law.support.size(); ++i) os << format_outcome(law.support[i]) << ',' << format_value(law.probs[i]) << '\n';
}

inline void write_char_csv(std::ostream& os, const std::vector<std::pair<double, Complex>>& grid) {
    os << "s,re,im\n";
    for (const auto& [s, z] : grid) os << format_double(s) << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

inline void write_series_csv(std::ostream& os, const ComparisonReport& rep, bool header = true) {
    if (header) os << "n,quantity,exact,predicted,empirical,distance\n";
    for (const auto& r : rep.rows) {
        os << r.n << ",\"" << r.quantity << "\"," << format_double(r.exact) << ',' << format_double(r.predicted) << ','
           << format_double(r.empirical) << ',' << format_double(r.distance) << '\n';
    }
}

// "m:count" pairs separated by spaces.
inline std::string format_counts(const CycleCountVector& cv) {
    std::string s;
    for (const auto& [m, c] : cv.entries()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(m) + ":" + std::to_string(c);
    }
    return s;
}

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const Prediction& p) {
    json j;
    j["quantity"] = p.quantity;
    j["n"] = p.n;
    j["value"] = {{"re", number_or_null(p.value.real())}, {"im", number_or_null(p.value.imag())}};
    j["log_scale"] = p.log_scale;
    j["error_order"] = to_string(p.error_order);
    j["inputs_digest"] = p.inputs_digest;
    j["warnings"] = p.warnings;
    return j;
}

inline json to_json(const ComparisonReport& rep) {
    json j;
    j["check"] = rep.check;
    j["model"] = rep.model;
    j["restriction"] = rep.restriction;
    j["ladder"] = rep.ladder;
    j["seed"] = rep.seed;
    j["samples"] = rep.samples;
    j["verdict"] = to_string(rep.verdict());
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"n", r.n},
                        {"quantity", r.quantity},
                        {"exact", number_or_null(r.exact)},
                        {"predicted", number_or_null(r.predicted)},
                        {"empirical", number_or_null(r.empirical)},
                        {"distance", number_or_null(r.distance)}});
    }
    j["rows"] = rows;
    json metrics = json::object();
    for (const auto& [k, v] : rep.metrics) metrics[k] = number_or_null(v);
    j["metrics"] = metrics;
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"value", number_or_null(c.value)},
                          {"threshold", number_or_null(c.threshold)},
                          {"relation", c.relation},
                          {"passed", c.passed},
                          {"soft", c.soft}});
    }
    j["checks"] = checks;
    j["notes"] = rep.notes;
    return j;
}

#define WPERM_THRESHOLD_FIELDS(X)                                                                          \
    X(chi2_alpha) X(poisson_tv) X(clt_mean) X(clt_var_lo) X(clt_var_hi) X(pd_moment) X(pd_mean)           \
        X(flt_var_band) X(flt_corr) X(tightness_slope) X(parity_corr) X(sampler_tv) X(hn_ratio) X(hn_float_rel)

inline json to_json(const Thresholds& th) {
    json j;
#define WPERM_PUT(f) j[#f] = th.f;
    WPERM_THRESHOLD_FIELDS(WPERM_PUT)
#undef WPERM_PUT
    return j;
}

// Missing keys keep their defaults; unknown keys are rejected.
inline Thresholds thresholds_from_json(const json& j) {
    Thresholds th;
    for (const auto& [key, value] : j.items()) {
        bool known = false;
#define WPERM_GET(f)              \
    if (key == #f) {              \
        th.f = value.get<double>(); \
        known = true;             \
    }
        WPERM_THRESHOLD_FIELDS(WPERM_GET)
#undef WPERM_GET
        if (!known && key != "seeds" && key != "comment") throw parse_error("unknown threshold key '" + key + "'");
    }
    return th;
}

inline Thresholds load_thresholds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open thresholds file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("thresholds file '" + path + "': " + e.what());
    }
    return thresholds_from_json(j);
}

}  // namespace wperm
