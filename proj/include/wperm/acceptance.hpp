#pragma once

// The acceptance suite: ten criteria, each a set of harness reports plus a
// wall-clock budget. A criterion passes only if every check in every report
// passes (warnings count as failures here) and it finishes within budget.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wperm/harness.hpp"
#include "wperm/io.hpp"

namespace wperm {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::vector<ComparisonReport> reports;
    std::string error;

    std::string failed_checks() const {
        std::string out;
        for (const auto& r : reports)
            for (const auto& c : r.checks)
                if (!c.passed) out += (out.empty() ? "" : "; ") + r.check + ": " + c.name + " = " + format_double(c.value);
        return out;
    }
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    unsigned threads = 0;
    Thresholds thresholds{};
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<std::vector<ComparisonReport>(const AcceptanceOptions&)> run;
};

inline std::vector<Criterion> acceptance_criteria() {
    std::vector<Criterion> c;
    c.push_back({1, "exact laws match partition brute force (n <= 8)", 10.0, [](const AcceptanceOptions&) {
                     return std::vector<ComparisonReport>{verify_exactness(builtin_models(), builtin_restrictions(), 8)};
                 }});
    c.push_back({2, "Ewens(2) h_n equals (2)_n/n!", 30.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_hn_closed_form(Rational(2), 50, 2000, o.thresholds)};
                 }});
    c.push_back({3, "h_n asymptotic ladder, Ewens(1), D_n = {1..ceil(log n)}", 60.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_hn_asymptotics(
                         parse_model("ewens:theta=1"), parse_restriction("exclude-log"), {200, 400, 800, 1600}, o.thresholds)};
                 }});
    c.push_back({4, "C_1 Poisson limit, uniform", 10.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_poisson_cycle_counts(
                         parse_model("uniform"), parse_restriction("full"), IndexSet({1}), {100, 400}, o.thresholds)};
                 }});
    c.push_back({5, "mod-Poisson residue shrinks from n=100 to n=1000", 120.0, [](const AcceptanceOptions&) {
                     const auto grid = symmetric_grid(std::numbers::pi / 2, 33);
                     return std::vector<ComparisonReport>{
                         verify_mod_poisson_T(parse_model("uniform"), parse_restriction("full"), {100, 1000}, grid),
                         verify_mod_poisson_T(parse_model("ewens:theta=2"), parse_restriction("full"), {100, 1000}, grid)};
                 }});
    c.push_back({6, "CLT for the number of cycles", 300.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_clt_T(parse_model("uniform"), parse_restriction("full"),
                                                                       {1000, 10000, 100000}, {10000, o.seed, o.threads},
                                                                       40000, Centering::restriction_series, o.thresholds)};
                 }});
    c.push_back({7, "Poisson-Dirichlet moments and largest cycle", 300.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_pd_large_cycles(parse_model("ewens:theta=1"),
                                                                                 parse_restriction("full"), 2000, 10000,
                                                                                 {10000, o.seed, o.threads}, 3, 1000000,
                                                                                 o.thresholds)};
                 }});
    c.push_back({8, "sequential vs conditioned-Poisson samplers (n = 8)", 120.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_samplers(parse_model("uniform"), parse_restriction("full"), 8,
                                                                          {100000, o.seed, o.threads}, o.thresholds)};
                 }});
    c.push_back({9, "functional CLT for B_n(x), Ewens(1)", 600.0, [](const AcceptanceOptions& o) {
                     return std::vector<ComparisonReport>{verify_flt(parse_model("ewens:theta=1"), parse_restriction("full"),
                                                                     100000, {10000, o.seed, o.threads}, FltOptions{},
                                                                     o.thresholds)};
                 }});
    c.push_back({10, "restricted and parity variants", 600.0, [](const AcceptanceOptions& o) {
                     FltOptions restricted;
                     restricted.x_grid = {0.1, 0.3, 0.5, 0.8};
                     restricted.x_report = {1.0};
                     return std::vector<ComparisonReport>{
                         verify_flt_restricted(parse_model("ewens:theta=1"), 0.3, 100000, {10000, o.seed, o.threads},
                                               restricted, o.thresholds),
                         verify_flt_parity(parse_model("uniform"), 100000, {10000, o.seed, o.threads}, ParityOptions{},
                                           o.thresholds)};
                 }});
    return c;
}

inline CriterionResult run_criterion(const Criterion& c, const AcceptanceOptions& opts) {
    CriterionResult res;
    res.id = c.id;
    res.title = c.title;
    res.budget_seconds = c.budget_seconds;
    const auto start = std::chrono::steady_clock::now();
    try {
        res.reports = c.run(opts);
        res.passed = std::all_of(res.reports.begin(), res.reports.end(), [](const ComparisonReport& r) { return r.all_passed(); });
    } catch (const std::exception& e) {
        res.error = e.what();
        res.passed = false;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.seconds > res.budget_seconds) res.passed = false;
    return res;
}

inline std::string format_seconds(double s) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << s;
    return os.str();
}

inline std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << "  [" << format_seconds(r.seconds)
       << " s / " << r.budget_seconds << " s]";
    if (!r.error.empty()) os << "  error: " << r.error;
    if (!r.passed && r.seconds > r.budget_seconds) os << "  over budget";
    const std::string failed = r.failed_checks();
    if (!failed.empty()) os << "  failed: " << failed;
    return os.str();
}

}  // namespace wperm
