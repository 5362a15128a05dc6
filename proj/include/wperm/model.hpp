#pragma once

// Weight sequences Theta = (theta_m), their singularity data (r, vartheta, K)
// and cycle-length restriction sets A_n / D_n.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wperm/errors.hpp"
#include "wperm/scalar.hpp"
#include "wperm/series.hpp"

namespace wperm {

enum class Family { uniform, ewens, finitely_perturbed, custom };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::uniform: return "uniform";
        case Family::ewens: return "ewens";
        case Family::finitely_perturbed: return "perturbed";
        case Family::custom: return "custom";
    }
    return "?";
}

// A weight sequence together with the data (r, vartheta, K) of its
// logarithmic singularity g(t) = vartheta log(1/(1 - t/r)) + K + O(t - r).
// The singularity data is declared, never inferred.
class WeightModel {
public:
    using ExactFn = std::function<Rational(std::size_t)>;
    using NormalizedFn = std::function<double(std::size_t)>;

    static WeightModel uniform() {
        WeightModel m;
        m.family_ = Family::uniform;
        m.spec_ = "uniform";
        m.exact_ = [](std::size_t) { return Rational(1); };
        m.normalized_ = [](std::size_t) { return 1.0; };
        return m;
    }

    static WeightModel ewens(const Rational& vartheta) {
        if (vartheta <= 0) throw domain_error("ewens parameter must be positive");
        WeightModel m;
        m.family_ = Family::ewens;
        m.vartheta_exact_ = vartheta;
        m.vartheta_ = to_double(vartheta);
        m.spec_ = "ewens:theta=" + vartheta.str();
        m.exact_ = [vartheta](std::size_t) { return vartheta; };
        double v = m.vartheta_;
        m.normalized_ = [v](std::size_t) { return v; };
        return m;
    }

    // Ewens(vartheta) with finitely many overridden weights; r = 1 and
    // K = sum over overrides of (theta_m - vartheta)/m.
    static WeightModel perturbed(const Rational& vartheta, std::map<std::size_t, Rational> overrides) {
        if (vartheta <= 0) throw domain_error("perturbed base parameter must be positive");
        WeightModel m;
        m.family_ = Family::finitely_perturbed;
        m.vartheta_exact_ = vartheta;
        m.vartheta_ = to_double(vartheta);
        Rational k = 0;
        std::string ov;
        for (const auto& [idx, val] : overrides) {
            if (idx == 0) throw domain_error("weights are indexed from 1");
            if (val < 0) throw domain_error("weights must be nonnegative");
            k += (val - vartheta) / Rational(static_cast<long long>(idx));
            if (!ov.empty()) ov += ';';
            ov += std::to_string(idx) + ":" + val.str();
        }
        m.K_ = to_double(k);
        m.spec_ = "perturbed:theta=" + vartheta.str() + ",overrides=" + ov;
        auto table = std::make_shared<const std::map<std::size_t, Rational>>(std::move(overrides));
        m.exact_ = [table, vartheta](std::size_t i) {
            auto it = table->find(i);
            return it == table->end() ? vartheta : it->second;
        };
        double v = m.vartheta_;
        m.normalized_ = [table, v](std::size_t i) {
            auto it = table->find(i);
            return it == table->end() ? v : to_double(it->second);
        };
        return m;
    }

    // User-supplied weights. `exact(m)` returns theta_m, `normalized(m)`
    // returns theta_m r^m in floating point (kept separate so that large m
    // does not overflow when r != 1).
    static WeightModel custom(std::string name, ExactFn exact, NormalizedFn normalized, const Rational& r,
                              const Rational& vartheta, double K) {
        if (r <= 0) throw domain_error("custom model: r must be positive");
        if (vartheta <= 0) throw domain_error("custom model: vartheta must be positive");
        WeightModel m;
        m.family_ = Family::custom;
        m.r_exact_ = r;
        m.r_ = to_double(r);
        m.vartheta_exact_ = vartheta;
        m.vartheta_ = to_double(vartheta);
        m.K_ = K;
        m.spec_ = std::move(name);
        m.exact_ = std::move(exact);
        m.normalized_ = std::move(normalized);
        return m;
    }

    // Weights read from `m,theta_m` rows; indices past the table use the
    // asymptotic value vartheta / r^m.
    static WeightModel custom_table(std::vector<Rational> weights, const Rational& r, const Rational& vartheta,
                                    double K, std::string name) {
        for (const auto& w : weights) {
            if (w < 0) throw domain_error("custom model: weights must be nonnegative");
        }
        auto table = std::make_shared<const std::vector<Rational>>(std::move(weights));
        auto exact = [table, r, vartheta](std::size_t m) -> Rational {
            if (m >= 1 && m <= table->size()) return (*table)[m - 1];
            Rational rp = 1;
            for (std::size_t i = 0; i < m; ++i) rp *= r;
            return vartheta / rp;
        };
        double rd = to_double(r);
        double vd = to_double(vartheta);
        auto normalized = [table, rd, vd](std::size_t m) -> double {
            if (m >= 1 && m <= table->size()) {
                return to_double((*table)[m - 1]) * std::pow(rd, static_cast<double>(m));
            }
            return vd;
        };
        return custom(std::move(name), std::move(exact), std::move(normalized), r, vartheta, K);
    }

    Family family() const noexcept { return family_; }
    double r() const noexcept { return r_; }
    const Rational& r_exact() const noexcept { return r_exact_; }
    double vartheta() const noexcept { return vartheta_; }
    const Rational& vartheta_exact() const noexcept { return vartheta_exact_; }
    double K() const noexcept { return K_; }
    const std::string& spec() const noexcept { return spec_; }

    Rational theta_exact(std::size_t m) const { return exact_(m); }
    double theta(std::size_t m) const {
        if (r_ == 1.0) return normalized_(m);
        return normalized_(m) * std::pow(r_, -static_cast<double>(m));
    }
    // theta_m r^m = vartheta + eps_m.
    double theta_normalized(std::size_t m) const { return normalized_(m); }

private:
    WeightModel() = default;

    Family family_ = Family::uniform;
    double r_ = 1.0;
    Rational r_exact_ = 1;
    double vartheta_ = 1.0;
    Rational vartheta_exact_ = 1;
    double K_ = 0.0;
    std::string spec_;
    ExactFn exact_;
    NormalizedFn normalized_;
};

// Sorted set of positive cycle lengths.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::vector<std::size_t> members) : members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
        if (!members_.empty() && members_.front() == 0) throw domain_error("cycle lengths start at 1");
    }
    static IndexSet range(std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> v;
        for (std::size_t m = std::max<std::size_t>(lo, 1); m <= hi; ++m) v.push_back(m);
        return IndexSet(std::move(v));
    }

    bool contains(std::size_t m) const { return std::binary_search(members_.begin(), members_.end(), m); }
    bool empty() const noexcept { return members_.empty(); }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t max() const { return members_.empty() ? 0 : members_.back(); }
    const std::vector<std::size_t>& members() const noexcept { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    bool disjoint(const IndexSet& other) const {
        auto a = members_.begin();
        auto b = other.members_.begin();
        while (a != members_.end() && b != other.members_.end()) {
            if (*a == *b) return false;
            if (*a < *b) ++a; else ++b;
        }
        return true;
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<std::size_t> members_;
};

// A_n subset of {1..n} and its complement D_n.
class RestrictionSet {
public:
    // `tag` identifies the rule; when `prefix_consistent` the rule gives the
    // same membership for every m regardless of n, so h-tables can be shared
    // across degrees.
    RestrictionSet(std::size_t n, std::function<bool(std::size_t)> allowed, std::string tag,
                   bool prefix_consistent = false)
        : n_(n), allowed_(n + 1, 0), tag_(std::move(tag)), prefix_consistent_(prefix_consistent) {
        for (std::size_t m = 1; m <= n; ++m) allowed_[m] = allowed(m) ? 1 : 0;
    }

    static RestrictionSet full(std::size_t n) {
        return RestrictionSet(n, [](std::size_t) { return true; }, "full", true);
    }
    static RestrictionSet excluding(std::size_t n, const IndexSet& d, std::string tag = {}) {
        if (tag.empty()) tag = "exclude:" + list_string(d);
        return RestrictionSet(n, [&d](std::size_t m) { return !d.contains(m); }, std::move(tag), true);
    }
    static RestrictionSet allowing(std::size_t n, const IndexSet& a, std::string tag = {}) {
        if (tag.empty()) tag = "allow:" + list_string(a);
        return RestrictionSet(n, [&a](std::size_t m) { return a.contains(m); }, std::move(tag), true);
    }

    std::size_t n() const noexcept { return n_; }
    bool contains(std::size_t m) const { return m >= 1 && m <= n_ && allowed_[m] != 0; }

    IndexSet allowed() const {
        std::vector<std::size_t> v;
        for (std::size_t m = 1; m <= n_; ++m)
            if (allowed_[m]) v.push_back(m);
        return IndexSet(std::move(v));
    }
    IndexSet excluded() const {
        std::vector<std::size_t> v;
        for (std::size_t m = 1; m <= n_; ++m)
            if (!allowed_[m]) v.push_back(m);
        return IndexSet(std::move(v));
    }
    // d_n = max D_n, or 1 when D_n is empty.
    std::size_t d_n() const {
        for (std::size_t m = n_; m >= 1; --m)
            if (!allowed_[m]) return m;
        return 1;
    }
    bool is_full() const {
        return std::all_of(allowed_.begin() + 1, allowed_.end(), [](char c) { return c != 0; });
    }

    const std::string& tag() const noexcept { return tag_; }
    bool prefix_consistent() const noexcept { return prefix_consistent_; }
    // Key under which h-tables for this set may be cached.
    std::string digest() const { return prefix_consistent_ ? tag_ : tag_ + "@n=" + std::to_string(n_); }

    // The same rule re-evaluated at a smaller degree (membership of m <= n' is
    // unchanged: the original set A_n is kept).
    RestrictionSet restricted_to(std::size_t n_small) const {
        if (n_small > n_) throw domain_error("restricted_to: degree exceeds the set's degree");
        RestrictionSet out = *this;
        out.n_ = n_small;
        out.allowed_.resize(n_small + 1);
        out.prefix_consistent_ = true;
        out.tag_ = digest();
        return out;
    }

    static std::string list_string(const IndexSet& s) {
        std::string out;
        for (std::size_t m : s) {
            if (!out.empty()) out += ',';
            out += std::to_string(m);
        }
        return out;
    }

private:
    std::size_t n_;
    std::vector<char> allowed_;
    std::string tag_;
    bool prefix_consistent_ = false;
};

// A rule n -> A_n, e.g. "tail:a=0.3" giving A_n = {ceil(n^a), ..., n}.
struct RestrictionFamily {
    std::string spec;
    std::function<RestrictionSet(std::size_t)> at;
};

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// "name:k1=v1,k2=v2" -> (name, {k1: v1, k2: v2}). Values may contain ';' and ':'.
inline std::pair<std::string, std::map<std::string, std::string>> split_spec(std::string_view spec) {
    std::string s = trim(spec);
    std::map<std::string, std::string> kv;
    auto colon = s.find(':');
    std::string name = s.substr(0, colon);
    if (colon == std::string::npos) return {name, kv};
    for (const auto& part : split(std::string_view(s).substr(colon + 1), ',')) {
        if (part.empty()) continue;
        auto eq = part.find('=');
        if (eq == std::string::npos) {
            kv[""] += (kv[""].empty() ? "" : ",") + part;
        } else {
            kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
        }
    }
    return {name, kv};
}

inline double parse_real(const std::string& s) { return to_double(parse_decimal(s)); }

// "2,4-6" -> {2,4,5,6}
inline IndexSet parse_index_list(const std::string& s) {
    std::vector<std::size_t> v;
    for (const auto& tok_raw : split(s, ',')) {
        std::string tok = trim(tok_raw);
        if (tok.empty()) continue;
        try {
            if (auto dash = tok.find('-'); dash != std::string::npos && dash > 0) {
                std::size_t lo = std::stoul(tok.substr(0, dash));
                std::size_t hi = std::stoul(tok.substr(dash + 1));
                for (std::size_t m = lo; m <= hi; ++m) v.push_back(m);
            } else {
                v.push_back(std::stoul(tok));
            }
        } catch (const std::logic_error&) {
            throw parse_error("malformed index list '" + s + "'");
        }
    }
    return IndexSet(std::move(v));
}

inline std::size_t ceil_pow(std::size_t n, double a) {
    // ceil(n^a) with a guard against floating noise at exact powers.
    double v = std::pow(static_cast<double>(n), a);
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, v)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(v));
}

inline std::size_t floor_pow(std::size_t n, double x) {
    double v = std::pow(static_cast<double>(n), x);
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, v)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::floor(v));
}

}  // namespace detail

// Parses a model spec string:
//   uniform
//   ewens:theta=2
//   perturbed:theta=1,overrides=1:3.0;2:0.5
//   custom:file=weights.csv,r=1,vartheta=1,K=0
inline WeightModel parse_model(std::string_view spec) {
    auto [name, kv] = detail::split_spec(spec);
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    try {
        if (name == "uniform") return WeightModel::uniform();
        if (name == "ewens") return WeightModel::ewens(parse_decimal(get("theta", "1")));
        if (name == "perturbed") {
            std::map<std::size_t, Rational> ov;
            std::string list = get("overrides", "");
            for (const auto& item : detail::split(list, ';')) {
                std::string it = detail::trim(item);
                if (it.empty()) continue;
                auto c = it.find(':');
                if (c == std::string::npos) throw parse_error("override '" + it + "' must be m:value");
                ov[std::stoul(it.substr(0, c))] = parse_decimal(it.substr(c + 1));
            }
            return WeightModel::perturbed(parse_decimal(get("theta", "1")), std::move(ov));
        }
        if (name == "custom") {
            std::string file = get("file", "");
            if (file.empty()) throw parse_error("custom model needs file=<csv>");
            std::ifstream in(file);
            if (!in) throw parse_error("cannot open weights file '" + file + "'");
            std::map<std::size_t, Rational> rows;
            std::string line;
            while (std::getline(in, line)) {
                line = detail::trim(line);
                if (line.empty() || line[0] == '#') continue;
                auto cols = detail::split(line, ',');
                if (cols.size() != 2) throw parse_error("weights row '" + line + "' must be m,theta_m");
                std::string first = detail::trim(cols[0]);
                if (first == "m") continue;  // header
                rows[std::stoul(first)] = parse_decimal(detail::trim(cols[1]));
            }
            std::vector<Rational> weights;
            for (std::size_t m = 1; rows.count(m); ++m) weights.push_back(rows[m]);
            if (weights.size() != rows.size()) throw parse_error("weights file must list m = 1, 2, ... contiguously");
            return WeightModel::custom_table(std::move(weights), parse_decimal(get("r", "1")),
                                             parse_decimal(get("vartheta", "1")), detail::parse_real(get("K", "0")),
                                             std::string(detail::trim(spec)));
        }
    } catch (const std::logic_error& e) {
        throw parse_error("malformed model spec '" + std::string(spec) + "': " + e.what());
    }
    throw parse_error("unknown model '" + name + "'");
}

// Parses a restriction spec string:
//   full | odd | even | tail:a=0.3 | exclude:2,4-6 | allow:1,3
//   prefix:b=5 (A_n = {1..b}) | exclude-prefix:b=3 | exclude-log | exclude-pow:alpha=0.5
inline RestrictionFamily parse_restriction(std::string_view spec) {
    auto [name, kv] = detail::split_spec(spec);
    std::string canonical = detail::trim(spec);
    auto get = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw parse_error("restriction '" + canonical + "' needs " + key + "=");
        return it->second;
    };
    if (name == "full") return {canonical, [](std::size_t n) { return RestrictionSet::full(n); }};
    if (name == "odd" || name == "parity-odd") {
        return {canonical, [](std::size_t n) {
                    return RestrictionSet(n, [](std::size_t m) { return m % 2 == 1; }, "odd", true);
                }};
    }
    if (name == "even" || name == "parity-even") {
        return {canonical, [](std::size_t n) {
                    return RestrictionSet(n, [](std::size_t m) { return m % 2 == 0; }, "even", true);
                }};
    }
    if (name == "tail") {
        double a = detail::parse_real(get("a"));
        if (!(a >= 0.0 && a < 1.0)) throw parse_error("tail restriction needs 0 <= a < 1");
        return {canonical, [a, canonical](std::size_t n) {
                    std::size_t lo = detail::ceil_pow(n, a);
                    return RestrictionSet(n, [lo](std::size_t m) { return m >= lo; }, canonical, false);
                }};
    }
    if (name == "exclude" || name == "allow") {
        std::string list = kv.count("") ? kv[""] : (kv.count("m") ? kv["m"] : "");
        IndexSet set = detail::parse_index_list(list);
        std::string tag = name + ":" + RestrictionSet::list_string(set);
        if (name == "exclude") {
            return {canonical, [set, tag](std::size_t n) { return RestrictionSet::excluding(n, set, tag); }};
        }
        return {canonical, [set, tag](std::size_t n) { return RestrictionSet::allowing(n, set, tag); }};
    }
    if (name == "prefix") {
        std::size_t b = std::stoul(get("b"));
        return {canonical, [b, canonical](std::size_t n) {
                    return RestrictionSet(n, [b](std::size_t m) { return m <= b; }, canonical, true);
                }};
    }
    if (name == "exclude-prefix") {
        std::size_t b = std::stoul(get("b"));
        return {canonical, [b, canonical](std::size_t n) {
                    return RestrictionSet(n, [b](std::size_t m) { return m > b; }, canonical, true);
                }};
    }
    if (name == "exclude-log") {
        return {canonical, [canonical](std::size_t n) {
                    auto b = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(std::max<std::size_t>(n, 1)))));
                    return RestrictionSet(n, [b](std::size_t m) { return m > b; }, canonical, false);
                }};
    }
    if (name == "exclude-pow") {
        double alpha = detail::parse_real(get("alpha"));
        if (!(alpha > 0.0 && alpha < 1.0)) throw parse_error("exclude-pow needs 0 < alpha < 1");
        return {canonical, [alpha, canonical](std::size_t n) {
                    std::size_t b = detail::ceil_pow(n, alpha);
                    return RestrictionSet(n, [b](std::size_t m) { return m > b; }, canonical, false);
                }};
    }
    throw parse_error("unknown restriction '" + name + "'");
}

// g_Theta(t) = sum_m theta_m/m t^m, truncated at N, stored with the given
// coefficient scale (ignored for rationals).
template <SeriesScalar T>
Series<T> g_theta_series(const WeightModel& model, std::size_t N, double scale = 1.0) {
    if (N < 1) throw domain_error("g_theta_series needs N >= 1");
    std::vector<T> c(N + 1, T(0));
    if constexpr (is_rational_v<T>) {
        for (std::size_t m = 1; m <= N; ++m) c[m] = model.theta_exact(m) / Rational(static_cast<long long>(m));
        return Series<T>(std::move(c));
    } else {
        const double log_ratio = std::log(scale / model.r());
        for (std::size_t m = 1; m <= N; ++m) {
            double v = model.theta_normalized(m) / static_cast<double>(m);
            if (log_ratio != 0.0) v *= std::exp(static_cast<double>(m) * log_ratio);
            c[m] = T(v);
        }
        return Series<T>(std::move(c), scale);
    }
}

// L_D(t) = sum_{m in D} theta_m/m t^m.
template <SeriesScalar T>
Series<T> L_D_series(const WeightModel& model, const IndexSet& D, std::size_t N, double scale = 1.0) {
    std::vector<T> c(N + 1, T(0));
    [[maybe_unused]] const double log_ratio = std::log(scale / model.r());
    for (std::size_t m : D) {
        if (m > N) break;
        if constexpr (is_rational_v<T>) {
            c[m] = model.theta_exact(m) / Rational(static_cast<long long>(m));
        } else {
            double v = model.theta_normalized(m) / static_cast<double>(m);
            if (log_ratio != 0.0) v *= std::exp(static_cast<double>(m) * log_ratio);
            c[m] = T(v);
        }
    }
    if constexpr (is_rational_v<T>) {
        return Series<T>(std::move(c));
    } else {
        return Series<T>(std::move(c), scale);
    }
}

// sum_{m in A} theta_m/m t^m; equal to (g - L_{D_n}) up to order n.
template <SeriesScalar T>
Series<T> allowed_series(const WeightModel& model, const RestrictionSet& A, std::size_t N, double scale = 1.0) {
    return series_sub(g_theta_series<T>(model, N, scale), L_D_series<T>(model, A.excluded(), N, scale));
}

// L_D(r) = sum_{m in D} theta_m r^m / m.
inline double L_D_at_r(const WeightModel& model, const IndexSet& D) {
    double s = 0.0;
    for (std::size_t m : D) s += model.theta_normalized(m) / static_cast<double>(m);
    return s;
}

// C log n - n / d_n; must tend to -infinity for the asymptotic theorems.
inline double growth_condition_diagnostic(std::size_t d_n, std::size_t n, double C) {
    if (n < 2 || d_n < 1) throw domain_error("growth condition needs n >= 2 and d_n >= 1");
    return C * std::log(static_cast<double>(n)) - static_cast<double>(n) / static_cast<double>(d_n);
}

// True when the diagnostic strictly decreases along the ladder.
inline bool growth_condition_trend(const RestrictionFamily& family, const std::vector<std::size_t>& ladder,
                                   double C = 1.0) {
    double prev = 0.0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        double cur = growth_condition_diagnostic(family.at(ladder[i]).d_n(), ladder[i], C);
        if (i > 0 && !(cur < prev)) return false;
        prev = cur;
    }
    return true;
}

struct SummabilityReport {
    std::size_t horizon = 0;
    double partial_sum = 0.0;   // sum_{m <= horizon} |theta_m r^m - vartheta| / m
    double tail_share = 0.0;    // contribution of m in (horizon/2, horizon]
    double last_eps = 0.0;      // |eps_horizon|
    bool has_zero_weight = false;
    std::vector<std::string> warnings;
};

// Finite-horizon check of theta_m r^m = vartheta + eps_m with
// sum |eps_m|/m < infinity. Never rejects a model.
inline SummabilityReport summability_diagnostic(const WeightModel& model, std::size_t horizon = 1000000) {
    SummabilityReport rep;
    rep.horizon = horizon;
    double tail = 0.0;
    for (std::size_t m = 1; m <= horizon; ++m) {
        double t = model.theta_normalized(m);
        if (t == 0.0) rep.has_zero_weight = true;
        double e = std::abs(t - model.vartheta()) / static_cast<double>(m);
        rep.partial_sum += e;
        if (m > horizon / 2) tail += e;
        if (m == horizon) rep.last_eps = std::abs(t - model.vartheta());
    }
    rep.tail_share = rep.partial_sum > 0 ? tail / rep.partial_sum : 0.0;
    if (rep.has_zero_weight) rep.warnings.push_back("some theta_m = 0: those cycle lengths are forbidden everywhere");
    if (rep.last_eps > 1e-3) rep.warnings.push_back("theta_m r^m has not settled near vartheta at the horizon");
    if (rep.tail_share > 0.05) rep.warnings.push_back("sum |eps_m|/m still growing at the horizon");
    return rep;
}

struct GEvaluation {
    double value = 0.0;
    bool smoothed = false;  // true when the Cesaro-type tail average was used
    std::size_t terms = 0;
};

// g_Theta(x) for real x with |x| <= r by direct summation. At x = -r the
// alternating partial sums oscillate; the average of the partial sums over the
// second half of the horizon is returned in that case. Throws when that
// average has not stabilised (divergent evaluation).
inline GEvaluation evaluate_g(const WeightModel& model, double x, std::size_t horizon = 1000000,
                              double tolerance = 1e-9) {
    const double rho = x / model.r();
    if (std::abs(rho) > 1.0) throw domain_error("evaluate_g: |x| exceeds the radius r");
    if (std::abs(rho) < 1.0 - 1e-12) {
        // geometric decay: stop when terms are negligible
        double s = 0.0;
        double p = 1.0;
        std::size_t m = 1;
        for (; m <= horizon; ++m) {
            p *= rho;
            double term = model.theta_normalized(m) * p / static_cast<double>(m);
            s += term;
            if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(s))) break;
        }
        return {s, false, m};
    }
    if (rho > 0) throw domain_error("evaluate_g: g diverges at t = r");
    double s = 0.0;
    double window_sum = 0.0;
    double window_sum_prev = 0.0;  // average over (horizon/4, horizon/2]
    std::size_t window_n = 0;
    std::size_t window_prev_n = 0;
    double last_term = 0.0;
    for (std::size_t m = 1; m <= horizon; ++m) {
        double sign = (m % 2 == 1) ? -1.0 : 1.0;
        last_term = sign * model.theta_normalized(m) / static_cast<double>(m);
        s += last_term;
        if (m > horizon / 2) {
            window_sum += s;
            ++window_n;
        } else if (m > horizon / 4) {
            window_sum_prev += s;
            ++window_prev_n;
        }
    }
    if (std::abs(last_term) <= tolerance) return {s, false, horizon};
    double avg = window_sum / static_cast<double>(window_n);
    double avg_prev = window_sum_prev / static_cast<double>(std::max<std::size_t>(window_prev_n, 1));
    if (std::abs(avg - avg_prev) > 1e3 * tolerance * std::max(1.0, std::abs(avg))) {
        throw domain_error("evaluate_g: partial sums at -r do not settle (divergent)");
    }
    return {avg, true, horizon};
}

// j-th derivative of g_Theta at real x with |x| < r.
inline double evaluate_g_derivative(const WeightModel& model, double x, unsigned order,
                                    std::size_t horizon = 10000000) {
    if (order == 0) return evaluate_g(model, x, horizon).value;
    const double rho = x / model.r();
    if (std::abs(rho) >= 1.0) throw domain_error("evaluate_g_derivative: |x| must be below r");
    // d^j/dx^j theta_m x^m / m = theta_m (m-1)(m-2)...(m-j+1) x^{m-j}
    double s = 0.0;
    for (std::size_t m = order; m <= horizon; ++m) {
        double falling = 1.0;
        for (unsigned i = 1; i < order; ++i) falling *= static_cast<double>(m - i);
        double term = model.theta_normalized(m) * falling * std::pow(rho, static_cast<double>(m - order)) /
                      std::pow(model.r(), static_cast<double>(order));
        s += term;
        if (m > 10 * order && std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return s;
}

}  // namespace wperm
