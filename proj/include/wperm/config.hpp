#pragma once

// RunConfig: everything needed to re-execute a CLI run. Options live on the
// top-level app so that a flat key=value config file can set any of them;
// explicit flags override the file.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "wperm/errors.hpp"
#include "wperm/io.hpp"

namespace wperm {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"hn", "law", "charfn", "predict", "sample", "verify", "all"};
    return names;
}

struct RunConfig {
    std::string command;
    std::string model = "uniform";
    std::string restriction = "full";
    std::string n = "10";
    std::string seed;  // empty: generate one
    std::size_t samples = 10000;
    std::string out;
    std::string kind = "real";
    unsigned threads = 0;
    std::string check = "pd";
    std::string stat = "T";
    std::string marks = "1";
    std::string blocks;
    double s_max = std::numbers::pi / 2;
    std::size_t s_points = 33;
    double x = 0.5;
    double a = 0.3;
    std::size_t depth = 3;
    std::string sampler = "sequential";
    double tilt = 0.0;
    bool aggregate = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    // key/value pairs in a fixed order; doubles keep 17 significant digits.
    std::vector<std::pair<std::string, std::string>> to_kv() const {
        std::vector<std::pair<std::string, std::string>> kv{
            {"model", model},
            {"restriction", restriction},
            {"n", n},
            {"samples", std::to_string(samples)},
            {"kind", kind},
            {"threads", std::to_string(threads)},
            {"check", check},
            {"stat", stat},
            {"marks", marks},
            {"s-max", format_double(s_max)},
            {"s-points", std::to_string(s_points)},
            {"x", format_double(x)},
            {"a", format_double(a)},
            {"depth", std::to_string(depth)},
            {"sampler", sampler},
            {"tilt", format_double(tilt)},
            {"aggregate", aggregate ? "true" : "false"},
        };
        if (!seed.empty()) kv.emplace_back("seed", seed);
        if (!blocks.empty()) kv.emplace_back("blocks", blocks);
        if (!out.empty()) kv.emplace_back("out", out);
        return kv;
    }

    std::vector<std::string> to_flags() const {
        std::vector<std::string> args{command};
        for (const auto& [k, v] : to_kv()) {
            if (k == "aggregate") {
                if (aggregate) args.push_back("--aggregate");
                continue;
            }
            args.push_back("--" + k);
            args.push_back(v);
        }
        return args;
    }

    // Config-file form; quoting keeps spec strings with ':' and ';' intact.
    std::string to_file() const {
        std::ostringstream os;
        os << "# wperm " << command << "\n";
        for (const auto& [k, v] : to_kv()) {
            if (k == "aggregate") {
                os << k << "=" << v << "\n";
            } else {
                os << k << "=\"" << v << "\"\n";
            }
        }
        return os.str();
    }
};

// Registers every option on `app` bound to `cfg`, plus one subcommand per
// command name. Options given after a subcommand fall through to the parent.
inline void bind_config(CLI::App& app, RunConfig& cfg) {
    app.fallthrough();
    app.set_config("--config", "", "flat key=value file; flags override it");
    app.add_option("--model", cfg.model, "weight model, e.g. uniform, ewens:theta=2");
    app.add_option("--restriction", cfg.restriction, "restriction rule, e.g. full, odd, tail:a=0.3");
    app.add_option("--n", cfg.n, "degree, range a..b or list a,b,c");
    app.add_option("--seed", cfg.seed, "64-bit seed (generated and printed when omitted)");
    app.add_option("--samples", cfg.samples, "Monte Carlo sample count");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--kind", cfg.kind, "scalar kind: rational, real, complex");
    app.add_option("--threads", cfg.threads, "worker threads (0: WPERM_THREADS or hardware)");
    app.add_option("--check", cfg.check, "harness check for verify");
    app.add_option("--stat", cfg.stat, "law statistic: T, C, ell1, B, cycle-type");
    app.add_option("--marks", cfg.marks, "cycle lengths M for joint counts, e.g. 1,2");
    app.add_option("--blocks", cfg.blocks, "blocks as lengths@s separated by ';', e.g. 1-3@0.5;4-9@1");
    app.add_option("--s-max", cfg.s_max, "half-width of the s grid");
    app.add_option("--s-points", cfg.s_points, "points on the s grid");
    app.add_option("--x", cfg.x, "functional CLT abscissa");
    app.add_option("--a", cfg.a, "tail exponent for flt-restricted");
    app.add_option("--depth", cfg.depth, "number of ordered cycles");
    app.add_option("--sampler", cfg.sampler, "sequential or poisson");
    app.add_option("--tilt", cfg.tilt, "conditioned-Poisson tilt (0: automatic)");
    app.add_flag("--aggregate", cfg.aggregate, "print aggregated statistics instead of draws");
    app.require_subcommand(1);
    static const std::map<std::string, std::string> help{
        {"hn", "table of h_n for the model and restriction"},
        {"law", "exact law of a cycle statistic"},
        {"charfn", "exact characteristic function on an s grid"},
        {"predict", "asymptotic predictions as JSON"},
        {"sample", "draw permutations (cycle counts)"},
        {"verify", "run one harness check and write a report"},
        {"all", "run the acceptance suite"},
    };
    for (const auto& name : subcommands()) {
        app.add_subcommand(name, help.at(name))->callback([&cfg, name] { cfg.command = name; });
    }
}

// Parses argv-style arguments (without the program name).
inline RunConfig parse_run_config(std::vector<std::string> args) {
    RunConfig cfg;
    CLI::App app{"wperm"};
    bind_config(app, cfg);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw parse_error(std::string("command line: ") + e.what());
    }
    return cfg;
}

// "10", "0..50", "100,400,1600".
inline std::vector<std::size_t> parse_n_list(const std::string& s) {
    std::vector<std::size_t> out;
    try {
        const auto dots = s.find("..");
        if (dots != std::string::npos) {
            const std::size_t lo = std::stoul(s.substr(0, dots));
            const std::size_t hi = std::stoul(s.substr(dots + 2));
            if (hi < lo) throw parse_error("empty range '" + s + "'");
            for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
            return out;
        }
        for (const auto& part : detail::split(s, ',')) {
            const std::string t = detail::trim(part);
            if (t.empty()) continue;
            std::size_t pos = 0;
            const std::size_t v = std::stoul(t, &pos);
            if (pos != t.size()) throw parse_error("bad degree '" + t + "'");
            out.push_back(v);
        }
    } catch (const std::logic_error&) {
        throw parse_error("bad degree list '" + s + "'");
    }
    if (out.empty()) throw parse_error("empty degree list");
    return out;
}

}  // namespace wperm
