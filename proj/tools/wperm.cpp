#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wperm/wperm.hpp"

namespace fs = std::filesystem;
using namespace wperm;

namespace {

enum Exit { ok = 0, verification_failed = 1, bad_input = 2, degenerate = 3 };

struct Output {
    const RunConfig& cfg;

    // Artifact stream: a file under --out, else stdout.
    void emit(const std::string& name, const std::string& content) const {
        if (cfg.out.empty()) {
            std::cout << content;
            return;
        }
        std::ofstream f(fs::path(cfg.out) / name);
        if (!f) throw error("cannot write " + (fs::path(cfg.out) / name).string());
        f << content;
    }
};

std::uint64_t resolve_seed(RunConfig& cfg) {
    if (cfg.seed.empty()) {
        std::random_device rd;
        const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        cfg.seed = std::to_string(s);
        std::cerr << "seed: " << cfg.seed << "\n";
    }
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(cfg.seed, &pos);
        if (pos != cfg.seed.size()) throw parse_error("bad seed");
        return v;
    } catch (const std::logic_error&) {
        throw parse_error("bad seed '" + cfg.seed + "'");
    }
}

std::size_t single_n(const RunConfig& cfg) { return parse_n_list(cfg.n).back(); }

std::vector<double> s_grid(const RunConfig& cfg) {
    if (cfg.s_points < 2) return {cfg.s_max};
    return symmetric_grid(cfg.s_max, cfg.s_points);
}

// "1-3@0.5;4-9@1" -> blocks.
std::vector<Block> parse_blocks(const std::string& spec) {
    std::vector<Block> out;
    for (const auto& part : detail::split(spec, ';')) {
        const auto at = part.find('@');
        if (at == std::string::npos) throw parse_error("block '" + part + "' needs lengths@s");
        out.push_back({detail::parse_index_list(part.substr(0, at)), detail::parse_real(part.substr(at + 1))});
    }
    return out;
}

int cmd_hn(const RunConfig& cfg, const Output& out) {
    const WeightModel model = parse_model(cfg.model);
    const RestrictionFamily fam = parse_restriction(cfg.restriction);
    const ScalarKind kind = parse_scalar_kind(cfg.kind);
    std::ostringstream os;
    os << "n,h_n\n";
    for (std::size_t n : parse_n_list(cfg.n)) {
        const RestrictionSet A = fam.at(n);
        os << n << ',';
        if (kind == ScalarKind::rational) {
            os << (*h_table<Rational>(model, A))[n].str();
        } else {
            const double scaled = (*h_table<double>(model, A))[n];
            os << format_double(scaled * std::exp(-static_cast<double>(n) * std::log(model.r())));
        }
        os << '\n';
    }
    out.emit("hn.csv", os.str());
    return ok;
}

template <SeriesScalar T>
std::string law_csv(const RunConfig& cfg) {
    const WeightModel model = parse_model(cfg.model);
    const std::size_t n = single_n(cfg);
    const RestrictionSet A = parse_restriction(cfg.restriction).at(n);
    std::ostringstream os;
    if (cfg.stat == "T") {
        write_law_csv(os, law_T<T>(model, A));
    } else if (cfg.stat == "C") {
        write_law_csv(os, joint_cycle_count_law<T>(model, A, detail::parse_index_list(cfg.marks)));
    } else if (cfg.stat == "ell1") {
        write_law_csv(os, ell1_law<T>(model, A));
    } else if (cfg.stat == "B") {
        const IndexSet D = cfg.blocks.empty() ? prefix_set(n, cfg.x) : detail::parse_index_list(cfg.blocks);
        write_law_csv(os, law_count_in<T>(model, A, D));
    } else if (cfg.stat == "cycle-type") {
        auto law = brute_force_oracle(model, A, {Statistic::cycle_type, {}, 0});
        if constexpr (is_rational_v<T>) {
            write_law_csv(os, law);
        } else {
            write_law_csv(os, to_double_law(law));
        }
    } else {
        throw parse_error("unknown statistic '" + cfg.stat + "' (T, C, ell1, B, cycle-type)");
    }
    return os.str();
}

int cmd_law(const RunConfig& cfg, const Output& out) {
    const ScalarKind kind = parse_scalar_kind(cfg.kind);
    out.emit("law.csv", kind == ScalarKind::rational ? law_csv<Rational>(cfg) : law_csv<double>(cfg));
    return ok;
}

int cmd_charfn(const RunConfig& cfg, const Output& out) {
    const WeightModel model = parse_model(cfg.model);
    const std::size_t n = single_n(cfg);
    const RestrictionSet A = parse_restriction(cfg.restriction).at(n);
    std::vector<std::pair<double, Complex>> grid;
    for (double s : s_grid(cfg)) {
        if (cfg.stat == "T") {
            grid.emplace_back(s, char_T(model, A, s));
        } else if (cfg.stat == "B") {
            std::vector<Block> blocks;
            if (cfg.blocks.empty()) {
                blocks.push_back({prefix_set(n, cfg.x), s});
            } else {
                // every block shares the grid parameter
                for (auto b : parse_blocks(cfg.blocks)) blocks.push_back({b.lengths, s});
            }
            grid.emplace_back(s, char_B(model, A, blocks));
        } else {
            throw parse_error("charfn supports --stat T or B");
        }
    }
    std::ostringstream os;
    write_char_csv(os, grid);
    out.emit("charfn.csv", os.str());
    return ok;
}

int cmd_predict(const RunConfig& cfg, const Output& out) {
    const WeightModel model = parse_model(cfg.model);
    const RestrictionFamily fam = parse_restriction(cfg.restriction);
    json arr = json::array();
    for (std::size_t n : parse_n_list(cfg.n)) {
        const RestrictionSet A = fam.at(n);
        if (cfg.stat == "hn") {
            arr.push_back(to_json(predict_h_n(model, A)));
        } else if (cfg.stat == "T") {
            for (double s : s_grid(cfg)) arr.push_back(to_json(predict_char_T(model, A, s)));
        } else if (cfg.stat == "B") {
            for (double s : s_grid(cfg)) arr.push_back(to_json(predict_char_B(model, n, cfg.x, s)));
        } else if (cfg.stat == "parity") {
            for (double s : s_grid(cfg)) arr.push_back(to_json(predict_parity_char(model, n, s, -s)));
        } else {
            throw parse_error("predict supports --stat hn, T, B, parity");
        }
    }
    out.emit("predict.json", arr.dump(2) + "\n");
    return ok;
}

int cmd_sample(RunConfig& cfg, const Output& out) {
    const std::uint64_t seed = resolve_seed(cfg);
    const WeightModel model = parse_model(cfg.model);
    const std::size_t n = single_n(cfg);
    const RestrictionSet A = parse_restriction(cfg.restriction).at(n);
    std::vector<CycleCountVector> draws;
    ConditionedPoissonStats cp_stats;
    double tilt = 0.0;
    if (cfg.sampler == "sequential") {
        const SequentialSampler s(model, A);
        auto chunks = run_chunks(cfg.samples, seed, 0, cfg.threads, [&](RngStream& rng, std::size_t b, std::size_t e) {
            std::vector<CycleCountVector> v;
            for (std::size_t i = b; i < e; ++i) v.push_back(s.draw(rng));
            return v;
        });
        for (auto& c : chunks) draws.insert(draws.end(), c.begin(), c.end());
    } else if (cfg.sampler == "poisson") {
        tilt = cfg.tilt > 0.0 ? cfg.tilt : choose_tilt(model, A);
        struct Chunk {
            std::vector<CycleCountVector> v;
            ConditionedPoissonStats st;
        };
        auto chunks = run_chunks(cfg.samples, seed, 0, cfg.threads, [&](RngStream& rng, std::size_t b, std::size_t e) {
            ConditionedPoissonSampler s(model, A, tilt);
            Chunk c;
            for (std::size_t i = b; i < e; ++i) c.v.push_back(s.draw(rng));
            c.st = s.stats();
            return c;
        });
        for (auto& c : chunks) {
            draws.insert(draws.end(), c.v.begin(), c.v.end());
            cp_stats.attempts += c.st.attempts;
            cp_stats.accepted += c.st.accepted;
        }
    } else {
        throw parse_error("unknown sampler '" + cfg.sampler + "' (sequential, poisson)");
    }
    for (const auto& d : draws)
        if (d.weighted_sum() != n) throw sampling_error("draw violates sum m C_m = n");

    if (!cfg.aggregate) {
        std::ostringstream os;
        os << "draw_id,counts\n";
        for (std::size_t i = 0; i < draws.size(); ++i) os << i << ',' << format_counts(draws[i]) << '\n';
        out.emit("samples.csv", os.str());
        return ok;
    }
    std::vector<double> T;
    std::vector<double> C1;
    std::vector<double> L1;
    for (const auto& d : draws) {
        T.push_back(static_cast<double>(d.total()));
        C1.push_back(static_cast<double>(d.count(1)));
        L1.push_back(static_cast<double>(d.ordered_lengths().front()) / static_cast<double>(n));
    }
    json j;
    j["n"] = n;
    j["samples"] = draws.size();
    j["sampler"] = cfg.sampler;
    j["seed"] = seed;
    j["mean_T"] = mean(T);
    j["var_T"] = draws.size() > 1 ? variance(T) : 0.0;
    j["mean_C1"] = mean(C1);
    j["mean_largest_over_n"] = mean(L1);
    if (cfg.sampler == "poisson") {
        j["tilt"] = tilt;
        j["acceptance_rate"] = cp_stats.acceptance_rate();
    }
    out.emit("samples.json", j.dump(2) + "\n");
    return ok;
}

ComparisonReport run_check(RunConfig& cfg) {
    const std::uint64_t seed = resolve_seed(cfg);
    const WeightModel model = parse_model(cfg.model);
    const RestrictionFamily fam = parse_restriction(cfg.restriction);
    const auto ladder = parse_n_list(cfg.n);
    const McOptions mc{cfg.samples, seed, cfg.threads};
    const std::string& c = cfg.check;
    if (c == "exactness") return verify_exactness({model}, {fam}, ladder.back());
    if (c == "hn-closed-form") {
        if (model.spec().rfind("ewens", 0) != 0) throw parse_error("hn-closed-form needs an ewens model");
        return verify_hn_closed_form(model.vartheta_exact(), std::min<std::size_t>(ladder.back(), 200), ladder.back());
    }
    if (c == "hn-asymptotics") return verify_hn_asymptotics(model, fam, ladder);
    if (c == "poisson") return verify_poisson_cycle_counts(model, fam, detail::parse_index_list(cfg.marks), ladder);
    if (c == "modpoisson") return verify_mod_poisson_T(model, fam, ladder, s_grid(cfg));
    if (c == "clt") return verify_clt_T(model, fam, ladder, mc);
    if (c == "pd") return verify_pd_large_cycles(model, fam, ladder.back(), ladder.back(), mc, cfg.depth);
    if (c == "flt") return verify_flt(model, fam, ladder.back(), mc);
    if (c == "flt-restricted") return verify_flt_restricted(model, cfg.a, ladder.back(), mc);
    if (c == "flt-parity") return verify_flt_parity(model, ladder.back(), mc);
    if (c == "samplers") return verify_samplers(model, fam, ladder.back(), mc);
    throw parse_error("unknown check '" + c +
                      "' (exactness, hn-closed-form, hn-asymptotics, poisson, modpoisson, clt, pd, flt, "
                      "flt-restricted, flt-parity, samplers)");
}

int cmd_verify(RunConfig& cfg, const Output& out) {
    const ComparisonReport rep = run_check(cfg);
    out.emit("report.json", to_json(rep).dump(2) + "\n");
    if (!cfg.out.empty()) {
        std::ostringstream os;
        write_series_csv(os, rep);
        out.emit("series.csv", os.str());
    }
    return rep.verdict() == Verdict::fail ? verification_failed : ok;
}

int cmd_all(RunConfig& cfg, const Output& out) {
    AcceptanceOptions opts;
    opts.seed = resolve_seed(cfg);
    opts.threads = cfg.threads;
    bool all_ok = true;
    json results = json::array();
    std::ostringstream series;
    series << "n,quantity,exact,predicted,empirical,distance\n";
    for (const auto& c : acceptance_criteria()) {
        const CriterionResult r = run_criterion(c, opts);
        std::cout << summary_line(r) << std::endl;
        all_ok = all_ok && r.passed;
        json j{{"criterion", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds},
               {"budget_seconds", r.budget_seconds}, {"error", r.error}};
        json reps = json::array();
        for (const auto& rep : r.reports) {
            reps.push_back(to_json(rep));
            write_series_csv(series, rep, false);
        }
        j["reports"] = reps;
        results.push_back(j);
    }
    if (!cfg.out.empty()) {
        out.emit("acceptance.json", results.dump(2) + "\n");
        out.emit("series.csv", series.str());
    }
    return all_ok ? ok : verification_failed;
}

int dispatch(RunConfig& cfg) {
    if (!cfg.out.empty()) fs::create_directories(cfg.out);
    const Output out{cfg};
    int code = ok;
    if (cfg.command == "hn") code = cmd_hn(cfg, out);
    else if (cfg.command == "law") code = cmd_law(cfg, out);
    else if (cfg.command == "charfn") code = cmd_charfn(cfg, out);
    else if (cfg.command == "predict") code = cmd_predict(cfg, out);
    else if (cfg.command == "sample") code = cmd_sample(cfg, out);
    else if (cfg.command == "verify") code = cmd_verify(cfg, out);
    else if (cfg.command == "all") code = cmd_all(cfg, out);
    else throw parse_error("unknown command '" + cfg.command + "'");
    if (!cfg.out.empty()) {
        // written last so that a generated seed is recorded
        out.emit("run_config.txt", cfg.to_file());
        out.emit("VERSION", std::string(version) + "\n");
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Weighted random permutations with restricted cycle lengths"};
    app.set_version_flag("--version", version);
    bind_config(app, cfg);
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }
    try {
        return dispatch(cfg);
    } catch (const degenerate_measure& e) {
        std::cerr << e.what() << "\n";
        return degenerate;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return bad_input;
    } catch (const domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return verification_failed;
    }
}
