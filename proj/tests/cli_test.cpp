#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into `err_path` (or discarded).
Result run(const std::string& args, const std::string& err_path = "/dev/null") {
    const std::string cmd = std::string("\"") + WPERM_CLI + "\" " + args + " 2>" + err_path;
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wperm_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Cli, EwensTwoRationalTable) {
    const auto r = run("hn --model ewens:theta=2 --n 0..50 --kind rational");
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 52u);
    EXPECT_EQ(ls[0], "n,h_n");
    for (std::size_t n = 0; n <= 50; ++n) EXPECT_EQ(ls[n + 1], std::to_string(n) + "," + std::to_string(n + 1));
}

TEST(Cli, LargestCycleLaw) {
    const auto r = run("law --stat ell1 --n 10 --kind rational");
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 11u);
    EXPECT_EQ(ls[0], "outcome,probability");
    EXPECT_EQ(ls[10], "10,1/10");
}

TEST(Cli, RestrictedTotalLaw) {
    const auto r = run("law --stat T --n 3 --restriction allow:1,3 --kind rational");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1,2/3"), std::string::npos);
    EXPECT_NE(r.out.find("3,1/3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("hn --model bogus").code, 2);
    EXPECT_EQ(run("hn --n ten").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("law --stat T --n 3 --restriction even").code, 3);
    EXPECT_EQ(run("sample --n 3 --restriction even --seed 1").code, 3);
    // a two-rung ladder whose residue does not shrink fails the verification
    EXPECT_EQ(run("verify --check modpoisson --n 400,100 --s-points 5").code, 1);
    EXPECT_EQ(run("verify --check modpoisson --n 100,400 --s-points 5").code, 0);
}

TEST(Cli, SamplesSumToN) {
    const auto r = run("sample --model ewens:theta=2 --n 40 --samples 200 --seed 9");
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 201u);
    EXPECT_EQ(ls[0], "draw_id,counts");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto comma = ls[i].find(',');
        ASSERT_NE(comma, std::string::npos);
        std::istringstream is(ls[i].substr(comma + 1));
        std::size_t total = 0;
        for (std::string tok; is >> tok;) {
            const auto colon = tok.find(':');
            total += std::stoul(tok.substr(0, colon)) * std::stoul(tok.substr(colon + 1));
        }
        EXPECT_EQ(total, 40u) << ls[i];
    }
}

TEST(Cli, SeedPrintedWhenOmitted) {
    const fs::path err = scratch("seed_err.txt");
    const auto r = run("sample --n 5 --samples 3", err.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(slurp(err).rfind("seed: ", 0), 0u);
    fs::remove(err);
}

TEST(Cli, OutputDirectoryReproducesRun) {
    const fs::path a = scratch("run_a");
    const fs::path b = scratch("run_b");
    ASSERT_EQ(run("sample --model ewens:theta=2 --restriction odd --n 31 --samples 50 --out " + a.string()).code, 0);
    ASSERT_TRUE(fs::exists(a / "samples.csv"));
    ASSERT_TRUE(fs::exists(a / "VERSION"));
    ASSERT_TRUE(fs::exists(a / "run_config.txt"));
    EXPECT_NE(slurp(a / "run_config.txt").find("seed="), std::string::npos);
    ASSERT_EQ(run("sample --config " + (a / "run_config.txt").string() + " --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "samples.csv"), slurp(b / "samples.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, VerifyWritesReport) {
    const fs::path d = scratch("verify");
    ASSERT_EQ(run("verify --check poisson --marks 1 --n 100,400 --out " + d.string()).code, 0);
    const std::string report = slurp(d / "report.json");
    EXPECT_NE(report.find("\"verdict\""), std::string::npos);
    EXPECT_NE(slurp(d / "series.csv").find("n,quantity,exact,predicted,empirical,distance"), std::string::npos);
    fs::remove_all(d);
}
