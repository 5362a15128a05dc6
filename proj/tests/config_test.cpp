#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wperm/config.hpp"

using namespace wperm;

namespace {

RunConfig sample_config() {
    RunConfig c;
    c.command = "verify";
    c.model = "perturbed:theta=1,overrides=1:3;2:1/2";
    c.restriction = "tail:a=0.3";
    c.n = "100,400";
    c.seed = "123456789012345";
    c.samples = 777;
    c.check = "flt-restricted";
    c.s_max = 0.1;
    c.x = 1.0 / 3.0;
    c.aggregate = true;
    c.blocks = "1-3@0.5;4-9@1";
    return c;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Config, DefaultsNeedSubcommand) {
    EXPECT_THROW(parse_run_config({}), parse_error);
    EXPECT_EQ(parse_run_config({"hn"}).command, "hn");
    EXPECT_THROW(parse_run_config({"bogus"}), parse_error);
}

TEST(Config, FlagsRoundTrip) {
    const RunConfig c = sample_config();
    EXPECT_EQ(parse_run_config(c.to_flags()), c);
}

TEST(Config, OptionsAfterSubcommand) {
    const RunConfig c = parse_run_config({"law", "--model", "ewens:theta=2", "--n", "7"});
    EXPECT_EQ(c.command, "law");
    EXPECT_EQ(c.model, "ewens:theta=2");
    EXPECT_EQ(c.n, "7");
}

TEST(Config, FileRoundTrip) {
    const RunConfig c = sample_config();
    const auto path = temp_file("wperm_config_roundtrip.txt");
    {
        std::ofstream os(path);
        os << c.to_file();
    }
    EXPECT_EQ(parse_run_config({c.command, "--config", path.string()}), c);
    std::filesystem::remove(path);
}

TEST(Config, FlagsOverrideFile) {
    const RunConfig c = sample_config();
    const auto path = temp_file("wperm_config_override.txt");
    {
        std::ofstream os(path);
        os << c.to_file();
    }
    const RunConfig d = parse_run_config({c.command, "--config", path.string(), "--samples", "5"});
    EXPECT_EQ(d.samples, 5u);
    EXPECT_EQ(d.model, c.model);
    std::filesystem::remove(path);
}

TEST(Config, DegreeLists) {
    EXPECT_EQ(parse_n_list("10"), (std::vector<std::size_t>{10}));
    EXPECT_EQ(parse_n_list("3..6"), (std::vector<std::size_t>{3, 4, 5, 6}));
    EXPECT_EQ(parse_n_list("100, 400,1600"), (std::vector<std::size_t>{100, 400, 1600}));
    EXPECT_THROW(parse_n_list("6..3"), parse_error);
    EXPECT_THROW(parse_n_list("ten"), parse_error);
    EXPECT_THROW(parse_n_list("4x"), parse_error);
    EXPECT_THROW(parse_n_list(""), parse_error);
}

TEST(Config, BadOptionValue) {
    EXPECT_THROW(parse_run_config({"sample", "--samples", "many"}), parse_error);
}
