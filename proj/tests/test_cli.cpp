#include "adl/cli.hpp"
#include "adl/json_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using adl::Json;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("adl_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "adl");
    return adl::cli::run(args);
}

Json read_json(const fs::path& p) { return Json::parse(adl::read_file(p.string())); }

}  // namespace

TEST(Cli, MissingSeedIsUsageError) {
    fs::path out = scratch("noseed");
    EXPECT_EQ(run({"sketch-verify", "--out", out.string()}), 2);
}

TEST(Cli, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"sketch-verify", "--seed", "1", "--bogus", "3"}), 2);
    EXPECT_EQ(run({}), 2);
}

TEST(Cli, BadValueIsUsageError) {
    fs::path out = scratch("badvalue");
    EXPECT_EQ(run({"bounds", "--T", "abc", "--out", out.string()}), 2);
    EXPECT_EQ(run({"bounds", "--delta", "1.5", "--out", out.string()}), 2);
}

TEST(Cli, BoundsWritesReportAndSweep) {
    fs::path out = scratch("bounds");
    int rc = run({"bounds", "--T", "1024", "--d", "50", "--m", "1000", "--L", "1", "--B", "1", "--R", "2", "--r", "1",
                  "--delta", "0.01", "--out", out.string()});
    EXPECT_EQ(rc, 0);
    for (const char* f : {"report.json", "summary.csv", "metadata.json", "sweep.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    Json r = read_json(out / "report.json");
    EXPECT_EQ(r["command"], "bounds");
    EXPECT_TRUE(r["pass"].get<bool>());
    std::string sweep = adl::read_file((out / "sweep.csv").string());
    EXPECT_EQ(sweep.rfind("T,d,m,adl_bits,gen_gap\n", 0), 0u);
    std::string summary = adl::read_file((out / "summary.csv").string());
    EXPECT_EQ(summary.rfind("suite,tag,metric,value,bound,pass\n", 0), 0u);
}

TEST(Cli, ShatterBundleVerifies) {
    fs::path out = scratch("shatter");
    ASSERT_EQ(run({"shatter", "--d", "20", "--h", "20", "--seed", "7", "--out", out.string()}), 0);
    ASSERT_TRUE(fs::exists(out / "bundle.json"));
    fs::path out2 = scratch("shatter_verify");
    EXPECT_EQ(run({"shatter", "--seed", "7", "--verify", (out / "bundle.json").string(), "--out", out2.string()}), 0);
    Json r = read_json(out2 / "report.json");
    EXPECT_TRUE(r["pass"].get<bool>());
}

TEST(Cli, SameArgumentsGiveIdenticalReports) {
    fs::path out = scratch("determinism");
    std::vector<std::string> args{"concentration", "--d", "10", "--h", "10", "--trials", "10000",
                                  "--seed", "3", "--out", out.string()};
    ASSERT_EQ(run(args), 0);
    std::string first = adl::read_file((out / "report.json").string());
    std::string first_csv = adl::read_file((out / "summary.csv").string());
    ASSERT_EQ(run(args), 0);
    EXPECT_EQ(adl::read_file((out / "report.json").string()), first);
    EXPECT_EQ(adl::read_file((out / "summary.csv").string()), first_csv);
}

TEST(Cli, FlagsOverrideConfig) {
    fs::path out = scratch("config");
    fs::path cfg = out / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# concentration settings\n"
          << "d = 8\n"
          << "h=12\n"
          << "trials=10000\n"
          << "seed=5\n";
    }
    ASSERT_EQ(run({"concentration", "--config", cfg.string(), "--d", "6", "--out", out.string()}), 0);
    Json r = read_json(out / "report.json");
    EXPECT_EQ(r["config"]["d"].get<std::uint64_t>(), 6u);
    EXPECT_EQ(r["config"]["h"].get<std::uint64_t>(), 12u);
}

TEST(Cli, UnknownConfigKeyIsUsageError) {
    fs::path out = scratch("config_bad");
    fs::path cfg = out / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "seed=1\nwidth=4\n";
    }
    EXPECT_EQ(run({"concentration", "--config", cfg.string(), "--out", out.string()}), 2);
}
