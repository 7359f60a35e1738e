#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "../tools/commands.hpp"
#include "support.hpp"
#include "vrpts/routes.hpp"

namespace fs = std::filesystem;
namespace vt = vrpts::testing;

namespace {

struct Result {
    int code;
    std::string out;
};

// Runs the CLI binary and captures stdout plus stderr.
Result run(const std::string& args) {
    const auto log = fs::temp_directory_path() / ("vrpts_cli_" + std::to_string(::getpid()) + ".log");
    const std::string cmd = std::string(VRPTS_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(log);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("vrpts_cli_" + std::to_string(::getpid()) + "_"
                                           + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

const std::string kCvrp = vt::data_path("toy_cvrp.vrp");
const std::string kJd = vt::data_path("toy_jd.txt");

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("solve " + kCvrp + " --reps 0").code, 1);
    EXPECT_EQ(run("solve " + kCvrp + " --backend gpu").code, 1);
    EXPECT_EQ(run("solve " + kCvrp + " --segment-lens 1,2").code, 1);
    EXPECT_EQ(run("mask-stats " + kCvrp + " --theta 0").code, 1);
}

TEST_F(Cli, DataErrors) {
    std::ofstream(dir / "bad.vrp") << "NAME : bad\nTYPE : CVRP\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\n";
    const auto r = run("solve " + (dir / "bad.vrp").string() + " --out " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("CAPACITY"), std::string::npos);
    EXPECT_EQ(run("solve " + (dir / "missing.vrp").string()).code, 2);
}

TEST_F(Cli, SolveWritesRecordsAndValidates) {
    const auto out = dir / "results";
    const auto r = run("solve " + kCvrp + " --reps 2 --generations 5 --mu 4 --seed 7 --quiet --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto csv = slurp(out / "summary.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance,backend,reps,best_f,mean_f,mean_wall_time,feasible_runs");
    for (int seed : {7, 8}) {
        const auto base = out / ("toy-cvrp-12_scalar_s" + std::to_string(seed));
        const auto rec = nlohmann::json::parse(slurp(base.string() + ".json"));
        EXPECT_EQ(rec["seed"].get<int>(), seed);
        EXPECT_EQ(rec["instance"], "toy-cvrp-12");
        const auto v = run("validate " + kCvrp + " " + base.string() + ".sol --require-feasible");
        EXPECT_EQ(v.code, 0) << v.out;
        EXPECT_NE(v.out.find("(matches)"), std::string::npos);
    }
}

TEST_F(Cli, SolveGapColumnsNeedBks) {
    std::ofstream(dir / "bks.txt") << "# name value\ntoy-cvrp-12 370\n";
    const auto out = dir / "r";
    ASSERT_EQ(run("solve " + kCvrp + " --generations 3 --mu 3 --quiet --bks " + (dir / "bks.txt").string() + " --out "
                  + out.string())
                  .code,
              0);
    const auto csv = slurp(out / "summary.csv");
    EXPECT_NE(csv.find(",bks,gap_best,gap_mean"), std::string::npos);
    const auto out2 = dir / "r2";
    ASSERT_EQ(run("solve " + kCvrp + " --generations 3 --mu 3 --quiet --bks " + (dir / "none.txt").string() + " --out "
                  + out2.string())
                  .code,
              0);
    EXPECT_EQ(slurp(out2 / "summary.csv").find("gap"), std::string::npos);
}

TEST_F(Cli, IdenticalRunsGiveIdenticalSolutions) {
    for (const char* d : {"a", "b"})
        ASSERT_EQ(run("solve " + kJd + " --generations 4 --mu 4 --seed 3 --quiet --backend batch-node --out "
                      + (dir / d).string())
                      .code,
                  0);
    EXPECT_EQ(slurp(dir / "a" / "toy-jd-8_batch-node_s3.sol"), slurp(dir / "b" / "toy-jd-8_batch-node_s3.sol"));
}

TEST_F(Cli, ValidateRejectsDuplicatesAndWrongCost) {
    std::ofstream(dir / "dup.sol") << "Route #1: 1 2 3 4 5 6\nRoute #2: 6 7 8 9 10 11 12\nCost 1\n";
    const auto d = run("validate " + kCvrp + " " + (dir / "dup.sol").string());
    EXPECT_EQ(d.code, 2);
    EXPECT_NE(d.out.find("INVALID"), std::string::npos);

    const auto inst = vrpts::load_instance(kCvrp);
    const auto sol = vrpts::Solution::from_customer_lists(inst, {{1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11, 12}});
    std::string text = vrpts::write_solution(sol);
    std::ofstream(dir / "ok.sol") << text;
    const auto ok = run("validate " + kCvrp + " " + (dir / "ok.sol").string());
    EXPECT_EQ(ok.code, 0) << ok.out;
    text.replace(text.find("Cost "), std::string::npos, "Cost 1\n");
    std::ofstream(dir / "wrong.sol") << text;
    EXPECT_EQ(run("validate " + kCvrp + " " + (dir / "wrong.sol").string()).code, 2);
}

TEST_F(Cli, SpeedupReportsCategories) {
    const auto csv = dir / "speedup.csv";
    const auto r = run("speedup --generate 30 --variant vrptw --reps 1 --iterations 30 --backend batch-route --out "
                       + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto body = slurp(csv);
    EXPECT_EQ(body.substr(0, body.find('\n')), "instance,customers,category,seconds_a,seconds_b,speedup");
    for (const char* cat : {"XR", "XS", "TOS", "IR", "IS", "inter", "intra", "total"})
        EXPECT_NE(body.find("," + std::string(cat) + ","), std::string::npos) << cat;
    const auto self = run("speedup " + kCvrp + " --reps 1 --iterations 20 --backend scalar");
    EXPECT_EQ(self.code, 0) << self.out;
}

TEST_F(Cli, MaskStats) {
    const auto r = run("mask-stats " + kCvrp + " --theta 3");
    ASSERT_EQ(r.code, 0);
    // 12 customers keep 3 neighbours each, plus 2 depot edges per customer.
    EXPECT_NE(r.out.find("mask_true=" + std::to_string(12 * 3 + 24)), std::string::npos) << r.out;
}

TEST_F(Cli, InstanceRootAndDirectories) {
    fs::copy_file(kCvrp, dir / "a.vrp");
    fs::copy_file(kJd, dir / "b.txt");
    std::ofstream(dir / "a.sol") << "x";
    std::ofstream(dir / ".hidden") << "x";
    const auto list = vrpts::cli::resolve_instances(dir.string());
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(fs::path(list[0]).filename(), "a.vrp");
    setenv("VRPTS_INSTANCE_ROOT", dir.c_str(), 1);
    EXPECT_EQ(vrpts::cli::resolve_instances("b.txt").size(), 1u);
    unsetenv("VRPTS_INSTANCE_ROOT");
    EXPECT_THROW(vrpts::cli::resolve_instances("b.txt"), std::runtime_error);
}

TEST_F(Cli, BksFile) {
    std::ofstream(dir / "bks") << "# comment\nX-n101-k25 27591.0\nC1_2_1, 2698.6  # trailing\n\n";
    const auto b = vrpts::cli::read_bks((dir / "bks").string());
    EXPECT_EQ(b.at("X-n101-k25"), 27591.0);
    EXPECT_EQ(b.at("C1_2_1"), 2698.6);
    std::ofstream(dir / "bad") << "name\n";
    EXPECT_THROW(vrpts::cli::read_bks((dir / "bad").string()), std::exception);
}
