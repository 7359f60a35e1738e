#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vrpts::cli {

// Exit codes shared by every subcommand.
enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct SolveArgs {
    std::vector<std::string> instances;
    std::string backend = "scalar";
    std::optional<int> theta;
    std::optional<int> population;
    std::optional<double> mu1, mu2;
    std::uint64_t seed = 1;
    int reps = 1;
    double time_scale = 1.0;
    std::optional<std::int64_t> generations;
    std::string bks;
    std::string out = "results";
    std::string operators;
    std::string segment_lens;
    int jobs = 1;
    bool quiet = false;
};

struct SpeedupArgs {
    std::vector<std::string> instances;
    std::vector<int> generate;  // customer counts of generated uniform instances
    std::string variant = "cvrp";
    std::string backend_a = "scalar";
    std::string backend_b = "batch-node";
    std::optional<int> theta;
    std::uint64_t seed = 1;
    int reps = 3;
    std::int64_t iterations = 100;
    std::string operators;
    std::string segment_lens;
    std::string out;
};

struct ValidateArgs {
    std::string instance;
    std::string solution;
    bool require_feasible = false;
};

struct MaskStatsArgs {
    std::vector<std::string> instances;
    int theta = 20;
    std::uint64_t seed = 1;
};

int cmd_solve(const SolveArgs& a);
int cmd_speedup(const SpeedupArgs& a);
int cmd_validate(const ValidateArgs& a);
int cmd_mask_stats(const MaskStatsArgs& a);

// Instance files named by `arg`: a file, or every file in a directory.
// Relative names that do not exist are retried under $VRPTS_INSTANCE_ROOT.
std::vector<std::string> resolve_instances(const std::string& arg);

// "name value" pairs, one per line; '#' starts a comment.
std::map<std::string, double> read_bks(const std::string& path);

}  // namespace vrpts::cli
