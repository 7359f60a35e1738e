#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrpts/eval_batch.hpp"
#include "vrpts/eval_scalar.hpp"
#include "vrpts/evaluator.hpp"
#include "vrpts/routes.hpp"

namespace vrpts {

enum class BackendKind { Scalar, ScalarGranular, BatchNode, BatchEdge, BatchRoute };

std::string_view to_string(BackendKind b);
BackendKind backend_from_string(std::string_view s);
bool needs_mask(BackendKind b);

// `mask` must outlive the evaluator; it is only read by granular backends.
std::unique_ptr<Evaluator> make_evaluator(BackendKind kind, const Instance& inst, const GranularMask* mask,
                                          int threads = 1);

struct DescentOptions {
    std::int64_t max_iterations = -1;  // operator evaluations; -1 = until a fixed point
    double deadline_s = -1.0;          // wall-clock cutoff in seconds from start; -1 = none
    bool record_trace = false;
    bool reset = true;                 // call evaluator.reset() first
};

struct DescentResult {
    std::int64_t iterations = 0;
    std::int64_t moves = 0;
    bool converged = false;
    double eval_seconds = 0.0;
    std::vector<double> op_seconds;  // per configured operator
    std::vector<Move> trace;
};

// Best-improvement descent, round-robin over `ops`. Stops after a full sweep
// without an accepted move (or at the iteration cap / deadline).
DescentResult descend(Solution& sol, Evaluator& ev, const std::vector<Operator>& ops, const PenaltyWeights& w,
                      const DescentOptions& opts = {});

// Randomised nearest-neighbour routes, opening a new route whenever the next
// customer would overload the vehicle or add time warp.
Solution construct_initial(const Instance& inst, std::mt19937_64& rng);

// Route inheritance alternating between parents, then cheapest insertion of
// the customers left over.
Solution crossover(const Instance& inst, const Solution& p1, const Solution& p2, const PenaltyWeights& w,
                   std::mt19937_64& rng);

// Cheapest penalised insertion of `customers` (in the given order).
void insert_customers(const Instance& inst, std::vector<Route>& routes, const std::vector<int>& customers,
                      const PenaltyWeights& w);

// Two evaluators driven in lockstep from the same start: each iteration asks
// both for the best move of the next operator and applies it to both copies.
struct LockstepReport {
    std::int64_t iterations = 0;
    std::int64_t moves = 0;
    bool identical = true;
    std::string divergence;  // first mismatch, empty when identical
    std::vector<double> seconds_a, seconds_b;  // per operator
    std::vector<Move> trace;
    double final_a = 0.0, final_b = 0.0;       // penalised objectives
};

LockstepReport run_lockstep(const Solution& start, Evaluator& a, Evaluator& b, const std::vector<Operator>& ops,
                            const PenaltyWeights& w, std::int64_t iterations);

struct Termination {
    double time_limit_s = -1.0;
    std::int64_t max_generations = -1;
    std::int64_t stagnation = -1;

    bool active() const { return time_limit_s > 0 || max_generations >= 0 || stagnation >= 0; }
};

enum class Family { X, GH, JD };
Family family_of(const Instance& inst);
// Budgets of the benchmark protocol, before any time scaling.
Termination default_termination(const Instance& inst);

struct SearchConfig {
    int population = 10;
    int theta = 20;
    std::vector<Operator> operators;  // empty = default_operators()
    std::optional<PenaltyWeights> penalties;
    Termination termination;
    std::uint64_t seed = 1;
    BackendKind backend = BackendKind::Scalar;
    int threads = 1;
    int repair_rounds = 3;

    nlohmann::json to_json() const;
};

// Table defaults per family: population 40/10/10 and theta 20/100/80.
SearchConfig default_config(const Instance& inst);

struct TrajectoryPoint {
    double time_s;
    std::int64_t generation;
    double objective;
};

struct RunRecord {
    std::string instance;
    std::uint64_t seed = 0;
    std::string backend;
    nlohmann::json config;
    double best_objective = 0.0;
    bool feasible = false;
    int routes = 0;
    double distance = 0.0;
    std::int64_t generations = 0;
    double wall_time = 0.0;
    std::vector<TrajectoryPoint> trajectory;
    nlohmann::json counters;

    nlohmann::json to_json() const;
};

struct MemeticResult {
    Solution best;
    RunRecord record;
};

MemeticResult run_memetic(const Instance& inst, const SearchConfig& config);

}  // namespace vrpts
