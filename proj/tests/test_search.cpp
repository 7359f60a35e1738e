#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vrpts/generate.hpp"
#include "vrpts/search.hpp"

using namespace vrpts;
namespace vt = vrpts::testing;

namespace {

void expect_covers(const Instance& inst, const Solution& s) {
    std::multiset<int> seen;
    for (const auto& r : s.routes())
        for (std::size_t i = 1; i + 1 < r.size(); ++i) seen.insert(r[i]);
    ASSERT_EQ(static_cast<int>(seen.size()), inst.num_customers());
    for (int c = 1; c <= inst.num_customers(); ++c) EXPECT_EQ(seen.count(c), 1u);
}

SearchConfig small_config(const Instance& inst, BackendKind backend, std::uint64_t seed) {
    SearchConfig c = default_config(inst);
    c.population = 4;
    c.theta = 5;
    c.backend = backend;
    c.seed = seed;
    c.termination = Termination{};
    c.termination.max_generations = 6;
    return c;
}

}  // namespace

TEST(Backends, NamesRoundTrip) {
    for (auto b : {BackendKind::Scalar, BackendKind::ScalarGranular, BackendKind::BatchNode, BackendKind::BatchEdge,
                   BackendKind::BatchRoute})
        EXPECT_EQ(backend_from_string(to_string(b)), b);
    EXPECT_THROW(backend_from_string("gpu"), std::invalid_argument);
    EXPECT_TRUE(needs_mask(BackendKind::BatchEdge));
    EXPECT_FALSE(needs_mask(BackendKind::BatchNode));
    const auto inst = load_instance(vt::data_path("toy_cvrp.vrp"));
    EXPECT_THROW(make_evaluator(BackendKind::BatchEdge, inst, nullptr), std::invalid_argument);
}

TEST(Descend, ReachesAFixedPoint) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 12; ++t) {
        const auto inst = vt::random_instance(rng, 15, {vt::kVariants[t % 3], t % 2 == 0, false});
        Solution s = vt::random_solution(rng, inst, 4);
        const auto w = default_penalties(inst);
        const auto ops = default_operators(inst);
        const double before = s.penalized(w);
        auto ev = make_evaluator(BackendKind::Scalar, inst, nullptr);
        DescentOptions o;
        o.record_trace = true;
        const auto res = descend(s, *ev, ops, w, o);
        EXPECT_TRUE(res.converged);
        EXPECT_LE(s.penalized(w), before);
        EXPECT_EQ(res.moves, static_cast<std::int64_t>(res.trace.size()));
        // Fresh scan: nothing improves.
        const SolutionAttrs attrs(inst, s);
        for (const auto& op : ops) EXPECT_FALSE(eval_operator_scalar(inst, s, attrs, op, w).has_value()) << to_string(op);
    }
}

TEST(Descend, MonotoneAlongTheTrace) {
    std::mt19937_64 rng(2);
    const auto inst = vt::random_instance(rng, 25, {Variant::Vrpspdtw, true, false});
    const Solution start = vt::random_solution(rng, inst, 6);
    const auto w = default_penalties(inst);
    Solution s = start;
    auto ev = make_evaluator(BackendKind::Scalar, inst, nullptr);
    DescentOptions o;
    o.record_trace = true;
    const auto res = descend(s, *ev, default_operators(inst), w, o);
    ASSERT_GT(res.moves, 0);
    Solution replay = start;
    double cost = replay.penalized(w);
    for (const auto& m : res.trace) {
        replay.apply(m);
        const double next = replay.penalized(w);
        EXPECT_LT(next, cost);
        EXPECT_EQ(next - cost, m.score);
        cost = next;
    }
    EXPECT_EQ(replay, s);
}

TEST(Descend, LocalOptimumIsReturnedUnchanged) {
    std::mt19937_64 rng(3);
    const auto inst = vt::random_instance(rng, 15, {});
    Solution s = vt::random_solution(rng, inst, 3);
    auto ev = make_evaluator(BackendKind::Scalar, inst, nullptr);
    const auto ops = default_operators(inst);
    const auto w = default_penalties(inst);
    descend(s, *ev, ops, w);
    const Solution fixed = s;
    const auto res = descend(s, *ev, ops, w);
    EXPECT_EQ(s, fixed);
    EXPECT_EQ(res.moves, 0);
    EXPECT_EQ(res.iterations, static_cast<std::int64_t>(ops.size()));
}

TEST(Descend, IterationCapIsHonoured) {
    std::mt19937_64 rng(4);
    const auto inst = vt::random_instance(rng, 30, {});
    Solution s = vt::random_solution(rng, inst, 10);
    auto ev = make_evaluator(BackendKind::Scalar, inst, nullptr);
    DescentOptions o;
    o.max_iterations = 5;
    const auto res = descend(s, *ev, default_operators(inst), default_penalties(inst), o);
    EXPECT_EQ(res.iterations, 5);
    EXPECT_FALSE(res.converged);
}

TEST(Lockstep, AllBackendsFollowTheScalarTrajectory) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 9; ++t) {
        const auto inst = vt::random_instance(rng, 20, {vt::kVariants[t % 3], t % 2 == 0, false});
        const auto mask = build_granular_mask(inst, 4);
        const Solution start = vt::random_solution(rng, inst, 6);
        const auto w = default_penalties(inst);
        const auto ops = default_operators(inst);
        for (auto [a, b] : {std::pair{BackendKind::Scalar, BackendKind::BatchNode},
                            {BackendKind::Scalar, BackendKind::BatchRoute},
                            {BackendKind::ScalarGranular, BackendKind::BatchEdge}}) {
            auto ea = make_evaluator(a, inst, &mask);
            auto eb = make_evaluator(b, inst, &mask);
            const auto rep = run_lockstep(start, *ea, *eb, ops, w, 100);
            EXPECT_TRUE(rep.identical) << rep.divergence;
            EXPECT_EQ(rep.final_a, rep.final_b);
            EXPECT_EQ(rep.seconds_a.size(), ops.size());
        }
    }
}

TEST(Lockstep, SixCustomerDescentMatchesScalar) {
    std::mt19937_64 rng(6);
    const auto inst = vt::random_instance(rng, 6, {});
    const Solution start = vt::random_solution(rng, inst, 6);
    const auto w = default_penalties(inst);
    Solution a = start, b = start;
    auto ea = make_evaluator(BackendKind::Scalar, inst, nullptr);
    auto eb = make_evaluator(BackendKind::BatchNode, inst, nullptr);
    DescentOptions o;
    o.record_trace = true;
    const auto ra = descend(a, *ea, default_operators(inst), w, o);
    const auto rb = descend(b, *eb, default_operators(inst), w, o);
    EXPECT_EQ(ra.trace, rb.trace);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.penalized(w), b.penalized(w));
}

TEST(Construct, SingleCustomer) {
    InstanceSpec spec;
    spec.capacity = 5;
    spec.nodes = {Node{0}, Node{1, 3, 4, 2}};
    const Instance inst(spec);
    std::mt19937_64 rng(7);
    const auto s = construct_initial(inst, rng);
    EXPECT_EQ(s.used_routes(), 1);
    EXPECT_EQ(s.customer_lists(), (std::vector<std::vector<int>>{{1}}));
}

TEST(Construct, TightCapacityForcesOnePerRoute) {
    std::mt19937_64 rng(8);
    InstanceSpec spec;
    spec.capacity = 7;
    spec.nodes.push_back(Node{0});
    for (int i = 1; i <= 10; ++i) spec.nodes.push_back(Node{i, double(i * 3 % 17), double(i * 7 % 13), 7});
    const Instance inst(spec);
    const auto s = construct_initial(inst, rng);
    EXPECT_EQ(s.used_routes(), 10);
    EXPECT_TRUE(s.feasible());
}

TEST(Construct, FeasibleOnFixturesAndCoversRandomInstances) {
    std::mt19937_64 rng(9);
    const auto cvrp = load_instance(vt::data_path("toy_cvrp.vrp"));
    for (int i = 0; i < 20; ++i) {
        const auto s = construct_initial(cvrp, rng);
        EXPECT_EQ(violations(cvrp, s).load, 0);
        EXPECT_EQ(violations(cvrp, s).warp, 0);
    }
    for (int t = 0; t < 20; ++t) {
        const auto inst = vt::random_instance(rng, 30, {vt::kVariants[t % 3], true, false});
        expect_covers(inst, construct_initial(inst, rng));
    }
}

TEST(Crossover, ChildCoversEveryCustomer) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 30; ++t) {
        const auto inst = vt::random_instance(rng, 25, {vt::kVariants[t % 3], true, false});
        const auto p1 = construct_initial(inst, rng), p2 = vt::random_solution(rng, inst, 8);
        const auto child = crossover(inst, p1, p2, default_penalties(inst), rng);
        expect_covers(inst, child);
        const auto self = crossover(inst, p1, p1, default_penalties(inst), rng);
        expect_covers(inst, self);
    }
}

TEST(Insertion, CheapestPositionIsChosen) {
    InstanceSpec spec;
    spec.policy = DistancePolicy::Exact;
    spec.capacity = 10;
    // Between 1 and 2 adds 2*sqrt(29) - 10; the other gaps cost far more.
    spec.nodes = {Node{0, 0, 0}, Node{1, 10, 0, 1}, Node{2, 10, 10, 1}, Node{3, 12, 5, 1}};
    const Instance inst(spec);
    std::vector<Route> routes{{0, 1, 2, 0}};
    insert_customers(inst, routes, {3}, default_penalties(inst));
    ASSERT_EQ(routes.size(), 1u);
    EXPECT_EQ(routes[0], (Route{0, 1, 3, 2, 0}));
}

TEST(Memetic, ReproducibleAndBackendIndependent) {
    const auto inst = load_instance(vt::data_path("toy_solomon.txt"));
    const auto a = run_memetic(inst, small_config(inst, BackendKind::Scalar, 3));
    const auto b = run_memetic(inst, small_config(inst, BackendKind::Scalar, 3));
    const auto c = run_memetic(inst, small_config(inst, BackendKind::BatchNode, 3));
    EXPECT_EQ(a.best, b.best);
    EXPECT_EQ(a.best, c.best);
    EXPECT_EQ(a.record.best_objective, c.record.best_objective);
    EXPECT_EQ(a.record.generations, 6);
    expect_covers(inst, a.best);
}

TEST(Memetic, SinglePopulationMember) {
    const auto inst = load_instance(vt::data_path("toy_cvrp.vrp"));
    auto cfg = small_config(inst, BackendKind::Scalar, 1);
    cfg.population = 1;
    const auto r = run_memetic(inst, cfg);
    EXPECT_TRUE(r.best.feasible());
    EXPECT_EQ(r.record.best_objective, r.best.objective());
}

TEST(Memetic, FixtureOptimaAreReached) {
    // Known optima of the hand-sized fixtures, found by long runs.
    const std::pair<const char*, double> cases[] = {{"toy_cvrp.vrp", 370}, {"toy_jd.txt", 736}};
    for (const auto& [file, best] : cases) {
        const auto inst = load_instance(vt::data_path(file));
        auto cfg = small_config(inst, BackendKind::Scalar, 1);
        cfg.population = 10;
        cfg.termination.max_generations = 200;
        const auto r = run_memetic(inst, cfg);
        EXPECT_TRUE(r.best.feasible()) << file;
        EXPECT_EQ(r.record.best_objective, best) << file;
    }
}

TEST(Memetic, RunRecordSchema) {
    const auto inst = load_instance(vt::data_path("toy_jd.txt"));
    const auto r = run_memetic(inst, small_config(inst, BackendKind::BatchEdge, 2));
    const auto j = r.record.to_json();
    for (const char* k : {"instance", "seed", "backend", "config", "f", "feasible", "M", "distance", "generations",
                          "wall_time", "f_trajectory", "counters"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["backend"], "batch-edge");
    EXPECT_EQ(j["M"].get<int>(), r.best.used_routes());
    ASSERT_FALSE(j["f_trajectory"].empty());
    double last = 1e300;
    for (const auto& p : j["f_trajectory"]) {
        EXPECT_LE(p["f"].get<double>(), last);
        last = p["f"].get<double>();
    }
}

TEST(Termination, FamilyBudgets) {
    const auto x = load_instance(vt::data_path("toy_cvrp.vrp"));
    const auto tx = default_termination(x);
    EXPECT_DOUBLE_EQ(tx.time_limit_s, 12 * 240.0 / 100);
    const auto jd = load_instance(vt::data_path("toy_jd.txt"));
    const auto tj = default_termination(jd);
    EXPECT_EQ(tj.max_generations, 5000);
    EXPECT_EQ(tj.stagnation, 500);
    EXPECT_EQ(tj.time_limit_s, 7200);
    EXPECT_EQ(family_of(load_instance(vt::data_path("toy_solomon.txt"))), Family::GH);
    EXPECT_EQ(default_config(x).population, 40);
    EXPECT_EQ(default_config(x).theta, 20);
}

TEST(Generate, UniformInstancesAreWellFormed) {
    for (auto v : vt::kVariants) {
        GeneratorOptions o;
        o.customers = 50;
        o.variant = v;
        o.seed = 4;
        const auto inst = generate_uniform(o);
        EXPECT_EQ(inst.num_customers(), 50);
        EXPECT_EQ(inst.variant(), v);
        EXPECT_TRUE(inst.integral());
        std::mt19937_64 rng(1);
        const auto s = construct_initial(inst, rng);
        expect_covers(inst, s);
        const auto again = generate_uniform(o);
        EXPECT_EQ(to_json(inst), to_json(again));
    }
}
