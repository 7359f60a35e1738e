#include "vrpts/search.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace vrpts {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

std::string_view to_string(BackendKind b) {
    switch (b) {
    case BackendKind::Scalar: return "scalar";
    case BackendKind::ScalarGranular: return "scalar-granular";
    case BackendKind::BatchNode: return "batch-node";
    case BackendKind::BatchEdge: return "batch-edge";
    case BackendKind::BatchRoute: return "batch-route";
    }
    return "?";
}

BackendKind backend_from_string(std::string_view s) {
    for (auto b : {BackendKind::Scalar, BackendKind::ScalarGranular, BackendKind::BatchNode, BackendKind::BatchEdge,
                   BackendKind::BatchRoute})
        if (to_string(b) == s) return b;
    throw std::invalid_argument("unknown backend '" + std::string(s) + "'");
}

bool needs_mask(BackendKind b) { return b == BackendKind::ScalarGranular || b == BackendKind::BatchEdge; }

std::unique_ptr<Evaluator> make_evaluator(BackendKind kind, const Instance& inst, const GranularMask* mask,
                                          int threads) {
    if (needs_mask(kind) && !mask) throw std::invalid_argument(std::string(to_string(kind)) + " needs a granular mask");
    switch (kind) {
    case BackendKind::Scalar: return std::make_unique<ScalarEvaluator>(inst);
    case BackendKind::ScalarGranular: return std::make_unique<ScalarEvaluator>(inst, mask);
    case BackendKind::BatchNode: return std::make_unique<BatchEvaluator>(inst, BatchOptions{Extraction::Node, threads});
    case BackendKind::BatchEdge:
        return std::make_unique<BatchEvaluator>(inst, BatchOptions{Extraction::Edge, threads, mask});
    case BackendKind::BatchRoute:
        return std::make_unique<BatchEvaluator>(inst, BatchOptions{Extraction::Route, threads});
    }
    throw std::invalid_argument("unknown backend");
}

// ---------------------------------------------------------------------------
// Descent

DescentResult descend(Solution& sol, Evaluator& ev, const std::vector<Operator>& ops, const PenaltyWeights& w,
                      const DescentOptions& opts) {
    DescentResult res;
    res.op_seconds.assign(ops.size(), 0.0);
    if (ops.empty()) {
        res.converged = true;
        return res;
    }
    const auto start = Clock::now();
    if (opts.reset) ev.reset(sol);
    std::size_t idx = 0, idle = 0;
    while (idle < ops.size()) {
        if (opts.max_iterations >= 0 && res.iterations >= opts.max_iterations) break;
        if (opts.deadline_s >= 0 && since(start) > opts.deadline_s) break;
        const auto t0 = Clock::now();
        const auto move = ev.best(sol, ops[idx], w);
        const double dt = since(t0);
        res.op_seconds[idx] += dt;
        res.eval_seconds += dt;
        ++res.iterations;
        if (move) {
            const auto change = sol.apply(*move);
            ev.update(sol, change);
            ++res.moves;
            idle = 0;
            if (opts.record_trace) res.trace.push_back(*move);
        } else {
            ++idle;
        }
        idx = (idx + 1) % ops.size();
    }
    res.converged = idle >= ops.size();
    return res;
}

LockstepReport run_lockstep(const Solution& start, Evaluator& a, Evaluator& b, const std::vector<Operator>& ops,
                            const PenaltyWeights& w, std::int64_t iterations) {
    LockstepReport rep;
    rep.seconds_a.assign(ops.size(), 0.0);
    rep.seconds_b.assign(ops.size(), 0.0);
    Solution sa = start, sb = start;
    a.reset(sa);
    b.reset(sb);
    std::size_t idx = 0, idle = 0;
    while (!ops.empty() && rep.iterations < iterations && idle < ops.size()) {
        auto t0 = Clock::now();
        const auto ma = a.best(sa, ops[idx], w);
        rep.seconds_a[idx] += since(t0);
        t0 = Clock::now();
        const auto mb = b.best(sb, ops[idx], w);
        rep.seconds_b[idx] += since(t0);
        ++rep.iterations;
        if (ma.has_value() != mb.has_value() || (ma && !(*ma == *mb))) {
            rep.identical = false;
            rep.divergence = "iteration " + std::to_string(rep.iterations) + " " + to_string(ops[idx]) + ": " +
                             (ma ? describe(*ma) : std::string("none")) + " vs " +
                             (mb ? describe(*mb) : std::string("none"));
            break;
        }
        if (ma) {
            a.update(sa, sa.apply(*ma));
            b.update(sb, sb.apply(*mb));
            rep.trace.push_back(*ma);
            ++rep.moves;
            idle = 0;
        } else {
            ++idle;
        }
        idx = (idx + 1) % ops.size();
    }
    rep.final_a = sa.penalized(w);
    rep.final_b = sb.penalized(w);
    if (rep.identical && (!(sa == sb) || rep.final_a != rep.final_b)) {
        rep.identical = false;
        rep.divergence = "final solutions differ";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Construction and recombination

Solution construct_initial(const Instance& inst, std::mt19937_64& rng) {
    const int n = inst.num_nodes();
    std::vector<int> unassigned(n > 0 ? n - 1 : 0);
    std::iota(unassigned.begin(), unassigned.end(), 1);
    std::vector<Route> routes;
    const SubseqAttr depot_end = singleton(inst, 0);

    while (!unassigned.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, unassigned.size() - 1);
        const std::size_t first = pick(rng);
        Route route{0, unassigned[first]};
        unassigned.erase(unassigned.begin() + static_cast<std::ptrdiff_t>(first));
        SubseqAttr acc = concat(inst, departure(inst), singleton(inst, route.back()));

        for (;;) {
            // The few nearest customers that keep the route feasible.
            std::vector<std::pair<double, std::size_t>> feasible;
            for (std::size_t k = 0; k < unassigned.size(); ++k) {
                const int v = unassigned[k];
                const SubseqAttr ext = concat(inst, acc, singleton(inst, v));
                const SubseqAttr closed = concat(inst, ext, depot_end);
                if (closed.load_max <= inst.capacity() && closed.warp <= 0.0)
                    feasible.emplace_back(inst.distance(route.back(), v), k);
            }
            if (feasible.empty()) break;
            const std::size_t keep = std::min<std::size_t>(3, feasible.size());
            std::partial_sort(feasible.begin(), feasible.begin() + keep, feasible.end());
            std::uniform_int_distribution<std::size_t> choose(0, keep - 1);
            const std::size_t k = feasible[choose(rng)].second;
            const int v = unassigned[k];
            acc = concat(inst, acc, singleton(inst, v));
            route.push_back(v);
            unassigned.erase(unassigned.begin() + static_cast<std::ptrdiff_t>(k));
        }
        route.push_back(0);
        routes.push_back(std::move(route));
    }
    return Solution(inst, std::move(routes));
}

namespace {

double route_score(const SubseqAttr& a, double capacity, const PenaltyWeights& w, bool used) {
    return w.mu2 * a.dist + w.w_load * load_excess(a.load_max, capacity) + w.w_tw * a.warp + (used ? w.mu1 : 0.0);
}

struct PrefixSuffix {
    std::vector<SubseqAttr> pre, suf;
};

PrefixSuffix prefix_suffix(const Instance& inst, const Route& r) {
    PrefixSuffix ps;
    const int n = static_cast<int>(r.size());
    ps.pre.resize(n);
    ps.suf.resize(n);
    ps.pre[0] = departure(inst);
    for (int k = 1; k < n; ++k) ps.pre[k] = concat(inst, ps.pre[k - 1], singleton(inst, r[k]));
    ps.suf[n - 1] = singleton(inst, r[n - 1]);
    for (int k = n - 2; k >= 1; --k) ps.suf[k] = concat(inst, singleton(inst, r[k]), ps.suf[k + 1]);
    return ps;
}

}  // namespace

void insert_customers(const Instance& inst, std::vector<Route>& routes, const std::vector<int>& customers,
                      const PenaltyWeights& w) {
    const double cap = inst.capacity();
    std::vector<PrefixSuffix> cache;
    cache.reserve(routes.size());
    for (const auto& r : routes) cache.push_back(prefix_suffix(inst, r));

    for (int v : customers) {
        const SubseqAttr sv = singleton(inst, v);
        // Opening a fresh route is always possible.
        const SubseqAttr alone = concat(inst, concat(inst, departure(inst), sv), singleton(inst, 0));
        double best = route_score(alone, cap, w, true);
        int best_r = -1, best_p = 0;
        for (std::size_t ri = 0; ri < routes.size(); ++ri) {
            const auto& r = routes[ri];
            const auto& ps = cache[ri];
            const int n = static_cast<int>(r.size());
            const double old = route_score(ps.pre[n - 1], cap, w, n > 2);
            for (int p = 0; p <= n - 2; ++p) {
                const SubseqAttr nr = concat(inst, concat(inst, ps.pre[p], sv), ps.suf[p + 1]);
                const double delta = route_score(nr, cap, w, true) - old;
                if (delta < best) {
                    best = delta;
                    best_r = static_cast<int>(ri);
                    best_p = p;
                }
            }
        }
        if (best_r < 0) {
            routes.push_back(Route{0, v, 0});
            cache.push_back(prefix_suffix(inst, routes.back()));
        } else {
            auto& r = routes[best_r];
            r.insert(r.begin() + best_p + 1, v);
            cache[best_r] = prefix_suffix(inst, r);
        }
    }
}

Solution crossover(const Instance& inst, const Solution& p1, const Solution& p2, const PenaltyWeights& w,
                   std::mt19937_64& rng) {
    std::vector<std::vector<int>> pools[2] = {p1.customer_lists(), p2.customer_lists()};
    for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t total = pools[0].size() + pools[1].size();
    // Inherit roughly a third to two thirds of the parents' routes.
    std::uniform_real_distribution<double> frac(0.3, 0.7);
    const auto quota = static_cast<std::size_t>(frac(rng) * static_cast<double>(std::max<std::size_t>(total, 1)) / 2.0);

    std::vector<char> taken(inst.num_nodes(), 0);
    std::vector<Route> routes;
    std::size_t next[2] = {0, 0};
    int side = static_cast<int>(rng() & 1U);
    while (routes.size() < std::max<std::size_t>(quota, 1) && (next[0] < pools[0].size() || next[1] < pools[1].size())) {
        auto& pool = pools[side];
        while (next[side] < pool.size()) {
            const auto& cand = pool[next[side]++];
            if (std::none_of(cand.begin(), cand.end(), [&](int v) { return taken[v]; })) {
                Route r{0};
                for (int v : cand) {
                    taken[v] = 1;
                    r.push_back(v);
                }
                r.push_back(0);
                routes.push_back(std::move(r));
                break;
            }
        }
        side ^= 1;
    }
    std::vector<int> rest;
    for (int v = 1; v < inst.num_nodes(); ++v)
        if (!taken[v]) rest.push_back(v);
    std::shuffle(rest.begin(), rest.end(), rng);
    insert_customers(inst, routes, rest, w);
    return Solution(inst, std::move(routes));
}

// ---------------------------------------------------------------------------
// Memetic driver

Family family_of(const Instance& inst) {
    switch (inst.variant()) {
    case Variant::Cvrp: return Family::X;
    case Variant::Vrptw: return Family::GH;
    case Variant::Vrpspdtw: return Family::JD;
    }
    return Family::X;
}

Termination default_termination(const Instance& inst) {
    Termination t;
    const int nc = inst.num_customers();
    switch (family_of(inst)) {
    case Family::X: t.time_limit_s = nc * 240.0 / 100.0; break;
    case Family::GH: t.time_limit_s = nc <= 200 ? 1800.0 : nc <= 800 ? 3600.0 : 7200.0; break;
    case Family::JD:
        t.time_limit_s = 7200.0;
        t.max_generations = 5000;
        t.stagnation = 500;
        break;
    }
    return t;
}

SearchConfig default_config(const Instance& inst) {
    SearchConfig c;
    switch (family_of(inst)) {
    case Family::X: c.population = 40, c.theta = 20; break;
    case Family::GH: c.population = 10, c.theta = 100; break;
    case Family::JD: c.population = 10, c.theta = 80; break;
    }
    c.termination = default_termination(inst);
    return c;
}

nlohmann::json SearchConfig::to_json() const {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& op : operators) ops.push_back(to_string(op));
    nlohmann::json j{{"population", population},
                     {"theta", theta},
                     {"operators", ops},
                     {"seed", seed},
                     {"backend", to_string(backend)},
                     {"threads", threads},
                     {"repair_rounds", repair_rounds},
                     {"time_limit_s", termination.time_limit_s},
                     {"max_generations", termination.max_generations},
                     {"stagnation", termination.stagnation}};
    if (penalties)
        j["penalties"] = {{"w_load", penalties->w_load}, {"w_tw", penalties->w_tw}, {"mu1", penalties->mu1},
                          {"mu2", penalties->mu2}};
    return j;
}

nlohmann::json RunRecord::to_json() const {
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& p : trajectory) traj.push_back({{"time_s", p.time_s}, {"generation", p.generation}, {"f", p.objective}});
    return {{"instance", instance},
            {"seed", seed},
            {"backend", backend},
            {"config", config},
            {"f", best_objective},
            {"feasible", feasible},
            {"M", routes},
            {"distance", distance},
            {"generations", generations},
            {"wall_time", wall_time},
            {"f_trajectory", traj},
            {"counters", counters}};
}

namespace {

struct Member {
    Solution sol;
    double fitness;
};

// Descent under the base weights; an infeasible result is re-descended with
// heavier penalties a few times.
void improve(Solution& sol, Evaluator& ev, const std::vector<Operator>& ops, const PenaltyWeights& w, int repair_rounds,
             double deadline_s) {
    DescentOptions opts;
    opts.deadline_s = deadline_s;
    descend(sol, ev, ops, w, opts);
    PenaltyWeights heavy = w;
    for (int k = 0; k < repair_rounds && !sol.feasible(); ++k) {
        heavy.w_load *= 10.0;
        heavy.w_tw *= 10.0;
        descend(sol, ev, ops, heavy, opts);
    }
}

}  // namespace

MemeticResult run_memetic(const Instance& inst, const SearchConfig& config) {
    if (config.population < 1) throw std::invalid_argument("population must be at least 1");
    if (!config.termination.active()) throw std::invalid_argument("no termination criterion is active");
    const auto start = Clock::now();
    const auto remaining = [&] {
        return config.termination.time_limit_s > 0 ? std::max(0.0, config.termination.time_limit_s - since(start)) : -1.0;
    };
    const auto out_of_time = [&] { return config.termination.time_limit_s > 0 && since(start) >= config.termination.time_limit_s; };

    const auto ops = config.operators.empty() ? default_operators(inst) : config.operators;
    const PenaltyWeights w = config.penalties.value_or(default_penalties(inst));
    std::optional<GranularMask> mask;
    if (needs_mask(config.backend)) mask = build_granular_mask(inst, config.theta);
    auto ev = make_evaluator(config.backend, inst, mask ? &*mask : nullptr, config.threads);
    std::mt19937_64 rng(config.seed);

    MemeticResult out;
    RunRecord& rec = out.record;
    rec.instance = inst.name();
    rec.seed = config.seed;
    rec.backend = std::string(to_string(config.backend));
    rec.config = config.to_json();

    std::optional<Solution> best;
    std::optional<Solution> best_any;
    auto consider = [&](const Solution& s, std::int64_t gen) {
        if (!best_any || s.penalized(w) < best_any->penalized(w)) best_any = s;
        if (s.feasible() && (!best || s.objective() < best->objective())) {
            best = s;
            rec.trajectory.push_back({since(start), gen, s.objective()});
            return true;
        }
        return false;
    };

    std::vector<Member> pop;
    for (int i = 0; i < config.population; ++i) {
        Solution s = construct_initial(inst, rng);
        improve(s, *ev, ops, w, config.repair_rounds, remaining());
        consider(s, 0);
        const double fit = s.penalized(w);
        pop.push_back({std::move(s), fit});
        if (out_of_time() && !pop.empty()) break;
    }

    std::int64_t gen = 0, stagnant = 0;
    auto tournament = [&]() -> const Solution& {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        const auto& a = pop[pick(rng)];
        const auto& b = pop[pick(rng)];
        return a.fitness <= b.fitness ? a.sol : b.sol;
    };
    for (;;) {
        const auto& t = config.termination;
        if (out_of_time()) break;
        if (t.max_generations >= 0 && gen >= t.max_generations) break;
        if (t.stagnation >= 0 && stagnant >= t.stagnation) break;

        const Solution& p1 = tournament();
        const Solution& p2 = tournament();
        Solution child = crossover(inst, p1, p2, w, rng);
        improve(child, *ev, ops, w, config.repair_rounds, remaining());
        ++gen;
        const bool improved = consider(child, gen);
        stagnant = improved ? 0 : stagnant + 1;

        const double fit = child.penalized(w);
        auto worst = std::max_element(pop.begin(), pop.end(),
                                      [](const Member& a, const Member& b) { return a.fitness < b.fitness; });
        if (fit < worst->fitness) *worst = Member{std::move(child), fit};
    }

    out.best = best ? *best : *best_any;
    rec.best_objective = out.best.objective();
    rec.feasible = out.best.feasible();
    rec.routes = out.best.used_routes();
    rec.distance = out.best.distance();
    rec.generations = gen;
    rec.wall_time = since(start);
    rec.counters = ev->counters();
    return out;
}

}  // namespace vrpts
