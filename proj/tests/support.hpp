#pragma once

// Test-side generators and brute-force oracles. Nothing here calls into the
// library's own simulation or move code, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vrpts/model.hpp"
#include "vrpts/moves.hpp"
#include "vrpts/routes.hpp"

namespace vrpts::testing {

#ifndef VRPTS_TEST_DATA
#define VRPTS_TEST_DATA "tests/data"
#endif

inline std::string data_path(const std::string& name) { return std::string(VRPTS_TEST_DATA) + "/" + name; }

struct RandomOptions {
    Variant variant = Variant::Cvrp;
    bool integral = true;
    bool matrix = false;  // asymmetric travel times read as a given matrix
    double tightness = 0.25;  // capacity as a fraction of total demand
};

inline Instance random_instance(std::mt19937_64& rng, int customers, const RandomOptions& o) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto num = [&](double lo, double hi) {
        const double v = lo + (hi - lo) * U(rng);
        return o.integral ? std::floor(v) : v;
    };
    InstanceSpec spec;
    spec.name = "rand";
    spec.variant = o.variant;
    spec.policy = o.matrix ? DistancePolicy::MatrixGiven : (o.integral ? DistancePolicy::RoundNearest : DistancePolicy::Exact);
    const bool tw = o.variant != Variant::Cvrp;
    const double horizon = 600;
    Node depot;
    depot.x = num(0, 100);
    depot.y = num(0, 100);
    depot.tw_close = tw ? horizon + 200 : 0;
    spec.nodes.push_back(depot);
    double total = 0;
    for (int i = 1; i <= customers; ++i) {
        Node n;
        n.id = i;
        n.x = num(0, 100);
        n.y = num(0, 100);
        n.delivery = num(0, 11);
        if (o.variant == Variant::Vrpspdtw) n.pickup = num(0, 11);
        if (tw) {
            n.tw_open = num(0, horizon - 100);
            n.tw_close = n.tw_open + num(5, 120);
            n.service = num(0, 15);
        }
        total += std::max(n.delivery, n.pickup);
        spec.nodes.push_back(n);
    }
    spec.capacity = std::max(11.0, std::ceil(total * o.tightness));
    spec.mu1 = o.variant == Variant::Vrpspdtw ? 50 : 0;
    spec.mu2 = 1;
    if (o.matrix) {
        const std::size_t n = spec.nodes.size();
        spec.distances.resize(n * n);
        spec.times.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double e = std::hypot(spec.nodes[i].x - spec.nodes[j].x, spec.nodes[i].y - spec.nodes[j].y);
                spec.distances[i * n + j] = o.integral ? std::round(e) : e;
                spec.times[i * n + j] = spec.distances[i * n + j] + num(0, 10);
            }
    }
    return Instance(std::move(spec));
}

// Random partition of the customers into 1..max_routes non-empty routes.
inline std::vector<Route> random_routes(std::mt19937_64& rng, int customers, int max_routes) {
    std::vector<int> perm(customers);
    for (int i = 0; i < customers; ++i) perm[i] = i + 1;
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k = std::uniform_int_distribution<int>(1, std::max(1, std::min(max_routes, customers)))(rng);
    std::vector<int> cuts(perm.size() > 0 ? perm.size() - 1 : 0);
    for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = static_cast<int>(i + 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(k - 1);
    cuts.push_back(0);
    cuts.push_back(customers);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Route> routes;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        Route r{0};
        for (int i = cuts[c]; i < cuts[c + 1]; ++i) r.push_back(perm[i]);
        r.push_back(0);
        routes.push_back(r);
    }
    return routes;
}

inline Solution random_solution(std::mt19937_64& rng, const Instance& inst, int max_routes) {
    return Solution(inst, random_routes(rng, inst.num_customers(), max_routes));
}

// Event simulation written from the time-warp definition.
struct Sim {
    double distance = 0;
    double max_load = 0;
    double warp = 0;
    double duration = 0;
};

inline Sim simulate(const Instance& inst, const std::vector<int>& route) {
    Sim s;
    double load = 0;
    for (std::size_t i = 1; i + 1 < route.size(); ++i) load += inst.node(route[i]).delivery;
    s.max_load = load;
    const double t0 = inst.node(0).tw_open;
    double clock = t0;
    for (std::size_t i = 1; i < route.size(); ++i) {
        const int u = route[i - 1], v = route[i];
        const Node& nv = inst.node(v);
        s.distance += inst.distance(u, v);
        double arrive = clock + inst.travel_time(u, v);
        if (arrive > nv.tw_close) {
            s.warp += arrive - nv.tw_close;
            arrive = nv.tw_close;
        }
        clock = std::max(arrive, nv.tw_open) + nv.service;
        load += nv.pickup - nv.delivery;
        s.max_load = std::max(s.max_load, load);
    }
    s.duration = clock - t0 + s.warp;
    return s;
}

struct Totals {
    double distance = 0;
    double load = 0;
    double warp = 0;
    int used = 0;
};

inline Totals totals(const Instance& inst, const std::vector<Route>& routes) {
    Totals t;
    for (const auto& r : routes) {
        const Sim s = simulate(inst, r);
        t.distance += s.distance;
        t.load += std::max(s.max_load - inst.capacity(), 0.0);
        t.warp += s.warp;
        t.used += r.size() > 2 ? 1 : 0;
    }
    return t;
}

// Move semantics restated on node ids rather than position arithmetic.
inline std::vector<Route> apply_by_hand(std::vector<Route> routes, const Move& m) {
    Route& A = routes[m.route_a];
    Route& B = routes[m.route_b];
    auto slice = [](const Route& r, int from, int len) { return Route(r.begin() + from, r.begin() + from + len); };
    switch (m.kind) {
    case MoveKind::InterRelocate: {
        const Route seg = slice(A, m.pos_a, m.len_a);
        const int anchor = B[m.pos_b];
        A.erase(A.begin() + m.pos_a, A.begin() + m.pos_a + m.len_a);
        B.insert(std::find(B.begin(), B.end(), anchor) + 1, seg.begin(), seg.end());
        break;
    }
    case MoveKind::InterSwap: {
        const Route sa = slice(A, m.pos_a, m.len_a), sb = slice(B, m.pos_b, m.len_b);
        A.erase(A.begin() + m.pos_a, A.begin() + m.pos_a + m.len_a);
        A.insert(A.begin() + m.pos_a, sb.begin(), sb.end());
        B.erase(B.begin() + m.pos_b, B.begin() + m.pos_b + m.len_b);
        B.insert(B.begin() + m.pos_b, sa.begin(), sa.end());
        break;
    }
    case MoveKind::TwoOptStar: {
        const Route ta(A.begin() + m.pos_a + 1, A.end()), tb(B.begin() + m.pos_b + 1, B.end());
        A.resize(m.pos_a + 1);
        B.resize(m.pos_b + 1);
        A.insert(A.end(), tb.begin(), tb.end());
        B.insert(B.end(), ta.begin(), ta.end());
        break;
    }
    case MoveKind::IntraRelocate: {
        if (m.pos_b >= m.pos_a - 1 && m.pos_b <= m.pos_a + m.len_a - 1) break;
        const Route seg = slice(A, m.pos_a, m.len_a);
        const int anchor = A[m.pos_b];
        A.erase(A.begin() + m.pos_a, A.begin() + m.pos_a + m.len_a);
        A.insert(std::find(A.begin(), A.end(), anchor) + 1, seg.begin(), seg.end());
        break;
    }
    case MoveKind::IntraSwap: {
        Route out;
        for (int i = 0; i < static_cast<int>(A.size());) {
            if (i == m.pos_a) {
                for (int k = 0; k < m.len_b; ++k) out.push_back(A[m.pos_b + k]);
                i += m.len_a;
            } else if (i == m.pos_b) {
                for (int k = 0; k < m.len_a; ++k) out.push_back(A[m.pos_a + k]);
                i += m.len_b;
            } else {
                out.push_back(A[i++]);
            }
        }
        A = out;
        break;
    }
    case MoveKind::TwoOpt:
        std::reverse(A.begin() + m.pos_a, A.begin() + m.pos_b + 1);
        break;
    }
    return routes;
}

// Candidate counts from the neighbourhood definitions; sizes include depots.
inline std::int64_t closed_form_count(const Operator& op, const std::vector<int>& sizes) {
    auto L = [&](int r) -> std::int64_t { return sizes[r] - 2; };
    auto segs = [&](int r, int n) -> std::int64_t { return std::max<std::int64_t>(L(r) - n + 1, 0); };
    auto choose2 = [](std::int64_t x) -> std::int64_t { return x >= 2 ? x * (x - 1) / 2 : 0; };
    const int J = static_cast<int>(sizes.size());
    std::int64_t c = 0;
    for (int a = 0; a < J; ++a) {
        switch (op.kind) {
        case MoveKind::InterRelocate:
            for (int b = 0; b < J; ++b)
                if (b != a) c += segs(a, op.n1) * (L(b) + 1);
            break;
        case MoveKind::InterSwap:
            for (int b = 0; b < J; ++b)
                if (b != a && (op.n1 != op.n2 || b > a)) c += segs(a, op.n1) * segs(b, op.n2);
            break;
        case MoveKind::TwoOptStar:
            for (int b = a + 1; b < J; ++b) c += (L(a) + 1) * (L(b) + 1);
            break;
        case MoveKind::IntraRelocate:
            c += segs(a, op.n1) * std::max<std::int64_t>(L(a) - op.n1, 0);
            break;
        case MoveKind::IntraSwap: {
            const std::int64_t ordered = choose2(std::max<std::int64_t>(L(a) - op.n1 - op.n2 + 2, 0));
            c += op.n1 == op.n2 ? ordered : 2 * ordered;
            break;
        }
        case MoveKind::TwoOpt:
            c += choose2(L(a));
            break;
        }
    }
    return c;
}

inline std::vector<int> route_sizes(const Solution& s) {
    std::vector<int> out;
    for (const auto& r : s.routes()) out.push_back(static_cast<int>(r.size()));
    return out;
}

inline std::vector<Operator> all_operators(const Instance& inst) {
    std::vector<Operator> ops;
    for (int n : {1, 2, 3}) ops.push_back({MoveKind::InterRelocate, n, 0});
    for (int a : {1, 2, 3})
        for (int b : {1, 2, 3}) ops.push_back({MoveKind::InterSwap, a, b});
    ops.push_back({MoveKind::TwoOptStar, 0, 0});
    for (int n : {1, 2, 3}) ops.push_back({MoveKind::IntraRelocate, n, 0});
    for (int a : {1, 2, 3})
        for (int b : {1, 2, 3}) ops.push_back({MoveKind::IntraSwap, a, b});
    if (!inst.has_time_windows() && inst.symmetric()) ops.push_back({MoveKind::TwoOpt, 0, 0});
    return ops;
}

inline constexpr Variant kVariants[] = {Variant::Cvrp, Variant::Vrptw, Variant::Vrpspdtw};

}  // namespace vrpts::testing
