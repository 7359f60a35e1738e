#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vrpts/attrcalc.hpp"
#include "vrpts/errors.hpp"

using namespace vrpts;
namespace vt = vrpts::testing;

namespace {

SubseqAttr random_attr(std::mt19937_64& rng, int id) {
    std::uniform_real_distribution<double> U(0.0, 100.0);
    Node n;
    n.id = id;
    n.delivery = std::floor(U(rng) / 10);
    n.pickup = std::floor(U(rng) / 10);
    n.tw_open = std::floor(U(rng) * 5);
    n.tw_close = n.tw_open + std::floor(U(rng));
    n.service = std::floor(U(rng) / 5);
    return singleton(n);
}

void expect_fields_near(const SubseqAttr& a, const SubseqAttr& b, double tol) {
    EXPECT_NEAR(a.dist, b.dist, tol);
    EXPECT_NEAR(a.load_in, b.load_in, tol);
    EXPECT_NEAR(a.load_out, b.load_out, tol);
    EXPECT_NEAR(a.load_max, b.load_max, tol);
    EXPECT_NEAR(a.duration, b.duration, tol);
    EXPECT_NEAR(a.earliest, b.earliest, tol);
    EXPECT_NEAR(a.latest, b.latest, tol);
    EXPECT_NEAR(a.warp, b.warp, tol);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.last, b.last);
}

}  // namespace

TEST(Singleton, Fields) {
    Node n{4, 1, 2, 3, 5, 10, 20, 7};
    const auto s = singleton(n);
    EXPECT_EQ(s.dist, 0);
    EXPECT_EQ(s.load_in, 3);
    EXPECT_EQ(s.load_out, 5);
    EXPECT_EQ(s.load_max, 5);
    EXPECT_EQ(s.duration, 7);
    EXPECT_EQ(s.earliest, 10);
    EXPECT_EQ(s.latest, 20);
    EXPECT_EQ(s.warp, 0);
    EXPECT_EQ(s.first, 4);
    EXPECT_EQ(s.last, 4);
}

TEST(Concat, LoadProfileOfTwoStops) {
    // Leaving the depot with 5 on board: 5 -> 5-3+5 = 7 -> 7-2+1 = 6.
    Node a{1}, b{2};
    a.delivery = 3, a.pickup = 5;
    b.delivery = 2, b.pickup = 1;
    const auto r = concat(singleton(a), singleton(b), 0, 0);
    EXPECT_EQ(r.load_in, 5);
    EXPECT_EQ(r.load_out, 6);
    EXPECT_EQ(r.load_max, 7);
}

TEST(Concat, NeutralDepot) {
    std::mt19937_64 rng(1);
    Node depot;
    depot.tw_close = kInfinity;
    const auto e = singleton(depot);
    for (int i = 0; i < 100; ++i) {
        const auto a = concat(random_attr(rng, 1), random_attr(rng, 2), 3, 4);
        const auto r = concat(a, e, 0, 0);
        EXPECT_EQ(r.dist, a.dist);
        EXPECT_EQ(r.load_in, a.load_in);
        EXPECT_EQ(r.load_out, a.load_out);
        EXPECT_EQ(r.load_max, a.load_max);
        EXPECT_EQ(r.warp, a.warp);
    }
}

TEST(Concat, WaitingMatchesSimulation) {
    // depot -> a (window [0,100], service 2) -> b (window [10,20]) -> depot,
    // 4 time units between a and b. On its own the pair can start late and
    // never wait; from the fixed depot departure the vehicle reaches b at 6
    // and waits 4.
    InstanceSpec spec;
    spec.variant = Variant::Vrptw;
    spec.policy = DistancePolicy::MatrixGiven;
    spec.capacity = 10;
    spec.nodes = {Node{0, 0, 0, 0, 0, 0, 1000, 0}, Node{1, 0, 0, 1, 0, 0, 100, 2}, Node{2, 0, 0, 1, 0, 10, 20, 3}};
    spec.distances = {0, 0, 0, 0, 0, 4, 0, 4, 0};
    const Instance inst(spec);
    const auto r = concat(singleton(inst, 1), singleton(inst, 2), 4, 4);
    EXPECT_EQ(r.warp, 0);
    EXPECT_EQ(r.duration, 2 + 4 + 3);
    const std::vector<int> route{0, 1, 2, 0};
    const auto m = build_attr_matrix(inst, route);
    const auto sim = vt::simulate(inst, route);
    EXPECT_EQ(m.whole().warp, sim.warp);
    EXPECT_EQ(m.whole().duration, sim.duration);
    EXPECT_EQ(m.whole().duration, 2 + 4 + 4 + 3);
    EXPECT_EQ(m.at(1, 2), r);
}

TEST(Concat, AssociativeOnIntegers) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> link(0, 30);
    for (int i = 0; i < 20000; ++i) {
        const auto a = random_attr(rng, 1), b = random_attr(rng, 2), c = random_attr(rng, 3);
        const double cab = link(rng), tab = link(rng), cbc = link(rng), tbc = link(rng);
        const auto left = concat(concat(a, b, cab, tab), c, cbc, tbc);
        const auto right = concat(a, concat(b, c, cbc, tbc), cab, tab);
        ASSERT_EQ(left, right) << i;
    }
}

TEST(Concat, AssociativeOnReals) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> link(0, 30), shift(0, 1);
    for (int i = 0; i < 20000; ++i) {
        auto a = random_attr(rng, 1), b = random_attr(rng, 2), c = random_attr(rng, 3);
        for (auto* x : {&a, &b, &c}) {
            x->earliest += shift(rng);
            x->latest += 1 + shift(rng);
        }
        const double cab = link(rng), tab = link(rng), cbc = link(rng), tbc = link(rng);
        expect_fields_near(concat(concat(a, b, cab, tab), c, cbc, tbc), concat(a, concat(b, c, cbc, tbc), cab, tab), 1e-9);
    }
}

TEST(Concat, DeliveryOnlyLoadReducesToSum) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 1000; ++i) {
        auto a = random_attr(rng, 1), b = random_attr(rng, 2);
        a.load_out = b.load_out = 0;
        a.load_max = a.load_in;
        b.load_max = b.load_in;
        const auto r = concat(a, b, 1, 1);
        EXPECT_EQ(r.load_max, a.load_max + b.load_max);
    }
}

TEST(AttrMatrix, DepotDiagonalAndRows) {
    const auto inst = load_instance(vt::data_path("toy_solomon.txt"));
    const std::vector<int> route{0, 3, 7, 2, 0};
    const auto m = build_attr_matrix(inst, route);
    EXPECT_EQ(m.size(), 5);
    EXPECT_EQ(m.at(0, 0).dist, 0);
    EXPECT_EQ(m.at(0, 0).latest, inst.node(0).tw_open);
    for (int k = 1; k < 5; ++k) EXPECT_EQ(m.at(k, k), singleton(inst, route[k]));
    for (int k = 0; k < 5; ++k)
        for (int l = k + 1; l < 5; ++l) EXPECT_EQ(m.at(k, l), concat(inst, m.at(k, l - 1), singleton(inst, route[l])));
}

TEST(AttrMatrix, WholeRouteDistanceIsSumOfLinks) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto inst = vt::random_instance(rng, 20, {Variant::Vrptw, t % 2 == 0, false});
        const auto routes = vt::random_routes(rng, 20, 3);
        for (const auto& r : routes) {
            double d = 0;
            for (std::size_t i = 1; i < r.size(); ++i) d += inst.distance(r[i - 1], r[i]);
            EXPECT_EQ(build_attr_matrix(inst, r).whole().dist, d);
        }
    }
}

TEST(AttrMatrix, AgreesWithSimulation) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 600; ++t) {
        const auto v = vt::kVariants[t % 3];
        const bool integral = (t / 3) % 2 == 0;
        const auto inst = vt::random_instance(rng, 30, {v, integral, (t / 6) % 2 == 1 && v != Variant::Cvrp});
        for (const auto& r : vt::random_routes(rng, 30, 4)) {
            const auto m = build_attr_matrix(inst, r);
            const auto sim = vt::simulate(inst, r);
            ASSERT_EQ(m.whole().dist, sim.distance);
            if (integral) {
                ASSERT_EQ(m.whole().load_max, sim.max_load);
                ASSERT_EQ(m.whole().warp, sim.warp);
                ASSERT_EQ(m.whole().duration, sim.duration);
            } else {
                ASSERT_NEAR(m.whole().load_max, sim.max_load, 1e-9);
                ASSERT_NEAR(m.whole().warp, sim.warp, 1e-9);
                ASSERT_NEAR(m.whole().duration, sim.duration, 1e-9);
            }
        }
    }
}

TEST(AttrMatrix, InteriorCellsAgreeWithSimulatedSegments) {
    // A segment k..l simulated on its own, with the first stop's window as
    // the departure window, gives the cell's warp when the segment starts at
    // the depot.
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const auto inst = vt::random_instance(rng, 12, {Variant::Vrpspdtw, true, false});
        for (const auto& r : vt::random_routes(rng, 12, 2)) {
            const auto m = build_attr_matrix(inst, r);
            for (int l = 0; l < m.size(); ++l) {
                std::vector<int> prefix(r.begin(), r.begin() + l + 1);
                prefix.push_back(0);
                const auto sim = vt::simulate(inst, prefix);
                const auto closed = concat(inst, m.at(0, l), singleton(inst, 0));
                EXPECT_EQ(closed.warp, sim.warp);
                EXPECT_EQ(closed.dist, sim.distance);
            }
        }
    }
}

TEST(ReversedView, SwapsEndsOnly) {
    const auto inst = load_instance(vt::data_path("toy_cvrp.vrp"));
    const std::vector<int> route{0, 4, 9, 1, 0};
    const auto m = build_attr_matrix(inst, route);
    EXPECT_EQ(reversed_view(m, 2, 2), m.at(2, 2));
    const auto r = reversed_view(m, 1, 3);
    EXPECT_EQ(r.first, 1);
    EXPECT_EQ(r.last, 4);
    EXPECT_EQ(r.dist, m.at(1, 3).dist);
    const std::vector<int> backwards{0, 1, 9, 4, 0};
    EXPECT_EQ(r.dist, build_attr_matrix(inst, backwards).at(1, 3).dist);
}

TEST(ReversedView, TwoOptAgreesWithRecompute) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto inst = vt::random_instance(rng, 15, {Variant::Cvrp, true, false});
        auto route = vt::random_routes(rng, 15, 1).front();
        const auto m = build_attr_matrix(inst, route);
        const int n = m.size();
        for (int a = 1; a < n - 1; ++a)
            for (int b = a; b < n - 1; ++b) {
                const auto cand = concat(inst, concat(inst, m.at(0, a - 1), reversed_view(m, a, b)), m.at(b + 1, n - 1));
                auto rev = route;
                std::reverse(rev.begin() + a, rev.begin() + b + 1);
                const auto sim = vt::simulate(inst, rev);
                ASSERT_EQ(cand.dist, sim.distance);
                ASSERT_EQ(cand.load_max, sim.max_load);
            }
    }
}

TEST(ReversedView, RefusedWithTimeWindows) {
    const auto inst = load_instance(vt::data_path("toy_solomon.txt"));
    const std::vector<int> route{0, 1, 2, 0};
    EXPECT_THROW(reversed_view(build_attr_matrix(inst, route), 1, 2), ContractError);
}

TEST(AttrMatrix, CsvDump) {
    const auto inst = load_instance(vt::data_path("toy_cvrp.vrp"));
    const std::vector<int> route{0, 4, 0};
    const auto csv = build_attr_matrix(inst, route).to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,l,dist,load_in,load_out,load_max,duration,earliest,latest,warp,first,last");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6);
}
