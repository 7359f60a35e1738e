#include "vrpts/generate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace vrpts {

Instance generate_uniform(const GeneratorOptions& opts) {
    if (opts.customers < 1) throw std::invalid_argument("need at least one customer");
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> coord(0, static_cast<int>(opts.grid));
    std::uniform_int_distribution<int> demand(1, std::max(1, opts.max_demand));

    InstanceSpec spec;
    spec.name = "U" + std::to_string(opts.customers) + "-" + std::string(to_string(opts.variant)) + "-s" +
                std::to_string(opts.seed);
    spec.variant = opts.variant;
    spec.policy = DistancePolicy::RoundNearest;
    const bool tw = opts.variant != Variant::Cvrp;
    const double half = opts.grid / 2.0;

    Node depot;
    depot.x = half;
    depot.y = half;
    depot.tw_close = tw ? opts.horizon + 2.0 * opts.grid : 0.0;
    spec.nodes.push_back(depot);

    double total = 0.0;
    for (int i = 1; i <= opts.customers; ++i) {
        Node c;
        c.id = i;
        c.x = coord(rng);
        c.y = coord(rng);
        c.delivery = demand(rng);
        if (opts.variant == Variant::Vrpspdtw) c.pickup = demand(rng);
        if (tw) {
            const double reach = std::round(std::hypot(c.x - depot.x, c.y - depot.y));
            c.service = 10.0;
            // Latest start that still lets the vehicle get back in time.
            const double latest = depot.tw_close - reach - c.service;
            std::uniform_real_distribution<double> centre(reach, std::max(reach, latest));
            const double mid = std::round(centre(rng));
            c.tw_open = std::max(reach, mid - 60.0);
            c.tw_close = std::min(latest, mid + 60.0);
            c.tw_open = std::min(c.tw_open, c.tw_close);
        }
        total += std::max(c.delivery, c.pickup);
        spec.nodes.push_back(c);
    }
    const double per_route = std::max(1, opts.route_target);
    spec.capacity = std::max<double>(opts.max_demand * (opts.variant == Variant::Vrpspdtw ? 2 : 1),
                                     std::ceil(total / std::ceil(opts.customers / per_route)));
    if (opts.variant == Variant::Vrpspdtw) {
        spec.mu1 = 300.0;
        spec.mu2 = 1.0;
    }
    return Instance(std::move(spec));
}

}  // namespace vrpts
