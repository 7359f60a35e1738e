#pragma once

#include <cstdint>

#include "vrpts/model.hpp"

namespace vrpts {

struct GeneratorOptions {
    int customers = 100;
    Variant variant = Variant::Cvrp;
    std::uint64_t seed = 1;
    double grid = 1000.0;       // coordinates drawn from [0, grid]^2
    int max_demand = 10;
    int route_target = 8;       // customers per vehicle the capacity aims for
    double horizon = 1000.0;    // depot window close for time-windowed variants
};

// Uniformly scattered customers with integer coordinates and demands.
// Windows are centred on a feasible direct-trip arrival so every customer
// can be served alone.
Instance generate_uniform(const GeneratorOptions& opts);

}  // namespace vrpts
