#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "vrpts/moves.hpp"
#include "vrpts/routes.hpp"

namespace vrpts {

// Common interface of the neighbourhood-evaluation backends. An evaluator
// caches per-solution data: call reset() once, then update() after every
// Solution::apply().
class Evaluator {
public:
    virtual ~Evaluator() = default;

    virtual std::string name() const = 0;
    virtual void reset(const Solution& sol) = 0;
    virtual void update(const Solution& sol, const RouteChange& change) = 0;

    // Best candidate of `op` with score below -epsilon, or nothing.
    virtual std::optional<Move> best(const Solution& sol, const Operator& op, const PenaltyWeights& w) = 0;

    // Free-form performance data for run records.
    virtual nlohmann::json counters() const { return nlohmann::json::object(); }
};

}  // namespace vrpts
