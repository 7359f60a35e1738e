#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrpts/model.hpp"
#include "vrpts/moves.hpp"

namespace vrpts {

using Route = std::vector<int>;  // depot at both ends

// Event-by-event timing and load of one route.
struct RouteTrace {
    std::vector<double> arrival;  // after any warp roll-back
    std::vector<double> wait;
    std::vector<double> load;     // load on board when leaving each stop
    double initial_load = 0.0;
    double max_load = 0.0;
    double warp = 0.0;
    double distance = 0.0;
    double duration = 0.0;        // elapsed clock plus rolled-back warp
};

// Forward simulation: depart the depot at its opening time, wait for early
// windows, roll late arrivals back to the window close and record the warp.
RouteTrace simulate_route(const Instance& inst, std::span<const int> route);

struct RouteSummary {
    double distance = 0.0;
    double max_load = 0.0;
    double load_excess = 0.0;
    double warp = 0.0;
    bool used = false;
};

RouteSummary summarize_route(const Instance& inst, std::span<const int> route);

// Which route slots changed in one apply(). Slots listed in `changed` need
// their attributes rebuilt; slots >= new_count were removed.
struct RouteChange {
    std::vector<int> changed;
    int old_count = 0;
    int new_count = 0;
};

// A set of depot-anchored routes covering every customer once, normalised to
// carry exactly one empty route (the spare) so moves can open new routes.
class Solution {
public:
    Solution() = default;
    Solution(const Instance& inst, std::vector<Route> routes);

    // Routes given as customer lists without depots.
    static Solution from_customer_lists(const Instance& inst, const std::vector<std::vector<int>>& lists);

    const Instance& instance() const { return *inst_; }
    int num_routes() const { return static_cast<int>(routes_.size()); }
    const Route& route(int r) const { return routes_[r]; }
    const std::vector<Route>& routes() const { return routes_; }
    int route_size(int r) const { return static_cast<int>(routes_[r].size()); }
    int max_route_size() const;
    const RouteSummary& summary(int r) const { return summaries_[r]; }

    int used_routes() const;
    double distance() const;
    double load_violation() const;
    double warp_violation() const;
    bool feasible() const { return load_violation() == 0.0 && warp_violation() == 0.0; }
    double objective() const;
    double penalized(const PenaltyWeights& w) const;

    // Unique per mutation; attribute caches remember the stamp they saw.
    std::uint64_t stamp() const { return stamp_; }

    RouteChange apply(const Move& m);

    // Routes without the depots, spare omitted.
    std::vector<std::vector<int>> customer_lists() const;

    bool operator==(const Solution& o) const { return routes_ == o.routes_; }

private:
    void check_coverage() const;
    void refresh(int r);
    void touch();
    RouteChange normalize(std::vector<int> changed);

    const Instance* inst_ = nullptr;
    std::vector<Route> routes_;
    std::vector<RouteSummary> summaries_;
    std::uint64_t stamp_ = 0;
};

double objective(const Instance& inst, const Solution& sol);

struct Violations {
    double load = 0.0;
    double warp = 0.0;
};
Violations violations(const Instance& inst, const Solution& sol);

// Returns a copy with the move applied. Throws StructureError when the move
// does not fit the solution.
Solution apply_move(const Solution& sol, const Move& m);

// Checks bounds and shape of a move against `sol` without applying it.
void validate_move(const Solution& sol, const Move& m);

// Routes of `sol` after applying `m`, computed directly on node lists.
std::pair<Route, Route> moved_routes(const Solution& sol, const Move& m);

std::string write_solution(const Solution& sol);
Solution read_solution(const Instance& inst, std::string_view text);

}  // namespace vrpts
