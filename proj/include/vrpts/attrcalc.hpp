#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vrpts/model.hpp"

namespace vrpts {

// Finite stand-in for an unbounded time or an invalid score. Kept finite so
// batch reductions never see inf/NaN.
inline constexpr double kInfinity = 1e15;

// Attributes of one contiguous route subsequence. Time fields follow the
// time-warp model: `duration` includes travel, service and waiting,
// `warp` accumulates lateness that was rolled back.
struct SubseqAttr {
    double dist = 0.0;
    double load_in = 0.0;   // total delivery picked up at the depot
    double load_out = 0.0;  // total pickup returned to the depot
    double load_max = 0.0;
    double duration = 0.0;
    double earliest = 0.0;
    double latest = kInfinity;
    double warp = 0.0;
    int first = 0;
    int last = 0;

    bool operator==(const SubseqAttr&) const = default;
};

inline SubseqAttr singleton(const Node& n) {
    return SubseqAttr{0.0, n.delivery, n.pickup, std::max(n.delivery, n.pickup), n.service, n.tw_open, n.tw_close,
                      0.0, n.id, n.id};
}

inline SubseqAttr singleton(const Instance& inst, int node) { return singleton(inst.node(node)); }

// The depot as a route start: departure is pinned to the opening time.
inline SubseqAttr departure(const Instance& inst) {
    auto a = singleton(inst.node(0));
    a.latest = a.earliest;
    return a;
}

inline SubseqAttr concat(const SubseqAttr& a, const SubseqAttr& b, double c_link, double t_link) {
    const double dt = a.duration + t_link - a.warp;
    const double dw = std::max(b.earliest - dt - a.latest, 0.0);
    const double dv = std::max(a.earliest + dt - b.latest, 0.0);
    SubseqAttr r;
    r.dist = a.dist + c_link + b.dist;
    r.load_in = a.load_in + b.load_in;
    r.load_out = a.load_out + b.load_out;
    r.load_max = std::max(a.load_max + b.load_in, a.load_out + b.load_max);
    r.duration = a.duration + t_link + dw + b.duration;
    r.earliest = std::max(a.earliest, b.earliest - dt) - dw;
    r.latest = std::min(a.latest, b.latest - dt) + dv;
    r.warp = a.warp + dv + b.warp;
    r.first = a.first;
    r.last = b.last;
    return r;
}

inline SubseqAttr concat(const Instance& inst, const SubseqAttr& a, const SubseqAttr& b) {
    return concat(a, b, inst.distance(a.last, b.first), inst.travel_time(a.last, b.first));
}

// Same record with the endpoints exchanged. Only meaningful when distances
// are symmetric and there are no time windows or pickups.
inline SubseqAttr swap_ends(SubseqAttr a) {
    std::swap(a.first, a.last);
    return a;
}

// Upper-triangular table of subsequence attributes for one route, stored
// as a dense n x n block (lower triangle unused).
class AttrMatrix {
public:
    AttrMatrix() = default;
    AttrMatrix(const Instance& inst, std::span<const int> route);

    int size() const { return n_; }
    const SubseqAttr& at(int k, int l) const { return cells_[static_cast<std::size_t>(k) * n_ + l]; }
    const SubseqAttr& whole() const { return at(0, n_ - 1); }
    bool time_windowed() const { return time_windowed_; }

    std::string to_csv() const;

private:
    int n_ = 0;
    bool time_windowed_ = false;
    std::vector<SubseqAttr> cells_;
};

AttrMatrix build_attr_matrix(const Instance& inst, std::span<const int> route);

// Attribute record of m[k..l] traversed backwards. Throws ContractError for
// time-windowed or asymmetric instances.
SubseqAttr reversed_view(const AttrMatrix& m, int k, int l);

}  // namespace vrpts
