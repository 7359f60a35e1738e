#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vrpts/attrcalc.hpp"

namespace vrpts {

enum class MoveKind { InterRelocate, InterSwap, TwoOptStar, IntraRelocate, IntraSwap, TwoOpt };

inline bool is_inter(MoveKind k) {
    return k == MoveKind::InterRelocate || k == MoveKind::InterSwap || k == MoveKind::TwoOptStar;
}

std::string_view to_string(MoveKind k);
// Short tags: XR, XS, TOS, IR, IS, TO.
std::string_view short_name(MoveKind k);

// One neighbourhood: a move kind plus its segment lengths.
struct Operator {
    MoveKind kind = MoveKind::InterRelocate;
    int n1 = 1;
    int n2 = 0;

    bool operator==(const Operator&) const = default;
};

std::string to_string(const Operator& op);
Operator operator_from_string(std::string_view s);  // e.g. "XR1", "XS12", "TOS", "IR2", "IS11", "TO"

// Positions follow one convention for every kind:
//  InterRelocate  pos_a = first node of the moved segment, pos_b = node it is inserted after
//  InterSwap      pos_a, pos_b = first nodes of the exchanged segments
//  TwoOptStar     cut after pos_a in route_a and after pos_b in route_b
//  IntraRelocate  as InterRelocate, positions in the original route
//  IntraSwap      as InterSwap
//  TwoOpt         reverse [pos_a, pos_b]
struct Move {
    MoveKind kind = MoveKind::InterRelocate;
    int route_a = 0;
    int route_b = 0;
    int pos_a = 0;
    int pos_b = 0;
    int len_a = 0;
    int len_b = 0;
    double delta_distance = 0.0;
    double delta_warp = 0.0;
    double delta_load = 0.0;
    int delta_routes = 0;
    double score = 0.0;

    Operator op() const { return {kind, len_a, len_b}; }
    bool same_target(const Move& o) const {
        return kind == o.kind && route_a == o.route_a && route_b == o.route_b && pos_a == o.pos_a && pos_b == o.pos_b
            && len_a == o.len_a && len_b == o.len_b;
    }
    bool operator==(const Move&) const = default;
};

std::string describe(const Move& m);

struct PenaltyWeights {
    double w_load = 10.0;
    double w_tw = 10.0;
    double mu1 = 0.0;
    double mu2 = 1.0;
};

PenaltyWeights default_penalties(const Instance& inst);

// Improvement threshold: exact comparison when all data is integral.
inline double improvement_epsilon(const Instance& inst) { return inst.integral() ? 0.0 : 1e-9; }

inline double load_excess(double load_max, double capacity) { return std::max(load_max - capacity, 0.0); }

struct Delta {
    double distance;
    double warp;
    double load;
    int routes;
    double score;
};

inline double penalized(const PenaltyWeights& w, double d_dist, int d_routes, double d_load, double d_warp) {
    return w.mu2 * d_dist + w.mu1 * d_routes + w.w_load * d_load + w.w_tw * d_warp;
}

// Score of replacing one route by another. Both evaluation backends use
// exactly this expression so their results agree bit for bit.
inline Delta single_delta(const SubseqAttr& old_r, const SubseqAttr& new_r, double capacity, const PenaltyWeights& w) {
    Delta d;
    d.distance = new_r.dist - old_r.dist;
    d.warp = new_r.warp - old_r.warp;
    d.load = load_excess(new_r.load_max, capacity) - load_excess(old_r.load_max, capacity);
    d.routes = 0;
    d.score = penalized(w, d.distance, 0, d.load, d.warp);
    return d;
}

inline Delta pair_delta(const SubseqAttr& old_a, const SubseqAttr& old_b, const SubseqAttr& new_a,
                        const SubseqAttr& new_b, int d_routes, double capacity, const PenaltyWeights& w) {
    Delta d;
    d.distance = (new_a.dist + new_b.dist) - (old_a.dist + old_b.dist);
    d.warp = (new_a.warp + new_b.warp) - (old_a.warp + old_b.warp);
    d.load = (load_excess(new_a.load_max, capacity) + load_excess(new_b.load_max, capacity))
        - (load_excess(old_a.load_max, capacity) + load_excess(old_b.load_max, capacity));
    d.routes = d_routes;
    d.score = penalized(w, d.distance, d_routes, d.load, d.warp);
    return d;
}

// Change in used-vehicle count when routes of sizes (old_a, old_b) become
// (new_a, new_b); sizes include both depot visits.
inline int route_count_delta(int old_a, int old_b, int new_a, int new_b) {
    return int(new_a > 2) + int(new_b > 2) - int(old_a > 2) - int(old_b > 2);
}

inline void fill(Move& m, const Delta& d) {
    m.delta_distance = d.distance;
    m.delta_warp = d.warp;
    m.delta_load = d.load;
    m.delta_routes = d.routes;
    m.score = d.score;
}

// Lexicographic (route_a, pos_a, route_b, pos_b) order used to break ties.
inline bool position_less(const Move& x, const Move& y) {
    if (x.route_a != y.route_a) return x.route_a < y.route_a;
    if (x.pos_a != y.pos_a) return x.pos_a < y.pos_a;
    if (x.route_b != y.route_b) return x.route_b < y.route_b;
    return x.pos_b < y.pos_b;
}

// Defaults: relocate 1..3, swap (1,1),(1,2),(2,1),(2,2), 2-opt*, the intra
// counterparts, and 2-opt only where reversal is exact.
std::vector<Operator> default_operators(const Instance& inst);
std::vector<Operator> parse_operator_list(std::string_view list);

}  // namespace vrpts
