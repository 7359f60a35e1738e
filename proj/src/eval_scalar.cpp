#include "vrpts/eval_scalar.hpp"

#include <algorithm>
#include <numeric>

#include "vrpts/errors.hpp"

namespace vrpts {

std::int64_t GranularMask::count() const {
    return std::count(bits_.begin(), bits_.end(), std::uint8_t{1});
}

GranularMask build_granular_mask(const Instance& inst, int theta) {
    if (theta < 1) throw std::invalid_argument("granularity must be at least 1");
    const int n = inst.num_nodes();
    GranularMask mask(n, theta);
    std::vector<int> order;
    for (int i = 1; i < n; ++i) {
        mask.set(i, 0, true);
        mask.set(0, i, true);
        order.clear();
        for (int j = 1; j < n; ++j)
            if (j != i) order.push_back(j);
        const auto keep = std::min<std::size_t>(theta, order.size());
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
            const double da = inst.distance(i, a), db = inst.distance(i, b);
            return da != db ? da < db : a < b;
        });
        for (std::size_t k = 0; k < keep; ++k) mask.set(i, order[k], true);
    }
    return mask;
}

void SolutionAttrs::build(const Instance& inst, const Solution& sol) {
    mats_.clear();
    mats_.reserve(sol.num_routes());
    for (const auto& r : sol.routes()) mats_.emplace_back(inst, r);
    stamp_ = sol.stamp();
}

void SolutionAttrs::update(const Instance& inst, const Solution& sol, const RouteChange& change) {
    if (static_cast<int>(mats_.size()) != change.old_count)
        throw ContractError("attribute cache does not match the pre-move solution");
    mats_.resize(change.new_count);
    for (int r : change.changed) mats_[r] = AttrMatrix(inst, sol.route(r));
    stamp_ = sol.stamp();
}

namespace {

// Walks the neighbourhood in lexicographic order and hands each candidate to
// `sink(move, delta)`.
template <class Sink>
void scan(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs, const Operator& op,
          const PenaltyWeights& w, const GranularMask* mask, Sink&& sink) {
    if (attrs.stamp() != sol.stamp() || attrs.num_routes() != sol.num_routes())
        throw ContractError("attribute matrices are stale for this solution");
    const double cap = inst.capacity();
    const int J = sol.num_routes();
    const int N1 = op.n1, N2 = op.n2;
    auto cat = [&](const SubseqAttr& a, const SubseqAttr& b) { return concat(inst, a, b); };

    Move m;
    m.kind = op.kind;
    m.len_a = N1;
    m.len_b = N2;

    switch (op.kind) {
    case MoveKind::InterRelocate:
        for (int ra = 0; ra < J; ++ra) {
            const auto& A = attrs.route(ra);
            const auto& RA = sol.route(ra);
            const int na = A.size();
            for (int pa = 1; pa + N1 <= na - 1; ++pa) {
                const SubseqAttr new_a = cat(A.at(0, pa - 1), A.at(pa + N1, na - 1));
                const SubseqAttr& mid = A.at(pa, pa + N1 - 1);
                for (int rb = 0; rb < J; ++rb) {
                    if (rb == ra) continue;
                    const auto& B = attrs.route(rb);
                    const auto& RB = sol.route(rb);
                    const int nb = B.size();
                    if (nb < 2) continue;  // routes always hold both depot visits
                    const int dm = route_count_delta(na, nb, na - N1, nb + N1);
                    for (int pb = 0; pb < nb - 1; ++pb) {
                        if (mask && !(*mask)(RA[pa], RB[pb])) continue;
                        const SubseqAttr new_b = cat(cat(B.at(0, pb), mid), B.at(pb + 1, nb - 1));
                        m.route_a = ra, m.pos_a = pa, m.route_b = rb, m.pos_b = pb;
                        sink(m, pair_delta(A.whole(), B.whole(), new_a, new_b, dm, cap, w));
                    }
                }
            }
        }
        break;
    case MoveKind::InterSwap:
        for (int ra = 0; ra < J; ++ra) {
            const auto& A = attrs.route(ra);
            const auto& RA = sol.route(ra);
            const int na = A.size();
            for (int pa = 1; pa + N1 <= na - 1; ++pa) {
                const SubseqAttr& head_a = A.at(0, pa - 1);
                const SubseqAttr& mid_a = A.at(pa, pa + N1 - 1);
                const SubseqAttr& tail_a = A.at(pa + N1, na - 1);
                for (int rb = N1 == N2 ? ra + 1 : 0; rb < J; ++rb) {
                    if (rb == ra) continue;
                    const auto& B = attrs.route(rb);
                    const auto& RB = sol.route(rb);
                    const int nb = B.size();
                    for (int pb = 1; pb + N2 <= nb - 1; ++pb) {
                        if (mask && !(*mask)(RA[pa], RB[pb])) continue;
                        const SubseqAttr new_a = cat(cat(head_a, B.at(pb, pb + N2 - 1)), tail_a);
                        const SubseqAttr new_b = cat(cat(B.at(0, pb - 1), mid_a), B.at(pb + N2, nb - 1));
                        m.route_a = ra, m.pos_a = pa, m.route_b = rb, m.pos_b = pb;
                        sink(m, pair_delta(A.whole(), B.whole(), new_a, new_b, 0, cap, w));
                    }
                }
            }
        }
        break;
    case MoveKind::TwoOptStar:
        for (int ra = 0; ra < J; ++ra) {
            const auto& A = attrs.route(ra);
            const auto& RA = sol.route(ra);
            const int na = A.size();
            for (int pa = 0; pa <= na - 2; ++pa) {
                const SubseqAttr& head_a = A.at(0, pa);
                const SubseqAttr& tail_a = A.at(pa + 1, na - 1);
                for (int rb = ra + 1; rb < J; ++rb) {
                    const auto& B = attrs.route(rb);
                    const auto& RB = sol.route(rb);
                    const int nb = B.size();
                    if (nb < 2) continue;
                    for (int pb = 0; pb < nb - 1; ++pb) {
                        if (mask && !(*mask)(RA[pa], RB[pb])) continue;
                        const SubseqAttr new_a = cat(head_a, B.at(pb + 1, nb - 1));
                        const SubseqAttr new_b = cat(B.at(0, pb), tail_a);
                        const int dm = route_count_delta(na, nb, pa + nb - pb, pb + na - pa);
                        m.route_a = ra, m.pos_a = pa, m.route_b = rb, m.pos_b = pb;
                        sink(m, pair_delta(A.whole(), B.whole(), new_a, new_b, dm, cap, w));
                    }
                }
            }
        }
        break;
    case MoveKind::IntraRelocate:
        for (int r = 0; r < J; ++r) {
            const auto& A = attrs.route(r);
            const int n = A.size();
            m.route_a = m.route_b = r;
            for (int pa = 1; pa + N1 <= n - 1; ++pa) {
                const SubseqAttr& seg = A.at(pa, pa + N1 - 1);
                for (int pb = 0; pb <= n - 2; ++pb) {
                    SubseqAttr new_r;
                    if (pb >= pa + N1) {
                        const SubseqAttr x = cat(A.at(pa + N1, pb), seg);
                        new_r = cat(cat(A.at(0, pa - 1), x), A.at(pb + 1, n - 1));
                    } else if (pb <= pa - 2) {
                        const SubseqAttr x = cat(seg, A.at(pb + 1, pa - 1));
                        new_r = cat(cat(A.at(0, pb), x), A.at(pa + N1, n - 1));
                    } else {
                        continue;
                    }
                    m.pos_a = pa, m.pos_b = pb;
                    sink(m, single_delta(A.whole(), new_r, cap, w));
                }
            }
        }
        break;
    case MoveKind::IntraSwap:
        for (int r = 0; r < J; ++r) {
            const auto& A = attrs.route(r);
            const int n = A.size();
            m.route_a = m.route_b = r;
            for (int pa = 1; pa + N1 <= n - 1; ++pa) {
                for (int pb = 1; pb + N2 <= n - 1; ++pb) {
                    if (N1 == N2 && pb <= pa) continue;
                    if (!(pa + N1 <= pb || pb + N2 <= pa)) continue;
                    const bool fwd = pa < pb;
                    const int p1 = fwd ? pa : pb, l1 = fwd ? N1 : N2;
                    const int p2 = fwd ? pb : pa, l2 = fwd ? N2 : N1;
                    const SubseqAttr& x1 = A.at(p2, p2 + l2 - 1);
                    const SubseqAttr& x2 = A.at(p1, p1 + l1 - 1);
                    const SubseqAttr x = p1 + l1 <= p2 - 1 ? cat(cat(x1, A.at(p1 + l1, p2 - 1)), x2) : cat(x1, x2);
                    const SubseqAttr new_r = cat(cat(A.at(0, p1 - 1), x), A.at(p2 + l2, n - 1));
                    m.pos_a = pa, m.pos_b = pb;
                    sink(m, single_delta(A.whole(), new_r, cap, w));
                }
            }
        }
        break;
    case MoveKind::TwoOpt:
        if (inst.has_time_windows() || !inst.symmetric())
            throw ContractError("2-opt needs a symmetric instance without time windows");
        for (int r = 0; r < J; ++r) {
            const auto& A = attrs.route(r);
            const int n = A.size();
            m.route_a = m.route_b = r;
            for (int pa = 1; pa <= n - 3; ++pa) {
                for (int pb = pa + 1; pb <= n - 2; ++pb) {
                    const SubseqAttr new_r = cat(cat(A.at(0, pa - 1), reversed_view(A, pa, pb)), A.at(pb + 1, n - 1));
                    m.pos_a = pa, m.pos_b = pb;
                    sink(m, single_delta(A.whole(), new_r, cap, w));
                }
            }
        }
        break;
    }
}

}  // namespace

void enumerate_candidates(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs, const Operator& op,
                          const PenaltyWeights& w, const GranularMask* mask,
                          const std::function<void(const Move&)>& fn) {
    scan(inst, sol, attrs, op, w, mask, [&](Move& m, const Delta& d) {
        fill(m, d);
        fn(m);
    });
}

std::optional<Move> min_candidate_scalar(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs,
                                         const Operator& op, const PenaltyWeights& w, const GranularMask* mask) {
    std::optional<Move> best;
    double best_score = kInfinity;
    scan(inst, sol, attrs, op, w, mask, [&](Move& m, const Delta& d) {
        if (!best || d.score < best_score) {
            best_score = d.score;
            fill(m, d);
            best = m;
        }
    });
    return best;
}

std::optional<Move> eval_operator_scalar(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs,
                                         const Operator& op, const PenaltyWeights& w, const GranularMask* mask) {
    auto best = min_candidate_scalar(inst, sol, attrs, op, w, mask);
    if (best && best->score < -improvement_epsilon(inst)) return best;
    return std::nullopt;
}

}  // namespace vrpts
