#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vrpts/attrcalc.hpp"
#include "vrpts/evaluator.hpp"
#include "vrpts/routes.hpp"

namespace vrpts {

// theta-nearest-neighbour edge filter. Edges touching the depot are always
// kept; the diagonal never is. Applies to inter-route operators only.
class GranularMask {
public:
    GranularMask() = default;
    GranularMask(int num_nodes, int theta) : n_(num_nodes), theta_(theta), bits_(std::size_t(num_nodes) * num_nodes, 0) { }

    int theta() const { return theta_; }
    int size() const { return n_; }
    bool operator()(int i, int j) const { return bits_[std::size_t(i) * n_ + j] != 0; }
    void set(int i, int j, bool v) { bits_[std::size_t(i) * n_ + j] = v ? 1 : 0; }
    std::int64_t count() const;

private:
    int n_ = 0;
    int theta_ = 0;
    std::vector<std::uint8_t> bits_;
};

GranularMask build_granular_mask(const Instance& inst, int theta);

// Attribute matrices of every route, tagged with the solution stamp.
class SolutionAttrs {
public:
    SolutionAttrs() = default;
    SolutionAttrs(const Instance& inst, const Solution& sol) { build(inst, sol); }

    void build(const Instance& inst, const Solution& sol);
    void update(const Instance& inst, const Solution& sol, const RouteChange& change);

    const AttrMatrix& route(int r) const { return mats_[r]; }
    int num_routes() const { return static_cast<int>(mats_.size()); }
    std::uint64_t stamp() const { return stamp_; }

private:
    std::vector<AttrMatrix> mats_;
    std::uint64_t stamp_ = 0;
};

// Calls `fn` for every candidate of `op` in (route_a, pos_a, route_b, pos_b)
// order with deltas filled in. Identity moves are skipped.
void enumerate_candidates(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs, const Operator& op,
                          const PenaltyWeights& w, const GranularMask* mask,
                          const std::function<void(const Move&)>& fn);

// Best-improvement scan; first minimum in enumeration order wins ties.
std::optional<Move> eval_operator_scalar(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs,
                                         const Operator& op, const PenaltyWeights& w,
                                         const GranularMask* mask = nullptr);

// Same scan without the improvement threshold: the minimum-score candidate,
// if any candidate exists.
std::optional<Move> min_candidate_scalar(const Instance& inst, const Solution& sol, const SolutionAttrs& attrs,
                                         const Operator& op, const PenaltyWeights& w,
                                         const GranularMask* mask = nullptr);

class ScalarEvaluator final : public Evaluator {
public:
    explicit ScalarEvaluator(const Instance& inst, const GranularMask* mask = nullptr) : inst_(inst), mask_(mask) { }

    std::string name() const override { return mask_ ? "scalar-granular" : "scalar"; }
    void reset(const Solution& sol) override { attrs_.build(inst_, sol); }
    void update(const Solution& sol, const RouteChange& change) override { attrs_.update(inst_, sol, change); }
    std::optional<Move> best(const Solution& sol, const Operator& op, const PenaltyWeights& w) override {
        return eval_operator_scalar(inst_, sol, attrs_, op, w, mask_);
    }
    const SolutionAttrs& attrs() const { return attrs_; }

private:
    const Instance& inst_;
    const GranularMask* mask_;
    SolutionAttrs attrs_;
};

}  // namespace vrpts
