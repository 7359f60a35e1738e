#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrpts/dense.hpp"
#include "vrpts/eval_scalar.hpp"
#include "vrpts/evaluator.hpp"

namespace vrpts {

enum class Extraction { Route, Node, Edge };
std::string_view to_string(Extraction e);

// All attribute matrices stacked into J x K x K planes (struct-of-arrays),
// plus the validity mask B. Storage capacity may exceed (J, K); the
// logical dims always equal the current route count and longest route.
class SolutionTensor {
public:
    SolutionTensor() = default;

    void build(const Instance& inst, const Solution& sol);
    void update(const Instance& inst, const Solution& sol, const RouteChange& change);

    int routes() const { return routes_; }        // J
    int max_length() const { return max_len_; }   // K
    int route_capacity() const { return jcap_; }
    int length_capacity() const { return kcap_; }
    int length(int r) const { return lengths_[r]; }
    std::uint64_t stamp() const { return stamp_; }

    std::size_t index(int r, int k, int l) const { return (std::size_t(r) * kcap_ + k) * kcap_ + l; }
    SubseqAttr at(int r, int k, int l) const { return cells_.get(index(r, k, l)); }
    bool valid(int r, int k, int l) const { return valid_[index(r, k, l)] != 0; }
    std::int64_t valid_count() const;
    const AttrColumns& cells() const { return cells_; }
    std::size_t bytes() const { return cells_.bytes() + valid_.size(); }

    // Resize policy: grow to need at once, shrink a dimension only after
    // `kShrinkPatience` consecutive updates below half utilisation.
    static constexpr int kShrinkPatience = 100;
    int resize_count() const { return resize_count_; }

private:
    void relayout(int jcap, int kcap);
    void write_route(const Instance& inst, int r, std::span<const int> route);
    void clear_route(int r);

    AttrColumns cells_;
    std::vector<std::uint8_t> valid_;
    std::vector<int> lengths_;
    int routes_ = 0, max_len_ = 0, jcap_ = 0, kcap_ = 0;
    int under_j_ = 0, under_k_ = 0, resize_count_ = 0;
    std::uint64_t stamp_ = 0;
};

SolutionTensor build_solution_tensor(const Instance& inst, const Solution& sol);
// Rebuilds the changed routes of `ts` after `sol.apply()` returned `change`.
void tensor_update(SolutionTensor& ts, const Instance& inst, const Solution& sol, const RouteChange& change);

// (route, position) of every depot start and every customer, in route order.
struct PositionalTensors {
    std::vector<int> route;  // P_r
    std::vector<int> pos;    // P_pi
    std::vector<int> node;
    std::uint64_t stamp = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(route.size()); }
};

PositionalTensors build_positional(const SolutionTensor& ts);

// Mask-retained position pairs in distinct routes, as indices into P, in
// lexicographic order.
struct EdgeIndexTensors {
    std::vector<std::int32_t> ei, ej;
    std::uint64_t stamp = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(ei.size()); }
};

EdgeIndexTensors build_edges(const PositionalTensors& p, const GranularMask& mask);

// Head / middle / tail records of 3-Seq(N) for a list of cut positions.
// For N = 0 the head ends at the position and the tail starts after it;
// for N > 0 the middle starts at the position. `joined` = head + tail.
struct SeqBundle {
    int n = 0;
    AttrColumns head, mid, tail, joined, whole;
    std::vector<int> route, pos, route_size;
    std::vector<std::uint8_t> valid;

    std::int64_t size() const { return static_cast<std::int64_t>(route.size()); }
    void resize(std::size_t m);
};

// Node-based: one entry per element of P.
SeqBundle extract_3seq_node(const Instance& inst, const SolutionTensor& ts, const PositionalTensors& p, int n);
// Route-based: dense J x (K - N - 1) grid, padding entries invalid.
SeqBundle extract_3seq_route(const Instance& inst, const SolutionTensor& ts, int n);
// Edge-based: the node bundles of both endpoints, gathered per edge.
std::pair<SeqBundle, SeqBundle> extract_3seq_edge(const Instance& inst, const SolutionTensor& ts,
                                                  const PositionalTensors& p, const EdgeIndexTensors& e, int n1,
                                                  int n2);

struct StepCounter {
    double seconds = 0.0;
    std::int64_t elements = 0;
    std::int64_t bytes = 0;
};

struct PipelineCounters {
    StepCounter extraction, concatenation, differencing, evaluation, update;
    std::int64_t calls = 0;
    std::int64_t last_elements = 0;  // scoring-tensor size of the latest call

    nlohmann::json to_json() const;
};

struct BatchOptions {
    Extraction inter = Extraction::Node;
    int threads = 1;
    const GranularMask* mask = nullptr;  // required for Edge
    std::int64_t tile_elements = 4096;
};

// Dense scoring tensor of one operator with its decode shape.
struct ScoringTensor {
    std::vector<double> scores;
    std::vector<std::int64_t> dims;
};

class BatchEvaluator final : public Evaluator {
public:
    BatchEvaluator(const Instance& inst, BatchOptions opts);
    ~BatchEvaluator() override;

    std::string name() const override;
    void reset(const Solution& sol) override;
    void update(const Solution& sol, const RouteChange& change) override;
    std::optional<Move> best(const Solution& sol, const Operator& op, const PenaltyWeights& w) override;
    nlohmann::json counters() const override { return counters_.to_json(); }

    // Minimum finite entry regardless of the improvement threshold.
    std::optional<Move> min_candidate(const Solution& sol, const Operator& op, const PenaltyWeights& w);
    // Materialises the whole scoring tensor (tests and small instances only).
    ScoringTensor scores(const Solution& sol, const Operator& op, const PenaltyWeights& w);
    // Number of elements in the scoring tensor of `op` for the current state.
    std::int64_t scoring_size(const Operator& op) const;
    Move decode(const Operator& op, std::int64_t flat) const;

    const SolutionTensor& tensor() const { return ts_; }
    const PositionalTensors& positions() const { return pos_; }
    const EdgeIndexTensors& edges() const { return edges_; }
    const PipelineCounters& pipeline() const { return counters_; }
    void reset_counters() { counters_ = {}; }

private:
    void check_fresh(const Solution& sol) const;
    void refresh_indices();
    std::optional<Move> run(const Operator& op, const PenaltyWeights& w, std::vector<double>* dump);

    const Instance& inst_;
    BatchOptions opts_;
    std::unique_ptr<Executor> exec_;
    SolutionTensor ts_;
    PositionalTensors pos_;
    EdgeIndexTensors edges_;
    PipelineCounters counters_;
    std::vector<double> dist_t_, time_t_;  // transposed link matrices
};

}  // namespace vrpts
