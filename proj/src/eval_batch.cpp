#include "vrpts/eval_batch.hpp"

#include <algorithm>

#include "vrpts/errors.hpp"

namespace vrpts {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); }

constexpr std::int64_t kRecordBytes = 8 * sizeof(double) + 2 * sizeof(int);

std::int64_t positive(std::int64_t v) { return v > 0 ? v : 0; }

}  // namespace

std::string_view to_string(Extraction e) {
    switch (e) {
    case Extraction::Route: return "route";
    case Extraction::Node: return "node";
    case Extraction::Edge: return "edge";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Solution tensor

void SolutionTensor::build(const Instance& inst, const Solution& sol) {
    routes_ = sol.num_routes();
    max_len_ = sol.max_route_size();
    jcap_ = kcap_ = 0;
    lengths_.clear();
    relayout(routes_, max_len_);
    for (int r = 0; r < routes_; ++r) write_route(inst, r, sol.route(r));
    under_j_ = under_k_ = 0;
    stamp_ = sol.stamp();
}

void SolutionTensor::relayout(int jcap, int kcap) {
    AttrColumns cells;
    const std::size_t total = std::size_t(jcap) * kcap * kcap;
    cells.resize(total);
    for (std::size_t i = 0; i < total; ++i) cells.set_padding(i);
    std::vector<std::uint8_t> valid(total, 0);
    std::vector<int> lengths(jcap, 0);
    const int keep = std::min(jcap, static_cast<int>(lengths_.size()));
    for (int r = 0; r < keep; ++r) {
        const int n = std::min(lengths_[r], kcap);
        if (n != lengths_[r]) continue;  // does not fit; the caller rewrites it
        lengths[r] = n;
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                const std::size_t dst = (std::size_t(r) * kcap + k) * kcap + l;
                cells.set(dst, cells_.get(index(r, k, l)));
                valid[dst] = 1;
            }
    }
    cells_ = std::move(cells);
    valid_ = std::move(valid);
    lengths_ = std::move(lengths);
    jcap_ = jcap;
    kcap_ = kcap;
    ++resize_count_;
}

void SolutionTensor::clear_route(int r) {
    for (int k = 0; k < kcap_; ++k)
        for (int l = 0; l < kcap_; ++l) {
            cells_.set_padding(index(r, k, l));
            valid_[index(r, k, l)] = 0;
        }
    lengths_[r] = 0;
}

void SolutionTensor::write_route(const Instance& inst, int r, std::span<const int> route) {
    clear_route(r);
    const AttrMatrix m(inst, route);
    const int n = m.size();
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            cells_.set(index(r, k, l), m.at(k, l));
            valid_[index(r, k, l)] = 1;
        }
    lengths_[r] = n;
}

void SolutionTensor::update(const Instance& inst, const Solution& sol, const RouteChange& change) {
    if (routes_ != change.old_count) throw ContractError("solution tensor does not match the pre-move solution");
    const int J = change.new_count;
    const int K = sol.max_route_size();
    if (J > jcap_ || K > kcap_) {
        relayout(std::max(J, jcap_), std::max(K, kcap_));
        under_j_ = under_k_ = 0;
    } else {
        under_j_ = 2 * J < jcap_ ? under_j_ + 1 : 0;
        under_k_ = 2 * K < kcap_ ? under_k_ + 1 : 0;
        if (under_j_ >= kShrinkPatience || under_k_ >= kShrinkPatience) {
            relayout(under_j_ >= kShrinkPatience ? J : jcap_, under_k_ >= kShrinkPatience ? K : kcap_);
            under_j_ = under_k_ = 0;
        }
    }
    for (int r = J; r < std::min(routes_, jcap_); ++r) clear_route(r);
    routes_ = J;
    max_len_ = K;
    for (int r : change.changed) write_route(inst, r, sol.route(r));
    // Routes that did not fit a shrunken layout are rewritten as well.
    for (int r = 0; r < J; ++r)
        if (lengths_[r] != sol.route_size(r)) write_route(inst, r, sol.route(r));
    stamp_ = sol.stamp();
}

std::int64_t SolutionTensor::valid_count() const {
    return std::count(valid_.begin(), valid_.end(), std::uint8_t{1});
}

SolutionTensor build_solution_tensor(const Instance& inst, const Solution& sol) {
    SolutionTensor ts;
    ts.build(inst, sol);
    return ts;
}

void tensor_update(SolutionTensor& ts, const Instance& inst, const Solution& sol, const RouteChange& change) {
    ts.update(inst, sol, change);
}

// ---------------------------------------------------------------------------
// Positional and edge index tensors

PositionalTensors build_positional(const SolutionTensor& ts) {
    PositionalTensors p;
    for (int r = 0; r < ts.routes(); ++r)
        for (int k = 0; k + 1 < ts.length(r); ++k) {
            p.route.push_back(r);
            p.pos.push_back(k);
            p.node.push_back(ts.cells().first[ts.index(r, k, k)]);
        }
    p.stamp = ts.stamp();
    return p;
}

EdgeIndexTensors build_edges(const PositionalTensors& p, const GranularMask& mask) {
    EdgeIndexTensors e;
    const auto q = static_cast<std::int32_t>(p.size());
    for (std::int32_t i = 0; i < q; ++i)
        for (std::int32_t j = 0; j < q; ++j)
            if (p.route[i] != p.route[j] && mask(p.node[i], p.node[j])) {
                e.ei.push_back(i);
                e.ej.push_back(j);
            }
    e.stamp = p.stamp;
    return e;
}

// ---------------------------------------------------------------------------
// 3-Seq extraction

void SeqBundle::resize(std::size_t m) {
    for (auto* c : {&head, &mid, &tail, &joined, &whole}) c->resize(m);
    route.resize(m);
    pos.resize(m);
    route_size.resize(m);
    valid.resize(m);
}

namespace {

void fill_entry(const Instance& inst, const SolutionTensor& ts, SeqBundle& b, std::size_t i, int r, int p) {
    const int n = r < ts.routes() ? ts.length(r) : 0;
    const int N = b.n;
    b.route[i] = r;
    b.pos[i] = p;
    b.route_size[i] = n;
    const bool ok = n > 0 && (N == 0 ? p >= 0 && p <= n - 2 : p >= 1 && p + N <= n - 1);
    b.valid[i] = ok;
    if (!ok) {
        for (auto* c : {&b.head, &b.mid, &b.tail, &b.joined, &b.whole}) c->set_padding(i);
        return;
    }
    b.whole.set(i, ts.at(r, 0, n - 1));
    if (N == 0) {
        b.head.set(i, ts.at(r, 0, p));
        b.mid.set_padding(i);
        b.tail.set(i, ts.at(r, p + 1, n - 1));
        b.joined.set_padding(i);
    } else {
        const SubseqAttr head = ts.at(r, 0, p - 1);
        const SubseqAttr tail = ts.at(r, p + N, n - 1);
        b.head.set(i, head);
        b.mid.set(i, ts.at(r, p, p + N - 1));
        b.tail.set(i, tail);
        b.joined.set(i, concat(inst, head, tail));
    }
}

}  // namespace

SeqBundle extract_3seq_node(const Instance& inst, const SolutionTensor& ts, const PositionalTensors& p, int n) {
    SeqBundle b;
    b.n = n;
    b.resize(p.route.size());
    for (std::size_t i = 0; i < p.route.size(); ++i) fill_entry(inst, ts, b, i, p.route[i], p.pos[i]);
    return b;
}

SeqBundle extract_3seq_route(const Instance& inst, const SolutionTensor& ts, int n) {
    SeqBundle b;
    b.n = n;
    const int J = ts.routes();
    const int L = static_cast<int>(positive(ts.max_length() - n - 1));
    b.resize(std::size_t(J) * L);
    const int offset = n > 0 ? 1 : 0;
    for (int r = 0; r < J; ++r)
        for (int i = 0; i < L; ++i) fill_entry(inst, ts, b, std::size_t(r) * L + i, r, i + offset);
    return b;
}

std::pair<SeqBundle, SeqBundle> extract_3seq_edge(const Instance& inst, const SolutionTensor& ts,
                                                  const PositionalTensors& p, const EdgeIndexTensors& e, int n1,
                                                  int n2) {
    if (e.stamp != ts.stamp() || p.stamp != ts.stamp()) throw ContractError("edge index tensors are stale");
    SeqBundle a, b;
    a.n = n1;
    b.n = n2;
    a.resize(e.ei.size());
    b.resize(e.ej.size());
    for (std::size_t k = 0; k < e.ei.size(); ++k) {
        fill_entry(inst, ts, a, k, p.route[e.ei[k]], p.pos[e.ei[k]]);
        fill_entry(inst, ts, b, k, p.route[e.ej[k]], p.pos[e.ej[k]]);
    }
    return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Counters

nlohmann::json PipelineCounters::to_json() const {
    auto step = [](const StepCounter& s) {
        return nlohmann::json{{"seconds", s.seconds}, {"elements", s.elements}, {"bytes", s.bytes}};
    };
    return {{"calls", calls},
            {"last_scoring_elements", last_elements},
            {"extraction", step(extraction)},
            {"concatenation", step(concatenation)},
            {"differencing", step(differencing)},
            {"evaluation", step(evaluation)},
            {"update", step(update)}};
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

struct Scratch {
    std::vector<double> na_d, na_l, na_w, nb_d, nb_l, nb_w, dd, dl, dw, f;
    std::vector<int> dm;
    std::vector<std::uint8_t> ok;

    void resize(std::size_t m) {
        for (auto* v : {&na_d, &na_l, &na_w, &nb_d, &nb_l, &nb_w, &dd, &dl, &dw, &f})
            if (v->size() < m) v->resize(m);
        if (dm.size() < m) dm.resize(m);
        if (ok.size() < m) ok.resize(m);
    }
};

thread_local Scratch tl_scratch;

struct TileResult {
    ArgMin best;
    double concat_s = 0.0, diff_s = 0.0, eval_s = 0.0;
};

// SubseqAttr without the endpoint ids; the kernels track endpoints
// themselves so the hot loops carry only doubles. Same arithmetic as concat().
struct Lean {
    double dist, load_in, load_out, load_max, duration, earliest, latest, warp;
};

inline Lean lean_cat(const Lean& a, const Lean& b, double c_link, double t_link) {
    const double dt = a.duration + t_link - a.warp;
    const double dw = std::max(b.earliest - dt - a.latest, 0.0);
    const double dv = std::max(a.earliest + dt - b.latest, 0.0);
    Lean r;
    r.dist = a.dist + c_link + b.dist;
    r.load_in = a.load_in + b.load_in;
    r.load_out = a.load_out + b.load_out;
    r.load_max = std::max(a.load_max + b.load_in, a.load_out + b.load_max);
    r.duration = a.duration + t_link + dw + b.duration;
    r.earliest = std::max(a.earliest, b.earliest - dt) - dw;
    r.latest = std::min(a.latest, b.latest - dt) + dv;
    r.warp = a.warp + dv + b.warp;
    return r;
}

// Raw column pointers so the hot loops see plain arrays.
struct ColView {
    const double *dist, *load_in, *load_out, *load_max, *duration, *earliest, *latest, *warp;
    const int *first, *last;

    explicit ColView(const AttrColumns& c)
        : dist(c.dist.data()), load_in(c.load_in.data()), load_out(c.load_out.data()), load_max(c.load_max.data()),
          duration(c.duration.data()), earliest(c.earliest.data()), latest(c.latest.data()), warp(c.warp.data()),
          first(c.first.data()), last(c.last.data()) { }

    SubseqAttr operator[](std::size_t i) const {
        return SubseqAttr{dist[i],     load_in[i], load_out[i], load_max[i], duration[i],
                          earliest[i], latest[i],  warp[i],     first[i],    last[i]};
    }
    Lean lean(std::size_t i) const {
        return Lean{dist[i], load_in[i], load_out[i], load_max[i], duration[i], earliest[i], latest[i], warp[i]};
    }
};

// Concatenation with the link looked up in flat matrices.
struct Links {
    const double* dist;
    const double* time;
    std::size_t n;

    explicit Links(const Instance& inst)
        : dist(inst.distance_matrix().data()), time(inst.time_matrix().data()), n(inst.nodes().size()) { }

    SubseqAttr operator()(const SubseqAttr& a, const SubseqAttr& b) const {
        const std::size_t k = std::size_t(a.last) * n + std::size_t(b.first);
        return concat(a, b, dist[k], time[k]);
    }
};

struct BundleView {
    ColView head, mid, tail, joined, whole;
    const int *route, *pos, *size;
    const std::uint8_t* valid;

    explicit BundleView(const SeqBundle& b)
        : head(b.head), mid(b.mid), tail(b.tail), joined(b.joined), whole(b.whole), route(b.route.data()),
          pos(b.pos.data()), size(b.route_size.data()), valid(b.valid.data()) { }
};

struct InterCtx {
    const Instance& inst;
    const SeqBundle& row;
    const SeqBundle& col;
    int n1, n2;
    bool ordered;  // route_a < route_b required
    const std::int64_t* col_start = nullptr;
    const double* dist_t = nullptr;  // transposed matrices
    const double* time_t = nullptr;
};

// Column bundles are sorted by route; start[r] is the first column of route r.
std::vector<std::int64_t> route_starts(const SeqBundle& b, int routes) {
    std::vector<std::int64_t> start(std::size_t(routes) + 1, b.size());
    for (std::int64_t k = b.size() - 1; k >= 0; --k) start[b.route[k]] = k;
    for (int r = routes - 1; r >= 0; --r) start[r] = std::min(start[r], start[r + 1]);
    return start;
}

struct PairAttrs {
    SubseqAttr new_a, new_b;
    int dm;
};

template <MoveKind K>
struct InterKernel {
    Links cat;
    BundleView R, C;
    int n1;
    bool ordered;
    double cap;

    const std::int64_t* col_start = nullptr;  // first column of each route, J + 1 entries
    const double* dist_t = nullptr;
    const double* time_t = nullptr;

    explicit InterKernel(const InterCtx& c)
        : cat(c.inst), R(c.row), C(c.col), n1(c.n1), ordered(c.ordered), cap(c.inst.capacity()),
          col_start(c.col_start), dist_t(c.dist_t), time_t(c.time_t) { }

    PairAttrs element(std::size_t i, std::size_t j) const {
        PairAttrs out;
        if constexpr (K == MoveKind::InterRelocate) {
            out.new_a = R.joined[i];
            out.new_b = cat(cat(C.head[j], R.mid[i]), C.tail[j]);
            const int na = R.size[i], nb = C.size[j];
            out.dm = route_count_delta(na, nb, na - n1, nb + n1);
        } else if constexpr (K == MoveKind::InterSwap) {
            out.new_a = cat(cat(R.head[i], C.mid[j]), R.tail[i]);
            out.new_b = cat(cat(C.head[j], R.mid[i]), C.tail[j]);
            out.dm = 0;
        } else {
            out.new_a = cat(R.head[i], C.tail[j]);
            out.new_b = cat(C.head[j], R.tail[i]);
            const int na = R.size[i], nb = C.size[j], pa = R.pos[i], pb = C.pos[j];
            out.dm = route_count_delta(na, nb, pa + nb - pb, pb + na - pa);
        }
        return out;
    }

    // Only the fields the differencing pass reads.
    struct Out {
        double a_dist, a_load, a_warp, b_dist, b_load, b_warp;
        int dm;
    };

    Out lean_element(std::size_t i, std::size_t j) const {
        const double* D = cat.dist;
        const double* T = cat.time;
        const int n = static_cast<int>(cat.n);  // node counts stay far below 46k
        auto link = [&](int from, int to) { return from * n + to; };
        Out o;
        if constexpr (K == MoveKind::InterRelocate) {
            const int k1 = link(C.head.last[j], R.mid.first[i]);
            const int k2 = link(R.mid.last[i], C.tail.first[j]);
            const Lean b = lean_cat(lean_cat(C.head.lean(j), R.mid.lean(i), D[k1], T[k1]), C.tail.lean(j), D[k2], T[k2]);
            o.a_dist = R.joined.dist[i];
            o.a_load = R.joined.load_max[i];
            o.a_warp = R.joined.warp[i];
            o.b_dist = b.dist;
            o.b_load = b.load_max;
            o.b_warp = b.warp;
            const int na = R.size[i], nb = C.size[j];
            o.dm = route_count_delta(na, nb, na - n1, nb + n1);
        } else if constexpr (K == MoveKind::InterSwap) {
            const int ka1 = link(R.head.last[i], C.mid.first[j]);
            const int ka2 = link(C.mid.last[j], R.tail.first[i]);
            const int kb1 = link(C.head.last[j], R.mid.first[i]);
            const int kb2 = link(R.mid.last[i], C.tail.first[j]);
            const Lean a = lean_cat(lean_cat(R.head.lean(i), C.mid.lean(j), D[ka1], T[ka1]), R.tail.lean(i), D[ka2], T[ka2]);
            const Lean b = lean_cat(lean_cat(C.head.lean(j), R.mid.lean(i), D[kb1], T[kb1]), C.tail.lean(j), D[kb2], T[kb2]);
            o.a_dist = a.dist;
            o.a_load = a.load_max;
            o.a_warp = a.warp;
            o.b_dist = b.dist;
            o.b_load = b.load_max;
            o.b_warp = b.warp;
            o.dm = 0;
        } else {
            const int ka = link(R.head.last[i], C.tail.first[j]);
            const int kb = link(C.head.last[j], R.tail.first[i]);
            const Lean a = lean_cat(R.head.lean(i), C.tail.lean(j), D[ka], T[ka]);
            const Lean b = lean_cat(C.head.lean(j), R.tail.lean(i), D[kb], T[kb]);
            o.a_dist = a.dist;
            o.a_load = a.load_max;
            o.a_warp = a.warp;
            o.b_dist = b.dist;
            o.b_load = b.load_max;
            o.b_warp = b.warp;
            const int na = R.size[i], nb = C.size[j], pa = R.pos[i], pb = C.pos[j];
            o.dm = route_count_delta(na, nb, pa + nb - pb, pb + na - pa);
        }
        return o;
    }

    bool valid(std::size_t i, std::size_t j) const {
        const int ra = R.route[i], rb = C.route[j];
        return (R.valid[i] != 0) & (C.valid[j] != 0) & (ra != rb) & (!ordered | (ra < rb));
    }
};

// Scratch columns as unaliased pointers for the tile loops.
struct ScratchView {
    double* __restrict na_d;
    double* __restrict na_l;
    double* __restrict na_w;
    double* __restrict nb_d;
    double* __restrict nb_l;
    double* __restrict nb_w;
    double* __restrict dd;
    double* __restrict dl;
    double* __restrict dw;
    int* __restrict dm;
    std::uint8_t* __restrict ok;

    explicit ScratchView(Scratch& s)
        : na_d(s.na_d.data()), na_l(s.na_l.data()), na_w(s.na_w.data()), nb_d(s.nb_d.data()), nb_l(s.nb_l.data()),
          nb_w(s.nb_w.data()), dd(s.dd.data()), dl(s.dl.data()), dw(s.dw.data()), dm(s.dm.data()), ok(s.ok.data()) { }
};

template <MoveKind K>
inline void concat_pass(const InterKernel<K>& k, std::size_t i, std::size_t j, std::size_t t, const ScratchView& s) {
    const auto p = k.lean_element(i, j);
    s.na_d[t] = p.a_dist;
    s.na_l[t] = p.a_load;
    s.na_w[t] = p.a_warp;
    s.nb_d[t] = p.b_dist;
    s.nb_l[t] = p.b_load;
    s.nb_w[t] = p.b_warp;
    s.dm[t] = p.dm;
    s.ok[t] = k.valid(i, j);
}

// Concatenation pass for one row against columns [0, cols). Every pointer
// and row value is copied to a local first so the column loop vectorises.
template <MoveKind K>
void concat_row(const InterKernel<K>& k, std::size_t i, std::size_t cols, const ScratchView& sv, std::size_t o) {
    // Links into a fixed row node read D/T; links out of a per-column node
    // read the transposes, so both walk one contiguous row.
    const double* __restrict D = k.cat.dist;
    const double* __restrict T = k.cat.time;
    const double* __restrict Dt = k.dist_t;
    const double* __restrict Tt = k.time_t;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(k.cat.n);
    const ColView ch = k.C.head, cm = k.C.mid, ct = k.C.tail;
    const int* __restrict c_route = k.C.route;
    const int* __restrict c_size = k.C.size;
    const int* __restrict c_pos = k.C.pos;
    const std::uint8_t* __restrict c_valid = k.C.valid;
    double* __restrict na_d = sv.na_d + o;
    double* __restrict na_l = sv.na_l + o;
    double* __restrict na_w = sv.na_w + o;
    double* __restrict nb_d = sv.nb_d + o;
    double* __restrict nb_l = sv.nb_l + o;
    double* __restrict nb_w = sv.nb_w + o;
    int* __restrict dm = sv.dm + o;
    std::uint8_t* __restrict ok = sv.ok + o;

    const int ra = k.R.route[i], na = k.R.size[i], pa = k.R.pos[i];
    const bool row_ok = k.R.valid[i] != 0;
    const bool ordered = k.ordered;
    const int n1 = k.n1;
    const Lean rh = k.R.head.lean(i), rm = k.R.mid.lean(i), rt = k.R.tail.lean(i);
    const int rh_last = k.R.head.last[i], rm_first = k.R.mid.first[i], rm_last = k.R.mid.last[i];
    const int rt_first = k.R.tail.first[i];
    const double rj_d = k.R.joined.dist[i], rj_l = k.R.joined.load_max[i], rj_w = k.R.joined.warp[i];

    if (!row_ok) {
        std::fill(ok, ok + cols, std::uint8_t{0});
        std::fill(dm, dm + cols, 0);
        for (double* col : {na_d, na_l, na_w, nb_d, nb_l, nb_w}) std::fill(col, col + cols, 0.0);
        return;
    }
    // Columns of the row's own route, and of earlier routes when the
    // operator is ordered, are masked anyway; skip their concatenations.
    const auto skip_lo = static_cast<std::size_t>(ordered ? 0 : k.col_start[ra]);
    const auto skip_hi = static_cast<std::size_t>(k.col_start[ra + 1]);
    for (std::size_t j = skip_lo; j < skip_hi; ++j) {
        ok[j] = 0;
        na_d[j] = na_l[j] = na_w[j] = nb_d[j] = nb_l[j] = nb_w[j] = 0.0;
        dm[j] = 0;
    }
    for (int part = 0; part < 2; ++part) {
        const std::size_t j0 = part == 0 ? 0 : skip_hi, j1 = part == 0 ? skip_lo : cols;
#pragma omp simd
        for (std::size_t j = j0; j < j1; ++j) {
            const int rb = c_route[j], nb = c_size[j];
            ok[j] = row_ok & (c_valid[j] != 0) & (ra != rb) & (!ordered | (ra < rb));
            if constexpr (K == MoveKind::InterRelocate) {
                const std::ptrdiff_t k1 = std::ptrdiff_t(rm_first) * n + ch.last[j];
                const std::ptrdiff_t k2 = std::ptrdiff_t(rm_last) * n + ct.first[j];
                const Lean b = lean_cat(lean_cat(ch.lean(j), rm, Dt[k1], Tt[k1]), ct.lean(j), D[k2], T[k2]);
                na_d[j] = rj_d;
                na_l[j] = rj_l;
                na_w[j] = rj_w;
                nb_d[j] = b.dist;
                nb_l[j] = b.load_max;
                nb_w[j] = b.warp;
                dm[j] = route_count_delta(na, nb, na - n1, nb + n1);
            } else if constexpr (K == MoveKind::InterSwap) {
                const std::ptrdiff_t ka1 = std::ptrdiff_t(rh_last) * n + cm.first[j];
                const std::ptrdiff_t ka2 = std::ptrdiff_t(rt_first) * n + cm.last[j];
                const std::ptrdiff_t kb1 = std::ptrdiff_t(rm_first) * n + ch.last[j];
                const std::ptrdiff_t kb2 = std::ptrdiff_t(rm_last) * n + ct.first[j];
                const Lean a = lean_cat(lean_cat(rh, cm.lean(j), D[ka1], T[ka1]), rt, Dt[ka2], Tt[ka2]);
                const Lean b = lean_cat(lean_cat(ch.lean(j), rm, Dt[kb1], Tt[kb1]), ct.lean(j), D[kb2], T[kb2]);
                na_d[j] = a.dist;
                na_l[j] = a.load_max;
                na_w[j] = a.warp;
                nb_d[j] = b.dist;
                nb_l[j] = b.load_max;
                nb_w[j] = b.warp;
                dm[j] = 0;
            } else {
                const std::ptrdiff_t ka = std::ptrdiff_t(rh_last) * n + ct.first[j];
                const std::ptrdiff_t kb = std::ptrdiff_t(rt_first) * n + ch.last[j];
                const Lean a = lean_cat(rh, ct.lean(j), D[ka], T[ka]);
                const Lean b = lean_cat(ch.lean(j), rt, Dt[kb], Tt[kb]);
                na_d[j] = a.dist;
                na_l[j] = a.load_max;
                na_w[j] = a.warp;
                nb_d[j] = b.dist;
                nb_l[j] = b.load_max;
                nb_w[j] = b.warp;
                const int pb = c_pos[j];
                dm[j] = route_count_delta(na, nb, pa + nb - pb, pb + na - pa);
            }
        }
    }
}

template <MoveKind K>
inline void diff_pass(const InterKernel<K>& k, std::size_t i, std::size_t j, std::size_t t, const ScratchView& s) {
    const double cap = k.cap;
    const auto& RW = k.R.whole;
    const auto& CW = k.C.whole;
    s.dd[t] = (s.na_d[t] + s.nb_d[t]) - (RW.dist[i] + CW.dist[j]);
    s.dw[t] = (s.na_w[t] + s.nb_w[t]) - (RW.warp[i] + CW.warp[j]);
    s.dl[t] = (load_excess(s.na_l[t], cap) + load_excess(s.nb_l[t], cap))
        - (load_excess(RW.load_max[i], cap) + load_excess(CW.load_max[j], cap));
}

template <MoveKind K>
PairAttrs inter_element(const InterCtx& c, std::size_t i, std::size_t j) {
    return InterKernel<K>(c).element(i, j);
}

// Shared evaluation pass: masked penalised score, argmin, optional dump.
inline void eval_pass(Scratch& s, const PenaltyWeights& w, std::int64_t m, std::int64_t base, double* dump,
                      TileResult& res) {
    for (std::int64_t t = 0; t < m; ++t)
        s.f[t] = s.ok[t] ? penalized(w, s.dd[t], s.dm[t], s.dl[t], s.dw[t]) : kInfinity;
    res.best = argmin(std::span<const double>(s.f.data(), static_cast<std::size_t>(m)), base);
    if (dump) std::copy(s.f.begin(), s.f.begin() + m, dump + base);
}

// Rows [r0, r1) against every column; flat index row * cols + col.
template <MoveKind K>
TileResult inter_tile_dense(const InterCtx& c, const PenaltyWeights& w, std::int64_t r0, std::int64_t r1,
                            double* dump) {
    TileResult res;
    const InterKernel<K> k(c);
    const auto cols = static_cast<std::size_t>(c.col.size());
    const std::int64_t m = (r1 - r0) * static_cast<std::int64_t>(cols);
    auto& s = tl_scratch;
    s.resize(static_cast<std::size_t>(m));
    const ScratchView v(s);

    auto t0 = Clock::now();
    for (std::int64_t i = r0; i < r1; ++i) {
        const std::size_t o = std::size_t(i - r0) * cols;
        concat_row(k, std::size_t(i), cols, v, o);
    }
    auto t1 = Clock::now();
    for (std::int64_t i = r0; i < r1; ++i) {
        const std::size_t o = std::size_t(i - r0) * cols;
        #pragma omp simd
        for (std::size_t j = 0; j < cols; ++j) diff_pass(k, std::size_t(i), j, o + j, v);
    }
    auto t2 = Clock::now();
    eval_pass(s, w, m, r0 * static_cast<std::int64_t>(cols), dump, res);
    auto t3 = Clock::now();
    res.concat_s = seconds(t0, t1);
    res.diff_s = seconds(t1, t2);
    res.eval_s = seconds(t2, t3);
    return res;
}

// Edges [e0, e0 + m) of the gathered pair list.
template <MoveKind K>
TileResult inter_tile_edges(const InterCtx& c, const PenaltyWeights& w, const std::int32_t* ei, const std::int32_t* ej,
                            std::int64_t e0, std::int64_t m, double* dump) {
    TileResult res;
    const InterKernel<K> k(c);
    auto& s = tl_scratch;
    s.resize(static_cast<std::size_t>(m));
    const ScratchView v(s);

    auto t0 = Clock::now();
    #pragma omp simd
    for (std::int64_t t = 0; t < m; ++t) concat_pass(k, std::size_t(ei[e0 + t]), std::size_t(ej[e0 + t]), std::size_t(t), v);
    auto t1 = Clock::now();
    #pragma omp simd
    for (std::int64_t t = 0; t < m; ++t) diff_pass(k, std::size_t(ei[e0 + t]), std::size_t(ej[e0 + t]), std::size_t(t), v);
    auto t2 = Clock::now();
    eval_pass(s, w, m, e0, dump, res);
    auto t3 = Clock::now();
    res.concat_s = seconds(t0, t1);
    res.diff_s = seconds(t1, t2);
    res.eval_s = seconds(t2, t3);
    return res;
}

struct IntraShape {
    std::int64_t a = 0, b = 0;  // per-route grid
    int pa_offset = 1, pb_offset = 0;
};

IntraShape intra_shape(const Operator& op, int K) {
    IntraShape s;
    switch (op.kind) {
    case MoveKind::IntraRelocate:
        s.a = positive(K - op.n1 - 1);
        s.b = positive(K - 1);
        s.pb_offset = 0;
        break;
    case MoveKind::IntraSwap:
        s.a = positive(K - op.n1 - 1);
        s.b = positive(K - op.n2 - 1);
        s.pb_offset = 1;
        break;
    default:
        s.a = s.b = positive(K - 2);
        s.pb_offset = 1;
        break;
    }
    return s;
}

// Head row and tail column of every route (the S_h / S_t slabs).
struct IntraSlabs {
    AttrColumns head, tail;
    int K = 0;
};

struct IntraCtx {
    const Instance& inst;
    const SolutionTensor& ts;
    const IntraSlabs& slabs;
    Operator op;
};

// New route record for one intra candidate; false when the cell is invalid.
inline bool intra_element(const IntraCtx& c, int r, int n, int pa, int pb, SubseqAttr& out) {
    const auto& ts = c.ts;
    const auto head = [&](int l) { return c.slabs.head.get(std::size_t(r) * c.slabs.K + l); };
    const auto tail = [&](int k) { return c.slabs.tail.get(std::size_t(r) * c.slabs.K + k); };
    const int N1 = c.op.n1, N2 = c.op.n2;
    switch (c.op.kind) {
    case MoveKind::IntraRelocate: {
        if (pa + N1 > n - 1 || pb > n - 2) return false;
        const SubseqAttr seg = ts.at(r, pa, pa + N1 - 1);
        if (pb >= pa + N1) {
            const SubseqAttr x = concat(c.inst, ts.at(r, pa + N1, pb), seg);
            out = concat(c.inst, concat(c.inst, head(pa - 1), x), tail(pb + 1));
        } else if (pb <= pa - 2) {
            const SubseqAttr x = concat(c.inst, seg, ts.at(r, pb + 1, pa - 1));
            out = concat(c.inst, concat(c.inst, head(pb), x), tail(pa + N1));
        } else {
            return false;
        }
        return true;
    }
    case MoveKind::IntraSwap: {
        if (pa + N1 > n - 1 || pb + N2 > n - 1) return false;
        if (N1 == N2 && pb <= pa) return false;
        if (!(pa + N1 <= pb || pb + N2 <= pa)) return false;
        const bool fwd = pa < pb;
        const int p1 = fwd ? pa : pb, l1 = fwd ? N1 : N2;
        const int p2 = fwd ? pb : pa, l2 = fwd ? N2 : N1;
        const SubseqAttr x1 = ts.at(r, p2, p2 + l2 - 1);
        const SubseqAttr x2 = ts.at(r, p1, p1 + l1 - 1);
        const SubseqAttr x = p1 + l1 <= p2 - 1 ? concat(c.inst, concat(c.inst, x1, ts.at(r, p1 + l1, p2 - 1)), x2)
                                               : concat(c.inst, x1, x2);
        out = concat(c.inst, concat(c.inst, head(p1 - 1), x), tail(p2 + l2));
        return true;
    }
    default: {
        if (pb > n - 2 || pa >= pb) return false;
        out = concat(c.inst, concat(c.inst, head(pa - 1), swap_ends(ts.at(r, pa, pb))), tail(pb + 1));
        return true;
    }
    }
}

TileResult intra_tile(const IntraCtx& c, const IntraShape& sh, const PenaltyWeights& w, int r, double* dump) {
    TileResult res;
    const std::int64_t m = sh.a * sh.b;
    const std::int64_t base = r * m;
    auto& s = tl_scratch;
    s.resize(static_cast<std::size_t>(m));
    const double cap = c.inst.capacity();
    const int n = c.ts.length(r);
    const SubseqAttr old = c.ts.at(r, 0, n - 1);

    auto t0 = Clock::now();
    for (std::int64_t ia = 0; ia < sh.a; ++ia)
        for (std::int64_t ib = 0; ib < sh.b; ++ib) {
            const std::int64_t t = ia * sh.b + ib;
            SubseqAttr nr;
            const bool ok = intra_element(c, r, n, static_cast<int>(ia) + sh.pa_offset,
                                          static_cast<int>(ib) + sh.pb_offset, nr);
            s.ok[t] = ok;
            s.na_d[t] = ok ? nr.dist : 0.0;
            s.na_l[t] = ok ? nr.load_max : 0.0;
            s.na_w[t] = ok ? nr.warp : 0.0;
        }
    auto t1 = Clock::now();
    for (std::int64_t t = 0; t < m; ++t) {
        s.dd[t] = s.na_d[t] - old.dist;
        s.dw[t] = s.na_w[t] - old.warp;
        s.dl[t] = load_excess(s.na_l[t], cap) - load_excess(old.load_max, cap);
    }
    auto t2 = Clock::now();
    for (std::int64_t t = 0; t < m; ++t) s.f[t] = s.ok[t] ? penalized(w, s.dd[t], 0, s.dl[t], s.dw[t]) : kInfinity;
    res.best = argmin(std::span<const double>(s.f.data(), static_cast<std::size_t>(m)), base);
    if (dump) std::copy(s.f.begin(), s.f.begin() + m, dump + base);
    auto t3 = Clock::now();
    res.concat_s = seconds(t0, t1);
    res.diff_s = seconds(t1, t2);
    res.eval_s = seconds(t2, t3);
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// Evaluator

BatchEvaluator::BatchEvaluator(const Instance& inst, BatchOptions opts)
    : inst_(inst), opts_(opts), exec_(std::make_unique<Executor>(opts.threads)) {
    if (opts_.inter == Extraction::Edge && !opts_.mask)
        throw std::invalid_argument("edge-based extraction needs a granular mask");
    if (opts_.tile_elements < 1) opts_.tile_elements = 1;
    const std::size_t n = inst.nodes().size();
    dist_t_.resize(n * n);
    time_t_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dist_t_[j * n + i] = inst.distance(int(i), int(j));
            time_t_[j * n + i] = inst.travel_time(int(i), int(j));
        }
}

BatchEvaluator::~BatchEvaluator() = default;

std::string BatchEvaluator::name() const { return "batch-" + std::string(to_string(opts_.inter)); }

void BatchEvaluator::refresh_indices() {
    pos_ = build_positional(ts_);
    if (opts_.inter == Extraction::Edge) edges_ = build_edges(pos_, *opts_.mask);
}

void BatchEvaluator::reset(const Solution& sol) {
    const auto t0 = Clock::now();
    ts_.build(inst_, sol);
    refresh_indices();
    counters_.update.seconds += seconds(t0, Clock::now());
    counters_.update.bytes += static_cast<std::int64_t>(ts_.bytes());
}

void BatchEvaluator::update(const Solution& sol, const RouteChange& change) {
    const auto t0 = Clock::now();
    ts_.update(inst_, sol, change);
    refresh_indices();
    counters_.update.seconds += seconds(t0, Clock::now());
    std::int64_t touched = 0;
    for (int r : change.changed) touched += std::int64_t(ts_.length(r)) * ts_.length(r);
    counters_.update.elements += touched;
    counters_.update.bytes += touched * kRecordBytes;
}

void BatchEvaluator::check_fresh(const Solution& sol) const {
    if (ts_.stamp() != sol.stamp() || pos_.stamp != sol.stamp()
        || (opts_.inter == Extraction::Edge && edges_.stamp != sol.stamp()))
        throw ContractError("solution tensor is stale for this solution");
}

std::int64_t BatchEvaluator::scoring_size(const Operator& op) const {
    const std::int64_t J = ts_.routes(), K = ts_.max_length();
    if (!is_inter(op.kind)) {
        const auto sh = intra_shape(op, static_cast<int>(K));
        return J * sh.a * sh.b;
    }
    switch (opts_.inter) {
    case Extraction::Node: return pos_.size() * pos_.size();
    case Extraction::Edge: return edges_.size();
    case Extraction::Route: return J * positive(K - op.n1 - 1) * J * positive(K - op.n2 - 1);
    }
    return 0;
}

Move BatchEvaluator::decode(const Operator& op, std::int64_t flat) const {
    Move m;
    m.kind = op.kind;
    m.len_a = op.n1;
    m.len_b = op.n2;
    const std::int64_t K = ts_.max_length();
    if (!is_inter(op.kind)) {
        const auto sh = intra_shape(op, static_cast<int>(K));
        const std::int64_t per = sh.a * sh.b;
        m.route_a = m.route_b = static_cast<int>(flat / per);
        m.pos_a = static_cast<int>((flat % per) / sh.b) + sh.pa_offset;
        m.pos_b = static_cast<int>(flat % sh.b) + sh.pb_offset;
        return m;
    }
    std::int64_t i = 0, j = 0;
    switch (opts_.inter) {
    case Extraction::Node:
        i = flat / pos_.size();
        j = flat % pos_.size();
        break;
    case Extraction::Edge:
        i = edges_.ei[flat];
        j = edges_.ej[flat];
        break;
    case Extraction::Route: {
        const std::int64_t la = positive(K - op.n1 - 1), lb = positive(K - op.n2 - 1);
        const std::int64_t cols = ts_.routes() * lb;
        const std::int64_t row = flat / cols, col = flat % cols;
        m.route_a = static_cast<int>(row / la);
        m.pos_a = static_cast<int>(row % la) + (op.n1 > 0 ? 1 : 0);
        m.route_b = static_cast<int>(col / lb);
        m.pos_b = static_cast<int>(col % lb) + (op.n2 > 0 ? 1 : 0);
        return m;
    }
    }
    m.route_a = pos_.route[i];
    m.pos_a = pos_.pos[i];
    m.route_b = pos_.route[j];
    m.pos_b = pos_.pos[j];
    return m;
}

std::optional<Move> BatchEvaluator::run(const Operator& op, const PenaltyWeights& w, std::vector<double>* dump) {
    ++counters_.calls;
    const std::int64_t total = scoring_size(op);
    counters_.last_elements = total;
    if (dump) dump->assign(static_cast<std::size_t>(total), kInfinity);
    double* out = dump ? dump->data() : nullptr;

    std::vector<TileResult> tiles;
    auto finish = [&](const auto& recompute) -> std::optional<Move> {
        ArgMin best;
        for (const auto& t : tiles) {
            best.merge(t.best);
            counters_.concatenation.seconds += t.concat_s;
            counters_.differencing.seconds += t.diff_s;
            counters_.evaluation.seconds += t.eval_s;
        }
        counters_.concatenation.elements += total;
        counters_.differencing.elements += total;
        counters_.evaluation.elements += total;
        counters_.concatenation.bytes += total * 6 * std::int64_t(sizeof(double));
        counters_.differencing.bytes += total * 3 * std::int64_t(sizeof(double));
        counters_.evaluation.bytes += total * std::int64_t(sizeof(double));
        if (!best.found()) return std::nullopt;
        Move m = decode(op, best.index);
        fill(m, recompute(m, best.index));
        return m;
    };

    if (!is_inter(op.kind)) {
        if (op.kind == MoveKind::TwoOpt && (inst_.has_time_windows() || !inst_.symmetric()))
            throw ContractError("2-opt needs a symmetric instance without time windows");
        const auto t0 = Clock::now();
        IntraSlabs slabs;
        slabs.K = ts_.max_length();
        const int J = ts_.routes();
        slabs.head.resize(std::size_t(J) * slabs.K);
        slabs.tail.resize(std::size_t(J) * slabs.K);
        for (int r = 0; r < J; ++r) {
            const int n = ts_.length(r);
            for (int k = 0; k < slabs.K; ++k) {
                const std::size_t idx = std::size_t(r) * slabs.K + k;
                if (k < n) {
                    slabs.head.set(idx, ts_.at(r, 0, k));
                    slabs.tail.set(idx, ts_.at(r, k, n - 1));
                } else {
                    slabs.head.set_padding(idx);
                    slabs.tail.set_padding(idx);
                }
            }
        }
        counters_.extraction.seconds += seconds(t0, Clock::now());
        counters_.extraction.elements += 2 * std::int64_t(J) * slabs.K;
        counters_.extraction.bytes += 2 * std::int64_t(J) * slabs.K * kRecordBytes;

        const IntraCtx ctx{inst_, ts_, slabs, op};
        const auto sh = intra_shape(op, slabs.K);
        tiles.resize(sh.a * sh.b > 0 ? J : 0);
        exec_->run(static_cast<std::int64_t>(tiles.size()),
                   [&](std::int64_t r) { tiles[r] = intra_tile(ctx, sh, w, static_cast<int>(r), out); });
        return finish([&](const Move& m, std::int64_t) {
            SubseqAttr nr;
            intra_element(ctx, m.route_a, ts_.length(m.route_a), m.pos_a, m.pos_b, nr);
            return single_delta(ts_.at(m.route_a, 0, ts_.length(m.route_a) - 1), nr, inst_.capacity(), w);
        });
    }

    const auto t0 = Clock::now();
    SeqBundle row, col;
    if (opts_.inter == Extraction::Route) {
        row = extract_3seq_route(inst_, ts_, op.n1);
        col = op.n2 == op.n1 ? row : extract_3seq_route(inst_, ts_, op.n2);
    } else {
        row = extract_3seq_node(inst_, ts_, pos_, op.n1);
        col = op.n2 == op.n1 ? row : extract_3seq_node(inst_, ts_, pos_, op.n2);
    }
    counters_.extraction.seconds += seconds(t0, Clock::now());
    counters_.extraction.elements += row.size() + col.size();
    counters_.extraction.bytes += (row.size() + col.size()) * 5 * kRecordBytes;

    const bool ordered = op.kind == MoveKind::TwoOptStar || (op.kind == MoveKind::InterSwap && op.n1 == op.n2);
    const auto col_start = route_starts(col, ts_.routes());
    const InterCtx ctx{inst_,   row, col, op.n1, op.n2, ordered, col_start.data(), dist_t_.data(),
                       time_t_.data()};

    auto dispatch = [&](auto kind_tag) {
        constexpr MoveKind K = decltype(kind_tag)::value;
        if (opts_.inter == Extraction::Edge) {
            const std::int64_t E = edges_.size();
            const std::int64_t per = opts_.tile_elements;
            tiles.resize((E + per - 1) / per);
            exec_->run(static_cast<std::int64_t>(tiles.size()), [&](std::int64_t t) {
                const std::int64_t base = t * per;
                tiles[t] = inter_tile_edges<K>(ctx, w, edges_.ei.data(), edges_.ej.data(), base,
                                               std::min(per, E - base), out);
            });
        } else {
            const std::int64_t rows = row.size(), cols = col.size();
            const std::int64_t per_rows = cols > 0 ? std::max<std::int64_t>(1, opts_.tile_elements / cols) : 1;
            tiles.resize(cols > 0 ? (rows + per_rows - 1) / per_rows : 0);
            exec_->run(static_cast<std::int64_t>(tiles.size()), [&](std::int64_t t) {
                const std::int64_t r0 = t * per_rows;
                tiles[t] = inter_tile_dense<K>(ctx, w, r0, std::min(rows, r0 + per_rows), out);
            });
        }
        return finish([&](const Move&, std::int64_t flat) {
            std::size_t i, j;
            if (opts_.inter == Extraction::Edge) {
                i = edges_.ei[flat];
                j = edges_.ej[flat];
            } else {
                i = flat / col.size();
                j = flat % col.size();
            }
            const PairAttrs p = inter_element<K>(ctx, i, j);
            return pair_delta(row.whole.get(i), col.whole.get(j), p.new_a, p.new_b, p.dm, inst_.capacity(), w);
        });
    };
    switch (op.kind) {
    case MoveKind::InterRelocate:
        return dispatch(std::integral_constant<MoveKind, MoveKind::InterRelocate>{});
    case MoveKind::InterSwap: return dispatch(std::integral_constant<MoveKind, MoveKind::InterSwap>{});
    default: return dispatch(std::integral_constant<MoveKind, MoveKind::TwoOptStar>{});
    }
}

std::optional<Move> BatchEvaluator::min_candidate(const Solution& sol, const Operator& op, const PenaltyWeights& w) {
    check_fresh(sol);
    return run(op, w, nullptr);
}

std::optional<Move> BatchEvaluator::best(const Solution& sol, const Operator& op, const PenaltyWeights& w) {
    auto m = min_candidate(sol, op, w);
    if (m && m->score < -improvement_epsilon(inst_)) return m;
    return std::nullopt;
}

ScoringTensor BatchEvaluator::scores(const Solution& sol, const Operator& op, const PenaltyWeights& w) {
    check_fresh(sol);
    ScoringTensor st;
    run(op, w, &st.scores);
    const std::int64_t J = ts_.routes(), K = ts_.max_length();
    if (!is_inter(op.kind)) {
        const auto sh = intra_shape(op, static_cast<int>(K));
        st.dims = {J, sh.a, sh.b};
    } else if (opts_.inter == Extraction::Node) {
        st.dims = {pos_.size(), pos_.size()};
    } else if (opts_.inter == Extraction::Edge) {
        st.dims = {edges_.size()};
    } else {
        st.dims = {J, positive(K - op.n1 - 1), J, positive(K - op.n2 - 1)};
    }
    return st;
}

}  // namespace vrpts
