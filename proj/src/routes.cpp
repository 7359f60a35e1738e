#include "vrpts/routes.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#include "vrpts/errors.hpp"

namespace vrpts {

namespace {

std::atomic<std::uint64_t> g_stamp{0};

std::uint64_t next_stamp() { return ++g_stamp; }

void require(bool ok, const std::string& what) {
    if (!ok) throw StructureError(what);
}

void append(Route& out, const Route& src, int from, int to) {  // inclusive range
    for (int i = from; i <= to; ++i) out.push_back(src[i]);
}

void append_reversed(Route& out, const Route& src, int from, int to) {
    for (int i = to; i >= from; --i) out.push_back(src[i]);
}

}  // namespace

RouteTrace simulate_route(const Instance& inst, std::span<const int> route) {
    RouteTrace tr;
    const int n = static_cast<int>(route.size());
    tr.arrival.assign(n, 0.0);
    tr.wait.assign(n, 0.0);
    tr.load.assign(n, 0.0);
    if (n == 0) return tr;

    const double start = inst.node(0).tw_open;
    for (int j = 1; j + 1 < n; ++j) tr.initial_load += inst.node(route[j]).delivery;
    tr.arrival[0] = start;
    tr.load[0] = tr.initial_load;
    tr.max_load = tr.initial_load;

    double load = tr.initial_load;
    double depart = start;  // leaving the depot at its opening time
    for (int j = 1; j < n; ++j) {
        const Node& prev = inst.node(route[j - 1]);
        const Node& cur = inst.node(route[j]);
        if (j > 1) depart = std::max(tr.arrival[j - 1], prev.tw_open) + prev.service;
        double a = depart + inst.travel_time(prev.id, cur.id);
        if (a > cur.tw_close) {
            tr.warp += a - cur.tw_close;
            a = cur.tw_close;
        }
        tr.arrival[j] = a;
        tr.wait[j] = std::max(cur.tw_open - a, 0.0);
        tr.distance += inst.distance(prev.id, cur.id);
        load = load - cur.delivery + cur.pickup;
        tr.load[j] = load;
        tr.max_load = std::max(tr.max_load, load);
    }
    tr.duration = (tr.arrival[n - 1] - start) + tr.warp;
    return tr;
}

RouteSummary summarize_route(const Instance& inst, std::span<const int> route) {
    const auto tr = simulate_route(inst, route);
    RouteSummary s;
    s.distance = tr.distance;
    s.max_load = tr.max_load;
    s.load_excess = load_excess(tr.max_load, inst.capacity());
    s.warp = tr.warp;
    s.used = route.size() > 2;
    return s;
}

Solution::Solution(const Instance& inst, std::vector<Route> routes) : inst_(&inst), routes_(std::move(routes)) {
    for (const auto& r : routes_) {
        require(r.size() >= 2 && r.front() == 0 && r.back() == 0, "every route must start and end at the depot");
    }
    check_coverage();
    summaries_.resize(routes_.size());
    for (int r = 0; r < num_routes(); ++r) refresh(r);
    normalize({});
    touch();
}

Solution Solution::from_customer_lists(const Instance& inst, const std::vector<std::vector<int>>& lists) {
    std::vector<Route> routes;
    for (const auto& l : lists) {
        Route r{0};
        r.insert(r.end(), l.begin(), l.end());
        r.push_back(0);
        routes.push_back(std::move(r));
    }
    return Solution(inst, std::move(routes));
}

void Solution::check_coverage() const {
    std::vector<int> seen(inst_->num_nodes(), 0);
    for (const auto& r : routes_) {
        for (std::size_t i = 1; i + 1 < r.size(); ++i) {
            const int v = r[i];
            require(v >= 1 && v < inst_->num_nodes(), "route contains an unknown node " + std::to_string(v));
            require(++seen[v] == 1, "customer " + std::to_string(v) + " is visited more than once");
        }
    }
    for (int v = 1; v < inst_->num_nodes(); ++v) require(seen[v] == 1, "customer " + std::to_string(v) + " is not visited");
}

void Solution::refresh(int r) { summaries_[r] = summarize_route(*inst_, routes_[r]); }

void Solution::touch() { stamp_ = next_stamp(); }

RouteChange Solution::normalize(std::vector<int> changed) {
    RouteChange ch;
    ch.old_count = num_routes();
    auto empties = [&] {
        return std::count_if(routes_.begin(), routes_.end(), [](const Route& r) { return r.size() == 2; });
    };
    while (empties() > 1) {
        const int e = static_cast<int>(
            std::find_if(routes_.begin(), routes_.end(), [](const Route& r) { return r.size() == 2; }) - routes_.begin());
        const int last = num_routes() - 1;
        if (e != last) {
            routes_[e] = std::move(routes_[last]);
            summaries_[e] = summaries_[last];
            changed.push_back(e);
        }
        routes_.pop_back();
        summaries_.pop_back();
    }
    if (empties() == 0) {
        routes_.push_back(Route{0, 0});
        summaries_.emplace_back();
        refresh(num_routes() - 1);
        changed.push_back(num_routes() - 1);
    }
    ch.new_count = num_routes();
    std::sort(changed.begin(), changed.end());
    changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
    for (int c : changed)
        if (c < ch.new_count) ch.changed.push_back(c);
    return ch;
}

int Solution::max_route_size() const {
    int k = 0;
    for (const auto& r : routes_) k = std::max(k, static_cast<int>(r.size()));
    return k;
}

int Solution::used_routes() const {
    int m = 0;
    for (const auto& s : summaries_) m += s.used ? 1 : 0;
    return m;
}

double Solution::distance() const {
    double d = 0.0;
    for (const auto& s : summaries_) d += s.distance;
    return d;
}

double Solution::load_violation() const {
    double v = 0.0;
    for (const auto& s : summaries_) v += s.load_excess;
    return v;
}

double Solution::warp_violation() const {
    double v = 0.0;
    for (const auto& s : summaries_) v += s.warp;
    return v;
}

double Solution::objective() const { return inst_->mu1() * used_routes() + inst_->mu2() * distance(); }

double Solution::penalized(const PenaltyWeights& w) const {
    return w.mu1 * used_routes() + w.mu2 * distance() + w.w_load * load_violation() + w.w_tw * warp_violation();
}

std::vector<std::vector<int>> Solution::customer_lists() const {
    std::vector<std::vector<int>> out;
    for (const auto& r : routes_)
        if (r.size() > 2) out.emplace_back(r.begin() + 1, r.end() - 1);
    return out;
}

void validate_move(const Solution& sol, const Move& m) {
    const int J = sol.num_routes();
    require(m.route_a >= 0 && m.route_a < J && m.route_b >= 0 && m.route_b < J, "move route index out of range");
    const int na = sol.route_size(m.route_a);
    const int nb = sol.route_size(m.route_b);
    const int pa = m.pos_a, pb = m.pos_b, N1 = m.len_a, N2 = m.len_b;
    const bool inter = is_inter(m.kind);
    require(inter == (m.route_a != m.route_b), "inter-route moves need two distinct routes, intra moves one");
    switch (m.kind) {
    case MoveKind::InterRelocate:
        require(N1 >= 1 && N2 == 0, "relocate lengths");
        require(pa >= 1 && pa + N1 - 1 <= na - 2, "relocate segment out of range");
        require(pb >= 0 && pb <= nb - 2, "relocate insertion point out of range");
        break;
    case MoveKind::InterSwap:
        require(N1 >= 1 && N2 >= 1, "swap lengths");
        require(pa >= 1 && pa + N1 - 1 <= na - 2, "swap segment a out of range");
        require(pb >= 1 && pb + N2 - 1 <= nb - 2, "swap segment b out of range");
        break;
    case MoveKind::TwoOptStar:
        require(N1 == 0 && N2 == 0, "2-opt* lengths");
        require(pa >= 0 && pa <= na - 2 && pb >= 0 && pb <= nb - 2, "2-opt* cut out of range");
        break;
    case MoveKind::IntraRelocate:
        require(N1 >= 1 && N2 == 0, "relocate lengths");
        require(pa >= 1 && pa + N1 - 1 <= na - 2, "relocate segment out of range");
        require(pb >= 0 && pb <= na - 2, "relocate insertion point out of range");
        require(pb >= pa + N1 - 1 || pb <= pa - 1, "insertion point inside the moved segment");
        break;
    case MoveKind::IntraSwap:
        require(N1 >= 1 && N2 >= 1, "swap lengths");
        require(pa >= 1 && pa + N1 - 1 <= na - 2, "swap segment a out of range");
        require(pb >= 1 && pb + N2 - 1 <= na - 2, "swap segment b out of range");
        require(pa + N1 <= pb || pb + N2 <= pa, "swapped segments overlap");
        break;
    case MoveKind::TwoOpt:
        require(N1 == 0 && N2 == 0, "2-opt lengths");
        require(pa >= 1 && pa < pb && pb <= na - 2, "2-opt cut out of range");
        break;
    }
}

std::pair<Route, Route> moved_routes(const Solution& sol, const Move& m) {
    validate_move(sol, m);
    const Route& A = sol.route(m.route_a);
    const Route& B = sol.route(m.route_b);
    const int na = static_cast<int>(A.size());
    const int nb = static_cast<int>(B.size());
    const int pa = m.pos_a, pb = m.pos_b, N1 = m.len_a, N2 = m.len_b;
    Route a, b;
    switch (m.kind) {
    case MoveKind::InterRelocate:
        append(a, A, 0, pa - 1);
        append(a, A, pa + N1, na - 1);
        append(b, B, 0, pb);
        append(b, A, pa, pa + N1 - 1);
        append(b, B, pb + 1, nb - 1);
        break;
    case MoveKind::InterSwap:
        append(a, A, 0, pa - 1);
        append(a, B, pb, pb + N2 - 1);
        append(a, A, pa + N1, na - 1);
        append(b, B, 0, pb - 1);
        append(b, A, pa, pa + N1 - 1);
        append(b, B, pb + N2, nb - 1);
        break;
    case MoveKind::TwoOptStar:
        append(a, A, 0, pa);
        append(a, B, pb + 1, nb - 1);
        append(b, B, 0, pb);
        append(b, A, pa + 1, na - 1);
        break;
    case MoveKind::IntraRelocate:
        if (pb >= pa + N1) {
            append(a, A, 0, pa - 1);
            append(a, A, pa + N1, pb);
            append(a, A, pa, pa + N1 - 1);
            append(a, A, pb + 1, na - 1);
        } else if (pb <= pa - 2) {
            append(a, A, 0, pb);
            append(a, A, pa, pa + N1 - 1);
            append(a, A, pb + 1, pa - 1);
            append(a, A, pa + N1, na - 1);
        } else {
            a = A;  // inserting a segment right where it already is
        }
        break;
    case MoveKind::IntraSwap: {
        const bool forward = pa < pb;
        const int p1 = forward ? pa : pb, l1 = forward ? N1 : N2;
        const int p2 = forward ? pb : pa, l2 = forward ? N2 : N1;
        append(a, A, 0, p1 - 1);
        append(a, A, p2, p2 + l2 - 1);
        append(a, A, p1 + l1, p2 - 1);
        append(a, A, p1, p1 + l1 - 1);
        append(a, A, p2 + l2, na - 1);
        break;
    }
    case MoveKind::TwoOpt:
        append(a, A, 0, pa - 1);
        append_reversed(a, A, pa, pb);
        append(a, A, pb + 1, na - 1);
        break;
    }
    return {std::move(a), std::move(b)};
}

RouteChange Solution::apply(const Move& m) {
    auto [a, b] = moved_routes(*this, m);
    std::vector<int> changed{m.route_a};
    routes_[m.route_a] = std::move(a);
    refresh(m.route_a);
    if (is_inter(m.kind)) {
        routes_[m.route_b] = std::move(b);
        refresh(m.route_b);
        changed.push_back(m.route_b);
    }
    auto ch = normalize(std::move(changed));
    touch();
    return ch;
}

Solution apply_move(const Solution& sol, const Move& m) {
    Solution out = sol;
    out.apply(m);
    return out;
}

double objective(const Instance& inst, const Solution& sol) {
    // Rebuilds from the raw routes so stale caches cannot hide.
    const Solution fresh(inst, sol.routes());
    int used = 0;
    double dist = 0.0;
    for (const auto& r : fresh.routes()) {
        if (r.size() > 2) ++used;
        dist += simulate_route(inst, r).distance;
    }
    return inst.mu1() * used + inst.mu2() * dist;
}

Violations violations(const Instance& inst, const Solution& sol) {
    Violations v;
    for (const auto& r : sol.routes()) {
        const auto tr = simulate_route(inst, r);
        v.load += load_excess(tr.max_load, inst.capacity());
        v.warp += tr.warp;
    }
    return v;
}

std::string write_solution(const Solution& sol) {
    std::ostringstream out;
    int k = 1;
    for (const auto& l : sol.customer_lists()) {
        out << "Route #" << k++ << ":";
        for (int v : l) out << " " << v;
        out << "\n";
    }
    out << "Cost " << format_number(sol.objective()) << "\n";
    return out.str();
}

Solution read_solution(const Instance& inst, std::string_view text) {
    std::vector<std::vector<int>> lists;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view s = line;
        if (s.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        if (s.rfind("Cost", 0) == 0 || s.rfind("cost", 0) == 0) continue;
        if (const auto colon = s.find(':'); colon != std::string_view::npos) s = s.substr(colon + 1);
        std::istringstream row{std::string(s)};
        std::vector<int> route;
        std::string tok;
        while (row >> tok) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                route.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(number, "expected a customer id, got '" + tok + "'");
            }
        }
        if (!route.empty()) lists.push_back(std::move(route));
    }
    return Solution::from_customer_lists(inst, lists);
}

}  // namespace vrpts
