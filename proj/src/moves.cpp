#include "vrpts/moves.hpp"

#include <sstream>
#include <stdexcept>

namespace vrpts {

std::string_view to_string(MoveKind k) {
    switch (k) {
    case MoveKind::InterRelocate: return "inter-relocate";
    case MoveKind::InterSwap: return "inter-swap";
    case MoveKind::TwoOptStar: return "2-opt*";
    case MoveKind::IntraRelocate: return "intra-relocate";
    case MoveKind::IntraSwap: return "intra-swap";
    case MoveKind::TwoOpt: return "2-opt";
    }
    return "?";
}

std::string_view short_name(MoveKind k) {
    switch (k) {
    case MoveKind::InterRelocate: return "XR";
    case MoveKind::InterSwap: return "XS";
    case MoveKind::TwoOptStar: return "TOS";
    case MoveKind::IntraRelocate: return "IR";
    case MoveKind::IntraSwap: return "IS";
    case MoveKind::TwoOpt: return "TO";
    }
    return "?";
}

std::string to_string(const Operator& op) {
    std::string s(short_name(op.kind));
    switch (op.kind) {
    case MoveKind::InterRelocate:
    case MoveKind::IntraRelocate: s += std::to_string(op.n1); break;
    case MoveKind::InterSwap:
    case MoveKind::IntraSwap: s += std::to_string(op.n1) + std::to_string(op.n2); break;
    default: break;
    }
    return s;
}

Operator operator_from_string(std::string_view s) {
    auto bad = [&] { return std::invalid_argument("unknown operator '" + std::string(s) + "'"); };
    auto digits = [&](std::string_view rest, std::size_t count) {
        if (rest.size() != count) throw bad();
        for (char c : rest)
            if (c < '1' || c > '9') throw bad();
    };
    if (s == "TOS") return {MoveKind::TwoOptStar, 0, 0};
    if (s == "TO") return {MoveKind::TwoOpt, 0, 0};
    if (s.size() < 3) throw bad();
    const auto tag = s.substr(0, 2);
    const auto rest = s.substr(2);
    if (tag == "XR" || tag == "IR") {
        digits(rest, 1);
        return {tag == "XR" ? MoveKind::InterRelocate : MoveKind::IntraRelocate, rest[0] - '0', 0};
    }
    if (tag == "XS" || tag == "IS") {
        digits(rest, 2);
        return {tag == "XS" ? MoveKind::InterSwap : MoveKind::IntraSwap, rest[0] - '0', rest[1] - '0'};
    }
    throw bad();
}

std::vector<Operator> parse_operator_list(std::string_view list) {
    std::vector<Operator> ops;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string_view::npos) end = list.size();
        const auto item = list.substr(start, end - start);
        if (!item.empty()) ops.push_back(operator_from_string(item));
        start = end + 1;
    }
    if (ops.empty()) throw std::invalid_argument("empty operator list");
    return ops;
}

std::vector<Operator> default_operators(const Instance& inst) {
    std::vector<Operator> ops;
    for (int n : {1, 2, 3}) ops.push_back({MoveKind::InterRelocate, n, 0});
    for (auto [a, b] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) ops.push_back({MoveKind::InterSwap, a, b});
    ops.push_back({MoveKind::TwoOptStar, 0, 0});
    for (int n : {1, 2, 3}) ops.push_back({MoveKind::IntraRelocate, n, 0});
    for (auto [a, b] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}}) ops.push_back({MoveKind::IntraSwap, a, b});
    if (!inst.has_time_windows() && inst.symmetric()) ops.push_back({MoveKind::TwoOpt, 0, 0});
    return ops;
}

std::string describe(const Move& m) {
    std::ostringstream out;
    out << to_string(m.op()) << " a=(" << m.route_a << "," << m.pos_a << ") b=(" << m.route_b << "," << m.pos_b
        << ") dD=" << format_number(m.delta_distance) << " dTV=" << format_number(m.delta_warp)
        << " dLV=" << format_number(m.delta_load) << " dM=" << m.delta_routes << " score=" << format_number(m.score);
    return out.str();
}

PenaltyWeights default_penalties(const Instance& inst) {
    return PenaltyWeights{10.0 * inst.mu2(), 10.0 * inst.mu2(), inst.mu1(), inst.mu2()};
}

}  // namespace vrpts
