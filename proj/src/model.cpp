#include "vrpts/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "vrpts/errors.hpp"

namespace vrpts {

namespace {

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

struct Line {
    int number;
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        lines.push_back({number++, trim(text.substr(start, end - start))});
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

// Splits on whitespace and commas.
std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
    while (i < s.size()) {
        while (i < s.size() && sep(s[i])) ++i;
        const auto begin = i;
        while (i < s.size() && !sep(s[i])) ++i;
        if (i > begin) out.push_back(s.substr(begin, i - begin));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

double number_at(const Line& line, std::string_view token) {
    auto v = to_double(token);
    if (!v) throw ParseError(line.number, "expected a number, got '" + std::string(token) + "'");
    return *v;
}

int int_at(const Line& line, std::string_view token) {
    const double v = number_at(line, token);
    if (!is_integral(v)) throw ParseError(line.number, "expected an integer, got '" + std::string(token) + "'");
    return static_cast<int>(v);
}

bool numeric_line(std::string_view s) {
    auto toks = tokens(s);
    return !toks.empty() && std::all_of(toks.begin(), toks.end(), [](auto t) { return to_double(t).has_value(); });
}

// "KEY : value" header lines; returns nullopt for section keywords.
std::optional<std::pair<std::string, std::string_view>> header_entry(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    return std::make_pair(upper(trim(s.substr(0, colon))), trim(s.substr(colon + 1)));
}

bool starts_keyword(std::string_view s) { return !s.empty() && std::isalpha(static_cast<unsigned char>(s.front())); }

}  // namespace

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::Cvrp: return "CVRP";
    case Variant::Vrptw: return "VRPTW";
    case Variant::Vrpspdtw: return "VRPSPDTW";
    }
    return "?";
}

std::string_view to_string(DistancePolicy p) {
    switch (p) {
    case DistancePolicy::RoundNearest: return "round-nearest-integer";
    case DistancePolicy::Exact: return "exact";
    case DistancePolicy::MatrixGiven: return "matrix-given";
    }
    return "?";
}

Variant variant_from_string(std::string_view s) {
    const auto u = upper(s);
    if (u == "CVRP") return Variant::Cvrp;
    if (u == "VRPTW") return Variant::Vrptw;
    if (u == "VRPSPDTW") return Variant::Vrpspdtw;
    throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

DistancePolicy policy_from_string(std::string_view s) {
    if (s == "round-nearest-integer") return DistancePolicy::RoundNearest;
    if (s == "exact") return DistancePolicy::Exact;
    if (s == "matrix-given") return DistancePolicy::MatrixGiven;
    throw std::invalid_argument("unknown distance policy '" + std::string(s) + "'");
}

double euclidean(const Node& a, const Node& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double distance_under(DistancePolicy policy, const Node& a, const Node& b) {
    const double d = euclidean(a, b);
    return policy == DistancePolicy::RoundNearest ? std::floor(d + 0.5) : d;
}

Instance::Instance(InstanceSpec spec)
    : name_(std::move(spec.name))
    , variant_(spec.variant)
    , policy_(spec.policy)
    , nodes_(std::move(spec.nodes))
    , capacity_(spec.capacity)
    , fleet_limit_(spec.fleet_limit)
    , mu1_(spec.mu1)
    , mu2_(spec.mu2) {
    if (nodes_.empty()) throw std::invalid_argument("instance needs at least the depot");
    if (!(capacity_ > 0.0)) throw std::invalid_argument("capacity must be positive");
    if (mu1_ < 0.0 || mu2_ < 0.0) throw std::invalid_argument("objective weights must be nonnegative");

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto& n = nodes_[i];
        if (n.id != static_cast<int>(i)) throw std::invalid_argument("node ids must be 0..N_C without gaps");
        if (n.delivery < 0.0 || n.pickup < 0.0 || n.service < 0.0)
            throw std::invalid_argument("node " + std::to_string(i) + " has a negative quantity");
        if (variant_ == Variant::Cvrp) {
            n.tw_open = n.tw_close = n.service = 0.0;
        }
        if (variant_ != Variant::Vrpspdtw && n.pickup != 0.0)
            throw std::invalid_argument("node " + std::to_string(i) + " has a pickup in a delivery-only variant");
        if (n.tw_open > n.tw_close) throw std::invalid_argument("node " + std::to_string(i) + " has tw_open > tw_close");
    }
    const auto& depot = nodes_.front();
    if (depot.delivery != 0.0 || depot.pickup != 0.0 || depot.service != 0.0)
        throw std::invalid_argument("depot must have zero demand and service time");

    const std::size_t n = nodes_.size();
    if (policy_ == DistancePolicy::MatrixGiven) {
        if (spec.distances.size() != n * n) throw std::invalid_argument("distance matrix has the wrong size");
        dist_ = std::move(spec.distances);
        if (spec.times.empty()) {
            time_ = dist_;
        } else {
            if (spec.times.size() != n * n) throw std::invalid_argument("time matrix has the wrong size");
            time_ = std::move(spec.times);
        }
    } else {
        dist_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist_[i * n + j] = i == j ? 0.0 : distance_under(policy_, nodes_[i], nodes_[j]);
        time_ = dist_;
    }
    if (variant_ == Variant::Cvrp) std::fill(time_.begin(), time_.end(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        if (dist_[i * n + i] != 0.0 || time_[i * n + i] != 0.0)
            throw std::invalid_argument("matrices must have a zero diagonal");
    }
    for (std::size_t k = 0; k < n * n; ++k) {
        if (!(dist_[k] >= 0.0) || !(time_[k] >= 0.0)) throw std::invalid_argument("matrices must be nonnegative");
    }

    integral_ = is_integral(capacity_) && is_integral(mu1_) && is_integral(mu2_);
    for (const auto& nd : nodes_) {
        integral_ = integral_ && is_integral(nd.delivery) && is_integral(nd.pickup) && is_integral(nd.tw_open)
            && is_integral(nd.tw_close) && is_integral(nd.service);
        horizon_ = std::max({horizon_, nd.tw_close, nd.tw_open + nd.service});
    }
    double max_time = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
        integral_ = integral_ && is_integral(dist_[k]) && is_integral(time_[k]);
        max_time = std::max(max_time, time_[k]);
    }
    horizon_ = std::max(horizon_, max_time);

    symmetric_ = true;
    for (std::size_t i = 0; i < n && symmetric_; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist_[i * n + j] != dist_[j * n + i] || time_[i * n + j] != time_[j * n + i]) {
                symmetric_ = false;
                break;
            }
}

// ---------------------------------------------------------------------------
// CVRPLIB (TSPLIB-style CVRP with EUC_2D coordinates)

Instance parse_cvrplib(std::string_view text) {
    const auto lines = split_lines(text);
    std::optional<int> dimension;
    std::optional<double> capacity;
    std::string name;
    std::map<int, std::pair<double, double>> coords;
    std::map<int, double> demands;
    std::vector<int> depots;
    bool saw_coords = false;
    bool saw_demand = false;
    int last_line = 0;

    enum class Section { None, Coords, Demand, Depot, Ignored } section = Section::None;
    for (const auto& line : lines) {
        last_line = line.number;
        if (line.text.empty()) continue;
        const auto key = upper(line.text);
        if (key == "EOF") break;
        if (starts_keyword(line.text)) {
            if (auto entry = header_entry(line.text)) {
                section = Section::None;
                const auto& [k, v] = *entry;
                if (k == "NAME") name = std::string(v);
                else if (k == "DIMENSION") dimension = int_at(line, v);
                else if (k == "CAPACITY") capacity = number_at(line, v);
                else if (k == "EDGE_WEIGHT_TYPE" && upper(v) != "EUC_2D")
                    throw ParseError(line.number, "unsupported EDGE_WEIGHT_TYPE '" + std::string(v) + "'");
                else if (k == "TYPE" && upper(v) != "CVRP")
                    throw ParseError(line.number, "unsupported TYPE '" + std::string(v) + "'");
                continue;
            }
            if (key == "NODE_COORD_SECTION") section = Section::Coords, saw_coords = true;
            else if (key == "DEMAND_SECTION") section = Section::Demand, saw_demand = true;
            else if (key == "DEPOT_SECTION") section = Section::Depot;
            else section = Section::Ignored;
            continue;
        }

        const auto toks = tokens(line.text);
        switch (section) {
        case Section::Coords: {
            if (toks.size() != 3) throw ParseError(line.number, "NODE_COORD_SECTION expects 'id x y'");
            const int id = int_at(line, toks[0]);
            if (!coords.emplace(id, std::make_pair(number_at(line, toks[1]), number_at(line, toks[2]))).second)
                throw ParseError(line.number, "duplicate node id " + std::to_string(id));
            break;
        }
        case Section::Demand: {
            if (toks.size() != 2) throw ParseError(line.number, "DEMAND_SECTION expects 'id demand'");
            const int id = int_at(line, toks[0]);
            const double d = number_at(line, toks[1]);
            if (d < 0.0) throw ParseError(line.number, "negative demand");
            if (!demands.emplace(id, d).second) throw ParseError(line.number, "duplicate node id " + std::to_string(id));
            break;
        }
        case Section::Depot: {
            for (auto t : toks) {
                const int id = int_at(line, t);
                if (id >= 0) depots.push_back(id);
            }
            break;
        }
        case Section::Ignored: break;
        case Section::None: throw ParseError(line.number, "data outside of a section");
        }
    }

    if (!capacity) throw ParseError(last_line, "missing CAPACITY");
    if (!saw_coords) throw ParseError(last_line, "missing NODE_COORD_SECTION");
    if (!saw_demand) throw ParseError(last_line, "missing DEMAND_SECTION");
    const int n = dimension.value_or(static_cast<int>(coords.size()));
    if (static_cast<int>(coords.size()) != n || static_cast<int>(demands.size()) != n)
        throw ParseError(last_line, "section sizes do not match DIMENSION " + std::to_string(n));
    if (coords.begin()->first != 1 || coords.rbegin()->first != n)
        throw ParseError(last_line, "node ids must be 1..DIMENSION");
    if (depots.size() > 1) throw ParseError(last_line, "multiple depots are not supported");
    const int depot = depots.empty() ? 1 : depots.front();
    if (!coords.contains(depot)) throw ParseError(last_line, "depot id not in NODE_COORD_SECTION");

    InstanceSpec spec;
    spec.name = name;
    spec.variant = Variant::Cvrp;
    spec.policy = DistancePolicy::RoundNearest;
    spec.capacity = *capacity;
    spec.mu1 = 0.0;
    spec.mu2 = 1.0;
    auto add = [&](int file_id) {
        Node nd;
        nd.id = static_cast<int>(spec.nodes.size());
        nd.x = coords.at(file_id).first;
        nd.y = coords.at(file_id).second;
        nd.delivery = demands.at(file_id);
        spec.nodes.push_back(nd);
    };
    add(depot);
    for (const auto& [id, _] : coords)
        if (id != depot) add(id);
    if (spec.nodes.front().delivery != 0.0) throw ParseError(last_line, "depot demand must be zero");
    try {
        return Instance(std::move(spec));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
}

// ---------------------------------------------------------------------------
// Solomon / Gehring-Homberger

Instance parse_solomon(std::string_view text) {
    const auto lines = split_lines(text);
    InstanceSpec spec;
    spec.variant = Variant::Vrptw;
    spec.policy = DistancePolicy::Exact;
    spec.mu1 = 0.0;
    spec.mu2 = 1.0;

    enum class State { Name, Header, Fleet, Customers } state = State::Name;
    bool have_fleet = false;
    int last_line = 0;
    for (const auto& line : lines) {
        last_line = line.number;
        if (line.text.empty()) continue;
        const auto key = upper(line.text);
        if (state == State::Name) {
            spec.name = std::string(line.text);
            state = State::Header;
            continue;
        }
        if (!numeric_line(line.text)) {
            if (key.find("NUMBER") != std::string::npos && key.find("CAPACITY") != std::string::npos) state = State::Fleet;
            else if (key.rfind("CUST", 0) == 0) state = State::Customers;
            continue;
        }
        const auto toks = tokens(line.text);
        if (state == State::Fleet) {
            if (toks.size() != 2) throw ParseError(line.number, "expected 'vehicles capacity'");
            spec.fleet_limit = int_at(line, toks[0]);
            spec.capacity = number_at(line, toks[1]);
            have_fleet = true;
            state = State::Header;
        } else if (state == State::Customers) {
            if (toks.size() != 7) throw ParseError(line.number, "customer rows need 7 columns");
            Node nd;
            nd.id = int_at(line, toks[0]);
            if (nd.id != static_cast<int>(spec.nodes.size()))
                throw ParseError(line.number, "customer ids must increase from 0 without gaps");
            nd.x = number_at(line, toks[1]);
            nd.y = number_at(line, toks[2]);
            nd.delivery = number_at(line, toks[3]);
            nd.tw_open = number_at(line, toks[4]);
            nd.tw_close = number_at(line, toks[5]);
            nd.service = number_at(line, toks[6]);
            if (nd.delivery < 0.0) throw ParseError(line.number, "negative demand");
            if (nd.service < 0.0) throw ParseError(line.number, "negative service time");
            if (nd.tw_close < nd.tw_open) throw ParseError(line.number, "due date precedes ready time");
            spec.nodes.push_back(nd);
        } else {
            throw ParseError(line.number, "unexpected numeric line");
        }
    }
    if (!have_fleet) throw ParseError(last_line, "missing VEHICLE NUMBER/CAPACITY block");
    if (spec.nodes.empty()) throw ParseError(last_line, "missing CUSTOMER rows");
    try {
        return Instance(std::move(spec));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
}

// ---------------------------------------------------------------------------
// JD Logistics VRPSPDTW (layout documented in docs/jd_format.md)

Instance parse_jd(std::string_view text) {
    const auto lines = split_lines(text);
    InstanceSpec spec;
    spec.variant = Variant::Vrpspdtw;
    std::optional<double> capacity;
    std::optional<int> dimension;
    std::vector<std::array<double, 4>> links;  // from, to, distance, time
    std::vector<int> link_lines;
    bool has_coords = false;
    int last_line = 0;

    enum class Section { None, Nodes, Links, Depot, Ignored } section = Section::None;
    for (const auto& line : lines) {
        last_line = line.number;
        if (line.text.empty()) continue;
        const auto key = upper(line.text);
        if (key == "EOF") break;
        if (starts_keyword(line.text)) {
            if (auto entry = header_entry(line.text)) {
                section = Section::None;
                const auto& [k, v] = *entry;
                if (k == "NAME") spec.name = std::string(v);
                else if (k == "DIMENSION") dimension = int_at(line, v);
                else if (k == "VEHICLES") spec.fleet_limit = int_at(line, v);
                else if (k == "CAPACITY") capacity = number_at(line, v);
                else if (k == "DISPATCHINGCOST") spec.mu1 = number_at(line, v);
                else if (k == "UNITCOST") spec.mu2 = number_at(line, v);
                continue;
            }
            if (key == "NODE_SECTION") section = Section::Nodes;
            else if (key == "DISTANCETIME_SECTION") section = Section::Links;
            else if (key == "DEPOT_SECTION") section = Section::Depot;
            else section = Section::Ignored;
            continue;
        }
        const auto toks = tokens(line.text);
        if (section == Section::Nodes) {
            if (toks.size() != 6 && toks.size() != 8)
                throw ParseError(line.number, "node rows need id,delivery,pickup,ready,due,service (optionally x,y after id); "
                                              "got " + std::to_string(toks.size()) + " columns (missing pickup column?)");
            const bool with_xy = toks.size() == 8;
            if (!spec.nodes.empty() && with_xy != has_coords) throw ParseError(line.number, "inconsistent node row width");
            has_coords = with_xy;
            Node nd;
            nd.id = int_at(line, toks[0]);
            if (nd.id != static_cast<int>(spec.nodes.size()))
                throw ParseError(line.number, "node ids must increase from 0 without gaps");
            std::size_t c = 1;
            if (with_xy) {
                nd.x = number_at(line, toks[c++]);
                nd.y = number_at(line, toks[c++]);
            }
            nd.delivery = number_at(line, toks[c++]);
            nd.pickup = number_at(line, toks[c++]);
            nd.tw_open = number_at(line, toks[c++]);
            nd.tw_close = number_at(line, toks[c++]);
            nd.service = number_at(line, toks[c++]);
            if (nd.delivery < 0.0) throw ParseError(line.number, "negative delivery");
            if (nd.pickup < 0.0) throw ParseError(line.number, "negative pickup");
            if (nd.tw_close < nd.tw_open) throw ParseError(line.number, "due time precedes ready time");
            spec.nodes.push_back(nd);
        } else if (section == Section::Links) {
            if (toks.size() != 4) throw ParseError(line.number, "DISTANCETIME_SECTION expects from,to,distance,time");
            links.push_back({number_at(line, toks[0]), number_at(line, toks[1]), number_at(line, toks[2]),
                             number_at(line, toks[3])});
            link_lines.push_back(line.number);
        } else if (section == Section::Depot) {
            for (auto t : toks) {
                const int id = int_at(line, t);
                if (id > 0) throw ParseError(line.number, "the depot must be node 0");
            }
        } else if (section == Section::None) {
            throw ParseError(line.number, "data outside of a section");
        }
    }
    if (!capacity) throw ParseError(last_line, "missing CAPACITY");
    if (spec.nodes.empty()) throw ParseError(last_line, "missing NODE_SECTION");
    if (dimension && *dimension != static_cast<int>(spec.nodes.size()))
        throw ParseError(last_line, "NODE_SECTION size does not match DIMENSION");
    spec.capacity = *capacity;

    const std::size_t n = spec.nodes.size();
    if (!links.empty()) {
        spec.policy = DistancePolicy::MatrixGiven;
        spec.distances.assign(n * n, -1.0);
        spec.times.assign(n * n, -1.0);
        for (std::size_t i = 0; i < n; ++i) spec.distances[i * n + i] = spec.times[i * n + i] = 0.0;
        for (std::size_t k = 0; k < links.size(); ++k) {
            const auto& [from, to, d, t] = links[k];
            if (!is_integral(from) || !is_integral(to) || from < 0 || to < 0 || from >= n || to >= n)
                throw ParseError(link_lines[k], "link endpoint out of range");
            if (d < 0.0 || t < 0.0) throw ParseError(link_lines[k], "negative distance or time");
            const auto idx = static_cast<std::size_t>(from) * n + static_cast<std::size_t>(to);
            if (from == to && (d != 0.0 || t != 0.0)) throw ParseError(link_lines[k], "nonzero self link");
            spec.distances[idx] = d;
            spec.times[idx] = t;
        }
        if (std::find(spec.distances.begin(), spec.distances.end(), -1.0) != spec.distances.end())
            throw ParseError(last_line, "DISTANCETIME_SECTION does not cover every ordered node pair");
    } else {
        if (!has_coords) throw ParseError(last_line, "need either node coordinates or a DISTANCETIME_SECTION");
        spec.policy = DistancePolicy::Exact;
    }
    try {
        return Instance(std::move(spec));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
}

InstanceFormat detect_format(std::string_view text) {
    const auto u = upper(text.substr(0, std::min<std::size_t>(text.size(), 1 << 16)));
    if (u.find("NODE_COORD_SECTION") != std::string::npos) return InstanceFormat::Cvrplib;
    if (u.find("NODE_SECTION") != std::string::npos) return InstanceFormat::Jd;
    if (u.find("VEHICLE") != std::string::npos && u.find("CUST") != std::string::npos) return InstanceFormat::Solomon;
    // Truncated files: fall back on the header so the parser names what is missing.
    if (u.find("VRPSPDTW") != std::string::npos) return InstanceFormat::Jd;
    if (u.find("EDGE_WEIGHT_TYPE") != std::string::npos || u.find("CVRP") != std::string::npos)
        return InstanceFormat::Cvrplib;
    throw ParseError(0, "unrecognized instance format");
}

Instance parse_instance(std::string_view text) {
    switch (detect_format(text)) {
    case InstanceFormat::Cvrplib: return parse_cvrplib(text);
    case InstanceFormat::Solomon: return parse_solomon(text);
    case InstanceFormat::Jd: return parse_jd(text);
    }
    throw ParseError(0, "unrecognized instance format");
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

// ---------------------------------------------------------------------------
// Writers

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string write_cvrplib(const Instance& inst) {
    std::ostringstream out;
    out << "NAME : " << inst.name() << "\n"
        << "TYPE : CVRP\n"
        << "DIMENSION : " << inst.num_nodes() << "\n"
        << "EDGE_WEIGHT_TYPE : EUC_2D\n"
        << "CAPACITY : " << format_number(inst.capacity()) << "\n"
        << "NODE_COORD_SECTION\n";
    for (const auto& n : inst.nodes()) out << n.id + 1 << " " << format_number(n.x) << " " << format_number(n.y) << "\n";
    out << "DEMAND_SECTION\n";
    for (const auto& n : inst.nodes()) out << n.id + 1 << " " << format_number(n.delivery) << "\n";
    out << "DEPOT_SECTION\n1\n-1\nEOF\n";
    return out.str();
}

std::string write_solomon(const Instance& inst) {
    std::ostringstream out;
    out << inst.name() << "\n\nVEHICLE\nNUMBER     CAPACITY\n"
        << inst.fleet_limit().value_or(inst.num_customers()) << " " << format_number(inst.capacity()) << "\n\n"
        << "CUSTOMER\nCUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME\n\n";
    for (const auto& n : inst.nodes()) {
        out << n.id << " " << format_number(n.x) << " " << format_number(n.y) << " " << format_number(n.delivery) << " "
            << format_number(n.tw_open) << " " << format_number(n.tw_close) << " " << format_number(n.service) << "\n";
    }
    return out.str();
}

std::string write_jd(const Instance& inst) {
    std::ostringstream out;
    const bool matrices = inst.policy() == DistancePolicy::MatrixGiven;
    out << "NAME : " << inst.name() << "\n"
        << "TYPE : VRPSPDTW\n"
        << "DIMENSION : " << inst.num_nodes() << "\n";
    if (inst.fleet_limit()) out << "VEHICLES : " << *inst.fleet_limit() << "\n";
    out << "DISPATCHINGCOST : " << format_number(inst.mu1()) << "\n"
        << "UNITCOST : " << format_number(inst.mu2()) << "\n"
        << "CAPACITY : " << format_number(inst.capacity()) << "\n"
        << "EDGE_WEIGHT_TYPE : " << (matrices ? "EXPLICIT" : "EUC_2D") << "\n"
        << "NODE_SECTION\n";
    for (const auto& n : inst.nodes()) {
        out << n.id << "," << format_number(n.x) << "," << format_number(n.y) << "," << format_number(n.delivery) << "," << format_number(n.pickup) << "," << format_number(n.tw_open) << ","
            << format_number(n.tw_close) << "," << format_number(n.service) << "\n";
    }
    if (matrices) {
        out << "DISTANCETIME_SECTION\n";
        for (int i = 0; i < inst.num_nodes(); ++i)
            for (int j = 0; j < inst.num_nodes(); ++j)
                if (i != j)
                    out << i << "," << j << "," << format_number(inst.distance(i, j)) << ","
                        << format_number(inst.travel_time(i, j)) << "\n";
    }
    out << "DEPOT_SECTION\n0\n-1\nEOF\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Canonical JSON

nlohmann::json to_json(const Instance& inst) {
    nlohmann::json j;
    j["name"] = inst.name();
    j["variant"] = to_string(inst.variant());
    j["distance_policy"] = to_string(inst.policy());
    j["capacity"] = inst.capacity();
    j["fleet_limit"] = inst.fleet_limit() ? nlohmann::json(*inst.fleet_limit()) : nlohmann::json(nullptr);
    j["mu1"] = inst.mu1();
    j["mu2"] = inst.mu2();
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& n : inst.nodes()) {
        nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"delivery", n.delivery}, {"pickup", n.pickup},
                         {"tw_open", n.tw_open}, {"tw_close", n.tw_close}, {"service", n.service}});
    }
    if (inst.policy() == DistancePolicy::MatrixGiven) {
        j["distances"] = std::vector<double>(inst.distance_matrix().begin(), inst.distance_matrix().end());
        j["times"] = std::vector<double>(inst.time_matrix().begin(), inst.time_matrix().end());
    }
    return j;
}

Instance instance_from_json(const nlohmann::json& j) {
    InstanceSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.variant = variant_from_string(j.at("variant").get<std::string>());
    spec.policy = policy_from_string(j.at("distance_policy").get<std::string>());
    spec.capacity = j.at("capacity").get<double>();
    if (!j.at("fleet_limit").is_null()) spec.fleet_limit = j.at("fleet_limit").get<int>();
    spec.mu1 = j.at("mu1").get<double>();
    spec.mu2 = j.at("mu2").get<double>();
    for (const auto& n : j.at("nodes")) {
        spec.nodes.push_back(Node{n.at("id").get<int>(), n.at("x").get<double>(), n.at("y").get<double>(),
                                  n.at("delivery").get<double>(), n.at("pickup").get<double>(),
                                  n.at("tw_open").get<double>(), n.at("tw_close").get<double>(),
                                  n.at("service").get<double>()});
    }
    if (j.contains("distances")) spec.distances = j.at("distances").get<std::vector<double>>();
    if (j.contains("times")) spec.times = j.at("times").get<std::vector<double>>();
    return Instance(std::move(spec));
}

}  // namespace vrpts
