#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vrpts {

enum class Variant { Cvrp, Vrptw, Vrpspdtw };

enum class DistancePolicy {
    RoundNearest,  // nint(euclidean), CVRPLIB convention
    Exact,         // full-precision euclidean
    MatrixGiven,   // read verbatim from the instance file
};

std::string_view to_string(Variant v);
std::string_view to_string(DistancePolicy p);
Variant variant_from_string(std::string_view s);
DistancePolicy policy_from_string(std::string_view s);

struct Node {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double delivery = 0.0;
    double pickup = 0.0;
    double tw_open = 0.0;
    double tw_close = 0.0;
    double service = 0.0;

    bool operator==(const Node&) const = default;
};

// Everything needed to build an Instance. Matrices are only read when the
// policy is MatrixGiven; `times` may be left empty to reuse `distances`.
struct InstanceSpec {
    std::string name;
    Variant variant = Variant::Cvrp;
    DistancePolicy policy = DistancePolicy::RoundNearest;
    std::vector<Node> nodes;
    double capacity = 0.0;
    std::optional<int> fleet_limit;
    double mu1 = 0.0;
    double mu2 = 1.0;
    std::vector<double> distances;
    std::vector<double> times;
};

// Immutable problem data. Node 0 is the depot, customers are 1..N_C.
class Instance {
public:
    Instance() = default;
    explicit Instance(InstanceSpec spec);

    const std::string& name() const { return name_; }
    Variant variant() const { return variant_; }
    DistancePolicy policy() const { return policy_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_customers() const { return num_nodes() - 1; }
    const Node& node(int i) const { return nodes_[i]; }
    std::span<const Node> nodes() const { return nodes_; }

    double capacity() const { return capacity_; }
    std::optional<int> fleet_limit() const { return fleet_limit_; }
    double mu1() const { return mu1_; }
    double mu2() const { return mu2_; }

    double distance(int i, int j) const { return dist_[static_cast<std::size_t>(i) * nodes_.size() + j]; }
    double travel_time(int i, int j) const { return time_[static_cast<std::size_t>(i) * nodes_.size() + j]; }
    std::span<const double> distance_matrix() const { return dist_; }
    std::span<const double> time_matrix() const { return time_; }

    // True when every distance, time, demand and window is integral, so
    // all attribute arithmetic is exact in double precision.
    bool integral() const { return integral_; }
    bool symmetric() const { return symmetric_; }
    bool has_time_windows() const { return variant_ != Variant::Cvrp; }

    // Largest finite time value in the instance; sentinels are scaled from it.
    double horizon() const { return horizon_; }

private:
    std::string name_;
    Variant variant_ = Variant::Cvrp;
    DistancePolicy policy_ = DistancePolicy::RoundNearest;
    std::vector<Node> nodes_;
    double capacity_ = 0.0;
    std::optional<int> fleet_limit_;
    double mu1_ = 0.0;
    double mu2_ = 1.0;
    std::vector<double> dist_;
    std::vector<double> time_;
    bool integral_ = true;
    bool symmetric_ = true;
    double horizon_ = 0.0;
};

double euclidean(const Node& a, const Node& b);
double distance_under(DistancePolicy policy, const Node& a, const Node& b);

Instance parse_cvrplib(std::string_view text);
Instance parse_solomon(std::string_view text);
Instance parse_jd(std::string_view text);

enum class InstanceFormat { Cvrplib, Solomon, Jd };
InstanceFormat detect_format(std::string_view text);
Instance parse_instance(std::string_view text);
Instance load_instance(const std::string& path);

std::string write_cvrplib(const Instance& inst);
std::string write_solomon(const Instance& inst);
std::string write_jd(const Instance& inst);

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace vrpts
