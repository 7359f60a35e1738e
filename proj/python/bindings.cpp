#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <random>

#include "vrpts/attrcalc.hpp"
#include "vrpts/errors.hpp"
#include "vrpts/generate.hpp"
#include "vrpts/search.hpp"

namespace py = pybind11;
using namespace vrpts;

namespace {

// nlohmann::json -> Python objects through the json module.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::optional<GranularMask> mask_for(BackendKind kind, const Instance& inst, std::optional<int> theta) {
    if (!needs_mask(kind) && !theta) return std::nullopt;
    return build_granular_mask(inst, theta.value_or(20));
}

py::dict move_dict(const Move& m) {
    py::dict d;
    d["kind"] = std::string(to_string(m.kind));
    d["route_a"] = m.route_a;
    d["route_b"] = m.route_b;
    d["pos_a"] = m.pos_a;
    d["pos_b"] = m.pos_b;
    d["len_a"] = m.len_a;
    d["len_b"] = m.len_b;
    d["delta_distance"] = m.delta_distance;
    d["delta_load"] = m.delta_load;
    d["delta_warp"] = m.delta_warp;
    d["delta_routes"] = m.delta_routes;
    d["score"] = m.score;
    return d;
}

// A solution plus shared ownership of the instance it points into.
struct PySolution {
    std::shared_ptr<const Instance> inst;
    Solution sol;
};

using InstancePtr = std::shared_ptr<Instance>;

std::vector<Operator> parse_ops(const Instance& inst, const std::optional<std::string>& ops) {
    return ops ? parse_operator_list(*ops) : default_operators(inst);
}

}  // namespace

PYBIND11_MODULE(_vrpts, m) {
    m.doc() = "VRP local search with scalar and batched neighbourhood evaluation";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);

    py::class_<Instance, InstancePtr>(m, "Instance")
        .def_property_readonly("name", &Instance::name)
        .def_property_readonly("variant", [](const Instance& i) { return std::string(to_string(i.variant())); })
        .def_property_readonly("distance_policy", [](const Instance& i) { return std::string(to_string(i.policy())); })
        .def_property_readonly("num_customers", &Instance::num_customers)
        .def_property_readonly("capacity", &Instance::capacity)
        .def_property_readonly("integral", &Instance::integral)
        .def_property_readonly("symmetric", &Instance::symmetric)
        .def("distance", &Instance::distance, py::arg("i"), py::arg("j"))
        .def("travel_time", &Instance::travel_time, py::arg("i"), py::arg("j"))
        .def("to_json", [](const Instance& i) { return to_python(to_json(i)); })
        .def_static(
            "from_json",
            [](py::object obj) {
                const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
                return std::make_shared<Instance>(instance_from_json(nlohmann::json::parse(text)));
            },
            py::arg("data"))
        .def(
            "write",
            [](const Instance& i, const std::string& format) {
                if (format == "cvrplib") return write_cvrplib(i);
                if (format == "solomon") return write_solomon(i);
                if (format == "jd") return write_jd(i);
                throw py::value_error("format must be cvrplib, solomon or jd");
            },
            py::arg("format"))
        .def("__repr__", [](const Instance& i) {
            return "<Instance " + i.name() + " " + std::string(to_string(i.variant())) + " n="
                + std::to_string(i.num_customers()) + ">";
        });

    m.def("load_instance", [](const std::string& path) { return std::make_shared<Instance>(load_instance(path)); },
          py::arg("path"));
    m.def(
        "parse_instance", [](const std::string& text) { return std::make_shared<Instance>(parse_instance(text)); },
        py::arg("text"));
    m.def(
        "generate_uniform",
        [](int customers, const std::string& variant, std::uint64_t seed) {
            GeneratorOptions g;
            g.customers = customers;
            g.variant = variant_from_string(variant);
            g.seed = seed;
            return std::make_shared<Instance>(generate_uniform(g));
        },
        py::arg("customers"), py::arg("variant") = "cvrp", py::arg("seed") = 1);

    py::class_<PySolution>(m, "Solution")
        .def(py::init([](InstancePtr inst, const std::vector<std::vector<int>>& lists) {
                 return PySolution{inst, Solution::from_customer_lists(*inst, lists)};
             }),
             py::arg("instance"), py::arg("routes"), "Routes given as customer lists without the depot.")
        .def_static(
            "from_text", [](InstancePtr inst, const std::string& text) { return PySolution{inst, read_solution(*inst, text)}; },
            py::arg("instance"), py::arg("text"))
        .def_property_readonly("instance", [](const PySolution& s) { return std::const_pointer_cast<Instance>(s.inst); })
        .def_property_readonly("routes", [](const PySolution& s) { return s.sol.customer_lists(); })
        .def_property_readonly("objective", [](const PySolution& s) { return s.sol.objective(); })
        .def_property_readonly("distance", [](const PySolution& s) { return s.sol.distance(); })
        .def_property_readonly("used_routes", [](const PySolution& s) { return s.sol.used_routes(); })
        .def_property_readonly("load_violation", [](const PySolution& s) { return s.sol.load_violation(); })
        .def_property_readonly("warp_violation", [](const PySolution& s) { return s.sol.warp_violation(); })
        .def_property_readonly("feasible", [](const PySolution& s) { return s.sol.feasible(); })
        .def("to_text", [](const PySolution& s) { return write_solution(s.sol); })
        .def("__eq__", [](const PySolution& a, const PySolution& b) { return a.sol == b.sol; })
        .def("__repr__", [](const PySolution& s) {
            return "<Solution routes=" + std::to_string(s.sol.used_routes()) + " objective="
                + format_number(s.sol.objective()) + (s.sol.feasible() ? "" : " infeasible") + ">";
        });

    m.def(
        "route_attributes",
        [](const Instance& inst, std::vector<int> customers) {
            customers.insert(customers.begin(), 0);
            customers.push_back(0);
            const auto a = build_attr_matrix(inst, customers).whole();
            py::dict d;
            d["distance"] = a.dist;
            d["load_in"] = a.load_in;
            d["load_out"] = a.load_out;
            d["load_max"] = a.load_max;
            d["duration"] = a.duration;
            d["earliest"] = a.earliest;
            d["latest"] = a.latest;
            d["warp"] = a.warp;
            return d;
        },
        py::arg("instance"), py::arg("customers"), "Whole-route attributes of a depot-to-depot route.");

    m.def("backends", [] {
        std::vector<std::string> out;
        for (auto b : {BackendKind::Scalar, BackendKind::ScalarGranular, BackendKind::BatchNode, BackendKind::BatchEdge,
                       BackendKind::BatchRoute})
            out.emplace_back(to_string(b));
        return out;
    });
    m.def(
        "operators",
        [](const Instance& inst) {
            std::vector<std::string> out;
            for (const auto& op : default_operators(inst)) out.push_back(to_string(op));
            return out;
        },
        py::arg("instance"));

    m.def(
        "mask_stats",
        [](const Instance& inst, int theta) {
            const auto mask = build_granular_mask(inst, theta);
            py::dict d;
            d["theta"] = mask.theta();
            d["mask_true"] = mask.count();
            d["density"] = double(mask.count()) / (double(inst.num_nodes()) * inst.num_nodes());
            return d;
        },
        py::arg("instance"), py::arg("theta"));

    m.def(
        "best_move",
        [](const PySolution& ps, const std::string& op, const std::string& backend, std::optional<int> theta)
            -> std::optional<py::dict> {
            const Instance& inst = *ps.inst;
            const Solution& sol = ps.sol;
            const auto kind = backend_from_string(backend);
            const auto mask = mask_for(kind, inst, theta);
            auto ev = make_evaluator(kind, inst, mask ? &*mask : nullptr);
            ev->reset(sol);
            const auto best = ev->best(sol, operator_from_string(op), default_penalties(inst));
            if (!best) return std::nullopt;
            return move_dict(*best);
        },
        py::arg("solution"), py::arg("operator"), py::arg("backend") = "scalar", py::arg("theta") = py::none(),
        "Best improving move of one operator, or None.");

    m.def(
        "descend",
        [](const PySolution& start, const std::string& backend, std::optional<int> theta, std::int64_t max_iterations,
           std::optional<std::string> ops) {
            const Instance& inst = *start.inst;
            const auto kind = backend_from_string(backend);
            const auto mask = mask_for(kind, inst, theta);
            auto ev = make_evaluator(kind, inst, mask ? &*mask : nullptr);
            PySolution out = start;
            Solution& sol = out.sol;
            DescentOptions o;
            o.max_iterations = max_iterations;
            DescentResult r;
            {
                py::gil_scoped_release release;
                r = descend(sol, *ev, parse_ops(inst, ops), default_penalties(inst), o);
            }
            py::dict stats;
            stats["iterations"] = r.iterations;
            stats["moves"] = r.moves;
            stats["converged"] = r.converged;
            stats["eval_seconds"] = r.eval_seconds;
            return py::make_tuple(out, stats);
        },
        py::arg("solution"), py::arg("backend") = "scalar", py::arg("theta") = py::none(),
        py::arg("max_iterations") = -1, py::arg("operators") = py::none(),
        "Best-improvement descent from a copy of `solution`; returns (solution, stats).");

    m.def(
        "lockstep",
        [](const PySolution& start, const std::string& a, const std::string& b, std::int64_t iterations,
           std::optional<int> theta) {
            const Instance& inst = *start.inst;
            const auto ka = backend_from_string(a), kb = backend_from_string(b);
            const auto mask = mask_for(needs_mask(ka) ? ka : kb, inst, theta);
            auto ea = make_evaluator(ka, inst, mask ? &*mask : nullptr);
            auto eb = make_evaluator(kb, inst, mask ? &*mask : nullptr);
            LockstepReport r;
            {
                py::gil_scoped_release release;
                r = run_lockstep(start.sol, *ea, *eb, default_operators(inst), default_penalties(inst), iterations);
            }
            py::dict d;
            d["identical"] = r.identical;
            d["divergence"] = r.divergence;
            d["iterations"] = r.iterations;
            d["moves"] = r.moves;
            d["seconds_a"] = r.seconds_a;
            d["seconds_b"] = r.seconds_b;
            d["final_a"] = r.final_a;
            d["final_b"] = r.final_b;
            return d;
        },
        py::arg("solution"), py::arg("backend_a") = "scalar", py::arg("backend_b") = "batch-node",
        py::arg("iterations") = 100, py::arg("theta") = py::none(),
        "Drive two backends from the same start and compare their trajectories.");

    m.def(
        "initial_solution",
        [](InstancePtr inst, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return PySolution{inst, construct_initial(*inst, rng)};
        },
        py::arg("instance"), py::arg("seed") = 1);

    m.def(
        "solve",
        [](InstancePtr ip, std::optional<int> population, std::optional<int> theta,
           std::optional<std::int64_t> max_generations, std::optional<double> time_limit, std::uint64_t seed,
           const std::string& backend) {
            const Instance& inst = *ip;
            SearchConfig cfg = default_config(inst);
            if (population) cfg.population = *population;
            if (theta) cfg.theta = *theta;
            cfg.termination = Termination{};
            if (max_generations) cfg.termination.max_generations = *max_generations;
            if (time_limit) cfg.termination.time_limit_s = *time_limit;
            if (!cfg.termination.active()) cfg.termination = default_termination(inst);
            cfg.seed = seed;
            cfg.backend = backend_from_string(backend);
            MemeticResult r;
            {
                py::gil_scoped_release release;
                r = run_memetic(inst, cfg);
            }
            return py::make_tuple(PySolution{ip, std::move(r.best)}, to_python(r.record.to_json()));
        },
        py::arg("instance"), py::arg("population") = py::none(), py::arg("theta") = py::none(),
        py::arg("max_generations") = py::none(), py::arg("time_limit") = py::none(), py::arg("seed") = 1,
        py::arg("backend") = "scalar",
        "Memetic search; returns (best solution, run record). Without limits the benchmark budget applies.");
}
