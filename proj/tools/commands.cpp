#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vrpts/errors.hpp"
#include "vrpts/generate.hpp"
#include "vrpts/search.hpp"

namespace fs = std::filesystem;

namespace vrpts::cli {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<int> parse_int_list(std::string_view s) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(',', start), s.size());
        const auto tok = s.substr(start, end - start);
        if (!tok.empty()) {
            int v = 0;
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size() || v < 1)
                throw std::invalid_argument("bad segment length '" + std::string(tok) + "'");
            out.push_back(v);
        }
        start = end + 1;
    }
    return out;
}

// "R/S": relocate lengths R and swap lengths S, comma separated, e.g.
// "1,2,3/1,2". Swaps use every ordered pair drawn from S.
std::vector<Operator> operators_for_lengths(const Instance& inst, const std::string& spec) {
    const auto slash = spec.find('/');
    if (slash == std::string::npos) throw std::invalid_argument("--segment-lens expects RELOCATE/SWAP, e.g. 1,2,3/1,2");
    const auto rel = parse_int_list(std::string_view(spec).substr(0, slash));
    const auto swp = parse_int_list(std::string_view(spec).substr(slash + 1));
    std::vector<Operator> inter, intra;
    for (int n : rel) {
        inter.push_back({MoveKind::InterRelocate, n, 0});
        intra.push_back({MoveKind::IntraRelocate, n, 0});
    }
    for (int a : swp)
        for (int b : swp) {
            inter.push_back({MoveKind::InterSwap, a, b});
            intra.push_back({MoveKind::IntraSwap, a, b});
        }
    inter.push_back({MoveKind::TwoOptStar, 0, 0});
    if (!inst.has_time_windows() && inst.symmetric()) intra.push_back({MoveKind::TwoOpt, 0, 0});
    inter.insert(inter.end(), intra.begin(), intra.end());
    return inter;
}

std::vector<Operator> pick_operators(const Instance& inst, const std::string& list, const std::string& lens) {
    if (!list.empty() && !lens.empty()) throw std::invalid_argument("--operators and --segment-lens are exclusive");
    if (!list.empty()) {
        auto ops = parse_operator_list(list);
        const bool reversal_ok = !inst.has_time_windows() && inst.symmetric();
        for (const auto& op : ops)
            if (op.kind == MoveKind::TwoOpt && !reversal_ok)
                throw std::invalid_argument("TO needs a symmetric instance without time windows");
        return ops;
    }
    if (!lens.empty()) return operators_for_lengths(inst, lens);
    return default_operators(inst);
}

// Maps exceptions onto the exit-code contract.
template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const ContractError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const StructureError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

std::vector<std::string> resolve_instances(const std::string& arg) {
    fs::path p(arg);
    if (!fs::exists(p) && p.is_relative()) {
        if (const char* root = std::getenv("VRPTS_INSTANCE_ROOT"); root && *root) p = fs::path(root) / arg;
    }
    if (!fs::exists(p)) throw std::runtime_error("no such instance: " + arg);
    std::vector<std::string> out;
    if (fs::is_directory(p)) {
        for (const auto& e : fs::directory_iterator(p)) {
            if (!e.is_regular_file()) continue;
            const auto name = e.path().filename().string();
            const auto ext = e.path().extension().string();
            if (name.starts_with('.') || ext == ".sol" || ext == ".json" || ext == ".csv" || ext == ".bks") continue;
            out.push_back(e.path().string());
        }
        std::sort(out.begin(), out.end());
    } else {
        out.push_back(p.string());
    }
    return out;
}

std::map<std::string, double> read_bks(const std::string& path) {
    std::istringstream in(slurp(path));
    std::map<std::string, double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string name;
        double v = 0.0;
        if (!(ls >> name)) continue;
        if (!(ls >> v)) throw ParseError(lineno, "expected 'name value' in BKS file");
        out[name] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_solve(const SolveArgs& a) {
    if (a.reps < 1) {
        std::cerr << "usage error: --reps must be at least 1\n";
        return kUsage;
    }
    if (a.jobs < 1 || a.time_scale <= 0.0) {
        std::cerr << "usage error: --jobs and --time-scale must be positive\n";
        return kUsage;
    }
    return guarded([&] {
        const BackendKind backend = backend_from_string(a.backend);
        std::vector<std::string> files;
        for (const auto& arg : a.instances) {
            auto more = resolve_instances(arg);
            files.insert(files.end(), more.begin(), more.end());
        }
        if (files.empty()) throw std::invalid_argument("no instances given");
        std::map<std::string, double> bks;
        if (!a.bks.empty()) {
            if (fs::exists(a.bks))
                bks = read_bks(a.bks);
            else
                std::cerr << "note: BKS file " << a.bks << " not found; gap column omitted\n";
        }
        const bool with_gap = !bks.empty();

        fs::create_directories(a.out);
        std::ofstream csv(fs::path(a.out) / "summary.csv");
        csv << "instance,backend,reps,best_f,mean_f,mean_wall_time,feasible_runs";
        if (with_gap) csv << ",bks,gap_best,gap_mean";
        csv << "\n";
        csv << std::setprecision(10);

        for (const auto& file : files) {
            const Instance inst = load_instance(file);
            SearchConfig base = default_config(inst);
            base.backend = backend;
            if (a.theta) base.theta = *a.theta;
            if (a.population) base.population = *a.population;
            base.operators = pick_operators(inst, a.operators, a.segment_lens);
            if (a.mu1 || a.mu2) {
                PenaltyWeights w = default_penalties(inst);
                if (a.mu1) w.mu1 = *a.mu1;
                if (a.mu2) w.mu2 = *a.mu2;
                w.w_load = w.w_tw = 10.0 * std::max(w.mu2, 1e-9);
                base.penalties = w;
            }
            if (base.termination.time_limit_s > 0) base.termination.time_limit_s *= a.time_scale;
            if (a.generations) base.termination.max_generations = *a.generations;

            const std::string name = inst.name().empty() ? stem_of(file) : inst.name();
            std::vector<MemeticResult> results(a.reps);
            std::atomic<int> next{0};
            std::atomic<bool> failed{false};
            std::string failure;
            std::mutex fail_mu;
            auto worker = [&] {
                for (int r; (r = next++) < a.reps && !failed;) {
                    try {
                        SearchConfig c = base;
                        c.seed = a.seed + static_cast<std::uint64_t>(r);
                        results[r] = run_memetic(inst, c);
                    } catch (const std::exception& e) {
                        std::lock_guard lock(fail_mu);
                        failed = true;
                        failure = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int t = 1; t < std::min(a.jobs, a.reps); ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();
            if (failed) throw ContractError("run failed on " + name + ": " + failure);

            double best = kInfinity, sum_f = 0.0, sum_t = 0.0;
            int feasible = 0;
            for (int r = 0; r < a.reps; ++r) {
                const auto& res = results[r];
                const std::string tag = name + "_" + std::string(to_string(backend)) + "_s" + std::to_string(res.record.seed);
                write_file(fs::path(a.out) / (tag + ".json"), res.record.to_json().dump(2) + "\n");
                write_file(fs::path(a.out) / (tag + ".sol"), write_solution(res.best));
                best = std::min(best, res.record.best_objective);
                sum_f += res.record.best_objective;
                sum_t += res.record.wall_time;
                feasible += res.record.feasible ? 1 : 0;
                if (!a.quiet)
                    std::cout << name << " seed " << res.record.seed << ": f=" << res.record.best_objective
                              << " M=" << res.record.routes << (res.record.feasible ? "" : " (infeasible)")
                              << " gens=" << res.record.generations << " t=" << res.record.wall_time << "s\n";
            }
            const double mean_f = sum_f / a.reps;
            csv << name << "," << to_string(backend) << "," << a.reps << "," << best << "," << mean_f << ","
                << sum_t / a.reps << "," << feasible;
            if (with_gap) {
                if (auto it = bks.find(name); it != bks.end() && it->second != 0.0)
                    csv << "," << it->second << "," << (best - it->second) / it->second * 100.0 << ","
                        << (mean_f - it->second) / it->second * 100.0;
                else
                    csv << ",,,";
            }
            csv << "\n";
        }
        return static_cast<int>(kOk);
    });
}

// ---------------------------------------------------------------------------

int cmd_speedup(const SpeedupArgs& a) {
    if (a.reps < 1 || a.iterations < 1) {
        std::cerr << "usage error: --reps and --iterations must be at least 1\n";
        return kUsage;
    }
    return guarded([&] {
        const BackendKind ka = backend_from_string(a.backend_a), kb = backend_from_string(a.backend_b);
        std::vector<Instance> instances;
        for (const auto& arg : a.instances)
            for (const auto& f : resolve_instances(arg)) instances.push_back(load_instance(f));
        for (int n : a.generate) {
            GeneratorOptions g;
            g.customers = n;
            g.variant = variant_from_string(a.variant);
            g.seed = a.seed;
            instances.push_back(generate_uniform(g));
        }
        if (instances.empty()) throw std::invalid_argument("no instances given");

        std::ofstream csv;
        if (!a.out.empty()) {
            if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
            csv.open(a.out);
            csv << "instance,customers,category,seconds_a,seconds_b,speedup\n";
        }
        std::cout << std::fixed << std::setprecision(4);
        for (const auto& inst : instances) {
            const auto ops = pick_operators(inst, a.operators, a.segment_lens);
            const PenaltyWeights w = default_penalties(inst);
            const int theta = a.theta.value_or(default_config(inst).theta);
            const GranularMask mask = build_granular_mask(inst, theta);

            // category -> per-rep seconds of each backend
            std::map<std::string, std::vector<double>> ta, tb;
            for (int r = 0; r < a.reps; ++r) {
                std::mt19937_64 rng(a.seed + static_cast<std::uint64_t>(r));
                const Solution start = construct_initial(inst, rng);
                auto ea = make_evaluator(ka, inst, &mask);
                auto eb = make_evaluator(kb, inst, &mask);
                const auto rep = run_lockstep(start, *ea, *eb, ops, w, a.iterations);
                if (!rep.identical) {
                    std::cerr << "trajectory divergence on " << inst.name() << ": " << rep.divergence << "\n";
                    return static_cast<int>(kInternal);
                }
                std::map<std::string, double> sa, sb;
                for (std::size_t i = 0; i < ops.size(); ++i) {
                    const std::string cat(short_name(ops[i].kind));
                    sa[cat] += rep.seconds_a[i];
                    sb[cat] += rep.seconds_b[i];
                    const std::string group = is_inter(ops[i].kind) ? "inter" : "intra";
                    sa[group] += rep.seconds_a[i];
                    sb[group] += rep.seconds_b[i];
                    sa["total"] += rep.seconds_a[i];
                    sb["total"] += rep.seconds_b[i];
                }
                for (const auto& [k, v] : sa) ta[k].push_back(v);
                for (const auto& [k, v] : sb) tb[k].push_back(v);
            }
            std::cout << inst.name() << " (" << inst.num_customers() << " customers, " << a.backend_a << " vs "
                      << a.backend_b << ", identical trajectories)\n";
            for (const auto& [cat, va] : ta) {
                const double ma = median(va), mb = median(tb[cat]);
                const double gamma = mb > 0.0 ? ma / mb : 0.0;
                std::cout << "  " << std::left << std::setw(6) << cat << std::right << " t_a=" << ma << "s t_b=" << mb
                          << "s gamma=" << gamma << "\n";
                if (csv.is_open())
                    csv << inst.name() << "," << inst.num_customers() << "," << cat << "," << ma << "," << mb << ","
                        << gamma << "\n";
            }
        }
        return static_cast<int>(kOk);
    });
}

// ---------------------------------------------------------------------------

int cmd_validate(const ValidateArgs& a) {
    return guarded([&] {
        const Instance inst = load_instance(a.instance);
        const std::string text = slurp(a.solution);
        std::optional<double> reported;
        {
            std::istringstream in(text);
            std::string line;
            while (std::getline(in, line))
                if (line.rfind("Cost", 0) == 0) reported = std::stod(line.substr(4));
        }
        Solution sol;
        try {
            sol = read_solution(inst, text);
        } catch (const StructureError& e) {
            std::cout << "INVALID: " << e.what() << "\n";
            return static_cast<int>(kData);
        }
        const double f = objective(inst, sol);
        const auto v = violations(inst, sol);
        std::cout << std::setprecision(12) << "instance " << inst.name() << "\nf " << f << "\nM " << sol.used_routes()
                  << "\ndistance " << sol.distance() << "\nload_violation " << v.load << "\nwarp_violation " << v.warp
                  << "\n";
        bool ok = true;
        if (reported) {
            const double tol = inst.integral() ? 0.0 : 1e-6 * std::max(1.0, std::abs(f));
            const bool match = std::abs(*reported - f) <= tol;
            std::cout << "reported " << *reported << (match ? " (matches)" : " (MISMATCH)") << "\n";
            ok = ok && match;
        }
        const bool feasible = v.load == 0.0 && v.warp == 0.0;
        if (a.require_feasible) ok = ok && feasible;
        std::cout << (ok ? "VALID" : "INVALID") << (feasible ? "" : " (infeasible)") << "\n";
        return static_cast<int>(ok ? kOk : kData);
    });
}

// ---------------------------------------------------------------------------

int cmd_mask_stats(const MaskStatsArgs& a) {
    if (a.theta < 1) {
        std::cerr << "usage error: --theta must be at least 1\n";
        return kUsage;
    }
    return guarded([&] {
        std::vector<std::string> files;
        for (const auto& arg : a.instances) {
            auto more = resolve_instances(arg);
            files.insert(files.end(), more.begin(), more.end());
        }
        if (files.empty()) throw std::invalid_argument("no instances given");
        for (const auto& file : files) {
            const Instance inst = load_instance(file);
            const GranularMask mask = build_granular_mask(inst, a.theta);
            std::mt19937_64 rng(a.seed);
            const Solution sol = construct_initial(inst, rng);
            const SolutionTensor ts = build_solution_tensor(inst, sol);
            const PositionalTensors p = build_positional(ts);
            const EdgeIndexTensors e = build_edges(p, mask);
            const double n = inst.num_nodes();
            std::cout << inst.name() << ": nodes=" << inst.num_nodes() << " theta=" << a.theta
                      << " mask_true=" << mask.count() << " density=" << mask.count() / (n * n)
                      << " routes=" << sol.num_routes() << " positions=" << p.size()
                      << " node_pairs=" << p.size() * p.size() << " edges=" << e.size() << "\n";
        }
        return static_cast<int>(kOk);
    });
}

}  // namespace vrpts::cli
