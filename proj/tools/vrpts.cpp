#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace vrpts::cli;

int main(int argc, char** argv) {
    CLI::App app{"vrpts: attribute-matrix local search with scalar and batch evaluators"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "run the memetic search on instances");
    s->add_option("instances", solve.instances, "instance files or directories")->required();
    s->add_option("--backend", solve.backend, "scalar | scalar-granular | batch-node | batch-edge | batch-route");
    s->add_option("--theta", solve.theta, "granular neighbours per customer");
    s->add_option("--mu", solve.population, "population size");
    s->add_option("--mu1", solve.mu1, "cost per used vehicle");
    s->add_option("--mu2", solve.mu2, "cost per unit distance");
    s->add_option("--seed", solve.seed, "seed of the first repetition");
    s->add_option("--reps", solve.reps, "independent repetitions");
    s->add_option("--time-scale", solve.time_scale, "multiplier on the wall-clock budget");
    s->add_option("--generations", solve.generations, "cap on generations");
    s->add_option("--bks", solve.bks, "best-known-solution file");
    s->add_option("--out", solve.out, "output directory");
    s->add_option("--operators", solve.operators, "comma list, e.g. XR1,XS11,TOS,IR1");
    s->add_option("--segment-lens", solve.segment_lens, "relocate/swap lengths, e.g. 1,2,3/1,2");
    s->add_option("--jobs", solve.jobs, "concurrent repetitions");
    s->add_flag("--quiet", solve.quiet, "no per-run lines");

    SpeedupArgs sp;
    auto* u = app.add_subcommand("speedup", "time two backends on identical descent trajectories");
    u->add_option("instances", sp.instances, "instance files or directories");
    u->add_option("--generate", sp.generate, "customer counts of generated uniform instances")->delimiter(',');
    u->add_option("--variant", sp.variant, "variant of generated instances: cvrp | vrptw | vrpspdtw");
    u->add_option("--backend-a", sp.backend_a, "baseline backend");
    u->add_option("--backend,--backend-b", sp.backend_b, "compared backend");
    u->add_option("--theta", sp.theta, "granular neighbours per customer");
    u->add_option("--seed", sp.seed, "seed of the first repetition");
    u->add_option("--reps", sp.reps, "repetitions; medians are reported");
    u->add_option("--iterations", sp.iterations, "operator evaluations per run");
    u->add_option("--operators", sp.operators, "comma list of operators");
    u->add_option("--segment-lens", sp.segment_lens, "relocate/swap lengths, e.g. 1,2,3/1,2");
    u->add_option("--out", sp.out, "CSV report path");

    ValidateArgs va;
    auto* v = app.add_subcommand("validate", "recompute a solution file from scratch");
    v->add_option("instance", va.instance, "instance file")->required();
    v->add_option("solution", va.solution, "solution file")->required();
    v->add_flag("--require-feasible", va.require_feasible, "treat violations as invalid");

    MaskStatsArgs ms;
    auto* m = app.add_subcommand("mask-stats", "granular mask and edge counts");
    m->add_option("instances", ms.instances, "instance files or directories")->required();
    m->add_option("--theta", ms.theta, "granular neighbours per customer");
    m->add_option("--seed", ms.seed, "seed of the constructed solution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*s) return cmd_solve(solve);
    if (*u) return cmd_speedup(sp);
    if (*v) return cmd_validate(va);
    if (*m) return cmd_mask_stats(ms);
    return kUsage;
}
