// bvu: generate, solve, verify, reduce and benchmark bribery instances.

#include <bvu/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace bvu::cli;

    CLI::App app{"Bribery under voter uncertainty: exact and additive-epsilon solvers"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "RNG seed for generators and Monte Carlo checks");
    app.add_option("-o,--output", g.output, "write the result to this file instead of stdout");
    app.add_flag("-q,--quiet", g.quiet, "suppress progress and warnings on stderr");
    bool no_timing = false;
    app.add_flag("--no-timing", no_timing, "write runtime fields as 0 (byte-identical reruns)");

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "emit a random or structured instance");
    generate->fallthrough();
    generate->add_option("kind", gen.kind, "random | dsum-gadget | case1-friendly")
        ->check(CLI::IsMember({"random", "dsum-gadget", "case1-friendly"}))
        ->required();
    generate->add_option("--name", gen.name, "instance name stored in metadata");
    generate->add_option("--sizes", gen.random.sizes, "group sizes |V1| ... |Vm| (random)")->delimiter(',');
    generate->add_option("--price-min", gen.random.price_min);
    generate->add_option("--price-max", gen.random.price_max);
    generate->add_flag("!--real-prices", gen.random.integer_prices, "draw real-valued prices");
    generate->add_option("--prob-min", gen.random.prob_min);
    generate->add_option("--prob-max", gen.random.prob_max);
    generate->add_option("--big-fraction", gen.random.big_fraction, "share of voters with p near 1");
    generate->add_option("--budget-fraction", gen.random.budget_fraction, "budget as a share of bribable prices");
    generate->add_option("--xs", gen.dsum.xs, "d-sum integers (dsum-gadget)")->delimiter(',');
    generate->add_option("--d", gen.dsum.d, "subset size (dsum-gadget)");
    generate->add_option("--t", gen.dsum.t, "target sum (dsum-gadget)");
    generate->add_option("--alpha", gen.alpha_target, "approximation ratio the gadget defeats (dsum-gadget)");
    generate->add_option("--k", gen.case1.k, "threshold (case1-friendly)");
    generate->add_option("--big", gen.case1.big_count, "big voters, >= 2k (case1-friendly)");
    generate->add_option("--small", gen.case1.small_count, "moderate voters (case1-friendly)");
    generate->add_option("--epsilon", gen.case1.epsilon, "big-item margin parameter (case1-friendly)");

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
    solve_cmd->fallthrough();
    solve_cmd->add_option("instance", solve.instance_path)->required();
    solve_cmd->add_option("--method", solve.method)->check(CLI::IsMember({"exact", "approx"}));
    solve_cmd->add_option("--epsilon", solve.epsilon, "additive error target in (0, 0.25]");
    solve_cmd->add_flag("--theoretical", solve.theoretical, "uncapped parameters; fail instead of truncating");
    solve_cmd->add_option("--max-items", solve.max_items, "largest bribable pool the exact solver accepts");

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "check a solution against its instance");
    verify_cmd->fallthrough();
    verify_cmd->add_option("instance", verify.instance_path)->required();
    verify_cmd->add_option("solution", verify.solution_path)->required();
    verify_cmd->add_option("--samples", verify.samples, "Monte Carlo samples");

    ReduceOptions reduce;
    auto* reduce_cmd = app.add_subcommand("reduce", "export the KU or MKU instance of a BVU instance");
    reduce_cmd->fallthrough();
    reduce_cmd->add_option("instance", reduce.instance_path)->required();
    reduce_cmd->add_option("--target", reduce.target)->check(CLI::IsMember({"ku", "mku"}))->required();
    reduce_cmd->add_option("--alpha", reduce.alpha, "guessed deficit, -1..r (mku)");
    reduce_cmd->add_option("--j0", reduce.j0, "guessed group attaining it, 1..m-1 (mku)");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "run solvers over a directory of instances, CSV out");
    bench_cmd->fallthrough();
    bench_cmd->add_option("--dir", bench.dir)->required();
    bench_cmd->add_option("--methods", bench.methods)->delimiter(',');
    bench_cmd->add_option("--epsilons", bench.epsilons)->delimiter(',');
    bench_cmd->add_flag("--theoretical", bench.theoretical);
    bench_cmd->add_option("--max-items", bench.max_items);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalidInput;
    }
    g.timing = !no_timing;

    if (*generate) return cmd_generate(gen, g, std::cout, std::cerr);
    if (*solve_cmd) return cmd_solve(solve, g, std::cout, std::cerr);
    if (*verify_cmd) return cmd_verify(verify, g, std::cout, std::cerr);
    if (*reduce_cmd) return cmd_reduce(reduce, g, std::cout, std::cerr);
    if (*bench_cmd) return cmd_bench(bench, g, std::cout, std::cerr);
    return kInternalError;
}
