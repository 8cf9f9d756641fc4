// omepp — terrain generation, PCPD preprocessing, OMEPP queries and benchmarks.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "omepp/omepp.hpp"

namespace {

using namespace omepp;

std::vector<double> parse_buckets(const std::string& spec) {
    // "first:last:step" or a comma list
    if (spec.find(':') != std::string::npos) {
        double a = 0, b = 0, s = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':')
            throw Error("bucket range must look like first:last:step");
        return bucket_range(a, b, s);
    }
    std::vector<double> out;
    std::stringstream in(spec);
    for (std::string tok; std::getline(in, tok, ',');)
        out.push_back(std::stod(tok));
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& spec) {
    std::vector<std::size_t> out;
    std::stringstream in(spec);
    for (std::string tok; std::getline(in, tok, ',');)
        if (!tok.empty())
            out.push_back(std::stoul(tok));
    return out;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Payload-aware minimum-energy pickup paths on grid terrain"};
    app.require_subcommand(1);

    // gen-terrain
    auto* gen = app.add_subcommand("gen-terrain", "Write a synthetic ESRI ASCII terrain");
    std::string style = "fbm", gen_out;
    std::size_t size = 128;
    std::uint64_t seed = 42;
    gen->add_option("--style", style, "flat | ramp | fbm")->capture_default_str();
    gen->add_option("--size", size, "grid side in cells")->capture_default_str();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--out", gen_out)->required();

    // build-pcpd
    auto* build = app.add_subcommand("build-pcpd", "Precompute first-move tables for each payload bucket");
    std::string terrain, robot, pcpd_path, buckets_spec = "0:70:10", build_out;
    unsigned threads = default_threads();
    build->add_option("--terrain", terrain)->required();
    build->add_option("--robot", robot)->required();
    build->add_option("--buckets", buckets_spec, "first:last:step or comma list (kg)")->capture_default_str();
    build->add_option("--threads", threads)->capture_default_str();
    build->add_option("--out", build_out)->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Answer one OMEPP query");
    std::string algorithm = "concurrent", query_path, solve_out;
    solve->add_option("--algorithm", algorithm, "concurrent | baseline")
        ->check(CLI::IsMember({"concurrent", "baseline"}))
        ->capture_default_str();
    solve->add_option("--terrain", terrain)->required();
    solve->add_option("--robot", robot)->required();
    solve->add_option("--pcpd", pcpd_path, "required for --algorithm concurrent");
    solve->add_option("--query", query_path)->required();
    solve->add_option("--out", solve_out, "solution JSON (stdout if omitted)");

    // bench
    auto* bench = app.add_subcommand("bench", "Paired baseline / concurrent benchmark");
    BenchConfig cfg;
    std::string sweep_spec, bench_out;
    double rho_init = 4, rho_obj = 20;
    std::vector<double> init_range, obj_range;
    bench->add_option("--terrain", cfg.terrain_path)->required();
    bench->add_option("--robot", cfg.robot_path)->required();
    bench->add_option("--pcpd", cfg.pcpd_path)->required();
    bench->add_option("--queries", cfg.num_queries)->capture_default_str();
    bench->add_option("--pickups", cfg.num_pickups)->capture_default_str();
    bench->add_option("--repeats", cfg.repeats)->capture_default_str();
    bench->add_option("--seed", cfg.seed)->capture_default_str();
    bench->add_option("--rho-init", rho_init, "fixed initial payload (kg)")->capture_default_str();
    bench->add_option("--rho-obj", rho_obj, "fixed object payload (kg)")->capture_default_str();
    bench->add_option("--rho-init-range", init_range, "random initial payload: lo hi")->expected(2);
    bench->add_option("--rho-obj-range", obj_range, "random object payload: lo hi")->expected(2);
    bench->add_option("--sweep-pickups", sweep_spec, "comma list, e.g. 25,50,75,100");
    bench->add_option("--threads", cfg.threads, "queries run in parallel (timings include contention)")
        ->capture_default_str();
    bench->add_option("--out", bench_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto st = parse_terrain_style(style);
            if (!st)
                throw Error("unknown terrain style '" + style + "'");
            save_ascii_grid(gen_synthetic(size, seed, *st), gen_out);
        } else if (*build) {
            const TerrainGrid grid = load_ascii_grid(terrain);
            const EdgeCostModel model(grid, load_robot(robot));
            const auto buckets = parse_buckets(buckets_spec);
            const Pcpd pcpd = build_pcpd(model, buckets, threads, [&](std::size_t i, double secs) {
                std::printf("bucket %6.2f kg  %8.2f s\n", buckets[i], secs);
                std::fflush(stdout);
            });
            serialize(pcpd, build_out);
            for (const Cpd& c : pcpd.cpds())
                std::printf("bucket %6.2f kg  %10zu runs  %12zu bytes\n", c.rho(), c.total_runs(),
                            serialized_cpd_size(c));
        } else if (*solve) {
            const TerrainGrid grid = load_ascii_grid(terrain);
            const EdgeCostModel model(grid, load_robot(robot));
            const OmeppQuery q = query_from_json(grid, read_json_file(query_path));
            std::optional<OmeppSolution> sol;
            double ms = 0;
            if (algorithm == "baseline") {
                const auto t0 = std::chrono::steady_clock::now();
                sol = solve_baseline(model, q);
                ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            } else {
                if (pcpd_path.empty())
                    throw Error("--pcpd is required for the concurrent algorithm");
                const Pcpd pcpd = deserialize(pcpd_path, &grid);
                const ConcurrentSolver solver(model, pcpd);
                const auto t0 = std::chrono::steady_clock::now();
                sol = solver.solve(q);
                ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            }
            const json doc = solution_to_json(grid, sol, algorithm, ms);
            if (solve_out.empty())
                std::cout << doc.dump(2) << '\n';
            else
                write_json_file(doc, solve_out);
            return sol ? 0 : 2;
        } else if (*bench) {
            cfg.payload = PayloadMode::fixed(rho_init, rho_obj);
            if (!init_range.empty() || !obj_range.empty()) {
                if (init_range.empty())
                    init_range = {rho_init, rho_init};
                if (obj_range.empty())
                    obj_range = {rho_obj, rho_obj};
                cfg.payload = PayloadMode::random(init_range[0], init_range[1], obj_range[0], obj_range[1]);
            }
            cfg.sweep_pickups = parse_counts(sweep_spec);
            const BenchResult res = run_bench(cfg);
            emit_report(res.records, bench_out, res.sweep);
            for (const AlgorithmSummary& s : res.summary)
                std::printf("%-10s  queries %zu  solved %zu  mean %.3f ms  median %.3f ms  subopt %.6f  max_branch %zu\n",
                            s.algorithm.c_str(), s.queries, s.solved, s.mean_runtime_ms, s.median_runtime_ms,
                            s.mean_subopt, s.max_branch);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "omepp: %s\n", e.what());
        return 1;
    }
    return 0;
}
