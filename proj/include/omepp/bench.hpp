#ifndef OMEPP_BENCH_HPP
#define OMEPP_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "omepp/concurrent.hpp"
#include "omepp/energy.hpp"
#include "omepp/error.hpp"
#include "omepp/io.hpp"
#include "omepp/pcpd.hpp"
#include "omepp/search.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

/// Payload assignment for generated queries. Fixed when both ranges are
/// degenerate; otherwise each query draws uniformly from the ranges.
struct PayloadMode {
    double rho_init_min = 4.0;
    double rho_init_max = 4.0;
    double rho_obj_min = 20.0;
    double rho_obj_max = 20.0;

    static PayloadMode fixed(double rho_init, double rho_obj) { return {rho_init, rho_init, rho_obj, rho_obj}; }
    static PayloadMode random(double init_lo, double init_hi, double obj_lo, double obj_hi) {
        return {init_lo, init_hi, obj_lo, obj_hi};
    }
    bool is_fixed() const noexcept { return rho_init_min == rho_init_max && rho_obj_min == rho_obj_max; }
};

struct BenchConfig {
    std::string terrain_path;
    std::string robot_path;
    std::string pcpd_path;
    std::size_t num_queries = 100;
    std::size_t num_pickups = 50;
    PayloadMode payload;
    std::size_t repeats = 10;
    std::uint64_t seed = 1;
    /// Pickup counts for the runtime-vs-pickups sweep; empty disables it.
    std::vector<std::size_t> sweep_pickups;
    /// Sampling attempts allowed per requested query before giving up.
    std::size_t retries_per_query = 200;
    /// Queries run concurrently when > 1. Timings then include contention.
    unsigned threads = 1;

    void validate() const {
        if (repeats < 3)
            throw Error("repeats must be at least 3 (min and max are discarded)");
        if (num_pickups == 0)
            throw Error("num_pickups must be positive");
        if (payload.rho_init_min < 0.0 || payload.rho_obj_min < 0.0 || payload.rho_init_max < payload.rho_init_min ||
            payload.rho_obj_max < payload.rho_obj_min)
            throw Error("payload ranges must be non-negative and ordered");
    }
};

struct BenchRecord {
    std::size_t query_id = 0;
    std::string algorithm;
    double rho_init = 0.0;
    double rho_obj = 0.0;
    std::size_t pickups = 0;
    double runtime_ms = 0.0; ///< trimmed mean
    double energy_j = kInfeasible;
    double subopt = 0.0;
    std::size_t expansions = 0;
    std::size_t max_branch = 0;
    /// Largest branching seen while one leg already sat on its goal. Not
    /// part of the CSV.
    std::size_t max_branch_goal_side = 0;

    bool found() const noexcept { return std::isfinite(energy_j); }
};

struct AlgorithmSummary {
    std::string algorithm;
    std::size_t queries = 0;
    std::size_t solved = 0;
    double mean_runtime_ms = 0.0;
    double median_runtime_ms = 0.0;
    double mean_subopt = 0.0;
    double max_subopt = 0.0;
    std::size_t max_branch = 0;
};

/// One row per (pickup count, algorithm).
struct SweepRow {
    std::size_t pickups = 0;
    std::string algorithm;
    std::size_t queries = 0;
    double mean_runtime_ms = 0.0;
    double median_runtime_ms = 0.0;
    double mean_subopt = 0.0;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    std::vector<AlgorithmSummary> summary;
    std::vector<SweepRow> sweep;
};

inline constexpr const char* kBaselineName = "baseline";
inline constexpr const char* kConcurrentName = "concurrent";

// ---------------------------------------------------------------------------
// timing

/// Mean after discarding one smallest and one largest sample.
inline double trimmed_mean(std::vector<double> samples) {
    if (samples.size() < 3)
        throw Error("trimmed mean needs at least 3 samples");
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i)
        sum += samples[i];
    return sum / static_cast<double>(samples.size() - 2);
}

inline double median(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// query generation

namespace detail {

// mt19937_64 is fully specified; the std distributions are not, so the
// mappings below keep query sets identical across standard libraries.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do
        x = rng();
    while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    if (lo == hi)
        return lo;
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline Direction opposite(Direction d) noexcept {
    return static_cast<Direction>((static_cast<unsigned>(d) + 4) % kNumDirections);
}

} // namespace detail

/// Cells reachable from `v` (forward) or that can reach `v` (backward)
/// over edges feasible at the payload of `costs`.
inline std::vector<std::uint8_t> reachable_set(const PayloadCosts& costs, NodeId v, bool forward = true) {
    const TerrainGrid& g = costs.model().grid();
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::vector<NodeId> queue{v};
    seen[v.index()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (Direction d : kAllDirections) {
            const auto w = g.step(u, d);
            if (!w || seen[w->index()])
                continue;
            const double c = forward ? costs.cost(u, d) : costs.cost(*w, detail::opposite(d));
            if (!feasible(c))
                continue;
            seen[w->index()] = 1;
            queue.push_back(*w);
        }
    }
    return seen;
}

/// Random OMEPP queries. Each has t reachable from s at the combined
/// payload, and only pickups p with s -> p feasible at rho_init and p -> t
/// feasible at rho_init + rho_obj, so every pickup is a real candidate.
inline std::vector<OmeppQuery> gen_queries(const EdgeCostModel& model, const BenchConfig& bench) {
    bench.validate();
    const TerrainGrid& g = model.grid();
    std::vector<NodeId> cells;
    for (std::uint32_t i = 0; i < g.size(); ++i)
        if (g.traversable(NodeId(i)))
            cells.push_back(NodeId(i));
    if (cells.size() < bench.num_pickups + 2)
        throw Error("terrain has too few traversable cells for " + std::to_string(bench.num_pickups) + " pickups");

    std::mt19937_64 rng(bench.seed);
    std::vector<OmeppQuery> out;
    out.reserve(bench.num_queries);
    const std::size_t budget = bench.retries_per_query * std::max<std::size_t>(1, bench.num_queries);
    std::vector<NodeId> candidates;
    for (std::size_t attempt = 0; out.size() < bench.num_queries; ++attempt) {
        if (attempt == budget)
            throw Error("terrain too disconnected: only " + std::to_string(out.size()) + " of " +
                        std::to_string(bench.num_queries) + " solvable queries after " + std::to_string(budget) +
                        " attempts");
        OmeppQuery q;
        q.rho_init = detail::uniform_real(rng, bench.payload.rho_init_min, bench.payload.rho_init_max);
        q.rho_obj = detail::uniform_real(rng, bench.payload.rho_obj_min, bench.payload.rho_obj_max);
        q.s = cells[detail::uniform_index(rng, cells.size())];
        q.t = cells[detail::uniform_index(rng, cells.size())];
        if (q.s == q.t)
            continue;
        const auto from_s = reachable_set(model.at(q.rho_init), q.s, true);
        const auto to_t = reachable_set(model.at(q.rho_total()), q.t, false);
        if (!to_t[q.s.index()])
            continue;
        candidates.clear();
        for (NodeId c : cells)
            if (c != q.s && c != q.t && from_s[c.index()] && to_t[c.index()])
                candidates.push_back(c);
        if (candidates.size() < bench.num_pickups)
            continue;
        // Partial Fisher-Yates: the first num_pickups entries are the draw.
        for (std::size_t i = 0; i < bench.num_pickups; ++i)
            std::swap(candidates[i], candidates[i + detail::uniform_index(rng, candidates.size() - i)]);
        q.pickups.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(bench.num_pickups));
        out.push_back(std::move(q));
    }
    return out;
}

inline std::vector<OmeppQuery> gen_queries(const TerrainGrid& g, const RobotConfig& cfg, const BenchConfig& bench) {
    const EdgeCostModel model(g, cfg);
    return gen_queries(model, bench);
}

// ---------------------------------------------------------------------------
// running

namespace detail {

template <class Solve>
std::pair<std::optional<OmeppSolution>, double> timed_runs(std::size_t repeats, Solve&& solve) {
    std::vector<double> ms;
    ms.reserve(repeats);
    std::optional<OmeppSolution> sol;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        auto s = solve();
        const auto t1 = std::chrono::steady_clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        if (r == 0)
            sol = std::move(s);
    }
    return {std::move(sol), trimmed_mean(std::move(ms))};
}

inline BenchRecord make_record(std::size_t id, const char* algorithm, const OmeppQuery& q,
                               const std::optional<OmeppSolution>& sol, double runtime_ms) {
    BenchRecord r;
    r.query_id = id;
    r.algorithm = algorithm;
    r.rho_init = q.rho_init;
    r.rho_obj = q.rho_obj;
    r.pickups = q.pickups.size();
    r.runtime_ms = runtime_ms;
    if (sol) {
        r.energy_j = sol->total_energy();
        r.expansions = sol->stats.expansions;
        r.max_branch = sol->stats.max_branch;
        r.max_branch_goal_side = sol->stats.max_branch_one_side_done;
    }
    return r;
}

} // namespace detail

/// Runs both solvers on every query, `repeats` times each, and returns two
/// records per query (baseline first). Only the solve call is timed.
inline std::vector<BenchRecord> run_queries(const EdgeCostModel& model, const Pcpd& pcpd,
                                            const std::vector<OmeppQuery>& queries, std::size_t repeats,
                                            unsigned threads = 1) {
    if (repeats < 3)
        throw Error("repeats must be at least 3 (min and max are discarded)");
    const ConcurrentSolver concurrent(model, pcpd);
    std::vector<BenchRecord> records(2 * queries.size());
    auto run_one = [&](std::size_t i) {
        const OmeppQuery& q = queries[i];
        auto [base, base_ms] = detail::timed_runs(repeats, [&] { return solve_baseline(model, q); });
        auto [conc, conc_ms] = detail::timed_runs(repeats, [&] { return concurrent.solve(q); });
        BenchRecord b = detail::make_record(i, kBaselineName, q, base, base_ms);
        BenchRecord c = detail::make_record(i, kConcurrentName, q, conc, conc_ms);
        b.subopt = b.found() ? 0.0 : kInfeasible;
        c.subopt = b.found() && c.found() ? suboptimality(c.energy_j, b.energy_j) : kInfeasible;
        records[2 * i] = std::move(b);
        records[2 * i + 1] = std::move(c);
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < queries.size(); ++i)
            run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < queries.size(); i += threads)
                    run_one(i);
            });
        for (auto& th : pool)
            th.join();
    }
    return records;
}

/// Per-algorithm averages, in first-appearance order. Suboptimality means
/// are taken over solved queries only.
inline std::vector<AlgorithmSummary> summarize(const std::vector<BenchRecord>& records) {
    std::vector<AlgorithmSummary> out;
    std::vector<std::vector<double>> runtimes;
    for (const BenchRecord& r : records) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.algorithm == r.algorithm; });
        if (it == out.end()) {
            out.push_back({r.algorithm});
            runtimes.emplace_back();
            it = out.end() - 1;
        }
        AlgorithmSummary& s = *it;
        ++s.queries;
        s.mean_runtime_ms += r.runtime_ms;
        runtimes[static_cast<std::size_t>(it - out.begin())].push_back(r.runtime_ms);
        s.max_branch = std::max(s.max_branch, r.max_branch);
        if (r.found() && std::isfinite(r.subopt)) {
            ++s.solved;
            s.mean_subopt += r.subopt;
            s.max_subopt = std::max(s.max_subopt, r.subopt);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].mean_runtime_ms /= static_cast<double>(out[i].queries);
        out[i].median_runtime_ms = median(runtimes[i]);
        if (out[i].solved)
            out[i].mean_subopt /= static_cast<double>(out[i].solved);
    }
    return out;
}

inline std::vector<SweepRow> run_sweep(const EdgeCostModel& model, const Pcpd& pcpd, const BenchConfig& bench) {
    std::vector<SweepRow> rows;
    for (std::size_t n : bench.sweep_pickups) {
        BenchConfig b = bench;
        b.num_pickups = n;
        const auto records = run_queries(model, pcpd, gen_queries(model, b), b.repeats, b.threads);
        for (const AlgorithmSummary& s : summarize(records))
            rows.push_back({n, s.algorithm, s.queries, s.mean_runtime_ms, s.median_runtime_ms, s.mean_subopt});
    }
    return rows;
}

inline BenchResult run_bench(const EdgeCostModel& model, const Pcpd& pcpd, const BenchConfig& bench) {
    bench.validate();
    BenchResult out;
    out.records = run_queries(model, pcpd, gen_queries(model, bench), bench.repeats, bench.threads);
    out.summary = summarize(out.records);
    if (!bench.sweep_pickups.empty())
        out.sweep = run_sweep(model, pcpd, bench);
    return out;
}

/// Loads terrain, robot and PCPD from the paths in `bench`, then runs.
inline BenchResult run_bench(const BenchConfig& bench) {
    const TerrainGrid grid = load_ascii_grid(bench.terrain_path);
    const EdgeCostModel model(grid, load_robot(bench.robot_path));
    const Pcpd pcpd = deserialize(bench.pcpd_path, &grid);
    return run_bench(model, pcpd, bench);
}

// ---------------------------------------------------------------------------
// reports

inline constexpr const char* kResultsHeader =
    "query_id,algorithm,rho_init,rho_obj,pickups,runtime_ms,energy_j,subopt,expansions,max_branch";

inline void write_results_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << kResultsHeader << '\n' << std::setprecision(17);
    for (const BenchRecord& r : records)
        out << r.query_id << ',' << r.algorithm << ',' << r.rho_init << ',' << r.rho_obj << ',' << r.pickups << ','
            << r.runtime_ms << ',' << r.energy_j << ',' << r.subopt << ',' << r.expansions << ',' << r.max_branch
            << '\n';
}

inline std::vector<BenchRecord> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader)
        throw ParseError("results CSV header mismatch", 1);
    std::vector<BenchRecord> out;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            f.push_back(cell);
        if (f.size() != 10)
            throw ParseError("expected 10 fields, got " + std::to_string(f.size()), lineno);
        try {
            BenchRecord r;
            r.query_id = std::stoull(f[0]);
            r.algorithm = f[1];
            r.rho_init = std::stod(f[2]);
            r.rho_obj = std::stod(f[3]);
            r.pickups = std::stoull(f[4]);
            r.runtime_ms = std::stod(f[5]);
            r.energy_j = std::stod(f[6]);
            r.subopt = std::stod(f[7]);
            r.expansions = std::stoull(f[8]);
            r.max_branch = std::stoull(f[9]);
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("malformed number", lineno);
        }
    }
    return out;
}

inline json summary_to_json(const std::vector<AlgorithmSummary>& summary) {
    json rows = json::array();
    for (const AlgorithmSummary& s : summary)
        rows.push_back({{"algorithm", s.algorithm},
                        {"queries", s.queries},
                        {"solved", s.solved},
                        {"mean_runtime_ms", s.mean_runtime_ms},
                        {"median_runtime_ms", s.median_runtime_ms},
                        {"mean_subopt", s.mean_subopt},
                        {"max_subopt", s.max_subopt},
                        {"max_branch", s.max_branch}});
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "pickups,algorithm,queries,mean_runtime_ms,median_runtime_ms,mean_subopt\n" << std::setprecision(17);
    for (const SweepRow& r : rows)
        out << r.pickups << ',' << r.algorithm << ',' << r.queries << ',' << r.mean_runtime_ms << ','
            << r.median_runtime_ms << ',' << r.mean_subopt << '\n';
}

/// Writes results.csv and summary.json (plus sweep.csv when `sweep` is
/// non-empty) into directory `dir`, creating it if needed.
inline void emit_report(const std::vector<BenchRecord>& records, const std::string& dir,
                        const std::vector<SweepRow>& sweep = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::filesystem::path base(dir);
    auto open = [&](const char* name) {
        std::ofstream f(base / name);
        if (!f)
            throw Error("cannot write '" + (base / name).string() + "'");
        return f;
    };
    {
        auto f = open("results.csv");
        write_results_csv(records, f);
    }
    {
        auto f = open("summary.json");
        json doc{{"algorithms", summary_to_json(summarize(records))}};
        if (!records.empty()) {
            const bool fixed = std::all_of(records.begin(), records.end(), [&](const BenchRecord& r) {
                return r.rho_init == records.front().rho_init && r.rho_obj == records.front().rho_obj;
            });
            if (fixed) {
                doc["rho_init"] = records.front().rho_init;
                doc["rho_obj"] = records.front().rho_obj;
            }
        }
        f << doc.dump(2) << '\n';
    }
    if (!sweep.empty()) {
        auto f = open("sweep.csv");
        write_sweep_csv(sweep, f);
    }
}

} // namespace omepp

#endif // OMEPP_BENCH_HPP
