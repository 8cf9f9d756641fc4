#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"

using namespace omepp;

namespace {

const RobotConfig kHusky = husky_a300();

BenchConfig small_bench(std::size_t queries, std::size_t pickups) {
    BenchConfig b;
    b.num_queries = queries;
    b.num_pickups = pickups;
    b.repeats = 3;
    b.seed = 7;
    return b;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(TrimmedMean, DropsExtremes) {
    EXPECT_DOUBLE_EQ(trimmed_mean({1.0, 2.0, 3.0, 100.0}), 2.5);
    EXPECT_DOUBLE_EQ(trimmed_mean({5.0, 1.0, 9.0}), 5.0);
    EXPECT_THROW(trimmed_mean({1.0, 2.0}), Error);
    EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(BenchConfig, RepeatsBelowThreeRejected) {
    BenchConfig b;
    b.repeats = 2;
    EXPECT_THROW(b.validate(), Error);
}

TEST(GenQueries, DeterministicWithDistinctScreenedPickups) {
    const TerrainGrid g = gen_synthetic(32, 42, TerrainStyle::fbm);
    const EdgeCostModel model(g, kHusky);
    BenchConfig b = small_bench(12, 50);
    b.payload = PayloadMode::fixed(4.0, 20.0);
    const auto a = gen_queries(model, b);
    const auto c = gen_queries(model, b);
    ASSERT_EQ(a.size(), 12u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].s, c[i].s);
        EXPECT_EQ(a[i].t, c[i].t);
        EXPECT_EQ(a[i].pickups, c[i].pickups);
        EXPECT_EQ(a[i].rho_init, 4.0);
        EXPECT_EQ(a[i].rho_obj, 20.0);
        ASSERT_EQ(a[i].pickups.size(), 50u);
        EXPECT_EQ(std::set<NodeId>(a[i].pickups.begin(), a[i].pickups.end()).size(), 50u);
        // every pickup is a genuine candidate per the independent oracle
        const auto from_s = oracle::energies_from(g, kHusky, a[i].rho_init, a[i].s);
        for (NodeId p : a[i].pickups) {
            EXPECT_TRUE(g.traversable(p));
            EXPECT_TRUE(feasible(from_s[p.index()]));
            EXPECT_TRUE(feasible(oracle::energies_from(g, kHusky, a[i].rho_total(), p)[a[i].t.index()]));
        }
        EXPECT_TRUE(feasible(oracle::energies_from(g, kHusky, a[i].rho_total(), a[i].s)[a[i].t.index()]));
    }
    b.seed = 8;
    EXPECT_NE(gen_queries(model, b)[0].pickups, a[0].pickups);
}

TEST(GenQueries, RandomPayloadsStayInRange) {
    const TerrainGrid g = gen_synthetic(24, 3, TerrainStyle::fbm);
    const EdgeCostModel model(g, kHusky);
    BenchConfig b = small_bench(20, 5);
    b.payload = PayloadMode::random(0.0, 30.0, 5.0, 25.0);
    for (const auto& q : gen_queries(model, b)) {
        EXPECT_GE(q.rho_init, 0.0);
        EXPECT_LE(q.rho_init, 30.0);
        EXPECT_GE(q.rho_obj, 5.0);
        EXPECT_LE(q.rho_obj, 25.0);
    }
}

TEST(GenQueries, DisconnectedTerrainFails) {
    // only cells with even row and column survive: no two are adjacent
    std::vector<std::uint8_t> mask(100, 1);
    for (int r = 0; r < 10; r += 2)
        for (int c = 0; c < 10; c += 2)
            mask[r * 10 + c] = 0;
    const TerrainGrid g(10, 10, 1.0, std::vector<double>(100, 0.0), mask);
    const EdgeCostModel model(g, kHusky);
    BenchConfig b = small_bench(3, 5);
    b.retries_per_query = 20;
    EXPECT_THROW(gen_queries(model, b), Error);
    b.num_pickups = 40;
    EXPECT_THROW(gen_queries(model, b), Error);
}

TEST(RunBench, RecordsPairedRuns) {
    const TerrainGrid g = gen_synthetic(24, 42, TerrainStyle::fbm);
    const EdgeCostModel model(g, kHusky);
    const Pcpd pcpd = build_pcpd(model, default_buckets());
    BenchConfig b = small_bench(6, 8);
    const BenchResult res = run_bench(model, pcpd, b);
    ASSERT_EQ(res.records.size(), 12u);
    for (std::size_t i = 0; i < res.records.size(); i += 2) {
        const BenchRecord& base = res.records[i];
        const BenchRecord& conc = res.records[i + 1];
        EXPECT_EQ(base.algorithm, kBaselineName);
        EXPECT_EQ(conc.algorithm, kConcurrentName);
        EXPECT_EQ(base.query_id, conc.query_id);
        EXPECT_EQ(base.pickups, 8u);
        EXPECT_TRUE(base.found());
        EXPECT_EQ(base.subopt, 0.0);
        if (conc.found())
            EXPECT_GE(conc.subopt, -1e-12);
        EXPECT_LE(conc.max_branch, 4u);
        EXPECT_LE(conc.max_branch_goal_side, 2u);
        EXPECT_GT(base.runtime_ms, 0.0);
    }
    ASSERT_EQ(res.summary.size(), 2u);
    EXPECT_TRUE(res.sweep.empty());
}

TEST(RunBench, FlatSweepIsExact) {
    const TerrainGrid g = gen_synthetic(16, 0, TerrainStyle::flat);
    const EdgeCostModel model(g, kHusky);
    const Pcpd pcpd = build_pcpd(model, default_buckets());
    BenchConfig b = small_bench(4, 5);
    b.sweep_pickups = {5, 10};
    const BenchResult res = run_bench(model, pcpd, b);
    for (const BenchRecord& r : res.records) {
        EXPECT_TRUE(r.found());
        EXPECT_LE(r.subopt, 1e-12);
    }
    ASSERT_EQ(res.sweep.size(), 4u);
    EXPECT_EQ(res.sweep[0].pickups, 5u);
    EXPECT_EQ(res.sweep[2].pickups, 10u);
    for (const SweepRow& row : res.sweep)
        EXPECT_LE(row.mean_subopt, 1e-12);
}

TEST(Report, EmptyRecordsGiveHeaderOnlyCsv) {
    const auto dir = std::filesystem::path(::testing::TempDir()) / "omepp_empty_report";
    emit_report({}, dir.string());
    EXPECT_EQ(read_file(dir / "results.csv"), std::string(kResultsHeader) + "\n");
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
}

TEST(Report, CsvRoundTripAndSummaryArithmetic) {
    std::vector<BenchRecord> records;
    for (std::size_t q = 0; q < 3; ++q) {
        BenchRecord b{q, kBaselineName, 4.0, 20.0, 50, 10.0 + q, 1000.0 + q, 0.0, 100 + q, 0, 0};
        BenchRecord c{q, kConcurrentName, 4.0, 20.0, 50, 0.5 * (q + 1), 1000.0 + 2 * q, 0.0, 10 + q, 4, 2};
        c.subopt = suboptimality(c.energy_j, b.energy_j);
        records.push_back(b);
        records.push_back(c);
    }
    const auto dir = std::filesystem::path(::testing::TempDir()) / "omepp_report";
    emit_report(records, dir.string());

    std::ifstream csv(dir / "results.csv");
    const auto back = read_results_csv(csv);
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].query_id, records[i].query_id);
        EXPECT_EQ(back[i].algorithm, records[i].algorithm);
        EXPECT_EQ(back[i].rho_init, records[i].rho_init);
        EXPECT_EQ(back[i].rho_obj, records[i].rho_obj);
        EXPECT_EQ(back[i].pickups, records[i].pickups);
        EXPECT_EQ(back[i].runtime_ms, records[i].runtime_ms);
        EXPECT_EQ(back[i].energy_j, records[i].energy_j);
        EXPECT_EQ(back[i].subopt, records[i].subopt);
        EXPECT_EQ(back[i].expansions, records[i].expansions);
        EXPECT_EQ(back[i].max_branch, records[i].max_branch);
    }

    const json summary = read_json_file((dir / "summary.json").string());
    const auto& algs = summary.at("algorithms");
    ASSERT_EQ(algs.size(), 2u);
    EXPECT_EQ(algs[0].at("algorithm"), kBaselineName);
    EXPECT_DOUBLE_EQ(algs[0].at("mean_runtime_ms").get<double>(), (10.0 + 11.0 + 12.0) / 3.0);
    EXPECT_DOUBLE_EQ(algs[1].at("mean_runtime_ms").get<double>(), (0.5 + 1.0 + 1.5) / 3.0);
    EXPECT_DOUBLE_EQ(algs[1].at("mean_subopt").get<double>(), (0.0 + 1.0 / 1001.0 + 2.0 / 1002.0) / 3.0);
    EXPECT_EQ(summary.at("rho_init"), 4.0);
}

TEST(Report, CsvParserRejectsGarbage) {
    std::istringstream bad_header("a,b\n");
    EXPECT_THROW(read_results_csv(bad_header), ParseError);
    std::istringstream short_row(std::string(kResultsHeader) + "\n1,baseline,2\n");
    EXPECT_THROW(read_results_csv(short_row), ParseError);
    std::istringstream bad_number(std::string(kResultsHeader) + "\nx,baseline,0,0,1,1,1,0,1,0\n");
    EXPECT_THROW(read_results_csv(bad_number), ParseError);
}
