#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace omepp;

namespace {

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

EdgeGeometry geom(double theta_deg, double horizontal = 1.0) {
    EdgeGeometry e;
    e.horizontal = horizontal;
    e.theta = rad(theta_deg);
    e.delta_z = horizontal * std::tan(e.theta);
    e.s = std::hypot(horizontal, e.delta_z);
    return e;
}

} // namespace

TEST(SlopeLimits, UnloadedHusky) {
    const SlopeLimits lim = slope_limits(husky_a300(), 0.0);
    // independent evaluation of the traction limit
    const double F = 819.2 / 1.0;
    const double expected_f = std::asin(F / (80.0 * 9.80665 * std::sqrt(1.25))) - std::atan(0.5);
    EXPECT_NEAR(lim.phi_f, expected_f, 1e-15);
    EXPECT_NEAR(deg(lim.phi_f), 42.494, 0.001);
    EXPECT_NEAR(deg(lim.phi_s), 26.565, 0.001);
    EXPECT_EQ(lim.phi_gamma, lim.phi_s);
    EXPECT_DOUBLE_EQ(lim.phi_c, std::atan(0.5));
}

TEST(SlopeLimits, SeventyKilograms) {
    const SlopeLimits lim = slope_limits(husky_a300(), 70.0);
    EXPECT_NEAR(deg(lim.phi_f), 3.30, 0.01);
    EXPECT_EQ(lim.phi_gamma, lim.phi_f);
}

TEST(SlopeLimits, EqualFrictionBlocksClimbing) {
    RobotConfig cfg = husky_a300();
    cfg.mu_s = cfg.mu;
    const SlopeLimits lim = slope_limits(cfg, 0.0);
    EXPECT_EQ(lim.phi_s, 0.0);
    EXPECT_EQ(lim.phi_gamma, 0.0);
}

TEST(SlopeLimits, TractionClampWhenArgumentExceedsOne) {
    RobotConfig cfg = husky_a300();
    cfg.p_max_w = 1e6;
    const SlopeLimits lim = slope_limits(cfg, 0.0);
    EXPECT_DOUBLE_EQ(lim.phi_f, std::numbers::pi / 2.0 - std::atan(0.5));
}

TEST(SlopeLimits, TractionLimitDecreasesWithPayload) {
    const RobotConfig cfg = husky_a300();
    double prev = slope_limits(cfg, 0.0).phi_f;
    for (double rho = 1.0; rho <= 200.0; rho += 1.0) {
        const double cur = slope_limits(cfg, rho).phi_f;
        EXPECT_LT(cur, prev) << rho;
        prev = cur;
    }
}

TEST(RobotConfig, Validation) {
    RobotConfig cfg = husky_a300();
    EXPECT_NO_THROW(cfg.validate());
    cfg.mu_s = 0.4;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = husky_a300();
    cfg.mass_kg = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(EdgeEnergy, Examples) {
    const RobotConfig cfg = husky_a300();
    const SlopeLimits lim = slope_limits(cfg, 0.0);
    EXPECT_NEAR(edge_energy(cfg, 0.0, geom(0.0), lim), 392.266, 1e-9);
    EXPECT_FALSE(feasible(edge_energy(cfg, 0.0, geom(30.0), lim)));
    EXPECT_EQ(edge_energy(cfg, 0.0, geom(-30.0), lim), 0.0);
}

TEST(EdgeEnergy, MatchesFormulaInsideTheBand) {
    const RobotConfig cfg = husky_a300();
    const SlopeLimits lim = slope_limits(cfg, 12.0);
    for (double th = -26.0; th <= deg(lim.phi_gamma); th += 0.5) {
        const EdgeGeometry e = geom(th, std::numbers::sqrt2);
        const double expected = 92.0 * 9.80665 * e.s * (0.5 * std::cos(e.theta) + std::sin(e.theta));
        EXPECT_NEAR(edge_energy(cfg, 12.0, e, lim), expected, 1e-9 * std::max(1.0, expected));
    }
}

TEST(EdgeEnergy, StrictlyIncreasingInPayload) {
    const RobotConfig cfg = husky_a300();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const double lo = std::uniform_real_distribution<double>(0, 60)(rng);
        const double hi = lo + std::uniform_real_distribution<double>(0.5, 10)(rng);
        const double phi = slope_limits(cfg, hi).phi_gamma;
        const double th = std::uniform_real_distribution<double>(-deg(std::atan(0.5)) + 1e-6, deg(phi))(rng);
        const EdgeGeometry e = geom(th);
        EXPECT_LT(edge_energy(cfg, lo, e, slope_limits(cfg, lo)), edge_energy(cfg, hi, e, slope_limits(cfg, hi)));
    }
}

TEST(EdgeEnergy, FeasibilityIsMonotoneAndEnergyNonNegative) {
    const RobotConfig cfg = husky_a300();
    for (double th = -89.0; th <= 89.0; th += 0.25) {
        bool was_feasible = true;
        for (double rho = 0.0; rho <= 100.0; rho += 2.5) {
            const double e = edge_energy(cfg, rho, geom(th), slope_limits(cfg, rho));
            if (feasible(e))
                EXPECT_GE(e, 0.0);
            if (!was_feasible)
                EXPECT_FALSE(feasible(e)) << th << " " << rho;
            was_feasible = feasible(e);
        }
    }
}

TEST(Heuristic, ZeroForSameCell) {
    const TerrainGrid g = gen_synthetic(8, 1, TerrainStyle::fbm);
    const RobotConfig cfg = husky_a300();
    EXPECT_EQ(heuristic_energy(cfg, 10.0, g.node(3, 3), g.node(3, 3), g, slope_limits(cfg, 10.0)), 0.0);
}

TEST(Heuristic, FlatTenMetres) {
    const TerrainGrid g = gen_synthetic(12, 0, TerrainStyle::flat);
    const RobotConfig cfg = husky_a300();
    EXPECT_NEAR(heuristic_energy(cfg, 0.0, g.node(0, 0), g.node(0, 10), g, slope_limits(cfg, 0.0)), 3922.66, 1e-9);
}

TEST(Heuristic, SteepDescentIsFree) {
    // target 10 m below, 5 m away: straight-line slope well past -atan(mu)
    std::vector<double> z(36, 0.0);
    z[5] = -10.0;
    const TerrainGrid g(6, 6, 1.0, z);
    const RobotConfig cfg = husky_a300();
    EXPECT_EQ(heuristic_energy(cfg, 0.0, g.node(0, 0), g.node(0, 5), g, slope_limits(cfg, 0.0)), 0.0);
}

TEST(Heuristic, ZigzagCaseUsesClimbAtSteepestSlope) {
    std::vector<double> z(36, 0.0);
    z[2] = 4.0; // 4 m up over 2 m: ~63 deg
    const TerrainGrid g(6, 6, 1.0, z);
    const RobotConfig cfg = husky_a300();
    const SlopeLimits lim = slope_limits(cfg, 0.0);
    const double expected =
        80.0 * cfg.g * (4.0 / std::sin(lim.phi_gamma)) * (0.5 * std::cos(lim.phi_gamma) + std::sin(lim.phi_gamma));
    EXPECT_NEAR(heuristic_energy(cfg, 0.0, g.node(0, 0), g.node(0, 2), g, lim), expected, 1e-9 * expected);
}

TEST(Heuristic, CostModelAgreesWithFreeFunction) {
    const TerrainGrid g = gen_synthetic(16, 2, TerrainStyle::fbm);
    const RobotConfig cfg = husky_a300();
    const EdgeCostModel model(g, cfg);
    for (double rho : {0.0, 17.5, 55.0}) {
        const PayloadCosts costs = model.at(rho);
        const SlopeLimits lim = slope_limits(cfg, rho);
        for (std::uint32_t a = 0; a < g.size(); a += 7)
            for (std::uint32_t b = 0; b < g.size(); b += 5)
                EXPECT_EQ(costs.heuristic(NodeId(a), NodeId(b)),
                          heuristic_energy(cfg, rho, NodeId(a), NodeId(b), g, lim));
        for (std::uint32_t v = 0; v < g.size(); ++v)
            for (const auto& n : neighbors(g, NodeId(v)))
                EXPECT_EQ(costs.cost(NodeId(v), n.dir),
                          edge_energy(cfg, rho, edge_geometry(g, NodeId(v), n.node), lim));
    }
}

TEST(Heuristic, AdmissibleOutsideZigzagCase) {
    const TerrainGrid g = gen_synthetic(24, 11, TerrainStyle::fbm);
    const RobotConfig cfg = husky_a300();
    for (double rho : {0.0, 30.0, 60.0}) {
        const SlopeLimits lim = slope_limits(cfg, rho);
        for (std::uint32_t s = 0; s < g.size(); s += 37) {
            const auto dist = oracle::energies_from(g, cfg, rho, NodeId(s));
            for (std::uint32_t t = 0; t < g.size(); ++t) {
                if (!feasible(dist[t]))
                    continue;
                const double h = heuristic_energy(cfg, rho, NodeId(s), NodeId(t), g, lim);
                EXPECT_GE(h, 0.0);
                const double horiz = std::hypot(double(g.row(NodeId(s))) - double(g.row(NodeId(t))),
                                                double(g.col(NodeId(s))) - double(g.col(NodeId(t))));
                const double theta = std::atan2(g.elevation(NodeId(t)) - g.elevation(NodeId(s)), horiz);
                if (theta <= lim.phi_gamma)
                    EXPECT_LE(h, dist[t] * (1 + 1e-12)) << s << "->" << t << " rho " << rho;
            }
        }
    }
}

TEST(PathEnergy, Examples) {
    const RobotConfig cfg = husky_a300();
    const TerrainGrid flat = gen_synthetic(4, 0, TerrainStyle::flat);
    const std::vector<NodeId> one{flat.node(1, 1)};
    EXPECT_EQ(path_energy(cfg, 0.0, one, flat), 0.0);
    const std::vector<NodeId> two{flat.node(0, 0), flat.node(0, 1), flat.node(0, 2)};
    EXPECT_NEAR(path_energy(cfg, 0.0, two, flat), 784.532, 1e-9);

    std::vector<double> z(16, 0.0);
    z[2] = 1.0; // 45 deg step
    const TerrainGrid steep(4, 4, 1.0, z);
    const std::vector<NodeId> climb{steep.node(0, 0), steep.node(0, 1), steep.node(0, 2)};
    EXPECT_FALSE(feasible(path_energy(cfg, 0.0, climb, steep)));

    const std::vector<NodeId> jump{flat.node(0, 0), flat.node(0, 2)};
    EXPECT_THROW(path_energy(cfg, 0.0, jump, flat), Error);
}
