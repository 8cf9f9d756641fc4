#ifndef OMEPP_ENERGY_HPP
#define OMEPP_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "omepp/error.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

inline constexpr double kStandardGravity = 9.80665;

/// Energy of an untraversable edge or path.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline bool feasible(double energy) noexcept { return energy < kInfeasible; }

struct RobotConfig {
    double mass_kg = 0.0;
    double velocity_mps = 0.0;
    double p_max_w = 0.0;
    double mu = 0.0;
    double mu_s = 0.0;
    double g = kStandardGravity;

    void validate() const {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(mass_kg) || !positive(velocity_mps) || !positive(p_max_w) || !positive(mu) ||
            !positive(mu_s) || !positive(g))
            throw Error("robot parameters must be positive and finite");
        if (mu_s < mu)
            throw Error("static friction mu_s must be >= dynamic friction mu");
    }

    double max_traction_force() const noexcept { return p_max_w / velocity_mps; }
};

/// Husky A300-like platform used throughout the experiments.
inline RobotConfig husky_a300() { return RobotConfig{80.0, 1.0, 819.2, 0.5, 1.0, kStandardGravity}; }

/// Slope bounds in radians. Uphill edges steeper than `phi_gamma` are
/// impassable; downhill edges steeper than `phi_c` need braking and cost 0.
struct SlopeLimits {
    double phi_f = 0.0;
    double phi_s = 0.0;
    double phi_gamma = 0.0;
    double phi_c = 0.0;
};

inline SlopeLimits slope_limits(const RobotConfig& cfg, double rho) {
    SlopeLimits out;
    const double friction_angle = std::atan(cfg.mu);
    const double ratio = cfg.max_traction_force() / ((rho + cfg.mass_kg) * cfg.g * std::sqrt(cfg.mu * cfg.mu + 1.0));
    out.phi_f = ratio <= 1.0 ? std::asin(ratio) - friction_angle : std::numbers::pi / 2.0 - friction_angle;
    out.phi_s = std::atan(cfg.mu_s - cfg.mu);
    out.phi_gamma = std::min(out.phi_f, out.phi_s);
    out.phi_c = friction_angle;
    return out;
}

/// (rho + m) g: the force scale shared by every energy term.
inline double load_weight(const RobotConfig& cfg, double rho) noexcept { return (rho + cfg.mass_kg) * cfg.g; }

/// s (mu cos theta + sin theta), floored at 0 against rounding at theta = -phi_c.
inline double unit_work(const RobotConfig& cfg, const EdgeGeometry& e) noexcept {
    return std::max(0.0, e.s * (cfg.mu * std::cos(e.theta) + std::sin(e.theta)));
}

inline double edge_energy(const RobotConfig& cfg, double rho, const EdgeGeometry& e, const SlopeLimits& lim) noexcept {
    if (e.theta > lim.phi_gamma)
        return kInfeasible;
    if (e.theta < -lim.phi_c)
        return 0.0;
    return load_weight(cfg, rho) * unit_work(cfg, e);
}

namespace detail {

struct HeuristicTerms {
    double weight;
    double mu;
    double phi_gamma;
    double phi_c;
    double zigzag_factor; // (mu cos phi_gamma + sin phi_gamma) / sin phi_gamma

    HeuristicTerms(const RobotConfig& cfg, double rho, const SlopeLimits& lim)
        : weight(load_weight(cfg, rho)), mu(cfg.mu), phi_gamma(lim.phi_gamma), phi_c(lim.phi_c),
          zigzag_factor(lim.phi_gamma > 0.0
                            ? (cfg.mu * std::cos(lim.phi_gamma) + std::sin(lim.phi_gamma)) / std::sin(lim.phi_gamma)
                            : kInfeasible) {}

    // Straight-line estimate for a planar offset `h` and rise `dz`.
    double operator()(double h, double dz) const noexcept {
        if (h == 0.0 && dz == 0.0)
            return 0.0;
        const double theta = std::atan2(dz, h);
        if (theta > phi_gamma) {
            const double climb = std::max(0.0, dz);
            if (climb == 0.0)
                return 0.0;
            return weight * climb * zigzag_factor;
        }
        if (theta < -phi_c)
            return 0.0;
        // s (mu cos theta + sin theta) == mu h + dz on the straight segment.
        return weight * std::max(0.0, mu * h + dz);
    }
};

inline double planar_distance(const TerrainGrid& g, NodeId a, NodeId b) noexcept {
    const double dr = static_cast<double>(g.row(a)) - static_cast<double>(g.row(b));
    const double dc = static_cast<double>(g.col(a)) - static_cast<double>(g.col(b));
    return g.cellsize() * std::hypot(dr, dc);
}

} // namespace detail

/// Payload-aware lower bound on the energy from `from` to `to`, using the
/// virtual straight line between the two cells. Over-limit climbs are
/// estimated by a zigzag at the steepest permitted slope.
inline double heuristic_energy(const RobotConfig& cfg, double rho, NodeId from, NodeId to, const TerrainGrid& g,
                               const SlopeLimits& lim) {
    if (from == to)
        return 0.0;
    const detail::HeuristicTerms terms(cfg, rho, lim);
    return terms(detail::planar_distance(g, from, to), g.elevation(to) - g.elevation(from));
}

/// Energy of a node sequence at payload `rho`; kInfeasible if any edge is
/// over the slope limit. Throws on non-adjacent consecutive nodes.
inline double path_energy(const RobotConfig& cfg, double rho, std::span<const NodeId> path, const TerrainGrid& g) {
    const SlopeLimits lim = slope_limits(cfg, rho);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double e = edge_energy(cfg, rho, edge_geometry(g, path[i], path[i + 1]), lim);
        if (!feasible(e))
            return kInfeasible;
        total += e;
    }
    return total;
}

class EdgeCostModel;

/// Edge costs and heuristic of an EdgeCostModel at one payload. Cheap to
/// copy; borrows the model.
class PayloadCosts {
public:
    double rho() const noexcept { return rho_; }
    const SlopeLimits& limits() const noexcept { return limits_; }
    const EdgeCostModel& model() const noexcept { return *model_; }

    /// Energy of the edge leaving `v` in direction `d`; kInfeasible when the
    /// edge is missing or too steep.
    inline double cost(NodeId v, Direction d) const noexcept;
    /// cost() divided by (rho + m) g: payload-independent wherever the
    /// edge stays feasible, so it ranks paths identically to cost().
    inline double work(NodeId v, Direction d) const noexcept;
    inline double heuristic(NodeId from, NodeId to) const noexcept;

private:
    friend class EdgeCostModel;
    PayloadCosts(const EdgeCostModel& m, double rho, const RobotConfig& cfg)
        : model_(&m), rho_(rho), limits_(slope_limits(cfg, rho)), weight_(load_weight(cfg, rho)),
          heuristic_(cfg, rho, limits_) {}

    const EdgeCostModel* model_;
    double rho_;
    SlopeLimits limits_;
    double weight_;
    detail::HeuristicTerms heuristic_;
};

/// Per-edge slope and payload-independent work term, precomputed once per
/// (grid, robot). Immutable; shareable across threads.
class EdgeCostModel {
public:
    EdgeCostModel(const TerrainGrid& g, const RobotConfig& cfg) : grid_(&g), cfg_(cfg) {
        cfg_.validate();
        slots_.resize(g.size() * kNumDirections, Slot{kInfeasible, 0.0});
        for (std::uint32_t i = 0; i < g.size(); ++i) {
            const NodeId v(i);
            if (!g.traversable(v))
                continue;
            for (Direction d : kAllDirections) {
                if (auto w = g.step(v, d)) {
                    const EdgeGeometry e = edge_geometry(g, v, d, *w);
                    slots_[slot(v, d)] = Slot{e.theta, unit_work(cfg_, e)};
                }
            }
        }
    }

    const TerrainGrid& grid() const noexcept { return *grid_; }
    const RobotConfig& robot() const noexcept { return cfg_; }

    PayloadCosts at(double rho) const { return PayloadCosts(*this, rho, cfg_); }

private:
    friend class PayloadCosts;
    struct Slot {
        double theta; // +inf for a missing edge, so it is never feasible
        double work;
    };
    static std::size_t slot(NodeId v, Direction d) noexcept {
        return static_cast<std::size_t>(v.index()) * kNumDirections + static_cast<std::size_t>(d);
    }

    const TerrainGrid* grid_;
    RobotConfig cfg_;
    std::vector<Slot> slots_;
};

inline double PayloadCosts::cost(NodeId v, Direction d) const noexcept {
    const auto& s = model_->slots_[EdgeCostModel::slot(v, d)];
    if (s.theta > limits_.phi_gamma)
        return kInfeasible;
    if (s.theta < -limits_.phi_c)
        return 0.0;
    return weight_ * s.work;
}

inline double PayloadCosts::work(NodeId v, Direction d) const noexcept {
    const auto& s = model_->slots_[EdgeCostModel::slot(v, d)];
    if (s.theta > limits_.phi_gamma)
        return kInfeasible;
    if (s.theta < -limits_.phi_c)
        return 0.0;
    return s.work;
}

inline double PayloadCosts::heuristic(NodeId from, NodeId to) const noexcept {
    if (from == to)
        return 0.0;
    const TerrainGrid& g = model_->grid();
    return heuristic_(detail::planar_distance(g, from, to), g.elevation(to) - g.elevation(from));
}

} // namespace omepp

#endif // OMEPP_ENERGY_HPP
