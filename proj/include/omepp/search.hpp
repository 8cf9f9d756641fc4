#ifndef OMEPP_SEARCH_HPP
#define OMEPP_SEARCH_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <thread>
#include <vector>

#include "omepp/energy.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

/// A node sequence with its energy. A query with source == target yields the
/// single-node path {source} at 0 J.
struct EnergyPath {
    std::vector<NodeId> nodes;
    double energy = 0.0;
};

/// p ⊕ q: concatenation of two paths sharing the junction node.
inline EnergyPath join(const EnergyPath& a, const EnergyPath& b) {
    if (a.nodes.empty())
        return b;
    if (b.nodes.empty())
        return a;
    if (a.nodes.back() != b.nodes.front())
        throw Error("cannot join paths with different endpoints");
    EnergyPath out = a;
    out.nodes.insert(out.nodes.end(), b.nodes.begin() + 1, b.nodes.end());
    out.energy = a.energy + b.energy;
    return out;
}

/// Counters reported by every solver.
struct SolveStats {
    std::size_t expansions = 0;
    std::size_t generated = 0;
    /// Number of expansions producing 0..4 combined successors (concurrent solver only).
    std::array<std::size_t, 5> successor_histogram{};
    std::size_t max_branch = 0;
    /// Largest successor count seen while one side already sat on its goal.
    std::size_t max_branch_one_side_done = 0;
};

namespace detail {

// Best-first entry. Order: smaller f, then larger g, then smaller node id.
struct OpenEntry {
    double f;
    double g;
    std::uint32_t node;
};

struct WorseEntry {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const noexcept {
        if (a.f != b.f)
            return a.f > b.f;
        if (a.g != b.g)
            return a.g < b.g;
        return a.node > b.node;
    }
};

using OpenList = std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseEntry>;

// Per-node labels reset lazily with a generation stamp so repeated searches
// on one grid avoid O(V) clears.
class SearchWorkspace {
public:
    explicit SearchWorkspace(std::size_t n) : g_(n), parent_(n), stamp_(n, 0), closed_(n, 0) {}

    void reset() {
        if (++generation_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            generation_ = 1;
        }
        open_ = OpenList{};
    }

    double g(std::uint32_t v) const noexcept { return stamp_[v] == generation_ ? g_[v] : kInfeasible; }
    bool closed(std::uint32_t v) const noexcept { return stamp_[v] == generation_ && closed_[v]; }
    std::uint32_t parent(std::uint32_t v) const noexcept { return parent_[v]; }

    void set(std::uint32_t v, double g, std::uint32_t parent) noexcept {
        stamp_[v] = generation_;
        g_[v] = g;
        parent_[v] = parent;
        closed_[v] = 0;
    }
    void close(std::uint32_t v) noexcept { closed_[v] = 1; }

    OpenList& open() noexcept { return open_; }

    std::vector<NodeId> trace(std::uint32_t source, std::uint32_t target) const {
        std::vector<NodeId> nodes{NodeId(target)};
        for (std::uint32_t v = target; v != source;) {
            v = parent_[v];
            nodes.push_back(NodeId(v));
        }
        std::reverse(nodes.begin(), nodes.end());
        return nodes;
    }

private:
    std::vector<double> g_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint8_t> closed_;
    std::uint32_t generation_ = 0;
    OpenList open_;
};

// Best-first search with reopening on strictly smaller g. `heuristic(v)`
// returning 0 gives Dijkstra.
template <class Heuristic>
std::optional<EnergyPath> best_first(const PayloadCosts& costs, NodeId source, NodeId target, Heuristic&& heuristic,
                                     SearchWorkspace& ws, SolveStats* stats) {
    const TerrainGrid& grid = costs.model().grid();
    if (!grid.traversable(source) || !grid.traversable(target))
        throw Error("search endpoint is off-grid or nodata");
    ws.reset();
    auto& open = ws.open();
    ws.set(source.index(), 0.0, source.index());
    open.push({heuristic(source), 0.0, source.index()});
    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        const std::uint32_t v = top.node;
        if (top.g != ws.g(v) || ws.closed(v))
            continue;
        if (v == target.index()) {
            EnergyPath path;
            path.nodes = ws.trace(source.index(), v);
            path.energy = top.g;
            return path;
        }
        ws.close(v);
        if (stats)
            ++stats->expansions;
        for (Direction d : kAllDirections) {
            const double c = costs.cost(NodeId(v), d);
            if (!feasible(c))
                continue;
            const std::uint32_t w = static_cast<std::uint32_t>(
                static_cast<long>(v) + row_offset(d) * static_cast<long>(grid.ncols()) + col_offset(d));
            const double ng = top.g + c;
            if (ng < ws.g(w)) {
                ws.set(w, ng, v);
                open.push({ng + heuristic(NodeId(w)), ng, w});
                if (stats)
                    ++stats->generated;
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Exact minimum-energy path at the payload of `costs`, or nullopt when the
/// target cannot be reached under the slope limit.
inline std::optional<EnergyPath> dijkstra_energy(const PayloadCosts& costs, NodeId source, NodeId target,
                                                 SolveStats* stats = nullptr) {
    detail::SearchWorkspace ws(costs.model().grid().size());
    return detail::best_first(costs, source, target, [](NodeId) { return 0.0; }, ws, stats);
}

inline std::optional<EnergyPath> dijkstra_energy(const TerrainGrid& g, const RobotConfig& cfg, double rho,
                                                 NodeId source, NodeId target) {
    const EdgeCostModel model(g, cfg);
    return dijkstra_energy(model.at(rho), source, target);
}

/// Single-source minimum energies; `parent[v] == v` marks the source and
/// unreached nodes keep the invalid id.
struct DistanceMap {
    NodeId source;
    std::vector<double> dist;
    std::vector<NodeId> parent;

    bool reachable(NodeId v) const noexcept { return feasible(dist[v.index()]); }

    std::optional<EnergyPath> path_to(NodeId v) const {
        if (!reachable(v))
            return std::nullopt;
        EnergyPath p;
        p.energy = dist[v.index()];
        for (NodeId u = v;; u = parent[u.index()]) {
            p.nodes.push_back(u);
            if (u == source)
                break;
        }
        std::reverse(p.nodes.begin(), p.nodes.end());
        return p;
    }
};

inline DistanceMap dijkstra_energy_all(const PayloadCosts& costs, NodeId source) {
    const TerrainGrid& grid = costs.model().grid();
    if (!grid.traversable(source))
        throw Error("search source is off-grid or nodata");
    DistanceMap out;
    out.source = source;
    out.dist.assign(grid.size(), kInfeasible);
    out.parent.assign(grid.size(), NodeId{});
    std::vector<std::uint8_t> settled(grid.size(), 0);
    detail::OpenList open;
    out.dist[source.index()] = 0.0;
    out.parent[source.index()] = source;
    open.push({0.0, 0.0, source.index()});
    while (!open.empty()) {
        const auto top = open.top();
        open.pop();
        const std::uint32_t v = top.node;
        if (settled[v] || top.g != out.dist[v])
            continue;
        settled[v] = 1;
        for (Direction d : kAllDirections) {
            const double c = costs.cost(NodeId(v), d);
            if (!feasible(c))
                continue;
            const auto w = *grid.step(NodeId(v), d);
            const double ng = top.g + c;
            if (ng < out.dist[w.index()]) {
                out.dist[w.index()] = ng;
                out.parent[w.index()] = NodeId(v);
                open.push({ng, ng, w.index()});
            }
        }
    }
    return out;
}

/// Z*: A* over energy with the payload-aware straight-line heuristic.
class ZStar {
public:
    explicit ZStar(const TerrainGrid& g) : ws_(g.size()) {}

    std::optional<EnergyPath> search(const PayloadCosts& costs, NodeId s, NodeId t, SolveStats* stats = nullptr) {
        return detail::best_first(costs, s, t, [&](NodeId v) { return costs.heuristic(v, t); }, ws_, stats);
    }

private:
    detail::SearchWorkspace ws_;
};

inline std::optional<EnergyPath> zstar(const PayloadCosts& costs, NodeId s, NodeId t, SolveStats* stats = nullptr) {
    ZStar z(costs.model().grid());
    return z.search(costs, s, t, stats);
}

inline std::optional<EnergyPath> zstar(const TerrainGrid& g, const RobotConfig& cfg, double rho, NodeId s, NodeId t) {
    const EdgeCostModel model(g, cfg);
    return zstar(model.at(rho), s, t);
}

// ---------------------------------------------------------------------------
// OMEPP

struct OmeppQuery {
    NodeId s;
    NodeId t;
    std::vector<NodeId> pickups;
    double rho_init = 0.0;
    double rho_obj = 0.0;

    double rho_total() const noexcept { return rho_init + rho_obj; }

    void validate(const TerrainGrid& g) const {
        if (!g.traversable(s) || !g.traversable(t))
            throw Error("query start/target must be traversable cells");
        if (pickups.empty())
            throw Error("query needs at least one pickup point");
        for (NodeId p : pickups)
            if (!g.traversable(p))
                throw Error("pickup " + std::to_string(p.index()) + " is not a traversable cell");
        if (!(rho_init >= 0.0) || !(rho_obj >= 0.0))
            throw Error("payloads must be non-negative");
    }
};

struct OmeppSolution {
    NodeId pickup;
    std::size_t pickup_index = 0;
    EnergyPath path; ///< full s -> pickup -> t sequence
    double leg1_energy = 0.0;
    double leg2_energy = 0.0;
    SolveStats stats;

    double total_energy() const noexcept { return leg1_energy + leg2_energy; }
};

struct BaselineOptions {
    /// Worker threads for the per-pickup searches; the reduction is always in
    /// pickup order, so results do not depend on this.
    unsigned threads = 1;
};

namespace detail {

struct PickupLegs {
    std::optional<EnergyPath> leg1;
    std::optional<EnergyPath> leg2;
    SolveStats stats;
};

inline PickupLegs baseline_legs(ZStar& z, const PayloadCosts& first, const PayloadCosts& second,
                                const OmeppQuery& q, NodeId p) {
    PickupLegs out;
    out.leg1 = z.search(first, q.s, p, &out.stats);
    if (out.leg1)
        out.leg2 = z.search(second, p, q.t, &out.stats);
    return out;
}

} // namespace detail

/// Exact OMEPP solver: two Z* searches per pickup, keep the cheapest sum.
/// Pickups unreachable on either leg are skipped; nullopt if none remain.
inline std::optional<OmeppSolution> solve_baseline(const EdgeCostModel& model, const OmeppQuery& q,
                                                   const BaselineOptions& opts = {}) {
    const TerrainGrid& grid = model.grid();
    q.validate(grid);
    const PayloadCosts first = model.at(q.rho_init);
    const PayloadCosts second = model.at(q.rho_total());

    std::vector<detail::PickupLegs> legs(q.pickups.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(q.pickups.size())));
    if (threads == 1) {
        ZStar z(grid);
        for (std::size_t i = 0; i < q.pickups.size(); ++i)
            legs[i] = detail::baseline_legs(z, first, second, q, q.pickups[i]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                ZStar z(grid);
                for (std::size_t i = w; i < q.pickups.size(); i += threads)
                    legs[i] = detail::baseline_legs(z, first, second, q, q.pickups[i]);
            });
        }
        for (auto& th : pool)
            th.join();
    }

    std::optional<OmeppSolution> best;
    SolveStats total;
    double best_energy = kInfeasible;
    for (std::size_t i = 0; i < legs.size(); ++i) {
        total.expansions += legs[i].stats.expansions;
        total.generated += legs[i].stats.generated;
        if (!legs[i].leg1 || !legs[i].leg2)
            continue;
        const double e = legs[i].leg1->energy + legs[i].leg2->energy;
        if (e < best_energy) {
            best_energy = e;
            OmeppSolution sol;
            sol.pickup = q.pickups[i];
            sol.pickup_index = i;
            sol.path = join(*legs[i].leg1, *legs[i].leg2);
            sol.leg1_energy = legs[i].leg1->energy;
            sol.leg2_energy = legs[i].leg2->energy;
            best = std::move(sol);
        }
    }
    if (best)
        best->stats = total;
    return best;
}

/// (found - optimal) / optimal. An optimum of 0 gives 0 when found is also
/// 0 and +infinity otherwise.
inline double suboptimality(double found, double optimal) noexcept {
    if (optimal == 0.0)
        return found == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (found - optimal) / optimal;
}

} // namespace omepp

#endif // OMEPP_SEARCH_HPP
