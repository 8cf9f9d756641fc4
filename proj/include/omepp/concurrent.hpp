#ifndef OMEPP_CONCURRENT_HPP
#define OMEPP_CONCURRENT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "omepp/energy.hpp"
#include "omepp/pcpd.hpp"
#include "omepp/search.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

/// State of one child search: frontier `v_i` of the s -> p leg (payload
/// rho_init) and `v_j` of the p -> t leg (payload rho_init + rho_obj).
struct PairSearchNode {
    static constexpr std::uint32_t kNoParent = 0xffffffffu;

    NodeId v_i;
    NodeId v_j;
    double g_i = 0.0;
    double g_j = 0.0;
    double f = 0.0;
    std::uint32_t parent = kNoParent;
};

/// Global-queue entry: a pickup keyed by the best f of its child queue.
struct GlobalEntry {
    std::uint32_t pickup;
    double f;
};

/// Candidate moves of one side of a pair node.
struct SideMoves {
    struct Move {
        NodeId to;
        double cost;
    };
    bool at_goal = false;
    std::array<Move, 2> moves{};
    std::size_t count = 0;
};

/// PCPD-guided moves of one leg toward `goal` at the payload of `costs`.
/// Each of the two bracketing buckets proposes its first move; proposals
/// that are unreachable or over the true payload's slope limit are dropped,
/// and equal proposals collapse into one.
inline SideMoves pcpd_side_moves(const Pcpd& pcpd, std::pair<std::size_t, std::size_t> bracket,
                                 const PayloadCosts& costs, NodeId v, NodeId goal) {
    SideMoves out;
    if (v == goal) {
        out.at_goal = true;
        return out;
    }
    const TerrainGrid& grid = costs.model().grid();
    auto propose = [&](std::size_t bucket) {
        const MoveSymbol m = pcpd.cpd(bucket).first_move(v, goal);
        if (m >= kNumDirections)
            return;
        const auto d = static_cast<Direction>(m);
        const double c = costs.cost(v, d);
        if (!feasible(c))
            return;
        const NodeId w = *grid.step(v, d);
        for (std::size_t k = 0; k < out.count; ++k)
            if (out.moves[k].to == w)
                return;
        out.moves[out.count++] = {w, c};
    };
    propose(bracket.first);
    if (bracket.second != bracket.first)
        propose(bracket.second);
    return out;
}

namespace detail {

// Query-scoped context shared by successor generation and the main loop.
struct PairContext {
    const Pcpd* pcpd;
    NodeId pickup;
    NodeId target;
    PayloadCosts first;  // rho_init
    PayloadCosts second; // rho_init + rho_obj
    std::pair<std::size_t, std::size_t> first_bracket;
    std::pair<std::size_t, std::size_t> second_bracket;

    double f_of(NodeId vi, double gi, NodeId vj, double gj) const noexcept {
        return gi + first.heuristic(vi, pickup) + gj + second.heuristic(vj, target);
    }

    // Cross product of the two sides' moves; a side on its goal stays put.
    std::size_t successors(const PairSearchNode& n, std::uint32_t self, std::array<PairSearchNode, 4>& out) const {
        const SideMoves a = pcpd_side_moves(*pcpd, first_bracket, first, n.v_i, pickup);
        const SideMoves b = pcpd_side_moves(*pcpd, second_bracket, second, n.v_j, target);
        std::array<SideMoves::Move, 2> stay_a{{{n.v_i, 0.0}}}, stay_b{{{n.v_j, 0.0}}};
        const auto* ma = a.at_goal ? stay_a.data() : a.moves.data();
        const auto* mb = b.at_goal ? stay_b.data() : b.moves.data();
        const std::size_t na = a.at_goal ? 1 : a.count;
        const std::size_t nb = b.at_goal ? 1 : b.count;
        std::size_t k = 0;
        for (std::size_t x = 0; x < na; ++x) {
            for (std::size_t y = 0; y < nb; ++y) {
                PairSearchNode s;
                s.v_i = ma[x].to;
                s.v_j = mb[y].to;
                s.g_i = n.g_i + ma[x].cost;
                s.g_j = n.g_j + mb[y].cost;
                s.f = f_of(s.v_i, s.g_i, s.v_j, s.g_j);
                s.parent = self;
                out[k++] = s;
            }
        }
        return k;
    }
};

} // namespace detail

/// Two-level concurrent search over all pickups, guided by a PCPD.
///
/// A global queue orders pickups by the best f of their child queues; each
/// child queue advances both legs of one pickup at once, branching only on
/// the first moves the two bracketing buckets suggest (at most 2 per side,
/// 4 per node). The first goal node popped is returned; it is near-optimal
/// but not guaranteed optimal.
///
/// Child-queue states are pruned per (v_i, v_j) pair: a successor survives
/// only if it strictly lowers g_i + g_j for its pair.
class ConcurrentSolver {
public:
    ConcurrentSolver(const EdgeCostModel& model, const Pcpd& pcpd) : model_(&model), pcpd_(&pcpd) {
        const TerrainGrid& g = model.grid();
        if (pcpd.nrows() != g.nrows() || pcpd.ncols() != g.ncols())
            throw FormatError("PCPD grid shape does not match terrain");
        pcpd.check_grid(g);
    }

    std::optional<OmeppSolution> solve(const OmeppQuery& q) const {
        const TerrainGrid& grid = model_->grid();
        q.validate(grid);
        const auto first_bracket = pcpd_->bracket(q.rho_init);
        const auto second_bracket = pcpd_->bracket(q.rho_total());
        const PayloadCosts first = model_->at(q.rho_init);
        const PayloadCosts second = model_->at(q.rho_total());

        struct ChildEntry {
            double f;
            double g;
            std::uint32_t node;
        };
        struct WorseChild {
            bool operator()(const ChildEntry& a, const ChildEntry& b) const noexcept {
                if (a.f != b.f)
                    return a.f > b.f;
                if (a.g != b.g)
                    return a.g < b.g;
                return a.node > b.node;
            }
        };
        struct WorseGlobal {
            bool operator()(const GlobalEntry& a, const GlobalEntry& b) const noexcept {
                return a.f != b.f ? a.f > b.f : a.pickup > b.pickup;
            }
        };
        struct Child {
            detail::PairContext ctx;
            std::priority_queue<ChildEntry, std::vector<ChildEntry>, WorseChild> open;
            std::unordered_map<std::uint64_t, double> best;
        };

        std::vector<PairSearchNode> arena;
        std::vector<Child> children;
        children.reserve(q.pickups.size());
        std::priority_queue<GlobalEntry, std::vector<GlobalEntry>, WorseGlobal> global;
        SolveStats stats;

        auto key = [](NodeId a, NodeId b) {
            return (static_cast<std::uint64_t>(a.index()) << 32) | b.index();
        };
        auto push = [&](Child& c, const PairSearchNode& n) {
            auto [it, fresh] = c.best.try_emplace(key(n.v_i, n.v_j), n.g_i + n.g_j);
            if (!fresh) {
                if (!(n.g_i + n.g_j < it->second))
                    return;
                it->second = n.g_i + n.g_j;
            }
            arena.push_back(n);
            c.open.push({n.f, n.g_i + n.g_j, static_cast<std::uint32_t>(arena.size() - 1)});
            ++stats.generated;
        };
        // Drops child-queue tops superseded by a cheaper copy of the same pair.
        auto clean = [&](Child& c) {
            while (!c.open.empty()) {
                const PairSearchNode& n = arena[c.open.top().node];
                if (n.g_i + n.g_j == c.best[key(n.v_i, n.v_j)])
                    return;
                c.open.pop();
            }
        };

        for (std::size_t i = 0; i < q.pickups.size(); ++i) {
            const NodeId p = q.pickups[i];
            children.push_back(Child{detail::PairContext{pcpd_, p, q.t, first, second, first_bracket, second_bracket},
                                     {}, {}});
            PairSearchNode root;
            root.v_i = q.s;
            root.v_j = p;
            root.f = first.heuristic(q.s, p) + second.heuristic(p, q.t);
            push(children.back(), root);
            global.push({static_cast<std::uint32_t>(i), root.f});
        }

        std::array<PairSearchNode, 4> succ;
        while (!global.empty()) {
            const GlobalEntry top = global.top();
            global.pop();
            Child& child = children[top.pickup];
            clean(child);
            if (child.open.empty())
                continue;
            if (child.open.top().f != top.f) {
                global.push({top.pickup, child.open.top().f});
                continue;
            }
            const std::uint32_t idx = child.open.top().node;
            child.open.pop();
            const PairSearchNode node = arena[idx];
            const NodeId p = q.pickups[top.pickup];
            if (node.v_i == p && node.v_j == q.t)
                return reconstruct(arena, idx, top.pickup, q, stats);

            ++stats.expansions;
            const std::size_t n = child.ctx.successors(node, idx, succ);
            ++stats.successor_histogram[n];
            stats.max_branch = std::max(stats.max_branch, n);
            if (node.v_i == p || node.v_j == q.t)
                stats.max_branch_one_side_done = std::max(stats.max_branch_one_side_done, n);
            for (std::size_t k = 0; k < n; ++k)
                push(child, succ[k]);
            clean(child);
            if (!child.open.empty())
                global.push({top.pickup, child.open.top().f});
        }
        return std::nullopt;
    }

private:
    static OmeppSolution reconstruct(const std::vector<PairSearchNode>& arena, std::uint32_t goal,
                                     std::uint32_t pickup_index, const OmeppQuery& q, const SolveStats& stats) {
        std::vector<NodeId> leg1, leg2;
        for (std::uint32_t i = goal; i != PairSearchNode::kNoParent; i = arena[i].parent) {
            if (leg1.empty() || leg1.back() != arena[i].v_i)
                leg1.push_back(arena[i].v_i);
            if (leg2.empty() || leg2.back() != arena[i].v_j)
                leg2.push_back(arena[i].v_j);
        }
        std::reverse(leg1.begin(), leg1.end());
        std::reverse(leg2.begin(), leg2.end());
        OmeppSolution sol;
        sol.pickup = q.pickups[pickup_index];
        sol.pickup_index = pickup_index;
        sol.leg1_energy = arena[goal].g_i;
        sol.leg2_energy = arena[goal].g_j;
        sol.path = join(EnergyPath{std::move(leg1), sol.leg1_energy}, EnergyPath{std::move(leg2), sol.leg2_energy});
        sol.stats = stats;
        return sol;
    }

    const EdgeCostModel* model_;
    const Pcpd* pcpd_;
};

inline std::optional<OmeppSolution> solve_concurrent(const EdgeCostModel& model, const Pcpd& pcpd,
                                                     const OmeppQuery& q) {
    return ConcurrentSolver(model, pcpd).solve(q);
}

/// Successors of `node` in the child search of pickup `p`: the cross
/// product of each side's PCPD moves, with g and f extended at each side's
/// true payload. At most 4, at most 2 once a side sits on its goal.
inline std::vector<PairSearchNode> generate_successors(const Pcpd& pcpd, const EdgeCostModel& model,
                                                       const PairSearchNode& node, NodeId p, NodeId t, double rho_init,
                                                       double rho_obj) {
    const detail::PairContext ctx{&pcpd,
                                  p,
                                  t,
                                  model.at(rho_init),
                                  model.at(rho_init + rho_obj),
                                  pcpd.bracket(rho_init),
                                  pcpd.bracket(rho_init + rho_obj)};
    std::array<PairSearchNode, 4> buf;
    const std::size_t n = ctx.successors(node, PairSearchNode::kNoParent, buf);
    return {buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n)};
}

} // namespace omepp

#endif // OMEPP_CONCURRENT_HPP
