#ifndef OMEPP_IO_HPP
#define OMEPP_IO_HPP

#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "omepp/energy.hpp"
#include "omepp/error.hpp"
#include "omepp/search.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

namespace detail {

inline double number_field(const json& j, const char* key) {
    if (!j.contains(key))
        throw ParseError(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number())
        throw ParseError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

} // namespace detail

/// {"mass_kg", "velocity_mps", "p_max_w", "mu", "mu_s", "g" (optional)}
inline RobotConfig robot_from_json(const json& j) {
    RobotConfig cfg;
    cfg.mass_kg = detail::number_field(j, "mass_kg");
    cfg.velocity_mps = detail::number_field(j, "velocity_mps");
    cfg.p_max_w = detail::number_field(j, "p_max_w");
    cfg.mu = detail::number_field(j, "mu");
    cfg.mu_s = detail::number_field(j, "mu_s");
    if (j.contains("g"))
        cfg.g = detail::number_field(j, "g");
    cfg.validate();
    return cfg;
}

inline json robot_to_json(const RobotConfig& cfg) {
    return {{"mass_kg", cfg.mass_kg}, {"velocity_mps", cfg.velocity_mps}, {"p_max_w", cfg.p_max_w},
            {"mu", cfg.mu},           {"mu_s", cfg.mu_s},                 {"g", cfg.g}};
}

inline RobotConfig load_robot(const std::string& path) { return robot_from_json(read_json_file(path)); }

inline json cell_to_json(const TerrainGrid& g, NodeId v) { return json::array({g.row(v), g.col(v)}); }

inline NodeId cell_from_json(const TerrainGrid& g, const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ParseError("cell must be a [row, col] pair of integers");
    const long r = j[0].get<long>(), c = j[1].get<long>();
    if (!g.in_bounds(r, c))
        throw ParseError("cell [" + std::to_string(r) + ", " + std::to_string(c) + "] is off the grid");
    return g.node(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

/// {"s":[r,c], "t":[r,c], "pickups":[[r,c],...], "rho_init":kg, "rho_obj":kg}
inline OmeppQuery query_from_json(const TerrainGrid& g, const json& j) {
    OmeppQuery q;
    if (!j.contains("s") || !j.contains("t") || !j.contains("pickups"))
        throw ParseError("query needs 's', 't' and 'pickups'");
    q.s = cell_from_json(g, j.at("s"));
    q.t = cell_from_json(g, j.at("t"));
    if (!j.at("pickups").is_array())
        throw ParseError("'pickups' must be an array");
    for (const auto& p : j.at("pickups"))
        q.pickups.push_back(cell_from_json(g, p));
    q.rho_init = detail::number_field(j, "rho_init");
    q.rho_obj = detail::number_field(j, "rho_obj");
    q.validate(g);
    return q;
}

inline json query_to_json(const TerrainGrid& g, const OmeppQuery& q) {
    json pickups = json::array();
    for (NodeId p : q.pickups)
        pickups.push_back(cell_to_json(g, p));
    return {{"s", cell_to_json(g, q.s)},
            {"t", cell_to_json(g, q.t)},
            {"pickups", pickups},
            {"rho_init", q.rho_init},
            {"rho_obj", q.rho_obj}};
}

inline json solution_to_json(const TerrainGrid& g, const std::optional<OmeppSolution>& sol, std::string_view algorithm,
                             double wall_time_ms) {
    json out{{"algorithm", algorithm}, {"found", sol.has_value()}, {"wall_time_ms", wall_time_ms}};
    if (!sol)
        return out;
    json path = json::array();
    for (NodeId v : sol->path.nodes)
        path.push_back(cell_to_json(g, v));
    out["pickup"] = cell_to_json(g, sol->pickup);
    out["pickup_index"] = sol->pickup_index;
    out["path"] = path;
    out["leg1_energy_j"] = sol->leg1_energy;
    out["leg2_energy_j"] = sol->leg2_energy;
    out["total_energy_j"] = sol->total_energy();
    out["expansions"] = sol->stats.expansions;
    out["generated"] = sol->stats.generated;
    out["successor_histogram"] = sol->stats.successor_histogram;
    out["max_branch"] = sol->stats.max_branch;
    return out;
}

} // namespace omepp

#endif // OMEPP_IO_HPP
