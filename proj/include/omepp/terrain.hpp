#ifndef OMEPP_TERRAIN_HPP
#define OMEPP_TERRAIN_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "omepp/error.hpp"

namespace omepp {

/// Row-major cell index, `row * ncols + col`.
class NodeId {
public:
    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t index) : index_(index) {}

    constexpr std::uint32_t index() const noexcept { return index_; }
    constexpr bool valid() const noexcept { return index_ != kInvalid; }

    friend constexpr auto operator<=>(NodeId, NodeId) = default;

private:
    static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t index_ = kInvalid;
};

/// The eight moves in canonical clockwise order starting north. The
/// underlying value doubles as the first-move symbol stored in path databases.
enum class Direction : std::uint8_t { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr std::size_t kNumDirections = 8;

inline constexpr std::array<Direction, kNumDirections> kAllDirections{
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

namespace detail {
inline constexpr std::array<int, kNumDirections> kRowOffset{-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr std::array<int, kNumDirections> kColOffset{0, 1, 1, 1, 0, -1, -1, -1};
} // namespace detail

constexpr int row_offset(Direction d) noexcept { return detail::kRowOffset[static_cast<std::size_t>(d)]; }
constexpr int col_offset(Direction d) noexcept { return detail::kColOffset[static_cast<std::size_t>(d)]; }
constexpr bool is_diagonal(Direction d) noexcept { return (static_cast<int>(d) & 1) != 0; }

constexpr std::string_view to_string(Direction d) noexcept {
    constexpr std::array<std::string_view, kNumDirections> names{"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
    return names[static_cast<std::size_t>(d)];
}

/// Elevation raster viewed as an 8-connected graph. Immutable after
/// construction; nodata cells are obstacles.
class TerrainGrid {
public:
    static constexpr double kDefaultNodata = -9999.0;

    TerrainGrid(std::size_t nrows, std::size_t ncols, double cellsize, std::vector<double> elevations,
                std::vector<std::uint8_t> nodata = {})
        : nrows_(nrows), ncols_(ncols), cellsize_(cellsize), elevations_(std::move(elevations)),
          nodata_(std::move(nodata)) {
        if (nrows_ < 2 || ncols_ < 2)
            throw Error("terrain grid needs at least 2 rows and 2 columns");
        if (nrows_ * ncols_ >= std::numeric_limits<std::uint32_t>::max())
            throw Error("terrain grid too large for 32-bit node ids");
        if (!(cellsize_ > 0.0) || !std::isfinite(cellsize_))
            throw Error("cellsize must be positive and finite");
        if (elevations_.size() != nrows_ * ncols_)
            throw Error("elevation count does not match nrows*ncols");
        if (nodata_.empty())
            nodata_.assign(elevations_.size(), 0);
        if (nodata_.size() != elevations_.size())
            throw Error("nodata mask size does not match nrows*ncols");
        for (std::size_t i = 0; i < elevations_.size(); ++i) {
            if (nodata_[i]) {
                elevations_[i] = nodata_value_;
                continue;
            }
            if (!std::isfinite(elevations_[i]))
                throw Error("non-finite elevation at cell " + std::to_string(i));
            ++valid_count_;
        }
    }

    std::size_t nrows() const noexcept { return nrows_; }
    std::size_t ncols() const noexcept { return ncols_; }
    std::size_t size() const noexcept { return elevations_.size(); }
    std::size_t valid_count() const noexcept { return valid_count_; }
    double cellsize() const noexcept { return cellsize_; }

    double xllcorner() const noexcept { return xllcorner_; }
    double yllcorner() const noexcept { return yllcorner_; }
    double nodata_value() const noexcept { return nodata_value_; }

    void set_georef(double xll, double yll, double nodata_value) {
        xllcorner_ = xll;
        yllcorner_ = yll;
        for (std::size_t i = 0; i < elevations_.size(); ++i)
            if (nodata_[i])
                elevations_[i] = nodata_value;
        nodata_value_ = nodata_value;
    }

    bool in_bounds(long row, long col) const noexcept {
        return row >= 0 && col >= 0 && row < static_cast<long>(nrows_) && col < static_cast<long>(ncols_);
    }

    NodeId node(std::size_t row, std::size_t col) const noexcept {
        return NodeId(static_cast<std::uint32_t>(row * ncols_ + col));
    }
    std::size_t row(NodeId v) const noexcept { return v.index() / ncols_; }
    std::size_t col(NodeId v) const noexcept { return v.index() % ncols_; }

    bool contains(NodeId v) const noexcept { return v.valid() && v.index() < size(); }
    bool traversable(NodeId v) const noexcept { return contains(v) && !nodata_[v.index()]; }
    bool is_nodata(std::size_t index) const noexcept { return nodata_[index] != 0; }

    double elevation(NodeId v) const noexcept { return elevations_[v.index()]; }
    const std::vector<double>& elevations() const noexcept { return elevations_; }
    const std::vector<std::uint8_t>& nodata_mask() const noexcept { return nodata_; }

    /// Neighbour of `v` in direction `d`, if it is on the grid and traversable.
    std::optional<NodeId> step(NodeId v, Direction d) const noexcept {
        const long r = static_cast<long>(row(v)) + row_offset(d);
        const long c = static_cast<long>(col(v)) + col_offset(d);
        if (!in_bounds(r, c))
            return std::nullopt;
        const NodeId w = node(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        if (nodata_[w.index()])
            return std::nullopt;
        return w;
    }

    /// Direction of the move v -> w, if the two cells are 8-adjacent.
    std::optional<Direction> direction_between(NodeId v, NodeId w) const noexcept {
        const long dr = static_cast<long>(row(w)) - static_cast<long>(row(v));
        const long dc = static_cast<long>(col(w)) - static_cast<long>(col(v));
        for (Direction d : kAllDirections)
            if (row_offset(d) == dr && col_offset(d) == dc)
                return d;
        return std::nullopt;
    }

    friend bool operator==(const TerrainGrid& a, const TerrainGrid& b) {
        return a.nrows_ == b.nrows_ && a.ncols_ == b.ncols_ && a.cellsize_ == b.cellsize_ &&
               a.xllcorner_ == b.xllcorner_ && a.yllcorner_ == b.yllcorner_ &&
               a.nodata_value_ == b.nodata_value_ && a.elevations_ == b.elevations_ && a.nodata_ == b.nodata_;
    }

private:
    std::size_t nrows_;
    std::size_t ncols_;
    double cellsize_;
    std::vector<double> elevations_;
    std::vector<std::uint8_t> nodata_;
    std::size_t valid_count_ = 0;
    double xllcorner_ = 0.0;
    double yllcorner_ = 0.0;
    double nodata_value_ = kDefaultNodata;
};

struct Neighbor {
    NodeId node;
    Direction dir;
};

/// Fixed-capacity list of up to eight neighbours, in canonical order.
class NeighborList {
public:
    void push_back(Neighbor n) noexcept { items_[size_++] = n; }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    const Neighbor& operator[](std::size_t i) const noexcept { return items_[i]; }
    const Neighbor* begin() const noexcept { return items_.data(); }
    const Neighbor* end() const noexcept { return items_.data() + size_; }

private:
    std::array<Neighbor, kNumDirections> items_{};
    std::size_t size_ = 0;
};

/// Traversable neighbours of `v` in N, NE, E, SE, S, SW, W, NW order.
inline NeighborList neighbors(const TerrainGrid& g, NodeId v) {
    NeighborList out;
    for (Direction d : kAllDirections)
        if (auto w = g.step(v, d))
            out.push_back({*w, d});
    return out;
}

struct EdgeGeometry {
    double s = 0.0;          ///< 3-D length in metres
    double theta = 0.0;      ///< signed slope in radians, positive uphill
    double delta_z = 0.0;    ///< z(to) - z(from)
    double horizontal = 0.0; ///< planar length in metres
};

inline double horizontal_length(const TerrainGrid& g, Direction d) noexcept {
    return is_diagonal(d) ? g.cellsize() * std::numbers::sqrt2 : g.cellsize();
}

inline EdgeGeometry edge_geometry(const TerrainGrid& g, NodeId from, Direction d, NodeId to) noexcept {
    EdgeGeometry e;
    e.horizontal = horizontal_length(g, d);
    e.delta_z = g.elevation(to) - g.elevation(from);
    e.s = std::hypot(e.horizontal, e.delta_z);
    e.theta = std::atan2(e.delta_z, e.horizontal);
    return e;
}

/// Geometry of the directed edge vi -> vj. Throws if the cells are not
/// adjacent or either one is an obstacle.
inline EdgeGeometry edge_geometry(const TerrainGrid& g, NodeId vi, NodeId vj) {
    if (!g.traversable(vi) || !g.traversable(vj))
        throw Error("edge endpoint is off-grid or nodata");
    const auto d = g.direction_between(vi, vj);
    if (!d)
        throw Error("cells " + std::to_string(vi.index()) + " and " + std::to_string(vj.index()) +
                    " are not adjacent");
    return edge_geometry(g, vi, *d, vj);
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid I/O

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

inline std::optional<double> parse_double(std::string_view tok) {
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        return std::nullopt;
    return value;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace detail

/// Parses an ESRI ASCII grid. Errors carry the offending line number.
inline TerrainGrid read_ascii_grid(std::istream& in) {
    std::map<std::string, double> header;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> nodata;
    bool in_data = false;
    std::size_t expected = 0;
    double nodata_value = TerrainGrid::kDefaultNodata;

    auto require = [&](std::initializer_list<const char*> keys) -> double {
        for (const char* k : keys)
            if (auto it = header.find(k); it != header.end())
                return it->second;
        throw ParseError(std::string("missing header key '") + *keys.begin() + "'", line_no);
    };

    auto begin_data = [&] {
        const double ncols = require({"ncols"});
        const double nrows = require({"nrows"});
        require({"xllcorner", "xllcenter"});
        require({"yllcorner", "yllcenter"});
        require({"cellsize"});
        if (ncols < 2 || nrows < 2 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
            throw ParseError("ncols and nrows must be integers >= 2", line_no);
        if (auto it = header.find("nodata_value"); it != header.end())
            nodata_value = it->second;
        expected = static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
        values.reserve(expected);
        nodata.reserve(expected);
        in_data = true;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = detail::split_ws(line);
        if (tokens.empty())
            continue;
        if (!in_data) {
            const bool is_key = !detail::parse_double(tokens[0]) &&
                                std::isalpha(static_cast<unsigned char>(tokens[0][0]));
            if (is_key) {
                if (tokens.size() != 2)
                    throw ParseError("header line must be '<key> <value>'", line_no);
                const std::string key = detail::lower(tokens[0]);
                const auto value = detail::parse_double(tokens[1]);
                if (!value)
                    throw ParseError("non-numeric header value '" + std::string(tokens[1]) + "'", line_no);
                if (!header.emplace(key, *value).second)
                    throw ParseError("duplicate header key '" + key + "'", line_no);
                continue;
            }
            begin_data();
        }
        for (auto tok : tokens) {
            const auto v = detail::parse_double(tok);
            if (!v)
                throw ParseError("non-numeric token '" + std::string(tok) + "'", line_no);
            if (values.size() == expected)
                throw ParseError("more than " + std::to_string(expected) + " elevation values", line_no);
            const bool missing = *v == nodata_value;
            values.push_back(missing ? 0.0 : *v);
            nodata.push_back(missing ? 1 : 0);
        }
    }
    if (!in_data)
        begin_data();
    if (values.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " elevation values, found " +
                             std::to_string(values.size()),
                         line_no);

    TerrainGrid grid(static_cast<std::size_t>(header["nrows"]), static_cast<std::size_t>(header["ncols"]),
                     header["cellsize"], std::move(values), std::move(nodata));
    const double xll = header.count("xllcorner") ? header["xllcorner"] : header["xllcenter"];
    const double yll = header.count("yllcorner") ? header["yllcorner"] : header["yllcenter"];
    grid.set_georef(xll, yll, nodata_value);
    return grid;
}

inline TerrainGrid load_ascii_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open terrain file '" + path + "'");
    return read_ascii_grid(in);
}

inline void write_ascii_grid(const TerrainGrid& g, std::ostream& out) {
    out << std::setprecision(17);
    out << "ncols " << g.ncols() << '\n'
        << "nrows " << g.nrows() << '\n'
        << "xllcorner " << g.xllcorner() << '\n'
        << "yllcorner " << g.yllcorner() << '\n'
        << "cellsize " << g.cellsize() << '\n'
        << "NODATA_value " << g.nodata_value() << '\n';
    for (std::size_t r = 0; r < g.nrows(); ++r) {
        for (std::size_t c = 0; c < g.ncols(); ++c) {
            if (c)
                out << ' ';
            out << g.elevation(g.node(r, c));
        }
        out << '\n';
    }
}

inline void save_ascii_grid(const TerrainGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write terrain file '" + path + "'");
    write_ascii_grid(g, out);
    if (!out)
        throw Error("failed writing terrain file '" + path + "'");
}

// ---------------------------------------------------------------------------
// Synthetic terrain

enum class TerrainStyle { flat, ramp, fbm };

inline std::optional<TerrainStyle> parse_terrain_style(std::string_view s) {
    if (s == "flat")
        return TerrainStyle::flat;
    if (s == "ramp")
        return TerrainStyle::ramp;
    if (s == "fbm")
        return TerrainStyle::fbm;
    return std::nullopt;
}

/// Rise per row of the `ramp` style, in metres.
inline constexpr double kRampRise = 0.25;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Lattice value in [-1, 1).
inline double lattice(std::uint64_t seed, int octave, long x, long y) noexcept {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(octave) + 0x51ed270b));
    h = splitmix64(h ^ static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4fULL);
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

constexpr double fade(double t) noexcept { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

inline double value_noise(std::uint64_t seed, int octave, double x, double y) noexcept {
    const double fx = std::floor(x), fy = std::floor(y);
    const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
    const double u = fade(x - fx), v = fade(y - fy);
    const double a = lattice(seed, octave, x0, y0), b = lattice(seed, octave, x0 + 1, y0);
    const double c = lattice(seed, octave, x0, y0 + 1), d = lattice(seed, octave, x0 + 1, y0 + 1);
    const double top = a + (b - a) * u;
    const double bottom = c + (d - c) * u;
    return top + (bottom - top) * v;
}

} // namespace detail

/// Parameters of the fractal relief. Wavelengths are in cells and do not
/// scale with the grid, so slope statistics are comparable across sizes.
struct FbmParams {
    double base_wavelength = 48.0;
    int octaves = 5;
    double gain = 0.5;
    double amplitude_m = 6.0;
};

/// Deterministic synthetic terrain with cellsize 1 m.
inline TerrainGrid gen_synthetic(std::size_t size, std::uint64_t seed, TerrainStyle style,
                                 const FbmParams& fbm = {}) {
    if (size < 2)
        throw Error("synthetic terrain size must be at least 2");
    std::vector<double> z(size * size, 0.0);
    switch (style) {
    case TerrainStyle::flat:
        break;
    case TerrainStyle::ramp:
        for (std::size_t r = 0; r < size; ++r)
            for (std::size_t c = 0; c < size; ++c)
                z[r * size + c] = static_cast<double>(r) * kRampRise;
        break;
    case TerrainStyle::fbm:
        for (std::size_t r = 0; r < size; ++r) {
            for (std::size_t c = 0; c < size; ++c) {
                double sum = 0.0, amp = 1.0, wavelength = fbm.base_wavelength;
                for (int o = 0; o < fbm.octaves; ++o) {
                    sum += amp * detail::value_noise(seed, o, static_cast<double>(c) / wavelength,
                                                     static_cast<double>(r) / wavelength);
                    amp *= fbm.gain;
                    wavelength *= 0.5;
                }
                z[r * size + c] = fbm.amplitude_m * sum;
            }
        }
        break;
    }
    return TerrainGrid(size, size, 1.0, std::move(z));
}

} // namespace omepp

template <>
struct std::hash<omepp::NodeId> {
    std::size_t operator()(omepp::NodeId v) const noexcept { return std::hash<std::uint32_t>{}(v.index()); }
};

#endif // OMEPP_TERRAIN_HPP
