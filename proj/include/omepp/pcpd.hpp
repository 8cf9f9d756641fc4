#ifndef OMEPP_PCPD_HPP
#define OMEPP_PCPD_HPP

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "omepp/energy.hpp"
#include "omepp/error.hpp"
#include "omepp/fingerprint.hpp"
#include "omepp/rle.hpp"
#include "omepp/search.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

/// First-move symbol: a Direction value 0..7, or one of the sentinels below.
using MoveSymbol = std::uint8_t;

inline constexpr MoveSymbol kWildcard = 8;
inline constexpr MoveSymbol kUnreachable = 9;

using MoveRun = RleRun<MoveSymbol>;

/// Column order shared by every row of every bucket.
struct DfsOrder {
    std::vector<NodeId> order;
    /// 1-based column of each cell; 0 for nodata cells.
    std::vector<std::uint32_t> position;

    std::uint32_t column(NodeId v) const noexcept { return position[v.index()]; }
    std::size_t size() const noexcept { return order.size(); }

    friend bool operator==(const DfsOrder&, const DfsOrder&) = default;
};

/// Preorder DFS from `root` visiting neighbours in canonical N..NW order.
/// Cells not connected to the root follow, each further component walked
/// from its smallest NodeId.
inline DfsOrder dfs_preorder(const TerrainGrid& g, NodeId root) {
    if (!g.traversable(root))
        throw Error("DFS root must be a traversable cell");
    DfsOrder out;
    out.position.assign(g.size(), 0);
    out.order.reserve(g.valid_count());

    struct Frame {
        NodeId v;
        std::uint8_t next_dir;
    };
    std::vector<Frame> stack;
    auto walk = [&](NodeId start) {
        out.order.push_back(start);
        out.position[start.index()] = static_cast<std::uint32_t>(out.order.size());
        stack.push_back({start, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next_dir == kNumDirections) {
                stack.pop_back();
                continue;
            }
            const auto d = static_cast<Direction>(f.next_dir++);
            const auto w = g.step(f.v, d);
            if (!w || out.position[w->index()] != 0)
                continue;
            out.order.push_back(*w);
            out.position[w->index()] = static_cast<std::uint32_t>(out.order.size());
            stack.push_back({*w, 0});
        }
    };
    walk(root);
    for (std::uint32_t i = 0; i < g.size(); ++i)
        if (g.traversable(NodeId(i)) && out.position[i] == 0)
            walk(NodeId(i));
    return out;
}

inline NodeId first_valid_cell(const TerrainGrid& g) {
    for (std::uint32_t i = 0; i < g.size(); ++i)
        if (g.traversable(NodeId(i)))
            return NodeId(i);
    throw Error("terrain has no traversable cell");
}

inline DfsOrder dfs_preorder(const TerrainGrid& g) { return dfs_preorder(g, first_valid_cell(g)); }

/// Uncompressed first moves of one source, in DFS column order.
struct FirstMoveRow {
    NodeId source;
    std::vector<MoveSymbol> moves;
};

namespace detail {

// Energy Dijkstra recording the first move of the chosen optimal path to
// each cell. Runs on payload-free work so that buckets with the same
// feasible edges produce identical rows. On equal cost the smaller
// first-move index wins.
class FirstMoveSearch {
public:
    explicit FirstMoveSearch(std::size_t n) : dist_(n), first_(n), settled_(n) {}

    void run(const PayloadCosts& costs, NodeId source) {
        const TerrainGrid& grid = costs.model().grid();
        const long ncols = static_cast<long>(grid.ncols());
        std::fill(dist_.begin(), dist_.end(), kInfeasible);
        std::fill(first_.begin(), first_.end(), kUnreachable);
        std::fill(settled_.begin(), settled_.end(), 0);
        heap_.clear();
        const std::uint32_t src = source.index();
        dist_[src] = 0.0;
        first_[src] = kWildcard;
        push(0.0, src);
        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), Later{});
            const auto [g, v] = heap_.back();
            heap_.pop_back();
            if (settled_[v] || g != dist_[v])
                continue;
            settled_[v] = 1;
            for (Direction d : kAllDirections) {
                const double c = costs.work(NodeId(v), d);
                if (!feasible(c))
                    continue;
                const auto w = static_cast<std::uint32_t>(static_cast<long>(v) + row_offset(d) * ncols + col_offset(d));
                if (settled_[w])
                    continue;
                const double ng = g + c;
                const MoveSymbol fm = v == src ? static_cast<MoveSymbol>(d) : first_[v];
                if (ng < dist_[w]) {
                    dist_[w] = ng;
                    first_[w] = fm;
                    push(ng, w);
                } else if (ng == dist_[w] && fm < first_[w]) {
                    first_[w] = fm;
                }
            }
        }
    }

    const std::vector<double>& dist() const noexcept { return dist_; }
    const std::vector<MoveSymbol>& first() const noexcept { return first_; }

private:
    struct Item {
        double g;
        std::uint32_t v;
    };
    struct Later {
        bool operator()(const Item& a, const Item& b) const noexcept {
            return a.g != b.g ? a.g > b.g : a.v > b.v;
        }
    };
    void push(double g, std::uint32_t v) {
        heap_.push_back({g, v});
        std::push_heap(heap_.begin(), heap_.end(), Later{});
    }

    std::vector<double> dist_;
    std::vector<MoveSymbol> first_;
    std::vector<std::uint8_t> settled_;
    std::vector<Item> heap_;
};

inline void fill_row(const FirstMoveSearch& search, const DfsOrder& order, NodeId source,
                     std::vector<MoveSymbol>& moves) {
    moves.resize(order.size());
    const auto& first = search.first();
    for (std::size_t i = 0; i < order.size(); ++i) {
        const NodeId t = order.order[i];
        moves[i] = t == source ? kWildcard : first[t.index()];
    }
}

} // namespace detail

/// First moves of minimum-energy paths from `source` at the payload of
/// `costs`, restricted to edges within that payload's slope limit.
inline FirstMoveRow build_row(const PayloadCosts& costs, const DfsOrder& order, NodeId source) {
    const TerrainGrid& grid = costs.model().grid();
    if (!grid.traversable(source))
        throw Error("row source must be a traversable cell");
    detail::FirstMoveSearch search(grid.size());
    search.run(costs, source);
    FirstMoveRow row{source, {}};
    detail::fill_row(search, order, source, row.moves);
    return row;
}

inline std::vector<MoveRun> rle_compress(const FirstMoveRow& row) {
    return rle_compress<MoveSymbol>(row.moves, kWildcard);
}

inline FirstMoveRow rle_decompress(std::span<const MoveRun> runs, const DfsOrder& order, NodeId source) {
    return {source, rle_decompress<MoveSymbol>(runs, order.size(), order.column(source) - 1, kWildcard)};
}

/// Compressed first-move table for one payload bucket.
class Cpd {
public:
    Cpd(double rho, std::shared_ptr<const DfsOrder> order, std::vector<std::uint32_t> row_begin,
        std::vector<MoveRun> runs)
        : rho_(rho), order_(std::move(order)), row_begin_(std::move(row_begin)), runs_(std::move(runs)) {}

    double rho() const noexcept { return rho_; }
    const DfsOrder& order() const noexcept { return *order_; }
    std::shared_ptr<const DfsOrder> shared_order() const noexcept { return order_; }
    std::size_t num_cells() const noexcept { return row_begin_.size() - 1; }
    std::size_t total_runs() const noexcept { return runs_.size(); }

    std::span<const MoveRun> row(NodeId s) const noexcept {
        return {runs_.data() + row_begin_[s.index()], runs_.data() + row_begin_[s.index() + 1]};
    }

    /// Raw symbol for the pair; s must differ from t.
    MoveSymbol first_move(NodeId s, NodeId t) const noexcept {
        const std::uint32_t col = order_->column(t);
        if (col == 0)
            return kUnreachable;
        const auto runs = row(s);
        if (runs.empty())
            return kUnreachable;
        return rle_lookup<MoveSymbol>(runs, col);
    }

    friend bool operator==(const Cpd& a, const Cpd& b) {
        return a.rho_ == b.rho_ && *a.order_ == *b.order_ && a.row_begin_ == b.row_begin_ && a.runs_ == b.runs_;
    }

private:
    double rho_;
    std::shared_ptr<const DfsOrder> order_;
    std::vector<std::uint32_t> row_begin_; // size num_cells + 1
    std::vector<MoveRun> runs_;
};

/// Next cell on the bucket's optimal path from s toward t, or nullopt when
/// t is unreachable in this bucket. Throws for s == t.
inline std::optional<NodeId> cpd_lookup(const Cpd& cpd, const TerrainGrid& g, NodeId s, NodeId t) {
    if (s == t)
        throw Error("cpd_lookup: source equals target");
    const MoveSymbol m = cpd.first_move(s, t);
    if (m >= kNumDirections)
        return std::nullopt;
    return g.step(s, static_cast<Direction>(m));
}

/// Follows first moves from s to t, pricing each edge at the payload of
/// `costs`. nullopt if the bucket cannot reach t or an edge is infeasible at
/// that payload.
inline std::optional<EnergyPath> extract_path(const Cpd& cpd, const PayloadCosts& costs, NodeId s, NodeId t) {
    const TerrainGrid& g = costs.model().grid();
    EnergyPath path{{s}, 0.0};
    NodeId v = s;
    for (std::size_t steps = 0; v != t; ++steps) {
        if (steps > g.size())
            throw Error("first-move chain does not terminate");
        const MoveSymbol m = cpd.first_move(v, t);
        if (m >= kNumDirections)
            return std::nullopt;
        const auto d = static_cast<Direction>(m);
        const double c = costs.cost(v, d);
        if (!feasible(c))
            return std::nullopt;
        v = *g.step(v, d);
        path.nodes.push_back(v);
        path.energy += c;
    }
    return path;
}

/// Builds one bucket with `threads` workers. Rows are independent, so the
/// output does not depend on the worker count.
inline Cpd build_cpd(const EdgeCostModel& model, std::shared_ptr<const DfsOrder> order, double rho,
                     unsigned threads = 1) {
    const TerrainGrid& grid = model.grid();
    const PayloadCosts costs = model.at(rho);
    std::vector<std::vector<MoveRun>> rows(grid.size());
    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        detail::FirstMoveSearch search(grid.size());
        std::vector<MoveSymbol> moves;
        for (std::uint32_t i = next++; i < grid.size(); i = next++) {
            if (!grid.traversable(NodeId(i)))
                continue;
            search.run(costs, NodeId(i));
            detail::fill_row(search, *order, NodeId(i), moves);
            rows[i] = rle_compress<MoveSymbol>(moves, kWildcard);
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    std::vector<std::uint32_t> row_begin(grid.size() + 1, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        row_begin[i] = static_cast<std::uint32_t>(total);
        total += rows[i].size();
    }
    row_begin.back() = static_cast<std::uint32_t>(total);
    std::vector<MoveRun> runs;
    runs.reserve(total);
    for (auto& r : rows)
        runs.insert(runs.end(), r.begin(), r.end());
    return Cpd(rho, std::move(order), std::move(row_begin), std::move(runs));
}

/// One CPD per payload bucket, tied to a terrain by fingerprint.
class Pcpd {
public:
    Pcpd(std::vector<Cpd> cpds, Fingerprint fp, std::size_t nrows, std::size_t ncols)
        : cpds_(std::move(cpds)), fingerprint_(fp), nrows_(nrows), ncols_(ncols) {
        if (cpds_.empty())
            throw Error("PCPD needs at least one bucket");
        for (std::size_t i = 1; i < cpds_.size(); ++i)
            if (!(cpds_[i - 1].rho() < cpds_[i].rho()))
                throw Error("PCPD buckets must be strictly ascending");
    }

    std::size_t num_buckets() const noexcept { return cpds_.size(); }
    const Cpd& cpd(std::size_t i) const noexcept { return cpds_[i]; }
    const std::vector<Cpd>& cpds() const noexcept { return cpds_; }
    const Fingerprint& fingerprint() const noexcept { return fingerprint_; }
    std::size_t nrows() const noexcept { return nrows_; }
    std::size_t ncols() const noexcept { return ncols_; }
    const DfsOrder& order() const noexcept { return cpds_.front().order(); }

    std::vector<double> buckets() const {
        std::vector<double> out;
        for (const auto& c : cpds_)
            out.push_back(c.rho());
        return out;
    }
    double min_rho() const noexcept { return cpds_.front().rho(); }
    double max_rho() const noexcept { return cpds_.back().rho(); }

    /// Indices of the largest bucket <= rho and the smallest bucket >= rho.
    /// Both are the same bucket when rho sits exactly on one.
    std::pair<std::size_t, std::size_t> bracket(double rho) const {
        if (!(rho >= min_rho() && rho <= max_rho()))
            throw Error("payload " + std::to_string(rho) + " kg outside PCPD bucket range [" +
                        std::to_string(min_rho()) + ", " + std::to_string(max_rho()) + "]");
        std::size_t lo = 0;
        while (lo + 1 < cpds_.size() && cpds_[lo + 1].rho() <= rho)
            ++lo;
        const std::size_t hi = cpds_[lo].rho() == rho ? lo : lo + 1;
        return {lo, hi};
    }

    void check_grid(const TerrainGrid& g) const {
        const Fingerprint fp = omepp::fingerprint(g);
        if (fp != fingerprint_)
            throw FormatError("PCPD fingerprint " + to_hex(fingerprint_) + " does not match terrain " + to_hex(fp));
    }

    friend bool operator==(const Pcpd& a, const Pcpd& b) {
        return a.fingerprint_ == b.fingerprint_ && a.nrows_ == b.nrows_ && a.ncols_ == b.ncols_ && a.cpds_ == b.cpds_;
    }

private:
    std::vector<Cpd> cpds_;
    Fingerprint fingerprint_;
    std::size_t nrows_;
    std::size_t ncols_;
};

/// Payload buckets `first, first+step, ..., last`.
inline std::vector<double> bucket_range(double first, double last, double step) {
    if (!(step > 0.0) || last < first)
        throw Error("bucket range needs step > 0 and last >= first");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = first + step * i;
        if (v > last + 1e-9 * step)
            break;
        out.push_back(v);
    }
    return out;
}

/// Default buckets: 0, 10, ..., 70 kg.
inline std::vector<double> default_buckets() { return bucket_range(0.0, 70.0, 10.0); }

/// Called after each bucket with its index and build time in seconds.
using BucketCallback = std::function<void(std::size_t, double)>;

inline Pcpd build_pcpd(const EdgeCostModel& model, const std::vector<double>& buckets, unsigned threads = 1,
                       const BucketCallback& on_bucket = {}) {
    const TerrainGrid& grid = model.grid();
    auto order = std::make_shared<const DfsOrder>(dfs_preorder(grid));
    std::vector<Cpd> cpds;
    cpds.reserve(buckets.size());
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        cpds.push_back(build_cpd(model, order, buckets[i], threads));
        if (on_bucket)
            on_bucket(i, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return Pcpd(std::move(cpds), fingerprint(grid), grid.nrows(), grid.ncols());
}

// ---------------------------------------------------------------------------
// Binary format (little-endian)
//
//   "PCPD" u32 version, u8[32] fingerprint, u32 bucket_count,
//   bucket_count x { f64 rho, u64 table_pos },
//   u32 nrows, u32 ncols, u32 order_len, u32 order[order_len],
//   then per bucket at table_pos:
//     u32 row_count, u64 row_pos[row_count] (0 for nodata sources),
//     rows: u32 run_count, run_count x { u32 start, u8 symbol }

inline constexpr std::uint32_t kPcpdVersion = 1;

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    void patch_u64(std::size_t at, std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf_[at + static_cast<std::size_t>(i)] = static_cast<char>(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::size_t size() const noexcept { return buf_.size(); }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void bytes(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    void seek(std::uint64_t pos) {
        if (pos > data_.size())
            throw FormatError("PCPD file truncated: offset " + std::to_string(pos) + " beyond end");
        pos_ = static_cast<std::size_t>(pos);
    }
    std::size_t pos() const noexcept { return pos_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n)
            throw FormatError("PCPD file truncated at byte " + std::to_string(pos_));
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Bytes taken by one bucket's offset table and rows.
inline std::size_t serialized_cpd_size(const Cpd& cpd) {
    std::size_t n = 4 + 8 * cpd.num_cells();
    const auto& order = cpd.order();
    for (std::uint32_t i = 0; i < cpd.num_cells(); ++i)
        if (order.column(NodeId(i)) != 0)
            n += 4 + 5 * cpd.row(NodeId(i)).size();
    return n;
}

inline std::string serialize(const Pcpd& pcpd) {
    detail::ByteWriter w;
    w.bytes("PCPD", 4);
    w.u32(kPcpdVersion);
    w.bytes(pcpd.fingerprint().data(), pcpd.fingerprint().size());
    w.u32(static_cast<std::uint32_t>(pcpd.num_buckets()));
    std::vector<std::size_t> table_slots;
    for (const auto& cpd : pcpd.cpds()) {
        w.f64(cpd.rho());
        table_slots.push_back(w.size());
        w.u64(0);
    }
    const DfsOrder& order = pcpd.order();
    w.u32(static_cast<std::uint32_t>(pcpd.nrows()));
    w.u32(static_cast<std::uint32_t>(pcpd.ncols()));
    w.u32(static_cast<std::uint32_t>(order.size()));
    for (NodeId v : order.order)
        w.u32(v.index());

    for (std::size_t b = 0; b < pcpd.num_buckets(); ++b) {
        const Cpd& cpd = pcpd.cpd(b);
        w.patch_u64(table_slots[b], w.size());
        const std::size_t cells = cpd.num_cells();
        w.u32(static_cast<std::uint32_t>(cells));
        const std::size_t offsets_at = w.size();
        for (std::size_t i = 0; i < cells; ++i)
            w.u64(0);
        for (std::uint32_t i = 0; i < cells; ++i) {
            if (order.column(NodeId(i)) == 0)
                continue;
            w.patch_u64(offsets_at + 8 * i, w.size());
            const auto runs = cpd.row(NodeId(i));
            w.u32(static_cast<std::uint32_t>(runs.size()));
            for (const auto& r : runs) {
                w.u32(r.start);
                w.u8(r.symbol);
            }
        }
    }
    return w.take();
}

inline void serialize(const Pcpd& pcpd, const std::string& path) {
    const std::string bytes = serialize(pcpd);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write PCPD file '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("failed writing PCPD file '" + path + "'");
}

/// Parses a serialized PCPD. When `grid` is given its fingerprint must match.
inline Pcpd deserialize_bytes(std::string_view data, const TerrainGrid* grid = nullptr) {
    detail::ByteReader r(data);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "PCPD", 4) != 0)
        throw FormatError("not a PCPD file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kPcpdVersion)
        throw FormatError("unsupported PCPD version " + std::to_string(version));
    Fingerprint fp{};
    r.bytes(fp.data(), fp.size());
    if (grid) {
        const Fingerprint actual = fingerprint(*grid);
        if (actual != fp)
            throw FormatError("PCPD fingerprint " + to_hex(fp) + " does not match terrain " + to_hex(actual));
    }
    const std::uint32_t nb = r.u32();
    if (nb == 0)
        throw FormatError("PCPD has no buckets");
    std::vector<std::pair<double, std::uint64_t>> heads;
    for (std::uint32_t b = 0; b < nb; ++b) {
        const double rho = r.f64();
        heads.emplace_back(rho, r.u64());
    }
    const std::uint32_t nrows = r.u32();
    const std::uint32_t ncols = r.u32();
    const std::uint64_t cells = static_cast<std::uint64_t>(nrows) * ncols;
    const std::uint32_t order_len = r.u32();
    if (order_len > cells)
        throw FormatError("PCPD order longer than grid");
    auto order = std::make_shared<DfsOrder>();
    order->position.assign(cells, 0);
    for (std::uint32_t i = 0; i < order_len; ++i) {
        const std::uint32_t v = r.u32();
        if (v >= cells || order->position[v] != 0)
            throw FormatError("PCPD order is not a permutation");
        order->order.push_back(NodeId(v));
        order->position[v] = i + 1;
    }
    std::shared_ptr<const DfsOrder> shared = order;

    std::vector<Cpd> cpds;
    for (const auto& [rho, table_pos] : heads) {
        r.seek(table_pos);
        if (r.u32() != cells)
            throw FormatError("PCPD row table size mismatch");
        std::vector<std::uint64_t> offsets(cells);
        for (auto& o : offsets)
            o = r.u64();
        std::vector<std::uint32_t> row_begin(cells + 1, 0);
        std::vector<MoveRun> runs;
        for (std::uint64_t i = 0; i < cells; ++i) {
            row_begin[i] = static_cast<std::uint32_t>(runs.size());
            const bool valid = shared->position[i] != 0;
            if (valid != (offsets[i] != 0))
                throw FormatError("PCPD row offset inconsistent with order");
            if (!valid)
                continue;
            r.seek(offsets[i]);
            const std::uint32_t n = r.u32();
            if (n == 0 || n > order_len)
                throw FormatError("PCPD row has invalid run count");
            for (std::uint32_t k = 0; k < n; ++k) {
                MoveRun run{r.u32(), r.u8()};
                const bool ok = run.symbol <= kUnreachable && run.start >= 1 && run.start <= order_len &&
                                (k == 0 ? run.start == 1 : run.start > runs.back().start);
                if (!ok)
                    throw FormatError("PCPD row has malformed runs");
                runs.push_back(run);
            }
        }
        row_begin[cells] = static_cast<std::uint32_t>(runs.size());
        cpds.emplace_back(rho, shared, std::move(row_begin), std::move(runs));
    }
    return Pcpd(std::move(cpds), fp, nrows, ncols);
}

inline Pcpd deserialize(const std::string& path, const TerrainGrid* grid = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open PCPD file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_bytes(ss.str(), grid);
}

} // namespace omepp

#endif // OMEPP_PCPD_HPP
