#ifndef OMEPP_RLE_HPP
#define OMEPP_RLE_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace omepp {

/// One run of a compressed first-move row: `symbol` holds from the 1-based
/// column `start` up to the next run's start.
template <class Symbol>
struct RleRun {
    std::uint32_t start;
    Symbol symbol;

    friend bool operator==(const RleRun&, const RleRun&) = default;
};

/// Minimal run list for `row`. Cells equal to `wildcard` join whichever run
/// encloses them: the preceding run, or the following one at the row head.
/// A row made only of wildcards becomes a single wildcard run.
template <class Symbol>
std::vector<RleRun<Symbol>> rle_compress(std::span<const Symbol> row, Symbol wildcard) {
    std::vector<RleRun<Symbol>> runs;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const Symbol s = row[i];
        if (s == wildcard)
            continue;
        if (!runs.empty() && runs.back().symbol == s)
            continue;
        runs.push_back({runs.empty() ? 1u : static_cast<std::uint32_t>(i + 1), s});
    }
    if (runs.empty() && !row.empty())
        runs.push_back({1u, wildcard});
    return runs;
}

/// Symbol at 1-based `position`, by binary search over run starts.
template <class Symbol>
Symbol rle_lookup(std::span<const RleRun<Symbol>> runs, std::uint32_t position) noexcept {
    auto it = std::upper_bound(runs.begin(), runs.end(), position,
                               [](std::uint32_t pos, const RleRun<Symbol>& r) { return pos < r.start; });
    return std::prev(it)->symbol;
}

/// Expands `runs` to `length` cells and re-marks the 0-based
/// `wildcard_index` (the row's own source column) with `wildcard`.
template <class Symbol>
std::vector<Symbol> rle_decompress(std::span<const RleRun<Symbol>> runs, std::size_t length,
                                   std::size_t wildcard_index, Symbol wildcard) {
    std::vector<Symbol> row(length);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const std::size_t begin = runs[r].start - 1;
        const std::size_t end = r + 1 < runs.size() ? runs[r + 1].start - 1 : length;
        std::fill(row.begin() + static_cast<std::ptrdiff_t>(begin), row.begin() + static_cast<std::ptrdiff_t>(end),
                  runs[r].symbol);
    }
    if (wildcard_index < length)
        row[wildcard_index] = wildcard;
    return row;
}

} // namespace omepp

#endif // OMEPP_RLE_HPP
