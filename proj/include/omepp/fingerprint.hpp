#ifndef OMEPP_FINGERPRINT_HPP
#define OMEPP_FINGERPRINT_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "omepp/error.hpp"
#include "omepp/terrain.hpp"

namespace omepp {

using Fingerprint = std::array<std::uint8_t, 32>;

inline std::string to_hex(const Fingerprint& fp) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(fp.size() * 2);
    for (auto b : fp) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

/// SHA-256 over the grid's shape, cell size, elevations and nodata mask.
/// Georeferencing is excluded: it does not change the graph.
inline Fingerprint fingerprint(const TerrainGrid& g) {
    std::vector<unsigned char> buf;
    auto put = [&buf](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        buf.insert(buf.end(), b, b + n);
    };
    const std::uint64_t dims[2] = {g.nrows(), g.ncols()};
    put(dims, sizeof dims);
    const double cs = g.cellsize();
    put(&cs, sizeof cs);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = g.is_nodata(i) ? 0.0 : g.elevations()[i];
        put(&z, sizeof z);
    }
    put(g.nodata_mask().data(), g.nodata_mask().size());

    Fingerprint fp{};
    unsigned int len = 0;
    if (EVP_Digest(buf.data(), buf.size(), fp.data(), &len, EVP_sha256(), nullptr) != 1 || len != fp.size())
        throw Error("SHA-256 digest failed");
    return fp;
}

} // namespace omepp

#endif // OMEPP_FINGERPRINT_HPP
