#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "codeattn/types.hpp"

namespace codeattn {

/// Reads a little-endian f32 file that must hold exactly `expected` values.
/// `what` prefixes error messages.
inline std::vector<float> read_f32(const std::filesystem::path& p, std::size_t expected, const std::string& what) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(what + ": missing file " + p.filename().string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expected * sizeof(float))
        throw Error(what + ": " + p.filename().string() + " holds " + std::to_string(bytes) +
                    " bytes, manifest shape requires " + std::to_string(expected * sizeof(float)));
    in.seekg(0);
    std::vector<float> v(expected);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& f : v) f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
    }
    return v;
}

inline void write_f32(const std::filesystem::path& p, const float* data, std::size_t n) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto u = __builtin_bswap32(std::bit_cast<std::uint32_t>(data[k]));
            out.write(reinterpret_cast<const char*>(&u), sizeof u);
        }
    } else {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(float)));
    }
    if (!out) throw Error("failed writing " + p.string());
}

}  // namespace codeattn
