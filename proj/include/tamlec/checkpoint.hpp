#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tamlec/error.hpp"
#include "tamlec/tensor.hpp"

namespace tamlec {

namespace detail {

inline std::uint32_t crc32(const void* data, std::size_t len,
                           std::uint32_t crc = 0) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    const auto* p = static_cast<const unsigned char*>(data);
    crc = ~crc;
    for (std::size_t i = 0; i < len; ++i)
        crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return ~crc;
}

template <typename T>
void write_le(std::ostream& out, T v, std::uint32_t& crc) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
    crc = crc32(buf, sizeof(T), crc);
}

template <typename T>
T read_le(std::istream& in, std::uint32_t& crc) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw Error(ErrorCode::IoError, "numerics: truncated checkpoint");
    crc = crc32(buf, sizeof(T), crc);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

}  // namespace detail

/// Versioned binary parameter container: magic, version, tensor table
/// (name, shape, little-endian float64 payload), trailing CRC32 over
/// everything after the magic.
inline void save_checkpoint(const std::string& path,
                            const std::map<std::string, Tensor>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "numerics: cannot write " + path);
    out.write("TMLC", 4);
    std::uint32_t crc = 0;
    detail::write_le<std::uint32_t>(out, 1, crc);  // version
    detail::write_le<std::uint64_t>(out, tensors.size(), crc);
    for (const auto& [name, t] : tensors) {
        detail::write_le<std::uint32_t>(out,
                                        static_cast<std::uint32_t>(name.size()),
                                        crc);
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        crc = detail::crc32(name.data(), name.size(), crc);
        detail::write_le<std::uint32_t>(
            out, static_cast<std::uint32_t>(t.shape.size()), crc);
        for (std::size_t d : t.shape)
            detail::write_le<std::uint64_t>(out, d, crc);
        for (double v : t.data) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            detail::write_le<std::uint64_t>(out, bits, crc);
        }
    }
    // Raw CRC trailer (not folded into itself).
    std::uint32_t dummy = 0;
    detail::write_le<std::uint32_t>(out, crc, dummy);
    if (!out) throw Error(ErrorCode::IoError, "numerics: write failed " + path);
}

inline std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "numerics: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TMLC", 4) != 0)
        throw Error(ErrorCode::IoError, "numerics: bad checkpoint magic");
    std::uint32_t crc = 0;
    const auto version = detail::read_le<std::uint32_t>(in, crc);
    if (version != 1)
        throw Error(ErrorCode::IoError, "numerics: unsupported checkpoint version");
    const auto count = detail::read_le<std::uint64_t>(in, crc);
    std::map<std::string, Tensor> tensors;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto name_len = detail::read_le<std::uint32_t>(in, crc);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) throw Error(ErrorCode::IoError, "numerics: truncated checkpoint");
        crc = detail::crc32(name.data(), name.size(), crc);
        const auto ndim = detail::read_le<std::uint32_t>(in, crc);
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape)
            d = static_cast<std::size_t>(detail::read_le<std::uint64_t>(in, crc));
        Tensor t(shape);
        for (double& v : t.data) {
            std::uint64_t bits = detail::read_le<std::uint64_t>(in, crc);
            std::memcpy(&v, &bits, sizeof(v));
        }
        tensors.emplace(std::move(name), std::move(t));
    }
    std::uint32_t dummy = 0;
    const auto stored = detail::read_le<std::uint32_t>(in, dummy);
    if (stored != crc)
        throw Error(ErrorCode::IoError, "numerics: checkpoint CRC mismatch");
    return tensors;
}

}  // namespace tamlec
