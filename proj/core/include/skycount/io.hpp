#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skycount::io {

// Little-endian primitives for the index container.

inline void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_i64(std::ostream& os, int64_t v) { write_u64(os, static_cast<uint64_t>(v)); }

inline uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("container: truncated input");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
    return v;
}

inline uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("container: truncated input");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

inline int64_t read_i64(std::istream& is) { return static_cast<int64_t>(read_u64(is)); }

inline void write_u64_vec(std::ostream& os, const std::vector<uint64_t>& v) {
    write_u64(os, v.size());
    for (uint64_t x : v) write_u64(os, x);
}

inline void read_u64_vec(std::istream& is, std::vector<uint64_t>& v) {
    uint64_t n = read_u64(is);
    if (n > (uint64_t(1) << 40)) throw std::runtime_error("container: implausible vector length");
    v.resize(n);
    for (auto& x : v) x = read_u64(is);
}

inline void write_u32_vec(std::ostream& os, const std::vector<uint32_t>& v) {
    write_u64(os, v.size());
    for (uint32_t x : v) write_u32(os, x);
}

inline void read_u32_vec(std::istream& is, std::vector<uint32_t>& v) {
    uint64_t n = read_u64(is);
    if (n > (uint64_t(1) << 40)) throw std::runtime_error("container: implausible vector length");
    v.resize(n);
    for (auto& x : v) x = read_u32(is);
}

inline uint64_t fnv1a(const unsigned char* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a(reinterpret_cast<const unsigned char*>(s.data()), s.size(), seed);
}

}  // namespace skycount::io
