#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "skycount/bits.hpp"

namespace skycount {

// Monotone (nondecreasing, duplicates allowed) integer list with O(1) access
// via the usual high/low split: low bits packed, high bits unary with select
// support. count_leq/count_less resolve through the high zeros plus a bucket
// binary search over the lows.
class elias_fano {
public:
    elias_fano() = default;

    void build(const std::vector<uint64_t>& values) {
        m_size = values.size();
        if (m_size == 0) {
            m_universe = 0;
            m_low_width = 0;
            m_low = packed_vector();
            m_high = bit_vector();
            return;
        }
        uint64_t u = values.back() + 1;
        m_universe = u;
        m_low_width = (u / m_size) ? bits_for(u / m_size) - 1 : 0;
        m_low.assign(m_size, m_low_width);
        m_high.resize(m_size + (u >> m_low_width) + 1);
        uint64_t last = 0;
        for (uint64_t i = 0; i < m_size; ++i) {
            uint64_t v = values[i];
            if (v < last) throw std::invalid_argument("elias_fano: input not sorted");
            last = v;
            if (m_low_width) m_low.set(i, v & low_mask());
            m_high.set((v >> m_low_width) + i);
        }
        m_high.finalize();
    }

    uint64_t size() const { return m_size; }

    uint64_t access(uint64_t i) const {
        assert(i < m_size);
        return ((m_high.select1(i) - i) << m_low_width) | (m_low_width ? m_low.get(i) : 0);
    }

    // number of stored values <= x
    uint64_t count_leq(uint64_t x) const { return bucket_bound(x, true); }
    // number of stored values < x
    uint64_t count_less(uint64_t x) const { return bucket_bound(x, false); }

    uint64_t size_bits() const { return m_low.size_bits() + m_high.size_bits(); }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        io::write_u64(os, m_universe);
        io::write_u32(os, m_low_width);
        m_low.save(os);
        m_high.save(os);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        m_universe = io::read_u64(is);
        m_low_width = io::read_u32(is);
        m_low.load(is);
        m_high.load(is);
    }

private:
    uint64_t low_mask() const { return (uint64_t(1) << m_low_width) - 1; }

    // elements with index in [bucket_begin(h), bucket_end(h)) share high part h
    uint64_t bucket_begin(uint64_t h) const {
        return h == 0 ? 0 : m_high.select0(h - 1) - (h - 1);
    }

    uint64_t bucket_bound(uint64_t x, bool leq) const {
        if (m_size == 0 || (leq ? x + 1 : x) == 0) return 0;
        if (x >= m_universe) return m_size;
        uint64_t h = x >> m_low_width;
        uint64_t lo = bucket_begin(h);
        uint64_t hi = bucket_begin(h + 1);
        uint64_t xlow = x & low_mask();
        while (lo < hi) {
            uint64_t mid = (lo + hi) / 2;
            uint64_t mlow = m_low_width ? m_low.get(mid) : 0;
            bool below = leq ? (mlow <= xlow) : (mlow < xlow);
            if (below) lo = mid + 1; else hi = mid;
        }
        return lo;
    }

    uint64_t m_size = 0;
    uint64_t m_universe = 0;
    uint32_t m_low_width = 0;
    packed_vector m_low;
    bit_vector m_high;
};

}  // namespace skycount
