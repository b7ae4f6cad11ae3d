#pragma once

#include <cstdint>
#include <vector>

#include "skycount/elias_fano.hpp"

namespace skycount {

// Rank/select bit vector in O(t(1 + lg s/t)) bits: monotone position encoding
// for sparse inputs, plain directory when the density exceeds 1/4.
// Positions and ranks are 1-based; rank1 is defined for every position, not
// only at ones.
class sparse_bitvector {
public:
    sparse_bitvector() = default;

    static sparse_bitvector from_bits(const std::vector<bool>& bits) {
        std::vector<uint64_t> ones;
        for (uint64_t i = 0; i < bits.size(); ++i)
            if (bits[i]) ones.push_back(i);
        return from_ones(bits.size(), ones);
    }

    // `ones` holds 0-based positions, strictly increasing, all < s.
    static sparse_bitvector from_ones(uint64_t s, const std::vector<uint64_t>& ones) {
        sparse_bitvector v;
        v.m_size = s;
        v.m_ones = ones.size();
        v.m_dense = ones.size() * 4 > s;
        if (v.m_dense) {
            v.m_bits.resize(s);
            for (uint64_t p : ones) v.m_bits.set(p);
            v.m_bits.finalize();
        } else {
            v.m_ef.build(ones);
        }
        return v;
    }

    uint64_t size() const { return m_size; }
    uint64_t ones() const { return m_ones; }

    // number of ones in positions 1..i
    uint64_t rank1(uint64_t i) const {
        if (i < 1 || i > m_size) throw std::out_of_range("sparse_bitvector: rank1 position");
        if (m_ones == 0) return 0;
        return m_dense ? m_bits.rank1(i) : m_ef.count_leq(i - 1);
    }

    // position of the r-th one
    uint64_t select1(uint64_t r) const {
        if (r < 1 || r > m_ones) throw std::out_of_range("sparse_bitvector: select1 rank");
        return (m_dense ? m_bits.select1(r - 1) : m_ef.access(r - 1)) + 1;
    }

    bool get(uint64_t i) const {
        if (i < 1 || i > m_size) throw std::out_of_range("sparse_bitvector: position");
        if (m_ones == 0) return false;
        if (m_dense) return m_bits.get(i - 1);
        return m_ef.count_leq(i - 1) > (i >= 2 ? m_ef.count_leq(i - 2) : 0);
    }

    uint64_t size_bits() const { return m_dense ? m_bits.size_bits() : m_ef.size_bits(); }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        io::write_u64(os, m_ones);
        io::write_u32(os, m_dense ? 1 : 0);
        if (m_dense) m_bits.save(os); else m_ef.save(os);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        m_ones = io::read_u64(is);
        m_dense = io::read_u32(is) != 0;
        if (m_dense) m_bits.load(is); else m_ef.load(is);
    }

private:
    uint64_t m_size = 0;
    uint64_t m_ones = 0;
    bool m_dense = false;
    elias_fano m_ef;
    bit_vector m_bits;
};

}  // namespace skycount
