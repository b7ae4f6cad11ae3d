#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "skycount/bits.hpp"

namespace skycount {

// Range-maximum index structure in O(s) bits; the source array is not
// retained and queries never read it. Realized as the balanced-parentheses
// encoding of the max Cartesian tree (stack construction, strict pops so
// equal runs resolve to the smallest index) with an excess-argmin over it:
// per-word relative minima plus a sparse table over word minima. Word minima
// are excess values derived from the parentheses themselves, so the
// structure stays self-contained.
class range_max {
public:
    range_max() = default;

    template <typename T>
    void build(const std::vector<T>& values) {
        m_size = values.size();
        m_bp = bit_vector(2 * m_size);
        std::vector<uint64_t> stack;
        uint64_t pos = 0;
        for (uint64_t i = 0; i < m_size; ++i) {
            while (!stack.empty() && values[stack.back()] < values[i]) {
                stack.pop_back();
                ++pos;  // close
            }
            stack.push_back(i);
            m_bp.set(pos++);  // open
        }
        m_bp.finalize();
        build_aux();
    }

    uint64_t size() const { return m_size; }

    // smallest k in [i, j] with X[k] = max(X[i..j]); 1-based closed range
    uint64_t range_max_index(uint64_t i, uint64_t j) const {
        if (i < 1 || i > j || j > m_size) throw std::out_of_range("range_max: bad range");
        return argmax0(i - 1, j - 1) + 1;
    }

    uint64_t size_bits() const {
        uint64_t table = 0;
        for (const auto& lvl : m_table) table += lvl.size_bits();
        return m_bp.size_bits() + 8 * m_word_min.size() + table;
    }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        m_bp.save(os);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        m_bp.load(is);
        if (m_bp.size() != 2 * m_size) throw std::runtime_error("range_max: corrupt payload");
        build_aux();
    }

private:
    // excess of the first `p` positions
    int64_t exc_prefix(uint64_t p) const { return 2 * int64_t(m_bp.rank1(p)) - int64_t(p); }

    struct min_hit {
        uint64_t pos;
        int64_t exc;
    };

    // rightmost argmin of excess over bit positions [w*64+from, w*64+to]
    min_hit scan_word(uint64_t w, uint32_t from, uint32_t to) const {
        uint64_t start = w * 64 + from;
        int64_t e = exc_prefix(start);
        uint64_t bits = m_bp.word(w) >> from;
        min_hit best{start, std::numeric_limits<int64_t>::max()};
        for (uint32_t p = from; p <= to; ++p) {
            e += (bits & 1) ? 1 : -1;
            bits >>= 1;
            if (e <= best.exc) best = {w * 64 + p, e};
        }
        return best;
    }

    int64_t word_min_abs(uint64_t w) const { return exc_prefix(w * 64) + m_word_min[w]; }

    uint64_t combine(uint64_t wl, uint64_t wr) const {
        return word_min_abs(wr) <= word_min_abs(wl) ? wr : wl;
    }

    // rightmost argmin of excess over positions [a, b]
    min_hit excess_argmin(uint64_t a, uint64_t b) const {
        uint64_t wa = a >> 6, wb = b >> 6;
        if (wa == wb) return scan_word(wa, a & 63, b & 63);
        min_hit best = scan_word(wa, a & 63, 63);
        if (wb - wa >= 2) {
            uint64_t lo = wa + 1, hi = wb - 1;
            uint64_t cand;
            if (lo == hi) {
                cand = lo;
            } else {
                uint32_t k = bits_for(hi - lo + 1) - 1;  // >= 1; rows start at length 2
                const packed_vector& row = m_table[k - 1];
                cand = combine(row.get(lo), row.get(hi + 1 - (uint64_t(1) << k)));
            }
            if (word_min_abs(cand) <= best.exc) best = scan_word(cand, 0, 63);
        }
        min_hit tail = scan_word(wb, 0, b & 63);
        if (tail.exc <= best.exc) best = tail;
        return best;
    }

    uint64_t argmax0(uint64_t i, uint64_t j) const {
        if (i == j) return i;
        uint64_t x = m_bp.select1(i);
        uint64_t y = m_bp.select1(j);
        min_hit m = excess_argmin(x + 1, y);
        if (m.exc >= exc_prefix(x + 1)) return i;
        return m_bp.rank1(m.pos + 1);
    }

    void build_aux() {
        uint64_t nbits = m_bp.size();
        uint64_t W = m_bp.word_count();
        m_word_min.assign(W, 0);
        std::vector<int64_t> abs_min(W);
        for (uint64_t w = 0; w < W; ++w) {
            uint32_t last = uint32_t(std::min<uint64_t>(63, nbits - w * 64 - 1));
            int64_t e = 0, mn = std::numeric_limits<int64_t>::max();
            uint64_t bits = m_bp.word(w);
            for (uint32_t p = 0; p <= last; ++p) {
                e += (bits & 1) ? 1 : -1;
                bits >>= 1;
                if (e < mn) mn = e;
            }
            m_word_min[w] = int8_t(mn);
            abs_min[w] = exc_prefix(w * 64) + mn;
        }
        m_table.clear();
        if (W < 2) return;
        uint32_t width = bits_for(W - 1);
        // row k holds argmin words for ranges of length 2^(k+1)
        {
            packed_vector base(W - 1, width);
            for (uint64_t w = 0; w + 1 < W; ++w)
                base.set(w, abs_min[w + 1] <= abs_min[w] ? w + 1 : w);
            m_table.push_back(std::move(base));
        }
        for (uint64_t len = 4; len <= W; len *= 2) {
            const auto& prev = m_table.back();
            packed_vector cur(W - len + 1, width);
            for (uint64_t w = 0; w + len <= W; ++w) {
                uint64_t l = prev.get(w), r = prev.get(w + len / 2);
                cur.set(w, abs_min[r] <= abs_min[l] ? r : l);
            }
            m_table.push_back(std::move(cur));
        }
    }

    uint64_t m_size = 0;
    bit_vector m_bp;
    std::vector<int8_t> m_word_min;
    std::vector<packed_vector> m_table;
};

}  // namespace skycount
