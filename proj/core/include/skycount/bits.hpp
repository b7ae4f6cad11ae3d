#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "skycount/io.hpp"

namespace skycount {

// bits needed to store any value in [0, max_value]; 0 when max_value == 0
inline uint32_t bits_for(uint64_t max_value) {
    return max_value == 0 ? 0 : 64 - std::countl_zero(max_value);
}

// Fixed-width packed integer array.
class packed_vector {
public:
    packed_vector() = default;
    packed_vector(uint64_t size, uint32_t width) { assign(size, width); }

    void assign(uint64_t size, uint32_t width) {
        if (width > 64) throw std::invalid_argument("packed_vector: width > 64");
        m_size = size;
        m_width = width;
        m_words.assign(width == 0 ? 0 : (size * width + 63) / 64, 0);
    }

    void set(uint64_t i, uint64_t v) {
        assert(i < m_size);
        if (m_width == 0) { assert(v == 0); return; }
        assert(m_width == 64 || v < (uint64_t(1) << m_width));
        uint64_t pos = i * m_width, w = pos >> 6, off = pos & 63;
        m_words[w] &= ~(mask() << off);
        m_words[w] |= v << off;
        if (off + m_width > 64) {
            uint32_t spill = uint32_t(off + m_width - 64);
            m_words[w + 1] &= ~(mask() >> (m_width - spill));
            m_words[w + 1] |= v >> (m_width - spill);
        }
    }

    uint64_t get(uint64_t i) const {
        assert(i < m_size);
        if (m_width == 0) return 0;
        uint64_t pos = i * m_width, w = pos >> 6, off = pos & 63;
        uint64_t v = m_words[w] >> off;
        if (off + m_width > 64) v |= m_words[w + 1] << (64 - off);
        return v & mask();
    }

    uint64_t size() const { return m_size; }
    uint32_t width() const { return m_width; }
    uint64_t size_bits() const { return 64 * m_words.size(); }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        io::write_u32(os, m_width);
        io::write_u64_vec(os, m_words);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        m_width = io::read_u32(is);
        io::read_u64_vec(is, m_words);
        if (m_width > 64 || m_words.size() != (m_width == 0 ? 0 : (m_size * m_width + 63) / 64))
            throw std::runtime_error("packed_vector: corrupt payload");
    }

    bool operator==(const packed_vector&) const = default;

private:
    uint64_t mask() const { return m_width == 64 ? ~uint64_t(0) : (uint64_t(1) << m_width) - 1; }

    uint64_t m_size = 0;
    uint32_t m_width = 0;
    std::vector<uint64_t> m_words;
};

// Plain bit vector with rank/select directories. Built once via set() + finalize().
class bit_vector {
public:
    bit_vector() = default;
    explicit bit_vector(uint64_t n) { resize(n); }

    void resize(uint64_t n) {
        m_size = n;
        m_words.assign((n + 63) / 64, 0);
        m_finalized = false;
    }

    void set(uint64_t i) {
        assert(i < m_size && !m_finalized);
        m_words[i >> 6] |= uint64_t(1) << (i & 63);
    }

    bool get(uint64_t i) const {
        assert(i < m_size);
        return (m_words[i >> 6] >> (i & 63)) & 1;
    }

    // Directories: cumulative rank per 8-word superblock plus sampled select
    // hints. Payloads of at most 8 words answer by scanning instead.
    void finalize() {
        m_small = m_words.size() <= kWordsPerSuper;
        uint64_t ones = 0;
        if (m_small) {
            m_rank_super.clear();
            m_select1_hint.clear();
            m_select0_hint.clear();
            for (uint64_t w : m_words) ones += std::popcount(w);
            m_ones = ones;
            m_finalized = true;
            return;
        }
        uint64_t supers = m_words.size() / kWordsPerSuper + 1;
        m_rank_super.assign(supers + 1, 0);
        for (uint64_t w = 0; w < m_words.size(); ++w) {
            if (w % kWordsPerSuper == 0) m_rank_super[w / kWordsPerSuper] = ones;
            ones += std::popcount(m_words[w]);
        }
        m_rank_super[supers] = ones;
        m_ones = ones;
        build_hints(m_select1_hint, true);
        build_hints(m_select0_hint, false);
        m_finalized = true;
    }

    uint64_t size() const { return m_size; }
    uint64_t ones() const { return m_ones; }
    uint64_t zeros() const { return m_size - m_ones; }
    uint64_t word(uint64_t w) const { return m_words[w]; }
    uint64_t word_count() const { return m_words.size(); }

    // number of ones in [0, pos)
    uint64_t rank1(uint64_t pos) const {
        assert(m_finalized && pos <= m_size);
        uint64_t w = pos >> 6;
        uint64_t r = 0;
        if (m_small) {
            for (uint64_t k = 0; k < w; ++k) r += std::popcount(m_words[k]);
        } else {
            r = m_rank_super[w / kWordsPerSuper];
            for (uint64_t k = (w / kWordsPerSuper) * kWordsPerSuper; k < w; ++k)
                r += std::popcount(m_words[k]);
        }
        uint64_t off = pos & 63;
        if (off) r += std::popcount(m_words[w] & ((uint64_t(1) << off) - 1));
        return r;
    }
    uint64_t rank0(uint64_t pos) const { return pos - rank1(pos); }

    // position of the k-th one (0-based k)
    uint64_t select1(uint64_t k) const { return select_impl(k, true); }
    // position of the k-th zero (0-based k)
    uint64_t select0(uint64_t k) const { return select_impl(k, false); }

    uint64_t size_bits() const {
        return 64 * m_words.size() + 64 * m_rank_super.size() +
               32 * (m_select1_hint.size() + m_select0_hint.size());
    }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        io::write_u64_vec(os, m_words);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        io::read_u64_vec(is, m_words);
        if (m_words.size() != (m_size + 63) / 64) throw std::runtime_error("bit_vector: corrupt payload");
        if (m_size && (m_size & 63)) {
            uint64_t tail = m_words.back() & ~((uint64_t(1) << (m_size & 63)) - 1);
            if (tail) throw std::runtime_error("bit_vector: corrupt payload");
        }
        finalize();
    }

    bool same_bits(const bit_vector& o) const { return m_size == o.m_size && m_words == o.m_words; }

private:
    static constexpr uint64_t kWordsPerSuper = 8;
    static constexpr uint64_t kSelectSample = 512;

    void build_hints(std::vector<uint32_t>& hints, bool one) {
        hints.clear();
        uint64_t seen = 0;
        for (uint64_t s = 0; s * kWordsPerSuper < m_words.size() || (s == 0 && m_words.empty()); ++s) {
            uint64_t lo = s * kWordsPerSuper * 64;
            uint64_t hi = std::min(m_size, (s + 1) * kWordsPerSuper * 64);
            uint64_t cnt_one = m_rank_super[std::min(s + 1, m_rank_super.size() - 1)] - m_rank_super[s];
            if (s * kWordsPerSuper >= m_words.size()) cnt_one = m_ones - m_rank_super[s];
            uint64_t cnt = one ? cnt_one : (hi - lo) - cnt_one;
            while (seen / kSelectSample < (seen + cnt) / kSelectSample ||
                   (hints.empty() && cnt > 0)) {
                hints.push_back(uint32_t(s));
                seen += kSelectSample - (seen % kSelectSample);
                if (hints.size() * kSelectSample > m_size + kSelectSample) break;
            }
            if (hi >= m_size) break;
            seen = one ? m_rank_super[s + 1] : (hi - m_rank_super[s + 1]);
        }
    }

    uint64_t select_impl(uint64_t k, bool one) const {
        assert(m_finalized);
        uint64_t total = one ? m_ones : zeros();
        if (k >= total) throw std::out_of_range("bit_vector: select out of range");
        if (m_small) {
            uint64_t rem = k;
            for (uint64_t w = 0; w < m_words.size(); ++w) {
                uint64_t word = one ? m_words[w] : ~m_words[w];
                if (w == m_words.size() - 1 && (m_size & 63) && !one)
                    word &= (uint64_t(1) << (m_size & 63)) - 1;
                uint64_t pc = std::popcount(word);
                if (rem < pc) {
                    for (uint64_t b = 0; b < rem; ++b) word &= word - 1;
                    return w * 64 + std::countr_zero(word);
                }
                rem -= pc;
            }
            throw std::logic_error("bit_vector: select walked off the end");
        }
        const auto& hints = one ? m_select1_hint : m_select0_hint;
        uint64_t s = hints.empty() ? 0 : hints[std::min<uint64_t>(k / kSelectSample, hints.size() - 1)];
        // walk superblocks forward until the k-th bit's superblock
        auto count_before = [&](uint64_t sb) {
            uint64_t ones = m_rank_super[std::min(sb, m_rank_super.size() - 1)];
            return one ? ones : sb * kWordsPerSuper * 64 - ones;
        };
        while (count_before(s) > k) --s;
        while ((s + 1) * kWordsPerSuper < m_words.size() && count_before(s + 1) <= k) ++s;
        uint64_t rem = k - count_before(s);
        for (uint64_t w = s * kWordsPerSuper; w < m_words.size(); ++w) {
            uint64_t word = one ? m_words[w] : ~m_words[w];
            if (w == m_words.size() - 1 && (m_size & 63) && !one)
                word &= (uint64_t(1) << (m_size & 63)) - 1;
            uint64_t pc = std::popcount(word);
            if (rem < pc) {
                // k-th set bit within word
                for (uint64_t b = 0; b < rem; ++b) word &= word - 1;
                return w * 64 + std::countr_zero(word);
            }
            rem -= pc;
        }
        throw std::logic_error("bit_vector: select walked off the end");
    }

    uint64_t m_size = 0;
    uint64_t m_ones = 0;
    bool m_finalized = false;
    bool m_small = false;
    std::vector<uint64_t> m_words;
    std::vector<uint64_t> m_rank_super;
    std::vector<uint32_t> m_select1_hint;
    std::vector<uint32_t> m_select0_hint;
};

}  // namespace skycount
