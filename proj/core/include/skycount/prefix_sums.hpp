#pragma once

#include <cstdint>
#include <vector>

#include "skycount/elias_fano.hpp"

namespace skycount {

// Nonnegative integer sequence X[1..s] with total sum t stored as its
// monotone prefix-sum sequence, O(s lg(2 + t/s)) bits, constant-time
// prefix(i) and lookup(i).
class prefix_sums {
public:
    prefix_sums() = default;

    void build(const std::vector<uint64_t>& values) {
        m_size = values.size();
        std::vector<uint64_t> sums(values.size());
        uint64_t acc = 0;
        for (uint64_t i = 0; i < values.size(); ++i) {
            acc += values[i];
            sums[i] = acc;
        }
        m_total = acc;
        m_sums.build(sums);
    }

    uint64_t size() const { return m_size; }
    uint64_t total() const { return m_total; }

    // sum of X[1..i], i in [0, s]
    uint64_t prefix(uint64_t i) const {
        if (i > m_size) throw std::out_of_range("prefix_sums: prefix index");
        return i == 0 ? 0 : m_sums.access(i - 1);
    }

    // X[i], i in [1, s]
    uint64_t lookup(uint64_t i) const {
        if (i < 1 || i > m_size) throw std::out_of_range("prefix_sums: lookup index");
        return prefix(i) - prefix(i - 1);
    }

    uint64_t size_bits() const { return m_sums.size_bits(); }

    void save(std::ostream& os) const {
        io::write_u64(os, m_size);
        io::write_u64(os, m_total);
        m_sums.save(os);
    }
    void load(std::istream& is) {
        m_size = io::read_u64(is);
        m_total = io::read_u64(is);
        m_sums.load(is);
    }

private:
    uint64_t m_size = 0;
    uint64_t m_total = 0;
    elias_fano m_sums;
};

}  // namespace skycount
