#pragma once

#include <cstdint>
#include <vector>

namespace skycount {

// One (child, within-child x-rank) pair per block point, in ascending y.
// Child slabs are x-disjoint and ordered, so the pair sequence fixes the
// relative x-order of the block: compare (child, xrank) lexicographically.
struct sig_entry {
    uint16_t child = 0;  // 1..delta
    uint16_t xrank = 0;  // 1..block size, rank among same-child block points
    bool operator==(const sig_entry&) const = default;
};

class block_signature {
public:
    block_signature() = default;
    explicit block_signature(std::vector<sig_entry> entries) : m_entries(std::move(entries)) {}

    uint32_t size() const { return uint32_t(m_entries.size()); }
    sig_entry entry(uint32_t l) const { return m_entries[l - 1]; }

    // number of points among p_1..p_t stored in slab i
    uint32_t below(uint32_t t, uint32_t i) const;

    // index of the rightmost point among p_b..p_t in slabs [i,j]; -1 if none
    int32_t rightmost(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const;

    // index of the topmost point among p_b..p_t in slabs [i,j]; -1 if none
    int32_t topmost(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const;

    // skyline size of the points among p_b..p_t in slabs [i,j]
    uint32_t skycount(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const;

private:
    static uint32_t key(sig_entry e) { return (uint32_t(e.child) << 16) | e.xrank; }
    std::vector<sig_entry> m_entries;
};

}  // namespace skycount
