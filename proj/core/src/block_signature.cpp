#include "skycount/block_signature.hpp"

namespace skycount {

uint32_t block_signature::below(uint32_t t, uint32_t i) const {
    if (t > size()) t = size();
    uint32_t c = 0;
    for (uint32_t l = 1; l <= t; ++l)
        if (m_entries[l - 1].child == i) ++c;
    return c;
}

int32_t block_signature::rightmost(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const {
    if (t > size()) t = size();
    int32_t best = -1;
    uint32_t best_key = 0;
    for (uint32_t l = b; l <= t && l >= 1; ++l) {
        sig_entry e = m_entries[l - 1];
        if (e.child < i || e.child > j) continue;
        if (best < 0 || key(e) > best_key) {
            best = int32_t(l);
            best_key = key(e);
        }
    }
    return best;
}

int32_t block_signature::topmost(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const {
    if (t > size()) t = size();
    for (uint32_t l = t; l >= b && l >= 1; --l) {
        sig_entry e = m_entries[l - 1];
        if (e.child >= i && e.child <= j) return int32_t(l);
    }
    return -1;
}

uint32_t block_signature::skycount(uint32_t b, uint32_t t, uint32_t i, uint32_t j) const {
    if (t > size()) t = size();
    uint32_t count = 0, max_key = 0;
    bool seen = false;
    // top-down: a point is maximal iff its x exceeds every qualifying x above it
    for (uint32_t l = t; l >= b && l >= 1; --l) {
        sig_entry e = m_entries[l - 1];
        if (e.child < i || e.child > j) continue;
        uint32_t k = key(e);
        if (!seen || k > max_key) {
            ++count;
            max_key = k;
            seen = true;
        }
    }
    return count;
}

}  // namespace skycount
