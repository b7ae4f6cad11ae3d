#include <stdexcept>

#include "skycount/tree.hpp"

namespace skycount {

uint32_t base_tree::child_index(uint32_t v, uint32_t t) const {
    const node& nv = m_nodes[v];
    if (t < 1 || t > nv.n_v) throw std::out_of_range("base_tree: C_v index");
    uint32_t rw = std::max<uint32_t>(1, bits_for(uint64_t(m_block) - 1));
    return uint32_t(nv.sig.get(t - 1) >> rw) + 1;
}

uint32_t base_tree::pi(uint32_t v, uint32_t i) const {
    const node& nv = m_nodes[v];
    if (v == 0) throw std::logic_error("base_tree: pi at root");
    if (i < 1 || i > nv.n_v) throw std::out_of_range("base_tree: pi index");
    return uint32_t(nv.parent_sel.select1(i));
}

uint32_t base_tree::pred(uint32_t v, uint32_t t, uint32_t i) const {
    const node& nv = m_nodes[v];
    if (t < 1 || t > nv.n_v) throw std::out_of_range("base_tree: pred index");
    if (i < 1 || i > nv.child_count) throw std::out_of_range("base_tree: pred child");
    uint32_t blk = blk_of(t);
    uint64_t before = 0;
    if (block_count(v) > 1) {
        uint64_t seg = uint64_t(i - 1) * block_count(v);
        before = nv.child_prefix.prefix(seg + blk - 1) - nv.child_prefix.prefix(seg);
    }
    return uint32_t(before + blk_below(v, blk, pos_of(t), i));
}

uint32_t base_tree::succ(uint32_t v, uint32_t t, uint32_t i) const {
    uint32_t p = pred(v, t, i);
    return child_index(v, t) == i ? p : p + 1;
}

uint32_t base_tree::rightmost_v(uint32_t v, uint32_t i, uint32_t j) const {
    const node& nv = m_nodes[v];
    if (nv.is_leaf()) {
        if (i != 1 || j != 1) throw std::out_of_range("base_tree: rightmost_v on leaf");
        return 1;
    }
    if (i < 1 || i > j || j > nv.n_v) throw std::out_of_range("base_tree: rightmost_v range");
    if (block_count(v) == 1)
        return uint32_t(blk_rightmost(v, 1, i, j, 1, nv.child_count));
    return uint32_t(nv.rightmost.range_max_index(i, j));
}

uint64_t base_tree::skycount_prefix(uint32_t v, uint32_t i) const {
    const node& nv = m_nodes[v];
    if (nv.is_leaf()) {
        if (i != 1) throw std::out_of_range("base_tree: skycount_prefix on leaf");
        return 1;
    }
    if (i < 1 || i > nv.n_v) throw std::out_of_range("base_tree: skycount_prefix index");
    if (block_count(v) == 1) return blk_skycount(v, 1, 1, i, 1, nv.child_count);
    return i - nv.dominated.prefix(i);
}

uint64_t base_tree::skycount_range(uint32_t v, uint32_t i, uint32_t j) const {
    const node& nv = m_nodes[v];
    if (i < 1 || i > j || j > nv.n_v) throw std::out_of_range("base_tree: skycount_range");
    if (nv.is_leaf()) return 1;
    if (block_count(v) == 1) return blk_skycount(v, 1, i, j, 1, nv.child_count);
    uint32_t k = rightmost_v(v, i, j);
    return skycount_prefix(v, j) - skycount_prefix(v, k) + 1;
}

block_signature base_tree::block(uint32_t v, uint32_t blk) const {
    const node& nv = m_nodes[v];
    uint32_t len = block_len(v, blk);
    uint32_t rw = std::max<uint32_t>(1, bits_for(uint64_t(m_block) - 1));
    std::vector<sig_entry> entries(len);
    for (uint32_t p = 0; p < len; ++p) {
        uint64_t packed = nv.sig.get(uint64_t(blk - 1) * m_block + p);
        entries[p] = {uint16_t((packed >> rw) + 1), uint16_t((packed & ((uint64_t(1) << rw) - 1)) + 1)};
    }
    return block_signature(std::move(entries));
}

uint64_t base_tree::memo_key(uint32_t v, uint32_t blk, uint32_t op, uint64_t args) const {
    // key over the signature bits plus arguments, so identical blocks share entries
    const node& nv = m_nodes[v];
    uint32_t len = block_len(v, blk);
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](uint64_t x) {
        h ^= x;
        h *= 0x100000001b3ull;
    };
    for (uint32_t p = 0; p < len; ++p) mix(nv.sig.get(uint64_t(blk - 1) * m_block + p));
    mix(op);
    mix(args);
    mix(len);
    return h;
}

uint64_t base_tree::memo_get(uint64_t key, bool& hit) const {
    std::lock_guard<std::mutex> g(m_memo->mutex);
    auto it = m_memo->map.find(key);
    hit = it != m_memo->map.end();
    return hit ? it->second : 0;
}

void base_tree::memo_put(uint64_t key, uint64_t value) const {
    std::lock_guard<std::mutex> g(m_memo->mutex);
    if (m_memo->map.size() >= m_memo_capacity) m_memo->map.clear();
    m_memo->map.emplace(key, value);
}

namespace {
uint64_t pack_args(uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
    return (uint64_t(a) << 48) | (uint64_t(b) << 32) | (uint64_t(c) << 16) | d;
}
}  // namespace

uint32_t base_tree::blk_below(uint32_t v, uint32_t blk, uint32_t t, uint32_t i,
                              query_stats* stats) const {
    uint64_t key = 0;
    if (m_memo_capacity) {
        bool hit = false;
        key = memo_key(v, blk, 1, pack_args(t, i, 0, 0));
        uint64_t val = memo_get(key, hit);
        if (hit) return uint32_t(val);
    }
    if (stats) ++stats->block_scans;
    uint32_t r = block(v, blk).below(t, i);
    if (m_memo_capacity) memo_put(key, r);
    return r;
}

int32_t base_tree::blk_rightmost(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                                 uint32_t j, query_stats* stats) const {
    uint64_t key = 0;
    if (m_memo_capacity) {
        bool hit = false;
        key = memo_key(v, blk, 2, pack_args(b, t, i, j));
        uint64_t val = memo_get(key, hit);
        if (hit) return int32_t(val);
    }
    if (stats) ++stats->block_scans;
    int32_t r = block(v, blk).rightmost(b, t, i, j);
    if (m_memo_capacity) memo_put(key, uint64_t(uint32_t(r)));
    return r;
}

int32_t base_tree::blk_topmost(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                               uint32_t j, query_stats* stats) const {
    uint64_t key = 0;
    if (m_memo_capacity) {
        bool hit = false;
        key = memo_key(v, blk, 3, pack_args(b, t, i, j));
        uint64_t val = memo_get(key, hit);
        if (hit) return int32_t(val);
    }
    if (stats) ++stats->block_scans;
    int32_t r = block(v, blk).topmost(b, t, i, j);
    if (m_memo_capacity) memo_put(key, uint64_t(uint32_t(r)));
    return r;
}

uint32_t base_tree::blk_skycount(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                                 uint32_t j, query_stats* stats) const {
    uint64_t key = 0;
    if (m_memo_capacity) {
        bool hit = false;
        key = memo_key(v, blk, 4, pack_args(b, t, i, j));
        uint64_t val = memo_get(key, hit);
        if (hit) return uint32_t(val);
    }
    if (stats) ++stats->block_scans;
    uint32_t r = block(v, blk).skycount(b, t, i, j);
    if (m_memo_capacity) memo_put(key, r);
    return r;
}

int64_t base_tree::ms_rightmost(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                                query_stats* stats) const {
    if (b > t) return -1;
    const node& nv = m_nodes[v];
    uint32_t blocks = block_count(v);
    if (b < 1 || t > blocks || i < 1 || i > j || j > nv.child_count)
        throw std::out_of_range("base_tree: ms_rightmost");
    uint32_t l = 1;
    if (blocks > 1) {
        uint64_t seg = uint64_t(slab_index(v, i, j)) * blocks;
        l = uint32_t(nv.ms_right.range_max_index(seg + b, seg + t) - seg);
    }
    int32_t r = blk_rightmost(v, l, 1, m_block, i, j, stats);
    if (r < 0) return -1;
    return int64_t(l - 1) * m_block + r;
}

int64_t base_tree::ms_topmost(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                              query_stats* stats) const {
    if (b > t) return -1;
    const node& nv = m_nodes[v];
    uint32_t blocks = block_count(v);
    if (b < 1 || t > blocks || i < 1 || i > j || j > nv.child_count)
        throw std::out_of_range("base_tree: ms_topmost");
    uint32_t l = 1;
    if (blocks > 1) {
        uint64_t seg = uint64_t(slab_index(v, i, j)) * blocks;
        l = uint32_t(nv.ms_top.range_max_index(seg + b, seg + t) - seg);
    }
    int32_t r = blk_topmost(v, l, 1, m_block, i, j, stats);
    if (r < 0) return -1;
    return int64_t(l - 1) * m_block + r;
}

uint64_t base_tree::ms_skycount(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                                query_stats* stats) const {
    int64_t rm = ms_rightmost(v, i, j, b, t, stats);
    if (rm < 0) return 0;
    const node& nv = m_nodes[v];
    uint32_t k = blk_of(uint32_t(rm));
    if (block_count(v) == 1) return blk_skycount(v, 1, 1, m_block, i, j, stats);
    uint64_t seg = uint64_t(slab_index(v, i, j)) * block_count(v);
    uint64_t xs = nv.ms_x.prefix(seg + t) - nv.ms_x.prefix(seg + k - 1);
    uint64_t ys = nv.ms_y.prefix(seg + t) - nv.ms_y.prefix(seg + k);
    return xs - ys;
}

int64_t base_tree::topmost_in(uint32_t v, uint32_t lo, uint32_t hi, uint32_t i, uint32_t j,
                              query_stats* stats) const {
    uint32_t blo = blk_of(lo), bhi = blk_of(hi);
    if (blo == bhi) {
        int32_t r = blk_topmost(v, bhi, pos_of(lo), pos_of(hi), i, j, stats);
        return r < 0 ? -1 : int64_t(bhi - 1) * m_block + r;
    }
    int32_t r = blk_topmost(v, bhi, 1, pos_of(hi), i, j, stats);
    if (r >= 0) return int64_t(bhi - 1) * m_block + r;
    if (blo + 1 <= bhi - 1) {
        int64_t m = ms_topmost(v, i, j, blo + 1, bhi - 1, stats);
        if (m >= 0) return m;
    }
    r = blk_topmost(v, blo, pos_of(lo), m_block, i, j, stats);
    return r < 0 ? -1 : int64_t(blo - 1) * m_block + r;
}

void base_tree::save(std::ostream& os) const {
    io::write_u64(os, m_n);
    io::write_u32(os, m_delta);
    io::write_u64(os, m_memo_capacity);
    for (uint32_t v = 0; v < m_nodes.size(); ++v) {
        const node& nv = m_nodes[v];
        if (nv.parent != nil) nv.parent_sel.save(os);
        if (nv.is_leaf()) continue;
        nv.sig.save(os);
        if (block_count(v) == 1) continue;
        nv.child_prefix.save(os);
        nv.rightmost.save(os);
        nv.dominated.save(os);
        nv.ms_right.save(os);
        nv.ms_top.save(os);
        nv.ms_x.save(os);
        nv.ms_y.save(os);
    }
}

void base_tree::load(std::istream& is) {
    uint64_t n = io::read_u64(is);
    uint32_t delta = io::read_u32(is);
    uint64_t memo = io::read_u64(is);
    // the shape is deterministic in (n, delta); only structures are stored
    *this = make_shape(n, delta);
    set_memo_capacity(memo);
    for (uint32_t v = 0; v < m_nodes.size(); ++v) {
        node& nv = m_nodes[v];
        if (nv.parent != nil) nv.parent_sel.load(is);
        if (nv.is_leaf()) continue;
        nv.sig.load(is);
        if (block_count(v) == 1) continue;
        nv.child_prefix.load(is);
        nv.rightmost.load(is);
        nv.dominated.load(is);
        nv.ms_right.load(is);
        nv.ms_top.load(is);
        nv.ms_x.load(is);
        nv.ms_y.load(is);
    }
}

}  // namespace skycount
