#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "skycount/bits.hpp"
#include "skycount/block_signature.hpp"
#include "skycount/points.hpp"
#include "skycount/prefix_sums.hpp"
#include "skycount/range_max.hpp"
#include "skycount/sparse_bitvector.hpp"

namespace skycount {

struct query_stats {
    uint64_t nodes_visited = 0;  // distinct decomposition/path nodes
    uint64_t block_scans = 0;    // signature decodes
    uint64_t multislabs = 0;
    uint64_t resolve_jumps = 0;
    uint64_t reported = 0;

    struct slab_record {
        uint32_t node;
        uint32_t slab_lo, slab_hi;
        uint32_t y_lo, y_hi;  // effective (raised) bounds
        uint64_t count;
    };
    std::vector<slab_record>* trace = nullptr;
};

struct multislab_query {
    uint32_t node = 0;
    uint32_t slab_lo = 0, slab_hi = 0;  // 1-based child slabs, inclusive
    uint32_t y_lo = 0, y_hi = 0;        // successor-of-y1 / predecessor-of-y2 in L_v
};

// Degree-bounded base tree over the x-sorted points with the succinct
// per-node and per-multislab structures; L_v lists are never materialized in
// production builds.
class base_tree {
public:
    static constexpr uint32_t nil = UINT32_MAX;

    struct build_options {
        uint32_t delta = 0;          // 0 = max(2, ceil((lg2 n)^(1/4)))
        bool keep_lists = false;     // retain L_v per node (test builds only)
        uint64_t memo_capacity = 0;  // block-query memo entries, 0 = off
    };

    // Per-node structures. The child-index array C_v is the child component
    // of the signature pairs, read directly from sig. Nodes whose list fits
    // in a single block skip every auxiliary structure: the signature alone
    // answers their queries. Per-child and per-multislab arrays are stored
    // concatenated (child-major / pair-major segments of `block_count`
    // entries) in one structure each.
    struct node {
        uint32_t parent = nil;
        uint32_t first_child = 0;
        uint32_t child_count = 0;
        uint32_t level = 0;  // root = 0
        uint32_t n_v = 0;
        uint32_t x_lo = 0, x_hi = 0;
        sparse_bitvector parent_sel;  // pi_v; empty at root
        packed_vector sig;            // block signatures, (child, rank) packed
        prefix_sums child_prefix;     // X^i block counts, child-major
        range_max rightmost;          // over x-ranks of L_v
        prefix_sums dominated;        // dominated-count array (skyline prefix)
        range_max ms_right;           // per-block restricted rightmost x (+1; 0 empty)
        range_max ms_top;             // block number when nonempty, else 0
        prefix_sums ms_x;             // per-block restricted skyline sizes
        prefix_sums ms_y;             // cross-block dominated corrections
        std::vector<uint32_t> debug_list;  // y-ranks; test builds only
        bool is_leaf() const { return child_count == 0; }
    };

    base_tree() = default;

    static base_tree build(const point_set& ps, const build_options& opt,
                           std::vector<std::vector<uint32_t>>* lists_out = nullptr);

    // ---- whole-tree queries, rank space ----
    uint64_t count(rank_rect r, query_stats* stats = nullptr) const;
    std::vector<multislab_query> decompose(rank_rect r) const;

    // ---- per-node operations, 1-based indices into L_v ----
    uint32_t child_index(uint32_t v, uint32_t t) const;  // C_v(t), 1-based child
    uint32_t pi(uint32_t v, uint32_t i) const;           // index of L_v[i] in parent list
    uint32_t pred(uint32_t v, uint32_t t, uint32_t i) const;  // 0 when none
    uint32_t succ(uint32_t v, uint32_t t, uint32_t i) const;  // n_child+1 when none
    uint32_t rightmost_v(uint32_t v, uint32_t i, uint32_t j) const;
    uint64_t skycount_prefix(uint32_t v, uint32_t i) const;
    uint64_t skycount_range(uint32_t v, uint32_t i, uint32_t j) const;
    int64_t ms_rightmost(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                         query_stats* stats = nullptr) const;
    int64_t ms_topmost(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                       query_stats* stats = nullptr) const;
    uint64_t ms_skycount(uint32_t v, uint32_t i, uint32_t j, uint32_t b, uint32_t t,
                         query_stats* stats = nullptr) const;

    // decoded signature of block blk (1-based) of node v
    block_signature block(uint32_t v, uint32_t blk) const;

    // memoized block-level queries (positions clamped to the block size)
    uint32_t blk_below(uint32_t v, uint32_t blk, uint32_t t, uint32_t i,
                       query_stats* stats = nullptr) const;
    int32_t blk_rightmost(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                          uint32_t j, query_stats* stats = nullptr) const;
    int32_t blk_topmost(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                        uint32_t j, query_stats* stats = nullptr) const;
    uint32_t blk_skycount(uint32_t v, uint32_t blk, uint32_t b, uint32_t t, uint32_t i,
                          uint32_t j, query_stats* stats = nullptr) const;

    // topmost point of L_v[lo..hi] within slabs [i,j]; -1 when none
    int64_t topmost_in(uint32_t v, uint32_t lo, uint32_t hi, uint32_t i, uint32_t j,
                       query_stats* stats = nullptr) const;

    // ---- geometry ----
    uint64_t n() const { return m_n; }
    uint32_t delta() const { return m_delta; }
    uint32_t levels() const { return m_levels; }  // includes the leaf level
    uint32_t height() const { return m_levels; }
    uint32_t node_count() const { return uint32_t(m_nodes.size()); }
    uint32_t root() const { return 0; }
    const node& at(uint32_t v) const { return m_nodes[v]; }
    uint32_t leaf_of(uint32_t xrank) const;
    uint32_t block_count(uint32_t v) const { return (m_nodes[v].n_v + m_block - 1) / m_block; }
    uint32_t block_len(uint32_t v, uint32_t blk) const {
        return std::min(m_nodes[v].n_v, blk * m_block) - (blk - 1) * m_block;
    }
    uint32_t block_span() const { return m_block; }  // Delta^2

    uint64_t memo_capacity() const { return m_memo_capacity; }
    void set_memo_capacity(uint64_t cap) {
        m_memo_capacity = cap;
        if (cap && !m_memo) m_memo = std::make_unique<memo_cache>();
    }

    void save(std::ostream& os) const;
    void load(std::istream& is);

    // The multislab traversal shared by counting and reporting: invokes
    // fn(v, slab_lo, slab_hi, y_lo, y_hi) right-to-left with the bottom bound
    // already raised past the topmost point of the slabs processed so far.
    template <typename F>
    void for_each_multislab(rank_rect r, query_stats* stats, F&& fn) const;

private:
    friend class tree_builder;

    struct path_entry {
        uint32_t node;
        uint32_t k;        // continuing child (1-based)
        uint32_t slab_lo, slab_hi;
    };
    struct decomposition {
        std::vector<std::pair<uint32_t, uint32_t>> spine;  // (node, child k) above the lca
        uint32_t lca = nil;
        uint32_t mid_lo = 1, mid_hi = 0;
        uint32_t left_k = 0, right_k = 0;  // lca children toward x1 / x2 (0 = none)
        std::vector<path_entry> right_path;  // shallow -> deep
        std::vector<path_entry> left_path;   // shallow -> deep
    };
    decomposition decompose_x(uint32_t x1, uint32_t x2) const;

    static base_tree make_shape(uint64_t n, uint32_t delta);
    uint32_t child_containing(uint32_t v, uint32_t x) const;
    uint32_t slab_index(uint32_t v, uint32_t i, uint32_t j) const;
    uint64_t slot_count(uint32_t v, uint32_t i, uint32_t j, uint32_t lo, uint32_t hi,
                        query_stats* stats) const;
    friend std::vector<rank_point> report_rank(const base_tree&, const class ball_inheritance&,
                                               const point_set&, rank_rect, query_stats*);
    friend class report_driver;

    uint32_t blk_of(uint32_t t) const { return (t - 1) / m_block + 1; }
    uint32_t pos_of(uint32_t t) const { return (t - 1) % m_block + 1; }

    uint64_t memo_get(uint64_t key, bool& hit) const;
    void memo_put(uint64_t key, uint64_t value) const;
    uint64_t memo_key(uint32_t v, uint32_t blk, uint32_t op, uint64_t args) const;

    uint64_t m_n = 0;
    uint32_t m_delta = 2;
    uint32_t m_block = 4;  // Delta^2
    uint32_t m_levels = 0;
    std::vector<node> m_nodes;              // root first, level by level
    std::vector<uint32_t> m_level_offset;   // node index of first node per level
    std::vector<uint64_t> m_delta_pow;      // Delta^k

    struct memo_cache {
        std::mutex mutex;
        std::unordered_map<uint64_t, uint64_t> map;
    };
    mutable uint64_t m_memo_capacity = 0;
    mutable std::unique_ptr<memo_cache> m_memo;
};

template <typename F>
void base_tree::for_each_multislab(rank_rect r, query_stats* stats, F&& fn) const {
    if (m_n == 0 || r.x1 > r.x2 || r.y1 > r.y2 || r.x1 >= m_n || r.y1 >= m_n) return;
    uint32_t x1 = r.x1, x2 = std::min<uint32_t>(r.x2, uint32_t(m_n - 1));
    uint32_t y1 = r.y1, y2 = std::min<uint32_t>(r.y2, uint32_t(m_n - 1));
    if (m_n == 1) {
        // single leaf: no internal structure; callers handle the root-leaf case
        return;
    }
    decomposition d = decompose_x(x1, x2);

    auto touch = [&](uint32_t) { if (stats) ++stats->nodes_visited; };

    // static top/bottom propagation down the spine
    uint32_t bot = y1 + 1, top = y2 + 1;
    for (auto [v, k] : d.spine) {
        touch(v);
        const node& nv = m_nodes[v];
        if (top == 0 || bot > nv.n_v) return;
        uint32_t nb = succ(v, bot, k);
        uint32_t nt = pred(v, top, k);
        bot = nb;
        top = nt;
    }
    touch(d.lca);
    const node& lca_nd = m_nodes[d.lca];
    if (top == 0 || bot > lca_nd.n_v || bot > top) return;

    // static bounds down the right boundary path; sentinel-propagating
    std::vector<uint32_t> rtops(d.right_path.size()), rbots(d.right_path.size());
    {
        uint32_t b2 = bot, t2 = top, pv = d.lca, pk = d.right_k;
        for (size_t idx = 0; idx < d.right_path.size(); ++idx) {
            uint32_t u = d.right_path[idx].node;
            touch(u);
            uint32_t nu = m_nodes[u].n_v;
            uint32_t nb = (b2 > m_nodes[pv].n_v) ? nu + 1 : succ(pv, b2, pk);
            uint32_t nt = (t2 == 0) ? 0 : pred(pv, t2, pk);
            rbots[idx] = b2 = nb;
            rtops[idx] = t2 = nt;
            pv = u;
            pk = d.right_path[idx].k;
        }
    }
    std::vector<uint32_t> ltops(d.left_path.size());
    {
        uint32_t t2 = top, pv = d.lca, pk = d.left_k;
        for (size_t idx = 0; idx < d.left_path.size(); ++idx) {
            uint32_t u = d.left_path[idx].node;
            touch(u);
            t2 = (t2 == 0) ? 0 : pred(pv, t2, pk);
            ltops[idx] = t2;
            pv = u;
            pk = d.left_path[idx].k;
        }
    }

    auto run_slot = [&](uint32_t v, uint32_t slo, uint32_t shi, uint32_t& cur, uint32_t vtop) {
        if (slo > shi) return;
        if (stats) ++stats->multislabs;
        uint32_t lo = cur, hi = std::min(vtop, m_nodes[v].n_v);
        if (lo >= 1 && lo <= hi) {
            fn(v, slo, shi, lo, hi);
            int64_t tm = topmost_in(v, lo, hi, slo, shi, stats);
            if (tm >= 0) cur = uint32_t(tm) + 1;
        }
    };

    // walk right path deepest-first, raising the bottom as we go
    uint32_t cur = d.right_path.empty() ? bot : rbots.back();
    for (size_t idx = d.right_path.size(); idx-- > 0;) {
        const path_entry& pe = d.right_path[idx];
        run_slot(pe.node, pe.slab_lo, pe.slab_hi, cur, rtops[idx]);
        // lift the bound to the parent list
        uint32_t parent = idx == 0 ? d.lca : d.right_path[idx - 1].node;
        uint32_t lifted = cur >= 2 ? pi(pe.node, cur - 1) + 1 : 1;
        uint32_t stat = idx == 0 ? bot : rbots[idx - 1];
        cur = std::max(lifted, stat);
        (void)parent;
    }
    run_slot(d.lca, d.mid_lo, d.mid_hi, cur, top);

    // descend the left path
    uint32_t pv = d.lca, pk = d.left_k;
    for (size_t idx = 0; idx < d.left_path.size(); ++idx) {
        const path_entry& pe = d.left_path[idx];
        cur = (cur > m_nodes[pv].n_v) ? m_nodes[pe.node].n_v + 1 : succ(pv, cur, pk);
        run_slot(pe.node, pe.slab_lo, pe.slab_hi, cur, ltops[idx]);
        pv = pe.node;
        pk = pe.k;
    }
}

}  // namespace skycount
