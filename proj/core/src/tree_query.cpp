#include "skycount/tree.hpp"

namespace skycount {

// Canonical x-decomposition: descend while both endpoints share a child, then
// peel boundary paths. Every internal node contributes at most one multislab;
// boundary children that are fully covered (or are leaves) are absorbed into
// the adjacent multislab.
base_tree::decomposition base_tree::decompose_x(uint32_t x1, uint32_t x2) const {
    decomposition d;
    uint32_t v = root();
    while (true) {
        uint32_t a = child_containing(v, x1);
        uint32_t b = child_containing(v, x2);
        if (a == b) {
            uint32_t c = m_nodes[v].first_child + a - 1;
            if (m_nodes[c].is_leaf()) {
                d.lca = v;
                d.mid_lo = a;
                d.mid_hi = a;
                return d;
            }
            d.spine.emplace_back(v, a);
            v = c;
            continue;
        }
        d.lca = v;
        const node& nv = m_nodes[v];
        uint32_t ca = nv.first_child + a - 1;
        uint32_t cb = nv.first_child + b - 1;
        // left side
        if (m_nodes[ca].x_lo == x1) {
            d.mid_lo = a;
        } else {
            d.mid_lo = a + 1;
            d.left_k = a;
            uint32_t u = ca;
            while (true) {
                uint32_t k = child_containing(u, x1);
                uint32_t c = m_nodes[u].first_child + k - 1;
                if (m_nodes[c].x_lo == x1) {
                    d.left_path.push_back({u, k, k, m_nodes[u].child_count});
                    break;
                }
                d.left_path.push_back({u, k, k + 1, m_nodes[u].child_count});
                u = c;
            }
        }
        // right side
        if (m_nodes[cb].x_hi == x2) {
            d.mid_hi = b;
        } else {
            d.mid_hi = b - 1;
            d.right_k = b;
            uint32_t u = cb;
            while (true) {
                uint32_t k = child_containing(u, x2);
                uint32_t c = m_nodes[u].first_child + k - 1;
                if (m_nodes[c].x_hi == x2) {
                    d.right_path.push_back({u, k, 1, k});
                    break;
                }
                d.right_path.push_back({u, k, 1, k - 1});
                u = c;
            }
        }
        return d;
    }
}

uint64_t base_tree::count(rank_rect r, query_stats* stats) const {
    if (m_n == 0) return 0;
    if (r.x1 > r.x2 || r.y1 > r.y2 || r.x1 >= m_n || r.y1 >= m_n) return 0;
    if (m_n == 1) {
        if (stats) ++stats->nodes_visited;
        return (r.x1 == 0 && r.y1 == 0) ? 1 : 0;
    }
    uint64_t total = 0;
    for_each_multislab(r, stats, [&](uint32_t v, uint32_t i, uint32_t j, uint32_t lo, uint32_t hi) {
        uint64_t c = slot_count(v, i, j, lo, hi, stats);
        if (stats && stats->trace)
            stats->trace->push_back({v, i, j, lo, hi, c});
        total += c;
    });
    return total;
}

// The five-subrange evaluation of one multislab query: node v, child slabs
// [i, j], list index range [lo, hi] of L_v (all 1-based, range non-empty).
uint64_t base_tree::slot_count(uint32_t v, uint32_t i, uint32_t j, uint32_t lo, uint32_t hi,
                               query_stats* stats) const {
    uint32_t blo = blk_of(lo), bhi = blk_of(hi);
    uint32_t plo = pos_of(lo), phi = pos_of(hi);
    if (blo == bhi) {
        uint32_t c = blk_skycount(v, bhi, plo, phi, i, j, stats);
        return c;
    }

    uint64_t total = 0;
    const node& nv = m_nodes[v];

    // (1) top block and the rightmost point p1 within it
    total += blk_skycount(v, bhi, 1, phi, i, j, stats);
    int32_t r1 = blk_rightmost(v, bhi, 1, phi, i, j, stats);
    uint32_t p1 = 0, k1map = 0;
    bool have_p1 = r1 >= 0;
    if (have_p1) {
        p1 = (bhi - 1) * m_block + uint32_t(r1);
        k1map = child_index(v, p1);
    }
    uint32_t k1 = have_p1 ? k1map : i - 1;

    // (2) block-aligned middle restricted to slabs [k1+1, j]
    int64_t p2 = -1, p3 = -1;
    bool have_mid_range = blo + 1 <= bhi - 1 && k1 + 1 <= j;
    if (have_mid_range) p3 = ms_rightmost(v, k1 + 1, j, blo + 1, bhi - 1, stats);

    if (p3 >= 0) {
        p2 = ms_topmost(v, k1 + 1, j, blo + 1, bhi - 1, stats);
        total += ms_skycount(v, k1 + 1, j, blo + 1, bhi - 1, stats);
        uint32_t k3 = child_index(v, uint32_t(p3));

        // (3) bottom block right of slab k3
        int64_t p4 = -1;
        if (k3 + 1 <= j) {
            total += blk_skycount(v, blo, plo, m_block, k3 + 1, j, stats);
            int32_t r4 = blk_topmost(v, blo, plo, m_block, k3 + 1, j, stats);
            if (r4 >= 0) p4 = int64_t(blo - 1) * m_block + r4;
        }

        // (5) slab k3 between p4 (or the query bottom) and p3
        {
            uint32_t a5 = p4 >= 0 ? succ(v, uint32_t(p4), k3) : succ(v, lo, k3);
            uint32_t b5 = pred(v, uint32_t(p3), k3);
            total += skycount_range(nv.first_child + k3 - 1, a5, b5) - 1;
        }
        // (4) slab k1 between p2 and p1
        if (have_p1) {
            uint32_t a4 = succ(v, uint32_t(p2) + 1, k1);
            uint32_t b4 = pred(v, p1, k1);
            total += skycount_range(nv.first_child + k1 - 1, a4, b4) - 1;
        }
    } else {
        // middle empty: (2) and (5) vanish, (3) starts at slab k1+1 and (4)
        // stretches down to just above p4, or to the query bottom
        int64_t p4 = -1;
        if (k1 + 1 <= j) {
            total += blk_skycount(v, blo, plo, m_block, k1 + 1, j, stats);
            int32_t r4 = blk_topmost(v, blo, plo, m_block, k1 + 1, j, stats);
            if (r4 >= 0) p4 = int64_t(blo - 1) * m_block + r4;
        }
        if (have_p1) {
            uint32_t a4 = p4 >= 0 ? succ(v, uint32_t(p4) + 1, k1) : succ(v, lo, k1);
            uint32_t b4 = pred(v, p1, k1);
            total += skycount_range(nv.first_child + k1 - 1, a4, b4) - 1;
        }
    }
    return total;
}

std::vector<multislab_query> base_tree::decompose(rank_rect r) const {
    std::vector<multislab_query> out;
    if (m_n <= 1 || r.x1 > r.x2 || r.y1 > r.y2 || r.x1 >= m_n || r.y1 >= m_n) return out;
    uint32_t x2 = std::min<uint32_t>(r.x2, uint32_t(m_n - 1));
    uint32_t y2 = std::min<uint32_t>(r.y2, uint32_t(m_n - 1));
    decomposition d = decompose_x(r.x1, x2);

    uint32_t bot = r.y1 + 1, top = y2 + 1;
    for (auto [v, k] : d.spine) {
        if (top == 0 || bot > m_nodes[v].n_v) {
            bot = 1;
            top = 0;
            break;
        }
        uint32_t nb = succ(v, bot, k);
        top = pred(v, top, k);
        bot = nb;
    }
    // static bounds along both boundary paths (successor of y1, predecessor of y2)
    std::vector<std::pair<uint32_t, uint32_t>> rb(d.right_path.size()), lb(d.left_path.size());
    {
        uint32_t b2 = bot, t2 = top, pv = d.lca, pk = d.right_k;
        for (size_t idx = 0; idx < d.right_path.size(); ++idx) {
            uint32_t u = d.right_path[idx].node;
            uint32_t nb = (b2 > m_nodes[pv].n_v) ? m_nodes[u].n_v + 1 : succ(pv, b2, pk);
            uint32_t nt = (t2 == 0) ? 0 : pred(pv, t2, pk);
            rb[idx] = {b2 = nb, t2 = nt};
            pv = u;
            pk = d.right_path[idx].k;
        }
    }
    {
        uint32_t b2 = bot, t2 = top, pv = d.lca, pk = d.left_k;
        for (size_t idx = 0; idx < d.left_path.size(); ++idx) {
            uint32_t u = d.left_path[idx].node;
            uint32_t nb = (b2 > m_nodes[pv].n_v) ? m_nodes[u].n_v + 1 : succ(pv, b2, pk);
            uint32_t nt = (t2 == 0) ? 0 : pred(pv, t2, pk);
            lb[idx] = {b2 = nb, t2 = nt};
            pv = u;
            pk = d.left_path[idx].k;
        }
    }
    for (size_t idx = d.right_path.size(); idx-- > 0;) {
        const path_entry& pe = d.right_path[idx];
        if (pe.slab_lo <= pe.slab_hi)
            out.push_back({pe.node, pe.slab_lo, pe.slab_hi, rb[idx].first, rb[idx].second});
    }
    if (d.mid_lo <= d.mid_hi) out.push_back({d.lca, d.mid_lo, d.mid_hi, bot, top});
    for (size_t idx = 0; idx < d.left_path.size(); ++idx) {
        const path_entry& pe = d.left_path[idx];
        if (pe.slab_lo <= pe.slab_hi)
            out.push_back({pe.node, pe.slab_lo, pe.slab_hi, lb[idx].first, lb[idx].second});
    }
    return out;
}

}  // namespace skycount
