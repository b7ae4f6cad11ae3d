#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skycount/tree.hpp"

namespace skycount {

namespace {

uint32_t default_delta(uint64_t n) {
    if (n < 2) return 2;
    double lg = std::log2(double(n));
    return std::max<uint32_t>(2, uint32_t(std::ceil(std::pow(lg, 0.25))));
}

}  // namespace

base_tree base_tree::make_shape(uint64_t n, uint32_t delta) {
    base_tree t;
    t.m_n = n;
    t.m_delta = delta;
    if (t.m_delta < 2 || t.m_delta > 64)
        throw std::invalid_argument("base_tree: delta must be in [2, 64]");
    t.m_block = t.m_delta * t.m_delta;
    if (n == 0) {
        t.m_levels = 0;
        return t;
    }

    // level sizes, root (level 0) downward; leaves at the last level
    std::vector<uint64_t> level_count{n};
    while (level_count.back() > 1)
        level_count.push_back((level_count.back() + t.m_delta - 1) / t.m_delta);
    std::reverse(level_count.begin(), level_count.end());
    uint32_t levels = uint32_t(level_count.size());
    t.m_levels = levels;

    t.m_delta_pow.assign(levels + 1, 1);
    for (uint32_t k = 1; k <= levels; ++k) t.m_delta_pow[k] = t.m_delta_pow[k - 1] * t.m_delta;

    t.m_level_offset.assign(levels + 1, 0);
    for (uint32_t l = 0; l < levels; ++l)
        t.m_level_offset[l + 1] = t.m_level_offset[l] + uint32_t(level_count[l]);
    t.m_nodes.assign(t.m_level_offset[levels], node{});

    // shape: node (l, idx) has children (l+1, idx*delta ...)
    for (uint32_t l = 0; l < levels; ++l) {
        uint32_t leaf_span = uint32_t(levels - 1 - l);
        for (uint64_t idx = 0; idx < level_count[l]; ++idx) {
            node& nd = t.m_nodes[t.m_level_offset[l] + idx];
            nd.level = l;
            uint64_t span = t.m_delta_pow[leaf_span];
            nd.x_lo = uint32_t(idx * span);
            nd.x_hi = uint32_t(std::min(n, (idx + 1) * span) - 1);
            if (l + 1 < levels) {
                uint64_t cb = idx * t.m_delta;
                uint64_t ce = std::min<uint64_t>(level_count[l + 1], cb + t.m_delta);
                nd.first_child = t.m_level_offset[l + 1] + uint32_t(cb);
                nd.child_count = uint32_t(ce - cb);
                for (uint64_t c = cb; c < ce; ++c)
                    t.m_nodes[t.m_level_offset[l + 1] + c].parent = t.m_level_offset[l] + uint32_t(idx);
            } else {
                nd.child_count = 0;
            }
            nd.n_v = nd.x_hi - nd.x_lo + 1;
        }
    }
    return t;
}

base_tree base_tree::build(const point_set& ps, const build_options& opt,
                           std::vector<std::vector<uint32_t>>* lists_out) {
    uint32_t delta = opt.delta == 0 ? default_delta(ps.size()) : opt.delta;
    base_tree t = make_shape(ps.size(), delta);
    t.set_memo_capacity(opt.memo_capacity);

    uint64_t n = t.m_n;
    if (n == 0) {
        if (lists_out) lists_out->clear();
        return t;
    }

    // materialize y-sorted lists top-down: root list is the identity on
    // y-ranks, each child list is the stable restriction by x-interval
    std::vector<std::vector<uint32_t>> lists(t.m_nodes.size());
    lists[0].resize(n);
    for (uint32_t r = 0; r < n; ++r) lists[0][r] = r;
    for (uint32_t v = 0; v < t.m_nodes.size(); ++v) {
        const node& nv = t.m_nodes[v];
        if (nv.is_leaf()) continue;
        for (uint32_t yr : lists[v]) {
            uint32_t x = ps.y_to_x(yr);
            uint32_t c = t.child_containing(v, x);
            lists[nv.first_child + c - 1].push_back(yr);
        }
    }

    uint32_t block = t.m_block;
    uint32_t cw = std::max<uint32_t>(1, bits_for(delta - 1));
    uint32_t rw = std::max<uint32_t>(1, bits_for(uint64_t(block) - 1));

    for (uint32_t v = 0; v < t.m_nodes.size(); ++v) {
        node& nv = t.m_nodes[v];
        const std::vector<uint32_t>& lv = lists[v];
        uint32_t nvn = nv.n_v;

        // pi_v for every non-root node, leaves included
        if (v != 0) {
            const std::vector<uint32_t>& lp = lists[nv.parent];
            std::vector<uint64_t> ones;
            ones.reserve(nvn);
            for (uint32_t p = 0; p < lp.size(); ++p) {
                uint32_t x = ps.y_to_x(lp[p]);
                if (x >= nv.x_lo && x <= nv.x_hi) ones.push_back(p);
            }
            nv.parent_sel = sparse_bitvector::from_ones(lp.size(), ones);
        }

        if (opt.keep_lists) nv.debug_list = lv;
        if (nv.is_leaf()) continue;

        uint32_t d = nv.child_count;
        uint32_t blocks = (nvn + block - 1) / block;

        // block signatures carry (child, within-child rank) per point
        nv.sig.assign(nvn, cw + rw);
        std::vector<uint32_t> child_of(nvn);
        for (uint32_t p = 0; p < nvn; ++p)
            child_of[p] = t.child_containing(v, ps.y_to_x(lv[p]));
        {
            std::vector<std::pair<uint32_t, uint32_t>> scratch;  // (x, slot)
            for (uint32_t b = 0; b < blocks; ++b) {
                uint32_t lo = b * block, hi = std::min(nvn, (b + 1) * block);
                for (uint32_t c = 1; c <= d; ++c) {
                    scratch.clear();
                    for (uint32_t p = lo; p < hi; ++p)
                        if (child_of[p] == c) scratch.emplace_back(ps.y_to_x(lv[p]), p);
                    std::sort(scratch.begin(), scratch.end());
                    for (uint32_t r = 0; r < scratch.size(); ++r) {
                        uint32_t p = scratch[r].second;
                        nv.sig.set(p, (uint64_t(child_of[p] - 1) << rw) | r);
                    }
                }
            }
        }
        if (blocks == 1) continue;  // the signature answers everything

        // per-child block counts X^i, child-major concatenation
        {
            std::vector<uint64_t> counts(uint64_t(d) * blocks, 0);
            for (uint32_t p = 0; p < nvn; ++p)
                ++counts[uint64_t(child_of[p] - 1) * blocks + p / block];
            nv.child_prefix.build(counts);
        }

        // Rightmost_v over the x-ranks of L_v
        std::vector<uint32_t> xs(nvn);
        for (uint32_t p = 0; p < nvn; ++p) xs[p] = ps.y_to_x(lv[p]);
        nv.rightmost.build(xs);

        // dominated-count array: X[i] = points of Skyline(L_v[1..i-1]) dominated by L_v[i]
        {
            std::vector<uint64_t> dom(nvn, 0);
            std::vector<uint32_t> stack;  // skyline as x-descending stack (top = smallest x)
            for (uint32_t p = 0; p < nvn; ++p) {
                uint32_t x = xs[p];
                uint32_t kills = 0;
                while (!stack.empty() && stack.back() <= x) {
                    stack.pop_back();
                    ++kills;
                }
                dom[p] = kills;
                stack.push_back(x);
            }
            nv.dominated.build(dom);
        }

        // multislab structures, pair-major segments of `blocks` entries each
        uint64_t pairs = uint64_t(d) * (d + 1) / 2;
        std::vector<uint64_t> rvals(pairs * blocks), tvals(pairs * blocks);
        std::vector<uint64_t> xcnt(pairs * blocks), ycnt(pairs * blocks);
        std::vector<uint32_t> cum, blk_sky;
        for (uint32_t i = 1; i <= d; ++i) {
            for (uint32_t j = i; j <= d; ++j) {
                uint64_t seg = uint64_t(t.slab_index(v, i, j)) * blocks;
                cum.clear();
                for (uint32_t b = 0; b < blocks; ++b) {
                    uint32_t lo = b * block, hi = std::min(nvn, (b + 1) * block);
                    uint64_t maxx = 0;
                    bool any = false;
                    blk_sky.clear();
                    uint32_t sky = 0;
                    uint32_t running_max = 0;
                    for (uint32_t p = hi; p-- > lo;) {  // top-down for the block skyline
                        if (child_of[p] < i || child_of[p] > j) continue;
                        any = true;
                        if (uint64_t(xs[p]) + 1 > maxx) maxx = uint64_t(xs[p]) + 1;
                        if (sky == 0 || xs[p] > running_max) {
                            ++sky;
                            running_max = xs[p];
                            blk_sky.push_back(xs[p]);
                        }
                    }
                    std::reverse(blk_sky.begin(), blk_sky.end());  // ascending y = descending x
                    rvals[seg + b] = maxx;
                    tvals[seg + b] = any ? b + 1 : 0;
                    xcnt[seg + b] = sky;
                    uint32_t kills = 0;
                    if (any) {
                        uint32_t mx = uint32_t(maxx - 1);
                        while (!cum.empty() && cum.back() <= mx) {
                            cum.pop_back();
                            ++kills;
                        }
                        for (uint32_t xv : blk_sky) cum.push_back(xv);
                    }
                    ycnt[seg + b] = kills;
                }
            }
        }
        nv.ms_right.build(rvals);
        nv.ms_top.build(tvals);
        nv.ms_x.build(xcnt);
        nv.ms_y.build(ycnt);
    }

    if (lists_out) *lists_out = std::move(lists);
    return t;
}

uint32_t base_tree::child_containing(uint32_t v, uint32_t x) const {
    const node& nv = m_nodes[v];
    uint32_t leaf_span = m_levels - 1 - nv.level;
    uint64_t child_span = m_delta_pow[leaf_span - 1];
    uint64_t first_local = nv.first_child - m_level_offset[nv.level + 1];
    return uint32_t(x / child_span - first_local) + 1;
}

uint32_t base_tree::leaf_of(uint32_t xrank) const { return m_level_offset[m_levels - 1] + xrank; }

uint32_t base_tree::slab_index(uint32_t v, uint32_t i, uint32_t j) const {
    uint32_t d = m_nodes[v].child_count;
    return (i - 1) * d - (i - 2) * (i - 1) / 2 + (j - i);
}

}  // namespace skycount
