#include <stdexcept>

#include "skycount/reporting.hpp"

namespace skycount {

ball_inheritance ball_inheritance::build(const base_tree& tree, uint32_t fan,
                                         const std::vector<std::vector<uint32_t>>& lists) {
    if (fan < 2) throw std::invalid_argument("ball_inheritance: fan must be >= 2");
    ball_inheritance bi;
    bi.m_fan = fan;
    bi.m_jumps.resize(tree.node_count());
    for (uint32_t v = 1; v < tree.node_count(); ++v) {
        const auto& nd = tree.at(v);
        if (nd.is_leaf()) continue;  // resolution never starts below the last internal level
        uint32_t level = nd.level;
        uint64_t p = 1;
        for (uint32_t i = 0; level % p == 0; ++i, p *= fan) {
            uint64_t pnext = p * fan;
            uint32_t target_level = uint32_t((level - 1) / pnext * pnext);
            uint32_t u = v;
            while (tree.at(u).level > target_level) u = tree.at(u).parent;
            const auto& lu = lists[u];
            const auto& lv = lists[v];
            std::vector<uint64_t> ones;
            ones.reserve(lv.size());
            size_t k = 0;
            for (size_t pos = 0; pos < lu.size() && k < lv.size(); ++pos)
                if (lu[pos] == lv[k]) {
                    ones.push_back(pos);
                    ++k;
                }
            bi.m_jumps[v].push_back({sparse_bitvector::from_ones(lu.size(), ones), u});
            if (target_level == 0) break;
            if (pnext > tree.levels()) break;
        }
    }
    return bi;
}

rank_point ball_inheritance::resolve(const base_tree& tree, const point_set& ps, uint32_t v,
                                     uint32_t idx, query_stats* stats) const {
    while (v != tree.root()) {
        const auto& nd = tree.at(v);
        if (nd.is_leaf() || v >= m_jumps.size() || m_jumps[v].empty()) {
            // no stored jump: fall back to one parent hop
            idx = tree.pi(v, idx);
            v = nd.parent;
        } else {
            const jump& j = m_jumps[v].back();
            idx = uint32_t(j.sel.select1(idx));
            v = j.target;
        }
        if (stats) ++stats->resolve_jumps;
    }
    return ps.at_yrank(idx - 1);
}

uint64_t ball_inheritance::size_bits() const {
    uint64_t bits = 0;
    for (const auto& js : m_jumps)
        for (const auto& j : js) bits += j.sel.size_bits() + 32;
    return bits;
}

void ball_inheritance::save(std::ostream& os) const {
    io::write_u32(os, m_fan);
    io::write_u64(os, m_jumps.size());
    for (const auto& js : m_jumps) {
        io::write_u32(os, uint32_t(js.size()));
        for (const auto& j : js) {
            io::write_u32(os, j.target);
            j.sel.save(os);
        }
    }
}

void ball_inheritance::load(std::istream& is) {
    m_fan = io::read_u32(is);
    uint64_t n = io::read_u64(is);
    if (n > (uint64_t(1) << 33)) throw std::runtime_error("ball_inheritance: implausible size");
    m_jumps.assign(n, {});
    for (auto& js : m_jumps) {
        uint32_t c = io::read_u32(is);
        js.resize(c);
        for (auto& j : js) {
            j.target = io::read_u32(is);
            j.sel.load(is);
        }
    }
}

namespace {

// Emission machinery for one multislab query; produces L_v indices in
// strictly decreasing x order and resolves them through the ball structure.
class slot_emitter {
public:
    slot_emitter(const base_tree& tree, const ball_inheritance& ball, const point_set& ps,
                 std::vector<rank_point>& out, query_stats* stats)
        : m_tree(tree), m_ball(ball), m_ps(ps), m_out(out), m_stats(stats) {}

    // number of points emitted for this slot
    uint64_t run(uint32_t v, uint32_t i, uint32_t j, uint32_t lo, uint32_t hi) {
        m_emitted = 0;
        uint32_t blk = m_tree.block_span();
        uint32_t blo = (lo - 1) / blk + 1, bhi = (hi - 1) / blk + 1;
        uint32_t plo = (lo - 1) % blk + 1, phi = (hi - 1) % blk + 1;
        if (blo == bhi) {
            block_recursion(v, bhi, plo, phi, i, j, false);
            return m_emitted;
        }
        // p1 and its slab
        int32_t r1 = m_tree.blk_rightmost(v, bhi, 1, phi, i, j, m_stats);
        bool have_p1 = r1 >= 0;
        uint32_t p1 = have_p1 ? (bhi - 1) * blk + uint32_t(r1) : 0;
        uint32_t k1 = have_p1 ? m_tree.child_index(v, p1) : i - 1;

        int64_t p3 = -1;
        if (blo + 1 <= bhi - 1 && k1 + 1 <= j)
            p3 = m_tree.ms_rightmost(v, k1 + 1, j, blo + 1, bhi - 1, m_stats);

        if (p3 >= 0) {
            int64_t p2 = m_tree.ms_topmost(v, k1 + 1, j, blo + 1, bhi - 1, m_stats);
            uint32_t k3 = m_tree.child_index(v, uint32_t(p3));
            int64_t p4 = -1;
            if (k3 + 1 <= j) {
                int32_t r4 = m_tree.blk_topmost(v, blo, plo, blk, k3 + 1, j, m_stats);
                if (r4 >= 0) p4 = int64_t(blo - 1) * blk + r4;
            }
            // (3) bottom block, slabs right of k3
            if (k3 + 1 <= j) block_recursion(v, blo, plo, blk, k3 + 1, j, false);
            // (5) slab k3 from above p4 (or the bottom) up to p3, p3 emitted here
            {
                uint32_t a5 = p4 >= 0 ? m_tree.succ(v, uint32_t(p4), k3) : m_tree.succ(v, lo, k3);
                uint32_t b5 = m_tree.pred(v, uint32_t(p3), k3);
                child_recursion(v, k3, a5, b5);
            }
            // (2) the block walk over the middle, skipping the p3 duplicate
            middle_walk(v, k1 + 1, j, uint32_t(p3), bhi);
            // (4) slab k1 from above p2 up to p1, p1 emitted here
            if (have_p1) {
                uint32_t a4 = m_tree.succ(v, uint32_t(p2) + 1, k1);
                uint32_t b4 = m_tree.pred(v, p1, k1);
                child_recursion(v, k1, a4, b4);
            }
            // (1) top block, skipping the p1 duplicate
            block_recursion(v, bhi, 1, phi, i, j, have_p1);
        } else {
            int64_t p4 = -1;
            if (k1 + 1 <= j) {
                int32_t r4 = m_tree.blk_topmost(v, blo, plo, blk, k1 + 1, j, m_stats);
                if (r4 >= 0) p4 = int64_t(blo - 1) * blk + r4;
                block_recursion(v, blo, plo, blk, k1 + 1, j, false);  // (3) from slab k1+1
            }
            if (have_p1) {
                uint32_t a4 = p4 >= 0 ? m_tree.succ(v, uint32_t(p4) + 1, k1) : m_tree.succ(v, lo, k1);
                uint32_t b4 = m_tree.pred(v, p1, k1);
                child_recursion(v, k1, a4, b4);
            }
            block_recursion(v, bhi, 1, phi, i, j, have_p1);
        }
        return m_emitted;
    }

private:
    void emit(uint32_t v, uint32_t idx) {
        m_out.push_back(m_ball.resolve(m_tree, m_ps, v, idx, m_stats));
        ++m_emitted;
        if (m_stats) ++m_stats->reported;
    }

    // rightmost-recursion within one block
    void block_recursion(uint32_t v, uint32_t blk_no, uint32_t from, uint32_t to, uint32_t i,
                         uint32_t j, bool skip_first) {
        uint32_t span = m_tree.block_span();
        uint32_t pos = from;
        bool first = true;
        while (pos <= to) {
            int32_t r = m_tree.blk_rightmost(v, blk_no, pos, to, i, j, m_stats);
            if (r < 0) break;
            if (!(skip_first && first)) emit(v, (blk_no - 1) * span + uint32_t(r));
            first = false;
            pos = uint32_t(r) + 1;
        }
    }

    // rightmost-recursion over a child list range [a, b]; emits via the
    // child's parent select so resolution starts at v
    void child_recursion(uint32_t v, uint32_t k, uint32_t a, uint32_t b) {
        uint32_t child = m_tree.at(v).first_child + k - 1;
        uint32_t cur = a;
        while (cur <= b) {
            uint32_t r = m_tree.rightmost_v(child, cur, b);
            emit(v, m_tree.pi(child, r));
            cur = r + 1;
        }
    }

    // true iff x(f) < x(q) for two indices of L_v (x values are distinct)
    bool x_less(uint32_t v, uint32_t f, uint32_t q) {
        uint32_t cf = m_tree.child_index(v, f);
        uint32_t cq = m_tree.child_index(v, q);
        if (cf != cq) return cf < cq;
        uint32_t child = m_tree.at(v).first_child + cf - 1;
        uint32_t fi = m_tree.pred(v, f, cf);
        uint32_t qi = m_tree.pred(v, q, cq);
        return m_tree.rightmost_v(child, fi, qi) == qi;
    }

    // block-aligned middle of the five-subrange decomposition: walk the
    // skyline blocks right to left via ms_rightmost, extracting in-block
    // points until one is dominated by the next block's rightmost point
    void middle_walk(uint32_t v, uint32_t i, uint32_t j, uint32_t p3, uint32_t bhi) {
        uint32_t span = m_tree.block_span();
        uint32_t q = p3;  // already emitted by (5)
        while (true) {
            uint32_t qblk = (q - 1) / span + 1;
            int64_t qnext = -1;
            if (qblk + 1 <= bhi - 1) qnext = m_tree.ms_rightmost(v, i, j, qblk + 1, bhi - 1, m_stats);
            uint32_t pos = (q - 1) % span + 2;
            while (pos <= span) {
                int32_t r = m_tree.blk_rightmost(v, qblk, pos, span, i, j, m_stats);
                if (r < 0) break;
                uint32_t f = (qblk - 1) * span + uint32_t(r);
                if (qnext >= 0 && x_less(v, f, uint32_t(qnext))) break;
                emit(v, f);
                pos = uint32_t(r) + 1;
            }
            if (qnext < 0) break;
            emit(v, uint32_t(qnext));
            q = uint32_t(qnext);
        }
    }

    const base_tree& m_tree;
    const ball_inheritance& m_ball;
    const point_set& m_ps;
    std::vector<rank_point>& m_out;
    query_stats* m_stats;
    uint64_t m_emitted = 0;
};

}  // namespace

std::vector<rank_point> report_rank(const base_tree& tree, const ball_inheritance& ball,
                                    const point_set& ps, rank_rect r, query_stats* stats) {
    std::vector<rank_point> out;
    if (tree.n() == 0) return out;
    if (r.x1 > r.x2 || r.y1 > r.y2 || r.x1 >= tree.n() || r.y1 >= tree.n()) return out;
    if (tree.n() == 1) {
        if (stats) ++stats->nodes_visited;
        if (r.x1 == 0 && r.y1 == 0) out.push_back(ps.at_xrank(0));
        return out;
    }
    slot_emitter em(tree, ball, ps, out, stats);
    tree.for_each_multislab(r, stats, [&](uint32_t v, uint32_t i, uint32_t j, uint32_t lo, uint32_t hi) {
        uint64_t c = em.run(v, i, j, lo, hi);
        if (stats && stats->trace) stats->trace->push_back({v, i, j, lo, hi, c});
    });
    return out;
}

}  // namespace skycount
