#include <limits>
#include <algorithm>
#include <set>
#include <stdexcept>

#include "skycount/butterfly.hpp"

namespace skycount {

namespace {

uint64_t ipow(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

uint32_t digit(uint64_t v, uint32_t k, uint32_t base) {
    while (k--) v /= base;
    return uint32_t(v % base);
}

}  // namespace

uint64_t rev_digits(uint64_t t, uint32_t base, uint32_t depth) {
    if (t >= ipow(base, depth)) throw std::out_of_range("rev_digits: value out of range");
    uint64_t r = 0;
    for (uint32_t k = 0; k < depth; ++k) {
        r = r * base + t % base;
        t /= base;
    }
    return r;
}

urect edge_rect(uint32_t base, uint32_t depth, uint32_t k, uint64_t i, uint64_t j) {
    uint64_t nd = ipow(base, depth);
    if (k >= depth || i >= nd || j >= nd) throw std::invalid_argument("edge_rect: out of range");
    // v(i) and v(j) must agree outside digit k
    uint64_t pk = ipow(base, k);
    if (i / (pk * base) != j / (pk * base) || i % pk != j % pk)
        throw std::invalid_argument("edge_rect: not a butterfly edge");
    // x fixes the d-k high digits of i; y fixes digits 0..k of j, reversed
    urect r;
    r.x1 = i / pk * pk;
    r.x2 = r.x1 + pk - 1;
    uint64_t free_y = ipow(base, depth - 1 - k);
    r.y1 = rev_digits(j, base, depth) / free_y * free_y;
    r.y2 = r.y1 + free_y - 1;
    return r;
}

urect transform_pi(urect r, uint32_t k, uint32_t depth) {
    uint64_t d = depth;
    return {d * r.x1 + (d - 1 - k), d * r.x2 + d - 1, d * r.y1 + k, d * r.y2 + d - 1};
}

butterfly_subgraph::butterfly_subgraph(uint32_t base, uint32_t depth, bool present)
    : m_base(base), m_depth(depth), m_layer_nodes(ipow(base, depth)) {
    if (base < 2 || depth < 1) throw std::invalid_argument("butterfly: base >= 2, depth >= 1");
    m_edges.assign(uint64_t(depth) * m_layer_nodes * base, present);
}

butterfly_subgraph butterfly_subgraph::random(uint32_t base, uint32_t depth, double retain,
                                              uint64_t seed) {
    butterfly_subgraph g(base, depth, false);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (uint32_t k = 0; k < depth; ++k)
        for (uint64_t i = 0; i < g.m_layer_nodes; ++i)
            for (uint32_t c = 0; c < base; ++c)
                if (u(rng) < retain) g.set(k, i, c, true);
    return g;
}

uint64_t butterfly_subgraph::head(uint32_t k, uint64_t i, uint32_t c) const {
    uint64_t pk = ipow(m_base, k);
    uint64_t low = i % pk;
    uint64_t high = i / (pk * m_base) * (pk * m_base);
    return high + uint64_t(c) * pk + low;
}

uint32_t butterfly_subgraph::digit_of_edge(uint32_t k, uint64_t i, uint64_t j) const {
    uint64_t pk = ipow(m_base, k);
    if (i / (pk * m_base) != j / (pk * m_base) || i % pk != j % pk)
        throw std::invalid_argument("butterfly: not an edge");
    return digit(j, k, m_base);
}

uint64_t butterfly_subgraph::edge_count() const {
    uint64_t c = 0;
    for (bool b : m_edges) c += b;
    return c;
}

bool bfs_reachable(const butterfly_subgraph& g, uint64_t s, uint64_t t) {
    uint64_t nd = g.layer_nodes();
    if (s >= nd || t >= nd) throw std::out_of_range("bfs_reachable: node out of range");
    std::vector<bool> frontier(nd, false), next(nd, false);
    frontier[s] = true;
    for (uint32_t k = 0; k < g.depth(); ++k) {
        std::fill(next.begin(), next.end(), false);
        for (uint64_t i = 0; i < nd; ++i) {
            if (!frontier[i]) continue;
            for (uint32_t c = 0; c < g.base(); ++c)
                if (g.has(k, i, c)) next[g.head(k, i, c)] = true;
        }
        frontier.swap(next);
    }
    return frontier[t];
}

reduction_instance reduction_instance::build(const butterfly_subgraph& g) {
    reduction_instance inst;
    inst.base = g.base();
    inst.depth = g.depth();
    for (uint32_t k = 0; k < g.depth(); ++k) {
        for (uint64_t i = 0; i < g.layer_nodes(); ++i) {
            for (uint32_t c = 0; c < g.base(); ++c) {
                uint64_t j = g.head(k, i, c);
                urect r = transform_pi(edge_rect(g.base(), g.depth(), k, i, j), k, g.depth());
                int64_t x = int64_t(2 * r.x1), y = int64_t(2 * r.y1);
                if (g.has(k, i, c)) {
                    inst.points.push_back({x + 1, y + 1});
                    inst.marked.push_back(1);
                } else {
                    inst.points.push_back({x + 1, y});
                    inst.marked.push_back(0);
                    inst.points.push_back({x, y + 1});
                    inst.marked.push_back(0);
                }
            }
        }
    }
    return inst;
}

query_rect reduction_instance::reach_query(uint64_t s, uint64_t t) const {
    int64_t d = depth;
    int64_t qx = 2 * d * (int64_t(s) + 1) - 1;
    int64_t qy = 2 * d * (int64_t(rev_digits(t, base, depth)) + 1) - 1;
    return {0, qx, 0, qy};
}

bool reach_via_skyline(const reduction_instance& inst, const skyline_index& index, uint64_t s,
                       uint64_t t) {
    uint64_t c = index.count(inst.reach_query(s, t));
    if (c < inst.depth) throw std::logic_error("reach_via_skyline: count below the layer floor");
    return c == inst.depth;
}

std::vector<raw_point> corner_set(uint32_t base, uint32_t depth) {
    butterfly_subgraph g = butterfly_subgraph::full(base, depth);
    std::vector<raw_point> out;
    for (uint32_t k = 0; k < depth; ++k)
        for (uint64_t i = 0; i < g.layer_nodes(); ++i)
            for (uint32_t c = 0; c < base; ++c) {
                urect r = transform_pi(edge_rect(base, depth, k, i, g.head(k, i, c)), k, depth);
                out.push_back({int64_t(r.x1), int64_t(r.y1)});
            }
    return out;
}

bool lemma4_check(uint32_t base, uint32_t depth, uint64_t x, uint64_t y) {
    butterfly_subgraph g = butterfly_subgraph::full(base, depth);
    std::vector<raw_point> corners = corner_set(base, depth);
    int64_t d = depth;
    query_rect q{std::numeric_limits<int64_t>::min(), d * int64_t(x) + d - 1,
                 std::numeric_limits<int64_t>::min(), d * int64_t(y) + d - 1};
    auto sky = oracle_skyline(corners, q);

    std::set<std::pair<int64_t, int64_t>> expected;
    for (uint32_t k = 0; k < depth; ++k)
        for (uint64_t i = 0; i < g.layer_nodes(); ++i)
            for (uint32_t c = 0; c < base; ++c) {
                urect r = edge_rect(base, depth, k, i, g.head(k, i, c));
                if (x >= r.x1 && x <= r.x2 && y >= r.y1 && y <= r.y2) {
                    urect t2 = transform_pi(r, k, depth);
                    expected.insert({int64_t(t2.x1), int64_t(t2.y1)});
                }
            }
    if (expected.size() != depth) return false;  // exactly one stab per layer
    std::set<std::pair<int64_t, int64_t>> got;
    for (auto p : sky) got.insert({p.x, p.y});
    return got == expected;
}

}  // namespace skycount
