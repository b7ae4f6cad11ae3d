#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "skycount/container.hpp"
#include "skycount/points.hpp"

namespace skycount {

// Reduction from reachability in butterfly subgraphs to two-sided skyline
// counting; used as a correctness harness and benchmark workload generator.

// base-B digit reversal of t, written with d digits
uint64_t rev_digits(uint64_t t, uint32_t base, uint32_t depth);

struct urect {
    uint64_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    bool operator==(const urect&) const = default;
};

// the rectangle of edge e_k(i, j); throws if (k, i, j) is not a butterfly edge
urect edge_rect(uint32_t base, uint32_t depth, uint32_t k, uint64_t i, uint64_t j);

// the coordinate spreading that keeps distinct layers' corners incomparable
urect transform_pi(urect r, uint32_t k, uint32_t depth);

// Subgraph of the degree-B depth-d butterfly as an edge membership set.
// Edges are addressed by (layer k, node i, digit value c) where the head j
// equals i with digit k replaced by c.
class butterfly_subgraph {
public:
    butterfly_subgraph(uint32_t base, uint32_t depth, bool present = true);

    static butterfly_subgraph full(uint32_t base, uint32_t depth) { return {base, depth, true}; }
    static butterfly_subgraph empty(uint32_t base, uint32_t depth) { return {base, depth, false}; }
    static butterfly_subgraph random(uint32_t base, uint32_t depth, double retain, uint64_t seed);

    uint32_t base() const { return m_base; }
    uint32_t depth() const { return m_depth; }
    uint64_t layer_nodes() const { return m_layer_nodes; }

    uint64_t edge_id(uint32_t k, uint64_t i, uint32_t c) const {
        return (uint64_t(k) * m_layer_nodes + i) * m_base + c;
    }
    bool has(uint32_t k, uint64_t i, uint32_t c) const { return m_edges[edge_id(k, i, c)]; }
    void set(uint32_t k, uint64_t i, uint32_t c, bool present) { m_edges[edge_id(k, i, c)] = present; }

    // head node of edge (k, i, c)
    uint64_t head(uint32_t k, uint64_t i, uint32_t c) const;
    // digit value of edge e_k(i, j); validates the edge shape
    uint32_t digit_of_edge(uint32_t k, uint64_t i, uint64_t j) const;

    uint64_t edge_count() const;

private:
    uint32_t m_base, m_depth;
    uint64_t m_layer_nodes;  // B^d
    std::vector<bool> m_edges;
};

// layered forward traversal; the independent reachability oracle
bool bfs_reachable(const butterfly_subgraph& g, uint64_t s, uint64_t t);

// The derived point set P(G): one point per marked rectangle, two per
// unmarked one, after the pi transform and coordinate doubling.
struct reduction_instance {
    uint32_t base = 0, depth = 0;
    std::vector<raw_point> points;
    std::vector<uint8_t> marked;  // per point: provenance of its rectangle

    static reduction_instance build(const butterfly_subgraph& g);

    // the two-sided reachability query as a four-sided rectangle
    query_rect reach_query(uint64_t s, uint64_t t) const;
};

// count == d means reachable; count < d signals an implementation bug
bool reach_via_skyline(const reduction_instance& inst, const skyline_index& index, uint64_t s,
                       uint64_t t);

// lower-left corners of all pi-transformed rectangles (the set P' of the
// skyline correspondence lemma, before doubling and marking)
std::vector<raw_point> corner_set(uint32_t base, uint32_t depth);

// dual brute-force check of the skyline/stabbing correspondence at (x, y)
bool lemma4_check(uint32_t base, uint32_t depth, uint64_t x, uint64_t y);

}  // namespace skycount
