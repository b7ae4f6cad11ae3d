#pragma once

#include <cstdint>
#include <vector>

#include "skycount/points.hpp"
#include "skycount/sparse_bitvector.hpp"
#include "skycount/tree.hpp"

namespace skycount {

// Ball-inheritance select hierarchy: nodes at a level divisible by B^i store
// a select structure into the nearest ancestor at a level divisible by
// B^(i+1), so an index into any L_v reaches the root list in
// O(log_B log_Delta n) jumps. Levels are numbered from the root (= 0).
class ball_inheritance {
public:
    ball_inheritance() = default;

    static ball_inheritance build(const base_tree& tree, uint32_t fan,
                                  const std::vector<std::vector<uint32_t>>& lists);

    uint32_t fan() const { return m_fan; }
    bool empty() const { return m_jumps.empty(); }

    // the point L_v[idx]; idx is 1-based
    rank_point resolve(const base_tree& tree, const point_set& ps, uint32_t v, uint32_t idx,
                       query_stats* stats = nullptr) const;

    uint64_t size_bits() const;

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    struct jump {
        sparse_bitvector sel;
        uint32_t target = 0;
    };
    uint32_t m_fan = 0;
    std::vector<std::vector<jump>> m_jumps;  // by node id; ascending jump width
};

// Skyline reporting: exactly Skyline(P cap R) in strictly decreasing x order.
std::vector<rank_point> report_rank(const base_tree& tree, const ball_inheritance& ball,
                                    const point_set& ps, rank_rect r,
                                    query_stats* stats = nullptr);

}  // namespace skycount
