#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skycount/io.hpp"

namespace skycount {

struct raw_point {
    int64_t x = 0;
    int64_t y = 0;
    bool operator==(const raw_point&) const = default;
};

struct rank_point {
    uint32_t x = 0;
    uint32_t y = 0;
    bool operator==(const rank_point&) const = default;
};

// Closed query rectangle in raw coordinates.
struct query_rect {
    int64_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    query_rect normalized() const {
        query_rect r = *this;
        if (r.x1 > r.x2) std::swap(r.x1, r.x2);
        if (r.y1 > r.y2) std::swap(r.y1, r.y2);
        return r;
    }
};

// Closed query rectangle in rank space.
struct rank_rect {
    uint32_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;
};

inline bool dominates(raw_point p, raw_point q) { return q.x <= p.x && q.y <= p.y; }
inline bool dominates(rank_point p, rank_point q) { return q.x <= p.x && q.y <= p.y; }

// Rank-space point set plus the coordinate key maps that translate raw
// rectangles to rank rectangles. Ties on a single axis are broken so that
// pairwise dominance is preserved exactly: x ties by ascending y, y ties by
// ascending x.
class point_set {
public:
    point_set() = default;

    // throws std::invalid_argument on duplicate points
    static point_set rank_reduce(std::vector<raw_point> raw);

    uint32_t size() const { return uint32_t(m_x_to_y.size()); }

    // point with x-rank i
    rank_point at_xrank(uint32_t i) const { return {i, m_x_to_y[i]}; }
    raw_point raw_at_xrank(uint32_t i) const { return m_raw_by_x[i]; }
    uint32_t y_to_x(uint32_t yrank) const { return m_y_to_x[yrank]; }
    rank_point at_yrank(uint32_t r) const { return {m_y_to_x[r], r}; }
    raw_point raw_of(rank_point p) const { return m_raw_by_x[p.x]; }

    // rank rectangle containing exactly the points inside r, or nullopt
    std::optional<rank_rect> map_rect(query_rect r) const;

    uint64_t size_bits() const { return 128 * m_raw_by_x.size() + 64 * m_x_to_y.size(); }

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    std::vector<raw_point> m_raw_by_x;  // sorted by (x, y)
    std::vector<uint32_t> m_x_to_y;     // x-rank -> y-rank
    std::vector<uint32_t> m_y_to_x;     // y-rank -> x-rank
};

// Brute-force skyline oracle: maximal points of pts restricted to r, sorted
// by strictly decreasing x (hence strictly increasing y). O(n lg n).
std::vector<raw_point> oracle_skyline(const std::vector<raw_point>& pts, query_rect r);
std::vector<rank_point> oracle_skyline(const std::vector<rank_point>& pts, rank_rect r);
uint64_t oracle_count(const std::vector<raw_point>& pts, query_rect r);
uint64_t oracle_count(const std::vector<rank_point>& pts, rank_rect r);

}  // namespace skycount
