#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skycount/points.hpp"
#include "skycount/reporting.hpp"
#include "skycount/tree.hpp"

namespace skycount {

// Per-structure-kind and per-level space accounting, in payload bits.
struct space_report {
    uint64_t n = 0;
    uint32_t delta = 0;
    uint32_t ball_fan = 0;
    uint32_t levels = 0;

    struct kind_entry {
        std::string name;
        uint64_t bits = 0;
    };
    std::vector<kind_entry> kinds;
    std::vector<uint64_t> level_bits;  // tree structures only, by level
    uint64_t total_bits = 0;
    double bits_per_point = 0.0;
    double ratio_n_lg_n = 0.0;

    void print(std::ostream& os) const;
};

// The buildable, persistable index: rank-reduced points, the counting tree,
// and (optionally) the ball-inheritance reporting structure.
class skyline_index {
public:
    struct build_params {
        uint32_t delta = 0;         // 0 = auto
        uint32_t ball_fan = 2;      // 0 = counting-only index
        uint64_t memo_capacity = 0;
        bool keep_lists = false;    // test builds
    };

    skyline_index() = default;

    static skyline_index build(std::vector<raw_point> points, const build_params& p);

    uint64_t n() const { return m_points.size(); }
    const point_set& points() const { return m_points; }
    const base_tree& tree() const { return m_tree; }
    const ball_inheritance& ball() const { return m_ball; }
    bool has_ball() const { return m_ball_fan != 0; }
    uint32_t ball_fan() const { return m_ball_fan; }

    uint64_t count(query_rect r, query_stats* stats = nullptr) const;
    std::vector<raw_point> report(query_rect r, query_stats* stats = nullptr) const;

    uint64_t count_rank(rank_rect r, query_stats* stats = nullptr) const {
        return m_tree.count(r, stats);
    }
    std::vector<rank_point> report_in_rank_space(rank_rect r, query_stats* stats = nullptr) const {
        return skycount::report_rank(m_tree, m_ball, m_points, r, stats);
    }

    space_report space() const;

    // container format: "SKYC" magic, version, parameter block, sections,
    // trailing fnv64 checksum; little-endian throughout
    void save(std::ostream& os) const;
    static skyline_index load(std::istream& is);
    void save_file(const std::string& path) const;
    static skyline_index load_file(const std::string& path);

    static constexpr uint32_t format_version = 1;

private:
    point_set m_points;
    base_tree m_tree;
    ball_inheritance m_ball;
    uint32_t m_ball_fan = 0;
};

}  // namespace skycount
