#include "skycount/points.hpp"

#include <algorithm>
#include <stdexcept>

namespace skycount {

point_set point_set::rank_reduce(std::vector<raw_point> raw) {
    if (raw.size() > (uint64_t(1) << 31))
        throw std::invalid_argument("rank_reduce: point count exceeds 2^31");
    point_set ps;
    std::sort(raw.begin(), raw.end(), [](raw_point a, raw_point b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    for (size_t i = 1; i < raw.size(); ++i)
        if (raw[i] == raw[i - 1]) throw std::invalid_argument("rank_reduce: duplicate point");
    ps.m_raw_by_x = std::move(raw);

    uint32_t n = uint32_t(ps.m_raw_by_x.size());
    std::vector<uint32_t> by_y(n);
    for (uint32_t i = 0; i < n; ++i) by_y[i] = i;
    std::sort(by_y.begin(), by_y.end(), [&](uint32_t a, uint32_t b) {
        const raw_point &pa = ps.m_raw_by_x[a], &pb = ps.m_raw_by_x[b];
        return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
    });
    ps.m_x_to_y.assign(n, 0);
    ps.m_y_to_x = std::move(by_y);
    for (uint32_t r = 0; r < n; ++r) ps.m_x_to_y[ps.m_y_to_x[r]] = r;
    return ps;
}

std::optional<rank_rect> point_set::map_rect(query_rect r) const {
    r = r.normalized();
    uint32_t n = size();
    if (n == 0) return std::nullopt;
    // x keys: primary raw x, so one-axis ties land inside the bounds
    auto x_key = [&](uint32_t i) { return m_raw_by_x[i].x; };
    auto lower_x = [&](int64_t v) {
        uint32_t lo = 0, hi = n;
        while (lo < hi) { uint32_t m = (lo + hi) / 2; if (x_key(m) < v) lo = m + 1; else hi = m; }
        return lo;
    };
    auto upper_x = [&](int64_t v) {
        uint32_t lo = 0, hi = n;
        while (lo < hi) { uint32_t m = (lo + hi) / 2; if (x_key(m) <= v) lo = m + 1; else hi = m; }
        return lo;
    };
    auto y_key = [&](uint32_t r2) { return m_raw_by_x[m_y_to_x[r2]].y; };
    auto lower_y = [&](int64_t v) {
        uint32_t lo = 0, hi = n;
        while (lo < hi) { uint32_t m = (lo + hi) / 2; if (y_key(m) < v) lo = m + 1; else hi = m; }
        return lo;
    };
    auto upper_y = [&](int64_t v) {
        uint32_t lo = 0, hi = n;
        while (lo < hi) { uint32_t m = (lo + hi) / 2; if (y_key(m) <= v) lo = m + 1; else hi = m; }
        return lo;
    };
    uint32_t x1 = lower_x(r.x1), x2 = upper_x(r.x2);
    uint32_t y1 = lower_y(r.y1), y2 = upper_y(r.y2);
    if (x1 >= x2 || y1 >= y2) return std::nullopt;
    return rank_rect{x1, x2 - 1, y1, y2 - 1};
}

void point_set::save(std::ostream& os) const {
    io::write_u64(os, m_raw_by_x.size());
    for (const auto& p : m_raw_by_x) {
        io::write_i64(os, p.x);
        io::write_i64(os, p.y);
    }
    io::write_u32_vec(os, m_x_to_y);
    io::write_u32_vec(os, m_y_to_x);
}

void point_set::load(std::istream& is) {
    uint64_t n = io::read_u64(is);
    if (n > (uint64_t(1) << 31)) throw std::runtime_error("point_set: implausible size");
    m_raw_by_x.resize(n);
    for (auto& p : m_raw_by_x) {
        p.x = io::read_i64(is);
        p.y = io::read_i64(is);
    }
    io::read_u32_vec(is, m_x_to_y);
    io::read_u32_vec(is, m_y_to_x);
    if (m_x_to_y.size() != n || m_y_to_x.size() != n)
        throw std::runtime_error("point_set: corrupt payload");
}

namespace {

template <typename P, typename R>
std::vector<P> skyline_impl(const std::vector<P>& pts, R r) {
    std::vector<P> in;
    for (const auto& p : pts)
        if (p.x >= r.x1 && p.x <= r.x2 && p.y >= r.y1 && p.y <= r.y2) in.push_back(p);
    std::sort(in.begin(), in.end(), [](const P& a, const P& b) {
        return a.x != b.x ? a.x > b.x : a.y > b.y;
    });
    std::vector<P> out;
    bool have_max = false;
    decltype(P{}.y) max_y{};
    for (const auto& p : in) {
        if (!have_max || p.y > max_y) {
            out.push_back(p);
            max_y = p.y;
            have_max = true;
        }
    }
    return out;
}

}  // namespace

std::vector<raw_point> oracle_skyline(const std::vector<raw_point>& pts, query_rect r) {
    return skyline_impl(pts, r.normalized());
}

std::vector<rank_point> oracle_skyline(const std::vector<rank_point>& pts, rank_rect r) {
    return skyline_impl(pts, r);
}

uint64_t oracle_count(const std::vector<raw_point>& pts, query_rect r) {
    return oracle_skyline(pts, r).size();
}

uint64_t oracle_count(const std::vector<rank_point>& pts, rank_rect r) {
    return oracle_skyline(pts, r).size();
}

}  // namespace skycount
