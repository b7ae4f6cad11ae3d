#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "skycount/points.hpp"

using namespace skycount;

TEST_CASE("dominance is non-strict") {
    CHECK(dominates(raw_point{2, 2}, raw_point{1, 1}));
    CHECK_FALSE(dominates(raw_point{1, 2}, raw_point{2, 1}));
    CHECK(dominates(raw_point{3, 3}, raw_point{3, 3}));
}

TEST_CASE("rank reduction basics") {
    auto ps = point_set::rank_reduce({{10, 70}, {20, 30}, {5, 90}});
    // x-ranks by ascending x: 5 -> 0, 10 -> 1, 20 -> 2
    CHECK(ps.raw_at_xrank(0) == raw_point{5, 90});
    CHECK(ps.at_xrank(0).y == 2);
    CHECK(ps.at_xrank(1).y == 1);
    CHECK(ps.at_xrank(2).y == 0);

    auto single = point_set::rank_reduce({{0, 0}});
    CHECK(single.at_xrank(0) == rank_point{0, 0});

    CHECK_THROWS_AS(point_set::rank_reduce({{1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("shared-coordinate ties preserve dominance") {
    auto ps = point_set::rank_reduce({{4, 1}, {4, 9}});
    // x tie broken by ascending y
    CHECK(ps.raw_at_xrank(0) == raw_point{4, 1});
    CHECK(ps.raw_at_xrank(1) == raw_point{4, 9});
    CHECK(dominates(ps.at_xrank(1), ps.at_xrank(0)));
    CHECK_FALSE(dominates(ps.at_xrank(0), ps.at_xrank(1)));
}

TEST_CASE("rank reduction preserves pairwise dominance") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int64_t> c(-20, 20);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<raw_point> raw;
        std::set<std::pair<int64_t, int64_t>> seen;
        while (raw.size() < 40) {
            raw_point p{c(rng), c(rng)};
            if (seen.insert({p.x, p.y}).second) raw.push_back(p);
        }
        auto ps = point_set::rank_reduce(raw);
        // match each raw point to its rank point
        std::vector<rank_point> reduced(raw.size());
        std::map<std::pair<int64_t, int64_t>, rank_point> by_raw;
        for (uint32_t i = 0; i < ps.size(); ++i) {
            raw_point rp = ps.raw_at_xrank(i);
            by_raw[{rp.x, rp.y}] = ps.at_xrank(i);
        }
        for (size_t i = 0; i < raw.size(); ++i) reduced[i] = by_raw.at({raw[i].x, raw[i].y});
        for (size_t i = 0; i < raw.size(); ++i)
            for (size_t j = 0; j < raw.size(); ++j)
                CHECK(dominates(raw[i], raw[j]) == dominates(reduced[i], reduced[j]));
    }
}

TEST_CASE("map_rect examples") {
    auto ps = point_set::rank_reduce({{10, 70}, {20, 30}});
    auto full = ps.map_rect({10, 20, 0, 100});
    REQUIRE(full.has_value());
    CHECK(full->x1 == 0);
    CHECK(full->x2 == 1);
    CHECK(full->y1 == 0);
    CHECK(full->y2 == 1);

    CHECK_FALSE(ps.map_rect({11, 19, 0, 100}).has_value());

    auto one = ps.map_rect({15, 25, 0, 50});
    REQUIRE(one.has_value());
    CHECK(one->x1 == 1);
    CHECK(one->x2 == 1);
    CHECK(one->y1 == 0);
    CHECK(one->y2 == 0);
}

TEST_CASE("map_rect membership is exact") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int64_t> c(-15, 15);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<raw_point> raw;
        std::set<std::pair<int64_t, int64_t>> seen;
        while (raw.size() < 30) {
            raw_point p{c(rng), c(rng)};
            if (seen.insert({p.x, p.y}).second) raw.push_back(p);
        }
        auto ps = point_set::rank_reduce(raw);
        for (int q = 0; q < 30; ++q) {
            query_rect r{c(rng), c(rng), c(rng), c(rng)};
            r = r.normalized();
            auto rr = ps.map_rect(r);
            for (uint32_t i = 0; i < ps.size(); ++i) {
                raw_point rp = ps.raw_at_xrank(i);
                rank_point kp = ps.at_xrank(i);
                bool in_raw = rp.x >= r.x1 && rp.x <= r.x2 && rp.y >= r.y1 && rp.y <= r.y2;
                bool in_rank = rr && kp.x >= rr->x1 && kp.x <= rr->x2 && kp.y >= rr->y1 &&
                               kp.y <= rr->y2;
                CHECK(in_raw == in_rank);
            }
        }
    }
}

TEST_CASE("oracle skyline basics") {
    std::vector<raw_point> chain{{0, 0}, {1, 1}, {2, 2}};
    auto sky = oracle_skyline(chain, {0, 2, 0, 2});
    REQUIRE(sky.size() == 1);
    CHECK(sky[0] == raw_point{2, 2});

    std::vector<raw_point> anti{{0, 2}, {1, 1}, {2, 0}};
    auto s2 = oracle_skyline(anti, {0, 2, 0, 2});
    REQUIRE(s2.size() == 3);
    CHECK(s2[0] == raw_point{2, 0});
    CHECK(s2[1] == raw_point{1, 1});
    CHECK(s2[2] == raw_point{0, 2});

    auto s3 = oracle_skyline(chain, {0, 1, 0, 2});
    REQUIRE(s3.size() == 1);
    CHECK(s3[0] == raw_point{1, 1});

    CHECK(oracle_count(chain, {0, 2, 0, 2}) == 1);
    CHECK(oracle_count(anti, {0, 2, 0, 2}) == 3);
    CHECK(oracle_count(chain, {0, 1, 0, 2}) == 1);
}

TEST_CASE("oracle output satisfies the membership predicate and ordering") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int64_t> c(0, 40);
    for (int rep = 0; rep < 60; ++rep) {
        std::vector<raw_point> pts;
        std::set<std::pair<int64_t, int64_t>> seen;
        while (pts.size() < 50) {
            raw_point p{c(rng), c(rng)};
            if (seen.insert({p.x, p.y}).second) pts.push_back(p);
        }
        query_rect r{c(rng), c(rng), c(rng), c(rng)};
        r = r.normalized();
        auto sky = oracle_skyline(pts, r);
        auto inside = [&](raw_point p) {
            return p.x >= r.x1 && p.x <= r.x2 && p.y >= r.y1 && p.y <= r.y2;
        };
        for (size_t i = 1; i < sky.size(); ++i) {
            CHECK(sky[i].x < sky[i - 1].x);
            CHECK(sky[i].y > sky[i - 1].y);
        }
        for (const auto& p : pts) {
            if (!inside(p)) continue;
            bool maximal = true;
            for (const auto& q : pts)
                if (inside(q) && !(q == p) && dominates(q, p)) maximal = false;
            bool in_sky = std::find(sky.begin(), sky.end(), p) != sky.end();
            CHECK(maximal == in_sky);
        }
    }
}
