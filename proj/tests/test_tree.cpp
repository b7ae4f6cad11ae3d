#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "skycount/tree.hpp"

using namespace skycount;

namespace {

struct fixture {
    point_set ps;
    base_tree tree;
    std::vector<std::vector<uint32_t>> lists;  // y-ranks per node
};

fixture make_fixture(const std::vector<raw_point>& raw, uint32_t delta) {
    fixture f;
    f.ps = point_set::rank_reduce(raw);
    base_tree::build_options opt;
    opt.delta = delta;
    opt.keep_lists = true;
    f.tree = base_tree::build(f.ps, opt, &f.lists);
    return f;
}

std::vector<raw_point> permutation_points(uint32_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> perm(n);
    for (uint32_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<raw_point> pts(n);
    for (uint32_t i = 0; i < n; ++i) pts[i] = {int64_t(i), int64_t(perm[i])};
    return pts;
}

std::vector<rank_point> rank_points(const point_set& ps) {
    std::vector<rank_point> pts(ps.size());
    for (uint32_t i = 0; i < ps.size(); ++i) pts[i] = ps.at_xrank(i);
    return pts;
}

// the multislab's restricted point set, via the materialized list
std::vector<rank_point> slab_points(const fixture& f, uint32_t v, uint32_t i, uint32_t j,
                                    uint32_t lo, uint32_t hi) {
    std::vector<rank_point> pts;
    const auto& lv = f.lists[v];
    for (uint32_t t = lo; t <= hi && t <= lv.size(); ++t) {
        uint32_t c = f.tree.child_index(v, t);
        if (c >= i && c <= j) pts.push_back(f.ps.at_yrank(lv[t - 1]));
    }
    return pts;
}

}  // namespace

TEST_CASE("shapes: n=16 delta=4") {
    auto f = make_fixture(permutation_points(16, 1), 4);
    CHECK(f.tree.levels() == 3);
    CHECK(f.tree.at(f.tree.root()).child_count == 4);
    uint32_t internal = 0;
    for (uint32_t v = 0; v < f.tree.node_count(); ++v)
        if (!f.tree.at(v).is_leaf() && v != f.tree.root()) ++internal;
    CHECK(internal == 4);
}

TEST_CASE("shapes: degenerate single point") {
    auto f = make_fixture({{7, 3}}, 4);
    CHECK(f.tree.levels() == 1);
    CHECK(f.tree.node_count() == 1);
    CHECK(f.tree.at(0).is_leaf());
    CHECK(f.tree.count({0, 0, 0, 0}) == 1);
    CHECK(f.tree.count({0, 0, 1, 1}) == 0);
}

TEST_CASE("parameter validation") {
    auto ps = point_set::rank_reduce(permutation_points(8, 2));
    base_tree::build_options opt;
    opt.delta = 1;
    CHECK_THROWS_AS(base_tree::build(ps, opt), std::invalid_argument);
}

TEST_CASE("block signature fixture") {
    block_signature sig({{1, 1}, {2, 1}, {1, 2}, {2, 2}});
    CHECK(sig.below(3, 1) == 2);
    CHECK(sig.below(4, 2) == 2);
    CHECK(sig.below(1, 2) == 0);

    CHECK(sig.rightmost(1, 4, 1, 2) == 4);
    CHECK(sig.rightmost(1, 4, 1, 1) == 3);
    CHECK(sig.rightmost(1, 2, 1, 1) == 1);
    CHECK(sig.rightmost(1, 1, 2, 2) == -1);

    CHECK(sig.topmost(1, 3, 2, 2) == 2);
    CHECK(sig.topmost(1, 4, 1, 2) == 4);
    CHECK(sig.topmost(2, 2, 1, 1) == -1);

    CHECK(sig.skycount(1, 4, 1, 2) == 1);
    CHECK(sig.skycount(2, 3, 1, 2) == 2);
    CHECK(sig.skycount(1, 1, 1, 1) == 1);
}

TEST_CASE("signature width stays within the block budget") {
    for (uint32_t delta : {2u, 3u, 5u}) {
        auto f = make_fixture(permutation_points(300, delta), delta);
        uint64_t block = f.tree.block_span();
        for (uint32_t v = 0; v < f.tree.node_count(); ++v) {
            const auto& nd = f.tree.at(v);
            if (nd.is_leaf()) continue;
            uint64_t per_block_bits = nd.sig.width() * block;
            uint64_t budget = block * (bits_for(delta - 1) + bits_for(block - 1)) + 64;
            CHECK(per_block_bits <= budget);
        }
    }
}

TEST_CASE("pred/succ against materialized pi arrays") {
    auto f = make_fixture(permutation_points(200, 3), 3);
    for (uint32_t v = 0; v < f.tree.node_count(); ++v) {
        const auto& nd = f.tree.at(v);
        if (nd.is_leaf()) continue;
        for (uint32_t c = 1; c <= nd.child_count; ++c) {
            uint32_t child = nd.first_child + c - 1;
            const auto& lc = f.lists[child];
            // materialized pi: position of each child element in the parent list
            std::vector<uint32_t> pi_arr(lc.size());
            std::map<uint32_t, uint32_t> pos_of;
            for (uint32_t p = 0; p < f.lists[v].size(); ++p) pos_of[f.lists[v][p]] = p + 1;
            for (uint32_t k = 0; k < lc.size(); ++k) pi_arr[k] = pos_of.at(lc[k]);
            for (uint32_t t = 1; t <= nd.n_v; ++t) {
                uint32_t pred_naive = 0;
                while (pred_naive < lc.size() && pi_arr[pred_naive] <= t) ++pred_naive;
                uint32_t succ_naive = 1;
                while (succ_naive <= lc.size() && pi_arr[succ_naive - 1] < t) ++succ_naive;
                CHECK(f.tree.pred(v, t, c) == pred_naive);
                CHECK(f.tree.succ(v, t, c) == succ_naive);
            }
            // membership case: pred == succ at owned positions
            for (uint32_t k = 0; k < lc.size(); ++k)
                CHECK(f.tree.pred(v, pi_arr[k], c) == f.tree.succ(v, pi_arr[k], c));
        }
    }
}

TEST_CASE("pi round-trips through the parent list") {
    auto f = make_fixture(permutation_points(150, 4), 4);
    for (uint32_t v = 1; v < f.tree.node_count(); ++v) {
        const auto& nd = f.tree.at(v);
        for (uint32_t i = 1; i <= nd.n_v; ++i) {
            uint32_t p = f.tree.pi(v, i);
            CHECK(f.lists[nd.parent][p - 1] == f.lists[v][i - 1]);
        }
    }
}

TEST_CASE("rightmost_v equals the naive x scan") {
    auto f = make_fixture(permutation_points(200, 7), 3);
    for (uint32_t v = 0; v < f.tree.node_count(); ++v) {
        const auto& nd = f.tree.at(v);
        if (nd.is_leaf()) continue;
        const auto& lv = f.lists[v];
        auto x_of = [&](uint32_t t) { return f.ps.y_to_x(lv[t - 1]); };
        for (uint32_t i = 1; i <= nd.n_v; ++i) {
            uint32_t limit = std::min(nd.n_v, i + 32);
            for (uint32_t j = i; j <= limit; ++j) {
                uint32_t best = i;
                for (uint32_t k2 = i; k2 <= j; ++k2)
                    if (x_of(k2) > x_of(best)) best = k2;
                CHECK(f.tree.rightmost_v(v, i, j) == best);
            }
        }
        CHECK(f.tree.rightmost_v(v, 1, 1) == 1);
    }
}

TEST_CASE("skyline prefix counts: anchored six-point instance") {
    // dominated counts 0,0,2,0,1,0 in list order; skyline of the prefix of
    // six has size 6 - 3 = 3
    auto f = make_fixture({{4, 0}, {2, 1}, {5, 2}, {1, 3}, {3, 4}, {0, 5}}, 3);
    CHECK(f.tree.skycount_prefix(f.tree.root(), 6) == 3);
    CHECK(f.tree.skycount_prefix(f.tree.root(), 1) == 1);
    CHECK(f.tree.count({0, 5, 0, 5}) == 3);
}

TEST_CASE("skyline prefix and range match the oracle") {
    auto f = make_fixture(permutation_points(180, 11), 3);
    std::mt19937_64 rng(4);
    for (uint32_t v = 0; v < f.tree.node_count(); ++v) {
        const auto& nd = f.tree.at(v);
        if (nd.is_leaf()) continue;
        const auto& lv = f.lists[v];
        std::vector<rank_point> pts;
        for (uint32_t yr : lv) pts.push_back(f.ps.at_yrank(yr));
        rank_rect all{0, uint32_t(f.ps.size()), 0, uint32_t(f.ps.size())};
        for (uint32_t i = 1; i <= nd.n_v; ++i) {
            std::vector<rank_point> prefix(pts.begin(), pts.begin() + i);
            CHECK(f.tree.skycount_prefix(v, i) == oracle_count(prefix, all));
        }
        for (int q = 0; q < 40; ++q) {
            uint32_t i = 1 + rng() % nd.n_v, j = 1 + rng() % nd.n_v;
            if (i > j) std::swap(i, j);
            std::vector<rank_point> span(pts.begin() + i - 1, pts.begin() + j);
            CHECK(f.tree.skycount_range(v, i, j) == oracle_count(span, all));
            CHECK(f.tree.skycount_range(v, i, i) == 1);
            // difference identity
            uint32_t k = f.tree.rightmost_v(v, i, j);
            CHECK(f.tree.skycount_range(v, i, j) ==
                  f.tree.skycount_prefix(v, j) - f.tree.skycount_prefix(v, k) + 1);
        }
        CHECK(f.tree.skycount_range(v, 1, nd.n_v) == f.tree.skycount_prefix(v, nd.n_v));
    }
}

TEST_CASE("multislab operations against brute force") {
    auto f = make_fixture(permutation_points(500, 13), 3);
    rank_rect all{0, uint32_t(f.ps.size()), 0, uint32_t(f.ps.size())};
    for (uint32_t v = 0; v < f.tree.node_count(); ++v) {
        const auto& nd = f.tree.at(v);
        if (nd.is_leaf()) continue;
        uint32_t blocks = f.tree.block_count(v);
        uint32_t block = f.tree.block_span();
        const auto& lv = f.lists[v];
        auto x_of = [&](uint32_t t) { return f.ps.y_to_x(lv[t - 1]); };
        for (uint32_t i = 1; i <= nd.child_count; ++i) {
            for (uint32_t j = i; j <= std::min(nd.child_count, i + 3); ++j) {
                for (uint32_t b = 1; b <= blocks; ++b) {
                    for (uint32_t t = b; t <= blocks; ++t) {
                        // brute force over the restriction
                        int64_t rm = -1, tm = -1;
                        std::vector<rank_point> restr;
                        for (uint32_t p = (b - 1) * block + 1;
                             p <= std::min(nd.n_v, t * block); ++p) {
                            uint32_t c = f.tree.child_index(v, p);
                            if (c < i || c > j) continue;
                            tm = p;
                            if (rm < 0 || x_of(p) > x_of(uint32_t(rm))) rm = p;
                            restr.push_back(f.ps.at_yrank(lv[p - 1]));
                        }
                        CHECK(f.tree.ms_rightmost(v, i, j, b, t) == rm);
                        CHECK(f.tree.ms_topmost(v, i, j, b, t) == tm);
                        CHECK(f.tree.ms_skycount(v, i, j, b, t) == oracle_count(restr, all));
                        if (b == t) {
                            // degenerate single-block range reduces to block ops
                            auto sig = f.tree.block(v, b);
                            int32_t br = sig.rightmost(1, block, i, j);
                            CHECK((br < 0 ? -1 : int64_t((b - 1) * block + br)) == rm);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("decompose: spec shapes at n=16 delta=4") {
    auto f = make_fixture(permutation_points(16, 17), 4);
    // leaves 6..11 one-based = x-ranks 5..10
    auto ms = f.tree.decompose({5, 10, 0, 15});
    REQUIRE(ms.size() == 2);
    // right-to-left: node of leaves 9-12 with slabs [1,3] first
    CHECK(f.tree.at(ms[0].node).x_lo == 8);
    CHECK(f.tree.at(ms[0].node).x_hi == 11);
    CHECK(ms[0].slab_lo == 1);
    CHECK(ms[0].slab_hi == 3);
    CHECK(f.tree.at(ms[1].node).x_lo == 4);
    CHECK(f.tree.at(ms[1].node).x_hi == 7);
    CHECK(ms[1].slab_lo == 2);
    CHECK(ms[1].slab_hi == 4);

    auto full = f.tree.decompose({0, 15, 0, 15});
    REQUIRE(full.size() == 1);
    CHECK(full[0].node == f.tree.root());
    CHECK(full[0].slab_lo == 1);
    CHECK(full[0].slab_hi == 4);

    auto single = f.tree.decompose({6, 6, 0, 15});
    REQUIRE(single.size() == 1);
    CHECK(single[0].slab_lo == single[0].slab_hi);
    CHECK(f.tree.at(single[0].node).x_lo <= 6);
    CHECK(f.tree.at(single[0].node).x_hi >= 6);
}

TEST_CASE("decompose soundness: disjoint spans covering exactly the x range") {
    for (uint32_t delta : {2u, 3u, 4u}) {
        auto f = make_fixture(permutation_points(97, 19 + delta), delta);
        std::mt19937_64 rng(23);
        for (int q = 0; q < 200; ++q) {
            uint32_t x1 = rng() % 97, x2 = rng() % 97;
            if (x1 > x2) std::swap(x1, x2);
            auto ms = f.tree.decompose({x1, x2, 0, 96});
            uint64_t covered = 0;
            uint32_t prev_lo = UINT32_MAX;
            for (const auto& m : ms) {
                const auto& nd = f.tree.at(m.node);
                uint32_t clo = f.tree.at(nd.first_child + m.slab_lo - 1).x_lo;
                uint32_t chi = f.tree.at(nd.first_child + m.slab_hi - 1).x_hi;
                CHECK(clo >= x1);
                CHECK(chi <= x2);
                CHECK(chi < prev_lo);  // right-to-left, pairwise disjoint
                prev_lo = clo;
                covered += chi - clo + 1;
            }
            CHECK(covered == x2 - x1 + 1);
        }
    }
}

TEST_CASE("count equals the oracle on random permutations") {
    std::mt19937_64 rng(31);
    for (uint32_t n : {2u, 3u, 5u, 9u, 17u, 40u, 200u, 1000u}) {
        for (uint32_t delta : {2u, 3u, 4u}) {
            auto f = make_fixture(permutation_points(n, n * 7 + delta), delta);
            auto pts = rank_points(f.ps);
            int queries = n <= 40 ? 400 : 150;
            for (int q = 0; q < queries; ++q) {
                uint32_t x1 = rng() % n, x2 = rng() % n;
                uint32_t y1 = rng() % n, y2 = rng() % n;
                if (x1 > x2) std::swap(x1, x2);
                if (y1 > y2) std::swap(y1, y2);
                rank_rect r{x1, x2, y1, y2};
                CHECK(f.tree.count(r) == oracle_count(pts, r));
            }
            rank_rect all{0, n - 1, 0, n - 1};
            CHECK(f.tree.count(all) == oracle_count(pts, all));
        }
    }
}

TEST_CASE("count on chains is always one") {
    std::vector<raw_point> chain;
    for (int i = 0; i < 100; ++i) chain.push_back({i, i});
    auto f = make_fixture(chain, 3);
    std::mt19937_64 rng(37);
    for (int q = 0; q < 300; ++q) {
        uint32_t x1 = rng() % 100, x2 = rng() % 100;
        uint32_t y1 = rng() % 100, y2 = rng() % 100;
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        uint64_t c = f.tree.count({x1, x2, y1, y2});
        bool nonempty = std::max(x1, y1) <= std::min(x2, y2);
        CHECK(c == (nonempty ? 1 : 0));
    }
}

TEST_CASE("exhaustive small-case sweep over a 6x6 grid") {
    // all permutations of sizes 1..5 placed on distinct rows/columns of a
    // small grid, all closed rank rectangles
    std::mt19937_64 rng(41);
    for (uint32_t n : {1u, 2u, 3u, 4u, 5u, 6u}) {
        std::vector<uint32_t> perm(n);
        for (uint32_t i = 0; i < n; ++i) perm[i] = i;
        int tried = 0;
        do {
            std::vector<raw_point> raw(n);
            for (uint32_t i = 0; i < n; ++i) raw[i] = {int64_t(i), int64_t(perm[i])};
            auto f = make_fixture(raw, 2);
            auto pts = rank_points(f.ps);
            for (uint32_t x1 = 0; x1 < n; ++x1)
                for (uint32_t x2 = x1; x2 < n; ++x2)
                    for (uint32_t y1 = 0; y1 < n; ++y1)
                        for (uint32_t y2 = y1; y2 < n; ++y2) {
                            rank_rect r{x1, x2, y1, y2};
                            CHECK(f.tree.count(r) == oracle_count(pts, r));
                        }
        } while (std::next_permutation(perm.begin(), perm.end()) && ++tried < 30);
    }
}

TEST_CASE("per-multislab counts match the oracle restriction") {
    auto f = make_fixture(permutation_points(300, 43), 3);
    auto pts = rank_points(f.ps);
    std::mt19937_64 rng(47);
    rank_rect all{0, uint32_t(f.ps.size()), 0, uint32_t(f.ps.size())};
    for (int q = 0; q < 300; ++q) {
        uint32_t n = 300;
        uint32_t x1 = rng() % n, x2 = rng() % n, y1 = rng() % n, y2 = rng() % n;
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        std::vector<query_stats::slab_record> trace;
        query_stats st;
        st.trace = &trace;
        uint64_t total = f.tree.count({x1, x2, y1, y2}, &st);
        CHECK(total == oracle_count(pts, {x1, x2, y1, y2}));
        uint64_t sum = 0;
        for (const auto& rec : trace) {
            auto restricted = slab_points(f, rec.node, rec.slab_lo, rec.slab_hi, rec.y_lo, rec.y_hi);
            CHECK(rec.count == oracle_count(restricted, all));
            sum += rec.count;
        }
        CHECK(sum == total);
    }
}

TEST_CASE("node visits stay within twice the height plus one") {
    for (uint32_t n : {64u, 512u, 4096u}) {
        auto f = make_fixture(permutation_points(n, n), 2);
        std::mt19937_64 rng(53);
        uint64_t bound = 2 * uint64_t(f.tree.levels()) + 1;
        for (int q = 0; q < 500; ++q) {
            uint32_t x1 = rng() % n, x2 = rng() % n, y1 = rng() % n, y2 = rng() % n;
            if (x1 > x2) std::swap(x1, x2);
            if (y1 > y2) std::swap(y1, y2);
            query_stats st;
            f.tree.count({x1, x2, y1, y2}, &st);
            CHECK(st.nodes_visited <= bound);
        }
    }
}

TEST_CASE("memoized block queries answer identically") {
    auto raw = permutation_points(400, 59);
    auto ps = point_set::rank_reduce(raw);
    base_tree::build_options opt;
    opt.delta = 3;
    auto plain = base_tree::build(ps, opt);
    opt.memo_capacity = 4096;
    auto memo = base_tree::build(ps, opt);
    std::mt19937_64 rng(61);
    for (int q = 0; q < 500; ++q) {
        uint32_t x1 = rng() % 400, x2 = rng() % 400, y1 = rng() % 400, y2 = rng() % 400;
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        rank_rect r{x1, x2, y1, y2};
        CHECK(plain.count(r) == memo.count(r));
    }
}

TEST_CASE("concurrent read-only queries agree with sequential answers") {
    auto raw = permutation_points(2000, 71);
    auto ps = point_set::rank_reduce(raw);
    base_tree::build_options opt;
    opt.delta = 3;
    opt.memo_capacity = 1024;  // the memo path must stay internally synchronized
    auto tree = base_tree::build(ps, opt);
    std::vector<rank_rect> rects;
    std::vector<uint64_t> expected;
    std::mt19937_64 rng(73);
    for (int q = 0; q < 400; ++q) {
        uint32_t x1 = rng() % 2000, x2 = rng() % 2000, y1 = rng() % 2000, y2 = rng() % 2000;
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        rects.push_back({x1, x2, y1, y2});
        expected.push_back(tree.count(rects.back()));
    }
    std::atomic<int> mismatches{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w)
        workers.emplace_back([&] {
            for (size_t q = 0; q < rects.size(); ++q)
                if (tree.count(rects[q]) != expected[q]) ++mismatches;
        });
    for (auto& t : workers) t.join();
    CHECK(mismatches == 0);
}

TEST_CASE("shared single coordinates survive the full pipeline") {
    // clusters sharing x or y exercise the tie rules end to end
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<int64_t> c(0, 12);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<raw_point> raw;
        std::set<std::pair<int64_t, int64_t>> seen;
        while (raw.size() < 60) {
            raw_point p{c(rng), c(rng)};
            if (seen.insert({p.x, p.y}).second) raw.push_back(p);
        }
        auto ps = point_set::rank_reduce(raw);
        base_tree::build_options opt;
        opt.delta = 3;
        auto tree = base_tree::build(ps, opt);
        for (int q = 0; q < 60; ++q) {
            query_rect r{c(rng), c(rng), c(rng), c(rng)};
            r = r.normalized();
            auto rr = ps.map_rect(r);
            uint64_t got = rr ? tree.count(*rr) : 0;
            CHECK(got == oracle_count(raw, r));
        }
    }
}
