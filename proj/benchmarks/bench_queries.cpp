#include <benchmark/benchmark.h>
#include <map>

#include <random>

#include "skycount/butterfly.hpp"
#include "skycount/container.hpp"

using namespace skycount;

namespace {

std::vector<raw_point> permutation_points(uint32_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> perm(n);
    for (uint32_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<raw_point> pts(n);
    for (uint32_t i = 0; i < n; ++i) pts[i] = {int64_t(i), int64_t(perm[i])};
    return pts;
}

const skyline_index& shared_index(uint32_t n) {
    static std::map<uint32_t, skyline_index> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        skyline_index::build_params p;
        it = cache.emplace(n, skyline_index::build(permutation_points(n, n), p)).first;
    }
    return it->second;
}

query_rect random_rect(uint32_t n, std::mt19937_64& rng) {
    int64_t a = int64_t(rng() % n), b = int64_t(rng() % n);
    int64_t c = int64_t(rng() % n), d = int64_t(rng() % n);
    return {std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d)};
}

void BM_build(benchmark::State& state) {
    uint32_t n = uint32_t(state.range(0));
    auto pts = permutation_points(n, 7);
    for (auto _ : state) {
        skyline_index::build_params p;
        p.ball_fan = 0;
        auto idx = skyline_index::build(pts, p);
        benchmark::DoNotOptimize(idx.n());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * n);
}
BENCHMARK(BM_build)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_count(benchmark::State& state) {
    uint32_t n = uint32_t(state.range(0));
    const auto& idx = shared_index(n);
    std::mt19937_64 rng(13);
    for (auto _ : state) benchmark::DoNotOptimize(idx.count(random_rect(n, rng)));
}
BENCHMARK(BM_count)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18)->Arg(1 << 20);

void BM_report(benchmark::State& state) {
    uint32_t n = 1 << 16;
    const auto& idx = shared_index(n);
    std::mt19937_64 rng(17);
    uint64_t reported = 0;
    for (auto _ : state) {
        auto pts = idx.report(random_rect(n, rng));
        reported += pts.size();
        benchmark::DoNotOptimize(pts.data());
    }
    state.counters["pts/query"] =
        benchmark::Counter(double(reported) / double(state.iterations()));
}
BENCHMARK(BM_report);

void BM_report_antichain(benchmark::State& state) {
    // output-dominated regime: every point is on the skyline
    uint32_t n = uint32_t(state.range(0));
    static std::map<uint32_t, skyline_index> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<raw_point> anti(n);
        for (uint32_t i = 0; i < n; ++i) anti[i] = {int64_t(i), int64_t(n - 1 - i)};
        skyline_index::build_params p;
        it = cache.emplace(n, skyline_index::build(anti, p)).first;
    }
    const auto& idx = it->second;
    for (auto _ : state) {
        auto pts = idx.report({0, int64_t(n), 0, int64_t(n)});
        benchmark::DoNotOptimize(pts.data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * n);
}
BENCHMARK(BM_report_antichain)->Arg(1 << 10)->Arg(1 << 14);

void BM_butterfly_query(benchmark::State& state) {
    auto g = butterfly_subgraph::random(3, 2, 0.6, 5);
    auto inst = reduction_instance::build(g);
    skyline_index::build_params p;
    p.ball_fan = 0;
    auto idx = skyline_index::build(inst.points, p);
    std::mt19937_64 rng(3);
    uint64_t nd = g.layer_nodes();
    for (auto _ : state) {
        uint64_t s = rng() % nd, t = rng() % nd;
        benchmark::DoNotOptimize(idx.count(inst.reach_query(s, t)));
    }
}
BENCHMARK(BM_butterfly_query);

}  // namespace

BENCHMARK_MAIN();
