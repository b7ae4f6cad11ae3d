#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "skycount/butterfly.hpp"
#include "skycount/container.hpp"

namespace skycount::cli {

namespace {

struct parse_error {
    std::string path;
    uint64_t line;
    std::string text;
};

bool parse_ints(const std::string& line, int64_t* out, int count) {
    std::istringstream ss(line);
    for (int i = 0; i < count; ++i)
        if (!(ss >> out[i])) return false;
    std::string rest;
    if (ss >> rest) return false;
    return true;
}

std::vector<raw_point> read_points(const std::string& path, bool strict, std::ostream& err) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open points file: " + path);
    std::vector<raw_point> pts;
    std::string line;
    uint64_t no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (line.empty()) continue;
        int64_t v[2];
        if (!parse_ints(line, v, 2)) {
            if (strict) throw std::runtime_error(path + ":" + std::to_string(no) + ": malformed point line");
            err << "warning: " << path << ":" << no << ": skipping malformed point line\n";
            continue;
        }
        pts.push_back({v[0], v[1]});
    }
    return pts;
}

std::vector<query_rect> read_queries(const std::string& path, bool strict, std::ostream& err) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open queries file: " + path);
    std::vector<query_rect> qs;
    std::string line;
    uint64_t no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (line.empty()) continue;
        int64_t v[4];
        if (!parse_ints(line, v, 4)) {
            if (strict) throw std::runtime_error(path + ":" + std::to_string(no) + ": malformed query line");
            err << "warning: " << path << ":" << no << ": skipping malformed query line\n";
            continue;
        }
        qs.push_back({v[0], v[1], v[2], v[3]});
    }
    return qs;
}

// random rank-space permutation instance plus random closed rectangles
std::vector<raw_point> random_permutation_points(uint64_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> perm(n);
    for (uint64_t i = 0; i < n; ++i) perm[i] = uint32_t(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<raw_point> pts(n);
    for (uint64_t i = 0; i < n; ++i) pts[i] = {int64_t(i), int64_t(perm[i])};
    return pts;
}

std::vector<query_rect> random_rects(uint64_t q, int64_t lo, int64_t hi, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int64_t> d(lo, hi);
    std::vector<query_rect> qs(q);
    for (auto& r : qs) {
        int64_t a = d(rng), b = d(rng), c = d(rng), e = d(rng);
        r = query_rect{std::min(a, b), std::max(a, b), std::min(c, e), std::max(c, e)};
    }
    return qs;
}

uint32_t ball_fan_from(uint64_t n, uint32_t ball_b, double epsilon, bool epsilon_set) {
    if (!epsilon_set) return ball_b;
    if (n < 2) return 2;
    double lg = std::log2(double(n));
    return std::max<uint32_t>(2, uint32_t(std::ceil(std::pow(lg, epsilon))));
}

int cmd_build(const std::string& points_path, const std::string& index_path, uint32_t delta,
              uint32_t ball_b, double epsilon, bool epsilon_set, uint64_t memo, bool strict,
              std::ostream& out, std::ostream& err) {
    auto t0 = std::chrono::steady_clock::now();
    auto pts = read_points(points_path, strict, err);
    skyline_index::build_params p;
    p.delta = delta;
    p.ball_fan = ball_b == 0 ? 0 : ball_fan_from(pts.size(), ball_b, epsilon, epsilon_set);
    p.memo_capacity = memo;
    skyline_index idx = skyline_index::build(std::move(pts), p);
    idx.save_file(index_path);
    auto t1 = std::chrono::steady_clock::now();
    auto rep = idx.space();
    out << "built n=" << idx.n() << " delta=" << idx.tree().delta() << " ball_fan=" << idx.ball_fan()
        << " levels=" << idx.tree().levels() << " total_bits=" << rep.total_bits << " build_ms="
        << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
    return 0;
}

int cmd_count(const std::string& index_path, const std::string& queries_path, bool strict,
              bool stats_on, std::ostream& out, std::ostream& err) {
    skyline_index idx = skyline_index::load_file(index_path);
    auto qs = read_queries(queries_path, strict, err);
    query_stats st;
    for (const auto& q : qs) out << idx.count(q, stats_on ? &st : nullptr) << "\n";
    if (stats_on && !qs.empty())
        err << "stats queries=" << qs.size() << " nodes_visited=" << st.nodes_visited
            << " block_scans=" << st.block_scans << " multislabs=" << st.multislabs << "\n";
    return 0;
}

int cmd_report(const std::string& index_path, const std::string& queries_path, bool strict,
               bool stats_on, std::ostream& out, std::ostream& err) {
    skyline_index idx = skyline_index::load_file(index_path);
    if (!idx.has_ball()) throw std::runtime_error("index was built without reporting structures");
    auto qs = read_queries(queries_path, strict, err);
    query_stats st;
    for (const auto& q : qs) {
        auto pts = idx.report(q, stats_on ? &st : nullptr);
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) out << ";";
            out << pts[i].x << " " << pts[i].y;
        }
        out << "\n";
    }
    if (stats_on && !qs.empty())
        err << "stats queries=" << qs.size() << " nodes_visited=" << st.nodes_visited
            << " reported=" << st.reported << " resolve_jumps=" << st.resolve_jumps << "\n";
    return 0;
}

int cmd_verify(const std::string& points_path, const std::string& queries_path,
               const std::string& index_path, const std::vector<uint64_t>& random_spec,
               uint32_t delta, uint32_t ball_b, double epsilon, bool epsilon_set, uint64_t memo,
               bool strict, std::ostream& out, std::ostream& err) {
    std::vector<raw_point> pts;
    std::vector<query_rect> qs;
    skyline_index idx;
    if (!random_spec.empty()) {
        uint64_t n = random_spec[0], q = random_spec.size() > 1 ? random_spec[1] : 1000;
        uint64_t seed = random_spec.size() > 2 ? random_spec[2] : 1;
        pts = random_permutation_points(n, seed);
        qs = random_rects(q, -1, int64_t(n), seed + 1);
    } else {
        pts = read_points(points_path, strict, err);
        qs = read_queries(queries_path, strict, err);
    }
    if (!index_path.empty()) {
        idx = skyline_index::load_file(index_path);
    } else {
        skyline_index::build_params p;
        p.delta = delta;
        p.ball_fan = ball_b == 0 ? 0 : ball_fan_from(pts.size(), ball_b, epsilon, epsilon_set);
        p.memo_capacity = memo;
        idx = skyline_index::build(pts, p);
    }
    uint64_t mismatches = 0;
    for (const auto& q : qs) {
        uint64_t got = idx.count(q);
        uint64_t want = oracle_count(pts, q);
        bool rep_ok = true;
        std::vector<raw_point> got_pts, want_pts;
        if (idx.has_ball()) {
            got_pts = idx.report(q);
            want_pts = oracle_skyline(pts, q);
            rep_ok = got_pts == want_pts;
        }
        if (got != want || !rep_ok) {
            ++mismatches;
            if (mismatches <= 10) {
                out << "MISMATCH rect=[" << q.x1 << "," << q.x2 << "]x[" << q.y1 << "," << q.y2
                    << "] index_count=" << got << " oracle_count=" << want;
                if (!rep_ok) out << " report_differs";
                out << "\n";
            }
        }
    }
    if (mismatches) {
        out << "FAIL " << mismatches << "/" << qs.size() << " queries mismatched\n";
        return 1;
    }
    out << "PASS " << qs.size() << " queries\n";
    return 0;
}

int cmd_bench(const std::string& index_path, uint64_t queries, uint64_t seed, bool stats_on,
              std::ostream& out, std::ostream&) {
    skyline_index idx = skyline_index::load_file(index_path);
    int64_t hi = idx.n() ? int64_t(idx.n()) - 1 : 0;
    auto qs = random_rects(queries, 0, hi, seed);
    std::vector<uint64_t> ns(qs.size());
    uint64_t visit_sum = 0, visit_max = 0, checksum = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
        query_stats st;
        auto t0 = std::chrono::steady_clock::now();
        checksum += idx.count(qs[i], &st);
        auto t1 = std::chrono::steady_clock::now();
        ns[i] = uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        visit_sum += st.nodes_visited;
        visit_max = std::max(visit_max, st.nodes_visited);
    }
    std::sort(ns.begin(), ns.end());
    auto pct = [&](double p) {
        if (ns.empty()) return uint64_t(0);
        return ns[std::min(ns.size() - 1, size_t(p * double(ns.size())))];
    };
    double mean = 0;
    for (uint64_t v : ns) mean += double(v);
    if (!ns.empty()) mean /= double(ns.size());
    out << "bench queries " << qs.size() << "\n";
    out << "bench checksum " << checksum << "\n";
    out << "bench mean_ns " << uint64_t(mean) << "\n";
    out << "bench p50_ns " << pct(0.50) << "\n";
    out << "bench p90_ns " << pct(0.90) << "\n";
    out << "bench p99_ns " << pct(0.99) << "\n";
    out << "bench max_ns " << (ns.empty() ? 0 : ns.back()) << "\n";
    out << "bench mean_visits " << (qs.empty() ? 0.0 : double(visit_sum) / double(qs.size())) << "\n";
    out << "bench max_visits " << visit_max << "\n";
    out << "bench visit_bound " << 2 * idx.tree().levels() + 1 << "\n";
    if (stats_on) {
        query_stats st;
        for (const auto& q : qs) idx.count(q, &st);
        out << "bench block_scans " << st.block_scans << "\n";
        out << "bench multislabs " << st.multislabs << "\n";
    }
    return 0;
}

int cmd_space(const std::string& index_path, std::ostream& out) {
    skyline_index idx = skyline_index::load_file(index_path);
    idx.space().print(out);
    return 0;
}

int cmd_reduce(uint32_t degree, uint32_t depth, double drop_prob, uint64_t seed,
               const std::string& prefix, std::ostream& out) {
    butterfly_subgraph g = drop_prob <= 0.0
                               ? butterfly_subgraph::full(degree, depth)
                               : butterfly_subgraph::random(degree, depth, 1.0 - drop_prob, seed);
    reduction_instance inst = reduction_instance::build(g);
    std::ofstream pf(prefix + ".points"), qf(prefix + ".queries"), af(prefix + ".answers");
    if (!pf || !qf || !af) throw std::runtime_error("cannot open output files with prefix " + prefix);
    for (const auto& p : inst.points) pf << p.x << " " << p.y << "\n";
    uint64_t nd = g.layer_nodes();
    for (uint64_t s = 0; s < nd; ++s)
        for (uint64_t t = 0; t < nd; ++t) {
            query_rect q = inst.reach_query(s, t);
            qf << q.x1 << " " << q.x2 << " " << q.y1 << " " << q.y2 << "\n";
            af << (bfs_reachable(g, s, t) ? 1 : 0) << "\n";
        }
    out << "butterfly degree=" << degree << " depth=" << depth << " edges=" << g.edge_count() << "/"
        << uint64_t(depth) * nd * degree << " points=" << inst.points.size() << " queries="
        << nd * nd << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"orthogonal skyline counting/reporting index"};
    app.require_subcommand(1);

    std::string points_path, queries_path, index_path, out_prefix = "butterfly";
    uint32_t delta = 0, ball_b = 2, degree = 2, depth = 3;
    double epsilon = 0.5, drop_prob = 0.0;
    uint64_t memo = 0, seed = 1, bench_q = 1000;
    bool strict = true, stats_on = false;
    std::vector<uint64_t> random_spec;
    bool epsilon_set = false;

    auto add_common = [&](CLI::App* c) {
        c->add_flag("--strict,!--no-strict", strict, "abort on malformed input lines");
        c->add_flag("--stats", stats_on, "print query statistics");
    };

    CLI::App* b = app.add_subcommand("build", "build an index from a points file");
    b->add_option("points", points_path)->required();
    b->add_option("index", index_path)->required();
    b->add_option("--delta", delta, "tree degree (0 = auto)");
    b->add_option("--ball-b", ball_b, "ball-inheritance fan (0 = counting only)");
    auto* eopt = b->add_option("--epsilon", epsilon, "use ball fan ceil(lg^epsilon n)");
    b->add_option("--memo-cache", memo, "block-query memo capacity (entries)");
    add_common(b);

    CLI::App* c = app.add_subcommand("count", "answer counting queries");
    c->add_option("index", index_path)->required();
    c->add_option("queries", queries_path)->required();
    add_common(c);

    CLI::App* r = app.add_subcommand("report", "answer reporting queries");
    r->add_option("index", index_path)->required();
    r->add_option("queries", queries_path)->required();
    add_common(r);

    CLI::App* v = app.add_subcommand("verify", "compare index against the brute-force oracle");
    v->add_option("points", points_path);
    v->add_option("queries", queries_path);
    v->add_option("--index", index_path, "verify a prebuilt index instead of building");
    v->add_option("--random", random_spec, "random workload: n [queries [seed]]")->expected(1, 3);
    v->add_option("--delta", delta);
    v->add_option("--ball-b", ball_b);
    auto* eopt2 = v->add_option("--epsilon", epsilon);
    v->add_option("--memo-cache", memo);
    add_common(v);

    CLI::App* be = app.add_subcommand("bench", "latency and node-visit statistics");
    be->add_option("index", index_path)->required();
    be->add_option("--random", bench_q, "number of random queries");
    be->add_option("--seed", seed);
    add_common(be);

    CLI::App* sp = app.add_subcommand("space", "print the space report");
    sp->add_option("index", index_path)->required();

    CLI::App* rb = app.add_subcommand("reduce-butterfly",
                                      "emit a butterfly reachability workload");
    rb->add_option("--degree", degree, "butterfly degree B");
    rb->add_option("--depth", depth, "butterfly depth d");
    rb->add_option("--drop-prob", drop_prob, "probability an edge is dropped");
    rb->add_option("--seed", seed);
    rb->add_option("--out", out_prefix, "output file prefix");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    epsilon_set = eopt->count() > 0 || eopt2->count() > 0;

    try {
        if (b->parsed())
            return cmd_build(points_path, index_path, delta, ball_b, epsilon, epsilon_set, memo,
                             strict, out, err);
        if (c->parsed()) return cmd_count(index_path, queries_path, strict, stats_on, out, err);
        if (r->parsed()) return cmd_report(index_path, queries_path, strict, stats_on, out, err);
        if (v->parsed())
            return cmd_verify(points_path, queries_path, index_path, random_spec, delta, ball_b,
                              epsilon, epsilon_set, memo, strict, out, err);
        if (be->parsed()) return cmd_bench(index_path, bench_q, seed, stats_on, out, err);
        if (sp->parsed()) return cmd_space(index_path, out);
        if (rb->parsed()) return cmd_reduce(degree, depth, drop_prob, seed, out_prefix, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace skycount::cli
