#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "skycount/container.hpp"
#include "skycount/io.hpp"

using namespace skycount;
namespace fs = std::filesystem;

namespace {

struct temp_dir {
    fs::path path;
    temp_dir() {
        path = fs::temp_directory_path() / ("skycount_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~temp_dir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int rc = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::vector<raw_point> grid_points(uint32_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> perm(n);
    for (uint32_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<raw_point> pts(n);
    for (uint32_t i = 0; i < n; ++i) pts[i] = {int64_t(3 * i + 1), int64_t(2 * perm[i])};
    return pts;
}

void write_points(const std::string& path, const std::vector<raw_point>& pts) {
    std::ofstream os(path);
    for (auto p : pts) os << p.x << " " << p.y << "\n";
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& data) {
    std::ofstream os(path, std::ios::binary);
    os.write(data.data(), std::streamsize(data.size()));
}

// re-seal the container after tampering so only the payload is inconsistent
void reseal(std::string& bytes) {
    std::string payload = bytes.substr(4, bytes.size() - 12);
    uint64_t h = io::fnv1a(payload);
    for (int i = 0; i < 8; ++i) bytes[bytes.size() - 8 + i] = char((h >> (8 * i)) & 0xff);
}

}  // namespace

TEST_CASE("save/load round-trip answers a probe suite identically") {
    auto pts = grid_points(600, 5);
    skyline_index::build_params p;
    p.delta = 3;
    auto idx = skyline_index::build(pts, p);
    std::stringstream ss;
    idx.save(ss);
    auto idx2 = skyline_index::load(ss);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> c(-5, 1900);
    for (int q = 0; q < 1000; ++q) {
        query_rect r{c(rng), c(rng), c(rng), c(rng)};
        r = r.normalized();
        CHECK(idx.count(r) == idx2.count(r));
        CHECK(idx.report(r) == idx2.report(r));
    }
}

TEST_CASE("builds are deterministic, byte for byte") {
    auto pts = grid_points(400, 11);
    skyline_index::build_params p;
    p.delta = 3;
    std::stringstream a, b;
    skyline_index::build(pts, p).save(a);
    skyline_index::build(pts, p).save(b);
    CHECK(a.str() == b.str());
}

TEST_CASE("version and checksum gates reject tampered containers") {
    auto pts = grid_points(50, 13);
    skyline_index::build_params p;
    std::stringstream ss;
    skyline_index::build(pts, p).save(ss);
    std::string bytes = ss.str();

    {
        std::string bad = bytes;
        bad[4] = char(99);  // version field
        reseal(bad);
        std::istringstream is(bad);
        CHECK_THROWS_WITH_AS(skyline_index::load(is), "container: unsupported version",
                             std::runtime_error);
    }
    {
        std::string bad = bytes;
        bad[bytes.size() / 2] ^= 0x40;
        std::istringstream is(bad);
        CHECK_THROWS_WITH_AS(skyline_index::load(is), "container: checksum mismatch",
                             std::runtime_error);
    }
    {
        std::string bad = bytes;
        bad[0] = 'X';
        std::istringstream is(bad);
        CHECK_THROWS_WITH_AS(skyline_index::load(is), "container: bad magic", std::runtime_error);
    }
}

TEST_CASE("cli: build, count, report, space, bench") {
    temp_dir td;
    auto pts = grid_points(300, 17);
    write_points(td.file("pts.txt"), pts);
    {
        std::ofstream qs(td.file("qs.txt"));
        qs << "0 1000 0 1000\n";       // covering rectangle
        qs << "4 4 100 100\n";         // empty
        qs << "10 500 0 300\n";
    }
    std::string out;
    CHECK(run_cli({"build", td.file("pts.txt"), td.file("idx.bin"), "--delta", "3"}, &out) == 0);
    CHECK(out.find("built n=300") != std::string::npos);

    CHECK(run_cli({"count", td.file("idx.bin"), td.file("qs.txt")}, &out) == 0);
    std::istringstream lines(out);
    std::string l1, l2, l3;
    std::getline(lines, l1);
    std::getline(lines, l2);
    std::getline(lines, l3);
    CHECK(std::stoull(l1) == oracle_count(pts, {0, 1000, 0, 1000}));
    CHECK(l2 == "0");
    CHECK(std::stoull(l3) == oracle_count(pts, {10, 500, 0, 300}));

    CHECK(run_cli({"report", td.file("idx.bin"), td.file("qs.txt")}, &out) == 0);
    {
        std::istringstream rl(out);
        std::string line;
        std::getline(rl, line);
        auto sky = oracle_skyline(pts, {0, 1000, 0, 1000});
        std::ostringstream want;
        for (size_t i = 0; i < sky.size(); ++i) {
            if (i) want << ";";
            want << sky[i].x << " " << sky[i].y;
        }
        CHECK(line == want.str());
        std::getline(rl, line);
        CHECK(line.empty());
    }

    CHECK(run_cli({"space", td.file("idx.bin")}, &out) == 0);
    CHECK(out.find("skycount space report") != std::string::npos);
    CHECK(out.find("kind signatures ") != std::string::npos);
    CHECK(out.find("level 0 ") != std::string::npos);

    CHECK(run_cli({"bench", td.file("idx.bin"), "--random", "50", "--seed", "3"}, &out) == 0);
    CHECK(out.find("bench mean_visits ") != std::string::npos);
}

TEST_CASE("cli: covering query on a tiny anti-chain") {
    temp_dir td;
    write_points(td.file("p.txt"), {{0, 2}, {1, 1}, {2, 0}});
    {
        std::ofstream qs(td.file("q.txt"));
        qs << "0 2 0 2\n";
    }
    std::string out;
    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin")}, &out) == 0);
    CHECK(run_cli({"count", td.file("i.bin"), td.file("q.txt")}, &out) == 0);
    CHECK(out == "3\n");
}

TEST_CASE("cli: empty points file yields a trivial index") {
    temp_dir td;
    spit(td.file("p.txt"), "");
    {
        std::ofstream qs(td.file("q.txt"));
        qs << "-100 100 -100 100\n";
    }
    std::string out;
    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin")}, &out) == 0);
    CHECK(run_cli({"count", td.file("i.bin"), td.file("q.txt")}, &out) == 0);
    CHECK(out == "0\n");
}

TEST_CASE("cli: strict mode aborts on malformed lines, lenient skips") {
    temp_dir td;
    spit(td.file("p.txt"), "1 2\n3 nope\n5 6\n");
    std::string out, err;
    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin")}, &out, &err) != 0);
    CHECK(err.find(":2:") != std::string::npos);
    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin"), "--no-strict"}, &out, &err) == 0);
    CHECK(out.find("built n=2") != std::string::npos);
    CHECK(err.find("skipping malformed") != std::string::npos);

    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin")}, &out, &err) != 0);
    spit(td.file("dup.txt"), "1 2\n1 2\n");
    CHECK(run_cli({"build", td.file("dup.txt"), td.file("i.bin")}, &out, &err) != 0);
    CHECK(err.find("duplicate") != std::string::npos);
}

TEST_CASE("cli: verify passes on fixed seeds and fails on a corrupted index") {
    temp_dir td;
    std::string out;
    CHECK(run_cli({"verify", "--random", "500", "800", "42"}, &out) == 0);
    CHECK(out.find("PASS") != std::string::npos);

    // build, corrupt one raw coordinate byte inside the container, re-seal the
    // checksum, and verify against the original points
    auto pts = grid_points(60, 23);
    write_points(td.file("p.txt"), pts);
    {
        std::ofstream qs(td.file("q.txt"));
        for (auto p : pts) qs << p.x << " " << p.x << " " << p.y << " " << p.y << "\n";
    }
    CHECK(run_cli({"build", td.file("p.txt"), td.file("i.bin"), "--ball-b", "0"}, &out) == 0);
    CHECK(run_cli({"verify", td.file("p.txt"), td.file("q.txt"), "--index", td.file("i.bin")},
                  &out) == 0);
    std::string bytes = slurp(td.file("i.bin"));
    // first raw x lives after magic(4), params(36), section header(12), n(8)
    bytes[60] = char(bytes[60] ^ 0x5a);
    reseal(bytes);
    spit(td.file("i.bin"), bytes);
    int rc = run_cli({"verify", td.file("p.txt"), td.file("q.txt"), "--index", td.file("i.bin")},
                     &out);
    CHECK(rc != 0);
    CHECK(out.find("FAIL") != std::string::npos);
    CHECK(out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("cli: butterfly workload round-trips through count") {
    temp_dir td;
    std::string out;
    std::string prefix = td.file("bf");
    CHECK(run_cli({"reduce-butterfly", "--degree", "2", "--depth", "3", "--drop-prob", "0.4",
                   "--seed", "9", "--out", prefix}, &out) == 0);
    CHECK(run_cli({"build", prefix + ".points", td.file("bf.bin"), "--ball-b", "0"}, &out) == 0);
    CHECK(run_cli({"count", td.file("bf.bin"), prefix + ".queries"}, &out) == 0);
    std::istringstream counts(out);
    std::ifstream answers(prefix + ".answers");
    std::string cl, al;
    uint32_t d = 3;
    size_t lines = 0;
    while (std::getline(counts, cl) && std::getline(answers, al)) {
        ++lines;
        bool reachable = std::stoull(cl) == d;
        CHECK(std::stoull(cl) >= d);
        CHECK(reachable == (al == "1"));
    }
    CHECK(lines == 64);
}
