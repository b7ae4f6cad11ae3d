#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "skycount/container.hpp"

namespace skycount {

skyline_index skyline_index::build(std::vector<raw_point> points, const build_params& p) {
    skyline_index idx;
    idx.m_points = point_set::rank_reduce(std::move(points));
    base_tree::build_options opt;
    opt.delta = p.delta;
    opt.keep_lists = p.keep_lists;
    opt.memo_capacity = p.memo_capacity;
    std::vector<std::vector<uint32_t>> lists;
    idx.m_tree = base_tree::build(idx.m_points, opt, p.ball_fan ? &lists : nullptr);
    idx.m_ball_fan = p.ball_fan;
    if (p.ball_fan && idx.n() > 0)
        idx.m_ball = ball_inheritance::build(idx.m_tree, p.ball_fan, lists);
    return idx;
}

uint64_t skyline_index::count(query_rect r, query_stats* stats) const {
    auto rr = m_points.map_rect(r);
    if (!rr) return 0;
    return m_tree.count(*rr, stats);
}

std::vector<raw_point> skyline_index::report(query_rect r, query_stats* stats) const {
    std::vector<raw_point> out;
    auto rr = m_points.map_rect(r);
    if (!rr) return out;
    auto pts = report_rank(m_tree, m_ball, m_points, *rr, stats);
    out.reserve(pts.size());
    for (auto p : pts) out.push_back(m_points.raw_of(p));
    return out;
}

space_report skyline_index::space() const {
    space_report rep;
    rep.n = n();
    rep.delta = m_tree.delta();
    rep.ball_fan = m_ball_fan;
    rep.levels = m_tree.levels();

    enum kind_id {
        k_child_index = 0,
        k_parent_select,
        k_signatures,
        k_child_block_prefix,
        k_skycount_prefix,
        k_rightmost_rmq,
        k_multislab_rmq,
        k_multislab_prefix,
        k_ball,
        k_point_maps,
        k_total_kinds
    };
    static const char* names[k_total_kinds] = {
        "child_index",      "parent_select",     "signatures",      "child_block_prefix",
        "skycount_prefix",  "rightmost_rmq",     "multislab_rmq",   "multislab_prefix",
        "ball_inheritance", "point_maps",
    };
    uint64_t kind_bits[k_total_kinds] = {};
    rep.level_bits.assign(rep.levels, 0);

    uint32_t cw = std::max<uint32_t>(1, bits_for(uint64_t(m_tree.delta()) - 1));
    for (uint32_t v = 0; v < m_tree.node_count(); ++v) {
        const auto& nd = m_tree.at(v);
        uint64_t node_bits = 0;
        auto add = [&](kind_id k, uint64_t bits) {
            kind_bits[k] += bits;
            node_bits += bits;
        };
        if (v != m_tree.root()) add(k_parent_select, nd.parent_sel.size_bits());
        if (!nd.is_leaf()) {
            // C_v is the child component of the signature pairs
            uint64_t c_bits = uint64_t(nd.sig.size()) * cw;
            add(k_child_index, c_bits);
            add(k_signatures, nd.sig.size_bits() - c_bits);
            add(k_child_block_prefix, nd.child_prefix.size_bits());
            add(k_skycount_prefix, nd.dominated.size_bits());
            add(k_rightmost_rmq, nd.rightmost.size_bits());
            add(k_multislab_rmq, nd.ms_right.size_bits() + nd.ms_top.size_bits());
            add(k_multislab_prefix, nd.ms_x.size_bits() + nd.ms_y.size_bits());
        }
        rep.level_bits[nd.level] += node_bits;
    }
    kind_bits[k_ball] = m_ball_fan ? m_ball.size_bits() : 0;
    kind_bits[k_point_maps] = m_points.size_bits();

    rep.total_bits = 0;
    for (int k = 0; k < k_total_kinds; ++k) {
        rep.kinds.push_back({names[k], kind_bits[k]});
        rep.total_bits += kind_bits[k];
    }
    rep.bits_per_point = rep.n ? double(rep.total_bits) / double(rep.n) : 0.0;
    double lg = rep.n > 1 ? std::log2(double(rep.n)) : 1.0;
    rep.ratio_n_lg_n = rep.n ? double(rep.total_bits) / (double(rep.n) * lg) : 0.0;
    return rep;
}

void space_report::print(std::ostream& os) const {
    os << "skycount space report\n";
    os << "n " << n << "\n";
    os << "delta " << delta << "\n";
    os << "ball_fan " << ball_fan << "\n";
    os << "levels " << levels << "\n";
    os << "total_bits " << total_bits << "\n";
    os << "bits_per_point " << bits_per_point << "\n";
    os << "ratio_bits_per_n_lg_n " << ratio_n_lg_n << "\n";
    for (const auto& k : kinds) os << "kind " << k.name << " " << k.bits << "\n";
    for (size_t l = 0; l < level_bits.size(); ++l)
        os << "level " << l << " " << level_bits[l] << "\n";
}

namespace {
constexpr char kMagic[4] = {'S', 'K', 'Y', 'C'};
}

void skyline_index::save(std::ostream& os) const {
    std::ostringstream body;
    io::write_u32(body, format_version);
    io::write_u64(body, n());
    io::write_u32(body, m_tree.delta());
    io::write_u32(body, m_ball_fan);
    io::write_u64(body, m_tree.memo_capacity());
    io::write_u32(body, 0);  // flags, reserved

    auto section = [&](uint32_t id, const std::string& payload) {
        io::write_u32(body, id);
        io::write_u64(body, payload.size());
        body.write(payload.data(), std::streamsize(payload.size()));
    };
    std::ostringstream s1, s2, s3;
    m_points.save(s1);
    m_tree.save(s2);
    uint32_t sections = m_ball_fan ? 3 : 2;
    io::write_u32(body, sections);
    section(1, s1.str());
    section(2, s2.str());
    if (m_ball_fan) {
        m_ball.save(s3);
        section(3, s3.str());
    }

    std::string payload = body.str();
    os.write(kMagic, 4);
    os.write(payload.data(), std::streamsize(payload.size()));
    io::write_u64(os, io::fnv1a(payload));
}

skyline_index skyline_index::load(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("container: bad magic");
    std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (rest.size() < 8) throw std::runtime_error("container: truncated input");
    std::string payload = rest.substr(0, rest.size() - 8);
    std::istringstream tail(rest.substr(rest.size() - 8));
    uint64_t stored = io::read_u64(tail);
    if (io::fnv1a(payload) != stored) throw std::runtime_error("container: checksum mismatch");

    std::istringstream body(payload);
    uint32_t version = io::read_u32(body);
    if (version != format_version) throw std::runtime_error("container: unsupported version");
    io::read_u64(body);  // n
    io::read_u32(body);  // delta
    uint32_t ball_fan = io::read_u32(body);
    io::read_u64(body);  // memo capacity (restored by tree payload)
    io::read_u32(body);  // flags

    skyline_index idx;
    idx.m_ball_fan = ball_fan;
    uint32_t sections = io::read_u32(body);
    for (uint32_t s = 0; s < sections; ++s) {
        uint32_t id = io::read_u32(body);
        uint64_t len = io::read_u64(body);
        std::string blob(len, '\0');
        if (!body.read(blob.data(), std::streamsize(len)))
            throw std::runtime_error("container: truncated section");
        std::istringstream bs(blob);
        if (id == 1) idx.m_points.load(bs);
        else if (id == 2) idx.m_tree.load(bs);
        else if (id == 3) idx.m_ball.load(bs);
        else throw std::runtime_error("container: unknown section");
    }
    return idx;
}

void skyline_index::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    save(os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

skyline_index skyline_index::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return load(is);
}

}  // namespace skycount
