// io.hpp — on-disk formats: trajectory/grid/edge CSV, limit-trajectory and
// convergence-report JSON, and the FNV-1a checksums recorded in experiment
// manifests. All doubles go through to_chars/from_chars shortest form, so
// files are locale-independent and round-trip bit-exactly.
#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "limits.hpp"
#include "value.hpp"

namespace crossnet {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Numbers.

inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("parse_double: bad number '" + std::string(s) + "'");
    return v;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t c = line.find(',', pos);
        if (c == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    return out;
}

inline void expect_header(std::istream& f, const std::string& want, const std::string& path) {
    std::string line;
    if (!std::getline(f, line) || line != want)
        throw std::runtime_error("bad header in " + path + " (want '" + want + "')");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checksums (FNV-1a, 64-bit) for manifest integrity lines.

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    auto f = detail::open_in(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string s = ss.str();
    return fnv1a64(std::string_view(s));
}

inline std::string checksum_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Trajectory CSV: header t,x1,x2,k1,k2, one row per recorded sample.

struct TrajectorySamples {
    std::vector<double> t;
    std::vector<Vec2> x;
    std::vector<Vec2> k;
};

inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord& traj) {
    auto f = detail::open_out(path);
    f << "t,x1,x2,k1,k2\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        f << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x1) << ','
          << format_double(traj.states[i].x2) << ',' << format_double(traj.k_samples[i].x1)
          << ',' << format_double(traj.k_samples[i].x2) << '\n';
    }
}

inline TrajectorySamples read_trajectory_csv(const std::string& path) {
    auto f = detail::open_in(path);
    detail::expect_header(f, "t,x1,x2,k1,k2", path);
    TrajectorySamples out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 5) throw std::runtime_error("bad row in " + path);
        out.t.push_back(parse_double(c[0]));
        out.x.push_back({parse_double(c[1]), parse_double(c[2])});
        out.k.push_back({parse_double(c[3]), parse_double(c[4])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid CSV: header x1,x2,u, row-major over the rectangle (x2 outer).

inline void write_grid_csv(const std::string& path, const GridValueFunction& g) {
    auto f = detail::open_out(path);
    f << "x1,x2,u\n";
    for (std::size_t j = 0; j < g.spec.n2(); ++j)
        for (std::size_t i = 0; i < g.spec.n1(); ++i)
            f << format_double(g.spec.x1_at(i)) << ',' << format_double(g.spec.x2_at(j)) << ','
              << format_double(g.at(i, j)) << '\n';
}

inline GridValueFunction read_grid_csv(const std::string& path) {
    auto f = detail::open_in(path);
    detail::expect_header(f, "x1,x2,u", path);
    std::vector<double> x1, x2, u;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 3) throw std::runtime_error("bad row in " + path);
        x1.push_back(parse_double(c[0]));
        x2.push_back(parse_double(c[1]));
        u.push_back(parse_double(c[2]));
    }
    if (u.empty()) throw std::runtime_error("empty grid in " + path);
    // first block shares x2: its length is the row width
    std::size_t n1 = 1;
    while (n1 < x2.size() && x2[n1] == x2[0]) ++n1;
    if (x1.size() % n1 != 0) throw std::runtime_error("ragged grid in " + path);
    const std::size_t n2 = x1.size() / n1;
    if (n1 < 2 || n2 < 2) throw std::runtime_error("degenerate grid in " + path);
    GridValueFunction g;
    g.spec.h = x1[1] - x1[0];
    g.spec.x1_lo = x1.front();
    g.spec.x1_hi = x1[n1 - 1];
    g.spec.x2_lo = x2.front();
    g.spec.x2_hi = x2.back();
    g.u = std::move(u);
    if (g.spec.n1() != n1 || g.spec.n2() != n2)
        throw std::runtime_error("inconsistent grid spacing in " + path);
    return g;
}

// ---------------------------------------------------------------------------
// Edge CSV: header branch,r,u; four radial profiles, r = 0 rows carry the
// shared junction value.

inline void write_edge_csv(const std::string& path, const EdgeValueFunction& e) {
    auto f = detail::open_out(path);
    f << "branch,r,u\n";
    for (std::size_t b = 0; b < 4; ++b) {
        const char* name = branch_name(static_cast<Branch>(b));
        for (std::size_t i = 0; i < e.u[b].size(); ++i)
            f << name << ',' << format_double(static_cast<double>(i) * e.h) << ','
              << format_double(e.u[b][i]) << '\n';
    }
}

inline EdgeValueFunction read_edge_csv(const std::string& path) {
    auto f = detail::open_in(path);
    detail::expect_header(f, "branch,r,u", path);
    EdgeValueFunction e;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 3) throw std::runtime_error("bad row in " + path);
        const auto b = branch_from_name(std::string(c[0]));
        if (!b || *b == Branch::O) throw std::runtime_error("bad branch in " + path);
        const double r = parse_double(c[1]);
        e.u[static_cast<std::size_t>(*b)].push_back(parse_double(c[2]));
        e.R = std::max(e.R, r);
    }
    const std::size_t n = e.u[0].size();
    for (const auto& col : e.u)
        if (col.size() != n || n < 2) throw std::runtime_error("ragged edge data in " + path);
    e.h = e.R / static_cast<double>(n - 1);
    return e;
}

// ---------------------------------------------------------------------------
// Limit trajectories as JSON: affine segments carry their coefficients, an
// unbounded final segment uses t1 = null.

inline ordered_json limit_trajectory_to_json(const LimitTrajectory& lt) {
    ordered_json segs = ordered_json::array();
    for (const auto& s : lt.segments) {
        ordered_json j;
        j["t0"] = s.t0;
        if (std::isfinite(s.t1)) j["t1"] = s.t1;
        else j["t1"] = nullptr;
        j["branch"] = branch_name(s.branch);
        j["r0"] = s.r0;
        j["rate"] = s.rate;
        segs.push_back(j);
    }
    ordered_json out;
    out["schema"] = "crossnet-limit/1";
    out["segments"] = segs;
    return out;
}

inline LimitTrajectory limit_trajectory_from_json(const ordered_json& j) {
    if (j.at("schema") != "crossnet-limit/1")
        throw std::runtime_error("unexpected limit-trajectory schema");
    LimitTrajectory lt;
    for (const auto& s : j.at("segments")) {
        LimitSegment seg;
        seg.t0 = s.at("t0").get<double>();
        seg.t1 = s.at("t1").is_null() ? std::numeric_limits<double>::infinity()
                                      : s.at("t1").get<double>();
        const auto b = branch_from_name(s.at("branch").get<std::string>());
        if (!b) throw std::runtime_error("bad branch in limit trajectory");
        seg.branch = *b;
        seg.r0 = s.at("r0").get<double>();
        seg.rate = s.at("rate").get<double>();
        lt.segments.push_back(seg);
    }
    lt.validate();
    return lt;
}

// ---------------------------------------------------------------------------
// Convergence reports as JSON.

inline ordered_json convergence_report_to_json(const ConvergenceReport& r) {
    ordered_json out;
    out["schema"] = "crossnet-convergence/1";
    out["cost"] = r.cost_name;
    out["lambda"] = r.lambda;
    out["region"] = {r.region.x1_lo, r.region.x1_hi, r.region.x2_lo, r.region.x2_hi};
    out["h"] = r.h;
    out["probes"] = r.probe_count;
    out["seed"] = r.seed;
    out["eps"] = r.eps;
    out["sup_error"] = r.sup_error;
    out["one_sided_gap"] = r.one_sided_gap;
    ordered_json margins = ordered_json::array();
    for (const auto& m : r.chain_margins) margins.push_back({m[0], m[1], m[2]});
    out["chain_margins"] = margins;
    out["lipschitz_fit"] = r.lipschitz_fit;
    out["scheme_slack"] = r.scheme_slack;
    out["quarter_power_coeff"] = r.quarter_power_coeff;
    return out;
}

inline ConvergenceReport convergence_report_from_json(const ordered_json& j) {
    if (j.at("schema") != "crossnet-convergence/1")
        throw std::runtime_error("unexpected convergence-report schema");
    ConvergenceReport r;
    r.cost_name = j.at("cost").get<std::string>();
    r.lambda = j.at("lambda").get<double>();
    const auto& reg = j.at("region");
    r.region.x1_lo = reg.at(0).get<double>();
    r.region.x1_hi = reg.at(1).get<double>();
    r.region.x2_lo = reg.at(2).get<double>();
    r.region.x2_hi = reg.at(3).get<double>();
    r.h = j.at("h").get<double>();
    r.region.h = r.h;
    r.probe_count = j.at("probes").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.eps = j.at("eps").get<std::vector<double>>();
    r.sup_error = j.at("sup_error").get<std::vector<double>>();
    r.one_sided_gap = j.at("one_sided_gap").get<std::vector<double>>();
    for (const auto& m : j.at("chain_margins"))
        r.chain_margins.push_back({m.at(0).get<double>(), m.at(1).get<double>(),
                                   m.at(2).get<double>()});
    r.lipschitz_fit = j.at("lipschitz_fit").get<std::vector<double>>();
    r.scheme_slack = j.at("scheme_slack").get<std::vector<double>>();
    r.quarter_power_coeff = j.at("quarter_power_coeff").get<double>();
    return r;
}

// ---------------------------------------------------------------------------
// Trajectory manifest: parameters plus the checksum of the sample file.

inline ordered_json trajectory_manifest(const TrajectoryRecord& traj,
                                        const std::string& csv_name,
                                        std::uint64_t csv_checksum) {
    ordered_json control;
    control["t"] = traj.control.t;
    ordered_json vals = ordered_json::array();
    for (const auto& a : traj.control.a) vals.push_back({a.x1, a.x2});
    control["a"] = vals;

    ordered_json out;
    out["schema"] = "crossnet-trajectory/1";
    out["eps"] = traj.eps;
    out["x0"] = {traj.x0.x1, traj.x0.x2};
    out["horizon"] = traj.config.horizon;
    out["rel_tol"] = traj.config.rel_tol;
    out["abs_tol"] = traj.config.abs_tol;
    out["max_step_factor"] = traj.config.max_step_factor;
    out["samples"] = traj.times.size();
    out["accepted_steps"] = traj.accepted_steps;
    out["control"] = control;
    out["csv"] = csv_name;
    out["csv_fnv1a64"] = checksum_hex(csv_checksum);
    return out;
}

inline void write_json(const std::string& path, const ordered_json& j) {
    auto f = detail::open_out(path);
    f << j.dump(2) << '\n';
}

inline ordered_json read_json(const std::string& path) {
    auto f = detail::open_in(path);
    return ordered_json::parse(f);
}

}  // namespace crossnet
