// limits.hpp — the vanishing-penalty limit objects: network-valued limit
// trajectories (piecewise affine in the edge radius), the steepest-descent
// projection flow, the junction dispatch table for frozen controls, the
// fast-oscillation construction that visits the junction infinitely often,
// the network tracker of a penalized trajectory, and control surgery /
// steering on the network itself.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "geometry.hpp"
#include "integrate.hpp"

namespace crossnet {

// ---------------------------------------------------------------------------
// Network-valued trajectories, piecewise affine in the radius.

struct LimitSegment {
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    Branch branch = Branch::O;
    double r0 = 0.0;    // radius at t0
    double rate = 0.0;  // dr/dt on [t0, t1]

    double radius_at(double t) const { return r0 + rate * (t - t0); }
};

struct LimitTrajectory {
    std::vector<LimitSegment> segments;  // contiguous, increasing in time

    void validate() const {
        if (segments.empty()) throw std::invalid_argument("LimitTrajectory: empty");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (!(segments[i].t1 > segments[i].t0))
                throw std::invalid_argument("LimitTrajectory: degenerate segment");
            if (i + 1 < segments.size() && segments[i].t1 != segments[i + 1].t0)
                throw std::invalid_argument("LimitTrajectory: segments not contiguous");
        }
    }

    double t_begin() const { return segments.front().t0; }
    double t_end() const { return segments.back().t1; }

    const LimitSegment& segment_at(double t) const {
        if (segments.empty()) throw std::logic_error("LimitTrajectory: empty");
        std::size_t lo = 0, hi = segments.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (segments[mid].t0 <= t) lo = mid;
            else hi = mid - 1;
        }
        return segments[lo];
    }

    NetworkPoint at(double t) const {
        const LimitSegment& s = segment_at(t);
        double r = s.radius_at(t);
        if (r < 0.0 && r > -1e-12) r = 0.0;  // endpoint roundoff
        return NetworkPoint::make(s.branch, r);
    }

    Vec2 eval(double t) const { return embed(at(t)); }
};

// ---------------------------------------------------------------------------
// Steepest descent for the penalty: z' = -grad d(z). Converges to a network
// point; along the way z2^2 - z1^2 is an exact invariant. The run is chunked
// with doubling horizons because the final approach is algebraically slow.

struct GradientFlowResult {
    std::vector<DenseOutput<2>> chunks;  // consecutive global time spans
    Vec2 end;
    double end_penalty = 0.0;
    double elapsed = 0.0;
    NetworkPoint limit;  // classification of the end state

    Vec2 eval(double t) const {
        if (chunks.empty()) throw std::logic_error("GradientFlowResult: empty");
        std::size_t lo = 0, hi = chunks.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (chunks[mid].t_begin <= t) lo = mid;
            else hi = mid - 1;
        }
        const auto y = chunks[lo].eval(std::min(t, chunks[lo].t_end));
        return {y[0], y[1]};
    }
};

inline GradientFlowResult gradient_flow(Vec2 x, double stop_tol = 1e-22) {
    if (!(stop_tol > 0.0)) throw std::invalid_argument("gradient_flow: stop_tol must be positive");
    GradientFlowResult res;
    res.end = x;
    res.end_penalty = penalty(x);
    if (res.end_penalty <= stop_tol) {
        res.limit = nearest_network_point(x);
        return res;
    }

    auto rhs = [](double, const State<2>& y, State<2>& dy) {
        const Vec2 g = penalty_gradient(Vec2{y[0], y[1]});
        dy[0] = -g.x1;
        dy[1] = -g.x2;
    };

    IntegrateOptions<2> opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;

    double t = 0.0;
    double span = 1e-4;
    State<2> y{x.x1, x.x2};
    for (int chunk = 0; chunk < 200; ++chunk) {
        auto dense = integrate<2>(rhs, t, t + span, y, opt);
        y = dense.eval(t + span);
        t += span;
        span *= 2.0;
        res.chunks.push_back(std::move(dense));
        res.end = Vec2{y[0], y[1]};
        res.end_penalty = penalty(res.end);
        if (res.end_penalty <= stop_tol) {
            res.elapsed = t;
            res.limit = nearest_network_point(res.end);
            return res;
        }
    }
    throw std::runtime_error("gradient_flow: did not reach stop_tol within chunk budget");
}

// ---------------------------------------------------------------------------
// Limit dynamics on a single edge: the radius follows the inward/outward
// component of the control until the junction is reached (or the interval
// ends). Junction behavior is out of scope here; see constant_control_limit.

struct EdgeLimitResult {
    LimitTrajectory traj;
    std::optional<double> junction_time;  // first time the radius hits zero
};

inline EdgeLimitResult edge_limit_dynamics(NetworkPoint start, const ControlSchedule& alpha,
                                           double t0, double t1) {
    if (start.branch == Branch::O)
        throw std::invalid_argument("edge_limit_dynamics: start must lie on an open edge");
    if (!(t1 > t0)) throw std::invalid_argument("edge_limit_dynamics: need t1 > t0");
    alpha.validate();

    const Vec2 dir = branch_direction(start.branch);
    EdgeLimitResult res;
    double r = start.radius;

    // walk the control pieces overlapping [t0, t1]
    std::vector<double> cuts{t0};
    for (double s : alpha.t)
        if (s > t0 && s < t1) cuts.push_back(s);
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double rate = dot(alpha.value_at(a), dir);
        if (rate < 0.0 && r + rate * (b - a) < 0.0) {
            const double hit = a + r / (-rate);
            res.traj.segments.push_back({a, hit, start.branch, r, rate});
            res.junction_time = hit;
            return res;
        }
        res.traj.segments.push_back({a, b, start.branch, r, rate});
        r += rate * (b - a);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Frozen control alpha = e_theta: full dispatch table for the limit motion.
//
// From the junction: the branch best aligned with the heading is taken at
// speed <e_theta, e_branch>; exactly diagonal headings keep the state pinned
// at the junction. From inside an edge the state rides the aligned component
// until the junction, then either turns onto the adjacent branch (heading in
// the closed eighth-turn past the edge axis) or passes straight through onto
// the opposite branch (heading dominated by the inward component).

inline constexpr double heading_snap_tol = default_tau_gamma;  // 1e-9 radians

namespace detail {

inline double normalize_angle(double theta) {
    const double two_pi = 2.0 * M_PI;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return t;
}

// snap to the nearest multiple of pi/4 when within heading_snap_tol, using
// one shared table so later comparisons are bit-exact
inline const std::array<double, 9>& eighth_turns() {
    static const std::array<double, 9> crit = [] {
        std::array<double, 9> c{};
        for (int m = 0; m <= 8; ++m) c[m] = static_cast<double>(m) * (M_PI / 4.0);
        return c;
    }();
    return crit;
}

inline double snap_heading(double theta) {
    const auto& crit = eighth_turns();
    for (int m = 0; m <= 8; ++m)
        if (std::abs(theta - crit[m]) <= heading_snap_tol) return m == 8 ? 0.0 : crit[m];
    return theta;
}

}  // namespace detail

inline LimitTrajectory constant_control_limit(NetworkPoint start, double theta) {
    const auto& crit = detail::eighth_turns();
    const double inf = std::numeric_limits<double>::infinity();
    LimitTrajectory out;

    if (start.branch == Branch::O) {
        const double th = detail::snap_heading(detail::normalize_angle(theta));
        // diagonal heading: all pull goes into the penalty, the state stays put
        for (int m : {1, 3, 5, 7})
            if (th == crit[m]) {
                out.segments.push_back({0.0, inf, Branch::O, 0.0, 0.0});
                return out;
            }
        const Vec2 e{std::cos(th), std::sin(th)};
        Branch best = Branch::E;
        double score = -2.0;
        for (Branch b : {Branch::E, Branch::N, Branch::W, Branch::S}) {
            const double s = dot(e, branch_direction(b));
            if (s > score) {
                score = s;
                best = b;
            }
        }
        out.segments.push_back({0.0, inf, best, 0.0, score});
        return out;
    }

    // reduce to a start on the upper vertical edge by quarter turns
    const int k = quarter_turns_to_north(start.branch);
    const double th = detail::snap_heading(
        detail::normalize_angle(theta + static_cast<double>(k) * (M_PI / 2.0)));
    const double s = std::sin(th), c = std::cos(th);
    const double r = start.radius;

    std::vector<LimitSegment> segs;
    if (s >= 0.0) {
        // outward (or tangentially drifting) — never reaches the junction
        segs.push_back({0.0, inf, Branch::N, r, s});
    } else {
        const double t_hit = r / (-s);
        segs.push_back({0.0, t_hit, Branch::N, r, s});
        if (th <= crit[5]) {
            // heading in the closed eighth past the inward axis: turn left
            segs.push_back({t_hit, inf, Branch::W, 0.0, -c});
        } else if (th < crit[7]) {
            // inward component dominates: pass straight through the junction
            segs.push_back({t_hit, inf, Branch::S, 0.0, -s});
        } else {
            segs.push_back({t_hit, inf, Branch::E, 0.0, c});
        }
    }
    // undo the reduction
    const int back = (4 - k) % 4;
    for (LimitSegment& seg : segs)
        if (seg.branch != Branch::O) seg.branch = rotate_branch(seg.branch, back);
    out.segments = std::move(segs);
    return out;
}

// ---------------------------------------------------------------------------
// Junction chattering: a control that leaves and re-enters the junction on a
// dyadic cascade, visiting all four branches in a fixed cyclic order. Pulse n
// occupies [2^{-n-1}, 2^{-n}): half a pulse outward along branch cycle[n mod 4],
// half straight back. The limit trajectory returns to the junction at every
// dyadic time 2^{-k} and the construction is independent of the penalty scale
// because the path never leaves the network.

struct ZenoConstruction {
    ControlSchedule control;
    LimitTrajectory limit;
    std::array<Branch, 4> cycle{};
    int depth = 0;
};

inline ZenoConstruction zeno_control(const std::array<Branch, 4>& cycle, int depth) {
    for (Branch b : cycle)
        if (b == Branch::O)
            throw std::invalid_argument("zeno_control: cycle entries must be open edges");
    if (depth < 1 || depth > 50) throw std::invalid_argument("zeno_control: depth out of range");

    ZenoConstruction z;
    z.cycle = cycle;
    z.depth = depth;

    const double inf = std::numeric_limits<double>::infinity();
    const double t_first = std::ldexp(1.0, -depth);  // 2^-depth

    z.control.t.push_back(0.0);
    z.control.a.push_back(Vec2{0.0, 0.0});
    z.limit.segments.push_back({0.0, t_first, Branch::O, 0.0, 0.0});

    for (int n = depth - 1; n >= 0; --n) {
        const Branch b = cycle[static_cast<std::size_t>(n) % 4];
        const Vec2 e = branch_direction(b);
        const double lo = std::ldexp(1.0, -n - 1);   // 2^{-n-1}
        const double mid = 3.0 * std::ldexp(1.0, -n - 2);
        const double hi = std::ldexp(1.0, -n);
        z.control.t.push_back(lo);
        z.control.a.push_back(e);
        z.control.t.push_back(mid);
        z.control.a.push_back(Vec2{-e.x1, -e.x2});
        z.limit.segments.push_back({lo, mid, b, 0.0, 1.0});
        z.limit.segments.push_back({mid, hi, b, std::ldexp(1.0, -n - 2), -1.0});
    }
    z.control.t.push_back(1.0);
    z.control.a.push_back(Vec2{0.0, 0.0});
    z.limit.segments.push_back({1.0, inf, Branch::O, 0.0, 0.0});
    z.control.validate();
    z.limit.validate();
    return z;
}

// ---------------------------------------------------------------------------
// Network tracker of a penalized trajectory: after an initial settling time
// the state hugs the network, and shrinking it by a small margin delta and a
// slowdown factor sigma yields a network-valued path moving no faster than
// sqrt(2) times the control bound while staying uniformly close to the state.

struct TrackingResult {
    double gamma = 0.0;
    double delta = 0.0;
    double sigma = 1.0;
    double t_start = 0.0;

    std::vector<double> times;
    std::vector<NetworkPoint> y;
    std::vector<Vec2> y_embedded;

    double max_deviation = 0.0;     // sup |X - Y| over the samples
    double deviation_scale = 0.0;   // delta + eps^{5 gamma/24} * horizon
    double deviation_ratio = 0.0;   // max_deviation / deviation_scale
    double max_speed = 0.0;         // geodesic finite-difference speed of Y
    std::size_t off_network = 0;    // samples where both components survived
};

inline Vec2 shrink_to_network(Vec2 x, double delta, double sigma) {
    auto clip = [&](double v) {
        const double m = std::max(0.0, std::abs(v) - delta);
        return sigma * (v < 0.0 ? -m : m);
    };
    return {clip(x.x1), clip(x.x2)};
}

inline TrackingResult tracking_trajectory(const TrajectoryRecord& traj, double gamma,
                                          std::size_t samples = 2000) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("tracking_trajectory: gamma must lie in (0,1)");
    const double eps = traj.eps;
    const double T = traj.horizon();
    const double f_inf = traj.control.sup_norm();

    TrackingResult res;
    res.gamma = gamma;
    res.delta = std::pow(eps, gamma / 8.0);
    res.sigma = 1.0 / (1.0 + 2.0 * f_inf * std::pow(eps, 5.0 * gamma / 24.0));
    res.t_start = 4.0 * std::pow(penalty(traj.x0), 0.25) * std::pow(eps, 1.0 - gamma);
    if (res.t_start >= T)
        throw std::invalid_argument("tracking_trajectory: horizon shorter than settling time");
    res.deviation_scale = res.delta + std::pow(eps, 5.0 * gamma / 24.0) * T;

    const std::size_t n = std::max<std::size_t>(samples, 2);
    res.times.reserve(n + 1);
    res.y.reserve(n + 1);
    res.y_embedded.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t =
            res.t_start + (T - res.t_start) * static_cast<double>(i) / static_cast<double>(n);
        const Vec2 X = traj.state_at(t);
        const Vec2 Y = shrink_to_network(X, res.delta, res.sigma);
        res.times.push_back(t);
        res.y_embedded.push_back(Y);
        if (Y.x1 != 0.0 && Y.x2 != 0.0) ++res.off_network;
        res.y.push_back(nearest_network_point(Y));
        res.max_deviation = std::max(res.max_deviation, norm(X - Y));
    }
    for (std::size_t i = 0; i + 1 < res.y.size(); ++i) {
        const double dt = res.times[i + 1] - res.times[i];
        const double dist = network_distance(res.y[i], res.y[i + 1]);
        res.max_speed = std::max(res.max_speed, dist / dt);
    }
    res.deviation_ratio = res.max_deviation / res.deviation_scale;
    return res;
}

// ---------------------------------------------------------------------------
// Control surgery: subtracting the penalty compensator's derivative from the
// original control gives a control whose integral moves the state exactly
// like the penalized trajectory, shifted by the change of starting point.

struct RestrictedControlSamples {
    std::vector<double> times;
    std::vector<Vec2> values;  // alpha(t) - (1/eps) grad d(X(t))
    double max_norm = 0.0;
};

inline RestrictedControlSamples restricted_control(const TrajectoryRecord& traj,
                                                   std::size_t samples = 2000) {
    RestrictedControlSamples out;
    const double T = traj.horizon();
    const std::size_t n = std::max<std::size_t>(samples, 2);
    out.times.reserve(n + 1);
    out.values.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(n);
        const Vec2 g = penalty_gradient(traj.state_at(t));
        const Vec2 a = traj.control.value_at(t);
        const Vec2 v{a.x1 - g.x1 / traj.eps, a.x2 - g.x2 / traj.eps};
        out.times.push_back(t);
        out.values.push_back(v);
        out.max_norm = std::max(out.max_norm, norm(v));
    }
    return out;
}

// Quadrature of the surged control over [0, t]: \int alpha - (1/eps)\int grad d.
// Independent route for the replay identity Y(t) = xbar + \int abar
//                                                = X(t) + (xbar - x).
inline Vec2 restricted_control_integral(const TrajectoryRecord& traj, double t) {
    const Vec2 kq = k_quadrature(traj, t);  // (1/eps) \int grad d
    const Vec2 F = traj.control_integral_at(t);
    return {F.x1 - kq.x1, F.x2 - kq.x2};
}

// ---------------------------------------------------------------------------
// Steering between two network points with a unit-ball control: ride the
// common branch directly, otherwise go through the junction. Total time is
// the geodesic distance, at most sqrt(2) times the ambient distance.

struct SteeringPlan {
    ControlSchedule control;
    double tau = 0.0;  // arrival time
    LimitTrajectory path;
};

inline SteeringPlan steer_on_network(NetworkPoint xbar, NetworkPoint ybar) {
    const double inf = std::numeric_limits<double>::infinity();
    SteeringPlan plan;
    plan.control.t.push_back(0.0);

    const bool same_edge = xbar.branch == ybar.branch;
    if (same_edge) {
        const double diff = ybar.radius - xbar.radius;
        plan.tau = std::abs(diff);
        if (plan.tau == 0.0) {
            plan.control.a.push_back(Vec2{0.0, 0.0});
            plan.path.segments.push_back({0.0, inf, xbar.branch, xbar.radius, 0.0});
            return plan;
        }
        const Vec2 e = branch_direction(xbar.branch);
        const double sgn = diff > 0.0 ? 1.0 : -1.0;
        plan.control.a.push_back(Vec2{sgn * e.x1, sgn * e.x2});
        plan.control.t.push_back(plan.tau);
        plan.control.a.push_back(Vec2{0.0, 0.0});
        plan.path.segments.push_back({0.0, plan.tau, xbar.branch, xbar.radius, sgn});
        plan.path.segments.push_back({plan.tau, inf, ybar.branch, ybar.radius, 0.0});
        return plan;
    }

    // through the junction: inward along xbar's edge, outward along ybar's
    plan.tau = xbar.radius + ybar.radius;
    double t = 0.0;
    if (xbar.radius > 0.0) {
        const Vec2 e = branch_direction(xbar.branch);
        plan.control.a.push_back(Vec2{-e.x1, -e.x2});
        plan.path.segments.push_back({0.0, xbar.radius, xbar.branch, xbar.radius, -1.0});
        t = xbar.radius;
    }
    if (ybar.radius > 0.0) {
        const Vec2 e = branch_direction(ybar.branch);
        if (t > 0.0) plan.control.t.push_back(t);
        if (plan.control.a.size() < plan.control.t.size()) plan.control.a.push_back(e);
        else if (plan.control.a.empty()) plan.control.a.push_back(e);
        plan.path.segments.push_back({t, t + ybar.radius, ybar.branch, 0.0, 1.0});
        t += ybar.radius;
    }
    if (plan.control.a.empty()) plan.control.a.push_back(Vec2{0.0, 0.0});
    if (t > 0.0) {
        plan.control.t.push_back(t);
        plan.control.a.push_back(Vec2{0.0, 0.0});
    }
    plan.path.segments.push_back({t, inf, ybar.branch, ybar.radius, 0.0});
    plan.control.validate();
    plan.path.validate();
    return plan;
}

}  // namespace crossnet
