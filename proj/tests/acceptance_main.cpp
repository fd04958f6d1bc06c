// Acceptance gate. Each criterion prints exactly one PASS/FAIL line with the
// measured quantities; the process exits nonzero if any criterion fails.
// Tolerances are fixed here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <crossnet/experiments.hpp>

using namespace crossnet;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.3g", key, v);
    return buf;
}

TrajectoryRecord run(Vec2 x, const ControlSchedule& a, double eps, double horizon,
                     std::size_t samples = 50) {
    IntegratorConfig cfg;
    cfg.horizon = horizon;
    cfg.samples = samples;
    return integrate_perturbed(x, a, eps, cfg);
}

// 1: the descent flow lands on the closed-form projection, fast
void c01() {
    Timer timer;
    Rng rng(11);
    double worst_r = 0.0;
    bool branches = true;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x = rng.point_in_box(-2.0, 2.0);
        const GradientFlowResult fl = gradient_flow(x);
        const NetworkPoint want = project_to_network(x);
        branches = branches && fl.limit.branch == want.branch;
        worst_r = std::max(worst_r, std::abs(fl.limit.radius - want.radius));
    }
    const double t = timer.seconds();
    report("descent-flow-projection", branches && worst_r <= 1e-5 && t < 10.0,
           fmt("max_radius_err", worst_r) + " " + fmt("elapsed_s", t));
}

// 2: the conserved quantity of the descent flow drifts below 1e-8
void c02() {
    Rng rng(12);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec2 x = rng.point_in_box(-2.0, 2.0);
        const GradientFlowResult fl = gradient_flow(x);
        const double inv0 = x.x2 * x.x2 - x.x1 * x.x1;
        for (int q = 0; q < 100; ++q) {
            const Vec2 z = fl.eval(fl.elapsed * (q + 1) / 100.0);
            worst = std::max(worst, std::abs((z.x2 * z.x2 - z.x1 * z.x1) - inv0));
        }
    }
    report("hyperbola-invariant", worst <= 1e-8, fmt("max_drift", worst));
}

// 3: sublevel sets of the penalty at the critical scale are invariant
void c03() {
    Rng rng(13);
    double worst_ratio = 0.0;
    for (double eps : {1e-2, 1e-3}) {
        const double level = invariance_threshold(1.0, eps);
        for (int i = 0; i < 25; ++i) {
            // sample inside the sublevel: clamp the second coordinate
            const double x1 = rng.uniform(-1.5, 1.5);
            const double cap = std::min(1.5, std::sqrt(level) / std::max(1e-9, std::abs(x1)));
            const double x2 = rng.uniform(-cap, cap);
            ControlSchedule a;
            a.t = {0.0, 0.4, 0.7};
            a.a = {rng.direction(), rng.direction(), rng.direction()};
            const auto tr = run({x1, x2}, a, eps, 1.0);
            for (int q = 0; q <= 50; ++q)
                worst_ratio = std::max(worst_ratio, penalty(tr.state_at(q / 50.0)) / level);
        }
    }
    report("invariant-sublevels", worst_ratio <= 1.0 + 1e-6, fmt("max_level_ratio", worst_ratio));
}

// 4: entry time into the critical sublevel obeys the quarter-power bound,
//    with a stable fitted coefficient across eps
void c04() {
    Rng rng(14);
    const double gamma = 0.5;
    std::vector<double> coeff;
    bool bound_ok = true, entered = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double lam = std::pow(eps, 4.0 * gamma / 3.0);
        double cmax = 0.0;
        for (int i = 0; i < 20; ++i) {
            Vec2 x = rng.point_in_box(-1.5, 1.5);
            if (penalty(x) <= lam) x = Vec2{1.0, 1.1};  // keep starts outside the level
            ControlSchedule a;
            a.t = {0.0, 0.5};
            a.a = {rng.direction(), rng.direction()};
            const auto tr = run(x, a, eps, 1.0, 200);
            const auto t = entry_time(tr, lam);
            if (!t) {
                entered = false;
                continue;
            }
            const double allowance = 4.0 * std::pow(penalty(x), 0.25) * std::pow(eps, 1.0 - gamma);
            bound_ok = bound_ok && *t <= allowance + 1e-12;
            cmax = std::max(cmax, *t / (std::pow(penalty(x), 0.25) * std::pow(eps, 1.0 - gamma)));
        }
        coeff.push_back(cmax);
    }
    // the fitted coefficient must sit under the hard bound and stay of the
    // same order between consecutive eps rungs
    bool stable = true;
    double worst_c = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        worst_c = std::max(worst_c, coeff[i]);
        if (i > 0) {
            const double r = coeff[i] / coeff[i - 1];
            stable = stable && r >= 1.0 / 3.0 && r <= 3.0;
        }
    }
    report("entry-time-bound", entered && bound_ok && worst_c <= 4.0 && stable,
           fmt("fitted_coeff_max", worst_c));
}

// 5: cube-law rescaling identity
void c05() {
    Rng rng(15);
    double worst = 0.0;
    const double eps = 1e-3, T = 0.8, rho = 2.0;
    for (int i = 0; i < 20; ++i) {
        const Vec2 x = rng.point_in_box(-1.5, 1.5);
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        const ControlSchedule a = ControlSchedule::constant({std::cos(th), std::sin(th)});
        const auto base = run(x, a, eps, T, 8);
        const auto scaled = run(rho * x, a, rho * rho * rho * eps, rho * T, 8);
        for (int q = 1; q <= 8; ++q) {
            const double t = T * q / 8.0;
            worst = std::max(worst, norm(base.state_at(t) - scaled.state_at(rho * t) / rho));
        }
    }
    report("scaling-identity", worst <= 1e-9, fmt("max_mismatch", worst));
}

// 6: junction behavior: branch selection, terminal proximity, and the
//    cube-root crossing shift inside its frozen window
void c06() {
    const NetworkPoint start = NetworkPoint::make(Branch::N, 1.0);
    const double eps = 1e-4, horizon = 2.5;
    bool branches = true;
    double worst_dev = 0.0;
    for (double th : {0.3, 2.2, 7.0 * M_PI / 6.0, 5.0 * M_PI / 4.0, 4.3, 5.8}) {
        const auto lt = constant_control_limit(start, th);
        const auto tr = run(embed(start), ControlSchedule::constant({std::cos(th), std::sin(th)}),
                            eps, horizon, 10);
        const Vec2 X = tr.state_at(horizon);
        branches = branches && nearest_network_point(X).branch == lt.at(horizon).branch;
        worst_dev = std::max(worst_dev, norm(X - lt.eval(horizon)));
    }

    bool window = true;
    double worst_hi = -1e9;
    for (double th : {7.0 * M_PI / 6.0, 5.0 * M_PI / 4.0, 4.3}) {
        const double low = crossing_shift_lower_ratio(th);
        for (double se : {1e-3, 1e-4, 1e-5}) {
            const auto tr = run(embed(start), ControlSchedule::constant({std::cos(th), std::sin(th)}),
                                se, 1.0 / (-std::sin(th)) + 0.4, 10);
            const auto tc = first_axis_crossing(tr, 1);
            if (!tc) {
                window = false;
                continue;
            }
            const double ratio = tr.state_at(*tc).x1 / std::cbrt(se);
            window = window && ratio >= low - 1e-6 && ratio <= -0.05;
            worst_hi = std::max(worst_hi, ratio);
        }
    }
    report("junction-law", branches && worst_dev <= 10.0 * std::cbrt(eps) && window,
           fmt("max_terminal_dev", worst_dev) + " " + fmt("max_shift_ratio", worst_hi));
}

// 7: dyadic chattering: exact returns, exact probe, eps-independence
void c07() {
    const ZenoConstruction z = zeno_control({Branch::E, Branch::N, Branch::W, Branch::S}, 10);
    bool dyadic = true;
    for (int k = 0; k <= 10; ++k) {
        const NetworkPoint p = z.limit.at(std::ldexp(1.0, -k));
        dyadic = dyadic && p.branch == Branch::O && p.radius == 0.0;
    }
    const Vec2 probe = z.limit.eval(0.375);
    const bool probe_ok = probe.x1 == 0.0 && probe.x2 == 0.125;

    double worst = 0.0;
    std::vector<Vec2> prev;
    for (double eps : {1e-3, 1e-4}) {
        const auto tr = run({0.0, 0.0}, z.control, eps, 1.0);
        std::vector<Vec2> at;
        for (int k = 0; k <= 10; ++k) {
            const Vec2 X = tr.state_at(std::ldexp(1.0, -k));
            worst = std::max(worst, norm(X));
            at.push_back(X);
        }
        if (!prev.empty())
            for (std::size_t i = 0; i < at.size(); ++i)
                worst = std::max(worst, norm(at[i] - prev[i]));
        prev = std::move(at);
    }
    report("zeno-chattering", dyadic && probe_ok && worst <= 1e-9, fmt("max_residue", worst));
}

// 8: history dependence of the limit flow
void c08() {
    const double th = 5.0 * M_PI / 4.0;
    const auto from_edge = constant_control_limit(NetworkPoint::make(Branch::N, 1.0), th);
    const auto pinned = constant_control_limit(NetworkPoint::origin(), th);
    bool ok = from_edge.at(2.5).branch == Branch::W && pinned.at(2.5).branch == Branch::O &&
              network_distance(from_edge.at(2.5), pinned.at(2.5)) > 0.5;
    double min_dist = 1e9;
    for (int n : {4, 16, 64}) {
        const auto lt = constant_control_limit(NetworkPoint::make(Branch::N, 1.0 / n), th);
        min_dist = std::min(min_dist, network_distance(lt.at(2.0), pinned.at(2.0)));
    }
    ok = ok && min_dist >= 1.0;
    report("limit-witnesses", ok, fmt("min_displacement", min_dist));
}

// 9: the shrink-and-slow tracker
void c09() {
    Rng rng(19);
    double worst_ratio = 0.0, worst_speed = 0.0;
    std::size_t off = 0;
    for (double eps : {1e-2, 1e-3})
        for (int i = 0; i < 5; ++i) {
            const Vec2 x{(rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.6, 1.5),
                         (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.6, 1.5)};
            ControlSchedule a;
            a.t = {0.0, 0.33, 0.66};
            a.a = {rng.direction(), rng.direction(), rng.direction()};
            const auto tr = run(x, a, eps, 1.0, 100);
            const TrackingResult res = tracking_trajectory(tr, 0.5);
            worst_ratio = std::max(worst_ratio, res.deviation_ratio);
            worst_speed = std::max(worst_speed, res.max_speed);
            off += res.off_network;
        }
    report("tracking",
           worst_ratio <= 3.0 && worst_speed <= std::sqrt(2.0) + 1e-6 && off == 0,
           fmt("max_ratio", worst_ratio) + " " + fmt("max_speed", worst_speed));
}

// 10: the strategy-cost gap for the control-dependent running cost
void c10() {
    const CounterexampleCosts at1 = counterexample_costs(1.0);
    bool frozen = std::abs(at1.relaxed_closed_form - 1.0505891479787193186) <= 1e-9 &&
                  std::abs(at1.network_closed_form - 1.3678794411714423216) <= 1e-9;
    double worst_quad = 0.0, min_gap = 1e9;
    for (double lam : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const CounterexampleCosts c = counterexample_costs(lam);
        worst_quad = std::max({worst_quad,
                               std::abs(c.relaxed_quadrature - c.relaxed_closed_form),
                               std::abs(c.network_quadrature - c.network_closed_form)});
        min_gap = std::min(min_gap, c.gap);
    }
    report("strategy-gap", frozen && worst_quad <= 1e-6 && min_gap > 0.0,
           fmt("max_quad_err", worst_quad) + " " + fmt("min_gap", min_gap));
}

// 11: exactness and stability of the value solvers
void c11() {
    bool exact = true;
    {
        GridSpec spec{-1.0, 1.0, -1.0, 1.0, 0.25};
        const GridValueFunction v = solve_value_eps(cost_one(), 2.0, 0.5, spec);
        for (double u : v.u) exact = exact && u == 0.5;
        const EdgeValueFunction w = solve_value_network(cost_one(), 2.0, 2.0, 0.1);
        for (const auto& e : w.u)
            for (double u : e) exact = exact && u == 0.5;
    }
    bool bounded = true;
    double lip_ratio = 0.0;
    {
        GridSpec coarse{-2.0, 2.0, -2.0, 2.0, 0.1};
        const GridValueFunction v1 = solve_value_eps(cost_norm_capped(), 1.0, 0.2, coarse);
        for (double u : v1.u) bounded = bounded && u >= 0.0 && u <= 2.0 + 1e-12;
        GridSpec fine{-2.0, 2.0, -2.0, 2.0, 0.05};
        const GridValueFunction v2 = solve_value_eps(cost_norm_capped(), 1.0, 0.2, fine);
        const double l1 = axis_lipschitz(v1), l2 = axis_lipschitz(v2);
        lip_ratio = std::max(l1, l2) / std::min(l1, l2);
    }
    report("solver-exactness", exact && bounded && lip_ratio <= 2.0,
           fmt("lipschitz_ratio", lip_ratio));
}

// 12: the planar value approaches the projected network value from above
//     with the quarter-power modulus, within the time budget
void c12() {
    Timer timer;
    GridSpec region{-2.0, 2.0, -2.0, 2.0, 0.02};
    const ConvergenceReport rep =
        convergence_study(cost_norm_capped(), 1.0, region, 0.02, {0.2, 0.1, 0.05}, 100,
                          0x5eed5eedULL);
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.sup_error.size(); ++i)
        decreasing = decreasing && rep.sup_error[i] < rep.sup_error[i - 1];
    double min_margin = 1e9;
    for (const auto& m : rep.chain_margins)
        min_margin = std::min({min_margin, m[0], m[1], m[2]});
    double lmin = rep.lipschitz_fit[0], lmax = rep.lipschitz_fit[0];
    for (double l : rep.lipschitz_fit) {
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    const double t = timer.seconds();
    report("value-convergence",
           decreasing && min_margin >= 0.0 && lmax <= 2.0 * lmin && t < 600.0,
           fmt("sup_err_last", rep.sup_error.back()) + " " + fmt("min_margin", min_margin) +
               " " + fmt("elapsed_s", t));
}

}  // namespace

int main() {
    c01();
    c02();
    c03();
    c04();
    c05();
    c06();
    c07();
    c08();
    c09();
    c10();
    c11();
    c12();
    std::printf("acceptance: %d/12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
