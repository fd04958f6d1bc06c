// experiments.hpp — named, reproducible experiment scenarios. Each run takes
// a config (scenario name, output directory, flat typed params), writes its
// artifacts plus a manifest with checksums and pass/fail checks, and is
// bytewise deterministic for fixed params.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"

namespace crossnet {

struct ExperimentConfig {
    std::string scenario;
    std::string out_dir = "out";
    ordered_json params = ordered_json::object();

    static ExperimentConfig from_json(const ordered_json& j) {
        if (!j.is_object() || !j.contains("schema_version") ||
            j.at("schema_version") != "crossnet-config/1")
            throw std::runtime_error("config: expected schema_version crossnet-config/1");
        ExperimentConfig c;
        c.scenario = j.at("scenario").get<std::string>();
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("params")) {
            if (!j.at("params").is_object())
                throw std::runtime_error("config: params must be an object");
            c.params = j.at("params");
        }
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (key != "schema_version" && key != "scenario" && key != "out_dir" &&
                key != "params")
                throw std::runtime_error("config: unknown key '" + key + "'");
        }
        return c;
    }

    ordered_json to_json() const {
        ordered_json j;
        j["schema_version"] = "crossnet-config/1";
        j["scenario"] = scenario;
        j["out_dir"] = out_dir;
        j["params"] = params;
        return j;
    }

    double num(const char* k, double dflt) const {
        return params.contains(k) ? params.at(k).get<double>() : dflt;
    }
    int integer(const char* k, int dflt) const {
        return params.contains(k) ? params.at(k).get<int>() : dflt;
    }
    std::uint64_t uint(const char* k, std::uint64_t dflt) const {
        return params.contains(k) ? params.at(k).get<std::uint64_t>() : dflt;
    }
    std::string str(const char* k, const std::string& dflt) const {
        return params.contains(k) ? params.at(k).get<std::string>() : dflt;
    }
    std::vector<double> num_list(const char* k, std::vector<double> dflt) const {
        return params.contains(k) ? params.at(k).get<std::vector<double>>() : dflt;
    }
};

struct ScenarioResult {
    bool pass = false;
    std::string manifest_path;
    ordered_json manifest;
};

namespace detail {

struct ManifestBuilder {
    std::string dir;
    ordered_json artifacts = ordered_json::array();
    ordered_json checks = ordered_json::array();
    bool all_pass = true;

    explicit ManifestBuilder(std::string d) : dir(std::move(d)) {}

    std::string path_of(const std::string& name) const { return dir + "/" + name; }

    void add_artifact(const std::string& name) {
        ordered_json a;
        a["file"] = name;
        a["fnv1a64"] = checksum_hex(fnv1a64_file(path_of(name)));
        artifacts.push_back(a);
    }

    ordered_json& add_check(const std::string& id, bool pass) {
        ordered_json c;
        c["id"] = id;
        c["pass"] = pass;
        checks.push_back(c);
        all_pass = all_pass && pass;
        return checks.back();
    }

    ordered_json finish(const std::string& scenario, const ordered_json& effective_params) {
        ordered_json m;
        m["schema"] = "crossnet-manifest/1";
        m["scenario"] = scenario;
        m["params"] = effective_params;
        m["artifacts"] = artifacts;
        m["checks"] = checks;
        m["pass"] = all_pass;
        return m;
    }
};

inline ControlSchedule random_piecewise_control(Rng& rng, double horizon, int pieces) {
    ControlSchedule a;
    for (int p = 0; p < pieces; ++p) {
        a.t.push_back(horizon * static_cast<double>(p) / static_cast<double>(pieces));
        a.a.push_back(rng.direction());
    }
    return a;
}

// ---------------------------------------------------------------------------
// junction-behavior: frozen headings from the tip of the north edge. The
// penalized state must pick the branch the limit table picks, land within
// O(eps^{1/3}) of the limit point, and the lateral shift at the first
// junction crossing must scale like eps^{1/3} inside a fixed window.

inline ordered_json scenario_junction_behavior(const ExperimentConfig& cfg,
                                               ManifestBuilder& mb, ordered_json& eff) {
    const double eps = cfg.num("eps", 1e-4);
    const double radius = cfg.num("radius", 1.0);
    const double horizon = cfg.num("horizon", 2.5);
    const std::vector<double> thetas =
        cfg.num_list("thetas", {0.3, 2.2, 7.0 * M_PI / 6.0, 5.0 * M_PI / 4.0, 4.3, 5.8});
    const std::vector<double> shift_eps = cfg.num_list("shift_eps", {1e-3, 1e-4, 1e-5});
    const std::vector<double> shift_thetas =
        cfg.num_list("shift_thetas", {7.0 * M_PI / 6.0, 5.0 * M_PI / 4.0, 4.3});
    eff["eps"] = eps;
    eff["radius"] = radius;
    eff["horizon"] = horizon;
    eff["thetas"] = thetas;
    eff["shift_eps"] = shift_eps;
    eff["shift_thetas"] = shift_thetas;

    const NetworkPoint start = NetworkPoint::make(Branch::N, radius);
    bool branches_ok = true;
    double worst_dev = 0.0;
    {
        auto f = detail::open_out(mb.path_of("junction.csv"));
        f << "theta,branch_limit,branch_state,deviation\n";
        for (double th : thetas) {
            const LimitTrajectory lim = constant_control_limit(start, th);
            const ControlSchedule a = ControlSchedule::constant({std::cos(th), std::sin(th)});
            IntegratorConfig ic;
            ic.horizon = horizon;
            ic.samples = 100;
            const TrajectoryRecord tr = integrate_perturbed(embed(start), a, eps, ic);
            const NetworkPoint want = lim.at(horizon);
            const Vec2 X = tr.state_at(horizon);
            const NetworkPoint got = nearest_network_point(X);
            const double dev = norm(X - embed(want));
            branches_ok = branches_ok && got.branch == want.branch;
            worst_dev = std::max(worst_dev, dev);
            f << format_double(th) << ',' << branch_name(want.branch) << ','
              << branch_name(got.branch) << ',' << format_double(dev) << '\n';
        }
    }
    mb.add_artifact("junction.csv");
    mb.add_check("branch-selection", branches_ok);
    {
        auto& c = mb.add_check("terminal-proximity", worst_dev <= 10.0 * std::cbrt(eps));
        c["max_deviation"] = worst_dev;
        c["allowance"] = 10.0 * std::cbrt(eps);
    }

    bool window_ok = true;
    double worst_ratio_low = 0.0, worst_ratio_high = -1e9;
    {
        auto f = detail::open_out(mb.path_of("crossing.csv"));
        f << "theta,eps,t_cross,shift,ratio\n";
        for (double th : shift_thetas) {
            const double low = crossing_shift_lower_ratio(th);
            for (double se : shift_eps) {
                const ControlSchedule a =
                    ControlSchedule::constant({std::cos(th), std::sin(th)});
                IntegratorConfig ic;
                ic.horizon = radius / (-std::sin(th)) + 0.5;
                ic.samples = 10;
                const TrajectoryRecord tr = integrate_perturbed(embed(start), a, se, ic);
                const auto tc = first_axis_crossing(tr, 1);
                if (!tc) {
                    window_ok = false;
                    continue;
                }
                const double shift = tr.state_at(*tc).x1;
                const double ratio = shift / std::cbrt(se);
                window_ok = window_ok && ratio >= low - 1e-6 && ratio <= -0.05;
                worst_ratio_low = std::min(worst_ratio_low, ratio - low);
                worst_ratio_high = std::max(worst_ratio_high, ratio);
                f << format_double(th) << ',' << format_double(se) << ','
                  << format_double(*tc) << ',' << format_double(shift) << ','
                  << format_double(ratio) << '\n';
            }
        }
    }
    mb.add_artifact("crossing.csv");
    auto& c = mb.add_check("crossing-shift-window", window_ok);
    c["max_ratio"] = worst_ratio_high;
    return eff;
}

// ---------------------------------------------------------------------------
// zeno: the dyadic chattering construction. The limit returns to the
// junction at every dyadic time exactly, and the penalized trajectory rides
// the axes, so it does not depend on eps at all.

inline ordered_json scenario_zeno(const ExperimentConfig& cfg, ManifestBuilder& mb,
                                  ordered_json& eff) {
    const int depth = cfg.integer("depth", 10);
    const std::vector<double> eps_list = cfg.num_list("eps", {1e-3, 1e-4});
    const double probe_t = cfg.num("probe_t", 0.375);
    eff["depth"] = depth;
    eff["eps"] = eps_list;
    eff["probe_t"] = probe_t;

    const std::array<Branch, 4> cycle{Branch::E, Branch::N, Branch::W, Branch::S};
    const ZenoConstruction z = zeno_control(cycle, depth);
    write_json(mb.path_of("zeno_limit.json"), limit_trajectory_to_json(z.limit));
    mb.add_artifact("zeno_limit.json");

    bool dyadic_ok = true;
    for (int k = 0; k <= depth; ++k) {
        const NetworkPoint p = z.limit.at(std::ldexp(1.0, -k));
        dyadic_ok = dyadic_ok && p.branch == Branch::O && p.radius == 0.0;
    }
    mb.add_check("dyadic-return", dyadic_ok);

    // independent expected value at the probe time: locate the pulse by
    // exponent, then the triangular wave inside it
    Vec2 expected{0.0, 0.0};
    {
        int n = 0;
        while (std::ldexp(1.0, -n - 1) > probe_t) ++n;
        if (n < depth) {
            const double lo = std::ldexp(1.0, -n - 1), mid = 3.0 * std::ldexp(1.0, -n - 2),
                         hi = std::ldexp(1.0, -n);
            const double r = probe_t <= mid ? probe_t - lo : hi - probe_t;
            expected = r * branch_direction(cycle[static_cast<std::size_t>(n) % 4]);
        }
    }
    const Vec2 got = z.limit.eval(probe_t);
    {
        auto& c = mb.add_check("probe-point", got == expected);
        c["expected"] = {expected.x1, expected.x2};
        c["got"] = {got.x1, got.x2};
    }

    double worst_origin = 0.0, worst_pair = 0.0;
    {
        auto f = detail::open_out(mb.path_of("zeno_samples.csv"));
        f << "eps,t,x1,x2\n";
        std::vector<std::vector<Vec2>> per_eps;
        for (double eps : eps_list) {
            IntegratorConfig ic;
            ic.horizon = 1.0;
            ic.samples = 64;
            const TrajectoryRecord tr = integrate_perturbed({0.0, 0.0}, z.control, eps, ic);
            std::vector<Vec2> at_dyadic;
            for (int k = 0; k <= depth; ++k) {
                const double t = std::ldexp(1.0, -k);
                const Vec2 X = tr.state_at(t);
                at_dyadic.push_back(X);
                worst_origin = std::max(worst_origin, norm(X));
                f << format_double(eps) << ',' << format_double(t) << ','
                  << format_double(X.x1) << ',' << format_double(X.x2) << '\n';
            }
            per_eps.push_back(std::move(at_dyadic));
        }
        for (std::size_t i = 1; i < per_eps.size(); ++i)
            for (std::size_t k = 0; k < per_eps[i].size(); ++k)
                worst_pair = std::max(worst_pair, norm(per_eps[i][k] - per_eps[0][k]));
    }
    mb.add_artifact("zeno_samples.csv");
    {
        auto& c = mb.add_check("eps-independence",
                               worst_origin <= 1e-9 && worst_pair <= 1e-9);
        c["max_origin_distance"] = worst_origin;
        c["max_eps_spread"] = worst_pair;
    }
    return eff;
}

// ---------------------------------------------------------------------------
// scaling-law: the penalized flow commutes with the cube-law rescaling of
// space, time and eps.

inline ordered_json scenario_scaling_law(const ExperimentConfig& cfg, ManifestBuilder& mb,
                                         ordered_json& eff) {
    const int count = cfg.integer("count", 20);
    const double eps = cfg.num("eps", 1e-3);
    const double rho = cfg.num("rho", 2.0);
    const double horizon = cfg.num("horizon", 0.8);
    const double tol = cfg.num("tol", 1e-9);
    const std::uint64_t seed = cfg.uint("seed", 1107);
    eff["count"] = count;
    eff["eps"] = eps;
    eff["rho"] = rho;
    eff["horizon"] = horizon;
    eff["tol"] = tol;
    eff["seed"] = seed;

    Rng rng(seed);
    double worst = 0.0;
    {
        auto f = detail::open_out(mb.path_of("scaling.csv"));
        f << "x1,x2,theta,mismatch\n";
        for (int i = 0; i < count; ++i) {
            const Vec2 x = rng.point_in_box(-1.5, 1.5);
            const double th = rng.uniform(0.0, 2.0 * M_PI);
            const ControlSchedule a = ControlSchedule::constant({std::cos(th), std::sin(th)});
            IntegratorConfig c1;
            c1.horizon = horizon;
            c1.samples = 8;
            IntegratorConfig c2;
            c2.horizon = rho * horizon;
            c2.samples = 8;
            const TrajectoryRecord t1 = integrate_perturbed(x, a, eps, c1);
            const TrajectoryRecord t2 =
                integrate_perturbed(rho * x, a, rho * rho * rho * eps, c2);
            double mm = 0.0;
            for (int q = 1; q <= 8; ++q) {
                const double t = horizon * q / 8.0;
                mm = std::max(mm, norm(t1.state_at(t) - t2.state_at(rho * t) / rho));
            }
            worst = std::max(worst, mm);
            f << format_double(x.x1) << ',' << format_double(x.x2) << ','
              << format_double(th) << ',' << format_double(mm) << '\n';
        }
    }
    mb.add_artifact("scaling.csv");
    auto& c = mb.add_check("scaling-identity", worst <= tol);
    c["max_mismatch"] = worst;
    c["tol"] = tol;
    return eff;
}

// ---------------------------------------------------------------------------
// tracking: shrink-and-slow tracker of penalized trajectories. Deviation
// stays within a fixed multiple of the settling scale, the tracker moves at
// most sqrt(2) times the control bound and never leaves the network.

inline ordered_json scenario_tracking(const ExperimentConfig& cfg, ManifestBuilder& mb,
                                      ordered_json& eff) {
    const double gamma = cfg.num("gamma", 0.5);
    const std::vector<double> eps_list = cfg.num_list("eps", {1e-2, 1e-3});
    const int count = cfg.integer("count", 5);
    const double horizon = cfg.num("horizon", 1.0);
    const double ratio_cap = cfg.num("ratio_cap", 3.0);
    const std::uint64_t seed = cfg.uint("seed", 424242);
    eff["gamma"] = gamma;
    eff["eps"] = eps_list;
    eff["count"] = count;
    eff["horizon"] = horizon;
    eff["ratio_cap"] = ratio_cap;
    eff["seed"] = seed;

    Rng rng(seed);
    double worst_ratio = 0.0, worst_speed = 0.0;
    std::size_t off_network = 0;
    {
        auto f = detail::open_out(mb.path_of("tracking.csv"));
        f << "eps,x1,x2,deviation_ratio,max_speed,off_network\n";
        for (double eps : eps_list)
            for (int i = 0; i < count; ++i) {
                const Vec2 x{(rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.6, 1.5),
                             (rng.below(2) ? 1.0 : -1.0) * rng.uniform(0.6, 1.5)};
                const ControlSchedule a = random_piecewise_control(rng, horizon, 3);
                IntegratorConfig ic;
                ic.horizon = horizon;
                ic.samples = 100;
                const TrajectoryRecord tr = integrate_perturbed(x, a, eps, ic);
                const TrackingResult res = tracking_trajectory(tr, gamma);
                worst_ratio = std::max(worst_ratio, res.deviation_ratio);
                worst_speed = std::max(worst_speed, res.max_speed);
                off_network += res.off_network;
                f << format_double(eps) << ',' << format_double(x.x1) << ','
                  << format_double(x.x2) << ',' << format_double(res.deviation_ratio) << ','
                  << format_double(res.max_speed) << ',' << res.off_network << '\n';
            }
    }
    mb.add_artifact("tracking.csv");
    {
        auto& c = mb.add_check("tracking-ratio", worst_ratio <= ratio_cap);
        c["max_ratio"] = worst_ratio;
        c["cap"] = ratio_cap;
    }
    {
        auto& c = mb.add_check("tracking-speed", worst_speed <= std::sqrt(2.0) + 1e-6);
        c["max_speed"] = worst_speed;
        c["bound"] = std::sqrt(2.0);
    }
    mb.add_check("tracker-on-network", off_network == 0);
    return eff;
}

// ---------------------------------------------------------------------------
// counterexample: the strategy-cost gap. Closed forms, quadratures of the
// explicit paths, and strict positivity of the gap across the lambda grid.

inline ordered_json scenario_counterexample(const ExperimentConfig& cfg, ManifestBuilder& mb,
                                            ordered_json& eff) {
    const std::vector<double> lambdas =
        cfg.num_list("lambdas", {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0});
    const double quad_tol = cfg.num("quad_tol", 1e-6);
    eff["lambdas"] = lambdas;
    eff["quad_tol"] = quad_tol;

    // frozen reference values at lambda = 1 (30-digit evaluations of the
    // closed forms, rounded to double)
    const double frozen_relaxed = 1.0505891479787193186;
    const double frozen_network = 1.3678794411714423216;

    double worst_quad = 0.0, min_gap = std::numeric_limits<double>::infinity();
    double at1_relaxed = 0.0, at1_network = 0.0;
    {
        auto f = detail::open_out(mb.path_of("counterexample.csv"));
        f << "lambda,relaxed,network,gap\n";
        for (double lam : lambdas) {
            const CounterexampleCosts c = counterexample_costs(lam);
            worst_quad = std::max({worst_quad,
                                   std::abs(c.relaxed_quadrature - c.relaxed_closed_form),
                                   std::abs(c.network_quadrature - c.network_closed_form)});
            min_gap = std::min(min_gap, c.gap);
            if (lam == 1.0) {
                at1_relaxed = c.relaxed_closed_form;
                at1_network = c.network_closed_form;
            }
            f << format_double(lam) << ',' << format_double(c.relaxed_closed_form) << ','
              << format_double(c.network_closed_form) << ',' << format_double(c.gap) << '\n';
        }
    }
    mb.add_artifact("counterexample.csv");
    {
        auto& c = mb.add_check("strategy-quadrature", worst_quad <= quad_tol);
        c["max_error"] = worst_quad;
    }
    {
        const bool ok = std::abs(at1_relaxed - frozen_relaxed) <= 1e-9 &&
                        std::abs(at1_network - frozen_network) <= 1e-9;
        auto& c = mb.add_check("frozen-values", ok);
        c["relaxed"] = at1_relaxed;
        c["network"] = at1_network;
    }
    {
        auto& c = mb.add_check("strict-gap", min_gap > 0.0);
        c["min_gap"] = min_gap;
    }
    return eff;
}

// ---------------------------------------------------------------------------
// value-convergence: planar solves against the projected network value.

inline ordered_json scenario_value_convergence(const ExperimentConfig& cfg,
                                               ManifestBuilder& mb, ordered_json& eff) {
    const std::string cost_name = cfg.str("cost", "norm-capped");
    const double lambda = cfg.num("lambda", 1.0);
    const double h = cfg.num("grid_h", 0.02);
    const double lo = cfg.num("region_lo", -2.0), hi = cfg.num("region_hi", 2.0);
    const std::vector<double> eps_list = cfg.num_list("eps", {0.2, 0.1, 0.05});
    const int probes = cfg.integer("probes", 100);
    const std::uint64_t seed = cfg.uint("seed", 0x5eed5eedULL);
    eff["cost"] = cost_name;
    eff["lambda"] = lambda;
    eff["grid_h"] = h;
    eff["region_lo"] = lo;
    eff["region_hi"] = hi;
    eff["eps"] = eps_list;
    eff["probes"] = probes;
    eff["seed"] = seed;

    GridSpec region{lo, hi, lo, hi, h};
    const ConvergenceReport rep = convergence_study(
        cost_from_name(cost_name), lambda, region, h, eps_list,
        static_cast<std::size_t>(probes), seed);
    write_json(mb.path_of("convergence.json"), convergence_report_to_json(rep));
    mb.add_artifact("convergence.json");

    bool decreasing = true;
    for (std::size_t i = 1; i < rep.sup_error.size(); ++i)
        decreasing = decreasing && rep.sup_error[i] < rep.sup_error[i - 1];
    {
        auto& c = mb.add_check("sup-error-decreasing", decreasing);
        c["sup_error"] = rep.sup_error;
    }
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& m : rep.chain_margins)
        min_margin = std::min({min_margin, m[0], m[1], m[2]});
    {
        auto& c = mb.add_check("chain-margins", min_margin >= 0.0);
        c["min_margin"] = min_margin;
    }
    const auto [lo_it, hi_it] =
        std::minmax_element(rep.lipschitz_fit.begin(), rep.lipschitz_fit.end());
    {
        auto& c = mb.add_check("lipschitz-stable", *hi_it <= 2.0 * (*lo_it));
        c["lipschitz_fit"] = rep.lipschitz_fit;
    }
    return eff;
}

// ---------------------------------------------------------------------------
// apriori-suite: the four estimate families checked along random penalized
// trajectories, plus the two independent computations of the compensator.

inline ordered_json scenario_apriori_suite(const ExperimentConfig& cfg, ManifestBuilder& mb,
                                           ordered_json& eff) {
    const int count = cfg.integer("count", 10);
    const std::vector<double> eps_list = cfg.num_list("eps", {1e-2, 1e-3});
    const double horizon = cfg.num("horizon", 1.0);
    const int pieces = cfg.integer("pieces", 3);
    const std::uint64_t seed = cfg.uint("seed", 90210);
    eff["count"] = count;
    eff["eps"] = eps_list;
    eff["horizon"] = horizon;
    eff["pieces"] = pieces;
    eff["seed"] = seed;

    Rng rng(seed);
    bool all_ok = true;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_k = 0.0;
    {
        auto f = detail::open_out(mb.path_of("apriori.csv"));
        f << "eps,x1,x2,norm_excess,penalty_growth_excess,mean_penalty_excess,energy_excess,"
             "k_mismatch\n";
        for (double eps : eps_list)
            for (int i = 0; i < count; ++i) {
                const Vec2 x = rng.point_in_box(-1.5, 1.5);
                const ControlSchedule a = random_piecewise_control(rng, horizon, pieces);
                IntegratorConfig ic;
                ic.horizon = horizon;
                ic.samples = 50;
                const TrajectoryRecord tr = integrate_perturbed(x, a, eps, ic);
                const AprioriReport rep = check_apriori_estimates(tr, 48);
                const double km = norm(tr.k_at(horizon) - k_quadrature(tr, horizon));
                all_ok = all_ok && rep.ok;
                worst_excess = std::max({worst_excess, rep.norm_excess,
                                         rep.penalty_growth_excess, rep.mean_penalty_excess,
                                         rep.energy_excess});
                worst_k = std::max(worst_k, km);
                f << format_double(eps) << ',' << format_double(x.x1) << ','
                  << format_double(x.x2) << ',' << format_double(rep.norm_excess) << ','
                  << format_double(rep.penalty_growth_excess) << ','
                  << format_double(rep.mean_penalty_excess) << ','
                  << format_double(rep.energy_excess) << ',' << format_double(km) << '\n';
            }
    }
    mb.add_artifact("apriori.csv");
    {
        auto& c = mb.add_check("estimate-families", all_ok);
        c["worst_excess"] = worst_excess;
    }
    {
        auto& c = mb.add_check("compensator-identity", worst_k <= 1e-8);
        c["max_mismatch"] = worst_k;
    }
    return eff;
}

}  // namespace detail

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{
        "junction-behavior", "zeno",             "scaling-law", "tracking",
        "counterexample",    "value-convergence", "apriori-suite"};
    return names;
}

inline ScenarioResult run_scenario(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    detail::ManifestBuilder mb(cfg.out_dir);
    ordered_json eff = ordered_json::object();

    if (cfg.scenario == "junction-behavior")
        detail::scenario_junction_behavior(cfg, mb, eff);
    else if (cfg.scenario == "zeno")
        detail::scenario_zeno(cfg, mb, eff);
    else if (cfg.scenario == "scaling-law")
        detail::scenario_scaling_law(cfg, mb, eff);
    else if (cfg.scenario == "tracking")
        detail::scenario_tracking(cfg, mb, eff);
    else if (cfg.scenario == "counterexample")
        detail::scenario_counterexample(cfg, mb, eff);
    else if (cfg.scenario == "value-convergence")
        detail::scenario_value_convergence(cfg, mb, eff);
    else if (cfg.scenario == "apriori-suite")
        detail::scenario_apriori_suite(cfg, mb, eff);
    else
        throw std::runtime_error("unknown scenario: " + cfg.scenario);

    ScenarioResult res;
    res.manifest = mb.finish(cfg.scenario, eff);
    res.pass = mb.all_pass;
    res.manifest_path = cfg.out_dir + "/manifest.json";
    write_json(res.manifest_path, res.manifest);
    return res;
}

// Fixed-width text table over a set of manifests.
inline std::string summarize(const std::vector<std::string>& manifest_paths) {
    std::ostringstream out;
    out << "scenario             checks  status\n";
    std::size_t total = 0, passed = 0;
    for (const auto& path : manifest_paths) {
        const ordered_json m = read_json(path);
        const auto& checks = m.at("checks");
        std::size_t ok = 0;
        for (const auto& c : checks)
            if (c.at("pass").get<bool>()) ++ok;
        total += checks.size();
        passed += ok;
        std::ostringstream frac;
        frac << ok << "/" << checks.size();
        out << m.at("scenario").get<std::string>();
        for (std::size_t pad = m.at("scenario").get<std::string>().size(); pad < 21; ++pad)
            out << ' ';
        out << frac.str();
        for (std::size_t pad = frac.str().size(); pad < 8; ++pad) out << ' ';
        out << (m.at("pass").get<bool>() ? "pass" : "FAIL") << '\n';
        if (!m.at("pass").get<bool>())
            for (const auto& c : checks)
                if (!c.at("pass").get<bool>())
                    out << "  failed: " << c.at("id").get<std::string>() << '\n';
    }
    std::ostringstream frac;
    frac << passed << "/" << total;
    out << "total                " << frac.str();
    for (std::size_t pad = frac.str().size(); pad < 8; ++pad) out << ' ';
    out << (passed == total ? "pass" : "FAIL") << '\n';
    return out.str();
}

}  // namespace crossnet
