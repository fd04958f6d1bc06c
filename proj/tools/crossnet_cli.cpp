// crossnet — command-line front end: simulate penalized trajectories, project
// points, print constant-control limits, solve value functions, run the named
// experiment scenarios.
//
// Exit codes: 0 success, 1 a check or scenario failed, 2 usage/config error.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <crossnet/experiments.hpp>

namespace {

using namespace crossnet;

Vec2 parse_point(const std::vector<double>& v, const char* flag) {
    if (v.size() != 2)
        throw CLI::ValidationError(std::string(flag) + ": expected two comma-separated numbers");
    return {v[0], v[1]};
}

NetworkPoint parse_start(const std::string& s) {
    const auto comma = s.find(',');
    const auto b = branch_from_name(comma == std::string::npos ? s : s.substr(0, comma));
    if (!b) throw CLI::ValidationError("--start: unknown branch in '" + s + "'");
    if (comma == std::string::npos) {
        if (*b != Branch::O)
            throw CLI::ValidationError("--start: edge points need a radius, e.g. N,1.5");
        return NetworkPoint::origin();
    }
    return NetworkPoint::make(*b, parse_double(s.substr(comma + 1)));
}

void print_limit(const LimitTrajectory& lt) {
    for (const auto& s : lt.segments)
        std::cout << format_double(s.t0) << ' '
                  << (std::isinf(s.t1) ? std::string("inf") : format_double(s.t1)) << ' '
                  << branch_name(s.branch) << ' ' << format_double(s.r0) << ' '
                  << format_double(s.rate) << '\n';
}

int cmd_simulate(double eps, const std::vector<double>& x, double theta, double horizon,
                 int samples, const std::string& out_dir) {
    const Vec2 x0 = parse_point(x, "--x");
    const ControlSchedule a = ControlSchedule::constant({std::cos(theta), std::sin(theta)});
    IntegratorConfig cfg;
    cfg.horizon = horizon;
    cfg.samples = static_cast<std::size_t>(samples);
    const TrajectoryRecord tr = integrate_perturbed(x0, a, eps, cfg);

    std::filesystem::create_directories(out_dir);
    const std::string csv = out_dir + "/trajectory.csv";
    write_trajectory_csv(csv, tr);
    write_json(out_dir + "/manifest.json",
               trajectory_manifest(tr, "trajectory.csv", fnv1a64_file(csv)));
    const Vec2 xe = tr.state_at(horizon);
    std::cout << "final " << format_double(xe.x1) << ' ' << format_double(xe.x2) << '\n'
              << "steps " << tr.accepted_steps << '\n'
              << "wrote " << csv << '\n';
    return 0;
}

int cmd_value2d(const std::string& cost, double lambda, double eps, double grid_h,
                const std::vector<double>& region, const std::string& out_dir) {
    if (region.size() != 2 || region[0] >= region[1])
        throw CLI::ValidationError("--region: expected lo,hi with lo < hi");
    GridSpec spec{region[0], region[1], region[0], region[1], grid_h};
    const GridValueFunction v = solve_value_eps(cost_from_name(cost), lambda, eps, spec);
    std::filesystem::create_directories(out_dir);
    write_grid_csv(out_dir + "/value2d.csv", v);
    std::cout << "sweeps " << v.sweeps << '\n'
              << "residual " << format_double(v.residual) << '\n'
              << "origin " << format_double(v.eval({0.0, 0.0})) << '\n'
              << "wrote " << out_dir << "/value2d.csv" << '\n';
    return 0;
}

int cmd_valuenet(const std::string& cost, double lambda, double radius, double grid_h,
                 const std::string& out_dir) {
    const EdgeValueFunction v = solve_value_network(cost_from_name(cost), lambda, radius, grid_h);
    std::filesystem::create_directories(out_dir);
    write_edge_csv(out_dir + "/valuenet.csv", v);
    std::cout << "passes " << v.passes << '\n'
              << "junction " << format_double(v.junction()) << '\n'
              << "wrote " << out_dir << "/valuenet.csv" << '\n';
    return 0;
}

int cmd_converge(const std::string& cost, double lambda, double grid_h,
                 const std::vector<double>& region, const std::vector<double>& eps,
                 int probes, std::uint64_t seed, const std::string& out_dir) {
    if (region.size() != 2 || region[0] >= region[1])
        throw CLI::ValidationError("--region: expected lo,hi with lo < hi");
    GridSpec spec{region[0], region[1], region[0], region[1], grid_h};
    const ConvergenceReport rep =
        convergence_study(cost_from_name(cost), lambda, spec, grid_h, eps,
                          static_cast<std::size_t>(probes), seed);
    std::filesystem::create_directories(out_dir);
    write_json(out_dir + "/convergence.json", convergence_report_to_json(rep));
    bool decreasing = true;
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
        std::cout << "eps " << format_double(rep.eps[i]) << "  sup_error "
                  << format_double(rep.sup_error[i]) << '\n';
        if (i > 0) decreasing = decreasing && rep.sup_error[i] < rep.sup_error[i - 1];
    }
    std::cout << "wrote " << out_dir << "/convergence.json" << '\n';
    return decreasing ? 0 : 1;
}

int cmd_scenario(const std::string& name, const std::string& config_path,
                 const std::string& out_dir) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = ExperimentConfig::from_json(read_json(config_path));
        if (!name.empty() && name != cfg.scenario)
            throw CLI::ValidationError("scenario name disagrees with --config");
    } else if (!name.empty()) {
        cfg.scenario = name;
    } else {
        throw CLI::ValidationError("need a scenario name or --config");
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const ScenarioResult res = run_scenario(cfg);
    std::cout << summarize({res.manifest_path});
    return res.pass ? 0 : 1;
}

int cmd_selftest() {
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    {
        Rng rng(7);
        bool ok = true;
        for (int i = 0; i < 1000; ++i) {
            const Vec2 p = rng.point_in_box(-2.0, 2.0);
            const double d = penalty(p);
            const Vec2 g = penalty_gradient(p);
            ok = ok && std::abs(dot(p, g) - 4.0 * d) <= 1e-12 * (1.0 + std::abs(d));
            ok = ok && std::abs(norm(g) - 2.0 * std::sqrt(d) * norm(p)) <=
                           1e-12 * (1.0 + norm(g));
        }
        report("penalty-identities", ok);
    }
    {
        Rng rng(8);
        bool ok = true;
        for (int i = 0; i < 1000; ++i) {
            const NetworkPoint p = project_to_network(rng.point_in_box(-2.0, 2.0));
            const NetworkPoint q = project_to_network(embed(p));
            ok = ok && q.branch == p.branch && std::abs(q.radius - p.radius) <= 1e-12;
        }
        report("projector-idempotent", ok);
    }
    {
        GridSpec spec{-1.0, 1.0, -1.0, 1.0, 0.25};
        const GridValueFunction v = solve_value_eps(cost_one(), 2.0, 0.5, spec);
        double worst = 0.0;
        for (double u : v.u) worst = std::max(worst, std::abs(u - 0.5));
        const EdgeValueFunction w = solve_value_network(cost_one(), 2.0, 1.0, 0.25);
        for (int b = 0; b < 4; ++b)
            for (double u : w.u[static_cast<std::size_t>(b)])
                worst = std::max(worst, std::abs(u - 0.5));
        report("constant-cost-exact", worst == 0.0);
    }
    {
        const CounterexampleCosts c = counterexample_costs(1.0);
        report("strategy-gap-frozen",
               std::abs(c.relaxed_closed_form - 1.0505891479787193186) <= 1e-9 &&
                   std::abs(c.network_closed_form - 1.3678794411714423216) <= 1e-9 &&
                   c.gap > 0.0);
    }
    {
        const auto z = zeno_control({Branch::E, Branch::N, Branch::W, Branch::S}, 8);
        bool ok = true;
        for (int k = 0; k <= 8; ++k) {
            const NetworkPoint p = z.limit.at(std::ldexp(1.0, -k));
            ok = ok && p.branch == Branch::O && p.radius == 0.0;
        }
        report("zeno-dyadic-return", ok);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-network singular limits: trajectories, limits, value functions"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads for grid solves (default: auto)");

    auto* sim = app.add_subcommand("simulate", "integrate a penalized trajectory");
    double eps = 1e-3, theta = 0.0, horizon = 1.0, lambda = 1.0, grid_h = 0.05, radius = 3.0;
    std::vector<double> x{1.0, 1.0}, region{-2.0, 2.0}, eps_list{0.2, 0.1, 0.05};
    int samples = 1000, probes = 100;
    std::uint64_t seed = 0x5eed5eedULL;
    std::string out_dir = "out", cost = "norm", config_path, scenario_name, start_str = "N,1";
    double eval_t = -1.0;
    sim->add_option("--eps", eps, "penalty scale")->required();
    sim->add_option("--x", x, "initial point x1,x2")->delimiter(',')->expected(1, 2);
    sim->add_option("--theta", theta, "constant control heading (radians)");
    sim->add_option("--horizon", horizon, "final time");
    sim->add_option("--samples", samples, "rows in the trajectory table");
    sim->add_option("--out", out_dir, "output directory");

    auto* proj = app.add_subcommand("project", "project a plane point to the network");
    proj->add_option("--x", x, "point x1,x2")->delimiter(',')->expected(1, 2)->required();

    auto* lim = app.add_subcommand("limit", "constant-control limit path");
    lim->add_option("--start", start_str, "start point: O or BRANCH,R")->required();
    lim->add_option("--theta", theta, "control heading (radians)")->required();
    lim->add_option("--eval", eval_t, "also print the point at this time");

    auto* v2d = app.add_subcommand("value2d", "planar discounted value function");
    v2d->add_option("--cost", cost, "cost: one|norm|norm-capped|counterexample");
    v2d->add_option("--lambda", lambda, "discount rate");
    v2d->add_option("--eps", eps, "penalty scale")->required();
    v2d->add_option("--grid-h", grid_h, "grid spacing");
    v2d->add_option("--region", region, "square region lo,hi")->delimiter(',')->expected(1, 2);
    v2d->add_option("--out", out_dir, "output directory");

    auto* vnet = app.add_subcommand("valuenet", "network discounted value function");
    vnet->add_option("--cost", cost, "cost: one|norm|norm-capped|counterexample");
    vnet->add_option("--lambda", lambda, "discount rate");
    vnet->add_option("--radius", radius, "edge length");
    vnet->add_option("--grid-h", grid_h, "grid spacing");
    vnet->add_option("--out", out_dir, "output directory");

    auto* conv = app.add_subcommand("converge", "planar-to-network convergence study");
    conv->add_option("--cost", cost, "cost: one|norm|norm-capped|counterexample");
    conv->add_option("--lambda", lambda, "discount rate");
    conv->add_option("--grid-h", grid_h, "grid spacing");
    conv->add_option("--region", region, "square region lo,hi")->delimiter(',')->expected(1, 2);
    conv->add_option("--eps", eps_list, "penalty ladder")->delimiter(',')->expected(1, 16);
    conv->add_option("--probes", probes, "comparison points");
    conv->add_option("--seed", seed, "probe sampler seed");
    conv->add_option("--out", out_dir, "output directory");

    auto* scen = app.add_subcommand("scenario", "run a named experiment scenario");
    scen->add_option("name", scenario_name, "one of the built-in scenarios");
    scen->add_option("--config", config_path, "config JSON (crossnet-config/1)");
    scen->add_option("--out", out_dir, "output directory (overrides config)");

    app.add_subcommand("selftest", "quick built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }
    if (threads > 0) setenv("CROSSNET_THREADS", std::to_string(threads).c_str(), 1);

    try {
        if (sim->parsed()) return cmd_simulate(eps, x, theta, horizon, samples, out_dir);
        if (proj->parsed()) {
            const NetworkPoint p = project_to_network(parse_point(x, "--x"));
            std::cout << branch_name(p.branch) << ' ' << format_double(p.radius) << '\n';
            return 0;
        }
        if (lim->parsed()) {
            const LimitTrajectory lt = constant_control_limit(parse_start(start_str), theta);
            print_limit(lt);
            if (eval_t >= 0.0) {
                const NetworkPoint p = lt.at(eval_t);
                std::cout << "at " << format_double(eval_t) << ": " << branch_name(p.branch)
                          << ' ' << format_double(p.radius) << '\n';
            }
            return 0;
        }
        if (v2d->parsed()) return cmd_value2d(cost, lambda, eps, grid_h, region, out_dir);
        if (vnet->parsed()) return cmd_valuenet(cost, lambda, radius, grid_h, out_dir);
        if (conv->parsed())
            return cmd_converge(cost, lambda, grid_h, region, eps_list, probes, seed, out_dir);
        if (scen->parsed()) {
            const std::string dir = scen->count("--out") ? out_dir : std::string();
            return cmd_scenario(scenario_name, config_path, dir);
        }
        return cmd_selftest();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
