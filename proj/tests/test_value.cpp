#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <crossnet/value.hpp>

using namespace crossnet;
using Catch::Approx;

TEST_CASE("cost fields") {
    REQUIRE(cost_one().value({3.0, -1.0}, {1.0, 0.0}) == 1.0);
    REQUIRE(cost_norm().value({3.0, -4.0}, {0.0, 0.0}) == Approx(5.0));
    REQUIRE(cost_norm_capped().value({3.0, -4.0}, {0.0, 0.0}) == 2.0);
    REQUIRE(cost_norm_capped().value({0.3, 0.4}, {0.0, 0.0}) == Approx(0.5));
    // the control-dependent cost: 2 + a1 + a2 + |x2|
    REQUIRE(cost_counterexample().value({0.0, -1.5}, {-1.0, 0.0}) == Approx(2.5));
    REQUIRE(cost_from_name("norm-capped").lip_x == cost_norm_capped().lip_x);
    REQUIRE_THROWS(cost_from_name("nope"));
}

TEST_CASE("discounted cost of a constant unit cost") {
    // both quadrature routes must reproduce (1 - e^{-lambda T}) / lambda
    const double lam = 0.7, T = 2.0;
    IntegratorConfig cfg;
    cfg.horizon = T;
    cfg.samples = 10;
    const auto tr = integrate_perturbed({0.5, 1.0}, ControlSchedule::constant({0.1, 0.2}),
                                        1e-2, cfg);
    const double want = (1.0 - std::exp(-lam * T)) / lam;
    REQUIRE(cost_functional(tr, cost_one(), lam).value == Approx(want).epsilon(1e-12));

    LimitTrajectory path;
    path.segments.push_back({0.0, std::numeric_limits<double>::infinity(), Branch::N, 1.0, 0.0});
    const auto dc = cost_functional(path, ControlSchedule::constant({0.0, 0.0}), cost_one(),
                                    lam, T, 1.0);
    REQUIRE(dc.value == Approx(want).epsilon(1e-12));
    REQUIRE(dc.tail_bound == Approx(std::exp(-lam * T) / lam).epsilon(1e-12));
}

TEST_CASE("closed-form penalty relaxation step") {
    // against a fine midpoint-rule integration of z' = -grad d(z) / eps
    const double eps = 0.05;
    for (Vec2 z0 : {Vec2{0.8, 0.5}, Vec2{-0.7, 0.9}, Vec2{0.6, -0.6}, Vec2{1.1, 1.1}}) {
        const double step = 0.02;
        const Vec2 exact = penalty_flow_exact(z0, step, eps);
        Vec2 z = z0;
        const int n = 50000;
        const double h = step / (n * eps);
        for (int i = 0; i < n; ++i) {
            const Vec2 mid = z - (0.5 * h) * penalty_gradient(z);
            z = z - h * penalty_gradient(mid);
        }
        REQUIRE(norm(exact - z) <= 1e-9);
        // signs never flip, magnitudes never grow
        REQUIRE(exact.x1 * z0.x1 >= 0.0);
        REQUIRE(exact.x2 * z0.x2 >= 0.0);
        REQUIRE(std::abs(exact.x1) <= std::abs(z0.x1));
        REQUIRE(std::abs(exact.x2) <= std::abs(z0.x2));
        // the square difference is conserved by the continuous flow
        const double b0 = z0.x2 * z0.x2 - z0.x1 * z0.x1;
        const double b1 = exact.x2 * exact.x2 - exact.x1 * exact.x1;
        REQUIRE(b1 == Approx(b0).margin(1e-12));
    }
}

TEST_CASE("constant cost is a bit-exact fixed point of both solvers") {
    const double lam = 2.0;
    GridSpec spec{-1.0, 1.0, -1.0, 1.0, 0.25};
    const GridValueFunction v = solve_value_eps(cost_one(), lam, 0.5, spec);
    for (double u : v.u) REQUIRE(u == 0.5);
    REQUIRE(v.sweeps == 1);

    const EdgeValueFunction w = solve_value_network(cost_one(), lam, 2.0, 0.1);
    for (const auto& edge : w.u)
        for (double u : edge) REQUIRE(u == 0.5);
    REQUIRE(w.junction() == 0.5);

    const ValueBar bar = solve_value_bar(cost_one(), lam, 2.0, 0.1);
    REQUIRE(bar.eval({0.37, -1.2}) == 0.5);
}

TEST_CASE("value functions respect the sup bound") {
    GridSpec spec{-2.0, 2.0, -2.0, 2.0, 0.1};
    const GridValueFunction v = solve_value_eps(cost_norm_capped(), 1.0, 0.2, spec);
    for (double u : v.u) {
        REQUIRE(u >= 0.0);
        REQUIRE(u <= 2.0 + 1e-12);
    }
    const EdgeValueFunction w = solve_value_network(cost_norm_capped(), 1.0, 3.0, 0.01);
    for (const auto& edge : w.u)
        for (double u : edge) {
            REQUIRE(u >= 0.0);
            REQUIRE(u <= 2.0 + 1e-12);
        }
}

TEST_CASE("network value for the norm cost") {
    // riding inward and resting at the junction is optimal: the discounted
    // cost from radius r is r - 1 + e^{-r} at unit discount
    const double h = 1e-3;
    const EdgeValueFunction w = solve_value_network(cost_norm(), 1.0, 3.0, h);
    REQUIRE(w.junction() == 0.0);
    for (double r : {0.5, 1.0, 2.0}) {
        const double want = r - 1.0 + std::exp(-r);
        for (Branch b : {Branch::E, Branch::N, Branch::W, Branch::S})
            REQUIRE(w.eval(NetworkPoint::make(b, r)) == Approx(want).margin(5.0 * h));
    }

    // independent route: ride to the junction, then stay
    const double bound = ride_and_stay_bound(cost_norm(), 1.0, NetworkPoint::make(Branch::N, 1.0),
                                             NetworkPoint::origin());
    REQUIRE(bound == Approx(std::exp(-1.0)).epsilon(1e-9));
    REQUIRE(w.eval(NetworkPoint::make(Branch::N, 1.0)) == Approx(bound).margin(5.0 * h));
}

TEST_CASE("strategy gap for the control-dependent cost") {
    SECTION("frozen evaluations at unit discount") {
        const CounterexampleCosts c = counterexample_costs(1.0);
        REQUIRE(c.relaxed_closed_form == Approx(1.0505891479787193186).margin(1e-9));
        REQUIRE(c.network_closed_form == Approx(1.3678794411714423216).margin(1e-9));
        REQUIRE(c.gap == Approx(0.317290).margin(1e-4));
    }
    SECTION("frozen evaluations at other discounts") {
        REQUIRE(counterexample_costs(2.0).relaxed_closed_form ==
                Approx(0.62656504206707877526).margin(1e-9));
        REQUIRE(counterexample_costs(2.0).network_closed_form ==
                Approx(0.78383382080915317297).margin(1e-9));
        REQUIRE(counterexample_costs(0.5).relaxed_closed_form ==
                Approx(1.7377546116130244002).margin(1e-9));
    }
    SECTION("quadratures of the explicit strategies agree with the closed forms") {
        for (double lam : {0.5, 1.0, 2.0}) {
            const CounterexampleCosts c = counterexample_costs(lam);
            REQUIRE(c.relaxed_quadrature == Approx(c.relaxed_closed_form).margin(1e-6));
            REQUIRE(c.network_quadrature == Approx(c.network_closed_form).margin(1e-6));
        }
    }
    SECTION("the gap is strictly positive across discount rates") {
        for (double lam : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0})
            REQUIRE(counterexample_costs(lam).gap > 0.0);
    }
}

TEST_CASE("grid spec arithmetic") {
    GridSpec g{-1.0, 1.0, -0.5, 0.5, 0.25};
    g.validate();
    REQUIRE(g.n1() == 9);
    REQUIRE(g.n2() == 5);
    REQUIRE(g.x1_at(0) == Approx(-1.0));
    REQUIRE(g.x1_at(8) == Approx(1.0));
    GridSpec bad{-1.0, 1.0, -0.5, 0.5, 0.3};
    REQUIRE_THROWS(bad.validate());
}

TEST_CASE("axis slope probe") {
    // the projected network value of the norm cost has radial slope
    // 1 - e^{-r}, approaching but never exceeding the cost's slope 1
    const ValueBar bar = solve_value_bar(cost_norm(), 1.0, 3.0, 1e-3);
    GridSpec spec{-2.0, 2.0, -2.0, 2.0, 0.1};
    GridValueFunction g;
    g.spec = spec;
    g.h_local = 0.1;
    g.u.resize(spec.n1() * spec.n2());
    for (std::size_t j = 0; j < spec.n2(); ++j)
        for (std::size_t i = 0; i < spec.n1(); ++i)
            g.u[j * spec.n1() + i] = bar.eval(spec.node(i, j));
    const double lip = axis_lipschitz(g);
    REQUIRE(lip == Approx(1.0 - std::exp(-2.0)).margin(0.02));
    REQUIRE(lip <= 1.0 + 1e-9);
}

TEST_CASE("planar value approaches the projected network value") {
    // a light version of the full convergence run: coarse grid, two eps rungs
    GridSpec region{-2.0, 2.0, -2.0, 2.0, 0.1};
    const ConvergenceReport rep =
        convergence_study(cost_norm_capped(), 1.0, region, 0.1, {0.4, 0.2}, 40, 77);
    REQUIRE(rep.sup_error.size() == 2);
    REQUIRE(rep.sup_error[1] < rep.sup_error[0]);
    for (const auto& m : rep.chain_margins) {
        REQUIRE(m[0] >= 0.0);
        REQUIRE(m[1] >= 0.0);
        REQUIRE(m[2] >= 0.0);
    }
    REQUIRE(rep.quarter_power_coeff >= 0.0);
}
