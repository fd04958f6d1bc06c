// value.hpp — discounted infinite-horizon value functions for the unit-ball
// controlled dynamics, in three flavors: the planar problem with the stiff
// penalty (semi-Lagrangian scheme whose transport substep uses the closed
// form of the penalty relaxation flow, so the stiffness never enters a CFL
// condition), the problem constrained to the network (monotone first-order
// scheme with alternating sweeps), and their composition through the
// network projection. Also the explicit two-strategy construction whose
// cost gap separates the planar limit from the network value.
#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "geometry.hpp"
#include "limits.hpp"
#include "rng.hpp"

namespace crossnet {

// Worker count for the Jacobi sweeps. The iteration is Jacobi (reads one
// array, writes another), so results are bitwise independent of this.
inline int thread_count() {
    if (const char* s = std::getenv("CROSSNET_THREADS")) {
        const int v = std::atoi(s);
        if (v >= 1) return std::min(v, 64);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(std::min(hc, 8u)) : 1;
}

// ---------------------------------------------------------------------------
// Running costs l(x, a). lip_x feeds the error-slack bookkeeping.

struct CostField {
    std::string name;
    std::function<double(Vec2, Vec2)> value;
    double lip_x = 0.0;
};

inline CostField cost_one() {
    return {"one", [](Vec2, Vec2) { return 1.0; }, 0.0};
}
inline CostField cost_norm() {
    return {"norm", [](Vec2 x, Vec2) { return norm(x); }, 1.0};
}
inline CostField cost_norm_capped() {
    return {"norm-capped", [](Vec2 x, Vec2) { return std::min(norm(x), 2.0); }, 1.0};
}
// Control-dependent cost rewarding headings into the third quadrant; the
// crooked term |x2| makes the vertical edge expensive. This is the cost for
// which the planar limit undercuts every network-admissible strategy.
inline CostField cost_counterexample() {
    return {"counterexample",
            [](Vec2 x, Vec2 a) { return 2.0 + a.x1 + a.x2 + std::abs(x.x2); }, 1.0};
}

inline CostField cost_from_name(const std::string& name) {
    if (name == "one") return cost_one();
    if (name == "norm") return cost_norm();
    if (name == "norm-capped") return cost_norm_capped();
    if (name == "counterexample") return cost_counterexample();
    throw std::invalid_argument("unknown cost field: " + name);
}

// ---------------------------------------------------------------------------
// Discounted cost of explicit trajectories (4-point Gauss panels; every
// integrand kink lies on a panel boundary by construction).

struct DiscountedCost {
    double value = 0.0;       // \int_0^T e^{-lambda t} l dt
    double horizon = 0.0;     // T
    double tail_bound = 0.0;  // sup_tail |l| * e^{-lambda T}/lambda, if sup given
};

namespace detail {
inline constexpr double gauss4_x[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
inline constexpr double gauss4_w[4] = {0.3478548451374538, 0.6521451548625461,
                                       0.6521451548625461, 0.3478548451374538};

template <class Eval>
double gauss_panel(double a, double b, Eval&& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += gauss4_w[q] * f(mid + half * gauss4_x[q]);
    return s * half;
}
}  // namespace detail

inline DiscountedCost cost_functional(const TrajectoryRecord& traj, const CostField& cost,
                                      double lambda, double tail_sup = 0.0) {
    DiscountedCost out;
    out.horizon = traj.horizon();
    for (const auto& step : traj.dense.steps) {
        const double a = step.t0, b = step.t0 + step.h;
        out.value += detail::gauss_panel(a, b, [&](double t) {
            const auto y = step.eval(t);
            const Vec2 x{y[aug::X1], y[aug::X2]};
            return std::exp(-lambda * t) * cost.value(x, traj.control.value_at(t));
        });
    }
    out.tail_bound = tail_sup * std::exp(-lambda * out.horizon) / lambda;
    return out;
}

inline DiscountedCost cost_functional(const LimitTrajectory& path, const ControlSchedule& alpha,
                                      const CostField& cost, double lambda, double horizon,
                                      double tail_sup = 0.0) {
    path.validate();
    alpha.validate();
    DiscountedCost out;
    out.horizon = horizon;
    // panel boundaries: segment ends, control switches, and a refinement fine
    // enough for the e^{-lambda t} factor
    std::vector<double> cuts{0.0, horizon};
    for (const auto& s : path.segments) {
        if (s.t0 > 0.0 && s.t0 < horizon) cuts.push_back(s.t0);
        if (std::isfinite(s.t1) && s.t1 > 0.0 && s.t1 < horizon) cuts.push_back(s.t1);
    }
    for (double t : alpha.t)
        if (t > 0.0 && t < horizon) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double max_panel = 0.1 / lambda;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
        for (int k = 0; k < nsub; ++k) {
            const double pa = a + (b - a) * k / nsub;
            const double pb = a + (b - a) * (k + 1) / nsub;
            out.value += detail::gauss_panel(pa, pb, [&](double t) {
                return std::exp(-lambda * t) * cost.value(path.eval(t), alpha.value_at(t));
            });
        }
    }
    out.tail_bound = tail_sup * std::exp(-lambda * horizon) / lambda;
    return out;
}

// ---------------------------------------------------------------------------
// Uniform grids over a rectangle.

struct GridSpec {
    double x1_lo = 0.0, x1_hi = 0.0;
    double x2_lo = 0.0, x2_hi = 0.0;
    double h = 0.0;

    std::size_t n1() const { return count(x1_lo, x1_hi); }
    std::size_t n2() const { return count(x2_lo, x2_hi); }
    double x1_at(std::size_t i) const { return x1_lo + static_cast<double>(i) * h; }
    double x2_at(std::size_t j) const { return x2_lo + static_cast<double>(j) * h; }
    Vec2 node(std::size_t i, std::size_t j) const { return {x1_at(i), x2_at(j)}; }

    void validate() const {
        if (!(h > 0.0) || !(x1_hi > x1_lo) || !(x2_hi > x2_lo))
            throw std::invalid_argument("GridSpec: empty or inverted");
        check_commensurate(x1_lo, x1_hi);
        check_commensurate(x2_lo, x2_hi);
    }

  private:
    std::size_t count(double lo, double hi) const {
        return static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;
    }
    void check_commensurate(double lo, double hi) const {
        const double n = (hi - lo) / h;
        if (std::abs(n - std::llround(n)) > 1e-9)
            throw std::invalid_argument("GridSpec: span is not a multiple of h");
    }
};

struct GridValueFunction {
    GridSpec spec;
    std::vector<double> u;  // row-major, index j * n1 + i

    std::size_t sweeps = 0;     // solver iterations spent
    double residual = 0.0;      // final sup-norm update
    double h_local = 0.0;       // transport substep used by the solver

    double at(std::size_t i, std::size_t j) const { return u[j * spec.n1() + i]; }

    // bilinear, clamped to the rectangle; the difference form reproduces a
    // constant grid exactly
    double eval(Vec2 p) const {
        const std::size_t n1 = spec.n1(), n2 = spec.n2();
        double gx = (p.x1 - spec.x1_lo) / spec.h;
        double gy = (p.x2 - spec.x2_lo) / spec.h;
        gx = std::min(std::max(gx, 0.0), static_cast<double>(n1 - 1));
        gy = std::min(std::max(gy, 0.0), static_cast<double>(n2 - 1));
        std::size_t i = std::min(static_cast<std::size_t>(gx), n1 - 2);
        std::size_t j = std::min(static_cast<std::size_t>(gy), n2 - 2);
        const double fx = gx - static_cast<double>(i);
        const double fy = gy - static_cast<double>(j);
        const double u00 = at(i, j), u10 = at(i + 1, j);
        const double u01 = at(i, j + 1), u11 = at(i + 1, j + 1);
        return u00 + fx * (u10 - u00) + fy * (u01 - u00) +
               fx * fy * (u11 - u10 - u01 + u00);
    }
};

// ---------------------------------------------------------------------------
// Exact relaxation-flow substep: advance z' = -(1/eps) grad d(z) for a time
// step by closed form. z2^2 - z1^2 is conserved, signs are preserved, and
// both coordinate magnitudes shrink, so the map never leaves a centered box.

inline Vec2 penalty_flow_exact(Vec2 z, double step, double eps) {
    const double tau = step / eps;
    const double u = z.x1 * z.x1, v = z.x2 * z.x2;
    if (u == 0.0 || v == 0.0) return z;  // already on the network
    const double m = std::min(u, v), M = std::max(u, v);
    const double beta = M - m;  // |z2^2 - z1^2|
    double m1, M1;
    if (beta == 0.0) {
        m1 = M1 = m / (1.0 + 4.0 * tau * m);
    } else {
        // q = (|z|^2-beta)/(|z|^2+beta) = m/M decays as e^{-4 beta tau}
        const double q1 = (m / M) * std::exp(-4.0 * beta * tau);
        const double one_minus_q1 =
            beta / M + (m / M) * (-std::expm1(-4.0 * beta * tau));
        m1 = beta * q1 / one_minus_q1;
        M1 = m1 + beta;
    }
    const double big = std::sqrt(M1), small = std::sqrt(m1);
    Vec2 out;
    if (u >= v) {
        out.x1 = z.x1 < 0.0 ? -big : big;
        out.x2 = z.x2 < 0.0 ? -small : small;
    } else {
        out.x1 = z.x1 < 0.0 ? -small : small;
        out.x2 = z.x2 < 0.0 ? -big : big;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Planar solver: value iteration for
//   u(x) = min_a [ u(foot(x,a)) + h_loc ( l(x,a) - lambda u(foot(x,a)) ) ],
//   foot(x,a) = penalty_flow_exact(x + h_loc a),
// on a grid padded by `margin` beyond the requested region. The update form
// v + h(l - lambda v) makes u = l/lambda an exact fixed point for constant
// costs. Jacobi sweeps keep the result independent of the worker count.

struct EpsSolverOptions {
    double margin = 0.6;        // padding clipped off the returned grid
    double step_factor = 0.5;   // h_loc = min(step_factor * eps, step_cap)
    double step_cap = 0.05;
    std::size_t directions = 32;  // unit controls, plus the zero control
    double fixpoint_tol = 1e-10;
    std::size_t max_sweeps = 1'000'000;
};

inline GridValueFunction solve_value_eps(const CostField& cost, double lambda, double eps,
                                         const GridSpec& region,
                                         const EpsSolverOptions& opt = {}) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_value_eps: lambda must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("solve_value_eps: eps must be positive");
    region.validate();

    const double h = region.h;
    const std::size_t pad = static_cast<std::size_t>(std::ceil(opt.margin / h - 1e-12));
    GridSpec box = region;
    box.x1_lo -= static_cast<double>(pad) * h;
    box.x2_lo -= static_cast<double>(pad) * h;
    box.x1_hi += static_cast<double>(pad) * h;
    box.x2_hi += static_cast<double>(pad) * h;

    const std::size_t n1 = box.n1(), n2 = box.n2(), nn = n1 * n2;
    const double h_loc = std::min(opt.step_factor * eps, opt.step_cap);

    // control set: rest plus `directions` unit headings
    std::vector<Vec2> ctrl;
    ctrl.push_back({0.0, 0.0});
    for (std::size_t k = 0; k < opt.directions; ++k) {
        const double th = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(opt.directions);
        ctrl.push_back({std::cos(th), std::sin(th)});
    }
    const std::size_t na = ctrl.size();

    // precompute feet (clamped into the box) and per-(node, control) costs
    std::vector<Vec2> feet(nn * na);
    std::vector<double> lcost(nn * na);
    double sup_cost = 0.0;
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
            const Vec2 x = box.node(i, j);
            const std::size_t base = (j * n1 + i) * na;
            for (std::size_t k = 0; k < na; ++k) {
                Vec2 f = penalty_flow_exact(x + h_loc * ctrl[k], h_loc, eps);
                f.x1 = std::min(std::max(f.x1, box.x1_lo), box.x1_hi);
                f.x2 = std::min(std::max(f.x2, box.x2_lo), box.x2_hi);
                feet[base + k] = f;
                const double l = cost.value(x, ctrl[k]);
                lcost[base + k] = l;
                sup_cost = std::max(sup_cost, std::abs(l));
            }
        }

    GridValueFunction out;  // reused as the working box grid first
    GridValueFunction work;
    work.spec = box;
    work.u.assign(nn, sup_cost / lambda);
    std::vector<double> unew(nn);

    const int workers = thread_count();
    const double stop = opt.fixpoint_tol * lambda * h_loc * std::max(1.0, sup_cost / lambda);

    std::size_t sweep = 0;
    double res = std::numeric_limits<double>::infinity();
    while (sweep < opt.max_sweeps) {
        ++sweep;
        auto run_rows = [&](std::size_t j_lo, std::size_t j_hi, double* res_out) {
            double r = 0.0;
            for (std::size_t j = j_lo; j < j_hi; ++j)
                for (std::size_t i = 0; i < n1; ++i) {
                    const std::size_t idx = j * n1 + i;
                    const std::size_t base = idx * na;
                    double best = std::numeric_limits<double>::infinity();
                    for (std::size_t k = 0; k < na; ++k) {
                        const double v = work.eval(feet[base + k]);
                        const double cand = v + h_loc * (lcost[base + k] - lambda * v);
                        if (cand < best) best = cand;
                    }
                    unew[idx] = best;
                    r = std::max(r, std::abs(best - work.u[idx]));
                }
            *res_out = r;
        };
        if (workers <= 1 || n2 < 16) {
            run_rows(0, n2, &res);
        } else {
            std::vector<std::thread> pool;
            std::vector<double> part(static_cast<std::size_t>(workers), 0.0);
            const std::size_t chunk = (n2 + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const std::size_t lo = std::min(n2, static_cast<std::size_t>(w) * chunk);
                const std::size_t hi = std::min(n2, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(run_rows, lo, hi, &part[static_cast<std::size_t>(w)]);
            }
            for (auto& th : pool) th.join();
            res = 0.0;
            for (double p : part) res = std::max(res, p);
        }
        work.u.swap(unew);
        if (res <= stop) break;
    }

    // clip the padding off
    out.spec = region;
    const std::size_t rn1 = region.n1(), rn2 = region.n2();
    out.u.resize(rn1 * rn2);
    for (std::size_t j = 0; j < rn2; ++j)
        for (std::size_t i = 0; i < rn1; ++i)
            out.u[j * rn1 + i] = work.u[(j + pad) * n1 + (i + pad)];
    out.sweeps = sweep;
    out.residual = res;
    out.h_local = h_loc;
    return out;
}

// Max slope of the grid solution along the two gridlines closest to the
// coordinate axes (where the limit value's regularity lives).
inline double axis_lipschitz(const GridValueFunction& g) {
    const std::size_t n1 = g.spec.n1(), n2 = g.spec.n2();
    std::size_t j0 = 0, i0 = 0;
    for (std::size_t j = 1; j < n2; ++j)
        if (std::abs(g.spec.x2_at(j)) < std::abs(g.spec.x2_at(j0))) j0 = j;
    for (std::size_t i = 1; i < n1; ++i)
        if (std::abs(g.spec.x1_at(i)) < std::abs(g.spec.x1_at(i0))) i0 = i;
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < n1; ++i)
        lip = std::max(lip, std::abs(g.at(i + 1, j0) - g.at(i, j0)) / g.spec.h);
    for (std::size_t j = 0; j + 1 < n2; ++j)
        lip = std::max(lip, std::abs(g.at(i0, j + 1) - g.at(i0, j)) / g.spec.h);
    return lip;
}

// ---------------------------------------------------------------------------
// Network solver: four radial grids sharing the junction value. Candidates
// at each node are rest (exact: l/lambda), one step inward, one step outward
// (CFL 1: time step equals the grid step). Gauss-Seidel passes alternate
// sweep direction; optimal motions are monotone along edges, so the pass
// count needed is small and independent of the grid size.

struct NetworkSolverOptions {
    double fixpoint_tol = 1e-13;
    std::size_t max_passes = 100'000;
};

struct EdgeValueFunction {
    double R = 0.0;
    double h = 0.0;
    std::array<std::vector<double>, 4> u;  // per branch, index 0 = junction

    std::size_t passes = 0;
    double residual = 0.0;

    double junction() const { return u[0][0]; }

    double eval(NetworkPoint p) const {
        if (p.branch == Branch::O) return junction();
        const auto& e = u[static_cast<std::size_t>(p.branch)];
        const std::size_t n = e.size();
        double g = p.radius / h;
        g = std::min(std::max(g, 0.0), static_cast<double>(n - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(g), n - 2);
        const double f = g - static_cast<double>(i);
        return e[i] + f * (e[i + 1] - e[i]);
    }
};

inline EdgeValueFunction solve_value_network(const CostField& cost, double lambda, double R,
                                             double h, const NetworkSolverOptions& opt = {}) {
    if (!(lambda > 0.0) || !(R > 0.0) || !(h > 0.0) || h > R)
        throw std::invalid_argument("solve_value_network: bad lambda/R/h");
    const std::size_t n = static_cast<std::size_t>(std::llround(R / h)) + 1;

    const std::array<Branch, 4> branches{Branch::E, Branch::N, Branch::W, Branch::S};
    std::array<std::vector<double>, 4> lc_stay, lc_in, lc_out;
    double sup_cost = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
        const Vec2 e = branch_direction(branches[b]);
        lc_stay[b].resize(n);
        lc_in[b].resize(n);
        lc_out[b].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 x = (static_cast<double>(i) * h) * e;
            lc_stay[b][i] = cost.value(x, Vec2{0.0, 0.0});
            lc_in[b][i] = cost.value(x, Vec2{-e.x1, -e.x2});
            lc_out[b][i] = cost.value(x, e);
            sup_cost = std::max({sup_cost, std::abs(lc_stay[b][i]), std::abs(lc_in[b][i]),
                                 std::abs(lc_out[b][i])});
        }
    }
    const double top = sup_cost / lambda;  // out-of-domain continuation value

    EdgeValueFunction out;
    out.R = R;
    out.h = h;
    for (auto& e : out.u) e.assign(n, top);

    auto update_node = [&](std::size_t b, std::size_t i) {
        auto& e = out.u[b];
        const double stay = lc_stay[b][i] / lambda;
        const double vin = e[i - 1];
        const double cin = vin + h * (lc_in[b][i] - lambda * vin);
        const double vout = (i + 1 < n) ? e[i + 1] : top;
        const double cout = vout + h * (lc_out[b][i] - lambda * vout);
        return std::min({stay, cin, cout});
    };
    auto update_junction = [&]() {
        double best = lc_stay[0][0] / lambda;  // cost at the origin, resting
        for (std::size_t b = 0; b < 4; ++b) {
            const double v = out.u[b][1];
            best = std::min(best, v + h * (lc_out[b][0] - lambda * v));
        }
        for (auto& e : out.u) e[0] = best;
        return best;
    };

    const double stop = opt.fixpoint_tol * std::max(1.0, top);
    std::size_t pass = 0;
    double res = std::numeric_limits<double>::infinity();
    while (pass < opt.max_passes) {
        ++pass;
        res = 0.0;
        const double j_old = out.u[0][0];
        update_junction();
        res = std::max(res, std::abs(out.u[0][0] - j_old));
        for (std::size_t b = 0; b < 4; ++b) {
            auto& e = out.u[b];
            if (pass % 2 == 1) {
                for (std::size_t i = 1; i < n; ++i) {
                    const double old = e[i];
                    e[i] = update_node(b, i);
                    res = std::max(res, std::abs(e[i] - old));
                }
            } else {
                for (std::size_t i = n; i-- > 1;) {
                    const double old = e[i];
                    e[i] = update_node(b, i);
                    res = std::max(res, std::abs(e[i] - old));
                }
            }
        }
        if (res <= stop) break;
    }
    out.passes = pass;
    out.residual = res;
    return out;
}

// ---------------------------------------------------------------------------
// Composition through the projection: a planar function from the network
// value, constant along the level curves the descent flow follows.

struct ValueBar {
    EdgeValueFunction net;
    double eval(Vec2 x) const { return net.eval(project_to_network(x)); }
};

inline ValueBar solve_value_bar(const CostField& cost, double lambda, double R, double h,
                                const NetworkSolverOptions& opt = {}) {
    return ValueBar{solve_value_network(cost, lambda, R, h, opt)};
}

// Independent upper bound on the network value: steer to a target point at
// unit speed, then rest there forever. Used to cross-check the solver from a
// route that never touches the grid scheme.
inline double ride_and_stay_bound(const CostField& cost, double lambda, NetworkPoint from,
                                  NetworkPoint to) {
    const double rest = cost.value(embed(to), Vec2{0.0, 0.0}) / lambda;
    SteeringPlan plan = steer_on_network(from, to);
    if (plan.tau == 0.0) return rest;
    const DiscountedCost ride = cost_functional(plan.path, plan.control, cost, lambda, plan.tau);
    return ride.value + std::exp(-lambda * plan.tau) * rest;
}

// ---------------------------------------------------------------------------
// The two explicit strategies from the tip of the upper vertical edge, for
// the control-dependent cost above. The relaxed strategy holds the diagonal
// heading (cheap by sqrt(2) - 1 per unit time) and lets the penalty carry
// the state down the edge and out the left one; every network-admissible
// strategy must burn axis-aligned controls. Closed forms and quadratures of
// the explicit paths are both returned so they can be checked against each
// other; their strict gap is the point.

struct CounterexampleCosts {
    double lambda = 0.0;
    double relaxed_closed_form = 0.0;    // diagonal-control strategy
    double relaxed_quadrature = 0.0;
    double network_closed_form = 0.0;    // best axis-control strategy
    double network_quadrature = 0.0;
    double gap = 0.0;                    // network - relaxed, strictly positive
};

inline CounterexampleCosts counterexample_costs(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("counterexample_costs: lambda must be positive");
    CounterexampleCosts out;
    out.lambda = lambda;
    const double s2 = std::sqrt(2.0);
    out.relaxed_closed_form =
        (lambda * s2 * (3.0 - s2) - 1.0 + std::exp(-lambda * s2)) / (lambda * lambda * s2);
    out.network_closed_form =
        (2.0 * lambda - 1.0 + std::exp(-lambda)) / (lambda * lambda);

    const CostField cost = cost_counterexample();
    const double T = std::max(30.0, 30.0 / lambda);

    // diagonal heading from (N, 1): down the edge, through the junction,
    // out the left edge
    const double th = 5.0 * M_PI / 4.0;
    const LimitTrajectory diag = constant_control_limit(NetworkPoint::make(Branch::N, 1.0), th);
    const ControlSchedule diag_a = ControlSchedule::constant({std::cos(th), std::sin(th)});
    out.relaxed_quadrature = cost_functional(diag, diag_a, cost, lambda, T).value;

    // axis controls on the same track: ride down, then ride left
    LimitTrajectory axis;
    axis.segments.push_back({0.0, 1.0, Branch::N, 1.0, -1.0});
    axis.segments.push_back({1.0, std::numeric_limits<double>::infinity(), Branch::W, 0.0, 1.0});
    ControlSchedule axis_a;
    axis_a.t = {0.0, 1.0};
    axis_a.a = {Vec2{0.0, -1.0}, Vec2{-1.0, 0.0}};
    out.network_quadrature = cost_functional(axis, axis_a, cost, lambda, T).value;

    out.gap = out.network_closed_form - out.relaxed_closed_form;
    return out;
}

// ---------------------------------------------------------------------------
// Convergence study: planar solves along an eps ladder against the
// projection composition of a fine network solve, with the three-link
// comparison chain checked at random probes. Slack per rung covers the
// first-order scheme errors of both discretizations.

struct ConvergenceReport {
    std::string cost_name;
    double lambda = 0.0;
    GridSpec region;
    double h = 0.0;
    std::size_t probe_count = 0;
    std::uint64_t seed = 0;

    std::vector<double> eps;
    std::vector<double> sup_error;      // max_p |u_eps(x_p) - ubar(x_p)|
    std::vector<double> one_sided_gap;  // max_p (ubar - u_eps)_+, the empirical modulus
    std::vector<std::array<double, 3>> chain_margins;  // min slack-adjusted margins
    std::vector<double> lipschitz_fit;  // axis slope of the planar solution
    std::vector<double> scheme_slack;
    double quarter_power_coeff = 0.0;   // fitted C in u_eps(x) <= u_eps(xbar) + C eps^{1/4}
};

inline double convergence_scheme_slack(const CostField& cost, double lambda, double h,
                                       double h_loc) {
    return 2.0 * (h + h_loc + h * h / h_loc) * std::max(1.0, cost.lip_x) / lambda;
}

inline ConvergenceReport convergence_study(const CostField& cost, double lambda,
                                           const GridSpec& region, double h,
                                           const std::vector<double>& eps_ladder,
                                           std::size_t probe_count = 100,
                                           std::uint64_t seed = 0x5eed5eedULL) {
    GridSpec reg = region;
    reg.h = h;
    reg.validate();

    ConvergenceReport rep;
    rep.cost_name = cost.name;
    rep.lambda = lambda;
    rep.region = reg;
    rep.h = h;
    rep.probe_count = probe_count;
    rep.seed = seed;
    rep.eps = eps_ladder;

    // probes, fixed across the ladder
    Rng rng(seed);
    std::vector<Vec2> probes(probe_count);
    for (auto& p : probes)
        p = rng.point_in_box(Vec2{reg.x1_lo, reg.x2_lo}, Vec2{reg.x1_hi, reg.x2_hi});

    // network reference: radius ladder covers every projected probe
    const double R =
        std::max({std::abs(reg.x1_lo), std::abs(reg.x1_hi), std::abs(reg.x2_lo),
                  std::abs(reg.x2_hi)}) +
        1.0;
    const EdgeValueFunction net = solve_value_network(cost, lambda, R, 1e-3);

    std::vector<std::vector<double>> ue(eps_ladder.size()), uebar(eps_ladder.size());
    std::vector<double> ubar(probe_count);
    for (std::size_t p = 0; p < probe_count; ++p)
        ubar[p] = net.eval(project_to_network(probes[p]));

    for (std::size_t r = 0; r < eps_ladder.size(); ++r) {
        const double eps = eps_ladder[r];
        const GridValueFunction g = solve_value_eps(cost, lambda, eps, reg);
        rep.lipschitz_fit.push_back(axis_lipschitz(g));
        rep.scheme_slack.push_back(convergence_scheme_slack(cost, lambda, h, g.h_local));
        ue[r].resize(probe_count);
        uebar[r].resize(probe_count);
        double sup = 0.0, gap = 0.0;
        for (std::size_t p = 0; p < probe_count; ++p) {
            ue[r][p] = g.eval(probes[p]);
            uebar[r][p] = g.eval(embed(project_to_network(probes[p])));
            sup = std::max(sup, std::abs(ue[r][p] - ubar[p]));
            gap = std::max(gap, ubar[p] - ue[r][p]);
        }
        rep.sup_error.push_back(sup);
        rep.one_sided_gap.push_back(std::max(gap, 0.0));
    }

    // fitted coefficient for the quarter-power link, one value for the ladder
    double C = 0.0;
    for (std::size_t r = 0; r < eps_ladder.size(); ++r)
        for (std::size_t p = 0; p < probe_count; ++p)
            C = std::max(C, (ue[r][p] - uebar[r][p]) / std::pow(eps_ladder[r], 0.25));
    rep.quarter_power_coeff = std::max(C, 0.0);

    for (std::size_t r = 0; r < eps_ladder.size(); ++r) {
        const double slack = rep.scheme_slack[r];
        double m1 = std::numeric_limits<double>::infinity();
        double m2 = std::numeric_limits<double>::infinity();
        double m3 = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < probe_count; ++p) {
            // (1) ubar(x) <= u_eps(x) + empirical modulus (+ slack)
            m1 = std::min(m1, ue[r][p] + rep.one_sided_gap[r] + slack - ubar[p]);
            // (2) u_eps at a network point is below the network value (+ slack)
            m2 = std::min(m2, ubar[p] + slack - uebar[r][p]);
            // (3) off-network excess is controlled by eps^{1/4} (+ slack)
            m3 = std::min(m3, uebar[r][p] +
                                  rep.quarter_power_coeff * std::pow(eps_ladder[r], 0.25) +
                                  slack - ue[r][p]);
        }
        rep.chain_margins.push_back({m1, m2, m3});
    }
    return rep;
}

}  // namespace crossnet
