// dynamics.hpp — controlled dynamics with the stiff penalty term
//
//     X' = alpha(t) - (1/eps) grad d(X),   X(0) = x,
//
// integrated together with the running integrals of alpha, of d(X), and of
// |X'|^2, so that the compensator k(t) = x + \int alpha - X(t) and the
// quantities entering the a-priori estimates all come out of one adaptive
// solve with controlled error.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "integrate.hpp"

namespace crossnet {

// Piecewise-constant open-loop control. a[i] applies on [t[i], t[i+1]),
// the last value from t.back() on.
struct ControlSchedule {
    std::vector<double> t;  // switch times, t[0] == 0, strictly increasing
    std::vector<Vec2> a;    // one value per switch time

    static ControlSchedule constant(Vec2 value) { return ControlSchedule{{0.0}, {value}}; }

    void validate() const {
        if (t.empty() || t.size() != a.size())
            throw std::invalid_argument("ControlSchedule: need matching nonempty t/a");
        if (t.front() != 0.0) throw std::invalid_argument("ControlSchedule: t[0] must be 0");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1]))
                throw std::invalid_argument("ControlSchedule: switch times must increase");
    }

    double sup_norm() const {
        double m = 0.0;
        for (const Vec2& v : a) m = std::max(m, norm(v));
        return m;
    }

    Vec2 value_at(double s) const {
        // last switch time <= s (s < 0 clamps to the first piece)
        std::size_t lo = 0, hi = t.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (t[mid] <= s) lo = mid;
            else hi = mid - 1;
        }
        return a[lo];
    }
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step_factor = 0.5;  // step cap = factor * eps (explicit stability)
    double horizon = 1.0;
    std::size_t max_steps = 50'000'000;
    std::size_t samples = 1000;  // uniform sample count for export
};

// Augmented state layout used throughout this module.
namespace aug {
inline constexpr std::size_t X1 = 0, X2 = 1, F1 = 2, F2 = 3, ID = 4, IE = 5, DIM = 6;
}

struct TrajectoryRecord {
    double eps = 0.0;
    Vec2 x0;
    ControlSchedule control;
    IntegratorConfig config;
    DenseOutput<aug::DIM> dense;
    std::size_t accepted_steps = 0;

    // uniform samples for export / plotting
    std::vector<double> times;
    std::vector<Vec2> states;
    std::vector<Vec2> k_samples;

    Vec2 state_at(double t) const {
        const auto y = dense.eval(t);
        return {y[aug::X1], y[aug::X2]};
    }
    Vec2 control_integral_at(double t) const {
        const auto y = dense.eval(t);
        return {y[aug::F1], y[aug::F2]};
    }
    // compensator swallowed by the penalty: k(t) = x0 + \int_0^t alpha - X(t)
    Vec2 k_at(double t) const {
        const auto y = dense.eval(t);
        return {x0.x1 + y[aug::F1] - y[aug::X1], x0.x2 + y[aug::F2] - y[aug::X2]};
    }
    double penalty_integral_at(double t) const { return dense.eval(t)[aug::ID]; }
    double energy_integral_at(double t) const { return dense.eval(t)[aug::IE]; }
    double horizon() const { return config.horizon; }
};

inline TrajectoryRecord integrate_perturbed(Vec2 x, const ControlSchedule& alpha, double eps,
                                            const IntegratorConfig& cfg) {
    if (!(eps > 0.0)) throw std::invalid_argument("integrate_perturbed: eps must be positive");
    if (!(cfg.horizon > 0.0))
        throw std::invalid_argument("integrate_perturbed: horizon must be positive");
    alpha.validate();

    auto rhs = [&alpha, eps](double t, const State<aug::DIM>& y, State<aug::DIM>& dy) {
        const Vec2 av = alpha.value_at(t);
        const Vec2 p{y[aug::X1], y[aug::X2]};
        const Vec2 g = penalty_gradient(p);
        dy[aug::X1] = av.x1 - g.x1 / eps;
        dy[aug::X2] = av.x2 - g.x2 / eps;
        dy[aug::F1] = av.x1;
        dy[aug::F2] = av.x2;
        dy[aug::ID] = penalty(p);
        dy[aug::IE] = dy[aug::X1] * dy[aug::X1] + dy[aug::X2] * dy[aug::X2];
    };

    IntegrateOptions<aug::DIM> opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_steps = cfg.max_steps;
    const double cap = cfg.max_step_factor * eps;
    opt.max_step = [cap](double, const State<aug::DIM>&) { return cap; };
    opt.breakpoints.assign(alpha.t.begin() + 1, alpha.t.end());

    State<aug::DIM> y0{x.x1, x.x2, 0.0, 0.0, 0.0, 0.0};

    TrajectoryRecord rec;
    rec.eps = eps;
    rec.x0 = x;
    rec.control = alpha;
    rec.config = cfg;
    rec.dense = integrate<aug::DIM>(rhs, 0.0, cfg.horizon, y0, opt);
    rec.accepted_steps = rec.dense.steps.size();

    const std::size_t n = std::max<std::size_t>(cfg.samples, 1);
    rec.times.reserve(n + 1);
    rec.states.reserve(n + 1);
    rec.k_samples.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = cfg.horizon * static_cast<double>(i) / static_cast<double>(n);
        rec.times.push_back(t);
        rec.states.push_back(rec.state_at(t));
        rec.k_samples.push_back(rec.k_at(t));
    }
    return rec;
}

// First time the trajectory enters the sublevel set {d <= lam}. Scans the
// accepted-step endpoints and midpoints, then refines the bracketing step by
// bisection on the interpolant. Returns nullopt if the set is never reached.
inline std::optional<double> entry_time(const TrajectoryRecord& traj, double lam) {
    if (!(lam > 0.0)) throw std::invalid_argument("entry_time: lam must be positive");
    auto d_at = [&traj](double t) { return penalty(traj.state_at(t)); };
    if (d_at(0.0) <= lam) return 0.0;
    double prev_t = 0.0;
    for (const auto& step : traj.dense.steps) {
        for (double t : {step.t0 + 0.5 * step.h, step.t0 + step.h}) {
            if (d_at(t) <= lam) {
                auto g = [&lam](const State<aug::DIM>& y) {
                    return penalty(Vec2{y[aug::X1], y[aug::X2]}) - lam;
                };
                return bisect_dense(traj.dense, g, prev_t, t);
            }
            prev_t = t;
        }
    }
    return std::nullopt;
}

// A-priori estimates along a penalized trajectory, checked on a uniform
// time grid (pointwise bounds) and over all ordered grid pairs (interval
// bounds). lhs - rhs <= slack must hold for every instance.
struct AprioriViolation {
    std::string check;
    double t1 = 0.0, t2 = 0.0;
    double lhs = 0.0, rhs = 0.0;
};

struct AprioriReport {
    bool ok = true;
    // worst lhs - rhs seen per family (negative = satisfied with margin)
    double norm_excess = -std::numeric_limits<double>::infinity();
    double penalty_growth_excess = -std::numeric_limits<double>::infinity();
    double mean_penalty_excess = -std::numeric_limits<double>::infinity();
    double energy_excess = -std::numeric_limits<double>::infinity();
    std::vector<AprioriViolation> violations;
};

inline constexpr double apriori_slack = 1e-7;

inline AprioriReport check_apriori_estimates(const TrajectoryRecord& traj,
                                             std::size_t grid = 64) {
    const double T = traj.horizon();
    const double f_inf = traj.control.sup_norm();
    const double eps = traj.eps;
    const double x0n = norm(traj.x0);
    const double mean_C = (x0n + f_inf * T) * f_inf * std::sqrt(2.0);

    std::vector<double> ts(grid + 1);
    for (std::size_t i = 0; i <= grid; ++i)
        ts[i] = T * static_cast<double>(i) / static_cast<double>(grid);

    AprioriReport rep;
    auto record = [&rep](const char* check, double t1, double t2, double lhs, double rhs,
                         double& worst) {
        worst = std::max(worst, lhs - rhs);
        if (lhs - rhs > apriori_slack) {
            rep.ok = false;
            if (rep.violations.size() < 16)
                rep.violations.push_back({check, t1, t2, lhs, rhs});
        }
    };

    std::vector<Vec2> xs(ts.size());
    std::vector<double> ds(ts.size()), Id(ts.size()), Ie(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        xs[i] = traj.state_at(ts[i]);
        ds[i] = penalty(xs[i]);
        Id[i] = traj.penalty_integral_at(ts[i]);
        Ie[i] = traj.energy_integral_at(ts[i]);
    }

    for (std::size_t i = 0; i < ts.size(); ++i) {
        // |X(t)| <= |x| + sqrt(2) f_inf t
        record("state-norm", ts[i], ts[i], norm(xs[i]),
               x0n + std::sqrt(2.0) * f_inf * ts[i], rep.norm_excess);
        // energy over [t, T]
        record("energy", ts[i], T, 0.5 * (Ie.back() - Ie[i]),
               f_inf * f_inf * (T - ts[i]) + (ds[i] - ds.back()) / eps, rep.energy_excess);
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            // growth of d over [t1, t2]
            record("penalty-growth", ts[i], ts[j], ds[j],
                   ds[i] + (ts[j] - ts[i]) * f_inf * f_inf * eps / 2.0,
                   rep.penalty_growth_excess);
            // time-averaged penalty over [t1, t2]
            record("mean-penalty", ts[i], ts[j], (Id[j] - Id[i]) / eps,
                   mean_C * (ts[j] - ts[i]) +
                       0.25 * (std::sqrt(ds[i]) - std::sqrt(ds[j])),
                   rep.mean_penalty_excess);
        }
    }
    return rep;
}

// First time a coordinate hits zero coming from positive values (used to read
// off where a trajectory slides off one branch toward another). Returns the
// refined time, or nullopt if the coordinate stays positive.
inline std::optional<double> first_axis_crossing(const TrajectoryRecord& traj, int component) {
    if (component != 0 && component != 1)
        throw std::invalid_argument("first_axis_crossing: component must be 0 or 1");
    auto coord = [component](const State<aug::DIM>& y) {
        return component == 0 ? y[aug::X1] : y[aug::X2];
    };
    if (coord(traj.dense.eval(0.0)) <= 0.0) return 0.0;
    double prev_t = 0.0;
    for (const auto& step : traj.dense.steps) {
        const double t = step.t0 + step.h;
        if (coord(step.eval(t)) <= 0.0)
            return bisect_dense(traj.dense, coord, prev_t, t);
        prev_t = t;
    }
    return std::nullopt;
}

// Independent reconstruction of the compensator as a quadrature of
// (1/eps) grad d(X) over the dense interpolant (4-point Gauss panels per
// accepted step). Cross-checks the identity k = x0 + \int alpha - X.
inline Vec2 k_quadrature(const TrajectoryRecord& traj, double t_end) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    Vec2 acc{0.0, 0.0};
    for (const auto& step : traj.dense.steps) {
        if (step.t0 >= t_end) break;
        const double a = step.t0;
        const double b = std::min(step.t0 + step.h, t_end);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 4; ++q) {
            const auto y = step.eval(mid + half * gx[q]);
            const Vec2 g = penalty_gradient(Vec2{y[aug::X1], y[aug::X2]});
            acc.x1 += gw[q] * half * g.x1;
            acc.x2 += gw[q] * half * g.x2;
        }
    }
    return Vec2{acc.x1 / traj.eps, acc.x2 / traj.eps};
}

// Lower bound on the lateral shift picked up while crossing the junction
// under a frozen heading with both components negative: at the first
// vertical-coordinate zero, X1 / eps^{1/3} lies in
// [crossing_shift_lower_ratio(theta), 0), uniformly in eps.
inline double crossing_shift_lower_ratio(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    if (!(c < 0.0) || !(s < 0.0))
        throw std::invalid_argument("crossing_shift_lower_ratio: need heading into third quadrant");
    return -1.5 * (-c) / std::pow(-s, 2.0 / 3.0);
}

// Stationary point of the frozen-control field alpha = e_theta for headings
// in the open quarter-turn past the south-west diagonal (both components of
// e_theta negative, the second dominating): the penalty gradient balances
// the drift at a point scaling like eps^{1/3}.
inline Vec2 equilibrium_point(double theta, double eps) {
    const double c = std::cos(theta), s = std::sin(theta);
    if (!(c < 0.0) || !(s < 0.0))
        throw std::invalid_argument("equilibrium_point: need both direction components negative");
    const double x1 = -std::cbrt(s * s / (2.0 * (-c))) * std::cbrt(eps);
    const double x2 = -std::cbrt(c * c / (2.0 * (-s))) * std::cbrt(eps);
    return {x1, x2};
}

}  // namespace crossnet
