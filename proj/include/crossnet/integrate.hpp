// integrate.hpp — adaptive embedded Runge–Kutta (Dormand–Prince 5(4)) with a
// continuous extension, hard breakpoints, and a per-state step cap. The
// penalized field has Lipschitz constant of order 1/eps, so callers cap the
// step at a multiple of eps away from the network and let the error
// controller take over inside the relaxed layer where the field is mild.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace crossnet {

struct IntegrationError : std::runtime_error {
    double t_fail;
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " at t=" + std::to_string(t)), t_fail(t) {}
};

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

// Dormand–Prince 5(4) tableau (FSAL) and the coefficients of its quartic
// continuous extension.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
inline constexpr double dp_a2[1] = {1.0 / 5.0};
inline constexpr double dp_a3[2] = {3.0 / 40.0, 9.0 / 40.0};
inline constexpr double dp_a4[3] = {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
inline constexpr double dp_a5[4] = {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
                                    -212.0 / 729.0};
inline constexpr double dp_a6[5] = {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                    49.0 / 176.0, -5103.0 / 18656.0};
inline constexpr double dp_b[6] = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                                   -2187.0 / 6784.0, 11.0 / 84.0};
inline constexpr double dp_e[7] = {71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                   -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};
inline constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

}  // namespace detail

// One accepted step's interpolant: a quartic in the normalized time
// theta = (t - t0)/h, exact at both endpoints.
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State<N> r1{}, r2{}, r3{}, r4{}, r5{};

    State<N> eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> y{};
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return y;
    }
};

template <std::size_t N>
struct DenseOutput {
    std::vector<DenseStep<N>> steps;
    double t_begin = 0.0;
    double t_end = 0.0;

    bool empty() const { return steps.empty(); }

    // Locate the covering step by binary search; clamped at the ends.
    const DenseStep<N>& step_at(double t) const {
        if (steps.empty()) throw std::logic_error("DenseOutput: empty");
        std::size_t lo = 0, hi = steps.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (steps[mid].t0 <= t) lo = mid;
            else hi = mid - 1;
        }
        return steps[lo];
    }

    State<N> eval(double t) const { return step_at(t).eval(t); }
};

template <std::size_t N>
struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // hard cap on |h| as a function of (t, y); return +inf for "no cap"
    std::function<double(double, const State<N>&)> max_step;
    // times the integrator must hit exactly (control switches etc.)
    std::vector<double> breakpoints;
    std::size_t max_steps = 50'000'000;
    double initial_step = 0.0;  // 0 = automatic
    bool collect_dense = true;
};

// Integrate y' = f(t, y) over [t0, t1] (t1 > t0). Returns dense output over
// the whole span; final state is dense.eval(t1) (stored exactly as the last
// step endpoint).
template <std::size_t N, class RHS>
DenseOutput<N> integrate(RHS&& f, double t0, double t1, State<N> y0,
                         const IntegrateOptions<N>& opt) {
    using namespace detail;
    if (!(t1 > t0)) throw std::invalid_argument("integrate: need t1 > t0");

    DenseOutput<N> out;
    out.t_begin = t0;
    out.t_end = t1;

    // merge breakpoints into an increasing list of segment ends
    std::vector<double> stops;
    for (double b : opt.breakpoints)
        if (b > t0 && b < t1) stops.push_back(b);
    stops.push_back(t1);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    State<N> y = y0;
    double t = t0;
    State<N> k1{};
    f(t, y, k1);
    std::size_t nsteps = 0;
    double err_old = 1.0;
    double h = opt.initial_step;

    for (double seg_end : stops) {
        bool fsal_valid = true;  // k1 holds f(t, y)
        if (h <= 0.0) {
            // crude but serviceable initial step: scale against the first slope
            double scale = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
                scale = std::max(scale, std::abs(k1[i]) / sc);
            }
            h = (scale > 0.0) ? 0.01 / scale : 1e-6 * (seg_end - t);
            h = std::min(h, seg_end - t);
        }
        while (t < seg_end) {
            if (++nsteps > opt.max_steps)
                throw IntegrationError("integrate: step budget exhausted", t);
            if (!fsal_valid) {
                f(t, y, k1);
                fsal_valid = true;
            }
            double hcap = seg_end - t;
            if (opt.max_step) hcap = std::min(hcap, opt.max_step(t, y));
            h = std::min(h, hcap);
            if (!(h > 0.0) || t + h == t)
                throw IntegrationError("integrate: step size underflow", t);

            State<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};
            for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * dp_a2[0] * k1[i];
            f(t + dp_c[1] * h, ytmp, k2);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (dp_a3[0] * k1[i] + dp_a3[1] * k2[i]);
            f(t + dp_c[2] * h, ytmp, k3);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (dp_a4[0] * k1[i] + dp_a4[1] * k2[i] + dp_a4[2] * k3[i]);
            f(t + dp_c[3] * h, ytmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (dp_a5[0] * k1[i] + dp_a5[1] * k2[i] + dp_a5[2] * k3[i] +
                                      dp_a5[3] * k4[i]);
            f(t + dp_c[4] * h, ytmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (dp_a6[0] * k1[i] + dp_a6[1] * k2[i] + dp_a6[2] * k3[i] +
                                      dp_a6[3] * k4[i] + dp_a6[4] * k5[i]);
            f(t + dp_c[5] * h, ytmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                ynew[i] = y[i] + h * (dp_b[0] * k1[i] + dp_b[2] * k3[i] + dp_b[3] * k4[i] +
                                      dp_b[4] * k5[i] + dp_b[5] * k6[i]);
            f(t + h, ynew, k7);

            // scaled error of the embedded 4th-order solution
            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double ei = h * (dp_e[0] * k1[i] + dp_e[2] * k3[i] + dp_e[3] * k4[i] +
                                       dp_e[4] * k5[i] + dp_e[5] * k6[i] + dp_e[6] * k7[i]);
                const double sc =
                    opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(err / static_cast<double>(N));

            if (err <= 1.0) {
                if (opt.collect_dense) {
                    DenseStep<N> ds;
                    ds.t0 = t;
                    ds.h = h;
                    for (std::size_t i = 0; i < N; ++i) {
                        const double ydiff = ynew[i] - y[i];
                        const double bspl = h * k1[i] - ydiff;
                        ds.r1[i] = y[i];
                        ds.r2[i] = ydiff;
                        ds.r3[i] = bspl;
                        ds.r4[i] = ydiff - h * k7[i] - bspl;
                        ds.r5[i] = h * (dp_d[0] * k1[i] + dp_d[2] * k3[i] + dp_d[3] * k4[i] +
                                        dp_d[4] * k5[i] + dp_d[5] * k6[i] + dp_d[6] * k7[i]);
                    }
                    out.steps.push_back(ds);
                }
                t += h;
                y = ynew;
                k1 = k7;  // FSAL
                // PI controller (Hairer's dopri5 constants)
                const double fac =
                    0.9 * std::pow(err > 0 ? err : 1e-16, -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
                h *= std::min(5.0, std::max(0.2, fac));
                err_old = std::max(err, 1e-4);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        // next segment starts with a fresh RHS evaluation (the field may jump)
        if (seg_end != t1) {
            f(t, y, k1);
        }
    }
    if (out.steps.empty()) {
        // degenerate span: record a constant step so eval() works
        DenseStep<N> ds;
        ds.t0 = t0;
        ds.h = t1 - t0;
        ds.r1 = y0;
        out.steps.push_back(ds);
    }
    return out;
}

// Bisection for g(dense(t)) == 0 given a sign change over [lo, hi].
template <std::size_t N, class G>
double bisect_dense(const DenseOutput<N>& dense, G&& g, double lo, double hi) {
    double glo = g(dense.eval(lo));
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(dense.eval(mid));
        if ((glo <= 0.0) == (gm <= 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace crossnet
