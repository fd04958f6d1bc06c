// geometry.hpp — the planar cross network (four half-axes joined at the
// origin), the quartic penalty d(x) = x1^2 x2^2 that vanishes exactly on it,
// and the projection that slides a plane point onto the network along the
// level curves x2^2 - x1^2 = const.
#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>

namespace crossnet {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    friend Vec2 operator*(Vec2 a, double s) { return s * a; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x1 / s, a.x2 / s}; }
    Vec2& operator+=(Vec2 b) { x1 += b.x1; x2 += b.x2; return *this; }
    Vec2& operator-=(Vec2 b) { x1 -= b.x1; x2 -= b.x2; return *this; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x1 == b.x1 && a.x2 == b.x2; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }
inline double norm_sq(Vec2 a) { return a.x1 * a.x1 + a.x2 * a.x2; }
// counter-clockwise quarter turn
inline Vec2 perp(Vec2 a) { return {-a.x2, a.x1}; }

enum class Branch : int { E = 0, N = 1, W = 2, S = 3, O = 4 };

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::E: return "E";
        case Branch::N: return "N";
        case Branch::W: return "W";
        case Branch::S: return "S";
        case Branch::O: return "O";
    }
    return "?";
}

inline std::optional<Branch> branch_from_name(const std::string& s) {
    if (s == "E") return Branch::E;
    if (s == "N") return Branch::N;
    if (s == "W") return Branch::W;
    if (s == "S") return Branch::S;
    if (s == "O") return Branch::O;
    return std::nullopt;
}

// Unit vector of a half-axis; the junction has no direction.
inline Vec2 branch_direction(Branch b) {
    switch (b) {
        case Branch::E: return {1.0, 0.0};
        case Branch::N: return {0.0, 1.0};
        case Branch::W: return {-1.0, 0.0};
        case Branch::S: return {0.0, -1.0};
        case Branch::O: return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

// A point of the network given intrinsically: which half-axis and how far out.
// radius == 0 exactly when branch == O.
struct NetworkPoint {
    Branch branch = Branch::O;
    double radius = 0.0;

    static NetworkPoint make(Branch b, double r) {
        if (r < 0.0 || !std::isfinite(r))
            throw std::invalid_argument("NetworkPoint: radius must be finite and >= 0");
        if (r == 0.0) return {Branch::O, 0.0};
        if (b == Branch::O)
            throw std::invalid_argument("NetworkPoint: junction has radius 0");
        return {b, r};
    }
    static NetworkPoint origin() { return {Branch::O, 0.0}; }
};

inline Vec2 embed(NetworkPoint p) { return p.radius * branch_direction(p.branch); }

// Geodesic distance along the network (through the junction if needed).
inline double network_distance(NetworkPoint a, NetworkPoint b) {
    if (a.branch == b.branch) return std::abs(a.radius - b.radius);
    if (a.branch == Branch::O) return b.radius;
    if (b.branch == Branch::O) return a.radius;
    return a.radius + b.radius;
}

// ---------------------------------------------------------------------------
// Penalty field d(x) = x1^2 x2^2 and its calculus.
// ---------------------------------------------------------------------------

// Constants attached to the penalty: the gradient inequality |grad d| >=
// loja_nu * d^loja_theta holds globally for this d, and kappa_coeff carries
// the drift-strength-independent part of the invariant sublevel threshold.
inline constexpr double loja_theta = 0.75;
inline const double loja_nu = 2.0 * std::sqrt(2.0);
inline const double kappa_coeff = std::pow(2.0, -4.0 / 3.0);

inline double penalty(Vec2 p) {
    const double a = p.x1 * p.x2;
    return a * a;
}

inline Vec2 penalty_gradient(Vec2 p) {
    return {2.0 * p.x1 * p.x2 * p.x2, 2.0 * p.x1 * p.x1 * p.x2};
}

// Sublevel sets {d <= lam} are forward-invariant for the penalized dynamics
// as soon as lam >= kappa_coeff * f_inf^(4/3) * eps^(4/3).
inline double invariance_threshold(double f_inf, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("invariance_threshold: eps must be > 0");
    return kappa_coeff * std::pow(f_inf, 4.0 / 3.0) * std::pow(eps, 4.0 / 3.0);
}

// Closed-form projection onto the network: the descent flow of d preserves
// x2^2 - x1^2, so the limit lies on the axis the start leans toward, at
// radius sqrt(|x2^2 - x1^2|). Exact diagonal ties go to the junction; this is
// the measure-zero tie rule, no tolerance band is applied.
inline NetworkPoint project_to_network(Vec2 p) {
    const double a1 = std::abs(p.x1), a2 = std::abs(p.x2);
    if (a1 == a2) return NetworkPoint::origin();
    if (a2 > a1) {
        const double r = std::sqrt((a2 - a1) * (a2 + a1));
        return NetworkPoint::make(p.x2 > 0.0 ? Branch::N : Branch::S, r);
    }
    const double r = std::sqrt((a1 - a2) * (a1 + a2));
    return NetworkPoint::make(p.x1 > 0.0 ? Branch::E : Branch::W, r);
}

// Metric projection onto the network: drop the smaller coordinate. This is
// the right classifier for points already hugging the network (it moves the
// point by at most min(|x1|,|x2|)); it is NOT the descent-flow projection.
inline NetworkPoint nearest_network_point(Vec2 p) {
    const double a1 = std::abs(p.x1), a2 = std::abs(p.x2);
    if (a2 >= a1)
        return NetworkPoint::make(p.x2 >= 0.0 ? Branch::N : Branch::S, a2);
    return NetworkPoint::make(p.x1 >= 0.0 ? Branch::E : Branch::W, a1);
}

// Membership test with an off-axis tolerance. Floating-point trajectories
// never land exactly on the network, so consumers classify "numerically on
// the network" with tau (default 1e-9) on the small coordinate.
inline constexpr double default_tau_gamma = 1e-9;

inline std::optional<NetworkPoint> classify_on_network(Vec2 p, double tau = default_tau_gamma) {
    const double a1 = std::abs(p.x1), a2 = std::abs(p.x2);
    if (a1 <= tau && a2 <= tau) return NetworkPoint::origin();
    if (a1 <= tau) return NetworkPoint::make(p.x2 > 0.0 ? Branch::N : Branch::S, a2);
    if (a2 <= tau) return NetworkPoint::make(p.x1 > 0.0 ? Branch::E : Branch::W, a1);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dihedral symmetries of the cross (rotations by quarter turns and the
// mirror), used to reduce junction case analyses to the north branch.
// ---------------------------------------------------------------------------

// Rotate a plane point by k quarter turns counter-clockwise (exact on axes).
inline Vec2 rotate_quarter(Vec2 p, int k) {
    k = ((k % 4) + 4) % 4;
    switch (k) {
        case 0: return p;
        case 1: return {-p.x2, p.x1};
        case 2: return {-p.x1, -p.x2};
        default: return {p.x2, -p.x1};
    }
}

inline Branch rotate_branch(Branch b, int k) {
    if (b == Branch::O) return b;
    return static_cast<Branch>((static_cast<int>(b) + ((k % 4) + 4)) % 4);
}

// Number of quarter turns taking branch b to the north branch.
inline int quarter_turns_to_north(Branch b) {
    switch (b) {
        case Branch::E: return 1;
        case Branch::N: return 0;
        case Branch::W: return -1;
        case Branch::S: return 2;
        case Branch::O: return 0;
    }
    return 0;
}

}  // namespace crossnet
