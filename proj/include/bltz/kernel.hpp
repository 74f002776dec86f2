#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "bltz/grid.hpp"

namespace bltz {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvTwoPi = 1.0 / (2.0 * kPi);

struct CollisionPair {
    Vec2 v, v_star, v_prime, v_star_prime;
    Vec2 sigma;
};

/// Pre/post collision map: elastic two-body exchange parameterized by a unit
/// vector. Momentum and energy are conserved identically.
inline std::pair<Vec2, Vec2> post_collision_velocities(Vec2 v, Vec2 v_star, Vec2 sigma) {
    const double s2 = norm2(sigma);
    if (std::abs(s2 - 1.0) > 1e-12)
        throw std::invalid_argument("post_collision_velocities: sigma is not a unit vector");
    const Vec2 mid{0.5 * (v.x + v_star.x), 0.5 * (v.y + v_star.y)};
    const double r = 0.5 * std::hypot(v.x - v_star.x, v.y - v_star.y);
    return {Vec2{mid.x + r * sigma.x, mid.y + r * sigma.y},
            Vec2{mid.x - r * sigma.x, mid.y - r * sigma.y}};
}

inline CollisionPair make_collision_pair(Vec2 v, Vec2 v_star, Vec2 sigma) {
    auto [vp, vsp] = post_collision_velocities(v, v_star, sigma);
    return {v, v_star, vp, vsp, sigma};
}

/// Collision kernel b(z, sigma): the constant kernel 1/(2pi), or a smooth
/// compactly supported truncation of it.
///
/// The truncated kernel vanishes when min(|z|, 1/|z|) < delta or when the
/// deflection variable u = |z.sigma|/|z| is within delta of 0 or 1, and
/// rises smoothly to 1/(2pi) on the interior of its support. It depends on
/// z only through |z| and on sigma only through sigma.z/|z|.
class CollisionKernel {
public:
    enum class Kind { Constant, Truncated };

    Kind kind = Kind::Constant;
    int n = 0;            // truncation index
    double delta = 0.0;   // support cutoff parameter
    double taper = 1.0;   // ramp length in units of delta

    static CollisionKernel constant() { return CollisionKernel{}; }

    static CollisionKernel truncated(int n, double delta, double taper = 1.0) {
        if (n < 1) throw std::invalid_argument("CollisionKernel: n must be >= 1");
        if (!(delta > 0.0 && delta < 0.5))
            throw std::invalid_argument("CollisionKernel: delta must be in (0, 0.5)");
        if (!(taper > 0.0)) throw std::invalid_argument("CollisionKernel: taper must be > 0");
        CollisionKernel k;
        k.kind = Kind::Truncated;
        k.n = n;
        k.delta = delta;
        k.taper = taper;
        return k;
    }

    /// Default schedule delta_n = 1/(n+2): tends to zero, keeps delta < 0.5.
    static CollisionKernel truncated_default(int n) {
        return truncated(n, 1.0 / (static_cast<double>(n) + 2.0));
    }

    double operator()(Vec2 z, Vec2 sigma) const {
        if (kind == Kind::Constant) return kInvTwoPi;
        const double r = std::hypot(z.x, z.y);
        if (r <= 0.0) return 0.0;
        const double u = std::abs(dot(z, sigma)) / r;
        return kInvTwoPi * ramp(r) * ramp(1.0 / r) * ramp(u) * ramp(1.0 - u);
    }

    bool is_constant() const { return kind == Kind::Constant; }

private:
    // smoothstep from 0 at s = delta to 1 at s = delta*(1+taper)
    double ramp(double s) const {
        const double t = (s - delta) / (delta * taper);
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * (3.0 - 2.0 * t);
    }
};

inline CollisionKernel make_truncated_kernel(int n, double delta_n) {
    return CollisionKernel::truncated(n, delta_n);
}

}  // namespace bltz
