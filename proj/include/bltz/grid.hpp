#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bltz {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Discrete phase space: periodic spatial box [-Lx,Lx)^2 times a truncated
/// velocity box [-Vmax,Vmax)^2, plus a uniform angle set on the unit circle.
///
/// Nodes are cell-centered, so the velocity node set is symmetric under
/// v -> -v and the spatial nodes tile the torus evenly.
class PhaseGrid {
public:
    double Lx = 0.0;
    std::size_t Nx = 0;
    double Vmax = 0.0;
    std::size_t Nv = 0;
    std::size_t Nsigma = 0;
    double dx = 0.0;
    double dv = 0.0;
    double dsigma = 0.0;

    PhaseGrid() = default;

    PhaseGrid(double Lx_, std::size_t Nx_, double Vmax_, std::size_t Nv_, std::size_t Nsigma_)
        : Lx(Lx_), Nx(Nx_), Vmax(Vmax_), Nv(Nv_), Nsigma(Nsigma_) {
        if (Lx <= 0.0 || Vmax <= 0.0)
            throw std::invalid_argument("PhaseGrid: nonpositive box extent");
        if (Nx < 8 || Nv < 8)
            throw std::invalid_argument("PhaseGrid: axis count must be >= 8");
        if (Nx % 2 != 0 || Nv % 2 != 0)
            throw std::invalid_argument("PhaseGrid: odd axis count");
        if (Nsigma < 8)
            throw std::invalid_argument("PhaseGrid: Nsigma must be >= 8");
        dx = 2.0 * Lx / static_cast<double>(Nx);
        dv = 2.0 * Vmax / static_cast<double>(Nv);
        dsigma = 2.0 * std::acos(-1.0) / static_cast<double>(Nsigma);
    }

    double xnode(std::size_t i) const { return -Lx + (static_cast<double>(i) + 0.5) * dx; }
    double vnode(std::size_t i) const { return -Vmax + (static_cast<double>(i) + 0.5) * dv; }

    /// Angle node k, uniform trapezoid rule on the circle.
    Vec2 sigma(std::size_t k) const {
        const double th = static_cast<double>(k) * dsigma;
        return {std::cos(th), std::sin(th)};
    }

    bool operator==(const PhaseGrid& o) const {
        return Lx == o.Lx && Nx == o.Nx && Vmax == o.Vmax && Nv == o.Nv && Nsigma == o.Nsigma;
    }
};

/// Convenience factory mirroring the run-config grid block.
inline PhaseGrid build_grid(double Lx, std::size_t Nx, double Vmax, std::size_t Nv,
                            std::size_t Nsigma) {
    return PhaseGrid(Lx, Nx, Vmax, Nv, Nsigma);
}

/// Nonnegative sample array f(x,v) on a PhaseGrid with a time tag.
///
/// Full fields store data row-major as (x1,x2,v1,v2); homogeneous fields
/// store a single (v1,v2) slice and are constant in x. The field is treated
/// as zero outside the velocity box.
class DistributionField {
public:
    PhaseGrid grid;
    double time = 0.0;
    bool homogeneous = false;
    std::vector<double> data;

    DistributionField() = default;

    explicit DistributionField(const PhaseGrid& g, bool homogeneous_ = false, double t = 0.0)
        : grid(g), time(t), homogeneous(homogeneous_) {
        data.assign(homogeneous ? g.Nv * g.Nv : g.Nx * g.Nx * g.Nv * g.Nv, 0.0);
    }

    std::size_t slice_count() const { return homogeneous ? 1 : grid.Nx * grid.Nx; }
    std::size_t slice_size() const { return grid.Nv * grid.Nv; }

    double* slice(std::size_t s) { return data.data() + s * slice_size(); }
    const double* slice(std::size_t s) const { return data.data() + s * slice_size(); }

    double& at(std::size_t ix1, std::size_t ix2, std::size_t iv1, std::size_t iv2) {
        const std::size_t s = homogeneous ? 0 : ix1 * grid.Nx + ix2;
        return data[s * slice_size() + iv1 * grid.Nv + iv2];
    }
    double at(std::size_t ix1, std::size_t ix2, std::size_t iv1, std::size_t iv2) const {
        const std::size_t s = homogeneous ? 0 : ix1 * grid.Nx + ix2;
        return data[s * slice_size() + iv1 * grid.Nv + iv2];
    }

    /// Fill from a pointwise function of (x,v).
    template <class F>
    void sample(F&& fn) {
        const std::size_t nv = grid.Nv;
        if (homogeneous) {
            for (std::size_t a = 0; a < nv; ++a)
                for (std::size_t b = 0; b < nv; ++b)
                    data[a * nv + b] = fn(Vec2{0.0, 0.0}, Vec2{grid.vnode(a), grid.vnode(b)});
            return;
        }
        for (std::size_t i = 0; i < grid.Nx; ++i)
            for (std::size_t j = 0; j < grid.Nx; ++j) {
                const Vec2 x{grid.xnode(i), grid.xnode(j)};
                double* s = slice(i * grid.Nx + j);
                for (std::size_t a = 0; a < nv; ++a)
                    for (std::size_t b = 0; b < nv; ++b)
                        s[a * nv + b] = fn(x, Vec2{grid.vnode(a), grid.vnode(b)});
            }
    }

    bool compatible(const DistributionField& o) const {
        return grid == o.grid && homogeneous == o.homogeneous;
    }

    /// Clamp tiny negative values to zero; returns the clipped mass
    /// (quadrature-weighted). Values below -threshold are left alone so
    /// genuine sign errors stay visible.
    double clip_negative(double threshold) {
        double clipped = 0.0;
        for (double& c : data) {
            if (c < 0.0 && c > -threshold) {
                clipped -= c;
                c = 0.0;
            }
        }
        const double w = homogeneous ? grid.dv * grid.dv : grid.dx * grid.dx * grid.dv * grid.dv;
        return clipped * w;
    }
};

/// Quadrature weight of one node: dx^2 dv^2, or dv^2 in homogeneous mode
/// (homogeneous functionals are per unit spatial area, weights evaluated
/// at x = 0).
inline double cell_weight(const DistributionField& f) {
    return f.homogeneous ? f.grid.dv * f.grid.dv
                         : f.grid.dx * f.grid.dx * f.grid.dv * f.grid.dv;
}

/// Midpoint-rule integral of weight(x,v) * f over phase space.
/// Pairwise summation keeps the reduction order fixed and well-conditioned.
template <class W>
double integrate(const DistributionField& f, W&& weight) {
    const std::size_t nv = f.grid.Nv;
    std::vector<double> partial;
    partial.reserve(f.slice_count());
    for (std::size_t s = 0; s < f.slice_count(); ++s) {
        const Vec2 x = f.homogeneous
                           ? Vec2{0.0, 0.0}
                           : Vec2{f.grid.xnode(s / f.grid.Nx), f.grid.xnode(s % f.grid.Nx)};
        const double* p = f.slice(s);
        double acc = 0.0;
        for (std::size_t a = 0; a < nv; ++a) {
            const double va = f.grid.vnode(a);
            double row = 0.0;
            for (std::size_t b = 0; b < nv; ++b)
                row += weight(x, Vec2{va, f.grid.vnode(b)}) * p[a * nv + b];
            acc += row;
        }
        partial.push_back(acc);
    }
    // fixed-order pairwise reduction over slices
    std::size_t n = partial.size();
    while (n > 1) {
        std::size_t m = 0;
        for (std::size_t i = 0; i + 1 < n; i += 2) partial[m++] = partial[i] + partial[i + 1];
        if (n % 2) partial[m++] = partial[n - 1];
        n = m;
    }
    return (n ? partial[0] : 0.0) * cell_weight(f);
}

inline double mass(const DistributionField& f) {
    return integrate(f, [](Vec2, Vec2) { return 1.0; });
}

/// Discrete L2 norm over phase space (homogeneous: per unit spatial area).
inline double l2_norm(const DistributionField& f) {
    std::vector<double> partial;
    partial.reserve(f.slice_count());
    const std::size_t m = f.slice_size();
    for (std::size_t s = 0; s < f.slice_count(); ++s) {
        const double* p = f.slice(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += p[i] * p[i];
        partial.push_back(acc);
    }
    double tot = 0.0;
    for (double v : partial) tot += v;
    return std::sqrt(tot * cell_weight(f));
}

inline double max_abs(const DistributionField& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

struct SupportMonitor {
    double margin = 0.0;       // fraction of the box half-width
    double leaked_mass = 0.0;  // mass inside the boundary band
    double total_mass = 0.0;
    bool flagged = false;
};

/// Mass within `margin * 2Lx` of the spatial boundary. Polices the
/// periodic-box stand-in for free space: transported data reaching the
/// boundary band invalidates unwrapped moments.
inline SupportMonitor support_check(const DistributionField& f, double margin,
                                    double flag_fraction = 1e-6) {
    if (!(margin > 0.0 && margin < 0.5))
        throw std::invalid_argument("support_check: margin must be in (0, 0.5)");
    SupportMonitor mon;
    mon.margin = margin;
    const double band = margin * 2.0 * f.grid.Lx;
    mon.total_mass = mass(f);
    mon.leaked_mass = integrate(f, [&](Vec2 x, Vec2) {
        const double d = std::min(std::min(x.x + f.grid.Lx, f.grid.Lx - x.x),
                                  std::min(x.y + f.grid.Lx, f.grid.Lx - x.y));
        return d < band ? 1.0 : 0.0;
    });
    mon.flagged = mon.leaked_mass > flag_fraction * std::max(mon.total_mass, 0.0);
    return mon;
}

}  // namespace bltz
