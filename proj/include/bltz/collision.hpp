#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bltz/grid.hpp"
#include "bltz/kernel.hpp"
#include "bltz/parallel.hpp"

namespace bltz {

/// Spatial density rho_f(x) = sum_v f dv^2 (one value in homogeneous mode).
inline std::vector<double> spatial_density(const DistributionField& f) {
    std::vector<double> rho(f.slice_count(), 0.0);
    const std::size_t m = f.slice_size();
    const double w = f.grid.dv * f.grid.dv;
    for (std::size_t s = 0; s < f.slice_count(); ++s) {
        const double* p = f.slice(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += p[i];
        rho[s] = acc * w;
    }
    return rho;
}

/// Precomputed quadrature for the gain operator on a fixed grid and kernel.
///
/// The (v*, sigma) sum is reorganized over the velocity difference lattice:
/// for a fixed integer difference D = (v - v*)/dv and angle sigma, both
/// post-collision points sit at fixed offsets from v, so the bilinear
/// stencil weights are shared by every v and the inner loops stream over a
/// rectangle (the intersection of the box with its D-translate and the two
/// stencil validity strips). Two exact symmetries cut the work: the (v,v*)
/// swap leaves the integrand unchanged (one product feeds both outputs),
/// and for equal arguments so does sigma -> -sigma.
class CollisionTable {
public:
    struct Entry {
        int32_t d1, d2;          // difference in grid units
        int32_t bp1, bp2;        // stencil base offset for v'
        int32_t bm1, bm2;        // stencil base offset for v*'
        int32_t ilo, ihi, jlo, jhi;
        double wp[4];            // bilinear weights for v'  (00,01,10,11)
        double wm[4];            // bilinear weights for v*'
        double coeff;            // kernel value * dv^2 * dsigma (* 2 in half-angle table)
    };

    PhaseGrid grid;
    CollisionKernel kernel;
    std::vector<Entry> dual;        // D != 0 half-plane, full angle set
    std::vector<Entry> dual_half;   // D != 0 half-plane, half angle set, doubled coeff
    double diag_coeff = 0.0;        // D = 0 term: sum_k b(0,sigma_k) dsigma * dv^2
    bool half_angles_valid = false;

    CollisionTable() = default;

    CollisionTable(const PhaseGrid& g, const CollisionKernel& k) : grid(g), kernel(k) {
        const int N = static_cast<int>(g.Nv);
        const double dv = g.dv;
        const double dsig = g.dsigma;
        half_angles_valid = (g.Nsigma % 2 == 0);

        for (std::size_t kk = 0; kk < g.Nsigma; ++kk)
            diag_coeff += kernel(Vec2{0.0, 0.0}, g.sigma(kk)) * dsig * dv * dv;

        for (int d1 = 0; d1 < N; ++d1) {
            for (int d2 = (d1 == 0 ? 1 : -(N - 1)); d2 < N; ++d2) {
                const double r = std::hypot(d1, d2);  // |D| in grid units
                const Vec2 z{d1 * dv, d2 * dv};
                for (std::size_t kk = 0; kk < g.Nsigma; ++kk) {
                    const Vec2 s = g.sigma(kk);
                    const double b = kernel(z, s);
                    if (b == 0.0) continue;
                    Entry e{};
                    e.d1 = d1;
                    e.d2 = d2;
                    // offsets of v' and v*' from v, in grid units
                    const double op1 = 0.5 * (-d1 + r * s.x), op2 = 0.5 * (-d2 + r * s.y);
                    const double om1 = 0.5 * (-d1 - r * s.x), om2 = 0.5 * (-d2 - r * s.y);
                    e.bp1 = static_cast<int32_t>(std::floor(op1));
                    e.bp2 = static_cast<int32_t>(std::floor(op2));
                    e.bm1 = static_cast<int32_t>(std::floor(om1));
                    e.bm2 = static_cast<int32_t>(std::floor(om2));
                    const double fp1 = op1 - e.bp1, fp2 = op2 - e.bp2;
                    const double fm1 = om1 - e.bm1, fm2 = om2 - e.bm2;
                    e.wp[0] = (1 - fp1) * (1 - fp2);
                    e.wp[1] = (1 - fp1) * fp2;
                    e.wp[2] = fp1 * (1 - fp2);
                    e.wp[3] = fp1 * fp2;
                    e.wm[0] = (1 - fm1) * (1 - fm2);
                    e.wm[1] = (1 - fm1) * fm2;
                    e.wm[2] = fm1 * (1 - fm2);
                    e.wm[3] = fm1 * fm2;
                    e.coeff = b * dv * dv * dsig;
                    // v range: v in box, v - D in box, both stencils touching the box
                    int ilo = std::max(0, d1), ihi = std::min(N, N + d1);
                    int jlo = std::max(0, d2), jhi = std::min(N, N + d2);
                    ilo = std::max({ilo, -1 - e.bp1, -1 - e.bm1});
                    ihi = std::min({ihi, N - e.bp1, N - e.bm1});
                    jlo = std::max({jlo, -1 - e.bp2, -1 - e.bm2});
                    jhi = std::min({jhi, N - e.bp2, N - e.bm2});
                    if (ilo >= ihi || jlo >= jhi) continue;
                    e.ilo = ilo; e.ihi = ihi; e.jlo = jlo; e.jhi = jhi;
                    dual.push_back(e);
                    if (half_angles_valid && kk < g.Nsigma / 2) {
                        Entry h = e;
                        h.coeff *= 2.0;
                        dual_half.push_back(h);
                    }
                }
            }
        }

        // loss-side angular mass B(D) = sum_k b(D, sigma_k) dsigma on the
        // difference lattice, for the general-kernel loss convolution
        loss_B.assign(static_cast<std::size_t>(2 * N - 1) * (2 * N - 1), 0.0);
        for (int d1 = -(N - 1); d1 < N; ++d1)
            for (int d2 = -(N - 1); d2 < N; ++d2) {
                double acc = 0.0;
                for (std::size_t kk = 0; kk < g.Nsigma; ++kk)
                    acc += kernel(Vec2{d1 * dv, d2 * dv}, g.sigma(kk));
                loss_B[(d1 + N - 1) * (2 * N - 1) + (d2 + N - 1)] = acc * dsig;
            }
    }

    /// One entry applied to one padded velocity slice: a fixed-weight
    /// two-point-stencil product streamed over the entry rectangle, deposited
    /// at both members of the colliding pair.
    static void apply_entry(const Entry& e, const double* __restrict fpad,
                            const double* __restrict gpad, double* __restrict acc1,
                            double* __restrict acc2, int N) {
        const int P = N + 2;
        const double c = e.coeff;
        const double wp0 = e.wp[0], wp1 = e.wp[1], wp2 = e.wp[2], wp3 = e.wp[3];
        const double wm0 = e.wm[0], wm1 = e.wm[1], wm2 = e.wm[2], wm3 = e.wm[3];
        const int len = e.jhi - e.jlo;
        for (int i = e.ilo; i < e.ihi; ++i) {
            const double* __restrict fr0 = fpad + (i + e.bp1 + 1) * P + (e.jlo + e.bp2 + 1);
            const double* __restrict fr1 = fr0 + P;
            const double* __restrict gr0 = gpad + (i + e.bm1 + 1) * P + (e.jlo + e.bm2 + 1);
            const double* __restrict gr1 = gr0 + P;
            double* __restrict a1 = acc1 + i * N + e.jlo;
            double* __restrict a2 = acc2 + (i - e.d1) * N + (e.jlo - e.d2);
            for (int j = 0; j < len; ++j) {
                const double F = wp0 * fr0[j] + wp1 * fr0[j + 1] + wp2 * fr1[j] + wp3 * fr1[j + 1];
                const double G = wm0 * gr0[j] + wm1 * gr0[j + 1] + wm2 * gr1[j] + wm3 * gr1[j + 1];
                const double p = c * F * G;
                a1[j] += p;
                a2[j] += p;
            }
        }
    }

    /// Gain operator applied to one velocity slice; acc1/acc2 are zeroed by
    /// the caller, fpad/gpad are (N+2)^2 zero-padded copies.
    void apply_slice(const double* fpad, const double* gpad, double* acc1, double* acc2,
                     bool same_field, const double* fslice, const double* gslice) const {
        const int N = static_cast<int>(grid.Nv);
        const auto& entries = (same_field && half_angles_valid) ? dual_half : dual;
        for (const Entry& e : entries) apply_entry(e, fpad, gpad, acc1, acc2, N);
        // diagonal v* = v term: both post-collision points equal v
        if (diag_coeff != 0.0) {
            for (int i = 0; i < N * N; ++i) acc1[i] += diag_coeff * fslice[i] * gslice[i];
        }
    }

    const std::vector<double>& loss_angular_mass() const { return loss_B; }

private:
    std::vector<double> loss_B;
};

/// Gain and loss collision operators bound to one grid + kernel.
class CollisionOperator {
public:
    CollisionOperator() = default;
    CollisionOperator(const PhaseGrid& g, const CollisionKernel& k, std::size_t threads = 0)
        : table_(g, k), threads_(resolve_threads(threads)) {}

    const PhaseGrid& grid() const { return table_.grid; }
    const CollisionKernel& kernel() const { return table_.kernel; }
    void set_threads(std::size_t t) { threads_ = resolve_threads(t); }

    /// Q_b^+(f,g): bilinear in (f,g), nonnegative for nonnegative inputs.
    DistributionField gain(const DistributionField& f, const DistributionField& g) const {
        check_fields(f, g);
        DistributionField out(f.grid, f.homogeneous, f.time);
        const int N = static_cast<int>(f.grid.Nv);
        const int P = N + 2;
        const bool same = (&f == &g) || (f.data == g.data);
        const std::size_t slices = f.slice_count();

        if (slices >= 2) {
            parallel_for_blocks(slices, threads_, [&](std::size_t b, std::size_t e, std::size_t) {
                std::vector<double> fpad(P * P, 0.0), gpad(P * P, 0.0);
                std::vector<double> acc1(N * N), acc2(N * N);
                for (std::size_t s = b; s < e; ++s) {
                    const double* fs = f.slice(s);
                    const double* gs = g.slice(s);
                    pad(fs, fpad.data(), N);
                    if (same) {
                        std::copy(fpad.begin(), fpad.end(), gpad.begin());
                    } else {
                        pad(gs, gpad.data(), N);
                    }
                    std::fill(acc1.begin(), acc1.end(), 0.0);
                    std::fill(acc2.begin(), acc2.end(), 0.0);
                    table_.apply_slice(fpad.data(), gpad.data(), acc1.data(), acc2.data(), same,
                                       fs, gs);
                    double* o = out.slice(s);
                    for (int i = 0; i < N * N; ++i) o[i] = acc1[i] + acc2[i];
                }
            });
        } else {
            // homogeneous: split the entry list, combine per-worker
            // accumulators in worker order so results stay deterministic
            const auto& entries =
                (same && table_.half_angles_valid) ? table_.dual_half : table_.dual;
            const std::size_t nw = std::max<std::size_t>(1, std::min(threads_, entries.size()));
            std::vector<double> fpad(P * P, 0.0), gpad(P * P, 0.0);
            pad(f.slice(0), fpad.data(), N);
            pad(g.slice(0), gpad.data(), N);
            std::vector<std::vector<double>> acc1(nw), acc2(nw);
            parallel_for_blocks(entries.size(), nw, [&](std::size_t b, std::size_t e, std::size_t w) {
                acc1[w].assign(N * N, 0.0);
                acc2[w].assign(N * N, 0.0);
                CollisionTable sub;  // view over a sub-range without copying entries
                for (std::size_t idx = b; idx < e; ++idx)
                    apply_entry(entries[idx], fpad.data(), gpad.data(), acc1[w].data(),
                                acc2[w].data(), N);
            });
            double* o = out.slice(0);
            for (int i = 0; i < N * N; ++i) o[i] = 0.0;
            for (std::size_t w = 0; w < nw; ++w) {
                if (acc1[w].empty()) continue;
                for (int i = 0; i < N * N; ++i) o[i] += acc1[w][i] + acc2[w][i];
            }
            if (table_.diag_coeff != 0.0) {
                const double* fs = f.slice(0);
                const double* gs = g.slice(0);
                for (int i = 0; i < N * N; ++i) o[i] += table_.diag_coeff * fs[i] * gs[i];
            }
        }
        return out;
    }

    /// Loss rate nu_g(x,v) = int int b(v-v*,sigma) g(v*) dsigma dv*, so that
    /// Q_b^-(f,g) = f * nu_g. For the constant kernel nu_g = rho_g(x).
    DistributionField loss_rate(const DistributionField& g) const {
        DistributionField nu(g.grid, g.homogeneous, g.time);
        const int N = static_cast<int>(g.grid.Nv);
        const double w = g.grid.dv * g.grid.dv;
        if (table_.kernel.is_constant()) {
            auto rho = spatial_density(g);
            for (std::size_t s = 0; s < g.slice_count(); ++s) {
                double* o = nu.slice(s);
                for (int i = 0; i < N * N; ++i) o[i] = rho[s];
            }
            return nu;
        }
        const auto& B = table_.loss_angular_mass();
        const int W = 2 * N - 1;
        parallel_for_blocks(g.slice_count(), threads_, [&](std::size_t b, std::size_t e, std::size_t) {
            for (std::size_t s = b; s < e; ++s) {
                const double* gs = g.slice(s);
                double* o = nu.slice(s);
                for (int a = 0; a < N; ++a)
                    for (int c = 0; c < N; ++c) {
                        double acc = 0.0;
                        for (int a2 = 0; a2 < N; ++a2) {
                            const double* Brow = &B[(a - a2 + N - 1) * W + (N - 1)];
                            const double* grow = gs + a2 * N;
                            double r = 0.0;
                            for (int c2 = 0; c2 < N; ++c2) r += Brow[c - c2] * grow[c2];
                            acc += r;
                        }
                        o[a * N + c] = acc * w;
                    }
            }
        });
        return nu;
    }

    DistributionField loss(const DistributionField& f, const DistributionField& g) const {
        check_fields(f, g);
        DistributionField nu = loss_rate(g);
        DistributionField out(f.grid, f.homogeneous, f.time);
        for (std::size_t i = 0; i < f.data.size(); ++i) out.data[i] = f.data[i] * nu.data[i];
        return out;
    }

private:
    static void pad(const double* s, double* p, int N) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) p[(i + 1) * (N + 2) + (j + 1)] = s[i * N + j];
    }

    static void apply_entry(const CollisionTable::Entry& e, const double* __restrict fpad,
                            const double* __restrict gpad, double* __restrict acc1,
                            double* __restrict acc2, int N) {
        const int P = N + 2;
        const double c = e.coeff;
        const double wp0 = e.wp[0], wp1 = e.wp[1], wp2 = e.wp[2], wp3 = e.wp[3];
        const double wm0 = e.wm[0], wm1 = e.wm[1], wm2 = e.wm[2], wm3 = e.wm[3];
        const int len = e.jhi - e.jlo;
        for (int i = e.ilo; i < e.ihi; ++i) {
            const double* __restrict fr0 = fpad + (i + e.bp1 + 1) * P + (e.jlo + e.bp2 + 1);
            const double* __restrict fr1 = fr0 + P;
            const double* __restrict gr0 = gpad + (i + e.bm1 + 1) * P + (e.jlo + e.bm2 + 1);
            const double* __restrict gr1 = gr0 + P;
            double* __restrict a1 = acc1 + i * N + e.jlo;
            double* __restrict a2 = acc2 + (i - e.d1) * N + (e.jlo - e.d2);
            for (int j = 0; j < len; ++j) {
                const double F = wp0 * fr0[j] + wp1 * fr0[j + 1] + wp2 * fr1[j] + wp3 * fr1[j + 1];
                const double G = wm0 * gr0[j] + wm1 * gr0[j + 1] + wm2 * gr1[j] + wm3 * gr1[j + 1];
                const double p = c * F * G;
                a1[j] += p;
                a2[j] += p;
            }
        }
    }

    static void check_fields(const DistributionField& f, const DistributionField& g) {
        if (!f.compatible(g)) throw std::invalid_argument("collision: grid mismatch");
        if (f.time != g.time) throw std::invalid_argument("collision: time tag mismatch");
    }

    CollisionTable table_;
    std::size_t threads_ = 1;
};

/// One-shot conveniences (table built per call; prefer CollisionOperator in loops).
inline DistributionField q_gain(const DistributionField& f, const DistributionField& g,
                                const CollisionKernel& k, std::size_t threads = 0) {
    return CollisionOperator(f.grid, k, threads).gain(f, g);
}

inline DistributionField q_loss(const DistributionField& f, const DistributionField& g,
                                const CollisionKernel& k, std::size_t threads = 0) {
    return CollisionOperator(f.grid, k, threads).loss(f, g);
}

}  // namespace bltz
