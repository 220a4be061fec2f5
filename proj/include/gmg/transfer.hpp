#pragma once

#include "gmg/backend.hpp"
#include "gmg/grid.hpp"
#include "gmg/kernels.hpp"

namespace gmg {

namespace detail {

template <int D>
void check_adjacent(const LevelGrid<D>& fine, const LevelGrid<D>& coarse, const char* what) {
    if (coarse.cells * 2 != fine.cells || coarse.level != fine.level + 1)
        throw std::invalid_argument(std::string("levels not adjacent in ") + what);
}

} // namespace detail

/// Restricts a fine residual to the coarse right-hand side.
///
/// 2D weights at fine offsets from the coarse-point image (2i,2j):
/// center 2, the four axis neighbors 1, and the skew diagonal pair
/// (-1,-1)/(+1,+1) 1 each, normalized by 8 (weights sum to one).
/// The 3D stencil is the scaled transpose of the prolongation below:
/// center 2, six axis neighbors, six same-sign double-offset neighbors and
/// the body-diagonal pair (+-1,+-1,+-1) all 1, normalized by 16. That keeps
/// the 2D skew symmetry and costs 16 flops per coarse point.
///
/// rhs_scale multiplies the restricted value; the scaled operator (diagonal
/// 2*D with h^2 folded into f) needs scale 4 for the coarse problem to see
/// the residual in its own h^2 units.
template <int D>
void restrict_residual(Exec ex, const GridField<D>& r_fine, GridField<D>& f_coarse,
                       double rhs_scale) {
    detail::check_adjacent(r_fine.grid, f_coarse.grid, "restrict_residual");
    require_resident(r_fine, *ex.engine, "restriction input");
    claim_output(f_coarse, *ex.engine, ex.transfers);

    const int nc = f_coarse.grid.cells;
    const index_t npc = f_coarse.grid.points();
    const index_t npf = r_fine.grid.points();
    const double* rb = r_fine.data();
    double* fb = f_coarse.data();
    if (ex.counters) {
        ex.counters->flops.restriction +=
            static_cast<double>((D == 2 ? 8 : 16) * f_coarse.grid.interior_points());
        ++ex.counters->launches.restriction;
    }

    if constexpr (D == 2) {
        const double w = rhs_scale / 8.0;
        detail::timed_run(ex, nc - 1, [=](index_t t) {
            const int jc = 1 + static_cast<int>(t);
            const double* rc = rb + static_cast<index_t>(2 * jc) * npf;
            const double* rm = rc - npf;
            const double* rp = rc + npf;
            double* fc = fb + static_cast<index_t>(jc) * npc;
            for (int ic = 1; ic < nc; ++ic) {
                const int fi = 2 * ic;
                fc[ic] = w * (2.0 * rc[fi] + rc[fi - 1] + rc[fi + 1] + rm[fi] + rp[fi] +
                              rm[fi - 1] + rp[fi + 1]);
            }
        });
    } else {
        const double w = rhs_scale / 16.0;
        detail::timed_run(ex, static_cast<index_t>(nc - 1) * (nc - 1), [=](index_t t) {
            const int jc = 1 + static_cast<int>(t % (nc - 1));
            const int kc = 1 + static_cast<int>(t / (nc - 1));
            const index_t c = (static_cast<index_t>(2 * kc) * npf + 2 * jc) * npf;
            const double* r0 = rb + c;            // (.., 2j,   2k)
            const double* rjm = r0 - npf;         // (.., 2j-1, 2k)
            const double* rjp = r0 + npf;         // (.., 2j+1, 2k)
            const double* rkm = r0 - npf * npf;   // (.., 2j,   2k-1)
            const double* rkp = r0 + npf * npf;   // (.., 2j,   2k+1)
            const double* rjmkm = rkm - npf;      // (.., 2j-1, 2k-1)
            const double* rjpkp = rkp + npf;      // (.., 2j+1, 2k+1)
            double* fc = fb + (static_cast<index_t>(kc) * npc + jc) * npc;
            for (int ic = 1; ic < nc; ++ic) {
                const int fi = 2 * ic;
                const double faces = r0[fi - 1] + r0[fi + 1] + rjm[fi] + rjp[fi] + rkm[fi] +
                                     rkp[fi];
                const double edges = rjm[fi - 1] + rjp[fi + 1] + rkm[fi - 1] + rkp[fi + 1] +
                                     rjmkm[fi] + rjpkp[fi];
                const double body = rjmkm[fi - 1] + rjpkp[fi + 1];
                fc[ic] = w * (2.0 * r0[fi] + faces + edges + body);
            }
        });
    }
}

namespace detail {

// Prolongation is formulated as a gather over coarse parents so each fine
// point is written exactly once: fine points with even coordinates copy
// their coarse image, points odd in some axes average the two coarse
// parents across the same-sign diagonal of those axes. Reads of the coarse
// boundary ring contribute zero.
template <int D, bool Add>
void prolong_impl(Exec ex, GridField<D>& u_fine, const GridField<D>& e_coarse) {
    check_adjacent(u_fine.grid, e_coarse.grid, Add ? "prolong_add" : "fmg_prolong");
    require_resident(e_coarse, *ex.engine, "prolongation input");
    if constexpr (Add) {
        require_resident(u_fine, *ex.engine, "prolongation target");
    } else {
        claim_output(u_fine, *ex.engine, ex.transfers);
    }

    const int nf = u_fine.grid.cells;
    const index_t npf = u_fine.grid.points();
    const index_t npc = e_coarse.grid.points();
    double* ub = u_fine.data();
    const double* eb = e_coarse.data();
    if (ex.counters) {
        ex.counters->flops.prolongation +=
            (D == 2 ? 2.5 : 23.0 / 8.0) *
            static_cast<double>(u_fine.grid.interior_points());
        ++ex.counters->launches.prolongation;
    }

    auto put = [](double* dst, int i, double val) {
        if constexpr (Add) dst[i] += val;
        else dst[i] = val;
    };

    if constexpr (D == 2) {
        detail::timed_run(ex, nf - 1, [=](index_t t) {
            const int jf = 1 + static_cast<int>(t);
            const int jc = jf / 2;
            double* uf = ub + static_cast<index_t>(jf) * npf;
            const double* e0 = eb + static_cast<index_t>(jc) * npc;
            const double* e1 = e0 + npc;  // row jc+1
            if ((jf & 1) == 0) {
                for (int i = 2; i < nf; i += 2) put(uf, i, e0[i / 2]);
                for (int i = 1; i < nf; i += 2) put(uf, i, 0.5 * (e0[i / 2] + e0[i / 2 + 1]));
            } else {
                for (int i = 2; i < nf; i += 2) put(uf, i, 0.5 * (e0[i / 2] + e1[i / 2]));
                for (int i = 1; i < nf; i += 2)
                    put(uf, i, 0.5 * (e0[i / 2] + e1[i / 2 + 1]));
            }
        });
    } else {
        detail::timed_run(ex, static_cast<index_t>(nf - 1) * (nf - 1), [=](index_t t) {
            const int jf = 1 + static_cast<int>(t % (nf - 1));
            const int kf = 1 + static_cast<int>(t / (nf - 1));
            const int jc = jf / 2;
            const int kc = kf / 2;
            const bool oj = (jf & 1) != 0;
            const bool ok = (kf & 1) != 0;
            double* uf = ub + (static_cast<index_t>(kf) * npf + jf) * npf;
            const double* e00 = eb + (static_cast<index_t>(kc) * npc + jc) * npc;
            // second parent row: advance along each axis the point is odd in
            const double* epp = e00 + (oj ? npc : 0) + (ok ? npc * npc : 0);
            if (!oj && !ok) {
                for (int i = 2; i < nf; i += 2) put(uf, i, e00[i / 2]);
                for (int i = 1; i < nf; i += 2)
                    put(uf, i, 0.5 * (e00[i / 2] + e00[i / 2 + 1]));
            } else {
                for (int i = 2; i < nf; i += 2) put(uf, i, 0.5 * (e00[i / 2] + epp[i / 2]));
                for (int i = 1; i < nf; i += 2)
                    put(uf, i, 0.5 * (e00[i / 2] + epp[i / 2 + 1]));
            }
        });
    }
}

} // namespace detail

/// Adds the interpolated coarse correction into the fine unknown.
template <int D>
void prolong_add(Exec ex, GridField<D>& u_fine, const GridField<D>& e_coarse) {
    detail::prolong_impl<D, true>(ex, u_fine, e_coarse);
}

/// Same stencil as prolong_add but overwriting; used by the nested
/// iteration to seed each finer level.
template <int D>
void fmg_prolong(Exec ex, GridField<D>& u_fine, const GridField<D>& u_coarse) {
    detail::prolong_impl<D, false>(ex, u_fine, u_coarse);
}

} // namespace gmg
