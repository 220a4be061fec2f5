#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

#include "gmg/backend.hpp"
#include "gmg/grid.hpp"

namespace gmg {

/// Floating-point operation counters, in work units per the operation
/// definitions: 6/8 per point for the residual (2D/3D), 5/7 per point and
/// sweep for smoothing, 8/16 per coarse point for restriction, 2.5 and 23/8
/// per fine point for prolongation, 2 per point for norms. Fractional
/// per-point costs make some increments multiples of 1/8, so the counters
/// are doubles; every increment is exactly representable and the counters
/// stay exact far beyond any solve in range.
struct KernelFlops {
    double residual = 0;
    double smooth = 0;
    double restriction = 0;
    double prolongation = 0;
    double norm = 0;

    double total() const { return residual + smooth + restriction + prolongation + norm; }

    KernelFlops operator-(const KernelFlops& o) const {
        return {residual - o.residual, smooth - o.smooth, restriction - o.restriction,
                prolongation - o.prolongation, norm - o.norm};
    }
};

/// One entry per kernel launch; a colored sweep launches once per color.
struct LaunchCounts {
    std::uint64_t residual = 0;
    std::uint64_t smooth = 0;
    std::uint64_t restriction = 0;
    std::uint64_t prolongation = 0;
    std::uint64_t norm = 0;
    std::uint64_t setup = 0;

    std::uint64_t total() const {
        return residual + smooth + restriction + prolongation + norm + setup;
    }
};

struct Counters {
    KernelFlops flops;
    LaunchCounts launches;
    double compute_seconds = 0;
};

/// Execution context handed to every kernel: the engine that runs it plus
/// the counters the launch is accounted against.
struct Exec {
    Engine* engine = nullptr;
    Counters* counters = nullptr;
    TransferStats* transfers = nullptr;
};

enum class Direction { forward, backward };

namespace detail {

template <class Fn>
void timed_run(Exec ex, index_t tasks, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    ex.engine->run(tasks, fn);
    if (ex.counters)
        ex.counters->compute_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Interior points of [1, n-1] with the given coordinate parity; n is even.
inline index_t parity_count(int n, int parity) { return parity ? n / 2 : n / 2 - 1; }

inline int parity_first(int parity) { return parity ? 1 : 2; }

template <int D>
index_t color_set_size(const LevelGrid<D>& g, int color, Coloring scheme) {
    const int n = g.cells;
    if (scheme == Coloring::multicolor) {
        index_t s = parity_count(n, color & 1) * parity_count(n, (color >> 1) & 1);
        if constexpr (D == 3) s *= parity_count(n, (color >> 2) & 1);
        return s;
    }
    // checkerboard: count per line of the matching i-parity
    index_t s = 0;
    if constexpr (D == 2) {
        for (int j = 1; j < n; ++j) s += parity_count(n, (color + j) & 1);
    } else {
        for (int k = 1; k < n; ++k)
            for (int j = 1; j < n; ++j) s += parity_count(n, (color + j + k) & 1);
    }
    return s;
}

} // namespace detail

/// Zero-fills a whole field (interior and ring). Pure overwrite, so the
/// engine claims residency without moving data.
template <int D>
void fill_zero(Exec ex, GridField<D>& field) {
    claim_output(field, *ex.engine, ex.transfers);
    const index_t np = field.grid.points();
    const index_t lines = D == 2 ? np : np * np;
    double* base = field.data();
    if (ex.counters) ++ex.counters->launches.setup;
    detail::timed_run(ex, lines, [base, np](index_t t) {
        double* row = base + t * np;
        for (index_t i = 0; i < np; ++i) row[i] = 0.0;
    });
}

/// Sets the interior to scale*fn(x) with x the physical point coordinates;
/// the boundary ring is left untouched (it must already be zero).
template <int D, class PointFn>
void sample_interior(Exec ex, GridField<D>& field, double scale, PointFn&& fn) {
    claim_output(field, *ex.engine, ex.transfers);
    const int n = field.grid.cells;
    const double h = field.grid.spacing;
    const index_t np = field.grid.points();
    double* base = field.data();
    if (ex.counters) ++ex.counters->launches.setup;
    if constexpr (D == 2) {
        detail::timed_run(ex, n - 1, [=](index_t t) {
            const int j = 1 + static_cast<int>(t);
            double* row = base + j * np;
            for (int i = 1; i < n; ++i)
                row[i] = scale * fn(std::array<double, 2>{i * h, j * h});
        });
    } else {
        detail::timed_run(ex, static_cast<index_t>(n - 1) * (n - 1), [=](index_t t) {
            const int j = 1 + static_cast<int>(t % (n - 1));
            const int k = 1 + static_cast<int>(t / (n - 1));
            double* row = base + (k * np + j) * np;
            for (int i = 1; i < n; ++i)
                row[i] = scale * fn(std::array<double, 3>{i * h, j * h, k * h});
        });
    }
}

namespace detail {

template <int D>
void check_same_level(const GridField<D>& a, const GridField<D>& b, const char* what) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument(std::string("level mismatch in ") + what);
}

} // namespace detail

/// Matrix-free residual of the scaled system: r = f - A u with A the
/// central-difference operator of diagonal 2*D and unit off-diagonals.
template <int D>
void residual(Exec ex, const GridField<D>& u, const GridField<D>& f, GridField<D>& r) {
    detail::check_same_level(u, f, "residual");
    detail::check_same_level(u, r, "residual");
    require_resident(u, *ex.engine, "residual input u");
    require_resident(f, *ex.engine, "residual input f");
    claim_output(r, *ex.engine, ex.transfers);

    const int n = u.grid.cells;
    const index_t np = u.grid.points();
    const double* ub = u.data();
    const double* fb = f.data();
    double* rb = r.data();
    if (ex.counters) {
        ex.counters->flops.residual +=
            static_cast<double>((D == 2 ? 6 : 8) * u.grid.interior_points());
        ++ex.counters->launches.residual;
    }
    if constexpr (D == 2) {
        detail::timed_run(ex, n - 1, [=](index_t t) {
            const index_t j = 1 + t;
            const double* uc = ub + j * np;
            const double* un = uc - np;
            const double* up = uc + np;
            const double* fc = fb + j * np;
            double* rc = rb + j * np;
            for (int i = 1; i < n; ++i)
                rc[i] = fc[i] - 4.0 * uc[i] + uc[i - 1] + uc[i + 1] + un[i] + up[i];
        });
    } else {
        detail::timed_run(ex, static_cast<index_t>(n - 1) * (n - 1), [=](index_t t) {
            const index_t j = 1 + t % (n - 1);
            const index_t k = 1 + t / (n - 1);
            const index_t c = (k * np + j) * np;
            const double* uc = ub + c;
            double* rc = rb + c;
            const double* fc = fb + c;
            const double* ujm = uc - np;
            const double* ujp = uc + np;
            const double* ukm = uc - np * np;
            const double* ukp = uc + np * np;
            for (int i = 1; i < n; ++i)
                rc[i] = fc[i] - 6.0 * uc[i] + uc[i - 1] + uc[i + 1] + ujm[i] + ujp[i] +
                        ukm[i] + ukp[i];
        });
    }
}

/// One Gauss-Seidel update of every point of the given color:
/// u = (f + sum of axis neighbors) / (2*D). Points of other colors are
/// untouched; within the color all updates are independent.
template <int D>
void gs_color_sweep(Exec ex, GridField<D>& u, const GridField<D>& f, int color,
                    Coloring scheme = Coloring::multicolor) {
    detail::check_same_level(u, f, "gs_color_sweep");
    if (color < 0 || color >= color_count<D>(scheme))
        throw std::invalid_argument("color " + std::to_string(color) + " out of range");
    require_resident(u, *ex.engine, "smoother unknown u");
    require_resident(f, *ex.engine, "smoother rhs f");

    const int n = u.grid.cells;
    const index_t np = u.grid.points();
    double* ub = u.data();
    const double* fb = f.data();
    const double inv_diag = D == 2 ? 0.25 : 1.0 / 6.0;
    if (ex.counters) {
        ex.counters->flops.smooth +=
            static_cast<double>((D == 2 ? 5 : 7)) *
            static_cast<double>(detail::color_set_size(u.grid, color, scheme));
        ++ex.counters->launches.smooth;
    }

    if constexpr (D == 2) {
        const bool multi = scheme == Coloring::multicolor;
        const int pj = multi ? (color >> 1) & 1 : -1;
        const index_t rows = multi ? detail::parity_count(n, pj) : n - 1;
        detail::timed_run(ex, rows, [=](index_t t) {
            const int j = multi ? detail::parity_first(pj) + 2 * static_cast<int>(t)
                                : 1 + static_cast<int>(t);
            const int pi = multi ? (color & 1) : (color + j) & 1;
            double* uc = ub + j * np;
            const double* un = uc - np;
            const double* up = uc + np;
            const double* fc = fb + j * np;
            for (int i = detail::parity_first(pi); i < n; i += 2)
                uc[i] = inv_diag * (fc[i] + uc[i - 1] + uc[i + 1] + un[i] + up[i]);
        });
    } else {
        const bool multi = scheme == Coloring::multicolor;
        const int pj = multi ? (color >> 1) & 1 : -1;
        const int pk = multi ? (color >> 2) & 1 : -1;
        const index_t nj = multi ? detail::parity_count(n, pj) : n - 1;
        const index_t nk = multi ? detail::parity_count(n, pk) : n - 1;
        detail::timed_run(ex, nj * nk, [=](index_t t) {
            const int j = multi ? detail::parity_first(pj) + 2 * static_cast<int>(t % nj)
                                : 1 + static_cast<int>(t % nj);
            const int k = multi ? detail::parity_first(pk) + 2 * static_cast<int>(t / nj)
                                : 1 + static_cast<int>(t / nj);
            const int pi = multi ? (color & 1) : (color + j + k) & 1;
            const index_t c = (static_cast<index_t>(k) * np + j) * np;
            double* uc = ub + c;
            const double* fc = fb + c;
            const double* ujm = uc - np;
            const double* ujp = uc + np;
            const double* ukm = uc - np * np;
            const double* ukp = uc + np * np;
            for (int i = detail::parity_first(pi); i < n; i += 2)
                uc[i] = inv_diag *
                        (fc[i] + uc[i - 1] + uc[i + 1] + ujm[i] + ujp[i] + ukm[i] + ukp[i]);
        });
    }
}

/// Full colored Gauss-Seidel relaxation: `sweeps` passes over all colors,
/// ascending color code when forward and descending when backward.
template <int D>
void relax(Exec ex, Direction dir, int sweeps, GridField<D>& u, const GridField<D>& f,
           Coloring scheme = Coloring::multicolor) {
    const int colors = color_count<D>(scheme);
    for (int s = 0; s < sweeps; ++s) {
        if (dir == Direction::forward) {
            for (int c = 0; c < colors; ++c) gs_color_sweep(ex, u, f, c, scheme);
        } else {
            for (int c = colors - 1; c >= 0; --c) gs_color_sweep(ex, u, f, c, scheme);
        }
    }
}

/// Damped Jacobi sweep computed from a snapshot of u (true Jacobi):
/// u_new = (1-w)*u_old + w*(f + neighbor sum)/(2*D).
template <int D>
void weighted_jacobi_sweep(Exec ex, GridField<D>& u, const GridField<D>& f, double weight,
                           GridField<D>& snapshot) {
    detail::check_same_level(u, f, "weighted_jacobi_sweep");
    detail::check_same_level(u, snapshot, "weighted_jacobi_sweep");
    if (!(weight > 0.0 && weight <= 1.0))
        throw std::invalid_argument("jacobi weight must lie in (0, 1]");
    require_resident(u, *ex.engine, "smoother unknown u");
    require_resident(f, *ex.engine, "smoother rhs f");
    claim_output(snapshot, *ex.engine, ex.transfers);

    const int n = u.grid.cells;
    const index_t np = u.grid.points();
    double* ub = u.data();
    const double* fb = f.data();
    double* sb = snapshot.data();
    const double inv_diag = D == 2 ? 0.25 : 1.0 / 6.0;
    const double keep = 1.0 - weight;
    if (ex.counters) {
        ex.counters->flops.smooth +=
            static_cast<double>((D == 2 ? 5 : 7) * u.grid.interior_points());
        ++ex.counters->launches.smooth;
    }

    const index_t lines = D == 2 ? np : np * np;
    detail::timed_run(ex, lines, [=](index_t t) {
        double* dst = sb + t * np;
        const double* src = ub + t * np;
        for (index_t i = 0; i < np; ++i) dst[i] = src[i];
    });

    if constexpr (D == 2) {
        detail::timed_run(ex, n - 1, [=](index_t t) {
            const index_t j = 1 + t;
            double* uc = ub + j * np;
            const double* sc = sb + j * np;
            const double* sn = sc - np;
            const double* sp = sc + np;
            const double* fc = fb + j * np;
            for (int i = 1; i < n; ++i)
                uc[i] = keep * sc[i] +
                        weight * inv_diag * (fc[i] + sc[i - 1] + sc[i + 1] + sn[i] + sp[i]);
        });
    } else {
        detail::timed_run(ex, static_cast<index_t>(n - 1) * (n - 1), [=](index_t t) {
            const index_t j = 1 + t % (n - 1);
            const index_t k = 1 + t / (n - 1);
            const index_t c = (k * np + j) * np;
            double* uc = ub + c;
            const double* sc = sb + c;
            const double* fc = fb + c;
            const double* sjm = sc - np;
            const double* sjp = sc + np;
            const double* skm = sc - np * np;
            const double* skp = sc + np * np;
            for (int i = 1; i < n; ++i)
                uc[i] = keep * sc[i] + weight * inv_diag *
                                           (fc[i] + sc[i - 1] + sc[i + 1] + sjm[i] + sjp[i] +
                                            skm[i] + skp[i]);
        });
    }
}

/// Euclidean norm over the interior: sqrt(sum v^2), accumulated per line and
/// combined through the fixed reduction tree, so the result is bitwise
/// reproducible for any worker count.
template <int D>
double euclidean_norm(Exec ex, const GridField<D>& field) {
    require_resident(field, *ex.engine, "norm input");
    const int n = field.grid.cells;
    const index_t np = field.grid.points();
    const double* base = field.data();
    if (ex.counters) {
        ex.counters->flops.norm += static_cast<double>(2 * field.grid.interior_points());
        ++ex.counters->launches.norm;
    }
    const index_t leaves = D == 2 ? n - 1 : static_cast<index_t>(n - 1) * (n - 1);
    const auto t0 = std::chrono::steady_clock::now();
    const double total = ex.engine->tree_sum(leaves, [=](index_t t) {
        index_t line;
        if constexpr (D == 2) {
            line = (1 + t) * np;
        } else {
            const index_t j = 1 + t % (n - 1);
            const index_t k = 1 + t / (n - 1);
            line = (k * np + j) * np;
        }
        const double* row = base + line;
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += row[i] * row[i];
        return s;
    });
    if (ex.counters)
        ex.counters->compute_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::sqrt(total);
}

/// Scaled discrete L2 distance between a grid function and a point-sampled
/// exact solution: sqrt(h^D * sum over interior (u_h - u)^2).
template <int D, class PointFn>
double discrete_l2_error(const GridField<D>& uh, PointFn&& exact) {
    const int n = uh.grid.cells;
    const double h = uh.grid.spacing;
    const index_t np = uh.grid.points();
    const double* base = uh.data();
    const index_t lines = D == 2 ? n - 1 : static_cast<index_t>(n - 1) * (n - 1);
    std::vector<double> line_sums(static_cast<std::size_t>(lines));
    for (index_t t = 0; t < lines; ++t) {
        int j, k = 0;
        const double* row;
        if constexpr (D == 2) {
            j = 1 + static_cast<int>(t);
            row = base + static_cast<index_t>(j) * np;
        } else {
            j = 1 + static_cast<int>(t % (n - 1));
            k = 1 + static_cast<int>(t / (n - 1));
            row = base + (static_cast<index_t>(k) * np + j) * np;
        }
        double s = 0.0;
        for (int i = 1; i < n; ++i) {
            double e;
            if constexpr (D == 2) e = row[i] - exact(std::array<double, 2>{i * h, j * h});
            else e = row[i] - exact(std::array<double, 3>{i * h, j * h, k * h});
            s += e * e;
        }
        line_sums[static_cast<std::size_t>(t)] = s;
    }
    const double sum = pairwise_sum(line_sums.data(), lines);
    return std::sqrt(std::pow(h, D) * sum);
}

} // namespace gmg
