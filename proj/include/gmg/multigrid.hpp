#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <utility>

#include "gmg/backend.hpp"
#include "gmg/grid.hpp"
#include "gmg/kernels.hpp"
#include "gmg/transfer.hpp"

namespace gmg {

enum class SmootherKind { gs_multicolor, gs_two_color, weighted_jacobi };

struct Smoother {
    SmootherKind kind = SmootherKind::gs_multicolor;
    double weight = 1.0;  // damped-Jacobi weight, unused for Gauss-Seidel

    std::string name(int dim) const {
        switch (kind) {
            case SmootherKind::gs_multicolor: return dim == 2 ? "gs4" : "gs8";
            case SmootherKind::gs_two_color: return "gs2";
            default: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "wj:%g", weight);
                return buf;
            }
        }
    }
};

enum class CycleKind { vcycle, fmg };

struct SolveConfig {
    int depth = 1;       // L: number of levels, finest grid has 2^L cells per axis
    int partition = 0;   // L_theta: levels < partition run on the device engine
    double tol = 1e-6;   // relative residual tolerance
    int maxit = 100;
    int mu_f = 1;        // pre-smoothing sweeps
    int mu_b = 1;        // post-smoothing sweeps
    Smoother smoother{};
    CycleKind cycle = CycleKind::vcycle;
    int nu1 = 1, nu2 = 1;   // FMG pre/post sweeps
    double rhs_scale = 4.0; // restriction scaling, 1 or 4
    int workers = 1;        // device-engine worker count

    void validate() const {
        if (depth < 1) throw std::invalid_argument("depth must be >= 1");
        if (partition < 0 || partition > depth)
            throw std::invalid_argument("partition must lie in [0, depth]");
        if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
        if (maxit < 1) throw std::invalid_argument("maxit must be >= 1");
        if (mu_f < 0 || mu_b < 0 || mu_f + mu_b == 0)
            throw std::invalid_argument("sweep counts must be >= 0 and not both zero");
        if (cycle == CycleKind::fmg && (nu1 < 0 || nu2 < 0 || nu1 + nu2 == 0))
            throw std::invalid_argument("FMG sweep counts must be >= 0 and not both zero");
        if (smoother.kind == SmootherKind::weighted_jacobi &&
            !(smoother.weight > 0.0 && smoother.weight <= 1.0))
            throw std::invalid_argument("jacobi weight must lie in (0, 1]");
        if (!(rhs_scale == 1.0 || rhs_scale == 4.0))
            throw std::invalid_argument("rhs_scale must be 1 or 4");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    }
};

struct SolveStats {
    int dim = 0;
    int depth = 0;
    int partition = 0;
    index_t finest_unknowns = 0;  // (n0-1)^dim
    index_t finest_points = 0;    // (n0+1)^dim

    int iterations = 0;
    bool converged = true;
    std::vector<double> residual_history;  // resinit first, one entry per cycle after

    KernelFlops flops;        // whole solve
    KernelFlops cycle_flops;  // one outer iteration (cycle plus convergence check)
    LaunchCounts launches;
    std::uint64_t transfer_bytes = 0;
    int copies = 0;
    int noop_copies = 0;
    int residency_claims = 0;

    std::uint64_t memory_values = 0;  // field values allocated by the hierarchy
    double compute_seconds = 0;
    double comm_seconds = 0;
    double final_error = std::nan("");  // vs the analytic solution, set by the caller

    double total_seconds() const { return compute_seconds + comm_seconds; }
    double mem_per_dof() const {
        return finest_points ? static_cast<double>(memory_values) /
                                   static_cast<double>(finest_points)
                             : 0.0;
    }
};

template <int D>
struct SolveResult {
    GridField<D> u;
    SolveStats stats;
};

namespace detail {

/// Routes each level to its engine: levels below the partition level belong
/// to the device space, the rest to the host space.
struct EngineRouter {
    Exec device;
    Exec host;
    int partition = 0;

    Exec at(int level) const { return level < partition ? device : host; }
};

template <int D>
struct SmootherWorkspace {
    std::vector<GridField<D>> snapshots;  // per level, only for damped Jacobi

    void prepare(const Hierarchy<D>& h, const Smoother& s) {
        if (s.kind != SmootherKind::weighted_jacobi) return;
        snapshots.clear();
        snapshots.reserve(h.levels.size());
        for (const auto& g : h.levels) snapshots.emplace_back(g);
    }
};

template <int D>
void smooth(Exec ex, Direction dir, int sweeps, Hierarchy<D>& h, int level, const Smoother& s,
            SmootherWorkspace<D>& ws) {
    switch (s.kind) {
        case SmootherKind::gs_multicolor:
            relax(ex, dir, sweeps, h.u[level], h.f[level], Coloring::multicolor);
            break;
        case SmootherKind::gs_two_color:
            relax(ex, dir, sweeps, h.u[level], h.f[level], Coloring::two_color);
            break;
        case SmootherKind::weighted_jacobi:
            for (int i = 0; i < sweeps; ++i)
                weighted_jacobi_sweep(ex, h.u[level], h.f[level], s.weight,
                                      ws.snapshots[level]);
            break;
    }
}

/// One V-cycle over levels top..L-1. Levels below the partition run on the
/// device engine and the boundary-level rhs/solution are copied across the
/// memory-space boundary exactly once each on the way down and up. Coarse
/// unknowns are zeroed before descending: the coarse problems are
/// correction equations.
template <int D>
void vcycle(Hierarchy<D>& h, const EngineRouter& router, int top, int mu_f, int mu_b,
            const Smoother& s, double rhs_scale, SmootherWorkspace<D>& ws,
            TransferStats& ts) {
    const int L = h.depth;
    for (int l = top; l <= L - 2; ++l) {
        const Exec ex = router.at(l);
        smooth(ex, Direction::forward, mu_f, h, l, s, ws);
        residual(ex, h.u[l], h.f[l], h.r[l]);
        restrict_residual(ex, h.r[l], h.f[l + 1], rhs_scale);
        fill_zero(router.at(l + 1), h.u[l + 1]);
        if (l + 1 == router.partition) copy_across(h.f[l + 1], Space::host, ts);
    }
    smooth(router.at(L - 1), Direction::forward, mu_f, h, L - 1, s, ws);
    for (int l = L - 2; l >= top; --l) {
        if (l + 1 == router.partition) copy_across(h.u[l + 1], Space::device, ts);
        const Exec ex = router.at(l);
        prolong_add(ex, h.u[l], h.u[l + 1]);
        smooth(ex, Direction::backward, mu_b, h, l, s, ws);
    }
}

struct EngineSet {
    SerialEngine host_engine{Space::host};
    std::unique_ptr<PoolEngine> device_engine;
    Counters counters;
    TransferStats transfers;

    explicit EngineSet(int workers)
        : device_engine(std::make_unique<PoolEngine>(Space::device, workers)) {}

    EngineRouter router(int partition) {
        return EngineRouter{Exec{device_engine.get(), &counters, &transfers},
                            Exec{&host_engine, &counters, &transfers}, partition};
    }
};

template <int D>
void fill_stats(SolveStats& st, const Hierarchy<D>& h, const EngineSet& es) {
    st.dim = D;
    st.depth = h.depth;
    st.partition = h.partition;
    st.finest_unknowns = h.finest().interior_points();
    st.finest_points = h.finest().total_points();
    st.flops = es.counters.flops;
    st.launches = es.counters.launches;
    st.transfer_bytes = es.transfers.bytes;
    st.copies = es.transfers.copies;
    st.noop_copies = es.transfers.noop_copies;
    st.residency_claims = es.transfers.claims;
    st.compute_seconds = es.counters.compute_seconds;
    st.comm_seconds = es.transfers.seconds;
    std::uint64_t values = 0;
    for (const auto& fld : h.u) values += fld.v.size();
    for (const auto& fld : h.f) values += fld.v.size();
    for (const auto& fld : h.r) values += fld.v.size();
    st.memory_values = values;
}

} // namespace detail

/// Tolerance-driven solve: V-cycles until the Euclidean residual norm drops
/// below tol times its initial value, or maxit is reached. f0 must hold the
/// finest-level right-hand side already scaled by h^2. On failure to reach
/// the tolerance the best iterate is still returned, flagged in the stats.
template <int D>
SolveResult<D> gmg_solve(const SolveConfig& cfg, const GridField<D>& f0) {
    cfg.validate();
    Hierarchy<D> h = build_hierarchy<D>(cfg.depth, cfg.partition);
    if (!(f0.grid == h.levels[0]))
        throw std::invalid_argument("rhs field does not match the finest level");

    detail::EngineSet es(cfg.workers);
    detail::EngineRouter router = es.router(cfg.partition);
    detail::SmootherWorkspace<D> ws;
    ws.prepare(h, cfg.smoother);

    const Exec ex0 = router.at(0);
    // adopt the rhs values in place; this is problem setup, not boundary traffic
    h.f[0].v = f0.v;
    claim_output(h.f[0], *ex0.engine, nullptr);

    // a single-level hierarchy stores no residual field; the convergence
    // check then uses driver-local scratch
    GridField<D> check_scratch;
    if (h.r.empty()) check_scratch = GridField<D>(h.levels[0], ex0.engine->space());
    GridField<D>& r0 = h.r.empty() ? check_scratch : h.r[0];

    SolveStats st;
    residual(ex0, h.u[0], h.f[0], r0);
    const double resinit = euclidean_norm(ex0, r0);
    st.residual_history.push_back(resinit);

    const KernelFlops after_init = es.counters.flops;
    double res = resinit;
    int iter = 0;
    while (res > cfg.tol * resinit && iter < cfg.maxit) {
        detail::vcycle(h, router, 0, cfg.mu_f, cfg.mu_b, cfg.smoother, cfg.rhs_scale, ws,
                       es.transfers);
        residual(ex0, h.u[0], h.f[0], r0);
        res = euclidean_norm(ex0, r0);
        st.residual_history.push_back(res);
        ++iter;
        if (iter == 1) st.cycle_flops = es.counters.flops - after_init;
    }
    st.iterations = iter;
    st.converged = !(res > cfg.tol * resinit);
    detail::fill_stats(st, h, es);
    return {std::move(h.u[0]), std::move(st)};
}

/// Full multigrid: the finest right-hand side is sampled as h^2*rhs(x) and
/// restricted level by level, the coarsest level is solved exactly, then per
/// level the solution is interpolated upward and one V-cycle with nu1/nu2
/// sweeps is run. One pass, no outer iteration.
template <int D, class RhsFn>
SolveResult<D> fmg_solve(const SolveConfig& cfg, RhsFn&& rhs) {
    cfg.validate();
    Hierarchy<D> h = build_hierarchy<D>(cfg.depth, cfg.partition);
    detail::EngineSet es(cfg.workers);
    detail::EngineRouter router = es.router(cfg.partition);
    detail::SmootherWorkspace<D> ws;
    ws.prepare(h, cfg.smoother);

    const int L = cfg.depth;
    const double h2 = h.levels[0].spacing * h.levels[0].spacing;
    sample_interior(router.at(0), h.f[0], h2, rhs);
    for (int l = 0; l + 1 < L; ++l) {
        restrict_residual(router.at(l), h.f[l], h.f[l + 1], cfg.rhs_scale);
        if (l + 1 == router.partition) copy_across(h.f[l + 1], Space::host, es.transfers);
    }
    detail::smooth(router.at(L - 1), Direction::forward, cfg.nu1, h, L - 1, cfg.smoother, ws);
    for (int l = L - 2; l >= 0; --l) {
        if (l + 1 == router.partition) copy_across(h.u[l + 1], Space::device, es.transfers);
        fmg_prolong(router.at(l), h.u[l], h.u[l + 1]);
        detail::vcycle(h, router, l, cfg.nu1, cfg.nu2, cfg.smoother, cfg.rhs_scale, ws,
                       es.transfers);
    }

    SolveStats st;
    const Exec ex0 = router.at(0);
    GridField<D> check_scratch;
    if (h.r.empty()) check_scratch = GridField<D>(h.levels[0], ex0.engine->space());
    GridField<D>& r0 = h.r.empty() ? check_scratch : h.r[0];
    residual(ex0, h.u[0], h.f[0], r0);
    st.residual_history.push_back(euclidean_norm(ex0, r0));
    st.iterations = 0;
    st.converged = true;
    detail::fill_stats(st, h, es);
    return {std::move(h.u[0]), std::move(st)};
}

/// Iteration counts of gmg_solve across a family of smoothers, one row per
/// hierarchy depth. The right-hand side is sampled per depth as h^2*rhs(x).
struct SmootherComparisonRow {
    int depth;
    std::vector<int> iterations;  // one entry per smoother, input order
};

template <int D, class RhsFn>
std::vector<SmootherComparisonRow> smoother_comparison(const SolveConfig& base,
                                                       const std::vector<Smoother>& smoothers,
                                                       int depth_lo, int depth_hi, RhsFn&& rhs) {
    std::vector<SmootherComparisonRow> table;
    SerialEngine sampler(Space::host);
    for (int L = depth_lo; L <= depth_hi; ++L) {
        GridField<D> f0{LevelGrid<D>(0, 1 << L)};
        const double h2 = f0.grid.spacing * f0.grid.spacing;
        sample_interior(Exec{&sampler, nullptr, nullptr}, f0, h2, rhs);
        SmootherComparisonRow row{L, {}};
        for (const Smoother& s : smoothers) {
            SolveConfig cfg = base;
            cfg.depth = L;
            cfg.partition = std::min(cfg.partition, L);
            cfg.smoother = s;
            row.iterations.push_back(gmg_solve<D>(cfg, f0).stats.iterations);
        }
        table.push_back(std::move(row));
    }
    return table;
}

} // namespace gmg
