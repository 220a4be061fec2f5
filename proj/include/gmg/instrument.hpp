#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmg/grid.hpp"
#include "gmg/multigrid.hpp"

namespace gmg {

struct FlopRow {
    std::string kernel;
    double flops = 0;
    double per_unknown = 0;
};

/// Per-kernel-class flop table for one cycle of a completed solve, plus the
/// total, normalized by finest-level unknowns.
inline std::vector<FlopRow> flop_report(const SolveStats& stats) {
    const double inv = stats.finest_unknowns
                           ? 1.0 / static_cast<double>(stats.finest_unknowns)
                           : 0.0;
    const KernelFlops& c = stats.cycle_flops;
    std::vector<FlopRow> rows = {
        {"residual", c.residual, c.residual * inv},
        {"smoother", c.smooth, c.smooth * inv},
        {"restriction", c.restriction, c.restriction * inv},
        {"prolongation", c.prolongation, c.prolongation * inv},
        {"norm", c.norm, c.norm * inv},
    };
    rows.push_back({"total", c.total(), c.total() * inv});
    return rows;
}

struct MemoryReport {
    std::uint64_t values = 0;  // stored field values, boundary rings included
    std::uint64_t bytes = 0;   // values * 8
    double per_dof = 0;        // values per finest grid point
};

template <int D>
MemoryReport memory_report(const Hierarchy<D>& h) {
    MemoryReport rep;
    for (const auto& f : h.u) rep.values += f.v.size();
    for (const auto& f : h.f) rep.values += f.v.size();
    for (const auto& f : h.r) rep.values += f.v.size();
    rep.bytes = rep.values * 8;
    rep.per_dof = static_cast<double>(rep.values) /
                  static_cast<double>(h.finest().total_points());
    return rep;
}

inline double gflops_rate(double flops, double seconds) {
    if (!(seconds > 0)) throw std::invalid_argument("rate needs positive seconds");
    return flops / seconds * 1e-9;
}

inline double gbytes_rate(double bytes, double seconds) {
    if (!(seconds > 0)) throw std::invalid_argument("rate needs positive seconds");
    return bytes / seconds * 1e-9;
}

} // namespace gmg
