#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "gmg/backend.hpp"
#include "gmg/grid.hpp"
#include "gmg/kernels.hpp"

namespace gmg {

/// Manufactured Dirichlet problem on (0,1)^D: the exact solution is the
/// product of axis sines, u(x) = prod sin(pi x_a), which vanishes on the
/// boundary, and -lap u = f with f(x) = D pi^2 prod sin(pi x_a).
template <int D>
struct SineProduct {
    static double solution(const std::array<double, D>& x) {
        double p = 1.0;
        for (double c : x) p *= std::sin(std::numbers::pi * c);
        return p;
    }
    static double rhs(const std::array<double, D>& x) {
        return D * std::numbers::pi * std::numbers::pi * solution(x);
    }
};

/// Samples scale*fn(x) on the interior of a fresh field of the given grid.
template <int D, class PointFn>
GridField<D> sample_field(const LevelGrid<D>& grid, PointFn&& fn, double scale = 1.0) {
    GridField<D> field(grid);
    SerialEngine eng(Space::host);
    sample_interior(Exec{&eng, nullptr, nullptr}, field, scale, fn);
    return field;
}

/// Finest-level right-hand side of the scaled system, h^2 * f(x).
template <int D>
GridField<D> sample_scaled_rhs(int depth) {
    LevelGrid<D> finest(0, 1 << depth);
    const double h2 = finest.spacing * finest.spacing;
    return sample_field<D>(finest, SineProduct<D>::rhs, h2);
}

} // namespace gmg
