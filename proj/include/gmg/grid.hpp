#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmg {

using index_t = std::int64_t;

enum class Space { host, device };

inline const char* to_string(Space s) { return s == Space::host ? "host" : "device"; }

/// Validates a runtime dimension before dispatching to the templated code.
inline void check_dim(int dim) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("dim must be 2 or 3, got " + std::to_string(dim));
}

/// Geometry of one level of the nested uniform grid on (0,1)^D.
/// Level 0 is the finest; a hierarchy of depth L has cells = 2^(L-l) on level l,
/// so the coarsest level (l = L-1) has a single interior unknown per axis.
template <int D>
struct LevelGrid {
    static_assert(D == 2 || D == 3, "only 2D and 3D grids are supported");
    static constexpr int dim = D;

    int level = 0;       // 0 = finest
    int cells = 2;       // cells per axis (n)
    double spacing = 0.5; // h = 1/n

    LevelGrid() = default;
    LevelGrid(int level_, int cells_)
        : level(level_), cells(cells_), spacing(1.0 / cells_) {}

    int points() const { return cells + 1; }  // points per axis, including boundary

    index_t total_points() const {
        index_t p = points();
        return D == 2 ? p * p : p * p * p;
    }
    index_t interior_points() const {
        index_t m = cells - 1;
        return D == 2 ? m * m : m * m * m;
    }

    /// Flat offset of a multi-index; axis 0 varies fastest.
    index_t flat(const std::array<int, D>& p) const {
        index_t s = points();
        if constexpr (D == 2) return p[0] + s * p[1];
        else return p[0] + s * (p[1] + s * p[2]);
    }

    bool operator==(const LevelGrid&) const = default;
};

/// One scalar field on a level. Stores the full (n+1)^D box; the boundary
/// ring is kept at exactly zero so stencils read neighbors unconditionally.
/// Each field is resident in exactly one memory space at a time.
template <int D>
struct GridField {
    LevelGrid<D> grid;
    Space space = Space::host;
    std::vector<double> v;

    GridField() = default;
    explicit GridField(const LevelGrid<D>& g, Space s = Space::host)
        : grid(g), space(s), v(static_cast<std::size_t>(g.total_points()), 0.0) {}

    double& at(const std::array<int, D>& p) { return v[static_cast<std::size_t>(grid.flat(p))]; }
    double at(const std::array<int, D>& p) const { return v[static_cast<std::size_t>(grid.flat(p))]; }

    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
};

/// The per-level solution/right-hand-side/residual fields of one solve.
/// u and f exist on every level, r only where residuals are restricted
/// (levels 0..L-2). Levels below `partition` live in the device space,
/// the rest in the host space.
template <int D>
struct Hierarchy {
    int depth = 1;      // L
    int partition = 0;  // L_theta: levels < partition run on the device engine
    std::vector<LevelGrid<D>> levels;
    std::vector<GridField<D>> u;
    std::vector<GridField<D>> f;
    std::vector<GridField<D>> r;

    const LevelGrid<D>& finest() const { return levels.front(); }
};

template <int D>
Hierarchy<D> build_hierarchy(int depth, int partition) {
    if (depth < 1)
        throw std::invalid_argument("hierarchy depth must be >= 1, got " + std::to_string(depth));
    if (partition < 0 || partition > depth)
        throw std::invalid_argument("partition level must lie in [0, depth], got " +
                                    std::to_string(partition));
    Hierarchy<D> h;
    h.depth = depth;
    h.partition = partition;
    h.levels.reserve(depth);
    for (int l = 0; l < depth; ++l)
        h.levels.emplace_back(l, 1 << (depth - l));
    for (int l = 0; l < depth; ++l) {
        Space s = l < partition ? Space::device : Space::host;
        h.u.emplace_back(h.levels[l], s);
        h.f.emplace_back(h.levels[l], s);
        if (l < depth - 1) h.r.emplace_back(h.levels[l], s);
    }
    return h;
}

enum class Coloring { multicolor, two_color };

template <int D>
constexpr int color_count(Coloring c) {
    return c == Coloring::multicolor ? (1 << D) : 2;
}

/// Parity color code of a point: multicolor packs the per-axis parities into
/// a bit code, two_color is the checkerboard parity of the coordinate sum.
template <int D>
inline int color_of(const std::array<int, D>& p, Coloring c) {
    if (c == Coloring::multicolor) {
        int code = (p[0] & 1) | ((p[1] & 1) << 1);
        if constexpr (D == 3) code |= (p[2] & 1) << 2;
        return code;
    }
    int s = p[0] + p[1];
    if constexpr (D == 3) s += p[2];
    return s & 1;
}

namespace detail {

template <int D, class Fn>
void for_each_interior(const LevelGrid<D>& g, Fn&& fn) {
    const int n = g.cells;
    if constexpr (D == 2) {
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i) fn(std::array<int, 2>{i, j});
    } else {
        for (int k = 1; k < n; ++k)
            for (int j = 1; j < n; ++j)
                for (int i = 1; i < n; ++i) fn(std::array<int, 3>{i, j, k});
    }
}

} // namespace detail

/// All interior multi-indices in storage order (axis 0 fastest).
template <int D>
std::vector<std::array<int, D>> interior_index_set(const LevelGrid<D>& g) {
    std::vector<std::array<int, D>> out;
    out.reserve(static_cast<std::size_t>(g.interior_points()));
    detail::for_each_interior(g, [&](const std::array<int, D>& p) { out.push_back(p); });
    return out;
}

/// The interior points of one color class, in storage order. The classes
/// partition the interior set and no two points of a class are stencil
/// neighbors, so the points of one class may be updated in any order.
template <int D>
std::vector<std::array<int, D>> color_index_set(const LevelGrid<D>& g, int color,
                                                Coloring scheme = Coloring::multicolor) {
    if (color < 0 || color >= color_count<D>(scheme))
        throw std::invalid_argument("color " + std::to_string(color) + " out of range");
    std::vector<std::array<int, D>> out;
    detail::for_each_interior(g, [&](const std::array<int, D>& p) {
        if (color_of<D>(p, scheme) == color) out.push_back(p);
    });
    return out;
}

} // namespace gmg
