#pragma once

#include <cmath>
#include <string>

#include "suplab/core/errors.hpp"

namespace suplab {

/// Uniform cell-centered grid on [x_min, x_max].
///
/// Cell i has center x_min + (i + 1/2) dx and edges x_min + i dx,
/// x_min + (i+1) dx. Densities are stored as cell values, so the mass of
/// a slice is sum(u_i) * dx.
struct SpatialGrid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 8;

    double dx() const { return (x_max - x_min) / n_cells; }
    double center(int i) const { return x_min + (i + 0.5) * dx(); }
    double edge(int i) const { return x_min + i * dx(); }

    /// Index of the cell containing x, clamped to [0, n_cells-1].
    int cell_of(double x) const {
        int i = static_cast<int>(std::floor((x - x_min) / dx()));
        if (i < 0) i = 0;
        if (i >= n_cells) i = n_cells - 1;
        return i;
    }

    bool contains(double x) const { return x >= x_min && x <= x_max; }

    bool operator==(const SpatialGrid& o) const {
        return x_min == o.x_min && x_max == o.x_max && n_cells == o.n_cells;
    }
};

inline SpatialGrid make_grid(double x_min, double x_max, int n_cells) {
    if (!(x_min < x_max))
        throw InvalidGrid("make_grid: x_min must be < x_max (got [" +
                          std::to_string(x_min) + ", " + std::to_string(x_max) + "])");
    if (n_cells < 8)
        throw InvalidGrid("make_grid: n_cells must be >= 8 (got " +
                          std::to_string(n_cells) + ")");
    return SpatialGrid{x_min, x_max, n_cells};
}

} // namespace suplab
