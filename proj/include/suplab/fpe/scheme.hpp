#pragma once

#include <algorithm>
#include <cmath>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"

namespace suplab::fpe {

/// Shared finite-volume scheme knobs. Boundary treatment is zero-flux
/// (reflecting) at the window edges; drift fluxes are first-order upwind;
/// the diffusion part uses a theta-scheme with theta in {0, 1}.
struct SchemeConfig {
    double dt = 1e-4;
    int theta = 1;              // 0 = explicit diffusion, 1 = implicit diffusion
    double mass_tol = 1e-8;     // per-step mass drift guard
    int store_every = 0;        // 0 = auto (about 1000 stored slices)

    int effective_store_every(long n_steps) const {
        if (store_every > 0) return store_every;
        return std::max(1L, n_steps / 1000);
    }
};

/// Largest coefficient magnitudes sampled on grid x uniform time mesh.
struct CoefficientExtrema {
    double max_a = 0.0;
    double min_a = 0.0;
    double max_abs_b = 0.0;
};

inline CoefficientExtrema sample_extrema(const CoefficientModel& coeffs, const SpatialGrid& grid,
                                         double t0, double t1, int time_samples = 9) {
    CoefficientExtrema e;
    e.min_a = std::numeric_limits<double>::infinity();
    for (int k = 0; k < time_samples; ++k) {
        double t = time_samples > 1 ? t0 + (t1 - t0) * k / (time_samples - 1) : t0;
        for (int i = 0; i < grid.n_cells; ++i) {
            double x = grid.center(i);
            double a = coeffs.a(t, x), b = coeffs.b(t, x);
            e.max_a = std::max(e.max_a, a);
            e.min_a = std::min(e.min_a, a);
            e.max_abs_b = std::max(e.max_abs_b, std::abs(b));
        }
    }
    return e;
}

/// Largest stable/positivity-preserving dt for the scheme on this problem.
/// Explicit diffusion requires dt <= dx^2 / max a combined with the advective
/// bound dt <= dx / max |b|; implicit diffusion leaves only the advective bound.
inline double stability_bound(const CoefficientModel& coeffs, const SpatialGrid& grid, double T,
                              int theta) {
    auto e = sample_extrema(coeffs, grid, 0.0, T);
    double dx = grid.dx();
    double rate = 0.0;
    if (theta == 0 && e.max_a > 0.0) rate += e.max_a / (dx * dx);
    if (e.max_abs_b > 0.0) rate += e.max_abs_b / dx;
    return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

} // namespace suplab::fpe
