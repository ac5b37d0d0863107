#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"

namespace suplab::verify {

struct EnergyReport {
    double energy = 0.0;          // finest-grid value
    std::vector<double> series;   // coarse (4 dx) -> mid (2 dx) -> fine (dx)
    std::vector<double> ratios;   // successive ratios of the series
    bool bounded = false;         // every ratio <= 1.25
};

namespace detail {

inline double energy_on(const DensityTrajectory& traj,
                        const std::function<double(double)>& h) {
    const auto& g = traj.grid;
    const double dx = g.dx();
    std::vector<double> hx(g.n_cells);
    for (int i = 0; i < g.n_cells; ++i) hx[i] = h(g.center(i));
    double e = 0.0;
    for (size_t k = 0; k + 1 < traj.n_times(); ++k) {
        double dt = traj.times[k + 1] - traj.times[k];
        double slice_e = 0.0;
        const auto& u = traj.values[k];
        double prev = std::sqrt(std::max(u[0], 1e-12)) * hx[0];
        for (int i = 1; i < g.n_cells; ++i) {
            double w = std::sqrt(std::max(u[i], 1e-12)) * hx[i];
            double d = w - prev;
            slice_e += d * d;
            prev = w;
        }
        e += dt * slice_e / dx;
    }
    return e;
}

/// Pairwise-average (finite-volume) coarsening by a factor of 2.
inline DensityTrajectory coarsen2(const DensityTrajectory& traj) {
    DensityTrajectory out;
    out.grid = SpatialGrid{traj.grid.x_min, traj.grid.x_max, traj.grid.n_cells / 2};
    out.times = traj.times;
    out.values.reserve(traj.values.size());
    for (const auto& u : traj.values) {
        std::vector<double> v(out.grid.n_cells);
        for (int i = 0; i < out.grid.n_cells; ++i) v[i] = 0.5 * (u[2 * i] + u[2 * i + 1]);
        out.values.push_back(std::move(v));
    }
    return out;
}

} // namespace detail

/// Discrete sqrt-regularity energy
///   sum_k dt_k sum_i | Delta_x( sqrt(u_k,i) h(x_i) ) |^2 / dx,
/// the grid counterpart of || sqrt(u) h ||^2 in L^2([0,T]; H^1). Reported on
/// the given grid and on 2x / 4x coarsened versions (pairwise averaging);
/// the refinement series is bounded iff each successive ratio is <= 1.25.
/// Cells below the 1e-12 density floor enter through the floor, which keeps
/// the gradient of an identically-zero tail at zero.
inline EnergyReport sqrt_energy(const DensityTrajectory& traj,
                                const std::function<double(double)>& h) {
    if (traj.n_times() < 2) throw TrajectoryTooShort("sqrt_energy: need at least two slices");
    if (traj.grid.n_cells % 4 != 0)
        throw Error("sqrt_energy: n_cells must be divisible by 4 for the refinement series");
    EnergyReport rep;
    auto mid = detail::coarsen2(traj);
    auto coarse = detail::coarsen2(mid);
    rep.series = {detail::energy_on(coarse, h), detail::energy_on(mid, h),
                  detail::energy_on(traj, h)};
    rep.energy = rep.series.back();
    rep.bounded = true;
    for (size_t i = 1; i < rep.series.size(); ++i) {
        double r = rep.series[i] / std::max(rep.series[i - 1], 1e-300);
        rep.ratios.push_back(r);
        if (r > 1.25) rep.bounded = false;
    }
    return rep;
}

} // namespace suplab::verify
