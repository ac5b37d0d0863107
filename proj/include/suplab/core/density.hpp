#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"

namespace suplab {

/// One time slice of a grid density: nonnegative cell values u_i with
/// mass sum(u_i) * dx.
struct DensitySlice {
    SpatialGrid grid;
    std::vector<double> values;

    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.dx();
    }

    void normalize() {
        double m = mass();
        if (m <= 0.0) throw NotNormalized("DensitySlice::normalize: nonpositive mass");
        for (double& v : values) v /= m;
    }

    /// Piecewise-constant lookup; clamps to the window.
    double value_at(double x) const { return values[grid.cell_of(x)]; }

    double mean() const {
        double s = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) s += grid.center(i) * values[i];
        return s * grid.dx();
    }

    double variance() const {
        double m = mean(), s = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) {
            double d = grid.center(i) - m;
            s += d * d * values[i];
        }
        return s * grid.dx();
    }
};

/// Grid density trajectory u(t_k, x_i); times strictly increasing,
/// every stored slice mass-normalized to tolerance by the producing solver.
struct DensityTrajectory {
    SpatialGrid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    // solver bookkeeping
    double max_clamp = 0.0;      // largest negative value clamped to 0
    double max_mass_drift = 0.0; // worst |mass - 1| seen before renormalization

    size_t n_times() const { return times.size(); }

    DensitySlice slice(size_t k) const { return DensitySlice{grid, values[k]}; }

    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    /// Slice at time t, linear interpolation between stored slices.
    DensitySlice at_time(double t) const {
        if (times.empty()) throw TrajectoryTooShort("at_time: empty trajectory");
        if (t <= times.front()) return slice(0);
        if (t >= times.back()) return slice(times.size() - 1);
        auto it = std::upper_bound(times.begin(), times.end(), t);
        size_t k = static_cast<size_t>(it - times.begin());
        double t0 = times[k - 1], t1 = times[k];
        double w = (t - t0) / (t1 - t0);
        DensitySlice out{grid, std::vector<double>(grid.n_cells)};
        for (int i = 0; i < grid.n_cells; ++i)
            out.values[i] = (1.0 - w) * values[k - 1][i] + w * values[k][i];
        return out;
    }

    /// u(t, x): linear in t, piecewise-constant in x.
    double value_at(double t, double x) const { return at_time(t).value_at(x); }

    static DensityTrajectory single(const DensitySlice& s, double t = 0.0) {
        DensityTrajectory tr;
        tr.grid = s.grid;
        tr.times = {t};
        tr.values = {s.values};
        return tr;
    }
};

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Gaussian initial slice, renormalized to unit grid mass.
///
/// Throws WindowTooSmall when the analytic tail mass outside the window
/// exceeds 1e-6 before renormalization.
inline DensitySlice gaussian_density(const SpatialGrid& grid, double mean, double var) {
    if (!(var > 0.0)) throw InvalidGrid("gaussian_density: var must be > 0");
    double sd = std::sqrt(var);
    double tail = normal_cdf((grid.x_min - mean) / sd) + normal_cdf((mean - grid.x_max) / sd);
    if (tail > 1e-6)
        throw WindowTooSmall("gaussian_density: tail mass outside window = " +
                             std::to_string(tail));
    DensitySlice s{grid, std::vector<double>(grid.n_cells)};
    double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
    for (int i = 0; i < grid.n_cells; ++i) {
        double d = grid.center(i) - mean;
        s.values[i] = norm * std::exp(-0.5 * d * d / var);
    }
    s.normalize();
    return s;
}

/// Uniform initial slice on [lo, hi] (intersected with the window), unit mass.
inline DensitySlice uniform_density(const SpatialGrid& grid, double lo, double hi) {
    if (!(lo < hi)) throw InvalidGrid("uniform_density: lo < hi required");
    DensitySlice s{grid, std::vector<double>(grid.n_cells, 0.0)};
    for (int i = 0; i < grid.n_cells; ++i) {
        double a = std::max(lo, grid.edge(i)), b = std::min(hi, grid.edge(i + 1));
        if (b > a) s.values[i] = (b - a) / grid.dx();
    }
    s.normalize();
    return s;
}

} // namespace suplab
