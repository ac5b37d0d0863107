#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"
#include "suplab/core/parallel.hpp"

namespace suplab {

namespace detail {
inline double weighted_std(std::span<const double> xs, std::span<const double> ws) {
    double m = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) m += ws[i] * xs[i];
    double v = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) v += ws[i] * (xs[i] - m) * (xs[i] - m);
    return std::sqrt(std::max(v, 0.0));
}
} // namespace detail

/// Silverman rule-of-thumb bandwidth, 1.06 sigma N^{-1/5}.
inline double silverman_bandwidth(std::span<const double> xs, std::span<const double> ws) {
    double sd = detail::weighted_std(xs, ws);
    if (sd <= 0.0) sd = 1e-3;
    return 1.06 * sd * std::pow(static_cast<double>(xs.size()), -0.2);
}

/// Gaussian-kernel density estimate on the grid, renormalized to unit mass.
///
/// bandwidth = 0 selects the Silverman rule. Particles are accumulated in
/// position-sorted order, so the result is invariant under particle
/// permutation and thread count. Kernel truncated at 8 bandwidths.
inline DensitySlice kde(std::span<const double> positions, std::span<const double> weights,
                        double bandwidth, const SpatialGrid& grid) {
    const size_t n = positions.size();
    if (n == 0) throw EmptyEnsemble("kde: empty ensemble");
    double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(positions, weights);

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (positions[a] != positions[b]) return positions[a] < positions[b];
        return weights[a] < weights[b];
    });
    std::vector<double> xs(n), ws(n);
    for (size_t r = 0; r < n; ++r) {
        xs[r] = positions[order[r]];
        ws[r] = weights[order[r]];
    }

    DensitySlice out{grid, std::vector<double>(grid.n_cells, 0.0)};
    const double cut = 8.0 * h;
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * h);
    parallel_for(static_cast<size_t>(grid.n_cells), [&](size_t j) {
        double c = grid.center(static_cast<int>(j));
        auto lo = std::lower_bound(xs.begin(), xs.end(), c - cut);
        auto hi = std::upper_bound(xs.begin(), xs.end(), c + cut);
        double s = 0.0;
        for (auto it = lo; it != hi; ++it) {
            double z = (c - *it) / h;
            s += ws[static_cast<size_t>(it - xs.begin())] * std::exp(-0.5 * z * z);
        }
        out.values[j] = s * norm;
    });
    out.normalize();
    return out;
}

inline DensitySlice kde(const ParticleEnsemble& ens, double bandwidth, const SpatialGrid& grid) {
    if (ens.size() == 0) throw EmptyEnsemble("kde: empty ensemble");
    return kde(ens.x, ens.weights, bandwidth, grid);
}

/// Fast binned KDE: cloud-in-cell deposit followed by a lattice-kernel
/// convolution. Used inside the self-consistent loop where the estimate is
/// re-made every few steps; binning error is O(dx) << bandwidth there.
/// Deposit is serial so the result does not depend on the thread count.
inline DensitySlice kde_binned(std::span<const double> positions,
                               std::span<const double> weights, double bandwidth,
                               const SpatialGrid& grid) {
    const size_t n = positions.size();
    if (n == 0) throw EmptyEnsemble("kde_binned: empty ensemble");
    double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(positions, weights);
    const double dx = grid.dx();

    std::vector<double> bins(grid.n_cells, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double s = (positions[i] - grid.x_min) / dx - 0.5;
        int i0 = static_cast<int>(std::floor(s));
        double f = s - i0;
        int ia = std::clamp(i0, 0, grid.n_cells - 1);
        int ib = std::clamp(i0 + 1, 0, grid.n_cells - 1);
        bins[ia] += weights[i] * (1.0 - f);
        bins[ib] += weights[i] * f;
    }

    int span = std::min(grid.n_cells, static_cast<int>(std::ceil(8.0 * h / dx)) + 1);
    std::vector<double> kernel(2 * span + 1);
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * h);
    for (int k = -span; k <= span; ++k) {
        double z = k * dx / h;
        kernel[k + span] = norm * std::exp(-0.5 * z * z);
    }

    DensitySlice out{grid, std::vector<double>(grid.n_cells, 0.0)};
    parallel_for(static_cast<size_t>(grid.n_cells), [&](size_t j) {
        int lo = std::max(0, static_cast<int>(j) - span);
        int hi = std::min(grid.n_cells - 1, static_cast<int>(j) + span);
        double s = 0.0;
        for (int i = lo; i <= hi; ++i)
            s += bins[i] * kernel[static_cast<int>(j) - i + span];
        out.values[j] = s;
    });
    out.normalize();
    return out;
}

} // namespace suplab
