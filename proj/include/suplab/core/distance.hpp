#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"

namespace suplab {

/// L1 distance of two slices on the same grid: sum |u_i - v_i| dx.
inline double l1_distance(const DensitySlice& u, const DensitySlice& v) {
    if (!(u.grid == v.grid)) throw GridMismatch("l1_distance: grids differ");
    double s = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) s += std::abs(u.values[i] - v.values[i]);
    return s * u.grid.dx();
}

/// 1-d Wasserstein-1 distance via cumulative sums: integral |CDF_u - CDF_v| dx.
/// Both slices must carry unit mass.
inline double wasserstein1(const DensitySlice& u, const DensitySlice& v) {
    if (!(u.grid == v.grid)) throw GridMismatch("wasserstein1: grids differ");
    const double dx = u.grid.dx();
    if (std::abs(u.mass() - 1.0) > 1e-8 || std::abs(v.mass() - 1.0) > 1e-8)
        throw NotNormalized("wasserstein1: inputs must have unit mass");
    double cu = 0.0, cv = 0.0, s = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) {
        cu += u.values[i] * dx;
        cv += v.values[i] * dx;
        s += std::abs(cu - cv);
    }
    return s * dx;
}

/// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

} // namespace suplab
