#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/distance.hpp"
#include "suplab/core/kde.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"

namespace suplab::verify {

/// W1 between a weighted empirical sample (cell-binned counts) and a grid
/// density, both read as CDFs at cell edges.
inline double w1_binned_vs_slice(const std::vector<double>& cell_mass, const DensitySlice& ref) {
    const double dx = ref.grid.dx();
    double ce = 0.0, cr = 0.0, s = 0.0;
    for (int i = 0; i < ref.grid.n_cells; ++i) {
        ce += cell_mass[i];
        cr += ref.values[i] * dx;
        s += std::abs(ce - cr);
    }
    return s * dx;
}

struct W1Result {
    double w1 = 0.0;        // point estimate: W1(KDE of sample, reference slice)
    double se = 0.0;        // bootstrap stderr (percentile half-band, 200 resamples)
    double bandwidth = 0.0; // bandwidth actually used
    double threshold = 0.0; // 3 se + extra
    bool pass = false;
};

/// Bootstrap stderr of the sampling noise of W1: multinomial resamples of the
/// empirical measure against the reference, percentile half-band over 200
/// draws. The point estimate itself smooths with the Gaussian KDE.
inline double bootstrap_w1_se(std::span<const double> positions, const DensitySlice& ref,
                              uint64_t seed, int n_boot = 200) {
    const size_t n = positions.size();
    std::vector<int> cell(n);
    for (size_t i = 0; i < n; ++i) cell[i] = ref.grid.cell_of(positions[i]);
    std::vector<double> w1s(n_boot);
    parallel_for(static_cast<size_t>(n_boot), [&](size_t r) {
        RngStream rng(seed, static_cast<uint32_t>(r), 0, RngChannel::Bootstrap);
        std::vector<double> mass(ref.grid.n_cells, 0.0);
        const double unit = 1.0 / static_cast<double>(n);
        for (size_t d = 0; d < n; ++d) {
            size_t idx = std::min(n - 1, static_cast<size_t>(rng.uniform() * n));
            mass[cell[idx]] += unit;
        }
        w1s[r] = w1_binned_vs_slice(mass, ref);
    });
    std::sort(w1s.begin(), w1s.end());
    auto quantile = [&](double q) {
        double pos = q * (n_boot - 1);
        size_t lo = static_cast<size_t>(pos);
        double f = pos - lo;
        return (1.0 - f) * w1s[lo] + f * w1s[std::min<size_t>(lo + 1, n_boot - 1)];
    };
    return 0.5 * (quantile(0.8413) - quantile(0.1587));
}

/// KDE-vs-slice W1 with the standard pass rule: W1 <= 3 bootstrap se + extra.
inline W1Result w1_kde_check(std::span<const double> positions, double bandwidth,
                             const DensitySlice& ref, double extra, uint64_t seed) {
    W1Result res;
    std::vector<double> w(positions.size(), 1.0 / static_cast<double>(positions.size()));
    res.bandwidth =
        bandwidth > 0.0 ? bandwidth : silverman_bandwidth(positions, w);
    auto est = kde(positions, w, res.bandwidth, ref.grid);
    res.w1 = wasserstein1(est, ref);
    res.se = bootstrap_w1_se(positions, ref, seed);
    res.threshold = 3.0 * res.se + extra;
    res.pass = res.w1 <= res.threshold;
    return res;
}

/// W1 between two empirical samples (via their KDEs) with a joint bootstrap:
/// both sides are resampled per replicate, so the band carries the combined
/// sampling noise.
inline W1Result w1_two_sample_check(std::span<const double> xs_a, std::span<const double> xs_b,
                                    double bandwidth, const SpatialGrid& grid, double extra,
                                    uint64_t seed, int n_boot = 200) {
    W1Result res;
    std::vector<double> wa(xs_a.size(), 1.0 / static_cast<double>(xs_a.size()));
    std::vector<double> wb(xs_b.size(), 1.0 / static_cast<double>(xs_b.size()));
    res.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(xs_a, wa);
    auto ka = kde(xs_a, wa, res.bandwidth, grid);
    auto kb = kde(xs_b, wb, res.bandwidth, grid);
    res.w1 = wasserstein1(ka, kb);

    std::vector<int> ca(xs_a.size()), cb(xs_b.size());
    for (size_t i = 0; i < xs_a.size(); ++i) ca[i] = grid.cell_of(xs_a[i]);
    for (size_t i = 0; i < xs_b.size(); ++i) cb[i] = grid.cell_of(xs_b[i]);
    std::vector<double> w1s(n_boot);
    const double dx = grid.dx();
    parallel_for(static_cast<size_t>(n_boot), [&](size_t r) {
        RngStream rng(seed, static_cast<uint32_t>(r), 1, RngChannel::Bootstrap);
        std::vector<double> ma(grid.n_cells, 0.0), mb(grid.n_cells, 0.0);
        for (size_t d = 0; d < ca.size(); ++d) {
            size_t idx = std::min(ca.size() - 1, static_cast<size_t>(rng.uniform() * ca.size()));
            ma[ca[idx]] += 1.0 / ca.size();
        }
        for (size_t d = 0; d < cb.size(); ++d) {
            size_t idx = std::min(cb.size() - 1, static_cast<size_t>(rng.uniform() * cb.size()));
            mb[cb[idx]] += 1.0 / cb.size();
        }
        double cea = 0.0, ceb = 0.0, s = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) {
            cea += ma[i];
            ceb += mb[i];
            s += std::abs(cea - ceb);
        }
        w1s[r] = s * dx;
    });
    std::sort(w1s.begin(), w1s.end());
    auto quantile = [&](double q) {
        double pos = q * (n_boot - 1);
        size_t lo = static_cast<size_t>(pos);
        double f = pos - lo;
        return (1.0 - f) * w1s[lo] + f * w1s[std::min<size_t>(lo + 1, static_cast<size_t>(n_boot - 1))];
    };
    res.se = 0.5 * (quantile(0.8413) - quantile(0.1587));
    res.threshold = 3.0 * res.se + extra;
    res.pass = res.w1 <= res.threshold;
    return res;
}

} // namespace suplab::verify
