#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/potential/dirichlet.hpp"
#include "suplab/sde/engine.hpp"

namespace suplab::potential {

/// Open set as a finite union of open intervals.
struct OpenSet {
    std::vector<std::pair<double, double>> intervals;

    bool contains(double x) const {
        for (auto& [lo, hi] : intervals)
            if (x > lo && x < hi) return true;
        return false;
    }
    bool empty() const { return intervals.empty(); }
};

struct CapacityEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double truncation_bound = 0.0; // paths never entering by T_max contribute e^{-alpha T_max}
};

/// Entry-time capacity estimate E[e^{-alpha D_G}] for an open set G, paths
/// from the initial law at clock 0 (entry counts time zero). Paths that never
/// enter by T_max contribute e^{-alpha T_max}; the estimate brackets the true
/// value from above within truncation_bound.
inline CapacityEstimate estimate_capacity(const OpenSet& G, double alpha,
                                          const CoefficientModel& coeffs,
                                          const sde::InitialLaw& mu0, double T_max,
                                          size_t n_paths, double dt, uint64_t seed,
                                          uint32_t replicate = 0) {
    if (!(alpha > 0.0)) throw Error("estimate_capacity: alpha must be > 0");
    long n_steps = std::max(1L, std::lround(T_max / dt));
    const double dt_eff = T_max / static_cast<double>(n_steps);

    auto init = sde::sample_initial(mu0, n_paths, seed, replicate);
    std::vector<double> vals(n_paths);
    parallel_for(n_paths, [&](size_t p) {
        double x = init.x[p];
        if (G.contains(x)) { // entry time zero
            vals[p] = 1.0;
            return;
        }
        RngStream rng(seed, static_cast<uint32_t>(p), replicate, RngChannel::Diffusion);
        double entry = T_max;
        for (long k = 0; k < n_steps; ++k) {
            double t = k * dt_eff;
            double a = coeffs.a(t, x);
            x += coeffs.b(t, x) * dt_eff + std::sqrt(a * dt_eff) * rng.normal();
            if (G.contains(x)) {
                entry = (k + 1) * dt_eff;
                break;
            }
        }
        vals[p] = std::exp(-alpha * entry);
    });
    auto ms = mean_stderr(vals);
    return {ms.value, ms.stderr_, std::exp(-alpha * T_max)};
}

} // namespace suplab::potential
