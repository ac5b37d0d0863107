#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "suplab/core/catalog.hpp"
#include "suplab/core/coefficients.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/potential/dirichlet.hpp"

namespace suplab::potential {

struct LyapunovSpec {
    LyapunovFn V;
    double delta_v = 1.0; // generator bound L V <= delta_v V
    double eps = 1.0;     // Doob threshold
};

struct GeneratorBoundReport {
    double worst_residual = 0.0;
    double worst_x = 0.0;
    double worst_t = 0.0;
    bool pass = false;
};

/// Spot-check of the generator bound: max over grid x time samples of
///   b V' + (1/2) a V'' - delta_v V.
/// Pass iff the worst residual is <= 1e-12. A spot check, not a proof.
inline GeneratorBoundReport check_generator_bound(const LyapunovSpec& spec,
                                                  const CoefficientModel& coeffs,
                                                  const SpatialGrid& grid, double t0, double t1,
                                                  int time_samples = 9) {
    GeneratorBoundReport rep;
    rep.worst_residual = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < time_samples; ++k) {
        double t = time_samples > 1 ? t0 + (t1 - t0) * k / (time_samples - 1) : t0;
        for (int i = 0; i < grid.n_cells; ++i) {
            double x = grid.center(i);
            double r = coeffs.b(t, x) * spec.V.V1(x) + 0.5 * coeffs.a(t, x) * spec.V.V2(x) -
                       spec.delta_v * spec.V.V(x);
            if (r > rep.worst_residual) {
                rep.worst_residual = r;
                rep.worst_x = x;
                rep.worst_t = t;
            }
        }
    }
    rep.pass = rep.worst_residual <= 1e-12;
    return rep;
}

/// Wilson score upper bound at the given z (2.5758 = 99% two-sided).
inline double wilson_upper(double p_hat, double n, double z = 2.5758293035489004) {
    double z2 = z * z;
    return (p_hat + z2 / (2.0 * n) + z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n))) /
           (1.0 + z2 / n);
}

struct TailBoundReport {
    double p_hat = 0.0;
    double wilson99 = 0.0;
    double bound = 0.0; // e^{delta_v T} V(x) / eps
    bool pass = false;
};

/// Doob maximal-inequality check: the running max of V along discrete paths
/// understates the true sup, which is conservative for this one-sided bound.
/// Refuses to certify unless the generator bound holds on the window.
inline TailBoundReport estimate_tail_bound(const LyapunovSpec& spec,
                                           const CoefficientModel& coeffs,
                                           const SpatialGrid& grid, double s, double x0, double T,
                                           size_t n_paths, double dt, uint64_t seed,
                                           uint32_t replicate = 0) {
    auto gen = check_generator_bound(spec, coeffs, grid, s, s + T);
    if (!gen.pass)
        throw GeneratorBoundFailed("estimate_tail_bound: L V <= delta_v V fails at x = " +
                                   std::to_string(gen.worst_x));
    long n_steps = std::max(1L, std::lround(T / dt));
    double dt_eff = T / static_cast<double>(n_steps);
    std::vector<uint8_t> hit(n_paths, 0);
    parallel_for(n_paths, [&](size_t p) {
        RngStream rng(seed, static_cast<uint32_t>(p), replicate, RngChannel::Diffusion);
        double x = x0;
        double vmax = spec.V.V(x);
        for (long k = 0; k < n_steps && vmax < spec.eps; ++k) {
            double t = s + k * dt_eff;
            double a = coeffs.a(t, x);
            x += coeffs.b(t, x) * dt_eff + std::sqrt(a * dt_eff) * rng.normal();
            vmax = std::max(vmax, spec.V.V(x));
        }
        hit[p] = vmax >= spec.eps ? 1 : 0;
    });
    TailBoundReport rep;
    size_t cnt = 0;
    for (uint8_t h : hit) cnt += h;
    rep.p_hat = static_cast<double>(cnt) / static_cast<double>(n_paths);
    rep.wilson99 = wilson_upper(rep.p_hat, static_cast<double>(n_paths));
    rep.bound = std::exp(spec.delta_v * T) * spec.V.V(x0) / spec.eps;
    rep.pass = rep.wilson99 <= rep.bound;
    return rep;
}

struct SupermartingaleReport {
    std::vector<double> checkpoints;
    std::vector<double> m;         // mean of e^{-delta_v t_j} V(X(t_j))
    std::vector<double> incr;      // paired increments m_{j+1} - m_j
    std::vector<double> incr_se;   // stderr of the paired increments
    bool pass = false;
};

/// Tests that t -> e^{-delta_v t} P_t V is nonincreasing across checkpoints,
/// within 3 paired standard errors per increment.
inline SupermartingaleReport check_supermartingale(const LyapunovSpec& spec,
                                                   const CoefficientModel& coeffs,
                                                   const SpatialGrid& grid, double s, double x0,
                                                   double T, size_t n_paths,
                                                   const std::vector<double>& checkpoints,
                                                   double dt, uint64_t seed,
                                                   uint32_t replicate = 0) {
    auto gen = check_generator_bound(spec, coeffs, grid, s, s + T);
    if (!gen.pass) throw GeneratorBoundFailed("check_supermartingale: generator bound fails");
    long n_steps = std::max(1L, std::lround(T / dt));
    double dt_eff = T / static_cast<double>(n_steps);

    std::vector<long> cp_steps;
    for (double c : checkpoints) cp_steps.push_back(std::lround(c / dt_eff));
    const size_t nc = cp_steps.size();
    std::vector<double> samples(n_paths * nc);
    parallel_for(n_paths, [&](size_t p) {
        RngStream rng(seed, static_cast<uint32_t>(p), replicate, RngChannel::Diffusion);
        double x = x0;
        size_t j = 0;
        for (long k = 0; k < n_steps && j < nc; ++k) {
            while (j < nc && cp_steps[j] == k) {
                samples[p * nc + j] = std::exp(-spec.delta_v * k * dt_eff) * spec.V.V(x);
                ++j;
            }
            double t = s + k * dt_eff;
            double a = coeffs.a(t, x);
            x += coeffs.b(t, x) * dt_eff + std::sqrt(a * dt_eff) * rng.normal();
        }
        while (j < nc) {
            samples[p * nc + j] = std::exp(-spec.delta_v * cp_steps[j] * dt_eff) * spec.V.V(x);
            ++j;
        }
    });

    SupermartingaleReport rep;
    rep.checkpoints = checkpoints;
    rep.m.resize(nc);
    for (size_t j = 0; j < nc; ++j) {
        double sum = 0.0;
        for (size_t p = 0; p < n_paths; ++p) sum += samples[p * nc + j];
        rep.m[j] = sum / static_cast<double>(n_paths);
    }
    rep.pass = true;
    // m(0) = V(x0) deterministically; compare the first checkpoint against it too
    std::vector<double> diffs(n_paths);
    double prev_det = spec.V.V(x0);
    for (size_t j = 0; j < nc; ++j) {
        for (size_t p = 0; p < n_paths; ++p) {
            double prev = j == 0 ? prev_det : samples[p * nc + j - 1];
            diffs[p] = samples[p * nc + j] - prev;
        }
        auto ms = mean_stderr(diffs);
        rep.incr.push_back(ms.value);
        rep.incr_se.push_back(ms.stderr_);
        if (ms.value > 3.0 * ms.stderr_) rep.pass = false;
    }
    return rep;
}

} // namespace suplab::potential
