#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/kde.hpp"
#include "suplab/sde/engine.hpp"
#include "suplab/verify/w1_check.hpp"

namespace suplab::verify {

struct FlowReport {
    double w1 = 0.0;
    double se = 0.0;
    double bandwidth = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

namespace detail {

/// Final positions after evolving n particles sampled from `law` at clock s
/// for duration `dur`.
inline std::vector<double> evolve_leg(const CoefficientModel& coeffs, const sde::InitialLaw& law,
                                      double s, double dur, size_t n, double dt, uint64_t seed,
                                      uint32_t replicate) {
    auto init = sde::sample_initial(law, n, seed, replicate, s);
    sde::SimConfig cfg;
    cfg.n_particles = n;
    cfg.dt = dt;
    cfg.T = dur;
    cfg.seed = seed;
    cfg.replicate = replicate;
    cfg.record_full_paths = false;
    auto bundle = sde::simulate_paths(coeffs, init, cfg);
    auto marg = bundle.marginal(bundle.n_steps);
    return {marg.begin(), marg.end()};
}

} // namespace detail

/// Chapman-Kolmogorov (flow) check: evolving nu_s for r + t from clock s must
/// equal, in law, evolving for r, extracting the marginal, restarting fresh
/// i.i.d. paths from its KDE at clock s + r, and evolving for t. Compared by
/// W1 of the final KDEs; pass iff <= 3 combined stderr + 2 bandwidth.
/// The restart resamples from the intermediate KDE, so the check is
/// distributional, not pathwise.
inline FlowReport check_flow_property(const CoefficientModel& coeffs, const sde::InitialLaw& nu_s,
                                      const SpatialGrid& grid, double s, double r, double t,
                                      size_t n, double dt, double bandwidth, uint64_t seed,
                                      uint32_t replicate_base = 0) {
    // one leg: duration r + t
    auto one = detail::evolve_leg(coeffs, nu_s, s, r + t, n, dt, seed, replicate_base);

    // two legs: duration r, KDE, restart, duration t
    std::vector<double> two;
    if (r <= 0.0) {
        auto mid0 = sde::sample_initial(nu_s, n, seed, replicate_base + 1, s);
        std::vector<double> w(n, 1.0 / static_cast<double>(n));
        double bw = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(mid0.x, w);
        auto mid_kde = kde(mid0.x, w, bw, grid);
        two = detail::evolve_leg(coeffs, sde::InitialLaw::grid_density(mid_kde), s, t, n, dt,
                                 seed, replicate_base + 2);
    } else {
        auto mid = detail::evolve_leg(coeffs, nu_s, s, r, n, dt, seed, replicate_base + 1);
        std::vector<double> w(n, 1.0 / static_cast<double>(n));
        double bw = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(mid, w);
        auto mid_kde = kde(mid, w, bw, grid);
        two = detail::evolve_leg(coeffs, sde::InitialLaw::grid_density(mid_kde), s + r, t, n, dt,
                                 seed, replicate_base + 2);
    }

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    double bw = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(one, w);
    auto check = w1_two_sample_check(one, two, bw, grid, 2.0 * bw, seed);
    return {check.w1, check.se, bw, check.threshold, check.pass};
}

/// Empirical noise floor for the r = 0 control: W1 between independent
/// replicate pairs of the same r = 0 pipeline (one-leg vs restarted two-leg),
/// summarized as mean + 4 sd over the pairs.
inline double flow_noise_floor(const CoefficientModel& coeffs, const sde::InitialLaw& nu_s,
                               const SpatialGrid& grid, double s, double t, size_t n, double dt,
                               double bandwidth, uint64_t seed, int pairs = 6) {
    std::vector<double> vals;
    for (int k = 0; k < pairs; ++k) {
        auto rep = check_flow_property(coeffs, nu_s, grid, s, 0.0, t, n, dt, bandwidth, seed,
                                       static_cast<uint32_t>(100 + 10 * k));
        vals.push_back(rep.w1);
    }
    double m = 0.0;
    for (double v : vals) m += v;
    m /= vals.size();
    double sd = 0.0;
    for (double v : vals) sd += (v - m) * (v - m);
    sd = std::sqrt(sd / std::max<size_t>(1, vals.size() - 1));
    return m + 4.0 * sd;
}

} // namespace suplab::verify
