#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/jumps/kernel.hpp"
#include "suplab/sde/config.hpp"
#include "suplab/sde/engine.hpp"

namespace suplab::jumps {

/// Simulate the kernel-perturbed process by thinning: a dominating Poisson
/// clock of rate lambda_bound proposes ticks; a tick at state (t, x) is
/// accepted with probability c(t, x) / lambda_bound and displaces x by a draw
/// from q. Euler-Maruyama diffusion runs between ticks. Jumps are spatial
/// only; the clock component stays s + t exactly, and no path is killed.
///
/// Clock ticks and accepts draw from the JumpClock sub-stream, displacements
/// from JumpMark, Brownian increments from Diffusion: with c = 0 the paths
/// are bit-identical to plain diffusion under the same seed.
inline PathBundle simulate_jump_process(const CoefficientModel& coeffs, const JumpKernel& K,
                                        const ParticleEnsemble& init, const sde::SimConfig& cfg) {
    const size_t n = init.size();
    long n_steps = std::max(1L, std::lround(cfg.T / cfg.dt));
    const double dt = cfg.T / static_cast<double>(n_steps);
    const double lambda = K.lambda_bound;

    PathBundle b;
    b.start_clock = init.start_clock;
    b.dt = dt;
    b.n_paths = n;
    b.n_steps = static_cast<size_t>(n_steps);
    size_t stride = cfg.record_full_paths ? 1 : (cfg.snap_stride ? cfg.snap_stride : b.n_steps);
    for (size_t k = 0; k <= b.n_steps; k += stride) b.recorded_steps.push_back(k);
    if (b.recorded_steps.back() != b.n_steps) b.recorded_steps.push_back(b.n_steps);
    b.states.resize(b.recorded_steps.size() * n);

    std::vector<std::vector<JumpEvent>> per_path_events(n);

    parallel_for(n, [&](size_t i) {
        RngStream diff(cfg.seed, static_cast<uint32_t>(i), cfg.replicate, RngChannel::Diffusion);
        RngStream clock(cfg.seed, static_cast<uint32_t>(i), cfg.replicate, RngChannel::JumpClock);
        RngStream mark(cfg.seed, static_cast<uint32_t>(i), cfg.replicate, RngChannel::JumpMark);
        double x = init.x[i];
        double next_tick = lambda > 0.0 ? clock.exponential(lambda) : 2.0 * cfg.T + 1.0;
        size_t row = 0;
        if (b.recorded_steps[row] == 0) b.states[row++ * n + i] = x;
        for (long k = 0; k < n_steps; ++k) {
            double t = k * dt;
            double s_clock = init.start_clock + t;
            double a = coeffs.a(s_clock, x);
            if (a < 0.0) throw NegativeDiffusion("simulate_jump_process: a < 0");
            double d_diff = coeffs.b(s_clock, x) * dt + std::sqrt(a * dt) * diff.normal();
            // spatial jumps at the ticks inside this step, applied before the
            // diffusion increment (O(dt) weak error, stream-deterministic)
            while (lambda > 0.0 && next_tick < t + dt) {
                double c = K.rate(init.start_clock + next_tick, x);
                if (c > lambda * (1.0 + 1e-12))
                    throw DominationViolated("thinning: c(t,x) = " + std::to_string(c) +
                                             " > lambda = " + std::to_string(lambda));
                if (clock.uniform() < c / lambda) {
                    double z = K.q.sample(mark);
                    per_path_events[i].push_back(
                        {static_cast<uint32_t>(i), next_tick, x, x + z});
                    x += z;
                }
                next_tick += clock.exponential(lambda);
            }
            x += d_diff;
            if (row < b.recorded_steps.size() &&
                b.recorded_steps[row] == static_cast<size_t>(k + 1))
                b.states[row++ * n + i] = x;
        }
    });
    // deterministic merge by (path id, time)
    for (size_t i = 0; i < n; ++i)
        b.events.insert(b.events.end(), per_path_events[i].begin(), per_path_events[i].end());
    return b;
}

} // namespace suplab::jumps
