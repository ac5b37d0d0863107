#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/sde/config.hpp"

namespace suplab::sde {

/// Sample N i.i.d. particles from an initial law at the given start clock.
/// GridDensity laws are sampled by inverse CDF on the grid, linear in-cell.
inline ParticleEnsemble sample_initial(const InitialLaw& law, size_t n, uint64_t seed,
                                       uint32_t replicate = 0, double start_clock = 0.0,
                                       int dim = 1) {
    if (n == 0) throw EmptyEnsemble("sample_initial: N must be >= 1");
    ParticleEnsemble ens;
    ens.start_clock = start_clock;
    ens.x.resize(n);
    if (dim == 2) ens.y.resize(n);
    ens.weights.assign(n, 1.0 / static_cast<double>(n));

    std::vector<double> cdf;
    if (law.kind == InitialLaw::Kind::GridDensity) {
        const auto& d = law.density;
        cdf.resize(d.values.size() + 1, 0.0);
        for (size_t i = 0; i < d.values.size(); ++i)
            cdf[i + 1] = cdf[i] + d.values[i] * d.grid.dx();
        double total = cdf.back();
        if (total <= 0.0) throw NotNormalized("sample_initial: zero-mass grid density");
        for (double& c : cdf) c /= total;
    }

    auto draw = [&](RngStream& rng) -> double {
        switch (law.kind) {
        case InitialLaw::Kind::Gaussian: return law.mean + std::sqrt(law.var) * rng.normal();
        case InitialLaw::Kind::Uniform: return rng.uniform(law.lo, law.hi);
        case InitialLaw::Kind::GridDensity: {
            double u = rng.uniform();
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            size_t cell = std::min(static_cast<size_t>(it - cdf.begin()),
                                   cdf.size() - 1) - 1;
            double span = cdf[cell + 1] - cdf[cell];
            double frac = span > 0.0 ? (u - cdf[cell]) / span : 0.5;
            return law.density.grid.edge(static_cast<int>(cell)) +
                   frac * law.density.grid.dx();
        }
        }
        return 0.0;
    };

    parallel_for(n, [&](size_t i) {
        RngStream rng(seed, static_cast<uint32_t>(i), replicate, RngChannel::Init);
        ens.x[i] = draw(rng);
        if (dim == 2) ens.y[i] = draw(rng);
    });
    return ens;
}

/// One Euler-Maruyama step for every particle:
///   x <- x + b(s+t, x) dt + sqrt(a(s+t, x) dt) xi.
/// The clock component advances exactly (uniform motion to the right): the
/// ensemble counts steps of one fixed dt instead of accumulating time.
/// streams[i] must be the particle-i diffusion stream; it is consumed in a
/// fixed per-particle order, so results are thread-count independent.
inline void em_step(ParticleEnsemble& ens, const CoefficientModel& coeffs, double dt,
                    std::span<RngStream> streams) {
    if (!(dt > 0.0)) throw Error("em_step: dt must be > 0");
    if (ens.steps == 0) ens.step_dt = dt;
    else if (dt != ens.step_dt)
        throw Error("em_step: dt must stay fixed within a run (clock is steps * dt)");
    const double t = ens.clock();
    const bool d2 = ens.dim() == 2;
    parallel_for(ens.size(), [&](size_t i) {
        double a = coeffs.a(t, ens.x[i]);
        if (a < 0.0)
            throw NegativeDiffusion("em_step: a(t,x) < 0 at x = " + std::to_string(ens.x[i]));
        double b = coeffs.b(t, ens.x[i]);
        ens.x[i] += b * dt + std::sqrt(a * dt) * streams[i].normal();
        if (d2) {
            double ay = coeffs.a(t, ens.y[i]);
            if (ay < 0.0) throw NegativeDiffusion("em_step: a(t,y) < 0");
            double by = coeffs.b(t, ens.y[i]);
            ens.y[i] += by * dt + std::sqrt(ay * dt) * streams[i].normal();
        }
    });
    ++ens.steps;
}

/// March one free particle from (start_clock, x0) for n_steps of size dt,
/// invoking cb(step_index, elapsed_after, x_after) after every step.
template <typename StepCb>
inline void march_particle(const CoefficientModel& coeffs, double x0, double start_clock,
                           double dt, long n_steps, RngStream& rng, StepCb&& cb) {
    double x = x0;
    for (long k = 0; k < n_steps; ++k) {
        double t = start_clock + k * dt;
        double a = coeffs.a(t, x);
        if (a < 0.0) throw NegativeDiffusion("march_particle: a < 0");
        x += coeffs.b(t, x) * dt + std::sqrt(a * dt) * rng.normal();
        cb(k, (k + 1) * dt, x);
    }
}

/// Simulate an ensemble of free (optionally reflected) paths and record
/// positions: every step if record_full_paths, otherwise at snap_stride
/// multiples plus the final step.
inline PathBundle simulate_paths(const CoefficientModel& coeffs, const ParticleEnsemble& init,
                                 const SimConfig& cfg, const SpatialGrid* window = nullptr) {
    const size_t n = init.size();
    long n_steps = std::max(1L, std::lround(cfg.T / cfg.dt));
    const double dt = cfg.T / static_cast<double>(n_steps);

    PathBundle b;
    b.start_clock = init.start_clock;
    b.dt = dt;
    b.n_paths = n;
    b.n_steps = static_cast<size_t>(n_steps);
    size_t stride = cfg.record_full_paths ? 1 : (cfg.snap_stride ? cfg.snap_stride : b.n_steps);
    for (size_t k = 0; k <= b.n_steps; k += stride) b.recorded_steps.push_back(k);
    if (b.recorded_steps.back() != b.n_steps) b.recorded_steps.push_back(b.n_steps);
    b.states.resize(b.recorded_steps.size() * n);

    std::vector<uint8_t> escaped(n, 0);
    parallel_for(n, [&](size_t i) {
        RngStream rng(cfg.seed, static_cast<uint32_t>(i), cfg.replicate, RngChannel::Diffusion);
        double x = init.x[i];
        size_t row = 0;
        if (b.recorded_steps[row] == 0) b.states[row++ * n + i] = x;
        for (long k = 0; k < n_steps; ++k) {
            double t = init.start_clock + k * dt;
            double a = coeffs.a(t, x);
            if (a < 0.0) throw NegativeDiffusion("simulate_paths: a < 0");
            x += coeffs.b(t, x) * dt + std::sqrt(a * dt) * rng.normal();
            if (window) {
                if (cfg.boundary == Boundary::Reflect) {
                    while (x < window->x_min || x > window->x_max) {
                        if (x < window->x_min) x = 2.0 * window->x_min - x;
                        if (x > window->x_max) x = 2.0 * window->x_max - x;
                    }
                } else if (!window->contains(x)) {
                    escaped[i] = 1;
                }
            }
            if (row < b.recorded_steps.size() &&
                b.recorded_steps[row] == static_cast<size_t>(k + 1))
                b.states[row++ * n + i] = x;
        }
    });
    for (uint8_t e : escaped) b.escaped_count += e;
    return b;
}

} // namespace suplab::sde
