#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/kde.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/sde/engine.hpp"

namespace suplab::sde {

/// Particle simulation of the linearized McKean-Vlasov SDE: coefficients
/// frozen along the given density trajectory, initial law = slice 0.
/// For density-independent coefficients this is bit-identical to
/// simulate_paths with the same seed discipline.
inline PathBundle simulate_linearized(const DensityTrajectory& u_traj,
                                      const CoefficientModel& coeffs, const SimConfig& cfg,
                                      const SpatialGrid* window = nullptr) {
    if (u_traj.t_end() < cfg.T - 1e-12)
        throw TrajectoryTooShort("simulate_linearized: trajectory covers [0, " +
                                 std::to_string(u_traj.t_end()) + "] < T = " +
                                 std::to_string(cfg.T));
    auto init = sample_initial(InitialLaw::grid_density(u_traj.slice(0)), cfg.n_particles,
                               cfg.seed, cfg.replicate);
    return simulate_paths(coeffs, init, cfg, window);
}

struct SelfConsistentResult {
    PathBundle bundle;
    DensityTrajectory empirical; // binned-KDE slices at every refresh time
    std::vector<std::string> warnings;
};

/// Self-consistent Nemytskii particle approximation: Euler-Maruyama steps
/// alternate with a KDE refresh every kde_refresh_every steps; coefficients
/// a^u = 2 beta(x,u)/u, b^u = D(x) b(u) are read from the latest estimate.
/// The in-loop estimate is the binned (cloud-in-cell) KDE; its O(dx) binning
/// error is far below the bandwidth at the supported particle counts.
inline SelfConsistentResult simulate_self_consistent(const PorousTriple& triple,
                                                     const InitialLaw& law,
                                                     const SimConfig& cfg,
                                                     const SpatialGrid& grid) {
    SelfConsistentResult res;
    if (cfg.n_particles < 1000)
        res.warnings.push_back("self-consistent run with N = " +
                               std::to_string(cfg.n_particles) +
                               " < 1000: Nemytskii quotient is statistically meaningless");
    if (cfg.kde_refresh_every < 1) throw Error("kde_refresh_every must be >= 1");

    const size_t n = cfg.n_particles;
    long n_steps = std::max(1L, std::lround(cfg.T / cfg.dt));
    const double dt = cfg.T / static_cast<double>(n_steps);

    auto init = sample_initial(law, n, cfg.seed, cfg.replicate);
    std::vector<double> x = init.x;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));

    PathBundle& b = res.bundle;
    b.start_clock = init.start_clock;
    b.dt = dt;
    b.n_paths = n;
    b.n_steps = static_cast<size_t>(n_steps);
    size_t stride = cfg.record_full_paths ? 1 : (cfg.snap_stride ? cfg.snap_stride : b.n_steps);
    for (size_t k = 0; k <= b.n_steps; k += stride) b.recorded_steps.push_back(k);
    if (b.recorded_steps.back() != b.n_steps) b.recorded_steps.push_back(b.n_steps);
    b.states.resize(b.recorded_steps.size() * n);

    auto model = CoefficientModel::porous_media(triple);
    DensitySlice current;

    res.empirical.grid = grid;
    auto refresh = [&](double t_now) {
        current = kde_binned(x, w, cfg.bandwidth, grid);
        model.bind_density(&current);
        res.empirical.times.push_back(t_now);
        res.empirical.values.push_back(current.values);
    };

    std::vector<RngStream> streams(n);
    for (size_t i = 0; i < n; ++i)
        streams[i] = RngStream(cfg.seed, static_cast<uint32_t>(i), cfg.replicate,
                               RngChannel::Diffusion);

    size_t row = 0;
    if (b.recorded_steps[row] == 0) {
        for (size_t i = 0; i < n; ++i) b.states[row * n + i] = x[i];
        ++row;
    }
    for (long k = 0; k < n_steps; ++k) {
        if (k % cfg.kde_refresh_every == 0) refresh(k * dt);
        double t = init.start_clock + k * dt;
        parallel_for(n, [&](size_t i) {
            double a = model.a(t, x[i]);
            if (a < 0.0) throw NegativeDiffusion("self-consistent: a < 0");
            x[i] += model.b(t, x[i]) * dt + std::sqrt(a * dt) * streams[i].normal();
        });
        if (row < b.recorded_steps.size() && b.recorded_steps[row] == static_cast<size_t>(k + 1)) {
            for (size_t i = 0; i < n; ++i) b.states[row * n + i] = x[i];
            ++row;
        }
    }
    refresh(cfg.T); // final empirical slice
    return res;
}

} // namespace suplab::sde
