#pragma once

#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/fpe/perturbed.hpp"
#include "suplab/jumps/simulate.hpp"
#include "suplab/verify/w1_check.hpp"

namespace suplab::jumps {

struct MarginalLine {
    double t = 0.0;
    verify::W1Result w1;
};

/// Cross-validation of the two constructions of the perturbed dynamics:
/// KDE marginals of the thinning simulator against the kernel-perturbed
/// forward solver, W1 per checkpoint with the standard 3 se + 2 dx rule.
inline std::vector<MarginalLine> verify_jump_fpe_marginals(
    const CoefficientModel& coeffs, const JumpKernel& K, const DensitySlice& init_slice,
    double T, const std::vector<double>& checkpoints, const sde::SimConfig& sde_cfg,
    const fpe::SchemeConfig& pde_cfg, bool allow_degenerate = false) {
    auto traj = fpe::solve_perturbed_fpe(init_slice, coeffs, K, T, pde_cfg, allow_degenerate);

    auto init = sde::sample_initial(sde::InitialLaw::grid_density(init_slice),
                                    sde_cfg.n_particles, sde_cfg.seed, sde_cfg.replicate);
    auto bundle = simulate_jump_process(coeffs, K, init, sde_cfg);

    std::vector<MarginalLine> out;
    for (double t : checkpoints) {
        size_t step = bundle.step_of(t);
        auto marg = bundle.marginal(step);
        auto ref = traj.at_time(t);
        MarginalLine line;
        line.t = t;
        line.w1 = verify::w1_kde_check(marg, sde_cfg.bandwidth, ref, 2.0 * ref.grid.dx(),
                                       sde_cfg.seed + step);
        out.push_back(line);
    }
    return out;
}

} // namespace suplab::jumps
