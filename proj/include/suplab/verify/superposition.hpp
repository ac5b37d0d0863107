#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/verify/w1_check.hpp"

namespace suplab::verify {

struct SuperpositionLine {
    double t = 0.0;
    W1Result w1;
};

/// Superposition-of-marginals check: W1 between the KDE of the path-bundle
/// marginal and the density-trajectory slice at each checkpoint, pass iff
/// <= 3 bootstrap se + 2 dx. The bundle must have been generated with
/// initial law = slice 0 of the trajectory.
inline std::vector<SuperpositionLine> check_superposition(const DensityTrajectory& u_traj,
                                                          const PathBundle& bundle,
                                                          const std::vector<double>& checkpoints,
                                                          double bandwidth, uint64_t seed) {
    std::vector<SuperpositionLine> out;
    for (double t : checkpoints) {
        if (t < -1e-12 || t > u_traj.t_end() + 1e-12 || t > bundle.n_steps * bundle.dt + 1e-9)
            throw CheckpointOutsideTrajectory("check_superposition: t = " + std::to_string(t));
        size_t step = bundle.step_of(t);
        auto marg = bundle.marginal(step);
        auto ref = u_traj.at_time(t);
        SuperpositionLine line;
        line.t = t;
        line.w1 = w1_kde_check(marg, bandwidth, ref, 2.0 * u_traj.grid.dx(), seed + step);
        out.push_back(line);
    }
    return out;
}

} // namespace suplab::verify
