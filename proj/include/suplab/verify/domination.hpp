#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/fpe/linear.hpp"

namespace suplab::verify {

struct DominationLine {
    double t = 0.0;
    double max_violation = 0.0; // max over cells of nu - c mu - tol(mu)
    bool pass = false;
};

struct DominationReport {
    std::vector<DominationLine> lines;
    bool pass = true;
};

/// Domination propagation: if nu_0 <= c mu_0 cellwise, both evolved by the
/// same linear solver with the same frozen coefficients, then
/// nu_t <= c mu_t + (1e-8 + 1e-6 mu_t) cellwise at every checkpoint.
inline DominationReport check_domination(const DensitySlice& nu0, double c,
                                         const DensitySlice& mu0, const CoefficientModel& coeffs,
                                         double T, const std::vector<double>& checkpoints,
                                         const fpe::SchemeConfig& cfg,
                                         bool allow_degenerate = false) {
    if (!(nu0.grid == mu0.grid)) throw GridMismatch("check_domination: grids differ");
    for (size_t i = 0; i < nu0.values.size(); ++i)
        if (nu0.values[i] > c * mu0.values[i] + 1e-12)
            throw InitialDominationFails("check_domination: nu0 > c mu0 at cell " +
                                         std::to_string(i));

    auto nu_traj = fpe::solve_linear_fpe(nu0, coeffs, T, cfg, allow_degenerate);
    auto mu_traj = fpe::solve_linear_fpe(mu0, coeffs, T, cfg, allow_degenerate);

    DominationReport rep;
    for (double t : checkpoints) {
        auto nu = nu_traj.at_time(t);
        auto mu = mu_traj.at_time(t);
        double worst = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < nu.values.size(); ++i) {
            double tol = 1e-8 + 1e-6 * mu.values[i];
            worst = std::max(worst, nu.values[i] - c * mu.values[i] - tol);
        }
        DominationLine line{t, worst, worst <= 0.0};
        rep.pass = rep.pass && line.pass;
        rep.lines.push_back(line);
    }
    return rep;
}

/// nu0 proportional to mu0 restricted to {x > threshold}, renormalized.
inline DensitySlice restricted_renormalized(const DensitySlice& mu0, double threshold) {
    DensitySlice nu = mu0;
    for (int i = 0; i < nu.grid.n_cells; ++i)
        if (nu.grid.center(i) <= threshold) nu.values[i] = 0.0;
    nu.normalize();
    return nu;
}

} // namespace suplab::verify
