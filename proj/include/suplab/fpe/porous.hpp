#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/fpe/linear.hpp"
#include "suplab/fpe/scheme.hpp"
#include "suplab/fpe/tridiag.hpp"

namespace suplab::fpe {

/// Semi-implicit solve of the porous-media Fokker-Planck equation
///   d/dt u = d_xx beta(x, u) - d_x( D(x) b(u) u ).
///
/// The diffusion flux is linearized around the previous slice,
///   beta(u^{n+1}) ~ beta(u^n) + beta_r(u^n) (u^{n+1} - u^n),
/// and solved implicitly (one tridiagonal system per step, no Newton loop);
/// the drift D(x) b(u) u is explicit upwind. Everything is flux-differenced
/// with zero-flux ends, so mass is conserved exactly.
inline DensityTrajectory solve_porous_media(const DensitySlice& u0, const PorousTriple& triple,
                                            double T, SchemeConfig cfg) {
    const SpatialGrid grid = u0.grid;
    const int n = grid.n_cells;
    const double dx = grid.dx();
    long n_steps = detail::resolve_steps(T, cfg.dt);

    // H_beta,1 spot check: beta_r > 0 on sampled r in [0, 1.5 max u0]
    {
        double umax = *std::max_element(u0.values.begin(), u0.values.end());
        for (int i = 0; i <= 32; ++i) {
            double r = 1.5 * umax * i / 32.0;
            for (int j = 0; j < n; j += std::max(1, n / 16)) {
                if (!(triple.beta_r(grid.center(j), r) > 0.0))
                    throw NonmonotoneBeta("beta_r <= 0 at r = " + std::to_string(r));
            }
        }
    }

    DensityTrajectory out;
    out.grid = grid;
    const int stride = cfg.effective_store_every(n_steps);
    std::vector<double> u = u0.values;
    out.times.push_back(0.0);
    out.values.push_back(u);

    std::vector<double> br(n), g(n), flux(n + 1);
    std::vector<double> lower(n), diag(n), upper(n), scratch(n);
    const double r2 = cfg.dt / (dx * dx);

    for (long k = 0; k < n_steps; ++k) {
        double t = k * cfg.dt;
        for (int i = 0; i < n; ++i) {
            double x = grid.center(i);
            br[i] = triple.beta_r(x, u[i]);
            if (!(br[i] > 0.0))
                throw NonmonotoneBeta("beta_r <= 0 sampled at x = " + std::to_string(x));
            // explicit remainder of the linearized diffusion flux
            g[i] = triple.beta(x, u[i]) - br[i] * u[i];
        }

        // explicit upwind drift flux at interior edges
        flux[0] = flux[n] = 0.0;
        for (int e = 1; e < n; ++e) {
            double ue = 0.5 * (u[e - 1] + u[e]);
            double ve = triple.D(grid.edge(e)) * triple.bfun(ue);
            flux[e] = -(ve >= 0.0 ? ve * u[e - 1] : ve * u[e]);
        }
        (void)t;

        // rhs: u + explicit flux differences (drift and the beta remainder)
        double prev = 0.0;
        for (int i = 0; i < n; ++i) {
            double fr = flux[i + 1];
            double gl = i > 0 ? g[i - 1] - g[i] : 0.0;
            double gr = i < n - 1 ? g[i + 1] - g[i] : 0.0;
            u[i] += cfg.dt / dx * (fr - prev) + r2 * (gl + gr);
            prev = fr;
        }

        // implicit linearized diffusion d_xx( beta_r(u^n) u^{n+1} )
        for (int i = 0; i < n; ++i) {
            double left = i > 0 ? 1.0 : 0.0, right = i < n - 1 ? 1.0 : 0.0;
            diag[i] = 1.0 + r2 * br[i] * (left + right);
            lower[i] = i > 0 ? -r2 * br[i - 1] : 0.0;
            upper[i] = i < n - 1 ? -r2 * br[i + 1] : 0.0;
        }
        solve_tridiagonal(lower, diag, upper, u, scratch);

        detail::postprocess_slice(u, dx, cfg, out.max_clamp, out.max_mass_drift, k);
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            out.times.push_back((k + 1) * cfg.dt);
            out.values.push_back(u);
        }
    }
    return out;
}

/// Freeze a porous-media solution into linear time-dependent coefficients
/// a^u = 2 beta(x, u)/u, b^u = D(x) b(u) along the trajectory.
inline CoefficientModel linearize(const DensityTrajectory& traj, const PorousTriple& triple) {
    auto shared = std::make_shared<DensityTrajectory>(traj);
    return CoefficientModel::linearized(std::move(shared), triple);
}

} // namespace suplab::fpe
