#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/fpe/scheme.hpp"
#include "suplab/fpe/tridiag.hpp"

namespace suplab::fpe {

/// One conservative finite-volume step of
///   d/dt u = d_x [ (1/2) d_x(a u) - b u ]
/// with zero-flux boundaries: upwind drift flux, theta-scheme diffusion.
/// The update is flux-differenced, so mass is conserved exactly (the
/// implicit matrix has unit column sums).
class LinearStepper {
public:
    LinearStepper(const CoefficientModel& coeffs, const SpatialGrid& grid,
                  const SchemeConfig& cfg)
        : coeffs_(&coeffs), grid_(grid), cfg_(cfg) {
        const size_t n = static_cast<size_t>(grid.n_cells);
        a_.resize(n);
        flux_.resize(n + 1);
        lower_.resize(n);
        diag_.resize(n);
        upper_.resize(n);
        scratch_.resize(n);
    }

    /// Advance u from time t to t + dt in place.
    void step(std::vector<double>& u, double t, double dt) {
        const int n = grid_.n_cells;
        const double dx = grid_.dx();

        // upwind advective flux at interior edges; zero-flux at the ends
        flux_[0] = flux_[n] = 0.0;
        for (int e = 1; e < n; ++e) {
            double be = coeffs_->b(t, grid_.edge(e));
            flux_[e] = -(be >= 0.0 ? be * u[e - 1] : be * u[e]);
        }

        if (cfg_.theta == 0) {
            for (int i = 0; i < n; ++i) a_[i] = coeffs_->a(t, grid_.center(i)) * u[i];
            for (int e = 1; e < n; ++e) flux_[e] += (a_[e] - a_[e - 1]) / (2.0 * dx);
            double prev = 0.0; // flux at edge i while updating cell i
            for (int i = 0; i < n; ++i) {
                double fr = flux_[i + 1];
                u[i] += dt / dx * (fr - prev);
                prev = fr;
            }
        } else {
            double prev = 0.0;
            for (int i = 0; i < n; ++i) {
                double fr = flux_[i + 1];
                u[i] += dt / dx * (fr - prev);
                prev = fr;
            }
            // implicit diffusion, coefficients at the new time level
            for (int i = 0; i < n; ++i) a_[i] = coeffs_->a(t + dt, grid_.center(i));
            double r = dt / (2.0 * dx * dx);
            for (int i = 0; i < n; ++i) {
                double left = i > 0 ? 1.0 : 0.0, right = i < n - 1 ? 1.0 : 0.0;
                diag_[i] = 1.0 + r * a_[i] * (left + right);
                lower_[i] = i > 0 ? -r * a_[i - 1] : 0.0;
                upper_[i] = i < n - 1 ? -r * a_[i + 1] : 0.0;
            }
            solve_tridiagonal(lower_, diag_, upper_, u, scratch_);
        }
    }

private:
    const CoefficientModel* coeffs_;
    SpatialGrid grid_;
    SchemeConfig cfg_;
    std::vector<double> a_, flux_, lower_, diag_, upper_, scratch_;
};

namespace detail {

/// Clamp tiny negatives, guard real ones, track mass drift; renormalize
/// only when a clamp actually fired.
inline void postprocess_slice(std::vector<double>& u, double dx, const SchemeConfig& cfg,
                              double& max_clamp, double& max_drift, long step) {
    bool clamped = false;
    for (double& v : u) {
        if (v < 0.0) {
            if (v < -1e-12)
                throw NegativeDensity("FPE scheme produced " + std::to_string(v) + " at step " +
                                      std::to_string(step));
            max_clamp = std::max(max_clamp, -v);
            v = 0.0;
            clamped = true;
        }
    }
    double mass = 0.0;
    for (double v : u) mass += v;
    mass *= dx;
    max_drift = std::max(max_drift, std::abs(mass - 1.0));
    if (std::abs(mass - 1.0) > cfg.mass_tol)
        throw MassDrift("FPE mass drift " + std::to_string(mass - 1.0) + " at step " +
                        std::to_string(step));
    if (clamped)
        for (double& v : u) v /= mass;
}

inline long resolve_steps(double T, double& dt) {
    long n = std::max(1L, std::lround(T / dt));
    dt = T / static_cast<double>(n);
    return n;
}

} // namespace detail

/// Forward solve of the linear Fokker-Planck equation
///   d/dt u = (1/2) d_xx(a u) - d_x(b u)
/// on {0, dt, ..., T}. Every produced slice is nonnegative with unit mass
/// to mass_tol. Ellipticity is spot-checked unless allow_degenerate is set.
inline DensityTrajectory solve_linear_fpe(const DensitySlice& u0, const CoefficientModel& coeffs,
                                          double T, SchemeConfig cfg,
                                          bool allow_degenerate = false) {
    const SpatialGrid grid = u0.grid;
    long n_steps = detail::resolve_steps(T, cfg.dt);

    auto ext = sample_extrema(coeffs, grid, 0.0, T);
    if (!allow_degenerate && !(ext.min_a > 0.0))
        throw Error("solve_linear_fpe: diffusion degenerates (min a = " +
                    std::to_string(ext.min_a) + "); pass allow_degenerate to override");
    if (ext.min_a < 0.0)
        throw NegativeDiffusion("solve_linear_fpe: a < 0 sampled");
    if (cfg.theta == 0 && ext.max_a > 0.0) {
        double cfl = grid.dx() * grid.dx() / ext.max_a;
        if (cfg.dt > cfl * (1.0 + 1e-12))
            throw CflViolation("explicit scheme needs dt <= dx^2/max(a) = " +
                               std::to_string(cfl) + ", got dt = " + std::to_string(cfg.dt));
    }

    DensityTrajectory out;
    out.grid = grid;
    const int stride = cfg.effective_store_every(n_steps);
    std::vector<double> u = u0.values;
    out.times.push_back(0.0);
    out.values.push_back(u);

    LinearStepper stepper(coeffs, grid, cfg);
    for (long k = 0; k < n_steps; ++k) {
        double t = k * cfg.dt;
        stepper.step(u, t, cfg.dt);
        detail::postprocess_slice(u, grid.dx(), cfg, out.max_clamp, out.max_mass_drift, k);
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            out.times.push_back((k + 1) * cfg.dt);
            out.values.push_back(u);
        }
    }
    return out;
}

} // namespace suplab::fpe
