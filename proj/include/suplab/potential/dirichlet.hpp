#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/fpe/linear.hpp"

namespace suplab::potential {

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

inline Estimate mean_stderr(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= std::max<size_t>(1, v.size() - 1);
    return {m, std::sqrt(s2 / static_cast<double>(v.size()))};
}

/// Monte Carlo solution of the parabolic Dirichlet problem: the mean of F at
/// the first space-time exit from (0,T) x (x_l, x_r), paths started at
/// clock s, position x. Exit detection is per step; the side-crossing time is
/// linearly interpolated and the exit position clipped to the boundary
/// (no Brownian-bridge correction: the O(sqrt dt) bias is budgeted by callers).
inline Estimate estimate_hitting_solution(const std::function<double(double, double)>& F,
                                          const CoefficientModel& coeffs, double x_l, double x_r,
                                          double T, double s, double x, size_t n_paths,
                                          double dt, uint64_t seed, uint32_t replicate = 0) {
    if (!(s >= 0.0 && s < T) || !(x > x_l && x < x_r))
        throw StartOutsideDomain("estimate_hitting_solution: (s, x) outside [0,T) x D");
    std::vector<double> vals(n_paths);
    parallel_for(n_paths, [&](size_t p) {
        RngStream rng(seed, static_cast<uint32_t>(p), replicate, RngChannel::Diffusion);
        double pos = x, t = 0.0;
        double out = 0.0;
        const double horizon = T - s;
        while (true) {
            double step = std::min(dt, horizon - t);
            bool last = step < dt * (1.0 - 1e-12) || t + step >= horizon - 1e-15;
            double clock = s + t;
            double a = coeffs.a(clock, pos);
            if (a < 0.0) throw NegativeDiffusion("hitting: a < 0");
            double nxt = pos + coeffs.b(clock, pos) * step + std::sqrt(a * step) * rng.normal();
            if (nxt <= x_l || nxt >= x_r) {
                double bnd = nxt <= x_l ? x_l : x_r;
                double frac = (bnd - pos) / (nxt - pos);
                out = F(clock + frac * step, bnd);
                break;
            }
            pos = nxt;
            t += step;
            if (last) {
                out = F(T, pos);
                break;
            }
        }
        vals[p] = out;
    });
    return mean_stderr(vals);
}

struct RepresentationReport {
    double mc_value = 0.0;
    double mc_stderr = 0.0;
    double pde_value = 0.0;
    double discrepancy = 0.0;
};

/// Discrete representation identity on the full window:
///   integral F d(mu_T)  vs  integral rho(0, .) d(mu_0),
/// the left side from solve_linear_fpe, the right side by Monte Carlo
/// (sample x0 ~ mu_0, run to T, average F(T, X_T); tau = T - t there).
inline RepresentationReport verify_representation(
    const std::function<double(double, double)>& F, const CoefficientModel& coeffs, double T,
    const DensitySlice& mu0, size_t n_paths, double sde_dt, const fpe::SchemeConfig& pde_cfg,
    uint64_t seed) {
    RepresentationReport rep;

    auto traj = fpe::solve_linear_fpe(mu0, coeffs, T, pde_cfg);
    auto uT = traj.slice(traj.n_times() - 1);
    double pde = 0.0;
    for (int i = 0; i < uT.grid.n_cells; ++i)
        pde += F(T, uT.grid.center(i)) * uT.values[i];
    rep.pde_value = pde * uT.grid.dx();

    long n_steps = std::max(1L, std::lround(T / sde_dt));
    double dt = T / static_cast<double>(n_steps);
    // inverse-CDF start from the same mu0 the PDE evolves
    std::vector<double> cdf(mu0.values.size() + 1, 0.0);
    for (size_t i = 0; i < mu0.values.size(); ++i)
        cdf[i + 1] = cdf[i] + mu0.values[i] * mu0.grid.dx();
    for (double& c : cdf) c /= cdf.back();

    std::vector<double> vals(n_paths);
    parallel_for(n_paths, [&](size_t p) {
        RngStream init(seed, static_cast<uint32_t>(p), 0, RngChannel::Init);
        double u = init.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        size_t cell = std::min(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1) - 1;
        double frac = (u - cdf[cell]) / std::max(cdf[cell + 1] - cdf[cell], 1e-300);
        double x = mu0.grid.edge(static_cast<int>(cell)) + frac * mu0.grid.dx();
        RngStream rng(seed, static_cast<uint32_t>(p), 0, RngChannel::Diffusion);
        for (long k = 0; k < n_steps; ++k) {
            double t = k * dt;
            double a = coeffs.a(t, x);
            x += coeffs.b(t, x) * dt + std::sqrt(a * dt) * rng.normal();
        }
        vals[p] = F(T, x);
    });
    auto mc = mean_stderr(vals);
    rep.mc_value = mc.value;
    rep.mc_stderr = mc.stderr_;
    rep.discrepancy = std::abs(rep.mc_value - rep.pde_value);
    return rep;
}

} // namespace suplab::potential
