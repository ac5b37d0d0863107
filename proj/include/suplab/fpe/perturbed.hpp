#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/fpe/linear.hpp"
#include "suplab/jumps/kernel.hpp"

namespace suplab::fpe {

namespace detail {

/// Discrete adjoint jump operator: (J u)_i = sum_j c(x_j) w_{j->i} u_j - c(x_i) u_i,
/// with each source row renormalized to unit mass so the pair is exactly
/// conservative on the truncated window.
struct JumpMatrix {
    // per source cell j: destination index range [first[j], first[j]+len[j])
    std::vector<int> first;
    std::vector<int> len;
    std::vector<double> weights; // concatenated rows, each row sums to 1/dx * dx = 1
    std::vector<double> rate;    // c(x_j)

    static JumpMatrix build(const jumps::JumpKernel& K, const SpatialGrid& grid, double t) {
        JumpMatrix m;
        const int n = grid.n_cells;
        m.first.resize(n);
        m.len.resize(n);
        m.rate.resize(n);
        for (int j = 0; j < n; ++j) {
            m.rate[j] = K.rate(t, grid.center(j));
            auto w = K.q.cell_masses(grid, grid.center(j));
            int lo = 0, hi = n - 1;
            while (lo < n && w[lo] == 0.0) ++lo;
            while (hi >= 0 && w[hi] == 0.0) --hi;
            if (lo > hi) { lo = j; hi = j; w[j] = 1.0; }
            double s = 0.0;
            for (int i = lo; i <= hi; ++i) s += w[i];
            m.first[j] = lo;
            m.len[j] = hi - lo + 1;
            for (int i = lo; i <= hi; ++i) m.weights.push_back(w[i] / s);
        }
        return m;
    }

    void apply(const std::vector<double>& u, std::vector<double>& du) const {
        const int n = static_cast<int>(u.size());
        std::fill(du.begin(), du.end(), 0.0);
        size_t off = 0;
        for (int j = 0; j < n; ++j) {
            double src = rate[j] * u[j];
            du[j] -= src;
            for (int k = 0; k < len[j]; ++k) du[first[j] + k] += src * weights[off + k];
            off += static_cast<size_t>(len[j]);
        }
    }
};

} // namespace detail

/// Forward solve of the kernel-perturbed Fokker-Planck equation: the linear
/// FPE step plus the explicit adjoint jump term
///   u += dt [ integral K(y, x) u(y) dy - c(x) u(x) ].
/// With K = 0 this reproduces solve_linear_fpe exactly.
inline DensityTrajectory solve_perturbed_fpe(const DensitySlice& u0,
                                             const CoefficientModel& coeffs,
                                             const jumps::JumpKernel& K, double T,
                                             SchemeConfig cfg, bool allow_degenerate = false) {
    const SpatialGrid grid = u0.grid;
    long n_steps = detail::resolve_steps(T, cfg.dt);

    if (!std::isfinite(K.lambda_bound) || !(K.lambda_bound >= 0.0))
        throw KernelUnbounded("solve_perturbed_fpe: kernel rate bound not finite");
    for (int i = 0; i < grid.n_cells; i += std::max(1, grid.n_cells / 64)) {
        if (K.rate(0.0, grid.center(i)) > K.lambda_bound * (1.0 + 1e-12))
            throw KernelUnbounded("solve_perturbed_fpe: sampled c exceeds lambda_bound");
    }

    auto ext = sample_extrema(coeffs, grid, 0.0, T);
    bool pure_jump = ext.max_a == 0.0 && ext.max_abs_b == 0.0;
    if (!allow_degenerate && !pure_jump && !(ext.min_a > 0.0))
        throw Error("solve_perturbed_fpe: diffusion degenerates; pass allow_degenerate");
    if (cfg.theta == 0 && ext.max_a > 0.0) {
        double cfl = grid.dx() * grid.dx() / ext.max_a;
        if (cfg.dt > cfl * (1.0 + 1e-12))
            throw CflViolation("explicit scheme needs dt <= dx^2/max(a)");
    }

    DensityTrajectory out;
    out.grid = grid;
    const int stride = cfg.effective_store_every(n_steps);
    std::vector<double> u = u0.values, du(u.size());
    out.times.push_back(0.0);
    out.values.push_back(u);

    LinearStepper stepper(coeffs, grid, cfg);
    const bool has_jumps = K.lambda_bound > 0.0 && K.c0 > 0.0;
    detail::JumpMatrix jm;
    if (has_jumps) jm = detail::JumpMatrix::build(K, grid, 0.0);

    for (long k = 0; k < n_steps; ++k) {
        double t = k * cfg.dt;
        if (!pure_jump) stepper.step(u, t, cfg.dt);
        if (has_jumps) {
            jm.apply(u, du);
            for (size_t i = 0; i < u.size(); ++i) u[i] += cfg.dt * du[i];
        }
        detail::postprocess_slice(u, grid.dx(), cfg, out.max_clamp, out.max_mass_drift, k);
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            out.times.push_back((k + 1) * cfg.dt);
            out.values.push_back(u);
        }
    }
    return out;
}

} // namespace suplab::fpe
