#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/fpe/linear.hpp"
#include "suplab/fpe/scheme.hpp"
#include "suplab/fpe/tridiag.hpp"

namespace suplab::fpe {

/// Space-time field rho(t_k, x_i) produced by the backward solver.
struct BackwardField {
    SpatialGrid grid;
    std::vector<double> times; // ascending, 0 .. T
    std::vector<std::vector<double>> values;

    double value_at(double t, double x) const {
        if (times.empty()) throw TrajectoryTooShort("BackwardField: empty");
        int i = grid.cell_of(x);
        if (t <= times.front()) return values.front()[i];
        if (t >= times.back()) return values.back()[i];
        auto it = std::upper_bound(times.begin(), times.end(), t);
        size_t k = static_cast<size_t>(it - times.begin());
        double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return (1.0 - w) * values[k - 1][i] + w * values[k][i];
    }
};

namespace detail {

struct Band {
    std::vector<double> lo, di, up; // tridiagonal bands
    explicit Band(int n) : lo(n, 0.0), di(n, 0.0), up(n, 0.0) {}
};

/// Forward upwind advection generator M with du = M u (zero-flux ends).
inline Band advection_band(const CoefficientModel& coeffs, const SpatialGrid& grid, double t) {
    const int n = grid.n_cells;
    const double dx = grid.dx();
    Band m(n);
    for (int e = 1; e < n; ++e) {
        double be = coeffs.b(t, grid.edge(e));
        if (be >= 0.0) {
            // flux b u_{e-1} leaves cell e-1, enters cell e
            m.di[e - 1] -= be / dx;
            m.lo[e] += be / dx;
        } else {
            m.di[e] += be / dx;
            m.up[e - 1] -= be / dx;
        }
    }
    return m;
}

/// Forward diffusion generator, flux form (1/2) d_xx(a u), zero-flux ends.
inline Band diffusion_band(const CoefficientModel& coeffs, const SpatialGrid& grid, double t) {
    const int n = grid.n_cells;
    const double r = 1.0 / (2.0 * grid.dx() * grid.dx());
    Band m(n);
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = coeffs.a(t, grid.center(i));
    for (int i = 0; i < n; ++i) {
        double left = i > 0 ? 1.0 : 0.0, right = i < n - 1 ? 1.0 : 0.0;
        m.di[i] = -r * a[i] * (left + right);
        if (i > 0) m.lo[i] = r * a[i - 1];
        if (i < n - 1) m.up[i] = r * a[i + 1];
    }
    return m;
}

inline Band transpose(const Band& m) {
    const int n = static_cast<int>(m.di.size());
    Band t(n);
    t.di = m.di;
    for (int i = 0; i < n - 1; ++i) t.lo[i + 1] = m.up[i];
    for (int i = 1; i < n; ++i) t.up[i - 1] = m.lo[i];
    return t;
}

/// y = (I + dt M) x
inline void apply_plus(const Band& m, double dt, const std::vector<double>& x,
                       std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        double s = (1.0 + dt * m.di[i]) * x[i];
        if (i > 0) s += dt * m.lo[i] * x[i - 1];
        if (i < n - 1) s += dt * m.up[i] * x[i + 1];
        y[i] = s;
    }
}

} // namespace detail

/// Backward Kolmogorov / parabolic Dirichlet solve of
///   d/dt rho + L_t rho = 0 on (0,T) x D,  rho = F on the parabolic boundary.
///
/// Full-window domains march the exact transpose of the forward stencil, so
/// the discrete representation identity
///   sum_i rho(0, x_i) u0(x_i) dx = sum_i F(T, x_i) u(T, x_i) dx
/// holds to round-off against solve_linear_fpe with the same config.
/// Strict sub-domains use a direct nondivergence discretization with
/// Dirichlet ghost values from F.
inline BackwardField solve_backward_kolmogorov(const std::function<double(double, double)>& F,
                                               const CoefficientModel& coeffs,
                                               const SpatialGrid& grid, double x_l, double x_r,
                                               double T, SchemeConfig cfg) {
    const int n = grid.n_cells;
    const double dx = grid.dx();
    long n_steps = detail::resolve_steps(T, cfg.dt);
    const int stride = cfg.effective_store_every(n_steps);
    const bool full_window =
        x_l <= grid.x_min + 0.5 * dx && x_r >= grid.x_max - 0.5 * dx;
    if (x_l < grid.x_min - 1e-12 || x_r > grid.x_max + 1e-12)
        throw Error("solve_backward_kolmogorov: domain exceeds the grid window");

    if (cfg.theta == 0) {
        auto ext = sample_extrema(coeffs, grid, 0.0, T);
        double cfl = dx * dx / std::max(ext.max_a, 1e-300);
        if (cfg.dt > cfl * (1.0 + 1e-12))
            throw CflViolation("backward explicit scheme needs dt <= dx^2/max(a)");
    }

    std::vector<double> rho(n), next(n);
    // reversed storage, flipped to ascending at the end
    std::vector<std::vector<double>> rev_values;
    std::vector<double> rev_times;

    std::vector<double> lower(n), diag(n), upper(n), scratch(n), a(n);

    if (full_window) {
        for (int i = 0; i < n; ++i) rho[i] = F(T, grid.center(i));
        rev_times.push_back(T);
        rev_values.push_back(rho);
        for (long k = n_steps - 1; k >= 0; --k) {
            double t = k * cfg.dt;
            // transpose of the forward step u^{k+1} = A^{-1} (I + dt Madv(t_k)) u^k,
            // A = I - dt Mdiff(t_{k+1})
            if (cfg.theta == 1) {
                auto mdT = detail::transpose(detail::diffusion_band(coeffs, grid, t + cfg.dt));
                for (int i = 0; i < n; ++i) {
                    diag[i] = 1.0 - cfg.dt * mdT.di[i];
                    lower[i] = -cfg.dt * mdT.lo[i];
                    upper[i] = -cfg.dt * mdT.up[i];
                }
                solve_tridiagonal(lower, diag, upper, rho, scratch);
                auto maT = detail::transpose(detail::advection_band(coeffs, grid, t));
                detail::apply_plus(maT, cfg.dt, rho, next);
            } else {
                auto md = detail::diffusion_band(coeffs, grid, t);
                auto ma = detail::advection_band(coeffs, grid, t);
                auto mdT = detail::transpose(md);
                auto maT = detail::transpose(ma);
                for (int i = 0; i < n; ++i) {
                    mdT.di[i] += maT.di[i];
                    mdT.lo[i] += maT.lo[i];
                    mdT.up[i] += maT.up[i];
                }
                detail::apply_plus(mdT, cfg.dt, rho, next);
            }
            std::swap(rho, next);
            if (k % stride == 0 || k == 0) {
                rev_times.push_back(t);
                rev_values.push_back(rho);
            }
        }
    } else {
        // Dirichlet sub-domain: interior cells strictly inside (x_l, x_r)
        int i_lo = 0, i_hi = n - 1;
        while (i_lo < n && grid.center(i_lo) <= x_l) ++i_lo;
        while (i_hi >= 0 && grid.center(i_hi) >= x_r) --i_hi;
        if (i_lo > i_hi) throw Error("solve_backward_kolmogorov: empty domain");

        auto fill_outside = [&](std::vector<double>& v, double t) {
            for (int i = 0; i < i_lo; ++i) v[i] = F(t, x_l);
            for (int i = i_hi + 1; i < n; ++i) v[i] = F(t, x_r);
        };

        for (int i = i_lo; i <= i_hi; ++i) rho[i] = F(T, grid.center(i));
        fill_outside(rho, T);
        rev_times.push_back(T);
        rev_values.push_back(rho);

        for (long k = n_steps - 1; k >= 0; --k) {
            double t = k * cfg.dt;
            // explicit upwind advection from the later level (b >= 0 uses the
            // forward difference: expectations propagate along dx/dt = +b)
            next = rho;
            for (int i = i_lo; i <= i_hi; ++i) {
                double x = grid.center(i);
                double bi = coeffs.b(t + cfg.dt, x);
                double gl = i > i_lo ? rho[i - 1] : F(t + cfg.dt, x_l);
                double gr = i < i_hi ? rho[i + 1] : F(t + cfg.dt, x_r);
                double grad = bi >= 0.0 ? (gr - rho[i]) / dx : (rho[i] - gl) / dx;
                next[i] = rho[i] + cfg.dt * bi * grad;
            }
            for (int i = i_lo; i <= i_hi; ++i) a[i] = coeffs.a(t, grid.center(i));
            if (cfg.theta == 1) {
                double r = cfg.dt / (2.0 * dx * dx);
                for (int i = i_lo; i <= i_hi; ++i) {
                    diag[i] = 1.0 + 2.0 * r * a[i];
                    lower[i] = -r * a[i];
                    upper[i] = -r * a[i];
                }
                // Dirichlet ghosts at the new (earlier) time level
                next[i_lo] += cfg.dt / (2.0 * dx * dx) * a[i_lo] * F(t, x_l);
                next[i_hi] += cfg.dt / (2.0 * dx * dx) * a[i_hi] * F(t, x_r);
                std::vector<double> lo2(lower.begin() + i_lo, lower.begin() + i_hi + 1);
                std::vector<double> di2(diag.begin() + i_lo, diag.begin() + i_hi + 1);
                std::vector<double> up2(upper.begin() + i_lo, upper.begin() + i_hi + 1);
                std::vector<double> rhs2(next.begin() + i_lo, next.begin() + i_hi + 1);
                std::vector<double> sc2(rhs2.size());
                solve_tridiagonal(lo2, di2, up2, rhs2, sc2);
                for (int i = i_lo; i <= i_hi; ++i) next[i] = rhs2[i - i_lo];
            } else {
                double r = cfg.dt / (2.0 * dx * dx);
                std::vector<double> tmp(next.begin(), next.end());
                for (int i = i_lo; i <= i_hi; ++i) {
                    double gl = i > i_lo ? rho[i - 1] : F(t + cfg.dt, x_l);
                    double gr = i < i_hi ? rho[i + 1] : F(t + cfg.dt, x_r);
                    tmp[i] = next[i] + r * a[i] * (gr - 2.0 * rho[i] + gl);
                }
                next = tmp;
            }
            fill_outside(next, t);
            std::swap(rho, next);
            if (k % stride == 0 || k == 0) {
                rev_times.push_back(t);
                rev_values.push_back(rho);
            }
        }
    }

    BackwardField out;
    out.grid = grid;
    out.times.assign(rev_times.rbegin(), rev_times.rend());
    out.values.assign(rev_values.rbegin(), rev_values.rend());
    return out;
}

} // namespace suplab::fpe
