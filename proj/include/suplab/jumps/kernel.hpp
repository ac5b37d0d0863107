#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"
#include "suplab/core/rng.hpp"

namespace suplab::jumps {

/// Displacement law q of a jump kernel: the law of y - x.
struct DisplacementLaw {
    enum class Kind { Gaussian, TwoPoint, UniformInterval };
    Kind kind = Kind::Gaussian;
    double mean = 0.0, var = 0.01;  // Gaussian
    double d1 = 0.5, p1 = 0.5, d2 = -0.5; // TwoPoint: d1 w.p. p1, d2 otherwise
    double lo = 0.0, hi = 1.0;      // UniformInterval

    static DisplacementLaw gaussian(double m, double v) {
        DisplacementLaw q;
        q.kind = Kind::Gaussian;
        q.mean = m;
        q.var = v;
        return q;
    }
    static DisplacementLaw two_point(double d1, double p1, double d2) {
        DisplacementLaw q;
        q.kind = Kind::TwoPoint;
        q.d1 = d1;
        q.p1 = p1;
        q.d2 = d2;
        return q;
    }
    static DisplacementLaw uniform(double lo, double hi) {
        DisplacementLaw q;
        q.kind = Kind::UniformInterval;
        q.lo = lo;
        q.hi = hi;
        return q;
    }

    double sample(RngStream& rng) const {
        switch (kind) {
        case Kind::Gaussian:
            if (var == 0.0) { return mean; }
            return mean + std::sqrt(var) * rng.normal();
        case Kind::TwoPoint: return rng.uniform() < p1 ? d1 : d2;
        case Kind::UniformInterval: return rng.uniform(lo, hi);
        }
        return 0.0;
    }

    double first_moment() const {
        switch (kind) {
        case Kind::Gaussian: return mean;
        case Kind::TwoPoint: return p1 * d1 + (1.0 - p1) * d2;
        case Kind::UniformInterval: return 0.5 * (lo + hi);
        }
        return 0.0;
    }

    double second_moment() const {
        switch (kind) {
        case Kind::Gaussian: return mean * mean + var;
        case Kind::TwoPoint: return p1 * d1 * d1 + (1.0 - p1) * d2 * d2;
        case Kind::UniformInterval:
            return (hi * hi * hi - lo * lo * lo) / (3.0 * (hi - lo));
        }
        return 0.0;
    }

    double prob_zero() const {
        switch (kind) {
        case Kind::Gaussian: return var == 0.0 && mean == 0.0 ? 1.0 : 0.0;
        case Kind::TwoPoint: return (d1 == 0.0 ? p1 : 0.0) + (d2 == 0.0 ? 1.0 - p1 : 0.0);
        case Kind::UniformInterval: return 0.0;
        }
        return 0.0;
    }

    /// Exact cell masses of x + Z on the grid (mass landing in cell i).
    /// Used by the adjoint (PDE) side; the row is later renormalized so the
    /// discrete kernel is conservative in total mass.
    std::vector<double> cell_masses(const SpatialGrid& grid, double x) const {
        std::vector<double> w(grid.n_cells, 0.0);
        auto deposit_cic = [&](double y, double mass) {
            double s = (y - grid.x_min) / grid.dx() - 0.5;
            int i0 = static_cast<int>(std::floor(s));
            double f = s - i0;
            int ia = std::clamp(i0, 0, grid.n_cells - 1);
            int ib = std::clamp(i0 + 1, 0, grid.n_cells - 1);
            w[ia] += mass * (1.0 - f);
            w[ib] += mass * f;
        };
        switch (kind) {
        case Kind::Gaussian: {
            double sd = std::sqrt(var);
            if (sd == 0.0) {
                deposit_cic(x + mean, 1.0);
                break;
            }
            double c = x + mean;
            int ilo = std::max(0, grid.cell_of(c - 8.0 * sd) - 1);
            int ihi = std::min(grid.n_cells - 1, grid.cell_of(c + 8.0 * sd) + 1);
            for (int i = ilo; i <= ihi; ++i) {
                double zl = (grid.edge(i) - c) / sd, zr = (grid.edge(i + 1) - c) / sd;
                w[i] = normal_cdf(zr) - normal_cdf(zl);
            }
            break;
        }
        case Kind::TwoPoint:
            deposit_cic(x + d1, p1);
            deposit_cic(x + d2, 1.0 - p1);
            break;
        case Kind::UniformInterval: {
            double a = x + lo, b = x + hi;
            for (int i = 0; i < grid.n_cells; ++i) {
                double l = std::max(a, grid.edge(i)), r = std::min(b, grid.edge(i + 1));
                if (r > l) w[i] = (r - l) / (b - a);
            }
            break;
        }
        }
        return w;
    }
};

/// Bounded jump kernel K(t, x, dy) = c(t, x) q(t, x, dy - x) with total-mass
/// function c = K1 and sup c <= lambda_bound < infinity.
struct JumpKernel {
    enum class RateKind { Constant, GaussGate };
    RateKind rate_kind = RateKind::Constant;
    double c0 = 0.0;            // Constant: c = c0; GaussGate: c = c0 exp(-x^2)
    double lambda_bound = 0.0;  // dominating Poisson rate, >= sup c
    DisplacementLaw q;

    double rate(double /*t*/, double x) const {
        switch (rate_kind) {
        case RateKind::Constant: return c0;
        case RateKind::GaussGate: return c0 * std::exp(-x * x);
        }
        return 0.0;
    }

    double sup_rate() const { return c0; } // both catalog rates peak at c0

    static JumpKernel constant_rate(double c0, DisplacementLaw q, double lambda = 0.0) {
        JumpKernel k;
        k.rate_kind = RateKind::Constant;
        k.c0 = c0;
        k.q = q;
        k.lambda_bound = lambda > 0.0 ? lambda : c0;
        if (!(k.lambda_bound >= 0.0) || !std::isfinite(k.lambda_bound))
            throw KernelUnbounded("jump kernel: lambda_bound must be finite");
        return k;
    }

    static JumpKernel gauss_gate(double c0, DisplacementLaw q, double lambda = 0.0) {
        JumpKernel k;
        k.rate_kind = RateKind::GaussGate;
        k.c0 = c0;
        k.q = q;
        k.lambda_bound = lambda > 0.0 ? lambda : c0;
        return k;
    }

    static JumpKernel none() { return constant_rate(0.0, DisplacementLaw::gaussian(0.0, 1.0)); }
};

} // namespace suplab::jumps
