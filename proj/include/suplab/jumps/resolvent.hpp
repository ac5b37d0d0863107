#pragma once

#include <cmath>
#include <vector>

#include "suplab/core/catalog.hpp"
#include "suplab/core/coefficients.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/core/rng.hpp"
#include "suplab/jumps/kernel.hpp"
#include "suplab/potential/dirichlet.hpp"

namespace suplab::jumps {

struct ResolventReport {
    double lhs = 0.0;       // U^K_alpha f(x): discounted integral on jump paths
    double rhs = 0.0;       // U'_alpha f(x) + U'_alpha K U^K_alpha f(x)
    double uprime = 0.0;
    double composed = 0.0;
    double se = 0.0;        // combined stderr of both sides
    double budget = 0.0;    // horizon truncation + geometric restart tail
    bool pass = false;
};

namespace detail {

struct Segment {
    double integral = 0.0; // int e^{-alpha (t - s0)} f dt until first accepted jump
    bool jumped = false;
    double t_jump = 0.0;   // elapsed at the accepted jump, relative to path start
    double y_post = 0.0;
    double x_end = 0.0;
};

/// Diffuse from (clock0, x0) until the first accepted thinning jump or until
/// elapsed reaches t_stop; integrates e^{-alpha (t - t0)} f along the way.
/// Elapsed times are measured from the path's own start (t0 offset).
template <typename Coeffs>
inline Segment run_segment(const Coeffs& coeffs, const JumpKernel& K, double start_clock,
                           double t0, double x0, double alpha, double (*f)(double),
                           double dt, double t_stop, RngStream& diff, RngStream& clock,
                           RngStream& mark) {
    Segment seg;
    double x = x0, t = t0;
    const double lambda = K.lambda_bound;
    double next_tick = lambda > 0.0 ? t + clock.exponential(lambda) : t_stop + 1.0;
    while (t < t_stop - 1e-15) {
        double step = std::min(dt, t_stop - t);
        double s_clock = start_clock + t;
        double a = coeffs.a(s_clock, x);
        if (a < 0.0) throw NegativeDiffusion("resolvent segment: a < 0");
        double d_diff = coeffs.b(s_clock, x) * step + std::sqrt(a * step) * diff.normal();
        while (lambda > 0.0 && next_tick < t + step) {
            double c = K.rate(start_clock + next_tick, x);
            if (c > lambda * (1.0 + 1e-12))
                throw DominationViolated("resolvent thinning: c > lambda");
            if (clock.uniform() < c / lambda) {
                seg.integral += std::exp(-alpha * (t - t0)) * f(x) * (next_tick - t);
                seg.jumped = true;
                seg.t_jump = next_tick;
                seg.y_post = x + K.q.sample(mark);
                seg.x_end = x;
                return seg;
            }
            next_tick += clock.exponential(lambda);
        }
        seg.integral += std::exp(-alpha * (t - t0)) * f(x) * step;
        x += d_diff;
        t += step;
    }
    seg.x_end = x;
    return seg;
}

} // namespace detail

/// Monte Carlo check of the perturbation resolvent identity
///   U^K_alpha = U'_alpha + U'_alpha K U^K_alpha,
/// where U' is the resolvent of the diffusion killed at rate c = K1.
///
/// lhs: discounted quadrature along jump-process paths.
/// rhs: U' f by the multiplicative-weight quadrature e^{-alpha t - int c} on
/// jump-free paths, plus the composed term by the first-passage trick: at the
/// first accepted jump weight by e^{-alpha t} and restart a U^K estimate from
/// the post-jump point. Restarts are capped at depth_cap; the dropped tail is
/// bounded geometrically by (lambda / (alpha + lambda))^{depth_cap + 1} and
/// charged to the error budget, as is the T_max horizon truncation.
inline ResolventReport check_resolvent_identity(const CoefficientModel& coeffs,
                                                const JumpKernel& K, const BoundedFn& f,
                                                double alpha, double x0, size_t n_paths,
                                                double T_max, double dt, uint64_t seed,
                                                uint32_t replicate = 0, int depth_cap = 3) {
    if (!(alpha > 0.0)) throw Error("check_resolvent_identity: alpha must be > 0");
    const double lambda = K.lambda_bound;

    std::vector<double> lhs(n_paths), up(n_paths), comp(n_paths);

    // lhs: full jump paths, chained segments without a depth cap
    parallel_for(n_paths, [&](size_t p) {
        RngStream diff(seed, static_cast<uint32_t>(p), replicate, RngChannel::Diffusion);
        RngStream clk(seed, static_cast<uint32_t>(p), replicate, RngChannel::JumpClock);
        RngStream mark(seed, static_cast<uint32_t>(p), replicate, RngChannel::JumpMark);
        double acc = 0.0, t = 0.0, x = x0;
        while (t < T_max) {
            auto seg = detail::run_segment(coeffs, K, 0.0, t, x, alpha, f.f, dt, T_max, diff,
                                           clk, mark);
            acc += std::exp(-alpha * t) * seg.integral;
            if (!seg.jumped) break;
            t = seg.t_jump;
            x = seg.y_post;
        }
        lhs[p] = acc;
    });

    // rhs first term: killed resolvent on jump-free paths (path offset n)
    long n_steps = std::max(1L, std::lround(T_max / dt));
    double dt_eff = T_max / static_cast<double>(n_steps);
    parallel_for(n_paths, [&](size_t p) {
        RngStream diff(seed, static_cast<uint32_t>(p + n_paths), replicate,
                       RngChannel::Diffusion);
        double x = x0, killed_mass = 0.0, acc = 0.0;
        for (long k = 0; k < n_steps; ++k) {
            double t = k * dt_eff;
            acc += std::exp(-alpha * t - killed_mass) * f.f(x) * dt_eff;
            double a = coeffs.a(t, x);
            killed_mass += K.rate(t, x) * dt_eff;
            x += coeffs.b(t, x) * dt_eff + std::sqrt(a * dt_eff) * diff.normal();
        }
        up[p] = acc;
    });

    // rhs composed term: restart estimates at accepted jumps (path offset 2n)
    parallel_for(n_paths, [&](size_t p) {
        RngStream diff(seed, static_cast<uint32_t>(p + 2 * n_paths), replicate,
                       RngChannel::Diffusion);
        RngStream clk(seed, static_cast<uint32_t>(p + 2 * n_paths), replicate,
                      RngChannel::JumpClock);
        RngStream mark(seed, static_cast<uint32_t>(p + 2 * n_paths), replicate,
                       RngChannel::JumpMark);
        double acc = 0.0;
        double t = 0.0, x = x0;
        double discount_to_segment = 1.0; // e^{-alpha * (segment start)}
        for (int depth = 0; depth <= depth_cap; ++depth) {
            auto seg = detail::run_segment(coeffs, K, 0.0, t, x, alpha, f.f, dt, T_max, diff,
                                           clk, mark);
            if (depth > 0) acc += discount_to_segment * seg.integral;
            if (!seg.jumped) break;
            discount_to_segment = std::exp(-alpha * seg.t_jump);
            t = seg.t_jump;
            x = seg.y_post;
        }
        comp[p] = acc;
    });

    ResolventReport rep;
    auto ml = potential::mean_stderr(lhs);
    auto mu = potential::mean_stderr(up);
    auto mc = potential::mean_stderr(comp);
    rep.lhs = ml.value;
    rep.uprime = mu.value;
    rep.composed = mc.value;
    rep.rhs = mu.value + mc.value;
    rep.se = std::sqrt(ml.stderr_ * ml.stderr_ + mu.stderr_ * mu.stderr_ +
                       mc.stderr_ * mc.stderr_);
    double trunc = 2.0 * f.sup_norm / alpha * std::exp(-alpha * T_max);
    double geom = lambda > 0.0 ? f.sup_norm / alpha *
                                     std::pow(lambda / (alpha + lambda), depth_cap + 1)
                               : 0.0;
    rep.budget = trunc + geom;
    rep.pass = std::abs(rep.lhs - rep.rhs) <= 3.0 * rep.se + rep.budget;
    return rep;
}

} // namespace suplab::jumps
