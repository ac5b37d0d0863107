#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "suplab/core/catalog.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/parallel.hpp"
#include "suplab/jumps/kernel.hpp"
#include "suplab/potential/dirichlet.hpp"

namespace suplab::jumps {

struct CompensatorReport {
    double lhs = 0.0;     // path-average of sum_{r <= t} psi(X(r-), X(r))
    double rhs = 0.0;     // path-average of the quadrature of c(t,x) E_q psi
    double se_lhs = 0.0;
    double se_rhs = 0.0;
    double se_diff = 0.0; // paired per-path stderr of lhs - rhs
    bool pass = false;
};

/// Closed-form displacement average E_q[psi(x, x + Z)] for the catalog marks.
inline double psi_mean_under_q(const std::string& psi_id, const DisplacementLaw& q) {
    if (psi_id == "one_offdiag") return 1.0 - q.prob_zero();
    if (psi_id == "displacement") return q.first_moment();
    if (psi_id == "displacement_sq") return q.second_moment();
    throw UnknownPsi("psi '" + psi_id + "' has no closed-form kernel average");
}

/// Compensator identity for the jump sum: the expected sum of marks up to t
/// equals the time integral of the kernel-averaged mark. lhs sums recorded
/// events; rhs is a step-wise quadrature along the same paths, so the verdict
/// uses the paired per-path stderr.
inline CompensatorReport check_jump_compensator(const PathBundle& paths, const JumpKernel& K,
                                                const std::string& psi_id, double t_horizon) {
    if (paths.recorded_steps.size() != paths.n_steps + 1)
        throw Error("check_jump_compensator: bundle must record full paths");
    auto psi = make_psi(psi_id);
    const double qm = psi_mean_under_q(psi_id, K.q);
    const size_t n = paths.n_paths;

    std::vector<double> lhs(n, 0.0), rhs(n, 0.0);
    for (const auto& ev : paths.events)
        if (ev.t <= t_horizon) lhs[ev.path_id] += psi.psi(ev.x_pre, ev.x_post);

    parallel_for(n, [&](size_t p) {
        double acc = 0.0;
        for (size_t k = 0; k < paths.n_steps; ++k) {
            double tk = k * paths.dt;
            if (tk >= t_horizon) break;
            double w = std::min(paths.dt, t_horizon - tk);
            acc += w * K.rate(paths.start_clock + tk, paths.states[k * n + p]);
        }
        rhs[p] = acc * qm;
    });

    CompensatorReport rep;
    auto ml = potential::mean_stderr(lhs);
    auto mr = potential::mean_stderr(rhs);
    rep.lhs = ml.value;
    rep.se_lhs = ml.stderr_;
    rep.rhs = mr.value;
    rep.se_rhs = mr.stderr_;
    std::vector<double> diff(n);
    for (size_t p = 0; p < n; ++p) diff[p] = lhs[p] - rhs[p];
    auto md = potential::mean_stderr(diff);
    rep.se_diff = md.stderr_;
    rep.pass = std::abs(md.value) <= 3.0 * std::max(md.stderr_, 1e-15);
    return rep;
}

} // namespace suplab::jumps
