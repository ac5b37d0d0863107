#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "suplab/core/catalog.hpp"
#include "suplab/core/scenario.hpp"
#include "suplab/core/validate.hpp"
#include "suplab/fpe/backward.hpp"
#include "suplab/fpe/linear.hpp"
#include "suplab/fpe/perturbed.hpp"
#include "suplab/fpe/porous.hpp"
#include "suplab/io/csv.hpp"
#include "suplab/io/scenario_file.hpp"
#include "suplab/jumps/compensator.hpp"
#include "suplab/jumps/marginals.hpp"
#include "suplab/jumps/resolvent.hpp"
#include "suplab/jumps/simulate.hpp"
#include "suplab/potential/capacity.hpp"
#include "suplab/potential/dirichlet.hpp"
#include "suplab/potential/lyapunov.hpp"
#include "suplab/sde/engine.hpp"
#include "suplab/sde/mckean_vlasov.hpp"
#include "suplab/verify/domination.hpp"
#include "suplab/verify/energy.hpp"
#include "suplab/verify/flow.hpp"
#include "suplab/verify/superposition.hpp"

namespace suplab::lab {

struct ReportLine {
    std::string name;
    std::string detail;
    double statistic = 0.0;
    double threshold = 0.0;
    uint64_t seed = 0;
    bool pass = false;
};

/// Collects report lines and verdict/estimate CSV rows for one CLI run.
struct Report {
    std::vector<ReportLine> lines;
    std::vector<io::VerdictRow> verdicts;
    std::vector<io::EstimateRow> estimates;

    void add(const ReportLine& line, double checkpoint = 0.0) {
        lines.push_back(line);
        verdicts.push_back({line.name, checkpoint, line.statistic, line.threshold,
                            line.pass ? "PASS" : "FAIL"});
    }

    bool all_pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }

    void write(const std::string& outdir) const {
        std::ofstream f(outdir + "/report.txt", std::ios::binary);
        for (const auto& l : lines)
            f << l.name << (l.detail.empty() ? "" : " " + l.detail)
              << " statistic=" << io::fmt(l.statistic) << " threshold=" << io::fmt(l.threshold)
              << " seed=" << l.seed << ' ' << (l.pass ? "PASS" : "FAIL") << '\n';
        if (!verdicts.empty()) io::write_verdicts_csv(verdicts, outdir + "/verdicts.csv");
        if (!estimates.empty()) io::write_estimates_csv(estimates, outdir + "/estimates.csv");
    }
};

namespace detail {

inline fpe::SchemeConfig scheme_config(const Scenario& sc) {
    fpe::SchemeConfig cfg;
    cfg.dt = sc.num("time.dt");
    cfg.theta = static_cast<int>(sc.integer("time.theta"));
    cfg.store_every = static_cast<int>(sc.integer("time.store_every"));
    return cfg;
}

inline DensitySlice initial_slice(const Scenario& sc) {
    auto law = sc.initial_law();
    if (law.kind == sde::InitialLaw::Kind::Gaussian)
        return gaussian_density(sc.grid(), law.mean, law.var);
    return uniform_density(sc.grid(), law.lo, law.hi);
}

/// Forward density trajectory of the scenario's model (porous or linear).
inline DensityTrajectory forward_trajectory(const Scenario& sc, double T) {
    auto cfg = scheme_config(sc);
    auto u0 = initial_slice(sc);
    if (sc.is_porous()) return fpe::solve_porous_media(u0, sc.porous_triple(), T, cfg);
    return fpe::solve_linear_fpe(u0, sc.coefficients(), T, cfg,
                                 sc.flag("coeffs.allow_degenerate"));
}

/// Path bundle matched to the trajectory: linearized when porous.
inline PathBundle matched_bundle(const Scenario& sc, const DensityTrajectory& traj, double T,
                                 double drift_shift, size_t snap_stride) {
    sde::SimConfig cfg;
    cfg.n_particles = static_cast<size_t>(sc.integer("sde.n_particles"));
    cfg.dt = sc.num("sde.dt");
    cfg.T = T;
    cfg.seed = sc.seed();
    cfg.record_full_paths = false;
    cfg.snap_stride = snap_stride;
    cfg.bandwidth = sc.num("sde.bandwidth");
    CoefficientModel coeffs =
        sc.is_porous() ? fpe::linearize(traj, sc.porous_triple()) : sc.coefficients();
    if (drift_shift != 0.0) coeffs = coeffs.with_drift_shift(drift_shift);
    return sde::simulate_linearized(traj, coeffs, cfg);
}

inline size_t stride_for_checkpoints(const Scenario& sc, const std::vector<double>& cps) {
    double dt = sc.num("sde.dt");
    size_t stride = 0;
    for (double c : cps) {
        size_t s = static_cast<size_t>(std::lround(c / dt));
        stride = stride == 0 ? s : std::gcd(stride, s);
    }
    return stride == 0 ? 1 : stride;
}

inline jumps::JumpKernel kernel_from(const Scenario& sc) {
    jumps::DisplacementLaw q;
    const std::string& qk = sc.str("jumps.q");
    if (qk == "gaussian")
        q = jumps::DisplacementLaw::gaussian(sc.num("jumps.q_mean"), sc.num("jumps.q_var"));
    else if (qk == "two_point")
        q = jumps::DisplacementLaw::two_point(sc.num("jumps.q_d1"), sc.num("jumps.q_p1"),
                                              sc.num("jumps.q_d2"));
    else if (qk == "uniform")
        q = jumps::DisplacementLaw::uniform(sc.num("jumps.q_lo"), sc.num("jumps.q_hi"));
    else
        throw ScenarioError("key 'jumps.q': unknown displacement law '" + qk + "'");
    double lambda = sc.num("jumps.lambda");
    const std::string& rk = sc.str("jumps.rate");
    if (rk == "constant")
        return jumps::JumpKernel::constant_rate(sc.num("jumps.c0"), q, lambda);
    if (rk == "gauss_gate") return jumps::JumpKernel::gauss_gate(sc.num("jumps.c0"), q, lambda);
    throw ScenarioError("key 'jumps.rate': unknown rate '" + rk + "'");
}

} // namespace detail

// ---------------------------------------------------------------------------
// per-subcommand runners
// ---------------------------------------------------------------------------

inline void run_solve_fpe(const Scenario& sc, const std::string& outdir, Report& rep) {
    auto cfg = detail::scheme_config(sc);
    auto traj = detail::forward_trajectory(sc, sc.num("time.T"));
    io::write_trajectory_csv(traj, outdir + "/trajectory.csv");
    rep.add({"solve_fpe mass_drift", "model=" + sc.str("coeffs.model"), traj.max_mass_drift,
             cfg.mass_tol, sc.seed(), traj.max_mass_drift <= cfg.mass_tol});
    rep.add({"solve_fpe positivity_clamp", "", traj.max_clamp, 1e-12, sc.seed(),
             traj.max_clamp <= 1e-12});
}

inline void run_solve_porous(const Scenario& sc, const std::string& outdir, Report& rep) {
    auto cfg = detail::scheme_config(sc);
    auto u0 = detail::initial_slice(sc);
    auto traj = fpe::solve_porous_media(u0, sc.porous_triple(), sc.num("time.T"), cfg);
    io::write_trajectory_csv(traj, outdir + "/trajectory.csv");
    rep.add({"solve_porous mass_drift", "beta=" + sc.str("coeffs.beta"), traj.max_mass_drift,
             cfg.mass_tol, sc.seed(), traj.max_mass_drift <= cfg.mass_tol});
    rep.add({"solve_porous positivity_clamp", "", traj.max_clamp, 1e-12, sc.seed(),
             traj.max_clamp <= 1e-12});
}

inline void run_simulate(const Scenario& sc, const std::string& outdir, Report& rep) {
    double T = sc.num("time.T");
    size_t n = static_cast<size_t>(sc.integer("sde.n_particles"));
    sde::SimConfig cfg;
    cfg.n_particles = n;
    cfg.dt = sc.num("sde.dt");
    cfg.T = T;
    cfg.seed = sc.seed();
    cfg.record_full_paths = sc.flag("sde.record_full_paths");
    cfg.snap_stride = detail::stride_for_checkpoints(sc, sc.num_list("checks.checkpoints"));
    cfg.bandwidth = sc.num("sde.bandwidth");
    cfg.kde_refresh_every = static_cast<int>(sc.integer("sde.kde_refresh_every"));

    if (sc.is_porous()) {
        auto res = sde::simulate_self_consistent(sc.porous_triple(), sc.initial_law(), cfg,
                                                 sc.grid());
        io::write_paths_csv(res.bundle, outdir + "/paths.csv");
        for (const auto& w : res.warnings)
            rep.add({"simulate warning", w, 0.0, 0.0, sc.seed(), true});
        rep.add({"simulate self_consistent", "N=" + std::to_string(n), 0.0, 0.0, sc.seed(),
                 true});
    } else {
        auto grid = sc.grid();
        auto init = sde::sample_initial(sc.initial_law(), n, cfg.seed);
        auto bundle = sde::simulate_paths(sc.coefficients(), init, cfg, &grid);
        io::write_paths_csv(bundle, outdir + "/paths.csv");
        double esc = static_cast<double>(bundle.escaped_count);
        rep.add({"simulate window_escapes", "N=" + std::to_string(n), esc, 1e-6 * n, sc.seed(),
                 esc <= 1e-6 * static_cast<double>(n)});
    }
}

inline void run_superposition(const Scenario& sc, const std::string& outdir, Report& rep) {
    auto cps = sc.num_list("checks.checkpoints");
    double T = *std::max_element(cps.begin(), cps.end());
    auto traj = detail::forward_trajectory(sc, T);
    io::write_trajectory_csv(traj, outdir + "/trajectory.csv");

    size_t stride = detail::stride_for_checkpoints(sc, cps);
    auto bundle = detail::matched_bundle(sc, traj, T, 0.0, stride);
    auto lines = verify::check_superposition(traj, bundle, cps, sc.num("sde.bandwidth"),
                                             sc.seed());
    for (const auto& l : lines)
        rep.add({"superposition", "t=" + io::fmt(l.t), l.w1.w1, l.w1.threshold, sc.seed(),
                 l.w1.pass},
                l.t);

    if (sc.flag("checks.mismatch_control")) {
        // harness sensitivity control: +1 drift must fail at the last checkpoint
        auto control = detail::matched_bundle(sc, traj, T, 1.0, stride);
        auto cl = verify::check_superposition(traj, control, {cps.back()},
                                              sc.num("sde.bandwidth"), sc.seed());
        bool control_failed = !cl.front().w1.pass;
        rep.add({"superposition_control", "drift+1 t=" + io::fmt(cps.back()), cl.front().w1.w1,
                 cl.front().w1.threshold, sc.seed(), control_failed},
                cps.back());
    }
}

inline void run_flow(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    double s = sc.num("flow.s"), r = sc.num("flow.r"), t = sc.num("flow.t");
    size_t n = static_cast<size_t>(sc.integer("flow.n_particles"));
    auto coeffs = sc.coefficients();
    auto law = sc.initial_law();
    auto grid = sc.grid();
    double dt = sc.num("sde.dt"), bw = sc.num("sde.bandwidth");

    auto main_rep = verify::check_flow_property(coeffs, law, grid, s, r, t, n, dt, bw, sc.seed());
    rep.add({"flow", "s=" + io::fmt(s) + " r=" + io::fmt(r) + " t=" + io::fmt(t), main_rep.w1,
             main_rep.threshold, sc.seed(), main_rep.pass});

    double floor = verify::flow_noise_floor(coeffs, law, grid, s, t, n, dt, bw, sc.seed(),
                                            static_cast<int>(sc.integer("flow.control_pairs")));
    auto control =
        verify::check_flow_property(coeffs, law, grid, s, 0.0, t, n, dt, bw, sc.seed(), 7);
    rep.add({"flow_control_r0", "noise_floor", control.w1, floor, sc.seed(),
             control.w1 <= floor});
}

inline void run_domination(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    auto mu0 = detail::initial_slice(sc);
    auto nu0 = verify::restricted_renormalized(mu0, sc.num("domination.threshold"));
    double c = sc.num("domination.c");
    auto cps = sc.num_list("checks.checkpoints");
    double T = *std::max_element(cps.begin(), cps.end());
    auto drep = verify::check_domination(nu0, c, mu0, sc.coefficients(), T, cps,
                                         detail::scheme_config(sc),
                                         sc.flag("coeffs.allow_degenerate"));
    for (const auto& l : drep.lines)
        rep.add({"domination", "c=" + io::fmt(c) + " t=" + io::fmt(l.t), l.max_violation, 0.0,
                 sc.seed(), l.pass},
                l.t);
}

inline void run_dirichlet(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    double x_l = sc.num("dirichlet.x_l"), x_r = sc.num("dirichlet.x_r");
    double T = sc.num("dirichlet.T");
    auto F = make_boundary_fn(sc.str("dirichlet.F"), x_l, x_r);
    auto coeffs = sc.coefficients();
    auto grid = sc.grid();

    fpe::SchemeConfig pcfg;
    pcfg.dt = sc.num("dirichlet.pde_dt");
    pcfg.theta = 1;
    auto field = fpe::solve_backward_kolmogorov(F, coeffs, grid, x_l, x_r, T, pcfg);

    size_t n_paths = static_cast<size_t>(sc.integer("dirichlet.n_paths"));
    double dt = sc.num("dirichlet.dt");
    double budget = sc.num("dirichlet.bias_budget");

    // probes: comma list of s:x
    for (const auto& probe : sc.str_list("dirichlet.probes")) {
        size_t colon = probe.find(':');
        if (colon == std::string::npos)
            throw ScenarioError("key 'dirichlet.probes': expected s:x, got '" + probe + "'");
        double ps = std::stod(probe.substr(0, colon));
        double px = std::stod(probe.substr(colon + 1));
        auto est = potential::estimate_hitting_solution(F, coeffs, x_l, x_r, T, ps, px, n_paths,
                                                        dt, sc.seed());
        double ref = field.value_at(ps, px);
        double tol = 3.0 * est.stderr_ + budget;
        rep.add({"dirichlet", "s=" + io::fmt(ps) + " x=" + io::fmt(px),
                 std::abs(est.value - ref), tol, sc.seed(), std::abs(est.value - ref) <= tol},
                ps);
        rep.estimates.push_back({"dirichlet rho(" + io::fmt(ps) + "," + io::fmt(px) + ")",
                                 est.value, est.stderr_, ref,
                                 std::abs(est.value - ref) <= tol ? "PASS" : "FAIL"});
    }
}

inline void run_represent(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    auto F = make_boundary_fn(sc.str("represent.F"), sc.num("grid.x_min"), sc.num("grid.x_max"));
    auto mu0 = detail::initial_slice(sc);
    auto r = potential::verify_representation(
        F, sc.coefficients(), sc.num("represent.T"), mu0,
        static_cast<size_t>(sc.integer("represent.n_paths")), sc.num("represent.dt"),
        detail::scheme_config(sc), sc.seed());
    double tol = 3.0 * r.mc_stderr + sc.num("represent.tol");
    rep.add({"represent", "F=" + sc.str("represent.F"), r.discrepancy, tol, sc.seed(),
             r.discrepancy <= tol});
    rep.estimates.push_back(
        {"represent mc", r.mc_value, r.mc_stderr, r.pde_value, r.discrepancy <= tol ? "PASS" : "FAIL"});
}

inline void run_lyapunov(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    potential::LyapunovSpec spec;
    spec.V = make_lyapunov(sc.str("lyapunov.V"));
    spec.delta_v = sc.num("lyapunov.delta");
    auto coeffs = sc.coefficients();
    auto grid = sc.grid();
    double T = sc.num("lyapunov.T"), x0 = sc.num("lyapunov.x0"), dt = sc.num("lyapunov.dt");
    size_t n_paths = static_cast<size_t>(sc.integer("lyapunov.n_paths"));

    auto gen = potential::check_generator_bound(spec, coeffs, grid, 0.0, T);
    rep.add({"lyapunov_generator", "V=" + spec.V.id, gen.worst_residual, 1e-12, sc.seed(),
             gen.pass});
    if (!gen.pass) return;

    int n_seeds = static_cast<int>(sc.integer("lyapunov.seeds"));
    for (double eps : sc.num_list("lyapunov.eps")) {
        spec.eps = eps;
        bool all = true;
        double worst_margin = -1e300;
        for (int s = 0; s < n_seeds; ++s) {
            auto tb = potential::estimate_tail_bound(spec, coeffs, grid, 0.0, x0, T, n_paths, dt,
                                                     sc.seed() + 1000 + s);
            all = all && tb.pass;
            worst_margin = std::max(worst_margin, tb.wilson99 - tb.bound);
            if (s == 0)
                rep.estimates.push_back({"lyapunov doob eps=" + io::fmt(eps), tb.p_hat,
                                         tb.wilson99 - tb.p_hat, tb.bound,
                                         tb.pass ? "PASS" : "FAIL"});
        }
        rep.add({"lyapunov_doob", "eps=" + io::fmt(eps) + " seeds=" + std::to_string(n_seeds),
                 worst_margin, 0.0, sc.seed(), all});
    }

    auto sm = potential::check_supermartingale(spec, coeffs, grid, 0.0, x0, T, n_paths,
                                               sc.num_list("lyapunov.checkpoints"), dt,
                                               sc.seed());
    double worst = -1e300;
    for (size_t j = 0; j < sm.incr.size(); ++j)
        worst = std::max(worst, sm.incr[j] - 3.0 * sm.incr_se[j]);
    rep.add({"lyapunov_supermartingale", "V=" + spec.V.id, worst, 0.0, sc.seed(), sm.pass});
}

inline void run_jumps(const Scenario& sc, const std::string& outdir, Report& rep) {
    auto K = detail::kernel_from(sc);
    auto coeffs = sc.coefficients();
    double t_hor = sc.num("jumps.t");
    sde::SimConfig cfg;
    cfg.n_particles = static_cast<size_t>(sc.integer("jumps.n_paths"));
    cfg.dt = sc.num("jumps.dt");
    cfg.T = t_hor;
    cfg.seed = sc.seed();
    cfg.record_full_paths = true;

    auto init = sde::sample_initial(sc.initial_law(), cfg.n_particles, cfg.seed);
    auto bundle = jumps::simulate_jump_process(coeffs, K, init, cfg);
    io::write_events_csv(bundle, outdir + "/events.csv");

    // conservativity: every path still alive, clock linear by construction
    rep.add({"jumps_conservative", "paths", static_cast<double>(bundle.n_paths),
             static_cast<double>(cfg.n_particles), sc.seed(),
             bundle.n_paths == cfg.n_particles});

    if (K.rate_kind == jumps::JumpKernel::RateKind::Constant && K.c0 > 0.0) {
        std::vector<double> counts(bundle.n_paths, 0.0);
        for (const auto& e : bundle.events)
            if (e.t <= t_hor) counts[e.path_id] += 1.0;
        auto ms = potential::mean_stderr(counts);
        double expect = K.c0 * t_hor;
        rep.add({"jumps_event_count", "c0=" + io::fmt(K.c0), std::abs(ms.value - expect),
                 3.0 * ms.stderr_, sc.seed(), std::abs(ms.value - expect) <= 3.0 * ms.stderr_});
        rep.estimates.push_back({"jumps event_count", ms.value, ms.stderr_, expect,
                                 std::abs(ms.value - expect) <= 3.0 * ms.stderr_ ? "PASS" : "FAIL"});
    }

    for (const auto& psi_id : sc.str_list("jumps.psi")) {
        auto c = jumps::check_jump_compensator(bundle, K, psi_id, t_hor);
        rep.add({"jumps_compensator", "psi=" + psi_id, std::abs(c.lhs - c.rhs),
                 3.0 * c.se_diff, sc.seed(), c.pass});
        rep.estimates.push_back(
            {"compensator " + psi_id, c.lhs, c.se_diff, c.rhs, c.pass ? "PASS" : "FAIL"});
    }

    // marginals vs the kernel-perturbed forward solver
    auto cps = sc.num_list("checks.checkpoints");
    fpe::SchemeConfig pcfg = detail::scheme_config(sc);
    auto u0 = detail::initial_slice(sc);
    sde::SimConfig mcfg = cfg;
    mcfg.n_particles = std::max<size_t>(cfg.n_particles, 20000);
    mcfg.record_full_paths = false;
    mcfg.snap_stride = detail::stride_for_checkpoints(sc, cps);
    mcfg.dt = sc.num("sde.dt");
    auto lines = jumps::verify_jump_fpe_marginals(coeffs, K, u0, t_hor, cps, mcfg, pcfg,
                                                  sc.flag("coeffs.allow_degenerate"));
    for (const auto& l : lines)
        rep.add({"jumps_marginal_w1", "t=" + io::fmt(l.t), l.w1.w1, l.w1.threshold, sc.seed(),
                 l.w1.pass},
                l.t);
}

inline void run_resolvent(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    auto K = detail::kernel_from(sc);
    auto f = make_bounded_fn(sc.str("resolvent.f"));
    auto r = jumps::check_resolvent_identity(
        sc.coefficients(), K, f, sc.num("resolvent.alpha"), sc.num("resolvent.x0"),
        static_cast<size_t>(sc.integer("resolvent.n_paths")), sc.num("resolvent.T_max"),
        sc.num("resolvent.dt"), sc.seed(), 0,
        static_cast<int>(sc.integer("resolvent.depth_cap")));
    rep.add({"resolvent", "alpha=" + sc.str("resolvent.alpha") + " f=" + f.id,
             std::abs(r.lhs - r.rhs), 3.0 * r.se + r.budget, sc.seed(), r.pass});
    rep.estimates.push_back({"resolvent lhs", r.lhs, r.se, r.rhs, r.pass ? "PASS" : "FAIL"});
}

inline void run_capacity(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    // capacity.g: comma list of lo:hi interval pairs
    potential::OpenSet G;
    for (const auto& part : sc.str_list("capacity.g")) {
        size_t colon = part.find(':');
        if (colon == std::string::npos)
            throw ScenarioError("key 'capacity.g': expected lo:hi, got '" + part + "'");
        G.intervals.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
    }
    double alpha = sc.num("capacity.alpha"), T_max = sc.num("capacity.T_max");
    double dt = sc.num("capacity.dt");
    size_t n_paths = static_cast<size_t>(sc.integer("capacity.n_paths"));
    auto coeffs = sc.coefficients();
    auto law = sc.initial_law();

    auto base = potential::estimate_capacity(G, alpha, coeffs, law, T_max, n_paths, dt,
                                             sc.seed());
    rep.estimates.push_back({"capacity base", base.value, base.stderr_, base.truncation_bound,
                             "REPORT"});
    rep.add({"capacity", "g=" + sc.str("capacity.g"), base.value,
             base.value + 3.0 * base.stderr_, sc.seed(), true});

    if (sc.flag("capacity.family")) {
        // nested family around the base set: widen every interval
        auto widen = [&](double pad) {
            potential::OpenSet W;
            for (auto [lo, hi] : G.intervals) W.intervals.push_back({lo - pad, hi + pad});
            return W;
        };
        double width = G.intervals.front().second - G.intervals.front().first;
        auto g2 = widen(width), g3 = widen(2.0 * width);
        auto c2 = potential::estimate_capacity(g2, alpha, coeffs, law, T_max, n_paths, dt,
                                               sc.seed(), 1);
        auto c3 = potential::estimate_capacity(g3, alpha, coeffs, law, T_max, n_paths, dt,
                                               sc.seed(), 2);
        double se12 = 3.0 * std::sqrt(base.stderr_ * base.stderr_ + c2.stderr_ * c2.stderr_);
        double se23 = 3.0 * std::sqrt(c2.stderr_ * c2.stderr_ + c3.stderr_ * c3.stderr_);
        bool mono = base.value <= c2.value + se12 && c2.value <= c3.value + se23;
        rep.add({"capacity_monotone", "nested x3", std::max(base.value - c2.value,
                 c2.value - c3.value), std::max(se12, se23), sc.seed(), mono});

        // full-window cover: entry at time zero for every path
        potential::OpenSet full;
        full.intervals.push_back({sc.num("grid.x_min"), sc.num("grid.x_max")});
        auto cf = potential::estimate_capacity(full, alpha, coeffs, law, T_max,
                                               std::min<size_t>(n_paths, 2000), dt, sc.seed(), 3);
        rep.add({"capacity_cover", "G covers support", cf.value, 1.0, sc.seed(),
                 cf.value == 1.0});

        // subadditivity on two disjoint intervals
        auto [lo, hi] = G.intervals.front();
        potential::OpenSet ga, gb, gu;
        ga.intervals.push_back({lo, hi});
        gb.intervals.push_back({-hi, -lo});
        gu.intervals = {ga.intervals.front(), gb.intervals.front()};
        auto ca = potential::estimate_capacity(ga, alpha, coeffs, law, T_max, n_paths, dt,
                                               sc.seed(), 4);
        auto cb = potential::estimate_capacity(gb, alpha, coeffs, law, T_max, n_paths, dt,
                                               sc.seed(), 5);
        auto cu = potential::estimate_capacity(gu, alpha, coeffs, law, T_max, n_paths, dt,
                                               sc.seed(), 6);
        double se = 3.0 * std::sqrt(ca.stderr_ * ca.stderr_ + cb.stderr_ * cb.stderr_ +
                                    cu.stderr_ * cu.stderr_);
        bool sub = cu.value <= ca.value + cb.value + se;
        rep.add({"capacity_subadditive", "disjoint pair", cu.value - ca.value - cb.value, se,
                 sc.seed(), sub});
    }
}

inline void run_energy(const Scenario& sc, const std::string& outdir, Report& rep) {
    (void)outdir;
    auto traj = detail::forward_trajectory(sc, sc.num("time.T"));
    auto h = make_bump(sc.str("energy.h"), sc.num("grid.x_min"), sc.num("grid.x_max"));
    auto e = verify::sqrt_energy(traj, h);
    double worst_ratio = *std::max_element(e.ratios.begin(), e.ratios.end());
    rep.add({"energy_bounded", "h=" + sc.str("energy.h") + " E=" + io::fmt(e.energy),
             worst_ratio, 1.25, sc.seed(), e.bounded});
}

/// Run every check whose configuration the scenario carries. `checks.run`
/// resolves "auto" to the present sections; the effective echo stores the
/// resolved list so a re-run reproduces the same set.
inline std::vector<std::string> resolve_run_list(const Scenario& sc) {
    if (sc.str("checks.run") != "auto") return sc.str_list("checks.run");
    std::vector<std::string> out;
    if (sc.is_porous()) out.push_back("solve-porous");
    else out.push_back("solve-fpe");
    out.push_back("simulate");
    if (sc.section_present("checks")) out.push_back("superposition");
    if (sc.section_present("flow")) out.push_back("flow");
    if (sc.section_present("domination")) out.push_back("domination");
    if (sc.section_present("dirichlet")) out.push_back("dirichlet");
    if (sc.section_present("represent")) out.push_back("represent");
    if (sc.section_present("lyapunov")) out.push_back("lyapunov");
    if (sc.section_present("jumps")) out.push_back("jumps");
    if (sc.section_present("resolvent")) out.push_back("resolvent");
    if (sc.section_present("capacity")) out.push_back("capacity");
    if (sc.section_present("energy")) out.push_back("energy");
    if (out.size() == 2) out.push_back("superposition");
    return out;
}

inline void run_subcommand(const std::string& cmd, const Scenario& sc, const std::string& outdir,
                           Report& rep) {
    if (cmd == "solve-fpe") run_solve_fpe(sc, outdir, rep);
    else if (cmd == "solve-porous") run_solve_porous(sc, outdir, rep);
    else if (cmd == "simulate") run_simulate(sc, outdir, rep);
    else if (cmd == "superposition") run_superposition(sc, outdir, rep);
    else if (cmd == "flow") run_flow(sc, outdir, rep);
    else if (cmd == "domination") run_domination(sc, outdir, rep);
    else if (cmd == "dirichlet") run_dirichlet(sc, outdir, rep);
    else if (cmd == "represent") run_represent(sc, outdir, rep);
    else if (cmd == "lyapunov") run_lyapunov(sc, outdir, rep);
    else if (cmd == "jumps") run_jumps(sc, outdir, rep);
    else if (cmd == "resolvent") run_resolvent(sc, outdir, rep);
    else if (cmd == "capacity") run_capacity(sc, outdir, rep);
    else if (cmd == "energy") run_energy(sc, outdir, rep);
    else throw ScenarioError("unknown subcommand '" + cmd + "'");
}

} // namespace suplab::lab
