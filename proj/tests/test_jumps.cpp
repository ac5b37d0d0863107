#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "suplab/core/catalog.hpp"
#include "suplab/jumps/compensator.hpp"
#include "suplab/jumps/marginals.hpp"
#include "suplab/jumps/resolvent.hpp"
#include "suplab/jumps/simulate.hpp"
#include "suplab/potential/dirichlet.hpp"

using namespace suplab;

namespace {
sde::SimConfig jump_cfg(size_t n, double T, double dt, uint64_t seed, uint32_t rep = 0) {
    sde::SimConfig cfg;
    cfg.n_particles = n;
    cfg.dt = dt;
    cfg.T = T;
    cfg.seed = seed;
    cfg.replicate = rep;
    cfg.record_full_paths = true;
    return cfg;
}
} // namespace

TEST_CASE("zero kernel reproduces the diffusion bit-exactly") {
    auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
    auto cfg = jump_cfg(500, 0.5, 1e-2, 211);
    auto init = sde::sample_initial(sde::InitialLaw::gaussian(0.0, 0.25), cfg.n_particles,
                                    cfg.seed);
    auto with_k = jumps::simulate_jump_process(coeffs, jumps::JumpKernel::none(), init, cfg);
    auto plain = sde::simulate_paths(coeffs, init, cfg);
    REQUIRE(with_k.events.empty());
    REQUIRE(with_k.states == plain.states);
}

TEST_CASE("frozen dynamics: Poisson event count and deterministic displacement") {
    auto coeffs = CoefficientModel::constant(0.0, 0.0);
    auto cfg = jump_cfg(20000, 1.0, 1e-2, 223);
    auto init =
        ParticleEnsemble::uniform_weighted(std::vector<double>(cfg.n_particles, 0.0));

    SECTION("event count is Poisson(c t)") {
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01));
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        std::vector<double> counts(b.n_paths, 0.0);
        for (const auto& e : b.events) counts[e.path_id] += 1.0;
        auto ms = potential::mean_stderr(counts);
        REQUIRE(std::abs(ms.value - 2.0) <= 3.0 * std::sqrt(2.0 / b.n_paths));
    }

    SECTION("point-mass displacement: final position is 0.5 x event count") {
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.5, 0.0));
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        std::vector<double> counts(b.n_paths, 0.0);
        for (const auto& e : b.events) counts[e.path_id] += 1.0;
        size_t exact = 0;
        for (size_t p = 0; p < b.n_paths; ++p)
            exact += b.position(b.n_steps, p) == 0.5 * counts[p] ? 1 : 0;
        REQUIRE(exact == b.n_paths);
    }

    SECTION("domination violation is detected") {
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01),
                                                  1.0); // lambda < sup c
        REQUIRE_THROWS_AS(jumps::simulate_jump_process(coeffs, K, init, cfg),
                          DominationViolated);
    }
}

TEST_CASE("thinned inter-event times are exponential (KS over replicates)") {
    auto coeffs = CoefficientModel::constant(0.0, 0.0);
    // accept probability c / lambda = 1/2, so the test sees genuine thinning
    auto K = jumps::JumpKernel::constant_rate(1.0, jumps::DisplacementLaw::gaussian(0.0, 0.01),
                                              2.0);
    auto ks_p_value = [](double d, double n) {
        double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
        double p = 0.0;
        for (int k = 1; k <= 100; ++k)
            p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        return std::clamp(p, 0.0, 1.0);
    };

    std::vector<double> pvals;
    const double T = 5.0, c = 1.0;
    for (uint32_t rep = 0; rep < 20; ++rep) {
        auto cfg = jump_cfg(300, T, 1e-2, 227, rep);
        auto init =
            ParticleEnsemble::uniform_weighted(std::vector<double>(cfg.n_particles, 0.0));
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        // an observed complete gap is an Exp(c) variable conditioned on
        // fitting before the horizon; its probability integral transform
        // against that truncated law is exactly uniform (no censoring bias)
        std::vector<double> u;
        std::vector<double> last(b.n_paths, 0.0);
        for (const auto& e : b.events) { // events are ordered within a path
            double gap = e.t - last[e.path_id];
            double window = T - last[e.path_id];
            u.push_back((1.0 - std::exp(-c * gap)) / (1.0 - std::exp(-c * window)));
            last[e.path_id] = e.t;
        }
        double n_samples = static_cast<double>(u.size());
        double d = ks_statistic(std::move(u), [](double x) { return std::clamp(x, 0.0, 1.0); });
        pvals.push_back(ks_p_value(d, n_samples));
    }
    std::sort(pvals.begin(), pvals.end());
    REQUIRE(pvals[pvals.size() / 2] > 0.01);
}

TEST_CASE("compensator identity for the catalog marks") {
    SECTION("unit off-diagonal mark counts events") {
        auto coeffs = CoefficientModel::constant(0.0, 0.0);
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01));
        auto cfg = jump_cfg(10000, 1.0, 1e-3, 229);
        auto init = sde::sample_initial(sde::InitialLaw::gaussian(0.0, 1e-6), cfg.n_particles,
                                        cfg.seed);
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        auto rep = jumps::check_jump_compensator(b, K, "one_offdiag", 1.0);
        REQUIRE(rep.pass);
        REQUIRE(rep.lhs == Catch::Approx(2.0).margin(3.0 * rep.se_lhs));
        REQUIRE(rep.rhs == Catch::Approx(2.0).margin(1e-9)); // constant-rate quadrature is exact
    }

    SECTION("displacement mark: compound Poisson mean drift") {
        auto coeffs = CoefficientModel::constant(0.0, 0.0);
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.3, 0.01));
        auto cfg = jump_cfg(10000, 1.0, 1e-3, 233);
        auto init = sde::sample_initial(sde::InitialLaw::gaussian(0.0, 1e-6), cfg.n_particles,
                                        cfg.seed);
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        auto rep = jumps::check_jump_compensator(b, K, "displacement", 1.0);
        REQUIRE(rep.pass);
        REQUIRE(rep.lhs == Catch::Approx(0.6).margin(3.0 * rep.se_lhs));
    }

    SECTION("squared displacement with OU diffusion and two-point marks") {
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto K = jumps::JumpKernel::constant_rate(
            1.5, jumps::DisplacementLaw::two_point(0.4, 0.25, -0.2));
        auto cfg = jump_cfg(10000, 1.0, 1e-3, 239);
        auto init = sde::sample_initial(sde::InitialLaw::gaussian(0.0, 0.25), cfg.n_particles,
                                        cfg.seed);
        auto b = jumps::simulate_jump_process(coeffs, K, init, cfg);
        auto rep = jumps::check_jump_compensator(b, K, "displacement_sq", 1.0);
        REQUIRE(rep.pass);
        // E psi = 0.25 * 0.16 + 0.75 * 0.04 = 0.07, rate 1.5, t = 1
        REQUIRE(rep.rhs == Catch::Approx(0.105).margin(1e-9));
    }

    SECTION("uniform displacement law moments feed the quadrature") {
        auto q = jumps::DisplacementLaw::uniform(0.2, 0.8);
        REQUIRE(q.first_moment() == Catch::Approx(0.5));
        REQUIRE(q.second_moment() == Catch::Approx((0.512 - 0.008) / (3.0 * 0.6)));
        REQUIRE(jumps::psi_mean_under_q("one_offdiag", q) == 1.0);
        REQUIRE_THROWS_AS(jumps::psi_mean_under_q("nosuch", q), UnknownPsi);
    }
}

TEST_CASE("resolvent identity") {
    SECTION("zero kernel: both sides estimate the plain resolvent") {
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto f = make_bounded_fn("gaussian");
        auto rep = jumps::check_resolvent_identity(coeffs, jumps::JumpKernel::none(), f, 1.0,
                                                   0.0, 8000, 8.0, 1e-3, 241);
        REQUIRE(rep.composed == 0.0);
        REQUIRE(rep.pass);
    }

    SECTION("large alpha: both sides are 1/alpha for a conservative process") {
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.04));
        auto f = make_bounded_fn("one");
        auto rep = jumps::check_resolvent_identity(coeffs, K, f, 50.0, 0.3, 4000, 2.0, 2e-4,
                                                   251);
        REQUIRE(rep.lhs == Catch::Approx(0.02).margin(1e-3));
        REQUIRE(rep.rhs == Catch::Approx(0.02).margin(3.0 * rep.se + rep.budget + 1e-3));
        REQUIRE(rep.pass);
    }

    SECTION("OU with Gaussian jumps at alpha = 1") {
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto K = jumps::JumpKernel::constant_rate(0.5, jumps::DisplacementLaw::gaussian(0.3, 0.04));
        auto f = make_bounded_fn("gaussian");
        auto rep = jumps::check_resolvent_identity(coeffs, K, f, 1.0, 0.0, 20000, 8.0, 1e-3,
                                                   257);
        INFO("lhs " << rep.lhs << " rhs " << rep.rhs << " se " << rep.se << " budget "
                    << rep.budget);
        REQUIRE(rep.pass);
        // the identity has content: the composed term is a real contribution
        REQUIRE(rep.composed > 5.0 * rep.se);
    }
}

TEST_CASE("jump marginals match the kernel-perturbed forward solver") {
    fpe::SchemeConfig pcfg;
    pcfg.dt = 1e-3;

    SECTION("pure jump: compound Poisson marginal") {
        auto g = make_grid(-3, 3, 600);
        auto coeffs = CoefficientModel::constant(0.0, 0.0);
        auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01));
        auto cfg = jump_cfg(20000, 1.0, 1e-3, 263);
        cfg.record_full_paths = false;
        cfg.snap_stride = 250;
        auto lines = jumps::verify_jump_fpe_marginals(coeffs, K, gaussian_density(g, 0.0, 0.04),
                                                      1.0, {0.5, 1.0}, cfg, pcfg, true);
        for (const auto& l : lines) {
            INFO("t = " << l.t << " W1 = " << l.w1.w1 << " thr = " << l.w1.threshold);
            REQUIRE(l.w1.pass);
        }
    }

    SECTION("OU with jumps at several checkpoints") {
        auto g = make_grid(-4, 4, 800);
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto K = jumps::JumpKernel::constant_rate(1.0, jumps::DisplacementLaw::gaussian(0.2, 0.02));
        auto cfg = jump_cfg(20000, 1.0, 1e-3, 269);
        cfg.record_full_paths = false;
        cfg.snap_stride = 250;
        auto lines = jumps::verify_jump_fpe_marginals(coeffs, K, gaussian_density(g, 0.0, 0.25),
                                                      1.0, {0.25, 0.5, 1.0}, cfg, pcfg);
        for (const auto& l : lines) {
            INFO("t = " << l.t << " W1 = " << l.w1.w1 << " thr = " << l.w1.threshold);
            REQUIRE(l.w1.pass);
        }
    }
}
