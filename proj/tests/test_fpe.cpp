#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "suplab/core/catalog.hpp"
#include "suplab/core/distance.hpp"
#include "suplab/fpe/backward.hpp"
#include "suplab/fpe/linear.hpp"
#include "suplab/fpe/perturbed.hpp"
#include "suplab/fpe/porous.hpp"

using namespace suplab;

namespace {
DensitySlice bimodal(const SpatialGrid& g) {
    auto a = gaussian_density(g, -1.0, 0.09);
    auto b = gaussian_density(g, 1.0, 0.09);
    DensitySlice s{g, std::vector<double>(g.n_cells)};
    for (int i = 0; i < g.n_cells; ++i) s.values[i] = 0.5 * (a.values[i] + b.values[i]);
    s.normalize();
    return s;
}
} // namespace

TEST_CASE("heat kernel: variance grows by t") {
    auto g = make_grid(-6, 6, 1200);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-4;
    cfg.theta = 1;
    auto traj = fpe::solve_linear_fpe(u0, CoefficientModel::constant(1.0, 0.0), 0.5, cfg);
    auto ref = gaussian_density(g, 0.0, 0.75);
    REQUIRE(l1_distance(traj.slice(traj.n_times() - 1), ref) <= 1e-2);
    REQUIRE(traj.max_mass_drift <= cfg.mass_tol);
    REQUIRE(traj.max_clamp <= 1e-12);
}

TEST_CASE("explicit scheme honors the CFL guard") {
    auto g = make_grid(-6, 6, 600);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    fpe::SchemeConfig cfg;
    cfg.theta = 0;
    cfg.dt = 1e-3; // dx^2 / a = 4e-4 < dt
    REQUIRE_THROWS_AS(fpe::solve_linear_fpe(u0, CoefficientModel::constant(1.0, 0.0), 0.1, cfg),
                      CflViolation);
    cfg.dt = 2e-4;
    auto traj = fpe::solve_linear_fpe(u0, CoefficientModel::constant(1.0, 0.0), 0.1, cfg);
    REQUIRE(l1_distance(traj.slice(traj.n_times() - 1), gaussian_density(g, 0.0, 0.35)) <= 1e-2);
}

TEST_CASE("OU relaxes to its stationary law") {
    auto g = make_grid(-6, 6, 800);
    auto u0 = gaussian_density(g, 2.0, 0.04);
    fpe::SchemeConfig cfg;
    cfg.dt = 2e-4;
    cfg.theta = 1;
    auto traj =
        fpe::solve_linear_fpe(u0, CoefficientModel::ornstein_uhlenbeck(1.0, 1.0), 6.0, cfg);
    // stationary density of dX = -X dt + dW is N(0, 1/2)
    REQUIRE(l1_distance(traj.slice(traj.n_times() - 1), gaussian_density(g, 0.0, 0.5)) <= 1e-2);
}

TEST_CASE("time-dependent drift transports the mean") {
    auto g = make_grid(-6, 6, 1200);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.theta = 1;
    double T = 1.0;
    auto traj =
        fpe::solve_linear_fpe(u0, CoefficientModel::time_dependent("sin_drift"), T, cfg);
    double want = 1.0 - std::cos(T); // mean moves by int_0^T sin
    REQUIRE(traj.slice(traj.n_times() - 1).mean() == Catch::Approx(want).margin(2e-3));
}

TEST_CASE("porous media with beta(r) = r degenerates to the linear solver") {
    auto g = make_grid(-4, 4, 400);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.theta = 1;
    cfg.store_every = 10;
    auto triple = make_porous_triple("linear", "zero", "zero");
    auto pt = fpe::solve_porous_media(u0, triple, 0.1, cfg);
    // d/dt u = d_xx beta(u) = (1/2) d_xx (2 u)
    auto lt = fpe::solve_linear_fpe(u0, CoefficientModel::constant(2.0, 0.0), 0.1, cfg);
    REQUIRE(pt.n_times() == lt.n_times());
    double worst = 0.0;
    for (size_t k = 0; k < pt.n_times(); ++k)
        for (int i = 0; i < g.n_cells; ++i)
            worst = std::max(worst, std::abs(pt.values[k][i] - lt.values[k][i]));
    REQUIRE(worst <= 1e-10);
}

TEST_CASE("porous cubic run against a 4x finer oracle") {
    auto triple = make_porous_triple("cubic", "zero", "zero");
    double T = 0.25;

    auto g_c = make_grid(-4, 4, 400);
    fpe::SchemeConfig cfg_c;
    cfg_c.dt = 4e-4;
    auto coarse = fpe::solve_porous_media(gaussian_density(g_c, 0.0, 0.25), triple, T, cfg_c);

    auto g_f = make_grid(-4, 4, 1600);
    fpe::SchemeConfig cfg_f;
    cfg_f.dt = 1e-4;
    auto fine = fpe::solve_porous_media(gaussian_density(g_f, 0.0, 0.25), triple, T, cfg_f);

    double vc = coarse.slice(coarse.n_times() - 1).value_at(0.0);
    double vf = fine.slice(fine.n_times() - 1).value_at(0.0);
    REQUIRE(std::abs(vc - vf) / vf <= 2e-2);
    REQUIRE(coarse.max_mass_drift <= 1e-8);

    auto bad = make_porous_triple("decreasing", "zero", "zero");
    REQUIRE_THROWS_AS(fpe::solve_porous_media(gaussian_density(g_c, 0.0, 0.25), bad, 0.01, cfg_c),
                      NonmonotoneBeta);
}

TEST_CASE("porous L1 contraction between two initial data") {
    auto g = make_grid(-5, 5, 500);
    auto triple = make_porous_triple("cubic", "one", "inv1p");
    fpe::SchemeConfig cfg;
    cfg.dt = 2e-4;
    double T = 0.25;
    auto u0 = bimodal(g);
    auto v0 = gaussian_density(g, 0.0, 0.25);
    auto ut = fpe::solve_porous_media(u0, triple, T, cfg);
    auto vt = fpe::solve_porous_media(v0, triple, T, cfg);
    double before = l1_distance(u0, v0);
    double after = l1_distance(ut.slice(ut.n_times() - 1), vt.slice(vt.n_times() - 1));
    REQUIRE(after <= before + 1e-3);
}

TEST_CASE("linearize freezes the Nemytskii coefficients") {
    auto g = make_grid(-4, 4, 400);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.store_every = 5;

    SECTION("linear beta gives a^u = 2") {
        auto triple = make_porous_triple("linear", "one", "one");
        auto traj = fpe::solve_porous_media(u0, triple, 0.2, cfg);
        auto m = fpe::linearize(traj, triple);
        REQUIRE(m.a(0.1, 0.5) == Catch::Approx(2.0).margin(1e-14));
        REQUIRE(m.b(0.1, 0.5) == Catch::Approx(1.0).margin(1e-14)); // D = 1, b = 1
    }

    SECTION("vacuum limit uses the Taylor quotient 2 beta_r(x, 0)") {
        auto triple = make_porous_triple("cubic", "zero", "zero");
        auto traj = fpe::solve_porous_media(u0, triple, 0.2, cfg);
        auto m = fpe::linearize(traj, triple);
        REQUIRE(m.a(0.1, 3.9) == Catch::Approx(2.0).margin(1e-12)); // u ~ 0 out there
    }

    SECTION("spot value equals 2 beta(u)/u with u read from the trajectory") {
        auto triple = make_porous_triple("cubic", "zero", "zero");
        auto traj = fpe::solve_porous_media(u0, triple, 0.2, cfg);
        auto m = fpe::linearize(traj, triple);
        double t_star = 0.1, x_star = 0.3;
        double u_star = traj.value_at(t_star, x_star);
        REQUIRE(u_star > 1e-6);
        double want = 2.0 * (u_star + u_star * u_star * u_star / 3.0) / u_star;
        REQUIRE(m.a(t_star, x_star) == Catch::Approx(want).margin(1e-14));
    }
}

TEST_CASE("backward solver: coordinate and quadratic are space-time harmonic") {
    auto g = make_grid(-6, 6, 1200);
    auto coeffs = CoefficientModel::constant(1.0, 0.0);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.theta = 1;
    double T = 0.5;

    auto Fx = make_boundary_fn("coordinate", g.x_min, g.x_max);
    auto rho_x = fpe::solve_backward_kolmogorov(Fx, coeffs, g, g.x_min, g.x_max, T, cfg);
    for (double probe : {-3.0, -1.0, 0.5, 2.5}) {
        double x = g.center(g.cell_of(probe)); // evaluate at the owning cell center
        for (double t : {0.0, 0.25})
            REQUIRE(rho_x.value_at(t, x) == Catch::Approx(x).margin(1e-3));
    }

    auto Fsq = make_boundary_fn("square", g.x_min, g.x_max);
    auto rho_sq = fpe::solve_backward_kolmogorov(Fsq, coeffs, g, g.x_min, g.x_max, T, cfg);
    for (double probe : {-1.5, 0.0, 1.0}) {
        double x = g.center(g.cell_of(probe));
        for (double t : {0.0, 0.25})
            REQUIRE(rho_sq.value_at(t, x) == Catch::Approx(x * x + (T - t)).margin(2e-3));
    }

    // terminal slice is exactly the terminal datum at cell centers
    double xc = g.center(g.cell_of(1.0));
    REQUIRE(rho_sq.value_at(T, xc) == Catch::Approx(xc * xc).margin(1e-12));
}

TEST_CASE("backward Dirichlet: long-horizon exit probability is harmonic") {
    // fine-grid elliptic limit: rho(0, x) -> (x + 1)/2 for exit through +1
    auto g = make_grid(-1.2, 1.2, 480);
    auto coeffs = CoefficientModel::constant(1.0, 0.0);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.theta = 1;
    auto F = make_boundary_fn("indicator_right", -1.0, 1.0);
    auto rho = fpe::solve_backward_kolmogorov(F, coeffs, g, -1.0, 1.0, 10.0, cfg);
    REQUIRE(rho.value_at(0.0, 0.5) == Catch::Approx(0.75).margin(5e-3));
    REQUIRE(rho.value_at(0.0, 0.0) == Catch::Approx(0.5).margin(5e-3));
    REQUIRE(rho.value_at(0.0, -0.5) == Catch::Approx(0.25).margin(5e-3));
}

TEST_CASE("discrete duality of forward and transposed backward marches") {
    auto g = make_grid(-6, 6, 600);
    auto u0 = gaussian_density(g, 0.0, 0.25);
    double T = 0.5;
    auto F = make_boundary_fn("square", g.x_min, g.x_max);

    for (int theta : {0, 1}) {
        fpe::SchemeConfig cfg;
        cfg.theta = theta;
        cfg.dt = theta == 0 ? 2e-4 : 1e-3;
        auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
        auto fwd = fpe::solve_linear_fpe(u0, coeffs, T, cfg);
        auto bwd = fpe::solve_backward_kolmogorov(F, coeffs, g, g.x_min, g.x_max, T, cfg);

        double lhs = 0.0, rhs = 0.0;
        auto uT = fwd.slice(fwd.n_times() - 1);
        for (int i = 0; i < g.n_cells; ++i) {
            lhs += bwd.values.front()[i] * u0.values[i];
            rhs += F(T, g.center(i)) * uT.values[i];
        }
        lhs *= g.dx();
        rhs *= g.dx();
        REQUIRE(std::abs(lhs - rhs) <= 5e-3);
        REQUIRE(std::abs(lhs - rhs) <= 1e-10); // transpose marching is exact here
    }
}

TEST_CASE("perturbed solver with K = 0 reproduces the linear solver") {
    auto g = make_grid(-6, 6, 600);
    auto u0 = gaussian_density(g, 1.0, 0.09);
    auto coeffs = CoefficientModel::ornstein_uhlenbeck(1.0, 1.0);
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.store_every = 100;
    auto base = fpe::solve_linear_fpe(u0, coeffs, 1.0, cfg);
    auto pert = fpe::solve_perturbed_fpe(u0, coeffs, jumps::JumpKernel::none(), 1.0, cfg);
    REQUIRE(base.n_times() == pert.n_times());
    double worst = 0.0;
    for (size_t k = 0; k < base.n_times(); ++k)
        for (int i = 0; i < g.n_cells; ++i)
            worst = std::max(worst, std::abs(base.values[k][i] - pert.values[k][i]));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("pure-jump compound Poisson variance growth") {
    auto g = make_grid(-3, 3, 600);
    auto u0 = gaussian_density(g, 0.0, 0.04);
    auto coeffs = CoefficientModel::constant(0.0, 0.0);
    auto K = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01));
    fpe::SchemeConfig cfg;
    cfg.dt = 1e-3;
    double T = 1.0;
    auto traj = fpe::solve_perturbed_fpe(u0, coeffs, K, T, cfg, true);
    double v0 = u0.variance();
    double vT = traj.slice(traj.n_times() - 1).variance();
    // compound Poisson: variance grows by rate * E[Z^2] * t
    REQUIRE(vT - v0 == Catch::Approx(2.0 * 0.01 * T).margin(5e-4));
    REQUIRE(traj.max_mass_drift <= 1e-8);

    auto K_bad = jumps::JumpKernel::constant_rate(2.0, jumps::DisplacementLaw::gaussian(0.0, 0.01),
                                                  1.0); // lambda < sup c
    REQUIRE_THROWS_AS(fpe::solve_perturbed_fpe(u0, coeffs, K_bad, 0.1, cfg, true),
                      KernelUnbounded);
}

TEST_CASE("self-convergence of the linear solver under (dx, dt) halving") {
    auto coeffs = CoefficientModel::constant(1.0, 0.0);
    double T = 0.25;
    auto run = [&](int cells, double dt) {
        auto g = make_grid(-6, 6, cells);
        fpe::SchemeConfig cfg;
        cfg.dt = dt;
        cfg.theta = 1;
        auto traj = fpe::solve_linear_fpe(gaussian_density(g, 0.0, 0.25), coeffs, T, cfg);
        return traj.slice(traj.n_times() - 1);
    };
    auto coarse = run(300, 8e-4);
    auto mid = run(600, 4e-4);
    auto fine = run(1200, 2e-4);

    // project finer slices onto a coarser grid by pairwise averaging
    auto project = [](const DensitySlice& s, int factor) {
        DensitySlice out{SpatialGrid{s.grid.x_min, s.grid.x_max, s.grid.n_cells / factor},
                         std::vector<double>(s.grid.n_cells / factor, 0.0)};
        for (int i = 0; i < s.grid.n_cells; ++i) out.values[i / factor] += s.values[i];
        for (auto& v : out.values) v /= factor;
        return out;
    };
    double e_coarse = l1_distance(coarse, project(fine, 4));
    double e_mid = l1_distance(mid, project(fine, 2));
    REQUIRE(e_coarse / e_mid >= 1.7);
}
