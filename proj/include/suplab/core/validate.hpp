#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/density.hpp"
#include "suplab/core/grid.hpp"
#include "suplab/core/scenario.hpp"
#include "suplab/fpe/scheme.hpp"

namespace suplab {

struct ConditionCheck {
    std::string name;
    bool pass = false;
    double worst_value = 0.0;
    double worst_x = 0.0;
    double worst_t = 0.0;
    std::string note;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const ConditionCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Spot-check the scenario's coefficient conditions on grid x time samples:
/// ellipticity (T1) with the sampled constant, boundedness of a and b (T2,
/// T4, reported), the porous monotonicity H_beta,1 on sampled r, and the
/// scheme stability bound against time.dt. Never proves, only samples.
inline ValidationReport validate_scenario(const Scenario& sc) {
    ValidationReport rep;
    SpatialGrid grid = sc.grid();
    double T = sc.num("time.T");

    if (sc.is_porous()) {
        auto triple = sc.porous_triple();
        // sample r in [0, 1.5 max u0]
        double u_max = 1.0;
        try {
            auto law = sc.initial_law();
            if (law.kind == sde::InitialLaw::Kind::Gaussian)
                u_max = 1.0 / std::sqrt(2.0 * M_PI * law.var);
            else if (law.kind == sde::InitialLaw::Kind::Uniform)
                u_max = 1.0 / (law.hi - law.lo);
        } catch (...) {
        }
        ConditionCheck hb{"H_beta1", true, std::numeric_limits<double>::infinity(), 0, 0, ""};
        double sup_br = 0.0;
        for (int i = 0; i < grid.n_cells; i += std::max(1, grid.n_cells / 32)) {
            double x = grid.center(i);
            for (int k = 0; k <= 32; ++k) {
                double r = 1.5 * u_max * k / 32.0;
                double br = triple.beta_r(x, r);
                sup_br = std::max(sup_br, br);
                if (br < hb.worst_value) {
                    hb.worst_value = br;
                    hb.worst_x = x;
                    hb.worst_t = r; // worst_t carries the r sample here
                }
            }
        }
        hb.pass = hb.worst_value > 0.0;
        hb.note = "min beta_r on sampled r (sup " + std::to_string(sup_br) + ")";
        rep.checks.push_back(hb);

        ConditionCheck db{"D_b_bounded", true, 0.0, 0, 0, "sup |D(x) b(r)| on samples"};
        for (int i = 0; i < grid.n_cells; i += std::max(1, grid.n_cells / 32)) {
            double x = grid.center(i);
            for (int k = 0; k <= 8; ++k) {
                double r = 1.5 * u_max * k / 8.0;
                db.worst_value = std::max(db.worst_value, std::abs(triple.D(x) * triple.bfun(r)));
            }
        }
        rep.checks.push_back(db);
    } else {
        auto coeffs = sc.coefficients();
        ConditionCheck t1{"T1", false, std::numeric_limits<double>::infinity(), 0, 0, ""};
        ConditionCheck t2{"T2_bounded_a", true, 0.0, 0, 0, "sup |a| on samples"};
        ConditionCheck t4{"T4_bounded_b", true, 0.0, 0, 0, "sup |b| on samples"};
        const int nt = 9;
        for (int k = 0; k < nt; ++k) {
            double t = T * k / (nt - 1);
            // sample centers and edges: edges catch degeneracies that sit
            // exactly between cells (e.g. a(x) = x^2 at the origin)
            for (int i = 0; i < 2 * grid.n_cells + 1; ++i) {
                double x = i % 2 == 0 ? grid.edge(i / 2) : grid.center(i / 2);
                double a = coeffs.a(t, x), b = coeffs.b(t, x);
                if (a < t1.worst_value) {
                    t1.worst_value = a;
                    t1.worst_x = x;
                    t1.worst_t = t;
                }
                t2.worst_value = std::max(t2.worst_value, std::abs(a));
                t4.worst_value = std::max(t4.worst_value, std::abs(b));
            }
        }
        t1.pass = t1.worst_value > 0.0;
        t1.note = "ellipticity constant C = " + std::to_string(t1.worst_value);
        rep.checks.push_back(t1);
        rep.checks.push_back(t2);
        rep.checks.push_back(t4);
    }

    // scheme stability vs time.dt
    ConditionCheck cfl{"cfl", true, 0.0, 0, 0, ""};
    double bound;
    if (sc.is_porous()) {
        // implicit beta diffusion: only the explicit drift constrains dt
        auto triple = sc.porous_triple();
        double vmax = 0.0;
        for (int i = 0; i < grid.n_cells; i += std::max(1, grid.n_cells / 32))
            for (int k = 0; k <= 8; ++k)
                vmax = std::max(vmax, std::abs(triple.D(grid.center(i)) * triple.bfun(k / 4.0)));
        bound = vmax > 0.0 ? grid.dx() / vmax : std::numeric_limits<double>::infinity();
    } else {
        auto coeffs = sc.coefficients();
        bound = fpe::stability_bound(coeffs, grid, T, static_cast<int>(sc.integer("time.theta")));
    }
    cfl.worst_value = bound;
    cfl.pass = sc.num("time.dt") <= bound * (1.0 + 1e-12);
    cfl.note = cfl.pass ? "time.dt within the scheme stability bound"
                        : "time.dt exceeds the scheme stability bound " + std::to_string(bound);
    rep.checks.push_back(cfl);
    return rep;
}

} // namespace suplab
