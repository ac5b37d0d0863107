#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "suplab/core/coefficients.hpp"
#include "suplab/core/errors.hpp"
#include "suplab/core/grid.hpp"
#include "suplab/sde/config.hpp"

namespace suplab {

/// Known scenario keys with their defaults. Unknown keys are an error, not a
/// warning. Values are kept as strings so the effective-configuration echo
/// round-trips byte-exactly.
inline const std::vector<std::pair<std::string, std::string>>& scenario_registry() {
    static const std::vector<std::pair<std::string, std::string>> reg = {
        {"grid.x_min", "-6"},
        {"grid.x_max", "6"},
        {"grid.n_cells", "1200"},

        {"time.T", "0.5"},
        {"time.dt", "0.0001"},
        {"time.theta", "1"},
        {"time.store_every", "0"},

        {"coeffs.model", "heat"},
        {"coeffs.a0", "1"},
        {"coeffs.b0", "0"},
        {"coeffs.theta", "1"},
        {"coeffs.beta", "cubic"},
        {"coeffs.D", "zero"},
        {"coeffs.b", "zero"},
        {"coeffs.allow_degenerate", "0"},

        {"init.law", "gaussian"},
        {"init.mean", "0"},
        {"init.var", "0.25"},
        {"init.lo", "0"},
        {"init.hi", "1"},

        {"sde.n_particles", "100000"},
        {"sde.dt", "0.001"},
        {"sde.seed", "42"},
        {"sde.bandwidth", "0"},
        {"sde.kde_refresh_every", "5"},
        {"sde.record_full_paths", "0"},
        {"sde.boundary", "free"},

        {"checks.checkpoints", "0.25,0.5"},
        {"checks.mismatch_control", "1"},
        {"checks.run", "auto"},

        {"flow.s", "0"},
        {"flow.r", "0.25"},
        {"flow.t", "0.25"},
        {"flow.n_particles", "40000"},
        {"flow.control_pairs", "6"},

        {"domination.c", "2"},
        {"domination.threshold", "0"},

        {"dirichlet.x_l", "-1"},
        {"dirichlet.x_r", "1"},
        {"dirichlet.F", "indicator_right"},
        {"dirichlet.T", "1"},
        {"dirichlet.n_paths", "20000"},
        {"dirichlet.dt", "0.001"},
        {"dirichlet.pde_dt", "0.0002"},
        {"dirichlet.probes", "0:-0.5,0:0,0:0.5,0.25:-0.5,0.25:0,0.25:0.5,0.5:-0.5,0.5:0,0.5:0.5"},
        {"dirichlet.bias_budget", "0.01"},

        {"represent.F", "square"},
        {"represent.T", "0.5"},
        {"represent.n_paths", "100000"},
        {"represent.dt", "0.001"},
        {"represent.tol", "0.01"},

        {"lyapunov.V", "log1p_sq"},
        {"lyapunov.delta", "2"},
        {"lyapunov.eps", "2,8"},
        {"lyapunov.T", "1"},
        {"lyapunov.x0", "0"},
        {"lyapunov.n_paths", "10000"},
        {"lyapunov.seeds", "20"},
        {"lyapunov.checkpoints", "0.25,0.5,1"},
        {"lyapunov.dt", "0.001"},

        {"jumps.rate", "constant"},
        {"jumps.c0", "2"},
        {"jumps.lambda", "0"},
        {"jumps.q", "gaussian"},
        {"jumps.q_mean", "0"},
        {"jumps.q_var", "0.01"},
        {"jumps.q_d1", "0.5"},
        {"jumps.q_p1", "0.5"},
        {"jumps.q_d2", "-0.5"},
        {"jumps.q_lo", "0"},
        {"jumps.q_hi", "1"},
        {"jumps.psi", "one_offdiag,displacement,displacement_sq"},
        {"jumps.t", "1"},
        {"jumps.n_paths", "10000"},
        {"jumps.dt", "0.001"},

        {"resolvent.alpha", "1"},
        {"resolvent.f", "gaussian"},
        {"resolvent.x0", "0"},
        {"resolvent.T_max", "8"},
        {"resolvent.n_paths", "10000"},
        {"resolvent.depth_cap", "3"},
        {"resolvent.dt", "0.001"},

        {"capacity.g", "0.9:1.0"},
        {"capacity.alpha", "1"},
        {"capacity.T_max", "6"},
        {"capacity.n_paths", "20000"},
        {"capacity.dt", "0.001"},
        {"capacity.family", "1"},

        {"energy.h", "one"},
    };
    return reg;
}

/// Parsed scenario: effective key-value table (defaults applied) plus the
/// set of keys the user actually wrote (drives which checks `all` runs).
struct Scenario {
    std::map<std::string, std::string> kv;
    std::set<std::string> user_keys;

    static Scenario defaults() {
        Scenario sc;
        for (const auto& [k, v] : scenario_registry()) sc.kv.emplace(k, v);
        return sc;
    }

    const std::string& str(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw ScenarioError("internal: unknown scenario key '" + key + "'");
        return it->second;
    }

    double num(const std::string& key) const {
        const std::string& s = str(key);
        try {
            size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw ScenarioError("key '" + key + "': cannot parse number from '" + s + "'");
        }
    }

    long integer(const std::string& key) const {
        double v = num(key);
        return static_cast<long>(v);
    }

    bool flag(const std::string& key) const { return num(key) != 0.0; }

    std::vector<double> num_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (...) {
                throw ScenarioError("key '" + key + "': cannot parse list entry '" + item + "'");
            }
        }
        return out;
    }

    std::vector<std::string> str_list(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
        return out;
    }

    bool section_present(const std::string& section) const {
        std::string prefix = section + ".";
        for (const auto& k : user_keys)
            if (k.rfind(prefix, 0) == 0) return true;
        return false;
    }

    SpatialGrid grid() const {
        return make_grid(num("grid.x_min"), num("grid.x_max"),
                         static_cast<int>(integer("grid.n_cells")));
    }

    CoefficientModel coefficients() const {
        const std::string& model = str("coeffs.model");
        if (model == "heat") return CoefficientModel::constant(1.0, 0.0);
        if (model == "constant") return CoefficientModel::constant(num("coeffs.a0"), num("coeffs.b0"));
        if (model == "ou")
            return CoefficientModel::ornstein_uhlenbeck(num("coeffs.a0"), num("coeffs.theta"));
        if (model == "sin_drift" || model == "ou_sin" || model == "degenerate_square")
            return CoefficientModel::time_dependent(model);
        if (model == "porous")
            return CoefficientModel::porous_media(porous_triple());
        throw ScenarioError("key 'coeffs.model': unknown model '" + model + "'");
    }

    bool is_porous() const { return str("coeffs.model") == "porous"; }

    PorousTriple porous_triple() const {
        try {
            return make_porous_triple(str("coeffs.beta"), str("coeffs.D"), str("coeffs.b"));
        } catch (const UnknownCatalogId& e) {
            throw ScenarioError(std::string("coeffs: ") + e.what());
        }
    }

    sde::InitialLaw initial_law() const {
        const std::string& law = str("init.law");
        if (law == "gaussian") return sde::InitialLaw::gaussian(num("init.mean"), num("init.var"));
        if (law == "uniform") return sde::InitialLaw::uniform(num("init.lo"), num("init.hi"));
        throw ScenarioError("key 'init.law': unknown law '" + law + "'");
    }

    uint64_t seed() const { return static_cast<uint64_t>(integer("sde.seed")); }
};

} // namespace suplab
