// suplab command-line laboratory: scenario-driven solver runs and
// pass/fail verification reports, CSV artifacts per module.
//
// usage: suplab <subcommand> <scenario-file> <output-dir>
// exit codes: 0 = all checks pass, 1 = some check failed, 2 = configuration
// or validation error.

#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>

#include <CLI11.hpp>

#include "suplab/io/scenario_file.hpp"
#include "suplab/lab/runners.hpp"

namespace fs = std::filesystem;
using namespace suplab;

namespace {

const std::vector<std::string> kSubcommands = {
    "solve-fpe", "solve-porous", "simulate", "superposition", "flow",
    "domination", "dirichlet",   "represent", "lyapunov",     "jumps",
    "resolvent", "capacity",     "energy",    "all"};

int run(const std::string& cmd, const std::string& scenario_path, const std::string& outdir) {
    Scenario sc = io::parse_scenario_file(scenario_path);

    // hard validation gate: grid/catalog resolution and the scheme CFL bound
    sc.grid();
    if (sc.is_porous()) sc.porous_triple();
    else sc.coefficients();
    auto validation = validate_scenario(sc);
    if (const auto* cfl = validation.find("cfl"); cfl && !cfl->pass)
        throw ScenarioError("key 'time.dt': " + cfl->note);

    fs::create_directories(outdir);

    std::vector<std::string> cmds =
        cmd == "all" ? lab::resolve_run_list(sc) : std::vector<std::string>{cmd};
    {
        // echo the effective configuration; resolve checks.run so a re-run
        // reproduces the same check set byte-for-byte
        Scenario eff = sc;
        std::string joined;
        for (const auto& c : cmds) joined += (joined.empty() ? "" : ",") + c;
        eff.kv["checks.run"] = joined;
        std::ofstream f(outdir + "/effective.scenario", std::ios::binary);
        f << io::serialize_effective(eff);
    }

    lab::Report report;
    for (const auto& c : cmds) lab::run_subcommand(c, sc, outdir, report);
    report.write(outdir);

    for (const auto& l : report.lines)
        std::cout << l.name << (l.detail.empty() ? "" : " " + l.detail)
                  << " statistic=" << io::fmt(l.statistic)
                  << " threshold=" << io::fmt(l.threshold) << " seed=" << l.seed << ' '
                  << (l.pass ? "PASS" : "FAIL") << '\n';
    return report.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"suplab: Fokker-Planck / McKean-Vlasov verification laboratory"};
    app.require_subcommand(1);

    std::string scenario_path, outdir;
    for (const auto& name : kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("scenario", scenario_path, "scenario file")->required();
        sub->add_option("outdir", outdir, "output directory")->required();
    }

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        return run(cmd, scenario_path, outdir);
    } catch (const ScenarioError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const CflViolation& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
