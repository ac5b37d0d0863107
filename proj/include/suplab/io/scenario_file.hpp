#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "suplab/core/errors.hpp"
#include "suplab/core/scenario.hpp"

namespace suplab::io {

namespace detail {
inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
} // namespace detail

/// Parse a line-oriented `section.key = value` scenario file over the
/// defaults. Unknown keys are an error (exit code 2 at the CLI), not a
/// warning. '#' and ';' start comments.
inline Scenario parse_scenario(std::istream& in) {
    Scenario sc = Scenario::defaults();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = detail::trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("scenario line " + std::to_string(line_no) +
                                ": expected 'section.key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (sc.kv.find(key) == sc.kv.end())
            throw ScenarioError("scenario line " + std::to_string(line_no) + ": unknown key '" +
                                key + "'");
        sc.kv[key] = value;
        sc.user_keys.insert(key);
    }
    return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
    return parse_scenario(f);
}

/// Serialize the effective configuration (defaults applied) in registry
/// order. Re-parsing the output reproduces the same effective table, and the
/// user-key set is widened to every key so `all` reruns every check.
inline std::string serialize_effective(const Scenario& sc) {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, unused] : scenario_registry()) {
        (void)unused;
        std::string sec = key.substr(0, key.find('.'));
        if (sec != section) {
            if (!section.empty()) out << "\n";
            section = sec;
        }
        out << key << " = " << sc.kv.at(key) << "\n";
    }
    return out.str();
}

} // namespace suplab::io
