#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "suplab/core/density.hpp"
#include "suplab/core/ensemble.hpp"
#include "suplab/core/errors.hpp"

namespace suplab::io {

/// 17-significant-digit decimal, enough to round-trip a double.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary); // '\n' line ends on every platform
    if (!f) throw Error("cannot open output file '" + path + "'");
    return f;
}

/// Long-format trajectory export: header `t,x,u`.
inline void write_trajectory_csv(const DensityTrajectory& traj, const std::string& path) {
    auto f = open_out(path);
    f << "t,x,u\n";
    for (size_t k = 0; k < traj.n_times(); ++k)
        for (int i = 0; i < traj.grid.n_cells; ++i)
            f << fmt(traj.times[k]) << ',' << fmt(traj.grid.center(i)) << ','
              << fmt(traj.values[k][i]) << '\n';
}

/// Path export: `path_id,step,t,x`.
inline void write_paths_csv(const PathBundle& b, const std::string& path) {
    auto f = open_out(path);
    f << "path_id,step,t,x\n";
    for (size_t r = 0; r < b.recorded_steps.size(); ++r) {
        size_t k = b.recorded_steps[r];
        for (size_t p = 0; p < b.n_paths; ++p)
            f << p << ',' << k << ',' << fmt(b.time_of_step(k)) << ','
              << fmt(b.states[r * b.n_paths + p]) << '\n';
    }
}

/// Jump event log: `path_id,t,x_pre,x_post`.
inline void write_events_csv(const PathBundle& b, const std::string& path) {
    auto f = open_out(path);
    f << "path_id,t,x_pre,x_post\n";
    for (const auto& e : b.events)
        f << e.path_id << ',' << fmt(e.t) << ',' << fmt(e.x_pre) << ',' << fmt(e.x_post) << '\n';
}

struct EstimateRow {
    std::string quantity;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    std::string verdict;
};

inline void write_estimates_csv(const std::vector<EstimateRow>& rows, const std::string& path) {
    auto f = open_out(path);
    f << "quantity,estimate,stderr,bound,verdict\n";
    for (const auto& r : rows)
        f << r.quantity << ',' << fmt(r.estimate) << ',' << fmt(r.stderr_) << ','
          << fmt(r.bound) << ',' << r.verdict << '\n';
}

struct VerdictRow {
    std::string check;
    double checkpoint = 0.0;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string verdict;
};

inline void write_verdicts_csv(const std::vector<VerdictRow>& rows, const std::string& path) {
    auto f = open_out(path);
    f << "check,checkpoint,statistic,threshold,verdict\n";
    for (const auto& r : rows)
        f << r.check << ',' << fmt(r.checkpoint) << ',' << fmt(r.statistic) << ','
          << fmt(r.threshold) << ',' << r.verdict << '\n';
}

} // namespace suplab::io
