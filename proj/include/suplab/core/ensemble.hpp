#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "suplab/core/errors.hpp"

namespace suplab {

/// Space-time particle cloud. The clock component is structural: it equals
/// start_clock + steps * step_dt exactly (a step count times a fixed dt,
/// never a floating accumulation).
struct ParticleEnsemble {
    double start_clock = 0.0;
    long steps = 0;
    double step_dt = 0.0;
    std::vector<double> x;
    std::vector<double> y; // empty in d=1
    std::vector<double> weights;

    size_t size() const { return x.size(); }
    int dim() const { return y.empty() ? 1 : 2; }
    double elapsed() const { return steps * step_dt; }
    double clock() const { return start_clock + steps * step_dt; }

    static ParticleEnsemble uniform_weighted(std::vector<double> positions,
                                             double start_clock = 0.0) {
        ParticleEnsemble e;
        e.start_clock = start_clock;
        e.x = std::move(positions);
        if (e.x.empty()) throw EmptyEnsemble("ParticleEnsemble: N must be >= 1");
        e.weights.assign(e.x.size(), 1.0 / static_cast<double>(e.x.size()));
        return e;
    }
};

/// One accepted spatial jump; t is elapsed time since the path start.
struct JumpEvent {
    uint32_t path_id = 0;
    double t = 0.0;
    double x_pre = 0.0;
    double x_post = 0.0;
};

/// Recorded paths of an ensemble. Positions are stored row-major by
/// recorded step, so per-step marginals are contiguous. recorded_steps lists
/// which step indices were kept (all of 0..n_steps when recording fully).
struct PathBundle {
    double start_clock = 0.0;
    double dt = 0.0;
    size_t n_paths = 0;
    size_t n_steps = 0;
    std::vector<size_t> recorded_steps;
    std::vector<double> states;   // states[row * n_paths + i]
    std::vector<double> states_y; // empty in d=1
    std::vector<JumpEvent> events;
    size_t escaped_count = 0; // window escapes (free boundary), reported only

    size_t row_of(size_t step) const {
        auto it = std::lower_bound(recorded_steps.begin(), recorded_steps.end(), step);
        if (it == recorded_steps.end() || *it != step)
            throw Error("PathBundle: step " + std::to_string(step) + " was not recorded");
        return static_cast<size_t>(it - recorded_steps.begin());
    }

    double position(size_t step, size_t path) const {
        return states[row_of(step) * n_paths + path];
    }

    std::span<const double> marginal(size_t step) const {
        return {states.data() + row_of(step) * n_paths, n_paths};
    }

    double time_of_step(size_t step) const { return start_clock + step * dt; }

    /// Step index closest to elapsed time t.
    size_t step_of(double t_elapsed) const {
        long s = std::lround(t_elapsed / dt);
        if (s < 0) s = 0;
        if (s > static_cast<long>(n_steps)) s = static_cast<long>(n_steps);
        return static_cast<size_t>(s);
    }
};

} // namespace suplab
