#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suplab/core/density.hpp"

namespace suplab::sde {

/// Initial law of a particle ensemble.
struct InitialLaw {
    enum class Kind { Gaussian, Uniform, GridDensity };
    Kind kind = Kind::Gaussian;
    double mean = 0.0, var = 0.25; // Gaussian
    double lo = 0.0, hi = 1.0;     // Uniform
    DensitySlice density;          // GridDensity

    static InitialLaw gaussian(double mean, double var) {
        InitialLaw l;
        l.kind = Kind::Gaussian;
        l.mean = mean;
        l.var = var;
        return l;
    }
    static InitialLaw uniform(double lo, double hi) {
        InitialLaw l;
        l.kind = Kind::Uniform;
        l.lo = lo;
        l.hi = hi;
        return l;
    }
    static InitialLaw grid_density(DensitySlice s) {
        InitialLaw l;
        l.kind = Kind::GridDensity;
        l.density = std::move(s);
        return l;
    }
};

enum class Boundary { Free, Reflect };

/// Euler-Maruyama engine configuration.
struct SimConfig {
    size_t n_particles = 100000;
    double dt = 1e-3;
    double T = 0.5;
    uint64_t seed = 42;
    uint32_t replicate = 0;
    Boundary boundary = Boundary::Free;
    bool record_full_paths = true;
    size_t snap_stride = 0;     // when not recording fully: record every m-th step (0 = ends only)
    int kde_refresh_every = 5;  // self-consistent mode
    double bandwidth = 0.0;     // 0 = Silverman rule
    int dim = 1;
};

} // namespace suplab::sde
