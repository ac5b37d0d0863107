#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "suplab/core/errors.hpp"

namespace suplab {

// ---------------------------------------------------------------------------
// Lyapunov functions with analytic first/second derivatives
// ---------------------------------------------------------------------------

struct LyapunovFn {
    std::string id;
    double (*V)(double x) = nullptr;
    double (*V1)(double x) = nullptr;
    double (*V2)(double x) = nullptr;
};

namespace lyapunov_catalog {
inline double one(double) { return 1.0; }
inline double zero(double) { return 0.0; }
inline double log1p_sq(double x) { return std::log1p(x * x) + 1.0; }
inline double log1p_sq_1(double x) { return 2.0 * x / (1.0 + x * x); }
inline double log1p_sq_2(double x) {
    double d = 1.0 + x * x;
    return 2.0 * (1.0 - x * x) / (d * d);
}
inline double square(double x) { return x * x; }
inline double square_1(double x) { return 2.0 * x; }
inline double square_2(double) { return 2.0; }
} // namespace lyapunov_catalog

inline LyapunovFn make_lyapunov(const std::string& id) {
    using namespace lyapunov_catalog;
    if (id == "one") return {id, one, zero, zero};
    if (id == "log1p_sq") return {id, log1p_sq, log1p_sq_1, log1p_sq_2};
    if (id == "square") return {id, square, square_1, square_2};
    throw UnknownCatalogId("unknown Lyapunov function '" + id + "'");
}

// ---------------------------------------------------------------------------
// Terminal / boundary data F(t, x) for the Dirichlet problem
// ---------------------------------------------------------------------------

/// Boundary data for a space-time domain (0,T) x (x_l, x_r). The same
/// function is evaluated on side exits and at the terminal time.
inline std::function<double(double, double)> make_boundary_fn(const std::string& id, double x_l,
                                                              double x_r) {
    if (id == "coordinate") return [](double, double x) { return x; };
    if (id == "square") return [](double, double x) { return x * x; };
    if (id == "one") return [](double, double) { return 1.0; };
    if (id == "gaussian") return [](double, double x) { return std::exp(-x * x); };
    if (id == "indicator_right") {
        double mid = 0.5 * (x_l + x_r);
        return [x_r, mid](double, double x) { return x >= x_r - 1e-12 && x > mid ? 1.0 : 0.0; };
    }
    throw UnknownCatalogId("unknown boundary function '" + id + "'");
}

// ---------------------------------------------------------------------------
// Jump marks psi(x, y) with psi(y, y) = 0
// ---------------------------------------------------------------------------

struct PsiFn {
    std::string id;
    double (*psi)(double x, double y) = nullptr;
};

namespace psi_catalog {
inline double one_offdiag(double x, double y) { return x == y ? 0.0 : 1.0; }
inline double displacement(double x, double y) { return y - x; }
inline double displacement_sq(double x, double y) { return (y - x) * (y - x); }
} // namespace psi_catalog

inline PsiFn make_psi(const std::string& id) {
    using namespace psi_catalog;
    if (id == "one_offdiag") return {id, one_offdiag};
    if (id == "displacement") return {id, displacement};
    if (id == "displacement_sq") return {id, displacement_sq};
    throw UnknownPsi("unknown psi '" + id + "'");
}

// ---------------------------------------------------------------------------
// Smooth bumps h for the sqrt-regularity energy
// ---------------------------------------------------------------------------

/// h(x) on the window [x_min, x_max]. "one" is constant; "bump" equals 1 on
/// the bulk and tapers smoothly (cos^2) to 0 over the outer 10% of the window.
inline std::function<double(double)> make_bump(const std::string& id, double x_min,
                                               double x_max) {
    if (id == "one") return [](double) { return 1.0; };
    if (id == "bump") {
        double pad = 0.1 * (x_max - x_min);
        double lo = x_min + pad, hi = x_max - pad;
        return [lo, hi, pad](double x) {
            if (x >= lo && x <= hi) return 1.0;
            double d = x < lo ? lo - x : x - hi;
            if (d >= pad) return 0.0;
            double c = std::cos(0.5 * M_PI * d / pad);
            return c * c;
        };
    }
    throw UnknownCatalogId("unknown bump '" + id + "'");
}

// ---------------------------------------------------------------------------
// Bounded test functions f for resolvent checks
// ---------------------------------------------------------------------------

struct BoundedFn {
    std::string id;
    double (*f)(double x) = nullptr;
    double sup_norm = 1.0;
};

namespace bounded_catalog {
inline double one(double) { return 1.0; }
inline double gaussian(double x) { return std::exp(-x * x); }
} // namespace bounded_catalog

inline BoundedFn make_bounded_fn(const std::string& id) {
    using namespace bounded_catalog;
    if (id == "one") return {id, one, 1.0};
    if (id == "gaussian") return {id, gaussian, 1.0};
    throw UnknownCatalogId("unknown test function '" + id + "'");
}

} // namespace suplab
