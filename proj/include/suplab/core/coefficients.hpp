#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "suplab/core/density.hpp"
#include "suplab/core/errors.hpp"

namespace suplab {

// ---------------------------------------------------------------------------
// Porous-media coefficient triple (beta, D, b)
// ---------------------------------------------------------------------------

/// Nonlinearity triple of the porous-media equation
///   d/dt u = Lap beta(x, u) - div(D(x) b(u) u).
/// beta must be strictly increasing in r with beta(x, 0) = 0.
struct PorousTriple {
    std::string beta_id = "cubic";
    std::string d_id = "zero";
    std::string b_id = "zero";

    double (*beta)(double x, double r) = nullptr;
    double (*beta_r)(double x, double r) = nullptr;
    double (*D)(double x) = nullptr;
    double (*bfun)(double r) = nullptr;
};

namespace porous_catalog {

inline double beta_linear(double, double r) { return r; }
inline double betar_linear(double, double) { return 1.0; }
inline double beta_cubic(double, double r) { return r + r * r * r / 3.0; }
inline double betar_cubic(double, double r) { return 1.0 + r * r; }
// decreasing beta, used to exercise the NonmonotoneBeta guard
inline double beta_bad(double, double r) { return -r; }
inline double betar_bad(double, double) { return -1.0; }

inline double d_zero(double) { return 0.0; }
inline double d_one(double) { return 1.0; }

inline double b_zero(double) { return 0.0; }
inline double b_one(double) { return 1.0; }
inline double b_inv1p(double r) { return 1.0 / (1.0 + r); }

} // namespace porous_catalog

inline PorousTriple make_porous_triple(const std::string& beta_id, const std::string& d_id,
                                       const std::string& b_id) {
    using namespace porous_catalog;
    PorousTriple t;
    t.beta_id = beta_id;
    t.d_id = d_id;
    t.b_id = b_id;
    if (beta_id == "linear") {
        t.beta = beta_linear;
        t.beta_r = betar_linear;
    } else if (beta_id == "cubic") {
        t.beta = beta_cubic;
        t.beta_r = betar_cubic;
    } else if (beta_id == "decreasing") {
        t.beta = beta_bad;
        t.beta_r = betar_bad;
    } else {
        throw UnknownCatalogId("unknown beta id '" + beta_id + "'");
    }
    if (d_id == "zero") t.D = d_zero;
    else if (d_id == "one") t.D = d_one;
    else throw UnknownCatalogId("unknown D id '" + d_id + "'");
    if (b_id == "zero") t.bfun = b_zero;
    else if (b_id == "one") t.bfun = b_one;
    else if (b_id == "inv1p") t.bfun = b_inv1p;
    else throw UnknownCatalogId("unknown b id '" + b_id + "'");
    return t;
}

/// Nemytskii diffusion coefficient a^u = 2 beta(x, u) / u with the removable
/// singularity at u = 0 evaluated as the Taylor limit 2 beta_r(x, 0)
/// (valid since beta(x, 0) = 0).
inline double nemytskii_a(const PorousTriple& t, double x, double u) {
    constexpr double u_floor = 1e-12;
    if (u < u_floor) return 2.0 * t.beta_r(x, 0.0);
    return 2.0 * t.beta(x, u) / u;
}

inline double nemytskii_b(const PorousTriple& t, double x, double u) {
    return t.D(x) * t.bfun(u);
}

// ---------------------------------------------------------------------------
// Time-dependent catalog entries
// ---------------------------------------------------------------------------

namespace td_catalog {

inline double a_half(double, double) { return 0.5; }
inline double b_sin(double t, double) { return std::sin(t); }
inline double a_one(double, double) { return 1.0; }
inline double b_ou_sin(double t, double x) { return -x + std::sin(t); }
// degenerate diffusion a(x) = x^2, for ellipticity spot-check failures
inline double a_square(double, double x) { return x * x; }
inline double b_zero(double, double) { return 0.0; }

} // namespace td_catalog

// ---------------------------------------------------------------------------
// CoefficientModel
// ---------------------------------------------------------------------------

/// Drift/diffusion law b(t,x), a(t,x) of the operator
///   L_t f = b d_x f + (1/2) a d_xx f.
/// PorousMedia evaluates through a bound (current) density slice,
/// Linearized through a frozen trajectory.
class CoefficientModel {
public:
    enum class Kind { Constant, OrnsteinUhlenbeck, TimeDependent, PorousMedia, Linearized };

    static CoefficientModel constant(double a0, double b0) {
        CoefficientModel m;
        m.kind_ = Kind::Constant;
        m.a0_ = a0;
        m.b0_ = b0;
        return m;
    }

    /// dX = -theta X dt + sqrt(a0) dW
    static CoefficientModel ornstein_uhlenbeck(double a0, double theta) {
        CoefficientModel m;
        m.kind_ = Kind::OrnsteinUhlenbeck;
        m.a0_ = a0;
        m.ou_theta_ = theta;
        return m;
    }

    static CoefficientModel time_dependent(const std::string& id) {
        using namespace td_catalog;
        CoefficientModel m;
        m.kind_ = Kind::TimeDependent;
        m.td_id_ = id;
        if (id == "sin_drift") {
            m.td_a_ = a_half;
            m.td_b_ = b_sin;
        } else if (id == "ou_sin") {
            m.td_a_ = a_one;
            m.td_b_ = b_ou_sin;
        } else if (id == "degenerate_square") {
            m.td_a_ = a_square;
            m.td_b_ = b_zero;
        } else {
            throw UnknownCatalogId("unknown time-dependent model '" + id + "'");
        }
        return m;
    }

    /// Self-consistent Nemytskii model; a density slice must be bound
    /// before evaluation.
    static CoefficientModel porous_media(const PorousTriple& triple) {
        CoefficientModel m;
        m.kind_ = Kind::PorousMedia;
        m.triple_ = triple;
        return m;
    }

    /// Frozen-density linearization a^u = 2 beta(x,u)/u, b^u = D(x) b(u)
    /// along the given trajectory (linear in t, piecewise-constant in x).
    static CoefficientModel linearized(std::shared_ptr<const DensityTrajectory> traj,
                                       const PorousTriple& triple) {
        CoefficientModel m;
        m.kind_ = Kind::Linearized;
        m.triple_ = triple;
        m.frozen_ = std::move(traj);
        return m;
    }

    Kind kind() const { return kind_; }
    const PorousTriple& triple() const { return triple_; }
    const std::shared_ptr<const DensityTrajectory>& frozen() const { return frozen_; }

    void bind_density(const DensitySlice* slice) { bound_ = slice; }

    /// Copy of this model with the drift shifted by a constant. Used by
    /// deliberately-mismatched harness controls.
    CoefficientModel with_drift_shift(double shift) const {
        CoefficientModel m = *this;
        m.drift_shift_ += shift;
        return m;
    }

    double a(double t, double x) const {
        switch (kind_) {
        case Kind::Constant: return a0_;
        case Kind::OrnsteinUhlenbeck: return a0_;
        case Kind::TimeDependent: return td_a_(t, x);
        case Kind::PorousMedia:
            if (!bound_) throw Error("PorousMedia coefficients: no density bound");
            return nemytskii_a(triple_, x, bound_->value_at(x));
        case Kind::Linearized: return nemytskii_a(triple_, x, frozen_->value_at(t, x));
        }
        return 0.0;
    }

    double b(double t, double x) const {
        switch (kind_) {
        case Kind::Constant: return b0_ + drift_shift_;
        case Kind::OrnsteinUhlenbeck: return -ou_theta_ * x + drift_shift_;
        case Kind::TimeDependent: return td_b_(t, x) + drift_shift_;
        case Kind::PorousMedia:
            if (!bound_) throw Error("PorousMedia coefficients: no density bound");
            return nemytskii_b(triple_, x, bound_->value_at(x)) + drift_shift_;
        case Kind::Linearized:
            return nemytskii_b(triple_, x, frozen_->value_at(t, x)) + drift_shift_;
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind_) {
        case Kind::Constant:
            return "constant(a0=" + std::to_string(a0_) + ",b0=" + std::to_string(b0_) + ")";
        case Kind::OrnsteinUhlenbeck:
            return "ou(a0=" + std::to_string(a0_) + ",theta=" + std::to_string(ou_theta_) + ")";
        case Kind::TimeDependent: return "time_dependent(" + td_id_ + ")";
        case Kind::PorousMedia:
            return "porous(" + triple_.beta_id + "," + triple_.d_id + "," + triple_.b_id + ")";
        case Kind::Linearized:
            return "linearized(" + triple_.beta_id + "," + triple_.d_id + "," + triple_.b_id + ")";
        }
        return "?";
    }

private:
    Kind kind_ = Kind::Constant;
    double a0_ = 1.0, b0_ = 0.0, ou_theta_ = 1.0, drift_shift_ = 0.0;
    std::string td_id_;
    double (*td_a_)(double, double) = nullptr;
    double (*td_b_)(double, double) = nullptr;
    PorousTriple triple_;
    const DensitySlice* bound_ = nullptr;
    std::shared_ptr<const DensityTrajectory> frozen_;
};

} // namespace suplab
