// The three Ermakov system classes in Cartesian variables, their exact
// polar counterparts obtained by rotating the Cartesian right-hand sides,
// the printed polar forms kept verbatim as comparison targets, and the
// Ermakov-Lewis first integral for each class.
//
// Classes:
//   kepler_ermakov:  xdd + w^2 x = -(x/r^3) H + f(y/x)/x^3
//                    ydd + w^2 y = -(y/r^3) H + g(y/x)/y^3
//                    H = (C/4) r^3 - h(cot th)/(r cos th)
//   generalized:     xdd + w^2 x = f(y/x)/(y x^2)
//                    ydd + w^2 y = g(y/x)/(x y^2)
//   toy:             xdd + w^2 x = 1/x^3
//                    ydd + w^2 y = 1/y^3
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/shapefn.hpp"

namespace ermakov::systems {

enum class SystemClass { kepler_ermakov, generalized, toy };

inline const char* to_string(SystemClass c) {
    switch (c) {
        case SystemClass::kepler_ermakov: return "kepler_ermakov";
        case SystemClass::generalized: return "generalized";
        case SystemClass::toy: return "toy";
    }
    return "?";
}

/// One of the three system classes with its shape functions and frequency.
/// Built through the class-specific factories so extraneous fields cannot
/// be attached (toy carries no f, g, h, C; generalized no h, C).
class SystemSpec {
public:
    static SystemSpec toy(shapefn::ShapeExpr w) {
        SystemSpec s;
        s.cls_ = SystemClass::toy;
        s.w_ = std::move(w);
        return s;
    }
    static SystemSpec generalized(shapefn::ShapeExpr f, shapefn::ShapeExpr g,
                                  shapefn::ShapeExpr w) {
        SystemSpec s;
        s.cls_ = SystemClass::generalized;
        s.f_ = std::move(f);
        s.g_ = std::move(g);
        s.w_ = std::move(w);
        return s;
    }
    static SystemSpec kepler_ermakov(shapefn::ShapeExpr f, shapefn::ShapeExpr g,
                                     shapefn::ShapeExpr h, double C,
                                     shapefn::ShapeExpr w) {
        SystemSpec s;
        s.cls_ = SystemClass::kepler_ermakov;
        s.f_ = std::move(f);
        s.g_ = std::move(g);
        s.h_ = std::move(h);
        s.C_ = C;
        s.w_ = std::move(w);
        return s;
    }

    SystemClass cls() const { return cls_; }
    const shapefn::ShapeExpr& f() const { return *f_; }
    const shapefn::ShapeExpr& g() const { return *g_; }
    const shapefn::ShapeExpr& h() const { return *h_; }
    double C() const { return C_; }
    const shapefn::ShapeExpr& w() const { return w_; }

    bool has_fg() const { return f_.has_value(); }
    bool has_h() const { return h_.has_value(); }

    /// True when w parses to the literal constant zero (reduction precondition).
    bool w_is_zero() const {
        auto v = w_.constant_value();
        return v.has_value() && *v == 0.0;
    }

private:
    SystemSpec() = default;
    SystemClass cls_ = SystemClass::toy;
    std::optional<shapefn::ShapeExpr> f_, g_, h_;
    double C_ = 0.0;
    shapefn::ShapeExpr w_;
};

struct CartState {
    double t = 0.0;
    double x = 0.0, y = 0.0;
    double vx = 0.0, vy = 0.0;
};

struct PolarState {
    double t = 0.0;
    double r = 0.0;      // > 0
    double theta = 0.0;
    double vr = 0.0;     // dr/dt
    double omega = 0.0;  // dtheta/dt
};

enum class RhsStatus { ok, singular, shape_domain };

struct CartAccel {
    double ax = 0.0, ay = 0.0;
    RhsStatus status = RhsStatus::ok;
    bool ok() const { return status == RhsStatus::ok; }
};

/// Radial/transversal force profile: rdd - r*w_ang^2 = radial,
/// r*thdd + 2*vr*w_ang = transversal.
struct PolarForce {
    double radial = 0.0, transversal = 0.0;
    RhsStatus status = RhsStatus::ok;
    bool ok() const { return status == RhsStatus::ok; }
};

struct PolarAccel {
    double rdd = 0.0, thdd = 0.0;
    RhsStatus status = RhsStatus::ok;
    bool ok() const { return status == RhsStatus::ok; }
};

/// Cartesian accelerations of the configured class, restoring term included.
inline CartAccel cart_rhs(const SystemSpec& spec, const CartState& s) {
    CartAccel out;
    if (s.x == 0.0 || s.y == 0.0) {
        out.status = RhsStatus::singular;
        return out;
    }
    shapefn::EvalResult wv = spec.w().eval(s.t);
    if (!wv.ok()) { out.status = RhsStatus::shape_domain; return out; }
    const double w2 = wv.value * wv.value;
    double fx = 0.0, fy = 0.0;

    switch (spec.cls()) {
        case SystemClass::toy:
            fx = 1.0 / (s.x * s.x * s.x);
            fy = 1.0 / (s.y * s.y * s.y);
            break;
        case SystemClass::generalized: {
            const double sv = s.y / s.x;
            shapefn::EvalResult f = spec.f().eval(sv), g = spec.g().eval(sv);
            if (!f.ok() || !g.ok()) { out.status = RhsStatus::shape_domain; return out; }
            fx = f.value / (s.y * s.x * s.x);
            fy = g.value / (s.x * s.y * s.y);
            break;
        }
        case SystemClass::kepler_ermakov: {
            const double sv = s.y / s.x;
            shapefn::EvalResult f = spec.f().eval(sv), g = spec.g().eval(sv);
            shapefn::EvalResult hres = spec.h().eval(s.x / s.y);  // cot th = x/y
            if (!f.ok() || !g.ok() || !hres.ok()) {
                out.status = RhsStatus::shape_domain;
                return out;
            }
            const double r2 = s.x * s.x + s.y * s.y;
            const double r = std::sqrt(r2), r3 = r2 * r;
            // H = (C/4) r^3 - h(cot th)/(r cos th), and r cos th = x
            const double H = 0.25 * spec.C() * r3 - hres.value / s.x;
            fx = -(s.x / r3) * H + f.value / (s.x * s.x * s.x);
            fy = -(s.y / r3) * H + g.value / (s.y * s.y * s.y);
            break;
        }
    }
    out.ax = -w2 * s.x + fx;
    out.ay = -w2 * s.y + fy;
    if (!std::isfinite(out.ax) || !std::isfinite(out.ay))
        out.status = RhsStatus::singular;
    return out;
}

inline PolarState to_polar(const CartState& s) {
    const double r2 = s.x * s.x + s.y * s.y;
    if (r2 == 0.0) throw std::domain_error("to_polar: state at the origin");
    PolarState p;
    p.t = s.t;
    p.r = std::sqrt(r2);
    p.theta = std::atan2(s.y, s.x);
    p.vr = (s.x * s.vx + s.y * s.vy) / p.r;
    p.omega = (s.x * s.vy - s.y * s.vx) / r2;
    return p;
}

inline CartState from_polar(const PolarState& p) {
    CartState s;
    s.t = p.t;
    const double c = std::cos(p.theta), sn = std::sin(p.theta);
    s.x = p.r * c;
    s.y = p.r * sn;
    s.vx = p.vr * c - p.r * p.omega * sn;
    s.vy = p.vr * sn + p.r * p.omega * c;
    return s;
}

/// Angular momentum L = x vy - y vx = r^2 omega.
inline double angular_momentum(const CartState& s) {
    return s.x * s.vy - s.y * s.vx;
}

/// Exact polar force profile obtained by rotating cart_rhs:
/// radial = ax cos + ay sin + r w_ang^2 - ... expressed as
/// rdd - r omega^2 = radial(t, r, theta). This is the ground-truth oracle,
/// valid for any w(t), C and h.
inline PolarForce polar_force_derived(const SystemSpec& spec, double t, double r,
                                      double theta) {
    CartState s;
    s.t = t;
    s.x = r * std::cos(theta);
    s.y = r * std::sin(theta);
    CartAccel a = cart_rhs(spec, s);
    PolarForce out;
    out.status = a.status;
    if (!a.ok()) return out;
    out.radial = a.ax * std::cos(theta) + a.ay * std::sin(theta);
    out.transversal = a.ay * std::cos(theta) - a.ax * std::sin(theta);
    return out;
}

/// The printed polar force profile kept verbatim as a comparison target:
/// no frequency term and no C r term in any class, and the toy transversal
/// uses the printed prime scope -(1/(2 r^3)) d/dtheta (tan - cot).
inline PolarForce polar_force_paper(const SystemSpec& spec, double r, double theta) {
    PolarForce out;
    const double r3 = r * r * r;
    const double c = std::cos(theta), sn = std::sin(theta);
    if (c == 0.0 || sn == 0.0) { out.status = RhsStatus::singular; return out; }
    const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
    const double tn = sn / c, ct = c / sn;

    switch (spec.cls()) {
        case SystemClass::toy: {
            const double tpc = tn + ct;
            out.radial = tpc * tpc / r3;
            out.transversal = -0.5 * (sec2 + csc2) / r3;  // (tan - cot)' as printed
            break;
        }
        case SystemClass::generalized:
        case SystemClass::kepler_ermakov: {
            shapefn::EvalResult f = spec.f().eval(tn), g = spec.g().eval(tn);
            if (!f.ok() || !g.ok()) { out.status = RhsStatus::shape_domain; return out; }
            out.radial = (sec2 * f.value + csc2 * g.value) / r3;
            if (spec.cls() == SystemClass::kepler_ermakov) {
                shapefn::EvalResult h = spec.h().eval(ct);
                if (!h.ok()) { out.status = RhsStatus::shape_domain; return out; }
                out.radial += h.value / (r3 * c);
            }
            out.transversal = -(sec2 * tn * f.value - csc2 * ct * g.value) / r3;
            break;
        }
    }
    if (!std::isfinite(out.radial) || !std::isfinite(out.transversal))
        out.status = RhsStatus::singular;
    return out;
}

/// The consistent reading of the toy transversal, -(1/(2 r^3)) d/dtheta
/// of (tan - cot)^2: the rotation oracle identifies this variant, not the
/// printed first power, as the transversal force of the toy class.
inline double toy_transversal_squared_variant(double r, double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
    const double tn = sn / c, ct = c / sn;
    // d/dth (tan - cot)^2 = 2 (tan - cot)(sec^2 + csc^2)
    return -0.5 * 2.0 * (tn - ct) * (sec2 + csc2) / (r * r * r);
}

inline PolarAccel polar_rhs_from_force(const PolarForce& F, const PolarState& p) {
    PolarAccel out;
    out.status = F.status;
    if (!F.ok()) return out;
    out.rdd = p.r * p.omega * p.omega + F.radial;
    out.thdd = (F.transversal - 2.0 * p.vr * p.omega) / p.r;
    return out;
}

/// Exact polar accelerations (rotation of cart_rhs).
inline PolarAccel polar_rhs_derived(const SystemSpec& spec, const PolarState& p) {
    return polar_rhs_from_force(polar_force_derived(spec, p.t, p.r, p.theta), p);
}

/// Polar accelerations with the printed force profile.
inline PolarAccel polar_rhs_paper(const SystemSpec& spec, const PolarState& p) {
    return polar_rhs_from_force(polar_force_paper(spec, p.r, p.theta), p);
}

/// Printed and derived polar accelerations side by side with their residual,
/// the per-point diagnostic behind the paper-form residual reports.
struct PolarCompare {
    PolarAccel paper;
    PolarAccel derived;
    double residual_rdd = 0.0;
    double residual_thdd = 0.0;
    bool ok() const { return paper.ok() && derived.ok(); }
};

inline PolarCompare polar_rhs_compare(const SystemSpec& spec, const PolarState& p) {
    PolarCompare out;
    out.paper = polar_rhs_paper(spec, p);
    out.derived = polar_rhs_derived(spec, p);
    if (out.ok()) {
        out.residual_rdd = out.paper.rdd - out.derived.rdd;
        out.residual_thdd = out.paper.thdd - out.derived.thdd;
    }
    return out;
}

/// Angle-only potential Phi(s), s = y/x, entering the Ermakov-Lewis
/// invariant I = (1/2)[L^2 + Phi(s)]. Reference point s0 = 1 (theta = pi/4);
/// the +2 offset for the kepler_ermakov class makes its f = g = 1 special
/// case coincide with the toy form s^2 + 1/s^2.
inline double invariant_potential(const SystemSpec& spec, double s,
                                  double quad_tol = 1e-12) {
    if (s == 0.0 || !std::isfinite(s))
        throw NumericalError("invariant_potential: singular shape argument");
    switch (spec.cls()) {
        case SystemClass::toy:
            return s * s + 1.0 / (s * s);
        case SystemClass::kepler_ermakov: {
            auto integrand = [&spec](double sigma) {
                shapefn::EvalResult f = spec.f().eval(sigma), g = spec.g().eval(sigma);
                if (!f.ok() || !g.ok())
                    return std::numeric_limits<double>::quiet_NaN();
                return sigma * f.value - g.value / (sigma * sigma * sigma);
            };
            return 2.0 * quad::integrate_or_throw(integrand, 1.0, s, quad_tol) + 2.0;
        }
        case SystemClass::generalized: {
            auto integrand = [&spec](double sigma) {
                shapefn::EvalResult f = spec.f().eval(sigma), g = spec.g().eval(sigma);
                if (!f.ok() || !g.ok())
                    return std::numeric_limits<double>::quiet_NaN();
                return f.value - g.value / (sigma * sigma);
            };
            return 2.0 * quad::integrate_or_throw(integrand, 1.0, s, quad_tol);
        }
    }
    throw NumericalError("invariant_potential: unknown class");
}

/// Ermakov-Lewis invariant I = (1/2)[L^2 + Phi(y/x)]; conserved along
/// trajectories of every class for any frequency w(t) and any C.
inline double ermakov_invariant(const SystemSpec& spec, const CartState& s) {
    if (s.x == 0.0 || s.y == 0.0)
        throw NumericalError("ermakov_invariant: state on a coordinate axis");
    const double L = angular_momentum(s);
    const double phi = invariant_potential(spec, s.y / s.x);
    return 0.5 * (L * L + phi);
}

}  // namespace ermakov::systems
