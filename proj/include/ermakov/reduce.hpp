// Angular-momentum law L^2 = L0 + alpha(theta), the u = 1/r reduction,
// the printed reduced forms kept as comparison targets, the rigorously
// derived full reduced equation, and the consistency audit of the imposed
// angular-momentum conditions.
//
// Derived full reduced equation (w = 0, C = 0):
//   u'' + [alpha'(theta)/(2 L^2)] u' + [1 + F(theta)/L^2] u = 0
// where F is the radial forcing profile from the rotation oracle and
// L^2(theta) = L0 + alpha(theta). The damping term comes from the -Ldot u'
// contribution that the printed kinematic substitution drops.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/integrate.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/systems.hpp"

namespace ermakov::reduce {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
// the alpha contract asks for 1e-10; the tighter request costs a handful of
// panels on these smooth integrands and keeps differentiated uses accurate
inline constexpr double kAlphaQuadTol = 1e-13;

/// dL^2/dtheta as a function of theta alone, by the rotation oracle:
/// kepler_ermakov:  2 [cot csc^2 g(tan) - tan sec^2 f(tan)]
/// generalized:     2 [csc^2 g(tan) - sec^2 f(tan)]   (derived, not the copied form)
/// toy:          -(d/dtheta)(tan^2 + cot^2)
inline double angular_integrand(const systems::SystemSpec& spec, double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    if (c == 0.0 || sn == 0.0)
        throw NumericalError("angular_integrand: trig singularity");
    const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
    const double tn = sn / c, ct = c / sn;
    switch (spec.cls()) {
        case systems::SystemClass::toy:
            return 2.0 * (ct * csc2 - tn * sec2);
        case systems::SystemClass::kepler_ermakov: {
            double f = spec.f().eval_or_throw(tn), g = spec.g().eval_or_throw(tn);
            return 2.0 * (ct * csc2 * g - tn * sec2 * f);
        }
        case systems::SystemClass::generalized: {
            double f = spec.f().eval_or_throw(tn), g = spec.g().eval_or_throw(tn);
            return 2.0 * (csc2 * g - sec2 * f);
        }
    }
    throw NumericalError("angular_integrand: unknown class");
}

/// Radial forcing profile F(theta): the derived radial force is u^3 F with
/// w = 0 and C = 0 (rotation oracle).
inline double radial_force_profile(const systems::SystemSpec& spec, double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    if (c == 0.0 || sn == 0.0)
        throw NumericalError("radial_force_profile: trig singularity");
    const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
    const double tn = sn / c, ct = c / sn;
    switch (spec.cls()) {
        case systems::SystemClass::toy: {
            const double tpc = tn + ct;
            return tpc * tpc;
        }
        case systems::SystemClass::kepler_ermakov: {
            double f = spec.f().eval_or_throw(tn), g = spec.g().eval_or_throw(tn);
            double h = spec.h().eval_or_throw(ct);
            return sec2 * f + csc2 * g + h / c;
        }
        case systems::SystemClass::generalized: {
            double f = spec.f().eval_or_throw(tn), g = spec.g().eval_or_throw(tn);
            return (f + g) / (sn * c);
        }
    }
    throw NumericalError("radial_force_profile: unknown class");
}

/// Reference value L0 = L^2(theta_ref) and alpha(theta) by quadrature of the
/// class integrand, normalized so alpha(theta_ref) = 0 exactly.
struct AngularLaw {
    systems::SystemSpec spec;
    double theta_ref = kPi / 4.0;
    double L0_sq = 0.0;

    double integrand(double theta) const { return angular_integrand(spec, theta); }

    double alpha(double theta) const {
        if (theta == theta_ref) return 0.0;
        return quad::integrate_or_throw(
            [this](double th) { return angular_integrand(spec, th); }, theta_ref,
            theta, kAlphaQuadTol);
    }

    double L_sq(double theta) const { return L0_sq + alpha(theta); }
};

/// Anchor the law on a resampled trajectory: L0_sq is the measured L^2 at the
/// grid node nearest theta_ref, transported back to theta_ref through alpha.
inline AngularLaw make_angular_law(const systems::SystemSpec& spec,
                                   const integrate::ReducedTrajectory& rt,
                                   double theta_ref = kPi / 4.0) {
    if (rt.size() == 0) throw std::invalid_argument("make_angular_law: empty grid");
    AngularLaw law{spec, theta_ref, 0.0};
    size_t anchor = 0;
    for (size_t i = 1; i < rt.size(); ++i)
        if (std::abs(rt.theta[i] - theta_ref) < std::abs(rt.theta[anchor] - theta_ref))
            anchor = i;
    law.L0_sq = rt.L2[anchor] - law.alpha(rt.theta[anchor]);
    return law;
}

struct LawResidual {
    double max_abs = 0.0;
    double rms = 0.0;
};

/// Max and RMS of |L^2(theta) - L0 - alpha(theta)| over the grid.
inline LawResidual check_angular_law(const AngularLaw& law,
                                     const integrate::ReducedTrajectory& rt) {
    LawResidual out;
    double sum2 = 0.0;
    for (size_t i = 0; i < rt.size(); ++i) {
        double res = std::abs(rt.L2[i] - law.L0_sq - law.alpha(rt.theta[i]));
        out.max_abs = std::max(out.max_abs, res);
        sum2 += res * res;
    }
    out.rms = rt.size() ? std::sqrt(sum2 / rt.size()) : 0.0;
    return out;
}

enum class ReducedForm { derived_full, paper_2_4, paper_2_6_or_2_9, paper_2_13 };

inline const char* to_string(ReducedForm f) {
    switch (f) {
        case ReducedForm::derived_full: return "derived_full";
        case ReducedForm::paper_2_4: return "paper_2_4";
        case ReducedForm::paper_2_6_or_2_9: return "paper_2_6_or_2_9";
        case ReducedForm::paper_2_13: return "paper_2_13";
    }
    return "?";
}

struct ReducedCoeffs {
    double damping = 0.0;
    double stiffness = 0.0;
};

/// Coefficients of u'' + damping u' + stiffness u = 0 for the chosen form.
/// Requires w identically zero and C = 0 (a nonzero frequency injects
/// explicit time dependence and C r^3/4 injects a u^-3 term, either of which
/// destroys the linear autonomous form).
inline ReducedCoeffs reduced_coeffs(const systems::SystemSpec& spec,
                                    const AngularLaw& law, ReducedForm form,
                                    double theta) {
    if (!spec.w_is_zero())
        throw PreconditionError("reduction requires w identically zero");
    if (spec.cls() == systems::SystemClass::kepler_ermakov && spec.C() != 0.0)
        throw PreconditionError("reduction requires C = 0");

    switch (form) {
        case ReducedForm::paper_2_6_or_2_9:
        case ReducedForm::paper_2_13:
            return {0.0, 2.0};
        case ReducedForm::paper_2_4: {
            const double L2 = law.L_sq(theta);
            if (!(L2 > 0.0))
                throw NumericalError("reduced_coeffs: L^2 <= 0, reduction invalid");
            const double c = std::cos(theta), sn = std::sin(theta);
            const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
            const double tn = sn / c, ct = c / sn;
            double f = 0.0, g = 0.0, h = 0.0;
            if (spec.has_fg()) {
                f = spec.f().eval_or_throw(tn);
                g = spec.g().eval_or_throw(tn);
            } else {
                f = g = 1.0;  // toy instantiation of the printed form
            }
            if (spec.has_h()) h = spec.h().eval_or_throw(ct);
            // printed: omega^2 = 1 + cosec th * h(cot th) + {sec^2 f + csc^2 g}/L^2
            return {0.0, 1.0 + h / sn + (sec2 * f + csc2 * g) / L2};
        }
        case ReducedForm::derived_full: {
            const double L2 = law.L_sq(theta);
            if (!(L2 > 0.0))
                throw NumericalError("reduced_coeffs: L^2 <= 0, reduction invalid");
            const double damping = law.integrand(theta) / (2.0 * L2);
            const double stiffness = 1.0 + radial_force_profile(spec, theta) / L2;
            return {damping, stiffness};
        }
    }
    throw NumericalError("reduced_coeffs: unknown form");
}

struct ResidualSeries {
    ReducedForm form = ReducedForm::derived_full;
    std::vector<double> theta;
    std::vector<double> e;  // u'' + damping u' + stiffness u, pointwise
    double max_abs = 0.0;
    double rms = 0.0;
};

/// Pointwise residual of the chosen reduced form over the grid. The
/// derived_full residual is an identity and must vanish to integration
/// accuracy; the printed forms generally do not.
inline ResidualSeries reduced_residual(const systems::SystemSpec& spec,
                                       const AngularLaw& law,
                                       const integrate::ReducedTrajectory& rt,
                                       ReducedForm form) {
    ResidualSeries out;
    out.form = form;
    out.theta = rt.theta;
    out.e.resize(rt.size());
    double sum2 = 0.0;
    for (size_t i = 0; i < rt.size(); ++i) {
        ReducedCoeffs c = reduced_coeffs(spec, law, form, rt.theta[i]);
        double e = rt.u_thth[i] + c.damping * rt.u_th[i] + c.stiffness * rt.u[i];
        out.e[i] = e;
        out.max_abs = std::max(out.max_abs, std::abs(e));
        sum2 += e * e;
    }
    out.rms = rt.size() ? std::sqrt(sum2 / rt.size()) : 0.0;
    return out;
}

enum class ConditionId { eq_2_5, toy_L };

inline const char* to_string(ConditionId c) {
    return c == ConditionId::eq_2_5 ? "eq_2_5" : "toy_L";
}

/// d/dtheta of the imposed L^2 profile. Both printed conditions pin
/// L = tan + cot (eq 2.5 via L^-1 = sin cos), so the profile is
/// (tan + cot)^2 in either case.
inline double imposed_L2_derivative(ConditionId, double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    if (c == 0.0 || sn == 0.0)
        throw NumericalError("imposed_L2_derivative: trig singularity");
    const double sec2 = 1.0 / (c * c), csc2 = 1.0 / (sn * sn);
    const double tn = sn / c, ct = c / sn;
    return 2.0 * (tn + ct) * (sec2 - csc2);
}

/// Defect of an imposed condition against the dynamics: the theta-derivative
/// of the imposed L^2 minus the dL^2/dtheta the transversal equation forces.
/// Zero defect at every angle means the imposition is dynamically consistent.
inline double condition_defect(const systems::SystemSpec& spec, ConditionId cond,
                               double theta) {
    return imposed_L2_derivative(cond, theta) - angular_integrand(spec, theta);
}

struct DefectSample {
    double theta = 0.0;
    double defect = 0.0;
};

inline std::vector<DefectSample> condition_audit(const systems::SystemSpec& spec,
                                                 ConditionId cond,
                                                 std::span<const double> thetas) {
    std::vector<DefectSample> out;
    out.reserve(thetas.size());
    for (double th : thetas) out.push_back({th, condition_defect(spec, cond, th)});
    return out;
}

}  // namespace ermakov::reduce
