// Trajectory integration for the Ermakov classes and event-based resampling
// onto a uniform theta grid.
//
// The Cartesian state vector order is (x, y, vx, vy). A hard singularity
// guard stops integration when min(|x|, |y|) < 1e-8: the force laws blow up
// as x^-3, and the guard converts the blow-up into a reportable event.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/rk.hpp"
#include "ermakov/systems.hpp"

namespace ermakov::integrate {

inline constexpr double kSingularGuard = 1e-8;

/// Time-sampled Cartesian solution with dense output.
struct Trajectory {
    systems::SystemSpec spec;
    rk::OdePath<4> path;  // nodes, states, derivatives, dense steps, stats

    bool completed() const { return path.status == rk::IntegrateStatus::completed; }
    size_t size() const { return path.size(); }

    systems::CartState state_at_node(size_t i) const {
        return {path.t[i], path.y[i][0], path.y[i][1], path.y[i][2], path.y[i][3]};
    }
    /// Node accelerations come from the stored derivative vector, not a
    /// re-evaluation, so they match the integrator's view exactly.
    std::pair<double, double> accel_at_node(size_t i) const {
        return {path.dy[i][2], path.dy[i][3]};
    }
    systems::CartState state_at(double t) const {
        rk::StateVec<4> y = path.eval(t);
        return {t, y[0], y[1], y[2], y[3]};
    }
    double t_begin() const { return path.t_begin(); }
    double t_end() const { return path.t_end(); }

    explicit Trajectory(systems::SystemSpec s) : spec(std::move(s)) {}
};

/// Adaptive 5(4) integration of the Cartesian dynamics. Early termination
/// on the singularity guard is flagged in path.status, not thrown.
inline Trajectory integrate_cart(const systems::SystemSpec& spec,
                                 const systems::CartState& ic, double t_end,
                                 double rtol, double atol) {
    if (rtol <= 0.0 || atol <= 0.0)
        throw std::invalid_argument("integrate_cart: tolerances must be positive");
    if (!(t_end > ic.t))
        throw std::invalid_argument("integrate_cart: t_end must exceed ic.t");
    if (std::min(std::abs(ic.x), std::abs(ic.y)) < kSingularGuard)
        throw std::invalid_argument("integrate_cart: initial state is singular");

    auto rhs = [&spec](double t, const rk::StateVec<4>& y, rk::StateVec<4>& dy) {
        systems::CartState s{t, y[0], y[1], y[2], y[3]};
        systems::CartAccel a = systems::cart_rhs(spec, s);
        if (!a.ok()) return false;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = a.ax;
        dy[3] = a.ay;
        return true;
    };
    auto stop = [](double, const rk::StateVec<4>& y) {
        return std::min(std::abs(y[0]), std::abs(y[1])) < kSingularGuard;
    };
    rk::RkOptions opts;
    opts.rtol = rtol;
    opts.atol = atol;

    Trajectory traj(spec);
    traj.path = rk::integrate<4>(rhs, {ic.x, ic.y, ic.vx, ic.vy}, ic.t, t_end,
                                 opts, stop);
    return traj;
}

/// Polar-state integration (r, theta, vr, omega) driven by the derived polar
/// right-hand side; used by the cross-representation check.
inline rk::OdePath<4> integrate_polar(const systems::SystemSpec& spec,
                                      const systems::PolarState& ic, double t_end,
                                      double rtol, double atol) {
    auto rhs = [&spec](double t, const rk::StateVec<4>& y, rk::StateVec<4>& dy) {
        systems::PolarState p{t, y[0], y[1], y[2], y[3]};
        if (p.r <= kSingularGuard) return false;
        systems::PolarAccel a = systems::polar_rhs_derived(spec, p);
        if (!a.ok()) return false;
        dy[0] = p.vr;
        dy[1] = p.omega;
        dy[2] = a.rdd;
        dy[3] = a.thdd;
        return true;
    };
    rk::RkOptions opts;
    opts.rtol = rtol;
    opts.atol = atol;
    return rk::integrate<4>(rhs, {ic.r, ic.theta, ic.vr, ic.omega}, ic.t, t_end,
                            opts);
}

/// Reduced representation of a trajectory on a uniform theta grid.
/// u = 1/r, u_theta = -vr/L (exact kinematics), u_thetatheta from the exact
/// relation u'' = -(rdd + Ldot u')/(L^2 u^2) with Ldot = r * (transversal
/// acceleration); every column is pointwise, no finite differences.
struct ReducedTrajectory {
    std::vector<double> theta;    // uniform, strictly monotone (either sign)
    std::vector<double> t;        // crossing times, strictly monotone
    std::vector<double> r;
    std::vector<double> u;        // 1/r > 0
    std::vector<double> u_th;
    std::vector<double> u_thth;
    std::vector<double> L;        // angular momentum at nodes
    std::vector<double> L2;

    size_t size() const { return theta.size(); }
    double grid_step() const { return theta.size() > 1 ? theta[1] - theta[0] : 0.0; }
};

namespace detail {

/// Continuous angle along the path nodes (unwrapped atan2 branch).
inline std::vector<double> unwrap_theta(const rk::OdePath<4>& path) {
    std::vector<double> th(path.size());
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (size_t i = 0; i < path.size(); ++i) {
        double raw = std::atan2(path.y[i][1], path.y[i][0]);
        th[i] = (i == 0) ? raw : th[i - 1] + std::remainder(raw - th[i - 1], two_pi);
    }
    return th;
}

}  // namespace detail

/// Resample a trajectory at n uniform angles between its endpoint angles.
/// Throws NumericalError if theta is not strictly monotone along the path
/// (turning point) or if root finding / the right-hand side fails.
inline ReducedTrajectory resample_by_theta(const Trajectory& traj, int n) {
    if (n < 8) throw std::invalid_argument("resample_by_theta: n must be >= 8");
    const rk::OdePath<4>& path = traj.path;
    if (path.size() < 2)
        throw NumericalError("resample_by_theta: trajectory has no steps");

    // theta-dot must keep one sign along the whole span
    for (size_t i = 0; i < path.size(); ++i) {
        const auto& y = path.y[i];
        double omega = (y[0] * y[3] - y[1] * y[2]) / (y[0] * y[0] + y[1] * y[1]);
        if (!(std::abs(omega) > 0.0))
            throw NumericalError("resample_by_theta: turning point (theta-dot = 0)");
        if (i > 0) {
            const auto& y0 = path.y[0];
            double omega0 = (y0[0] * y0[3] - y0[1] * y0[2]) /
                            (y0[0] * y0[0] + y0[1] * y0[1]);
            if (omega * omega0 <= 0.0)
                throw NumericalError(
                    "resample_by_theta: turning point (theta-dot changes sign)");
        }
    }

    std::vector<double> node_theta = detail::unwrap_theta(path);
    const double th_lo = node_theta.front(), th_hi = node_theta.back();

    auto theta_of = [&](double t, double branch_ref) {
        rk::StateVec<4> y = path.eval(t);
        double raw = std::atan2(y[1], y[0]);
        constexpr double two_pi = 6.283185307179586476925286766559;
        return branch_ref + std::remainder(raw - branch_ref, two_pi);
    };

    ReducedTrajectory rt;
    rt.theta.resize(n);
    size_t seg = 0;  // current bracketing node interval
    const bool increasing = th_hi > th_lo;
    for (int j = 0; j < n; ++j) {
        double target = th_lo + (th_hi - th_lo) * j / (n - 1);
        rt.theta[j] = target;

        double t_found;
        if (j == 0) {
            t_found = path.t.front();
        } else if (j == n - 1) {
            t_found = path.t.back();
        } else {
            while (seg + 2 < path.size() &&
                   (increasing ? node_theta[seg + 1] < target
                               : node_theta[seg + 1] > target))
                ++seg;
            double ta = path.t[seg], tb = path.t[seg + 1];
            double branch = node_theta[seg];
            // bisection on the dense output, tolerance 1e-12 in theta
            for (int it = 0; it < 200; ++it) {
                double tm = 0.5 * (ta + tb);
                double thm = theta_of(tm, branch);
                if (std::abs(thm - target) < 1e-12 || tb - ta < 4e-16 * (1.0 + std::abs(tm))) {
                    ta = tb = tm;
                    break;
                }
                if ((thm < target) == increasing) ta = tm;
                else tb = tm;
            }
            t_found = 0.5 * (ta + tb);
            if (std::abs(theta_of(t_found, branch) - target) > 1e-10)
                throw NumericalError("resample_by_theta: root finder failed");
        }

        rk::StateVec<4> y = path.eval(t_found);
        systems::CartState s{t_found, y[0], y[1], y[2], y[3]};
        systems::CartAccel a = systems::cart_rhs(traj.spec, s);
        if (!a.ok())
            throw NumericalError("resample_by_theta: right-hand side failed at node");

        const double r2 = s.x * s.x + s.y * s.y;
        const double r = std::sqrt(r2);
        const double L = systems::angular_momentum(s);
        const double vr = (s.x * s.vx + s.y * s.vy) / r;
        const double v2 = s.vx * s.vx + s.vy * s.vy;
        const double rdd = (v2 - vr * vr + s.x * a.ax + s.y * a.ay) / r;
        const double a_trans = (s.x * a.ay - s.y * a.ax) / r;
        const double Ldot = r * a_trans;
        const double u = 1.0 / r;
        const double u_th = -vr / L;
        const double u_thth = -(rdd + Ldot * u_th) / (L * L * u * u);

        rt.t.push_back(t_found);
        rt.r.push_back(r);
        rt.u.push_back(u);
        rt.u_th.push_back(u_th);
        rt.u_thth.push_back(u_thth);
        rt.L.push_back(L);
        rt.L2.push_back(L * L);
    }
    return rt;
}

}  // namespace ermakov::integrate
