// Embedded Dormand-Prince 5(4) pair with FSAL, PI step control and a
// fourth-order continuous extension, after Hairer-Norsett-Wanner's DOPRI5.
//
// The integrator is generic over the state dimension and right-hand side.
// A right-hand side may refuse an evaluation (domain failure); the step is
// then rejected and retried with a halved step until underflow.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace ermakov::rk {

enum class IntegrateStatus {
    completed,       // reached t_end
    event_stop,      // stop predicate fired at an accepted node
    step_underflow,  // step size shrank below machine resolution
    max_steps,       // step budget exhausted
};

inline const char* to_string(IntegrateStatus s) {
    switch (s) {
        case IntegrateStatus::completed: return "completed";
        case IntegrateStatus::event_stop: return "event_stop";
        case IntegrateStatus::step_underflow: return "step_underflow";
        case IntegrateStatus::max_steps: return "max_steps";
    }
    return "?";
}

struct IntegrateStats {
    long steps = 0;
    long accepted = 0;
    long rejected = 0;
    double min_step = std::numeric_limits<double>::infinity();
};

template <size_t N>
using StateVec = std::array<double, N>;

/// One accepted step's dense-output coefficients.
template <size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<StateVec<N>, 5> rcont{};

    StateVec<N> eval(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        StateVec<N> y;
        for (size_t i = 0; i < N; ++i) {
            y[i] = rcont[0][i] +
                   s * (rcont[1][i] +
                        s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
        }
        return y;
    }
};

/// Dense trajectory of a single integration run.
template <size_t N>
struct OdePath {
    std::vector<double> t;                  // accepted nodes, strictly monotone
    std::vector<StateVec<N>> y;             // states at nodes
    std::vector<StateVec<N>> dy;            // derivatives at nodes
    std::vector<DenseStep<N>> steps;        // steps.size() == t.size() - 1
    IntegrateStatus status = IntegrateStatus::completed;
    IntegrateStats stats;

    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }
    size_t size() const { return t.size(); }

    /// Dense-output state at tq (clamped to the covered span).
    StateVec<N> eval(double tq) const {
        if (tq <= t.front()) return y.front();
        if (tq >= t.back()) return y.back();
        size_t lo = 0, hi = steps.size() - 1;
        while (lo < hi) {
            size_t mid = lo + (hi - lo + 1) / 2;
            if (steps[mid].t0 <= tq) lo = mid;
            else hi = mid - 1;
        }
        return steps[lo].eval(tq);
    }
};

struct RkOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 = automatic
    long max_steps = 20000000;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 0.2;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                        a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
// embedded error coefficients (b5 - b4)
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output coefficients
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace detail

/// Integrate dy/dt = rhs(t, y) from t0 to t1 (t1 > t0).
///
/// Rhs signature: bool rhs(double t, const StateVec<N>& y, StateVec<N>& dydt);
/// returning false flags a domain failure (step rejected, halved).
/// Stop signature: bool stop(double t, const StateVec<N>& y); checked at
/// accepted nodes, true terminates with event_stop.
template <size_t N, typename Rhs, typename Stop>
OdePath<N> integrate(Rhs&& rhs, const StateVec<N>& y0, double t0, double t1,
                     const RkOptions& opts, Stop&& stop) {
    using namespace detail;
    OdePath<N> path;
    const double safe = 0.9, beta = 0.04, fac1 = 0.2, fac2 = 10.0;
    const double expo1 = 0.2 - beta * 0.75;
    const double uround = std::numeric_limits<double>::epsilon();

    StateVec<N> y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = t0;
    if (!rhs(t, y, k1)) {
        path.status = IntegrateStatus::step_underflow;  // cannot even start
        return path;
    }
    path.t.push_back(t);
    path.y.push_back(y);
    path.dy.push_back(k1);
    if (stop(t, y)) {
        path.status = IntegrateStatus::event_stop;
        return path;
    }

    auto sknorm = [&](const StateVec<N>& err, const StateVec<N>& ya,
                      const StateVec<N>& yb) {
        double sum = 0.0;
        for (size_t i = 0; i < N; ++i) {
            double sk = opts.atol + opts.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            double q = err[i] / sk;
            sum += q * q;
        }
        return std::sqrt(sum / N);
    };

    // initial step size (Hairer's hinit)
    double h = opts.initial_step;
    if (h <= 0.0) {
        double dnf = 0.0, dny = 0.0;
        for (size_t i = 0; i < N; ++i) {
            double sk = opts.atol + opts.rtol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, t1 - t0);
        for (size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * k1[i];
        if (rhs(t + h, ytmp, k2)) {
            double der2 = 0.0;
            for (size_t i = 0; i < N; ++i) {
                double sk = opts.atol + opts.rtol * std::abs(y[i]);
                double q = (k2[i] - k1[i]) / sk;
                der2 += q * q;
            }
            der2 = std::sqrt(der2) / h;
            double der12 = std::max(std::abs(der2), std::sqrt(dnf));
            double h1 = (der12 <= 1e-15)
                            ? std::max(1e-6, std::abs(h) * 1e-3)
                            : std::pow(0.01 / der12, 0.2);
            h = std::min({100.0 * h, h1, t1 - t0});
        }
    }

    double facold = 1e-4;
    bool last = false, rejected = false;
    while (true) {
        if (path.stats.steps >= opts.max_steps) {
            path.status = IntegrateStatus::max_steps;
            return path;
        }
        if (0.1 * std::abs(h) <= std::abs(t) * uround) {
            path.status = IntegrateStatus::step_underflow;
            return path;
        }
        if (t + 1.01 * h - t1 > 0.0) {
            h = t1 - t;
            last = true;
        }
        ++path.stats.steps;

        bool eval_ok = true;
        auto stage = [&](StateVec<N>& k, double c, auto&&... terms) {
            for (size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (... + terms(i));
            eval_ok = eval_ok && rhs(t + c * h, ytmp, k);
        };
        stage(k2, c2, [&](size_t i) { return a21 * k1[i]; });
        if (eval_ok) stage(k3, c3, [&](size_t i) { return a31 * k1[i]; },
                           [&](size_t i) { return a32 * k2[i]; });
        if (eval_ok) stage(k4, c4, [&](size_t i) { return a41 * k1[i]; },
                           [&](size_t i) { return a42 * k2[i]; },
                           [&](size_t i) { return a43 * k3[i]; });
        if (eval_ok) stage(k5, c5, [&](size_t i) { return a51 * k1[i]; },
                           [&](size_t i) { return a52 * k2[i]; },
                           [&](size_t i) { return a53 * k3[i]; },
                           [&](size_t i) { return a54 * k4[i]; });
        if (eval_ok) stage(k6, 1.0, [&](size_t i) { return a61 * k1[i]; },
                           [&](size_t i) { return a62 * k2[i]; },
                           [&](size_t i) { return a63 * k3[i]; },
                           [&](size_t i) { return a64 * k4[i]; },
                           [&](size_t i) { return a65 * k5[i]; });
        if (eval_ok) {
            for (size_t i = 0; i < N; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                      a75 * k5[i] + a76 * k6[i]);
            eval_ok = rhs(t + h, ynew, k7);
        }
        if (eval_ok) {
            for (size_t i = 0; i < N; ++i) {
                double v = ynew[i];
                if (!std::isfinite(v)) { eval_ok = false; break; }
            }
        }
        if (!eval_ok) {
            ++path.stats.rejected;
            last = false;
            rejected = true;
            h *= 0.5;
            continue;
        }

        StateVec<N> errv;
        for (size_t i = 0; i < N; ++i)
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * k7[i]);
        double err = sknorm(errv, y, ynew);
        if (!std::isfinite(err)) err = 2.0;

        double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // accept
            facold = std::max(err, 1e-4);
            path.stats.min_step = std::min(path.stats.min_step, std::abs(h));

            DenseStep<N> ds;
            ds.t0 = t;
            ds.h = h;
            for (size_t i = 0; i < N; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                ds.rcont[0][i] = y[i];
                ds.rcont[1][i] = ydiff;
                ds.rcont[2][i] = bspl;
                ds.rcont[3][i] = ydiff - h * k7[i] - bspl;
                ds.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                      d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            path.steps.push_back(ds);

            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++path.stats.accepted;
            path.t.push_back(t);
            path.y.push_back(y);
            path.dy.push_back(k1);

            if (stop(t, y)) {
                path.status = IntegrateStatus::event_stop;
                return path;
            }
            if (last) {
                path.status = IntegrateStatus::completed;
                return path;
            }
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
            double hnew = h / fac;
            if (rejected) hnew = std::min(std::abs(hnew), std::abs(h));
            h = hnew;
            rejected = false;
        } else {
            ++path.stats.rejected;
            h = h / std::min(1.0 / fac1, fac11 / safe);
            rejected = true;
            last = false;
        }
    }
}

template <size_t N, typename Rhs>
OdePath<N> integrate(Rhs&& rhs, const StateVec<N>& y0, double t0, double t1,
                     const RkOptions& opts) {
    return integrate<N>(std::forward<Rhs>(rhs), y0, t0, t1, opts,
                        [](double, const StateVec<N>&) { return false; });
}

}  // namespace ermakov::rk
