#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ermakov/quadrature.hpp"
#include "ermakov/rk.hpp"

using namespace ermakov;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TEST_CASE("quadrature: elementary integrals") {
    auto r1 = quad::integrate([](double x) { return std::sin(x); }, 0.0, kPi, 1e-12);
    CHECK(r1.ok());
    CHECK(r1.value == doctest::Approx(2.0).epsilon(1e-13));

    auto r2 = quad::integrate([](double x) { return 1.0 / x; }, 1.0, 2.0, 1e-12);
    CHECK(r2.ok());
    CHECK(r2.value == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("quadrature: fundamental theorem with a signed range") {
    // -(d/dth)(tan^2 + cot^2) integrated from pi/4 down to pi/6
    auto integrand = [](double th) {
        double t = std::tan(th), c = 1.0 / std::tan(th);
        double sec2 = 1.0 + t * t, csc2 = 1.0 + c * c;
        return -(2.0 * t * sec2 - 2.0 * c * csc2);
    };
    auto r = quad::integrate(integrand, kPi / 4.0, kPi / 6.0, 1e-12);
    CHECK(r.ok());
    // [-(tan^2+cot^2)] from pi/4 to pi/6 = 2 - 10/3 = -4/3
    CHECK(r.value == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("quadrature: failures are reported, not silent") {
    auto pole = quad::integrate(
        [](double x) {
            return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        },
        0.0, 1.0, 1e-10);
    CHECK(pole.status == quad::QuadStatus::pole_detected);

    auto diverging = quad::integrate([](double x) { return 1.0 / (x * x); },
                                     -1.0, 1.0, 1e-10);
    CHECK(!diverging.ok());

    // a pole strictly inside the range that no node ever lands on exactly:
    // reported as either non-convergence or an overflowing evaluation
    auto offset_pole = quad::integrate([](double x) { return 1.0 / (x * x); },
                                       -1.0, 3.0, 1e-10);
    CHECK(!offset_pole.ok());

    // steep but integrable: must converge, not trip the divergence guard
    auto steep = quad::integrate([](double x) { return 1.0 / (x * x); },
                                 1e-6, 1.0, 1e-8);
    CHECK(steep.ok());
    CHECK(steep.value == doctest::Approx(1e6 - 1.0).epsilon(1e-10));

    CHECK_THROWS_AS(quad::integrate_or_throw([](double x) { return 1.0 / (x * x); },
                                             -1.0, 1.0, 1e-10),
                    NumericalError);
}

TEST_CASE("quadrature: empty and reversed ranges") {
    auto zero = quad::integrate([](double) { return 42.0; }, 1.0, 1.0, 1e-12);
    CHECK(zero.value == 0.0);
    auto fwd = quad::integrate([](double x) { return x; }, 0.0, 2.0, 1e-12);
    auto rev = quad::integrate([](double x) { return x; }, 2.0, 0.0, 1e-12);
    CHECK(fwd.value == doctest::Approx(-rev.value).epsilon(1e-15));
}

namespace {

bool oscillator_rhs(double, const rk::StateVec<2>& y, rk::StateVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
    return true;
}

// xdd = 1/x^3 with x(0) = 1, v(0) = 0 has the closed form x(t) = sqrt(1+t^2)
bool cubic_force_rhs(double, const rk::StateVec<2>& y, rk::StateVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = 1.0 / (y[0] * y[0] * y[0]);
    return true;
}

double closed_form_error(double rtol) {
    rk::RkOptions opts;
    opts.rtol = rtol;
    opts.atol = rtol * 1e-2;
    auto path = rk::integrate<2>(cubic_force_rhs, {1.0, 0.0}, 0.0, 10.0, opts);
    REQUIRE(path.status == rk::IntegrateStatus::completed);
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        double t = 10.0 * k / 1000.0;
        double x = path.eval(t)[0];
        worst = std::max(worst, std::abs(x - std::sqrt(1.0 + t * t)));
    }
    return worst;
}

}  // namespace

TEST_CASE("rk: harmonic oscillator against cos t") {
    rk::RkOptions opts;
    opts.rtol = 1e-12;
    opts.atol = 1e-14;
    auto path = rk::integrate<2>(oscillator_rhs, {1.0, 0.0}, 0.0, 10.0, opts);
    CHECK(path.status == rk::IntegrateStatus::completed);
    CHECK(path.y.back()[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-10));
    CHECK(path.y.back()[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-10));
}

TEST_CASE("rk: dense output reproduces accepted nodes exactly") {
    rk::RkOptions opts;
    opts.rtol = 1e-9;
    opts.atol = 1e-11;
    auto path = rk::integrate<2>(cubic_force_rhs, {1.0, 0.0}, 0.0, 5.0, opts);
    REQUIRE(path.size() > 3);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        auto st = path.steps[i].eval(path.t[i]);
        CHECK(st[0] == path.y[i][0]);
        CHECK(st[1] == path.y[i][1]);
        auto en = path.steps[i].eval(path.t[i + 1]);
        CHECK(en[0] == doctest::Approx(path.y[i + 1][0]).epsilon(1e-15));
        CHECK(en[1] == doctest::Approx(path.y[i + 1][1]).epsilon(1e-15));
    }
}

TEST_CASE("rk: closed-form accuracy and tolerance ladder") {
    // at rtol 1e-12 the dense-output error must sit below 1e-9
    double err12 = closed_form_error(1e-12);
    CHECK(err12 < 1e-9);

    // halving tolerance never increases the error; scaling is near-linear
    std::vector<double> tols = {1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
    std::vector<double> errs;
    for (double tol : tols) errs.push_back(closed_form_error(tol));
    for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] * 1.0001);
    CHECK(errs.front() / errs.back() > 1e3);  // observed order >= 4 on the ladder
}

TEST_CASE("rk: rhs domain failure triggers rejection, then underflow stop") {
    // force becomes undefined for x <= 0.5: the integrator must stop cleanly
    auto rhs = [](double, const rk::StateVec<2>& y, rk::StateVec<2>& dy) {
        if (y[0] <= 0.5) return false;
        dy[0] = y[1];
        dy[1] = -2.0;  // constant deceleration drives x down
        return true;
    };
    rk::RkOptions opts;
    opts.rtol = 1e-9;
    opts.atol = 1e-11;
    auto path = rk::integrate<2>(rhs, {1.0, 0.0}, 0.0, 10.0, opts);
    CHECK(path.status == rk::IntegrateStatus::step_underflow);
    CHECK(path.y.back()[0] > 0.49);
}

TEST_CASE("rk: stop predicate fires at an accepted node") {
    rk::RkOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    auto stop = [](double, const rk::StateVec<2>& y) { return y[0] > 3.0; };
    auto path = rk::integrate<2>(cubic_force_rhs, {1.0, 0.0}, 0.0, 10.0, opts, stop);
    CHECK(path.status == rk::IntegrateStatus::event_stop);
    CHECK(path.y.back()[0] > 3.0);
    CHECK(path.t.back() < 10.0);
}

TEST_CASE("rk: integration is deterministic") {
    rk::RkOptions opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-13;
    auto p1 = rk::integrate<2>(cubic_force_rhs, {1.0, 0.0}, 0.0, 7.0, opts);
    auto p2 = rk::integrate<2>(cubic_force_rhs, {1.0, 0.0}, 0.0, 7.0, opts);
    REQUIRE(p1.size() == p2.size());
    for (size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1.t[i] == p2.t[i]);
        CHECK(p1.y[i][0] == p2.y[i][0]);
    }
}
