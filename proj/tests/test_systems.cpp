#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "ermakov/integrate.hpp"
#include "ermakov/systems.hpp"

using namespace ermakov;
using systems::CartState;
using systems::SystemSpec;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

shapefn::ShapeExpr sx(const char* text) { return shapefn::ShapeExpr::parse(text); }

SystemSpec toy0() { return SystemSpec::toy(sx("0")); }

struct Lcg {
    uint64_t state = 0xabcdef1234567ull;
    double uniform(double lo, double hi) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return lo + (hi - lo) * ((state >> 11) * 0x1.0p-53);
    }
};

}  // namespace

TEST_CASE("cart_rhs: direct evaluation of each class") {
    // toy, w = 0, (x, y) = (1, 2)
    auto a = systems::cart_rhs(toy0(), {0, 1, 2, 0, 0});
    CHECK(a.ok());
    CHECK(a.ax == doctest::Approx(1.0));
    CHECK(a.ay == doctest::Approx(0.125));

    // generalized pure-oscillator limit
    auto spec_g = SystemSpec::generalized(sx("0"), sx("0"), sx("1"));
    auto b = systems::cart_rhs(spec_g, {0, 1, 1, 0.3, -0.2});
    CHECK(b.ok());
    CHECK(b.ax == doctest::Approx(-1.0));
    CHECK(b.ay == doctest::Approx(-1.0));

    // kepler_ermakov with C = 0, h = 0 collapses to 1/x^3, 1/y^3
    auto spec_k = SystemSpec::kepler_ermakov(sx("1"), sx("1"), sx("0"), 0.0, sx("0"));
    auto c = systems::cart_rhs(spec_k, {0, 1, 1, 0, 0});
    CHECK(c.ok());
    CHECK(c.ax == doctest::Approx(1.0));
    CHECK(c.ay == doctest::Approx(1.0));
}

TEST_CASE("cart_rhs: singular configurations are flagged") {
    CHECK(systems::cart_rhs(toy0(), {0, 0, 1, 0, 0}).status ==
          systems::RhsStatus::singular);
    CHECK(systems::cart_rhs(toy0(), {0, 1, 0, 0, 0}).status ==
          systems::RhsStatus::singular);
}

TEST_CASE("polar conversion: hand values and round trips") {
    auto p = systems::to_polar({0, 1, 1, 0, 0});
    CHECK(p.r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p.theta == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(p.vr == doctest::Approx(0.0));
    CHECK(p.omega == doctest::Approx(0.0));

    // chain-rule check: L = x vy - y vx = 25, omega = L / r^2 = 1
    auto q = systems::to_polar({0, 3, 4, -4, 3});
    CHECK(q.r == doctest::Approx(5.0));
    CHECK(q.theta == doctest::Approx(0.9272952180016122).epsilon(1e-12));
    CHECK(q.vr == doctest::Approx(0.0));
    CHECK(q.omega == doctest::Approx(1.0));

    CHECK_THROWS_AS(systems::to_polar({0, 0, 0, 1, 1}), std::domain_error);

    Lcg rng;
    for (int it = 0; it < 1000; ++it) {
        CartState s{0, rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3),
                    rng.uniform(-3, 3)};
        if (std::abs(s.x) < 1e-2 || std::abs(s.y) < 1e-2) continue;
        CartState back = systems::from_polar(systems::to_polar(s));
        double scale = std::abs(s.x) + std::abs(s.y) + std::abs(s.vx) + std::abs(s.vy);
        CHECK(std::abs(back.x - s.x) < 1e-14 * scale);
        CHECK(std::abs(back.y - s.y) < 1e-14 * scale);
        CHECK(std::abs(back.vx - s.vx) < 1e-14 * scale);
        CHECK(std::abs(back.vy - s.vy) < 1e-14 * scale);
    }
}

TEST_CASE("polar_rhs_derived: hand-rotated values") {
    // toy at theta = pi/4, r = sqrt(2): radial force = (1/r^3)(sec^2+csc^2)
    systems::PolarState p{0, std::sqrt(2.0), kPi / 4, 0.0, 0.0};
    auto F = systems::polar_force_derived(toy0(), 0.0, p.r, p.theta);
    CHECK(F.ok());
    CHECK(F.radial == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(F.transversal == doctest::Approx(0.0).epsilon(1e-14));

    // generalized f = g = 1 at theta = pi/6, r = 1: transversal = csc^2 - sec^2
    auto spec_g = SystemSpec::generalized(sx("1"), sx("1"), sx("0"));
    auto Fg = systems::polar_force_derived(spec_g, 0.0, 1.0, kPi / 6);
    CHECK(Fg.ok());
    CHECK(Fg.transversal == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("rotation identity: derived polar force is cart_rhs in disguise") {
    auto spec_k =
        SystemSpec::kepler_ermakov(sx("1 + s^2"), sx("2 - s"), sx("s"), 0.7,
                                   sx("sqrt(1 + 0.5*sin(t))"));
    auto spec_g = SystemSpec::generalized(sx("s"), sx("s^3"), sx("1"));
    Lcg rng;
    for (const auto& spec : {spec_k, spec_g, toy0()}) {
        for (int it = 0; it < 100; ++it) {
            double r = rng.uniform(0.5, 3.0);
            double th = rng.uniform(0.2, 1.35);
            double t = rng.uniform(0.0, 5.0);
            systems::PolarState p{t, r, th, rng.uniform(-1, 1), rng.uniform(-1, 1)};
            auto F = systems::polar_force_derived(spec, t, r, th);
            REQUIRE(F.ok());
            CartState c = systems::from_polar(p);
            auto a = systems::cart_rhs(spec, c);
            REQUIRE(a.ok());
            double radial = a.ax * std::cos(th) + a.ay * std::sin(th);
            double transv = a.ay * std::cos(th) - a.ax * std::sin(th);
            CHECK(std::abs(F.radial - radial) < 1e-12 * (1 + std::abs(radial)));
            CHECK(std::abs(F.transversal - transv) < 1e-12 * (1 + std::abs(transv)));
        }
    }
}

TEST_CASE("paper polar forms: consistent where derived says so, flagged where not") {
    // kepler_ermakov, C = 0: the printed transversal is exact
    auto spec_k = SystemSpec::kepler_ermakov(sx("1"), sx("1"), sx("0"), 0.0, sx("0"));
    auto Fp = systems::polar_force_paper(spec_k, 1.0, kPi / 6);
    auto Fd = systems::polar_force_derived(spec_k, 0.0, 1.0, kPi / 6);
    REQUIRE(Fp.ok());
    REQUIRE(Fd.ok());
    CHECK(std::abs(Fp.transversal - Fd.transversal) < 1e-12);
    CHECK(Fd.transversal == doctest::Approx(32.0 * std::sqrt(3.0) / 9.0).epsilon(1e-13));
    CHECK(std::abs(Fp.radial - Fd.radial) < 1e-12);

    // generalized: the printed transversal carries copied tan/cot factors; the
    // rotation oracle gives csc^2 g - sec^2 f. Residual must be nonzero.
    auto spec_g = SystemSpec::generalized(sx("1"), sx("1"), sx("0"));
    auto Gp = systems::polar_force_paper(spec_g, 1.0, kPi / 6);
    auto Gd = systems::polar_force_derived(spec_g, 0.0, 1.0, kPi / 6);
    CHECK(Gd.transversal == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(Gp.transversal == doctest::Approx(32.0 * std::sqrt(3.0) / 9.0).epsilon(1e-13));
    CHECK(std::abs(Gp.transversal - Gd.transversal) > 1.0);

    // toy radial is the identity sec^2 + csc^2 = (tan + cot)^2
    auto Tp = systems::polar_force_paper(toy0(), std::sqrt(2.0), kPi / 4);
    auto Td = systems::polar_force_derived(toy0(), 0.0, std::sqrt(2.0), kPi / 4);
    CHECK(Tp.radial == doctest::Approx(4.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(std::abs(Tp.radial - Td.radial) < 1e-14);

    // the toy transversal as printed disagrees; the squared variant agrees
    CHECK(std::abs(Tp.transversal - Td.transversal) > 0.5);
    Lcg rng;
    for (int it = 0; it < 50; ++it) {
        double r = rng.uniform(0.5, 2.0), th = rng.uniform(0.3, 1.2);
        auto d = systems::polar_force_derived(toy0(), 0.0, r, th);
        CHECK(systems::toy_transversal_squared_variant(r, th) ==
              doctest::Approx(d.transversal).epsilon(1e-11));
    }
}

TEST_CASE("paper and derived polar forms compare with explicit residuals") {
    systems::PolarState p{0, 1.3, 0.9, 0.2, 0.7};
    auto cmp = systems::polar_rhs_compare(toy0(), p);
    REQUIRE(cmp.ok());
    // toy radial (the (tan+cot)^2 identity) leaves no rdd residual
    CHECK(std::abs(cmp.residual_rdd) < 1e-13);
    // the printed transversal prime scope is inconsistent: nonzero residual
    CHECK(std::abs(cmp.residual_thdd) > 0.01);
    CHECK(cmp.paper.thdd - cmp.derived.thdd == doctest::Approx(cmp.residual_thdd));

    // kepler_ermakov with w = 0, C = 0: both components printed consistently
    auto spec_k = SystemSpec::kepler_ermakov(sx("1 + s"), sx("2*s"), sx("s^2"), 0.0, sx("0"));
    auto cmp_k = systems::polar_rhs_compare(spec_k, p);
    REQUIRE(cmp_k.ok());
    CHECK(std::abs(cmp_k.residual_rdd) < 1e-12);
    CHECK(std::abs(cmp_k.residual_thdd) < 1e-12);
}

TEST_CASE("toy is the f = g = 1, C = 0, h = 0 special case of kepler_ermakov") {
    auto spec_k = SystemSpec::kepler_ermakov(sx("1"), sx("1"), sx("0"), 0.0, sx("0"));
    Lcg rng;
    for (int it = 0; it < 100; ++it) {
        CartState s{0, rng.uniform(0.3, 3), rng.uniform(0.3, 3), rng.uniform(-1, 1),
                    rng.uniform(-1, 1)};
        auto at = systems::cart_rhs(toy0(), s);
        auto ak = systems::cart_rhs(spec_k, s);
        REQUIRE(at.ok());
        REQUIRE(ak.ok());
        CHECK(std::abs(at.ax - ak.ax) < 1e-14 * (1 + std::abs(at.ax)));
        CHECK(std::abs(at.ay - ak.ay) < 1e-14 * (1 + std::abs(at.ay)));
    }
}

TEST_CASE("ermakov invariant: closed-form values") {
    // toy (1, 2, 0.3, -0.1): L = -0.7, Phi = 4.25, I = 2.37
    CHECK(systems::ermakov_invariant(toy0(), {0, 1, 2, 0.3, -0.1}) ==
          doctest::Approx(2.37).epsilon(1e-14));
    // diagonal symmetry ray
    CHECK(systems::ermakov_invariant(toy0(), {0, 1, 1, 0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // kepler_ermakov with f = g = 1 agrees with toy (the +2 reference offset)
    auto spec_k = SystemSpec::kepler_ermakov(sx("1"), sx("1"), sx("0"), 0.0, sx("0"));
    CHECK(systems::ermakov_invariant(spec_k, {0, 1, 2, 0.3, -0.1}) ==
          doctest::Approx(2.37).epsilon(1e-10));
    // states on a coordinate axis have no shape argument
    CHECK_THROWS_AS(systems::ermakov_invariant(toy0(), {0, 0, 1, 0, 0}),
                    ermakov::NumericalError);
    CHECK_THROWS_AS(systems::ermakov_invariant(toy0(), {0, 1, 0, 0, 0}),
                    ermakov::NumericalError);
}

TEST_CASE("generalized with f = s, g = s^3: Phi vanishes and L is conserved") {
    auto spec = SystemSpec::generalized(sx("s"), sx("s^3"), sx("0"));
    CHECK(systems::invariant_potential(spec, 2.5) == doctest::Approx(0.0).epsilon(1e-12));
    // Ldot = g/y^2 - f/x^2 = 0 identically
    Lcg rng;
    for (int it = 0; it < 50; ++it) {
        CartState s{0, rng.uniform(0.3, 2), rng.uniform(0.3, 2), rng.uniform(-1, 1),
                    rng.uniform(-1, 1)};
        auto a = systems::cart_rhs(spec, s);
        REQUIRE(a.ok());
        double Ldot = s.x * a.ay - s.y * a.ax;
        CHECK(std::abs(Ldot) < 1e-13);
    }
    // along an integrated trajectory L stays constant
    auto traj = integrate::integrate_cart(spec, {0, 1, 2, 0.3, -0.1}, 5.0, 1e-11, 1e-13);
    REQUIRE(traj.completed());
    double L0 = systems::angular_momentum(traj.state_at_node(0));
    for (size_t i = 0; i < traj.size(); ++i)
        CHECK(systems::angular_momentum(traj.state_at_node(i)) ==
              doctest::Approx(L0).epsilon(1e-9));
}

TEST_CASE("invariant drift stays at integration accuracy, every class") {
    struct Case {
        SystemSpec spec;
        CartState ic;
        double t_end;
    };
    std::vector<Case> cases;
    cases.push_back({SystemSpec::toy(sx("sqrt(1 + 0.5*sin(t))")),
                     {0, 1, 2, 0.3, -0.1}, 20.0});
    cases.push_back({SystemSpec::generalized(sx("1"), sx("1"), sx("0.5")),
                     {0, 1, 2, 0.3, -0.1}, 8.0});
    cases.push_back({SystemSpec::kepler_ermakov(sx("1"), sx("1"), sx("1"), 1.0,
                                                sx("sqrt(1 + 0.25*cos(t))")),
                     {0, 1, 1, 0.0, 2.0}, 3.0});
    for (auto& cs : cases) {
        auto traj = integrate::integrate_cart(cs.spec, cs.ic, cs.t_end, 1e-11, 1e-13);
        REQUIRE(traj.completed());
        double i0 = systems::ermakov_invariant(cs.spec, traj.state_at_node(0));
        double lo = i0, hi = i0;
        for (int k = 0; k <= 400; ++k) {
            double t = cs.ic.t + (cs.t_end - cs.ic.t) * k / 400.0;
            double v = systems::ermakov_invariant(cs.spec, traj.state_at(t));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        INFO("class " << systems::to_string(cs.spec.cls()));
        CHECK((hi - lo) / std::max(1.0, std::abs(i0)) < 1e-9 * 100);
    }
}
