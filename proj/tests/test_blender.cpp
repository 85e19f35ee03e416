#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixture.hpp"

using namespace hc;
using hc::test::dist;
using hc::test::model;

TEST_CASE("covering constants") {
    CoveringReport r = verify_covering(100);
    // Worst point of D(0,1/2) against the four centers -i^j/10, and the inner radius of the images.
    double far = std::hypot(0.5 * std::cos(std::numbers::pi / 4) - 0.09, 0.5 * std::sin(std::numbers::pi / 4));
    CHECK(r.lhs == doctest::Approx(far * far).epsilon(1e-12));
    CHECK(r.lhs == doctest::Approx(0.1944604).epsilon(1e-6));
    CHECK(r.rhs == doctest::Approx(0.2000773).epsilon(1e-6));
    CHECK(r.points == 10000);
    CHECK(r.failures == 0);
    CHECK(r.ok);
    CHECK_THROWS(verify_covering(0));
}

TEST_CASE("covering selection inverts the fiber model") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        cplx t = std::polar(0.5 * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
        CoverChoice c = covering_select(t);
        CHECK(std::abs(c.tau) <= 0.497);
        CHECK(std::abs(fiber_model(c.j, c.tau) - t) < 1e-15);
    }
    CHECK_THROWS(covering_select(0.6));
}

TEST_CASE("uu validation") {
    CHECK(uu_validate(UUCurve::constant(0.5, 0.2)));
    CHECK_FALSE(uu_validate(UUCurve::constant(1.2, 0.2)));
    auto steep = UUCurve::from_functions([](cplx z) { return 0.01 * z; }, [](cplx) { return cplx(0.0); });
    CHECK_FALSE(uu_validate(steep));
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) CHECK(uu_validate(random_uu_curve(rng)));
}

TEST_CASE("curve samples reproduce the generating functions") {
    auto f2 = [](cplx z) { return 0.3 + 1e-4 * z * z; };
    auto f3 = [](cplx z) { return cplx(0, 0.1) - 2e-4 * z * z * z; };
    UUCurve c = UUCurve::from_functions(f2, f3);
    for (cplx z : {cplx(0.0), cplx(0.5, -0.3), cplx(0.0, 0.9)}) {
        CHECK(std::abs(c.at2(z) - f2(z)) < 1e-14);
        CHECK(std::abs(c.at3(z) - f3(z)) < 1e-14);
        CHECK(std::abs(c.d3(z) + 6e-4 * z * z) < 1e-13);
    }
}

TEST_CASE("one blender step lands on a new uu-curve") {
    const auto& m = model();
    UUCurve c = UUCurve::constant(0.2, cplx(0.1, -0.2));
    StepResult s = step(m.F1, c, m.cfg);
    CHECK(s.j == covering_select(c.at3(0.0)).j);
    CHECK(uu_validate(s.next));
    for (int k = 0; k < UUCurve::samples; k += 17) {
        Vec3 y = m.F1.apply(c.point(s.preimages[k]));
        CHECK(dist(y, s.next.point(UUCurve::root(k))) < 1e-10);
    }
    // The new fiber level is the model image of the old one.
    CHECK(std::abs(s.next.at3(0.0) - (m.cfg.lambda * c.at3(0.0) + 0.1 * std::pow(cplx(0, 1), s.j))) < 1e-4);
    CHECK_THROWS(step(m.F1, UUCurve::constant(0.2, 0.7), m.cfg));
}

TEST_CASE("stable intersection: nested pieces and matching itinerary") {
    const auto& m = model();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        UUCurve c = random_uu_curve(rng);
        BlenderTrace tr = intersect_stable(m.F1, c, 6, 1e-10, m.cfg);
        CHECK(tr.t_diameters.back() <= 1e-10);
        for (std::size_t k = 1; k < tr.t_diameters.size(); ++k) CHECK(tr.t_diameters[k] < tr.t_diameters[k - 1]);
        CHECK(dist(tr.point, c.point(tr.parameter)) == 0.0);
        // Forward orbit follows the itinerary and stays in the slab.
        auto br = default_branches(m.cfg);
        Vec3 x = tr.point;
        for (int j : tr.itinerary) {
            auto mem = branch_membership(m.F1, br, x);
            REQUIRE(mem);
            CHECK(mem->j == j);
            CHECK(std::abs(x[2]) <= 0.5);
            x = m.F1.apply(x);
        }
    }
}
