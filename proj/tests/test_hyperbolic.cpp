#include <doctest.h>

#include <cmath>
#include <random>

#include "fixture.hpp"

using namespace hc;
using hc::test::dist;
using hc::test::model;

namespace {

Vec3 iterate(const Automorphism3& F, Vec3 x, int n) {
    for (int k = 0; k < n; ++k) x = F.apply(x);
    return x;
}

}  // namespace

TEST_CASE("saddle S near (3, 3, 3) with index 1") {
    const auto& m = model();
    SaddleData S = newton_fixed(m.F1, {3.0, 3.0, 3.0}, 1);
    CHECK(dist(S.location, {3.0, 3.0, 3.0}) < 0.05);
    CHECK(S.residual < 1e-12);
    CHECK(S.index == 1);
    CHECK(std::abs(S.eigenvalues[2]) == doctest::Approx(m.cfg.lambda).epsilon(1e-9));
    CHECK(std::abs(S.eigenvalues[0]) < 2e-4);
    CHECK(std::abs(S.eigenvalues[1]) < 2e-4);
    // Eigenvectors solve the eigenproblem.
    Mat3 D = m.F1.jacobian(S.location);
    for (int k = 0; k < 3; ++k) {
        Vec3 Dv = mul(D, S.eigenvectors[k]);
        Vec3 lv{S.eigenvalues[k] * S.eigenvectors[k][0], S.eigenvalues[k] * S.eigenvectors[k][1],
                S.eigenvalues[k] * S.eigenvectors[k][2]};
        CHECK(dist(Dv, lv) < 1e-9 * (1 + std::abs(S.eigenvalues[k])));
    }
}

TEST_CASE("saddle A near (1/4, 1/4, -9/10) with index 2") {
    const auto& m = model();
    SaddleData A = newton_fixed(m.F1, {0.25, 0.25, -0.9}, 1);
    CHECK(dist(A.location, {0.25, 0.25, -0.9}) < 1e-3);
    CHECK(A.index == 2);
    CHECK(std::abs(A.eigenvalues[2]) > 1e3);
    CHECK(std::abs(A.eigenvalues[0]) < 1e-3);
}

TEST_CASE("periodic orbits follow their words") {
    const auto& m = model();
    auto br = default_branches(m.cfg);
    std::vector<int> word{0, 2, 1};
    SaddleData P = periodic_orbit(m.F1, word, m.cfg);
    REQUIRE(P.orbit.size() == 3);
    CHECK(P.residual < 1e-10);
    for (int k = 0; k < 3; ++k) {
        auto mem = branch_membership(m.F1, br, P.orbit[k]);
        REQUIRE(mem);
        CHECK(mem->j == word[k]);
        CHECK(dist(m.F1.apply(P.orbit[k]), P.orbit[(k + 1) % 3]) < 1e-10);
    }
    CHECK(std::abs(P.orbit[0][2] - model_periodic_t(word, m.cfg.lambda)) < 1e-3);

    SaddleData B = periodic_in_slab(m.F1, {0.0, 0.1}, m.cfg);
    CHECK(std::abs(B.location[2]) < 0.1 + 1e-3);
    CHECK(B.residual < 1e-10);
}

TEST_CASE("affine model of periodic fiber levels") {
    // Period one: t = lambda t + 1/10 gives t = -0.9.
    CHECK(std::abs(model_periodic_t({0}, 10.0 / 9.0) - cplx(-0.9)) < 1e-14);
    // The orbit closes under t -> lambda t + i^j / 10.
    std::vector<int> w{1, 3, 3, 0};
    const cplx ip[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    cplx t = model_periodic_t(w, 10.0 / 9.0), t0 = t;
    for (int j : w) t = 10.0 / 9.0 * t + 0.1 * ip[j];
    CHECK(std::abs(t - t0) < 1e-14);
}

TEST_CASE("crossing and the sink basin") {
    const auto& m = model();
    CrossingReport c = verify_crossing(m.p.poly, m.cfg.b, m.cfg);
    CHECK(c.ok);
    CHECK(c.transitions == 16);
    for (int j = 0; j < 4; ++j) CHECK(c.winding[j] == 1);
    SinkReport s = verify_sink_basin(m.p.poly, m.cfg.b, 64);
    CHECK(s.invariance == Verdict::yes);
    CHECK(s.contraction == Verdict::yes);
    CHECK(std::abs(s.sink - 3.0) < 1e-3);
    CHECK(std::abs(s.multiplier) < 1e-3);
}

TEST_CASE("cone fields of the Henon factor and of F1") {
    const auto& m = model();
    auto br = default_branches(m.cfg);
    ConeReport H = verify_cones(henon_factor(m.p.poly, m.cfg.b), br, henon_cone_pairs(), 12, true);
    CHECK(H.certified);
    ConeReport F = verify_cones(m.F1, br, skew_cone_pairs(m.cfg), 12);
    CHECK(F.certified);
    for (const auto& pr : F.pairs) {
        CHECK(pr.failed == 0);
        CHECK(pr.unknown == 0);
        CHECK(pr.certified_fraction == doctest::Approx(1.0));
    }
}

TEST_CASE("fibered coordinate converges and conjugates") {
    const auto& m = model();
    HorseshoeOrbit o = horseshoe_orbit(m.p.poly, m.cfg.b, {0, 1, 3, 2}, true);
    for (std::size_t k = 0; k < o.z.size(); ++k) {
        cplx prev = o.z[(k + 3) % 4], next = o.z[(k + 1) % 4];
        CHECK(std::abs(m.p.poly(o.z[k]) + m.cfg.b * prev - next) < 1e-12);
    }
    XiResult a = fibered_xi(m.F1, o, 40), b = fibered_xi(m.F1, o, 80);
    CHECK(std::abs(a.value - b.value) <= a.radius);
    CHECK(b.conjugacy_residual <= 2 * b.radius);
}

TEST_CASE("local stable surface of S is invariant") {
    const auto& m = model();
    SaddleData S = newton_fixed(m.F1, {3.0, 3.0, 3.0}, 1);
    GraphPatch Ws = stable_surface_S(m.F1, S);
    CHECK(Ws.invariance_residual < 1e-10);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int k = 0; k < 10; ++k) {
        auto v = Ws.eval(cplx(3.0 + u(rng), u(rng)), cplx(3.0 + u(rng), u(rng)));
        CHECK(dist(iterate(m.F1, v.point, 8), S.location) < 1e-8);
    }
}

TEST_CASE("local unstable surface of A is invariant") {
    const auto& m = model();
    GraphPatch Wu = unstable_surface_K(m.F1, {0}, m.cfg);
    CHECK(Wu.invariance_residual < 1e-10);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int k = 0; k < 10; ++k) {
        cplx z = branch_inverse(m.p.poly, 0, cplx(u(rng), u(rng)));
        Vec3 x = Wu.eval(z, cplx(u(rng), u(rng))).point;
        Vec3 y = m.F1.apply(x);
        CHECK(std::abs(y[1] - Wu.eval(y[0], y[2]).point[1]) < 1e-10);
    }
}

TEST_CASE("local unstable curve of S and stable curve of B") {
    const auto& m = model();
    SaddleData S = newton_fixed(m.F1, {3.0, 3.0, 3.0}, 1);
    GraphPatch Wu = unstable_curve_S(m.F1, S, 40);
    for (cplx s : {cplx(-0.5), cplx(0.3, 0.4)}) {
        Vec3 x = Wu.eval(s, 0.0).point;
        CHECK(std::abs(x[2] - (S.location[2] + s)) < 1e-12);
        Vec3 y = m.F1.apply(x);
        CHECK(dist(y, Wu.eval(y[2] - S.location[2], 0.0).point) < 1e-10);
    }
    SaddleData B = periodic_orbit(m.F1, {0, 2}, m.cfg);
    GraphPatch Ws = stable_curve_K(m.F1, {}, B);
    CHECK(Ws.invariance_residual < 1e-10);
    for (cplx w : {cplx(0.3, 0.1), cplx(-0.5, 0.0)}) {
        Vec3 x = Ws.eval(w, 0.0).point;
        CHECK(std::abs(x[1] - w) < 1e-12);
        // Forward iteration expands rounding in z by 1e4 per step, so stay short.
        CHECK(dist(iterate(m.F1, x, 2), B.orbit[0]) < 1e-6);
    }
}
