#include <doctest.h>

#include <cmath>
#include <random>

#include "fixture.hpp"

using namespace hc;
using hc::test::dist;
using hc::test::model;

namespace {

// A small map with plain coefficients: cubic skew followed by three shears.
Automorphism3 toy() {
    Poly1 p(std::vector<cplx>{0.1, 0.0, 0.0, 1.0});
    Poly1 q(std::vector<cplx>{0.0, 0.3, 0.2});
    Automorphism3 F{{HenonSkew(p, q, 0.5, 1.2)}, "toy"};
    return F.then(ShearZ{Poly2::from_grid({{0.0, 0.1}, {0.2}})})
        .then(ShearW{Poly2::from_grid({{0.0, 0.0, 0.05}})})
        .then(ShearT{Poly2::from_grid({{0.0}, {0.0, 0.3}})});
}

Vec3 rand_point(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> u(-r, r);
    return {cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
}

// Degree read off from growth along a generic complex line.
double growth_degree(const Automorphism3& F) {
    const Vec3 a{0.1, cplx(0.2, 0.1), -0.3}, v{cplx(0.6, 0.3), cplx(-0.4, 0.5), cplx(0.2, -0.7)};
    auto size = [&](double s) {
        Vec3 x{a[0] + s * v[0], a[1] + s * v[1], a[2] + s * v[2]};
        return norm(F.apply(x));
    };
    double s = 1e5;
    return std::log(size(2 * s) / size(s)) / std::log(2.0);
}

}  // namespace

TEST_CASE("inverse undoes the map") {
    std::mt19937_64 rng(3);
    Automorphism3 F = toy();
    for (int i = 0; i < 100; ++i) {
        Vec3 x = rand_point(rng, 1.0);
        CHECK(dist(F.apply_inv(F.apply(x)), x) < 1e-12);
        CHECK(dist(F.apply(F.apply_inv(x)), x) < 1e-12);
    }
}

TEST_CASE("F1 inverse round trip on the horseshoe region") {
    const auto& m = model();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 20; ++i) {
            Vec3 x{branch_center(j) + m.cfg.eta * cplx(u(rng), u(rng)) * 0.7, cplx(u(rng), u(rng)) * 0.7,
                   cplx(u(rng), u(rng)) * 0.7};
            Vec3 y = m.F1.apply(x);
            CHECK(dist(m.F1.apply(m.F1.apply_inv(y)), y) < 1e-12);
            // The inverse divides by b, so rounding in z is amplified by 1/|b|.
            CHECK(dist(m.F1.apply_inv(y), x) < 1e-15 / std::abs(m.cfg.b));
        }
}

TEST_CASE("jacobians match finite differences") {
    std::mt19937_64 rng(5);
    Automorphism3 F = toy();
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        Vec3 x = rand_point(rng, 1.0);
        Mat3 D = F.jacobian(x), Di = F.jacobian_inv(x);
        for (int c = 0; c < 3; ++c) {
            Vec3 xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            Vec3 fp = F.apply(xp), fm = F.apply(xm), gp = F.apply_inv(xp), gm = F.apply_inv(xm);
            for (int r = 0; r < 3; ++r) {
                CHECK(std::abs((fp[r] - fm[r]) / (2 * h) - D[3 * r + c]) < 1e-6);
                CHECK(std::abs((gp[r] - gm[r]) / (2 * h) - Di[3 * r + c]) < 1e-6);
            }
        }
    }
}

TEST_CASE("box enclosures contain point images") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Automorphism3 F = toy();
    for (int i = 0; i < 50; ++i) {
        Vec3 c = rand_point(rng, 0.8);
        Box3 X{CBox::disk_hull(c[0], 0.05), CBox::disk_hull(c[1], 0.05), CBox::disk_hull(c[2], 0.05)};
        Box3 Y = F.apply_box(X), Yi = F.apply_inv_box(X);
        MatrixEnclosure J = F.jacobian_box(X);
        for (int k = 0; k < 10; ++k) {
            Vec3 x{c[0] + cplx(u(rng) - 0.5, u(rng) - 0.5) * 0.1, c[1] + cplx(u(rng) - 0.5, u(rng) - 0.5) * 0.1,
                   c[2] + cplx(u(rng) - 0.5, u(rng) - 0.5) * 0.1};
            CHECK(Y.contains(F.apply(x)));
            CHECK(Yi.contains(F.apply_inv(x)));
            CHECK(J.contains(F.jacobian(x)));
        }
    }
}

TEST_CASE("composition order") {
    Automorphism3 F = toy();
    Automorphism3 G{{ShearZ{Poly2::from_grid({{0.0, 1.0}})}}, "g"};  // z += t
    Vec3 x{0.1, 0.2, 0.3};
    CHECK(dist(F.after(G).apply(x), F.apply(G.apply(x))) < 1e-15);
    CHECK(dist(F.then(G.gens[0]).apply(x), G.apply(F.apply(x))) < 1e-15);
}

TEST_CASE("degree tracking agrees with growth along a line") {
    Automorphism3 F = toy();
    DegreeReport d = degree_of(F);
    // Skew gives degrees (3, 1, 2); z += 0.1 t + 0.2 w keeps 3; w += 0.05 t^2 gives 4;
    // t += 0.3 z w gives 7.
    CHECK(d.value == 7);
    CHECK(std::abs(growth_degree(F) - 7.0) < 0.05);
    CHECK(d.bound >= d.value);
    Automorphism3 FF = F.after(F);
    CHECK(std::abs(growth_degree(FF) - double(degree_of(FF).value)) < 0.1);
}

TEST_CASE("F1 degree is the degree of p") {
    const auto& m = model();
    DegreeReport d = degree_of(m.F1);
    CHECK(d.value == std::max(m.p.poly.degree(), m.q.poly.degree()));
    CHECK(d.exact);
}

TEST_CASE("branch membership") {
    const auto& m = model();
    auto br = default_branches(m.cfg);
    for (int j = 0; j < 4; ++j) {
        cplx z = branch_inverse(m.p.poly, j, 0.3);
        auto mem = branch_membership(m.F1, br, {z, 0.2, 0.1});
        REQUIRE(mem);
        CHECK(mem->j == j);
        CHECK(mem->cls == BoundaryClass::interior);
    }
    CHECK_FALSE(branch_membership(m.F1, br, {0.9, 0.0, 0.0}));
}

TEST_CASE("skew needs nonzero b and lambda") {
    CHECK_THROWS(HenonSkew(Poly1::constant(1.0), Poly1(), 0.0, 1.0));
    CHECK_THROWS(HenonSkew(Poly1::constant(1.0), Poly1(), 1.0, 0.0));
}
