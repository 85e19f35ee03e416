#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixture.hpp"

using namespace hc;
using hc::test::model;

namespace {

std::vector<cplx> disk_points(cplx c, double r, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> out;
    for (int k = 0; k < n; ++k) out.push_back(c + std::polar(r * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)));
    for (int k = 0; k < 64; ++k) out.push_back(c + std::polar(r, 2 * std::numbers::pi * k / 64));
    return out;
}

}  // namespace

TEST_CASE("piecewise target: overlapping disks are rejected") {
    PiecewiseTarget t{{{{0.0, 1.0}, Poly1::constant(0.0)}, {{1.5, 1.0}, Poly1::constant(1.0)}}};
    CHECK_THROWS(t.check());
    CHECK_THROWS(DiskSpec(0.0, 0.0));
    CHECK(disjoint({0.0, 1.0}, {3.0, 1.0}));
}

TEST_CASE("two-disk fit: certified bound dominates sampled error") {
    PiecewiseTarget t{{{{0.0, 0.5}, Poly1::constant(0.0)}, {{2.0, 0.5}, Poly1::constant(1.0)}}};
    double prev = HUGE_VAL;
    for (int degree : {20, 40, 80}) {
        Poly1 p = fit_polynomial(t, degree, 4 * degree);
        double worst = 0.0;
        for (const Piece& pc : t.pieces) {
            SupBound b = certify_sup(p, pc.target, pc.disk, 1e-4);
            REQUIRE(b.certified);
            double sampled = 0.0;
            for (cplx z : disk_points(pc.disk.center, pc.disk.radius, 200, 3))
                sampled = std::max(sampled, std::abs(p(z) - pc.target(z)));
            CHECK(sampled <= b.value_err);
            worst = std::max(worst, b.value_err);
        }
        CHECK(worst < prev);
        prev = worst;
    }
}

TEST_CASE("p matches the affine branch models") {
    const auto& m = model();
    REQUIRE(m.p.report.certified);
    for (int j = 0; j <= 4; ++j) {
        DiskSpec d = branch_disk(m.cfg, j);
        Poly1 target = affine_model(m.cfg, j);
        for (cplx z : disk_points(d.center, d.radius, 100, 10 + j)) {
            CHECK(std::abs(m.p.poly(z) - target(z)) <= m.cfg.eps);
            CHECK(std::abs(m.p.poly.deriv(z) - target.deriv(z)) <= m.cfg.eps);
        }
    }
    for (double e : m.p.report.value_err) CHECK(e <= m.cfg.eps);
}

TEST_CASE("p has an attracting fixed point near 3 with multiplier eta") {
    const auto& m = model();
    cplx z = poly_fixed_point(m.p.poly, 3.0);
    CHECK(std::abs(m.p.poly(z) - z) < 1e-12);
    CHECK(std::abs(z - 3.0) < 1e-3);
    CHECK(std::abs(m.p.poly.deriv(z) - 1e-4) < 1e-3);
}

TEST_CASE("q takes the fiber constants") {
    const auto& m = model();
    REQUIRE(m.q.report.certified);
    const cplx want[5] = {0.1, cplx(0, 0.1), -0.1, cplx(0, -0.1), -1.0 / 3.0};
    for (int j = 0; j <= 4; ++j) {
        DiskSpec d = branch_disk(m.cfg, j);
        for (cplx z : disk_points(d.center, d.radius, 50, 20 + j)) {
            CHECK(std::abs(m.q.poly(z) - want[j]) <= m.cfg.zeta);
            CHECK(std::abs(m.q.poly.deriv(z)) <= m.cfg.zeta);
        }
    }
}

TEST_CASE("branch inverse solves p(z) = target near c_j") {
    const auto& m = model();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 20; ++k) {
            cplx t(u(rng), u(rng));
            cplx z = branch_inverse(m.p.poly, j, t);
            CHECK(std::abs(m.p.poly(z) - t) < 1e-10);
            CHECK(std::abs(z - branch_center(j)) < 1.01 * m.cfg.eta);
        }
    CHECK_THROWS(branch_inverse(m.p.poly, 0, 2.0));
}

TEST_CASE("bumps are 1 on the on-disk and 0 on the off-disks") {
    ModelConfig cfg;
    FitResult b = make_bump({-2.0, 0.01}, {{0.0, 1.05}, {3.0, 1.02}}, cfg, "test");
    REQUIRE(b.report.certified);
    for (cplx z : disk_points(-2.0, 0.01, 50, 7)) CHECK(std::abs(b.poly(z) - 1.0) <= cfg.bump_tol);
    for (cplx z : disk_points(0.0, 1.05, 50, 8)) CHECK(std::abs(b.poly(z)) <= cfg.bump_tol);
    for (cplx z : disk_points(3.0, 1.02, 50, 9)) CHECK(std::abs(b.poly(z)) <= cfg.bump_tol);
    CHECK_THROWS(make_bump({0.5, 0.1}, {{0.0, 1.0}}, cfg));
}

TEST_CASE("config validation") {
    ModelConfig c;
    CHECK_NOTHROW(c.validate());
    c.b = 0.0;
    CHECK_THROWS(c.validate());
    c = ModelConfig{};
    c.chain_length = 0;
    CHECK_THROWS(c.validate());
}
