#include <doctest.h>

#include <cmath>
#include <random>

#include "hcycle/ivbox.hpp"

using namespace hc;

namespace {

std::mt19937_64 rng(42);

double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Interval rand_interval() {
    double a = uni(-3, 3), b = uni(-3, 3);
    return Interval(std::min(a, b), std::max(a, b));
}

double pick(const Interval& x) { return uni(x.lo, x.hi); }

CBox rand_box() { return CBox(rand_interval(), rand_interval()); }

cplx pick(const CBox& x) { return {pick(x.re), pick(x.im)}; }

}  // namespace

TEST_CASE("interval arithmetic contains pointwise results") {
    for (int i = 0; i < 2000; ++i) {
        Interval a = rand_interval(), b = rand_interval();
        double x = pick(a), y = pick(b);
        CHECK((a + b).contains(x + y));
        CHECK((a - b).contains(x - y));
        CHECK((a * b).contains(x * y));
        CHECK(sqr(a).contains(x * x));
        if (b.lo > 0.0) CHECK((a / b).contains(x / y));
    }
}

TEST_CASE("interval rounding is outward") {
    Interval third = Interval(1.0) / Interval(3.0);
    CHECK(third.lo < third.hi);
    CHECK(third.contains(1.0 / 3.0));
    Interval s = sqrt(Interval(2.0));
    CHECK(s.lo * s.lo <= 2.0);
    CHECK(s.hi * s.hi >= 2.0);
}

TEST_CASE("interval errors") {
    CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(1.0) / Interval(-1.0, 1.0), EnclosureError);
    CHECK_THROWS_AS(sqrt(Interval(-2.0, -1.0)), EnclosureError);
}

TEST_CASE("complex boxes contain pointwise results") {
    for (int i = 0; i < 2000; ++i) {
        CBox a = rand_box(), b = rand_box();
        cplx x = pick(a), y = pick(b);
        CHECK((a + b).contains(x + y));
        CHECK((a * b).contains(x * y));
        CHECK(a.abs().contains(std::abs(x)));
        CHECK(a.max_dist(0.3) >= std::abs(x - 0.3));
        CHECK(a.min_dist(0.3) <= std::abs(x - 0.3));
    }
}

TEST_CASE("polynomial box enclosures contain samples") {
    std::vector<cplx> c(40);
    for (auto& a : c) a = {uni(-1, 1), uni(-1, 1)};
    const cplx center(0.2, -0.1);
    for (int i = 0; i < 200; ++i) {
        CBox x(Interval(-0.3, uni(-0.2, 0.4)), Interval(uni(-0.5, -0.1), 0.3));
        CBox rect = eval_poly_box(c, center, x), disk = eval_poly_disk(c, center, x);
        for (int k = 0; k < 10; ++k) {
            cplx z = pick(x), v = 0.0;
            for (std::size_t m = c.size(); m-- > 0;) v = v * (z - center) + c[m];
            CHECK(rect.contains(v));
            CHECK(disk.contains(v));
        }
    }
}

TEST_CASE("matrix enclosure product contains point products") {
    MatrixEnclosure A, B;
    Mat3 a, b;
    for (int k = 0; k < 9; ++k) {
        A.a[k] = rand_box();
        B.a[k] = rand_box();
        a[k] = pick(A.a[k]);
        b[k] = pick(B.a[k]);
    }
    CHECK((A * B).contains(mul(a, b)));
    CHECK(MatrixEnclosure::identity().contains(Mat3{1, 0, 0, 0, 1, 0, 0, 0, 1}));
}

TEST_CASE("bisection splits the widest side and covers the box") {
    Box3 X{CBox(Interval(0, 1), Interval(0, 4)), CBox(Interval(0, 2), Interval(0, 1)), CBox(cplx(0.0))};
    auto [a, b] = X.bisect();
    CHECK(a.z.im.hi == doctest::Approx(2.0));
    CHECK(b.z.im.lo == doctest::Approx(2.0));
    CHECK(a.w.re.hi == 2.0);
}

TEST_CASE("cone membership") {
    ConeSpec cu{ConeKind::C_u, 1e-3, 1.0};
    CHECK(cone_member({1.0, 5e-4, 0.0}, cu));
    CHECK(cone_member({0.0, 5e-4, 1.0}, cu));
    CHECK_FALSE(cone_member({1.0, 2e-3, 0.0}, cu));
    ConeSpec cs{ConeKind::C_s, 1e-3, 1e-8};
    CHECK(cone_member({1e-12, 1.0, 0.0}, cs));
    CHECK_FALSE(cone_member({1e-10, 1.0, 0.0}, cs));
    CHECK_THROWS(cone_member({0.0, 0.0, 0.0}, cu));
}

TEST_CASE("cone certification of a model differential") {
    // Differential of the affine horseshoe model: expands z by 1e4, shifts z into w.
    MatrixEnclosure M(Mat3{1e4, 1e-8, 0, 1, 0, 0, 0, 0, 10.0 / 9.0});
    ConeSpec cuu{ConeKind::C_uu, 1e-3, 1.0};
    CHECK(cone_map_certify(M, cuu, cuu, 1e3) == Verdict::yes);
    // Swapping roles of z and w breaks it.
    MatrixEnclosure bad(Mat3{0, 1, 0, 1e4, 0, 0, 0, 0, 1});
    CHECK(cone_map_certify(bad, cuu, cuu, 1e3) == Verdict::no);
    CHECK_THROWS(cone_map_certify(M, cuu, cuu, 0.0));
}
