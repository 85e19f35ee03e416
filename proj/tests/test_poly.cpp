#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hcycle/automap.hpp"
#include "hcycle/poly.hpp"

using namespace hc;

namespace {

cplx naive(const std::vector<cplx>& c, cplx z) {
    cplx s = 0.0, zk = 1.0;
    for (cplx a : c) {
        s += a * zk;
        zk *= z;
    }
    return s;
}

// (2z - 1/2)^n with exactly representable coefficients, written with enough
// digits that from_text takes the multiprecision path.
std::string exact_text(int n) {
    std::ostringstream os;
    os.precision(60);
    os << std::scientific;
    for (int k = 0; k <= n; ++k) {
        double binom = std::round(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)));
        double v = binom * std::ldexp(1.0, k) * std::pow(-0.5, n - k);
        os << v << ' ' << 0.0 << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("plain polynomial evaluation and derivative") {
    std::vector<cplx> c{1.0, cplx(0, 2), -3.0, 0.5};
    Poly1 p(c);
    CHECK(p.degree() == 3);
    CHECK_FALSE(p.exact());
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 50; ++i) {
        cplx z(nd(rng), nd(rng));
        CHECK(std::abs(p(z) - naive(c, z)) <= 1e-12 * (1 + std::abs(naive(c, z))));
        cplx h = 1e-6;
        cplx fd = (p(z + h) - p(z - h)) / (2.0 * h);
        CHECK(std::abs(p.deriv(z) - fd) <= 1e-6 * (1 + std::abs(fd)));
    }
    CHECK(Poly1::constant(2.0).degree() == 0);
    CHECK(Poly1().is_zero());
}

TEST_CASE("text round trip of plain coefficients is exact") {
    Poly1 p(std::vector<cplx>{0.1, cplx(1.0 / 3.0, -2.0 / 7.0), 1e-300});
    Poly1 r = Poly1::from_text(p.to_text());
    CHECK(r.same_coeffs(p));
}

TEST_CASE("multiprecision polynomial: charts agree with exact evaluation") {
    Poly1 p = Poly1::from_text(exact_text(30));
    REQUIRE(p.exact());
    CHECK(p.degree() == 30);
    const cplx c(0.25, 0.0);
    const double r = 0.4;
    std::vector<cplx> pts;
    for (int k = 0; k < 16; ++k) pts.push_back(c + 0.9 * r * std::polar(1.0, 0.4 * k));
    std::vector<cplx> before;
    for (cplx z : pts) before.push_back(p(z));
    p.add_chart(c, r);
    REQUIRE(p.charts().size() == 1);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        cplx v = p(pts[k]);
        CHECK(std::abs(v - before[k]) <= 1e-12 * std::abs(before[k]));
        cplx model = std::pow(2.0 * (pts[k] - 0.25), 30);
        CHECK(std::abs(v - model) <= 1e-12 * std::abs(model));
    }
    CBox x = CBox::disk_hull(c + 0.01, 0.005);
    CBox e = p.eval_box(x);
    CHECK(e.contains(p(c + 0.01)));
    CHECK_THROWS_AS(p.eval_box(CBox::disk_hull(2.0, 0.01)), EnclosureError);
}

TEST_CASE("multiprecision text round trip") {
    Poly1 p = Poly1::from_text(exact_text(12));
    Poly1 r = Poly1::from_text(p.to_text());
    CHECK(r.same_coeffs(p));
}

TEST_CASE("separable two-variable polynomials") {
    Poly2 P = Poly2::from_grid({{1.0, 2.0}, {0.0, 0.0, 3.0}});  // 1 + 2v + 3u v^2
    cplx u(0.3, 0.1), v(-0.2, 0.5);
    cplx want = 1.0 + 2.0 * v + 3.0 * u * v * v;
    CHECK(std::abs(P.eval(u, v) - want) < 1e-14);
    CHECK(std::abs(P.du(u, v) - 3.0 * v * v) < 1e-14);
    CHECK(std::abs(P.dv(u, v) - (2.0 + 6.0 * u * v)) < 1e-14);
    CHECK(P.degree() == 3);
    Poly2 Q = Poly2::in_u(Poly1(std::vector<cplx>{0.0, 1.0}), 2.0);
    Q.add(1.0, Poly1::constant(1.0), Poly1(std::vector<cplx>{0.0, 0.0, 1.0}));
    CHECK(std::abs(Q.eval(u, v) - (2.0 * u + v * v)) < 1e-14);
    CBox bu = CBox::disk_hull(u, 0.01), bv = CBox::disk_hull(v, 0.01);
    CHECK(P.eval_box(bu, bv).contains(want));
    CHECK(P.du_box(bu, bv).contains(3.0 * v * v));
}
