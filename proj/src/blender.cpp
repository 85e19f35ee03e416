#include "hcycle/blender.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hcycle/rungefit.hpp"

namespace hc {

namespace {

constexpr double cone_ratio = 1e-3;

cplx horner(const std::vector<cplx>& a, cplx z) {
    cplx r = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) r = r * z + a[k];
    return r;
}

cplx horner_deriv(const std::vector<cplx>& a, cplx z) {
    cplx r = 0.0;
    for (std::size_t k = a.size(); k-- > 1;) r = r * z + double(k) * a[k];
    return r;
}

std::vector<cplx> coefficients(const std::vector<cplx>& s) {
    const int n = static_cast<int>(s.size());
    std::vector<cplx> a(n);
    for (int k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) acc += s[m] * std::conj(UUCurve::root((k * m) % n));
        a[k] = acc / double(n);
    }
    return a;
}

double block_max(const std::vector<cplx>& a, const std::vector<cplx>& b, int from, int to) {
    double m = 0.0;
    for (int k = from; k < to; ++k) m = std::max({m, std::abs(a[k]), std::abs(b[k])});
    return m;
}

}  // namespace

cplx UUCurve::root(int m) { return std::polar(1.0, 2.0 * std::numbers::pi * m / samples); }

UUCurve UUCurve::constant(cplx a, cplx b) {
    return from_samples(std::vector<cplx>(samples, a), std::vector<cplx>(samples, b));
}

UUCurve UUCurve::from_samples(std::vector<cplx> s2, std::vector<cplx> s3) {
    if (s2.size() != samples || s3.size() != samples) throw std::invalid_argument("UUCurve: need 256 samples");
    UUCurve c;
    c.c2 = coefficients(s2);
    c.c3 = coefficients(s3);
    c.s2 = std::move(s2);
    c.s3 = std::move(s3);
    // Geometric decay model fitted to the last two blocks of 16 coefficients.
    double last = block_max(c.c2, c.c3, samples - 16, samples);
    double prev = block_max(c.c2, c.c3, samples - 32, samples - 16);
    double rho = prev > 0 ? std::min(0.9, std::pow(last / prev, 1.0 / 16)) : 0.9;
    c.tail_bound = 10.0 * last * rho / (1.0 - rho) + 1e-300;
    return c;
}

cplx UUCurve::at2(cplx z) const { return horner(c2, z); }
cplx UUCurve::at3(cplx z) const { return horner(c3, z); }
cplx UUCurve::d2(cplx z) const { return horner_deriv(c2, z); }
cplx UUCurve::d3(cplx z) const { return horner_deriv(c3, z); }

cplx fiber_model(int j, cplx t) {
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    return 0.9 * t - 0.09 * ipow[j & 3];
}

CoverChoice covering_select(cplx t) {
    if (!(std::abs(t) <= 0.5)) throw std::invalid_argument("covering_select: |t| > 1/2");
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    CoverChoice best{-1, 0.0};
    for (int j = 0; j < 4; ++j) {
        cplx tau = (t + 0.09 * ipow[j]) / 0.9;
        if (std::abs(tau) > 0.497) continue;
        if (best.j < 0 || std::abs(tau) < std::abs(best.tau)) best = {j, tau};
    }
    if (best.j < 0) throw std::runtime_error("covering_select: no branch covers t");
    return best;
}

CoveringReport verify_covering(int grid_n) {
    if (grid_n < 1) throw std::invalid_argument("verify_covering: grid_n >= 1");
    CoveringReport r;
    r.lhs = 0.25 - 0.18 * 0.5 * std::sqrt(2.0) / 2.0 + 0.09 * 0.09;
    r.rhs = 0.81 * 0.497 * 0.497;
    for (int i = 0; i < grid_n; ++i)
        for (int k = 0; k < grid_n; ++k) {
            double rad = grid_n == 1 ? 0.0 : 0.5 * i / (grid_n - 1);
            cplx t = std::polar(rad, 2.0 * std::numbers::pi * k / grid_n);
            ++r.points;
            try {
                CoverChoice c = covering_select(t);
                if (std::abs(fiber_model(c.j, c.tau) - t) > 1e-15) throw std::runtime_error("inverse mismatch");
            } catch (const std::exception&) {
                ++r.failures;
                if (!r.witness) r.witness = t;
            }
        }
    r.ok = r.failures == 0 && r.lhs < r.middle && r.middle < r.rhs;
    return r;
}

bool uu_validate(const UUCurve& c) {
    const double dtail = c.deriv_tail();
    for (int ring = 0; ring < 2; ++ring)
        for (int m = 0; m < UUCurve::samples; ++m) {
            cplx z = (ring == 0 ? 1.0 : 0.5) * UUCurve::root(m);
            double slope = std::hypot(std::abs(c.d2(z)), std::abs(c.d3(z))) + std::sqrt(2.0) * dtail;
            if (!(slope <= cone_ratio)) return false;
            if (ring == 0 && !(std::abs(c.at2(z)) + c.tail_bound < 1.0)) return false;
        }
    return true;
}

cplx pull_parameter(const Automorphism3& F, const UUCurve& c, int j, cplx target) {
    const HenonSkew& h = F.skew();
    cplx z = branch_inverse(h.p, j, target - h.b * c.at2(branch_center(j)));
    double res = HUGE_VAL;
    for (int it = 0; it < 60; ++it) {
        Vec3 x = c.point(z);
        Mat3 D = F.jacobian(x);
        cplx phi = F.apply(x)[0] - target;
        res = std::abs(phi);
        cplx dphi = D[0] + D[1] * c.d2(z) + D[2] * c.d3(z);
        cplx dz = phi / dphi;
        z -= dz;
        if (std::abs(dz) <= 1e-17 + 1e-16 * std::abs(z)) break;
    }
    res = std::abs(F.apply(c.point(z))[0] - target);
    if (!(res <= 1e-10) || !(std::abs(z) <= 1.0))
        throw std::runtime_error("pull_parameter: Newton failed for target (" + std::to_string(target.real()) + ", " +
                                 std::to_string(target.imag()) + ")");
    return z;
}

StepResult step(const Automorphism3& F, const UUCurve& c, const ModelConfig& cfg) {
    double top = 0.0;
    for (int m = 0; m < UUCurve::samples; ++m) top = std::max(top, std::abs(c.at3(UUCurve::root(m))));
    if (!(top <= 0.5 + 1e-9)) throw std::invalid_argument("step: curve leaves D^2 x D(0,1/2)");
    StepResult r;
    CoverChoice ch = covering_select(c.at3(0.0));
    r.j = ch.j;
    r.tau = ch.tau;

    auto branches = default_branches(cfg);
    Vec3 wit = c.point(branch_center(r.j));
    auto mem = branch_membership(F, branches, wit);
    if (!mem || mem->j != r.j || mem->cls != BoundaryClass::interior)
        throw std::runtime_error("step: curve point over z_j is not interior to R^j");

    std::vector<cplx> s2(UUCurve::samples), s3(UUCurve::samples);
    r.preimages.resize(UUCurve::samples);
    for (int m = 0; m < UUCurve::samples; ++m) {
        cplx z = pull_parameter(F, c, r.j, UUCurve::root(m));
        Vec3 y = F.apply(c.point(z));
        r.preimages[m] = z;
        s2[m] = y[1];
        s3[m] = y[2];
    }
    r.next = UUCurve::from_samples(std::move(s2), std::move(s3));
    if (!uu_validate(r.next)) throw std::runtime_error("step: image curve violates the C_uu cone or range condition");
    double top3 = 0.0;
    for (cplx v : r.next.s3) top3 = std::max(top3, std::abs(v));
    if (!(top3 <= 0.5)) throw std::runtime_error("step: image curve leaves D^2 x D(0,1/2)");
    return r;
}

UUCurve random_uu_curve(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in_disk = [&](double r) { return std::polar(r * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)); };
    auto cubic = [&](cplx level) {
        // sum k |a_k| <= 6e-4, so the two slopes together stay below 1e-3.
        std::array<cplx, 4> a{level, in_disk(1.0), in_disk(1.0), in_disk(1.0)};
        double s = std::abs(a[1]) + 2 * std::abs(a[2]) + 3 * std::abs(a[3]);
        double scale = 6e-4 * u(rng) / s;
        for (int k = 1; k < 4; ++k) a[k] *= scale;
        return a;
    };
    auto a2 = cubic(in_disk(0.9)), a3 = cubic(in_disk(0.45));
    auto ev = [](const std::array<cplx, 4>& a, cplx z) { return a[0] + z * (a[1] + z * (a[2] + z * a[3])); };
    return UUCurve::from_functions([&](cplx z) { return ev(a2, z); }, [&](cplx z) { return ev(a3, z); });
}

BlenderTrace intersect_stable(const Automorphism3& F, const UUCurve& c, int n_max, double tol,
                              const ModelConfig& cfg) {
    BlenderTrace tr;
    tr.curves.push_back(c);
    // Parameters on the first curve of a ring of points of the current piece.
    const int ring = 64;
    auto to_first = [&](cplx z) {
        for (std::size_t i = tr.itinerary.size(); i-- > 0;) z = pull_parameter(F, tr.curves[i], tr.itinerary[i], z);
        return z;
    };
    for (int n = 0; n < n_max; ++n) {
        StepResult s;
        try {
            s = step(F, tr.curves.back(), cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("intersect_stable: step ") + std::to_string(n) + " failed: " + e.what());
        }
        tr.itinerary.push_back(s.j);
        tr.curves.push_back(std::move(s.next));
        std::vector<Vec3> pts;
        for (int m = 0; m < ring; ++m) pts.push_back(c.point(to_first(std::polar(1.0, 2 * std::numbers::pi * m / ring))));
        double d = 0.0;
        for (const Vec3& a : pts)
            for (const Vec3& b : pts) d = std::max(d, norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]}));
        tr.t_diameters.push_back(d);
        if (d <= tol) break;
    }
    if (tr.t_diameters.empty() || tr.t_diameters.back() > tol)
        throw std::runtime_error("intersect_stable: piece diameter above tolerance after n_max steps");
    tr.parameter = to_first(0.0);
    tr.point = c.point(tr.parameter);
    auto branches = default_branches(cfg);
    Vec3 x = tr.point;
    for (std::size_t k = 0; k < tr.itinerary.size(); ++k) {
        auto mem = branch_membership(F, branches, x);
        if (!mem || mem->j != tr.itinerary[k])
            throw std::runtime_error("intersect_stable: orbit of the returned point leaves the itinerary at step " +
                                     std::to_string(k));
        x = F.apply(x);
    }
    tr.orbit_check_depth = static_cast<int>(tr.itinerary.size());
    return tr;
}

}  // namespace hc
