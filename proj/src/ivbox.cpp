#include "hcycle/ivbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -inf); }
double up(double x) { return std::nextafter(x, inf); }

Interval outward(double lo, double hi) {
    Interval r;
    r.lo = down(lo);
    r.hi = up(hi);
    return r;
}

}  // namespace

Interval::Interval(double a, double b) : lo(a), hi(b) {
    if (!(a <= b)) throw std::invalid_argument("interval with lo > hi");
}

double Interval::mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

double Interval::mig() const {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::fabs(lo), std::fabs(hi));
}

bool Interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

Interval operator+(const Interval& a, const Interval& b) { return outward(a.lo + b.lo, a.hi + b.hi); }
Interval operator-(const Interval& a, const Interval& b) { return outward(a.lo - b.hi, a.hi - b.lo); }

Interval operator-(const Interval& a) {
    Interval r;
    r.lo = -a.hi;
    r.hi = -a.lo;
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    for (double& x : p)
        if (std::isnan(x)) x = 0.0;  // 0 * inf
    return outward(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) throw EnclosureError("interval division by a range containing 0");
    double p[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    return outward(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Interval sqr(const Interval& a) {
    double m = a.mig(), M = a.mag();
    Interval r = outward(m * m, M * M);
    r.lo = std::max(r.lo, 0.0);
    return r;
}

Interval sqrt(const Interval& a) {
    if (a.hi < 0.0) throw EnclosureError("sqrt of negative interval");
    Interval r = outward(std::sqrt(std::max(a.lo, 0.0)), std::sqrt(a.hi));
    r.lo = std::max(r.lo, 0.0);
    return r;
}

Interval hull(const Interval& a, const Interval& b) {
    Interval r;
    r.lo = std::min(a.lo, b.lo);
    r.hi = std::max(a.hi, b.hi);
    return r;
}

Interval inflate(const Interval& a, double r) { return outward(a.lo - r, a.hi + r); }

CBox CBox::disk_hull(cplx c, double r) {
    return {outward(c.real() - r, c.real() + r), outward(c.imag() - r, c.imag() + r)};
}

Interval CBox::abs2() const { return sqr(re) + sqr(im); }
Interval CBox::abs() const { return sqrt(abs2()); }

double CBox::max_dist(cplx c) const { return (*this - CBox(c)).abs().hi; }
double CBox::min_dist(cplx c) const { return (*this - CBox(c)).abs().lo; }

CBox operator+(const CBox& a, const CBox& b) { return {a.re + b.re, a.im + b.im}; }
CBox operator-(const CBox& a, const CBox& b) { return {a.re - b.re, a.im - b.im}; }
CBox operator-(const CBox& a) { return {-a.re, -a.im}; }

CBox operator*(const CBox& a, const CBox& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CBox operator/(const CBox& a, const CBox& b) {
    Interval d = b.abs2();
    CBox num = a * CBox(b.re, -b.im);
    return {num.re / d, num.im / d};
}

CBox hull(const CBox& a, const CBox& b) { return {hull(a.re, b.re), hull(a.im, b.im)}; }
CBox inflate(const CBox& a, double r) { return {inflate(a.re, r), inflate(a.im, r)}; }

bool Box3::contains(const Vec3& x) const {
    return z.contains(x[0]) && w.contains(x[1]) && t.contains(x[2]);
}

std::pair<Box3, Box3> Box3::bisect() const {
    int best = 0;
    double wmax = -1.0;
    for (int k = 0; k < 6; ++k) {
        const CBox& c = (*this)[k / 2];
        double wd = (k % 2 == 0) ? c.re.width() : c.im.width();
        if (wd > wmax) {
            wmax = wd;
            best = k;
        }
    }
    Box3 a = *this, b = *this;
    Interval& ia = (best % 2 == 0) ? a[best / 2].re : a[best / 2].im;
    Interval& ib = (best % 2 == 0) ? b[best / 2].re : b[best / 2].im;
    double m = ia.mid();
    ia.hi = m;
    ib.lo = m;
    return {a, b};
}

MatrixEnclosure::MatrixEnclosure() { a.fill(CBox(cplx(0.0))); }

MatrixEnclosure::MatrixEnclosure(const Mat3& m) {
    for (int k = 0; k < 9; ++k) a[k] = CBox(m[k]);
}

MatrixEnclosure MatrixEnclosure::identity() {
    MatrixEnclosure r;
    for (int i = 0; i < 3; ++i) r(i, i) = CBox(cplx(1.0));
    return r;
}

bool MatrixEnclosure::contains(const Mat3& m) const {
    for (int k = 0; k < 9; ++k)
        if (!a[k].contains(m[k])) return false;
    return true;
}

Mat3 MatrixEnclosure::mid() const {
    Mat3 m;
    for (int k = 0; k < 9; ++k) m[k] = a[k].mid();
    return m;
}

MatrixEnclosure operator*(const MatrixEnclosure& x, const MatrixEnclosure& y) {
    MatrixEnclosure r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CBox s = x(i, 0) * y(0, j);
            s = s + x(i, 1) * y(1, j);
            s = s + x(i, 2) * y(2, j);
            r(i, j) = s;
        }
    return r;
}

VBox operator*(const MatrixEnclosure& m, const VBox& v) {
    VBox r;
    for (int i = 0; i < 3; ++i) r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return r;
}

const char* cone_name(ConeKind k) {
    switch (k) {
        case ConeKind::chi_u: return "chi_u";
        case ConeKind::chi_s: return "chi_s";
        case ConeKind::C_u: return "C_u";
        case ConeKind::C_s: return "C_s";
        case ConeKind::C_uu: return "C_uu";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::yes: return "true";
        case Verdict::no: return "false";
        case Verdict::unknown: return "unknown";
    }
    return "?";
}

double norm(const Vec3& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2])); }

Vec3 mul(const Mat3& m, const Vec3& v) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = m[3 * i] * v[0] + m[3 * i + 1] * v[1] + m[3 * i + 2] * v[2];
    return r;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    return r;
}

namespace {

// lhs <= ratio * rhs is the defining inequality of the cone (b_weight aside).
template <class V, class N>
auto cone_sides(ConeKind k, const V& v, N nrm) {
    switch (k) {
        case ConeKind::chi_u: return std::make_pair(nrm(v[1]), nrm(v[0]));
        case ConeKind::chi_s: return std::make_pair(nrm(v[0]), nrm(v[1]));
        case ConeKind::C_u: return std::make_pair(nrm(v[1]), nrm(v[0], v[2]));
        case ConeKind::C_s: return std::make_pair(nrm(v[0], v[2]), nrm(v[1]));
        case ConeKind::C_uu: return std::make_pair(nrm(v[1], v[2]), nrm(v[0]));
    }
    return std::make_pair(nrm(v[0]), nrm(v[0]));
}

struct PointNorm {
    double operator()(cplx x) const { return std::abs(x); }
    double operator()(cplx x, cplx y) const { return std::sqrt(std::norm(x) + std::norm(y)); }
};

struct BoxNorm {
    Interval operator()(const CBox& x) const { return x.abs(); }
    Interval operator()(const CBox& x, const CBox& y) const { return sqrt(x.abs2() + y.abs2()); }
};

std::pair<Interval, Interval> box_sides(const ConeSpec& c, const VBox& v) {
    auto s = cone_sides(c.kind, v, BoxNorm{});
    Interval scale = Interval(c.ratio) * Interval(c.kind == ConeKind::C_s ? c.b_weight : 1.0);
    return {s.first, scale * s.second};
}

Interval box_norm(const VBox& v) { return sqrt(v[0].abs2() + v[1].abs2() + v[2].abs2()); }

// A normalised piece of the cone: coordinate `fixed` equals 1, free
// coordinates range over disks of the given radii (negative radius = absent).
struct Chart {
    int fixed;
    std::array<double, 3> rad;
};

std::vector<Chart> charts_of(const ConeSpec& c) {
    double a = c.ratio;
    switch (c.kind) {
        case ConeKind::chi_u: return {{0, {0.0, a, -1.0}}};
        case ConeKind::chi_s: return {{1, {a, 0.0, -1.0}}};
        case ConeKind::C_uu: return {{0, {0.0, a, a}}};
        case ConeKind::C_s: return {{1, {a * c.b_weight, 0.0, a * c.b_weight}}};
        case ConeKind::C_u:
            return {{0, {0.0, a * std::sqrt(2.0), 1.0}}, {2, {1.0, a * std::sqrt(2.0), 0.0}}};
    }
    return {};
}

struct Certifier {
    const MatrixEnclosure& M;
    Mat3 Mmid;
    ConeSpec cin, cout;
    double factor;
    int max_splits;
    long nodes = 0;
    static constexpr long node_budget = 200000;

    bool outside_input(const Chart& ch, const VBox& v) const {
        for (int i = 0; i < 3; ++i)
            if (i != ch.fixed && ch.rad[i] >= 0.0 && v[i].abs().lo > ch.rad[i]) return true;
        auto s = box_sides(cin, v);
        return s.first.lo > s.second.hi;
    }

    bool sample_violates(const VBox& v) const {
        Vec3 x{v[0].mid(), v[1].mid(), v[2].mid()};
        if (norm(x) == 0.0 || !cone_member(x, cin)) return false;
        Vec3 y = mul(Mmid, x);
        if (norm(y) < factor * norm(x)) return true;
        if (norm(y) == 0.0) return true;
        auto s = cone_sides(cout.kind, y, PointNorm{});
        double rhs = cout.ratio * (cout.kind == ConeKind::C_s ? cout.b_weight : 1.0) * s.second;
        return s.first > rhs;
    }

    Verdict run(const Chart& ch, const VBox& v, int depth) {
        ++nodes;
        if (outside_input(ch, v)) return Verdict::yes;
        VBox w = M * v;
        bool ok = false;
        if (w[0].finite() && w[1].finite() && w[2].finite()) {
            auto s = box_sides(cout, w);
            Interval nw = box_norm(w), nv = box_norm(v);
            ok = s.first.hi < s.second.lo && nw.lo >= (Interval(factor) * nv).hi;
        }
        if (ok) return Verdict::yes;
        if (sample_violates(v)) return Verdict::no;
        if (depth >= max_splits || nodes > node_budget) return Verdict::unknown;

        int best = -1;
        bool best_re = true;
        double wmax = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (i == ch.fixed || ch.rad[i] <= 0.0) continue;
            if (v[i].re.width() > wmax) wmax = v[i].re.width(), best = i, best_re = true;
            if (v[i].im.width() > wmax) wmax = v[i].im.width(), best = i, best_re = false;
        }
        if (best < 0) return Verdict::unknown;
        VBox a = v, b = v;
        Interval& ia = best_re ? a[best].re : a[best].im;
        Interval& ib = best_re ? b[best].re : b[best].im;
        double m = ia.mid();
        ia.hi = m;
        ib.lo = m;
        Verdict ra = run(ch, a, depth + 1);
        if (ra == Verdict::no) return ra;
        Verdict rb = run(ch, b, depth + 1);
        if (rb == Verdict::no) return rb;
        return (ra == Verdict::yes && rb == Verdict::yes) ? Verdict::yes : Verdict::unknown;
    }
};

}  // namespace

bool cone_member(const Vec3& v, const ConeSpec& c) {
    if (norm(v) == 0.0) throw std::invalid_argument("cone membership of the zero vector");
    auto s = cone_sides(c.kind, v, PointNorm{});
    double rhs = c.ratio * (c.kind == ConeKind::C_s ? c.b_weight : 1.0) * s.second;
    return s.first <= rhs;
}

Verdict cone_map_certify(const MatrixEnclosure& M, const ConeSpec& c_in, const ConeSpec& c_out,
                         double factor, int max_splits) {
    if (!(factor > 0.0)) throw std::invalid_argument("factor must be positive");
    Certifier cert{M, M.mid(), c_in, c_out, factor, max_splits};
    Verdict total = Verdict::yes;
    for (const Chart& ch : charts_of(c_in)) {
        VBox v;
        for (int i = 0; i < 3; ++i) {
            if (i == ch.fixed)
                v[i] = CBox(cplx(1.0));
            else if (ch.rad[i] < 0.0)
                v[i] = CBox(cplx(0.0));
            else
                v[i] = CBox::disk_hull(0.0, ch.rad[i]);
        }
        Verdict r = cert.run(ch, v, 0);
        if (r == Verdict::no) return r;
        if (r == Verdict::unknown) total = r;
    }
    return total;
}

CBox eval_poly_box(std::span<const cplx> coeffs, cplx center, const CBox& x) {
    if (coeffs.empty()) return CBox(cplx(0.0));
    CBox h = x - CBox(center);
    CBox r(coeffs.back());
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) r = r * h + CBox(coeffs[k]);
    if (!r.finite()) throw EnclosureError("polynomial enclosure overflow");
    return r;
}

CBox eval_poly_disk(std::span<const cplx> coeffs, cplx center, const CBox& x) {
    if (coeffs.empty()) return CBox(cplx(0.0));
    constexpr double u = 0x1p-53;
    auto up_abs = [](cplx z) { return std::abs(z) * (1.0 + 4 * u); };
    // Disk containing x - center.
    CBox hb = x - CBox(center);
    cplx hc = hb.mid();
    double hr = std::max({up_abs(cplx(hb.re.hi, hb.im.hi) - hc), up_abs(cplx(hb.re.lo, hb.im.hi) - hc),
                          up_abs(cplx(hb.re.hi, hb.im.lo) - hc), up_abs(cplx(hb.re.lo, hb.im.lo) - hc)}) *
                (1.0 + 4 * u);
    double ha = up_abs(hc);
    cplx rc = coeffs.back();
    double rr = 0.0;
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
        double ra = up_abs(rc);
        cplx p = rc * hc;
        double pa = up_abs(p);
        cplx s = p + coeffs[k];
        double rad = ra * hr + rr * ha + rr * hr + 8 * u * ra * ha + 2 * u * (pa + up_abs(coeffs[k]));
        rc = s;
        rr = rad * (1.0 + 8 * u) + 1e-300;
    }
    CBox r = inflate(CBox(rc), rr);
    if (!r.finite()) throw EnclosureError("polynomial enclosure overflow");
    return r;
}

}  // namespace hc
