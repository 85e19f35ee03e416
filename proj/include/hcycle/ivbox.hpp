#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>

namespace hc {

using cplx = std::complex<double>;
using Vec3 = std::array<cplx, 3>;
using Mat3 = std::array<cplx, 9>;  // row major

// Raised when an enclosure leaves the representable range or a chart.
struct EnclosureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed real interval; every operation rounds outward by one ulp.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double x) : lo(x), hi(x) {}
    Interval(double a, double b);

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    double mag() const;  // max |x|
    double mig() const;  // min |x|
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool finite() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
Interval inflate(const Interval& a, double r);

struct CBox {
    Interval re;
    Interval im;

    CBox() = default;
    CBox(cplx z) : re(z.real()), im(z.imag()) {}
    CBox(Interval r, Interval i) : re(r), im(i) {}
    static CBox disk_hull(cplx c, double r);

    cplx mid() const { return {re.mid(), im.mid()}; }
    double diam() const { return std::max(re.width(), im.width()); }
    bool contains(cplx z) const { return re.contains(z.real()) && im.contains(z.imag()); }
    bool contains(const CBox& o) const { return re.contains(o.re) && im.contains(o.im); }
    bool finite() const { return re.finite() && im.finite(); }
    Interval abs() const;
    Interval abs2() const;
    // Upper bound on |z - c| over the box.
    double max_dist(cplx c) const;
    double min_dist(cplx c) const;
};

CBox operator+(const CBox& a, const CBox& b);
CBox operator-(const CBox& a, const CBox& b);
CBox operator-(const CBox& a);
CBox operator*(const CBox& a, const CBox& b);
CBox operator/(const CBox& a, const CBox& b);
CBox hull(const CBox& a, const CBox& b);
CBox inflate(const CBox& a, double r);

struct Box3 {
    CBox z, w, t;

    const CBox& operator[](int i) const { return i == 0 ? z : (i == 1 ? w : t); }
    CBox& operator[](int i) { return i == 0 ? z : (i == 1 ? w : t); }
    bool contains(const Vec3& x) const;
    Vec3 mid() const { return {z.mid(), w.mid(), t.mid()}; }
    // Halves the widest of the six real intervals.
    std::pair<Box3, Box3> bisect() const;
};

using VBox = std::array<CBox, 3>;

struct MatrixEnclosure {
    std::array<CBox, 9> a;

    MatrixEnclosure();
    explicit MatrixEnclosure(const Mat3& m);
    static MatrixEnclosure identity();
    CBox& operator()(int i, int j) { return a[3 * i + j]; }
    const CBox& operator()(int i, int j) const { return a[3 * i + j]; }
    bool contains(const Mat3& m) const;
    Mat3 mid() const;
};

MatrixEnclosure operator*(const MatrixEnclosure& a, const MatrixEnclosure& b);
VBox operator*(const MatrixEnclosure& a, const VBox& v);

enum class ConeKind { chi_u, chi_s, C_u, C_s, C_uu };

struct ConeSpec {
    ConeKind kind = ConeKind::C_uu;
    double ratio = 1e-3;
    double b_weight = 1.0;
};

const char* cone_name(ConeKind k);

bool cone_member(const Vec3& v, const ConeSpec& c);

enum class Verdict { yes, no, unknown };

const char* verdict_name(Verdict v);

// Every point matrix of M maps every nonzero v in c_in into int(c_out)
// with |Mv| >= factor |v|.
Verdict cone_map_certify(const MatrixEnclosure& M, const ConeSpec& c_in, const ConeSpec& c_out,
                         double factor, int max_splits = 32);

// Horner enclosure of sum coeffs[k] (x - center)^k in rectangular arithmetic.
CBox eval_poly_box(std::span<const cplx> coeffs, cplx center, const CBox& x);

// Same enclosure computed in circular arithmetic, which does not inflate
// under rotation; preferred for long Horner chains.
CBox eval_poly_disk(std::span<const cplx> coeffs, cplx center, const CBox& x);

double norm(const Vec3& v);
Vec3 mul(const Mat3& m, const Vec3& v);
Mat3 mul(const Mat3& a, const Mat3& b);

}  // namespace hc
