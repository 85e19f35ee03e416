#include "hcycle/automap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcycle/rungefit.hpp"

namespace hc {

namespace {

Poly1 monomial(int k) {
    std::vector<cplx> c(k + 1, 0.0);
    c[k] = 1.0;
    return Poly1(c);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Mat3 identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

}  // namespace

Poly2 Poly2::from_grid(const std::vector<std::vector<cplx>>& grid) {
    Poly2 P;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid[i].size(); ++j)
            if (grid[i][j] != cplx(0.0)) P.add(grid[i][j], monomial(int(i)), monomial(int(j)));
    return P;
}

Poly2 Poly2::in_u(const Poly1& f, cplx scale) {
    Poly2 P;
    if (scale != cplx(0.0) && !f.is_zero()) P.add(scale, f, Poly1::constant(1.0));
    return P;
}

Poly2 Poly2::in_v(const Poly1& f, cplx scale) {
    Poly2 P;
    if (scale != cplx(0.0) && !f.is_zero()) P.add(scale, Poly1::constant(1.0), f);
    return P;
}

Poly2& Poly2::add(cplx coef, const Poly1& x, const Poly1& y) {
    terms_.push_back({coef, x, y});
    return *this;
}

int Poly2::degree() const {
    int d = -1;
    for (const Term& t : terms_)
        if (t.coef != cplx(0.0) && !t.x.is_zero() && !t.y.is_zero()) d = std::max(d, t.x.degree() + t.y.degree());
    return d;
}

cplx Poly2::eval(cplx u, cplx v) const {
    cplx s = 0.0;
    for (const Term& t : terms_) s += t.coef * t.x(u) * t.y(v);
    return s;
}

cplx Poly2::du(cplx u, cplx v) const {
    cplx s = 0.0;
    for (const Term& t : terms_) s += t.coef * t.x.deriv(u) * t.y(v);
    return s;
}

cplx Poly2::dv(cplx u, cplx v) const {
    cplx s = 0.0;
    for (const Term& t : terms_) s += t.coef * t.x(u) * t.y.deriv(v);
    return s;
}

CBox Poly2::eval_box(const CBox& u, const CBox& v) const {
    CBox s(cplx(0.0));
    for (const Term& t : terms_) s = s + CBox(t.coef) * t.x.eval_box(u) * t.y.eval_box(v);
    return s;
}

CBox Poly2::du_box(const CBox& u, const CBox& v) const {
    CBox s(cplx(0.0));
    for (const Term& t : terms_) s = s + CBox(t.coef) * t.x.deriv_box(u) * t.y.eval_box(v);
    return s;
}

CBox Poly2::dv_box(const CBox& u, const CBox& v) const {
    CBox s(cplx(0.0));
    for (const Term& t : terms_) s = s + CBox(t.coef) * t.x.eval_box(u) * t.y.deriv_box(v);
    return s;
}

HenonSkew::HenonSkew(Poly1 p_, Poly1 q_, cplx b_, double lambda_)
    : p(std::move(p_)), q(std::move(q_)), b(b_), lambda(lambda_) {
    if (b == cplx(0.0)) throw std::invalid_argument("HenonSkew needs b != 0");
    if (lambda == 0.0) throw std::invalid_argument("HenonSkew needs lambda != 0");
}

std::string generator_tag(const Generator& g) {
    return std::visit(overloaded{[](const HenonSkew&) { return std::string("HenonSkew"); },
                                 [](const ShearZ&) { return std::string("ShearZ"); },
                                 [](const ShearW&) { return std::string("ShearW"); },
                                 [](const ShearT&) { return std::string("ShearT"); }},
                      g);
}

Vec3 apply(const Generator& g, const Vec3& x) {
    const auto [z, w, t] = x;
    return std::visit(overloaded{[&](const HenonSkew& h) -> Vec3 {
                                     return {h.p(z) + h.b * w, z, h.lambda * t + h.q(z)};
                                 },
                                 [&](const ShearZ& s) -> Vec3 { return {z + s.P.eval(w, t), w, t}; },
                                 [&](const ShearW& s) -> Vec3 { return {z, w + s.P.eval(z, t), t}; },
                                 [&](const ShearT& s) -> Vec3 { return {z, w, t + s.P.eval(z, w)}; }},
                      g);
}

Vec3 apply_inv(const Generator& g, const Vec3& x) {
    const auto [z, w, t] = x;
    return std::visit(overloaded{[&](const HenonSkew& h) -> Vec3 {
                                     return {w, (z - h.p(w)) / h.b, (t - h.q(w)) / h.lambda};
                                 },
                                 [&](const ShearZ& s) -> Vec3 { return {z - s.P.eval(w, t), w, t}; },
                                 [&](const ShearW& s) -> Vec3 { return {z, w - s.P.eval(z, t), t}; },
                                 [&](const ShearT& s) -> Vec3 { return {z, w, t - s.P.eval(z, w)}; }},
                      g);
}

Mat3 jacobian(const Generator& g, const Vec3& x) {
    const auto [z, w, t] = x;
    return std::visit(overloaded{[&](const HenonSkew& h) -> Mat3 {
                                     return {h.p.deriv(z), h.b, 0, 1, 0, 0, h.q.deriv(z), 0, h.lambda};
                                 },
                                 [&](const ShearZ& s) -> Mat3 {
                                     return {1, s.P.du(w, t), s.P.dv(w, t), 0, 1, 0, 0, 0, 1};
                                 },
                                 [&](const ShearW& s) -> Mat3 {
                                     return {1, 0, 0, s.P.du(z, t), 1, s.P.dv(z, t), 0, 0, 1};
                                 },
                                 [&](const ShearT& s) -> Mat3 {
                                     return {1, 0, 0, 0, 1, 0, s.P.du(z, w), s.P.dv(z, w), 1};
                                 }},
                      g);
}

namespace {

// Jacobian of the inverse generator at the image point y.
Mat3 jacobian_inv(const Generator& g, const Vec3& y) {
    const auto [z, w, t] = y;
    return std::visit(overloaded{[&](const HenonSkew& h) -> Mat3 {
                                     return {0, 1, 0, 1.0 / h.b, -h.p.deriv(w) / h.b, 0,
                                             0, -h.q.deriv(w) / h.lambda, 1.0 / h.lambda};
                                 },
                                 [&](const ShearZ& s) -> Mat3 {
                                     return {1, -s.P.du(w, t), -s.P.dv(w, t), 0, 1, 0, 0, 0, 1};
                                 },
                                 [&](const ShearW& s) -> Mat3 {
                                     return {1, 0, 0, -s.P.du(z, t), 1, -s.P.dv(z, t), 0, 0, 1};
                                 },
                                 [&](const ShearT& s) -> Mat3 {
                                     return {1, 0, 0, 0, 1, 0, -s.P.du(z, w), -s.P.dv(z, w), 1};
                                 }},
                      g);
}

Box3 apply_box(const Generator& g, const Box3& X) {
    const CBox &z = X.z, &w = X.w, &t = X.t;
    return std::visit(
        overloaded{[&](const HenonSkew& h) -> Box3 {
                       return {h.p.eval_box(z) + CBox(h.b) * w, z, CBox(cplx(h.lambda)) * t + h.q.eval_box(z)};
                   },
                   [&](const ShearZ& s) -> Box3 { return {z + s.P.eval_box(w, t), w, t}; },
                   [&](const ShearW& s) -> Box3 { return {z, w + s.P.eval_box(z, t), t}; },
                   [&](const ShearT& s) -> Box3 { return {z, w, t + s.P.eval_box(z, w)}; }},
        g);
}

Box3 apply_inv_box(const Generator& g, const Box3& X) {
    const CBox &z = X.z, &w = X.w, &t = X.t;
    return std::visit(overloaded{[&](const HenonSkew& h) -> Box3 {
                                     return {w, (z - h.p.eval_box(w)) / CBox(h.b),
                                             (t - h.q.eval_box(w)) / CBox(cplx(h.lambda))};
                                 },
                                 [&](const ShearZ& s) -> Box3 { return {z - s.P.eval_box(w, t), w, t}; },
                                 [&](const ShearW& s) -> Box3 { return {z, w - s.P.eval_box(z, t), t}; },
                                 [&](const ShearT& s) -> Box3 { return {z, w, t - s.P.eval_box(z, w)}; }},
                      g);
}

MatrixEnclosure enc(std::initializer_list<CBox> e) {
    MatrixEnclosure m;
    int k = 0;
    for (const CBox& x : e) m.a[k++] = x;
    return m;
}

MatrixEnclosure jacobian_box(const Generator& g, const Box3& X) {
    const CBox &z = X.z, &w = X.w, &t = X.t;
    const CBox one(cplx(1.0)), zero(cplx(0.0));
    return std::visit(
        overloaded{[&](const HenonSkew& h) -> MatrixEnclosure {
                       return enc({h.p.deriv_box(z), CBox(h.b), zero, one, zero, zero, h.q.deriv_box(z), zero,
                                   CBox(cplx(h.lambda))});
                   },
                   [&](const ShearZ& s) -> MatrixEnclosure {
                       return enc({one, s.P.du_box(w, t), s.P.dv_box(w, t), zero, one, zero, zero, zero, one});
                   },
                   [&](const ShearW& s) -> MatrixEnclosure {
                       return enc({one, zero, zero, s.P.du_box(z, t), one, s.P.dv_box(z, t), zero, zero, one});
                   },
                   [&](const ShearT& s) -> MatrixEnclosure {
                       return enc({one, zero, zero, zero, one, zero, s.P.du_box(z, w), s.P.dv_box(z, w), one});
                   }},
        g);
}

MatrixEnclosure jacobian_inv_box(const Generator& g, const Box3& Y) {
    const CBox &z = Y.z, &w = Y.w, &t = Y.t;
    const CBox one(cplx(1.0)), zero(cplx(0.0));
    return std::visit(
        overloaded{[&](const HenonSkew& h) -> MatrixEnclosure {
                       CBox ib = one / CBox(h.b), il = one / CBox(cplx(h.lambda));
                       return enc({zero, one, zero, ib, -(h.p.deriv_box(w) * ib), zero, zero,
                                   -(h.q.deriv_box(w) * il), il});
                   },
                   [&](const ShearZ& s) -> MatrixEnclosure {
                       return enc({one, -s.P.du_box(w, t), -s.P.dv_box(w, t), zero, one, zero, zero, zero, one});
                   },
                   [&](const ShearW& s) -> MatrixEnclosure {
                       return enc({one, zero, zero, -s.P.du_box(z, t), one, -s.P.dv_box(z, t), zero, zero, one});
                   },
                   [&](const ShearT& s) -> MatrixEnclosure {
                       return enc({one, zero, zero, zero, one, zero, -s.P.du_box(z, w), -s.P.dv_box(z, w), one});
                   }},
        g);
}

}  // namespace

Vec3 Automorphism3::apply(const Vec3& x) const {
    Vec3 y = x;
    for (const Generator& g : gens) y = hc::apply(g, y);
    return y;
}

Vec3 Automorphism3::apply_inv(const Vec3& x) const {
    Vec3 y = x;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) y = hc::apply_inv(*it, y);
    return y;
}

Mat3 Automorphism3::jacobian(const Vec3& x) const {
    Mat3 J = identity3();
    Vec3 y = x;
    for (const Generator& g : gens) {
        J = mul(hc::jacobian(g, y), J);
        y = hc::apply(g, y);
    }
    return J;
}

Mat3 Automorphism3::jacobian_inv(const Vec3& x) const {
    Mat3 J = identity3();
    Vec3 y = x;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) {
        J = mul(hc::jacobian_inv(*it, y), J);
        y = hc::apply_inv(*it, y);
    }
    return J;
}

Box3 Automorphism3::apply_box(const Box3& X) const {
    Box3 Y = X;
    for (const Generator& g : gens) Y = hc::apply_box(g, Y);
    return Y;
}

Box3 Automorphism3::apply_inv_box(const Box3& X) const {
    Box3 Y = X;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) Y = hc::apply_inv_box(*it, Y);
    return Y;
}

MatrixEnclosure Automorphism3::jacobian_box(const Box3& X) const {
    MatrixEnclosure J = MatrixEnclosure::identity();
    Box3 Y = X;
    for (const Generator& g : gens) {
        J = hc::jacobian_box(g, Y) * J;
        Y = hc::apply_box(g, Y);
    }
    return J;
}

MatrixEnclosure Automorphism3::jacobian_inv_box(const Box3& X) const {
    MatrixEnclosure J = MatrixEnclosure::identity();
    Box3 Y = X;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) {
        J = hc::jacobian_inv_box(*it, Y) * J;
        Y = hc::apply_inv_box(*it, Y);
    }
    return J;
}

Automorphism3 Automorphism3::after(const Automorphism3& g) const {
    Automorphism3 r;
    r.gens = g.gens;
    r.gens.insert(r.gens.end(), gens.begin(), gens.end());
    r.label = label + "*" + g.label;
    return r;
}

Automorphism3 Automorphism3::then(const Generator& g) const {
    Automorphism3 r = *this;
    r.gens.push_back(g);
    return r;
}

const HenonSkew& Automorphism3::skew() const {
    if (gens.empty() || !std::holds_alternative<HenonSkew>(gens.front()))
        throw std::logic_error("automorphism does not start with a HenonSkew generator");
    return std::get<HenonSkew>(gens.front());
}

Automorphism3 build_F1(const Poly1& p, const Poly1& q, const ModelConfig& cfg) {
    if (p.is_zero() || q.is_zero()) throw std::invalid_argument("build_F1 needs fitted p and q");
    Automorphism3 F;
    F.gens.emplace_back(HenonSkew(p, q, cfg.b, cfg.lambda));
    F.label = "F1";
    return F;
}

std::vector<Vec3> orbit(const Automorphism3& F, const Vec3& x, int n) {
    std::vector<Vec3> pts{x};
    for (int k = 0; k < n; ++k) pts.push_back(F.apply(pts.back()));
    return pts;
}

std::vector<BranchSpec> default_branches(const ModelConfig& cfg) {
    std::vector<BranchSpec> b;
    for (int j = 0; j < 4; ++j) b.push_back({j, branch_center(j), 3.0 * cfg.eta});
    return b;
}

const char* boundary_name(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::interior: return "interior";
        case BoundaryClass::dz: return "d_z";
        case BoundaryClass::dw: return "d_w";
        case BoundaryClass::dt: return "d_t";
        case BoundaryClass::outside: return "outside";
    }
    return "?";
}

std::optional<Membership> branch_membership(const Automorphism3& F, const std::vector<BranchSpec>& branches,
                                            const Vec3& x, double band) {
    const BranchSpec* hit = nullptr;
    for (const BranchSpec& b : branches)
        if (std::abs(x[0] - b.z_center) <= b.selection_radius) hit = &b;
    if (!hit) return std::nullopt;
    Vec3 y = F.apply(x);
    for (int i = 0; i < 3; ++i)
        if (std::abs(x[i]) > 1 + band || std::abs(y[i]) > 1 + band) return Membership{hit->j, BoundaryClass::outside};
    auto on_circle = [band](cplx v) { return std::abs(std::abs(v) - 1.0) <= band; };
    BoundaryClass c = BoundaryClass::interior;
    if (on_circle(y[0]))
        c = BoundaryClass::dz;
    else if (on_circle(x[1]))
        c = BoundaryClass::dw;
    else if (on_circle(y[2]))
        c = BoundaryClass::dt;
    return Membership{hit->j, c};
}

namespace {

using i128 = __int128;
constexpr i128 cap = i128(std::numeric_limits<long long>::max());

struct Tracker {
    std::array<i128, 3> d{1, 1, 1};
    bool exact = true;
    bool overflow = false;

    i128 clamp(i128 v) {
        if (v > cap) {
            overflow = true;
            return cap;
        }
        return v;
    }
    // Degree of a sum of pieces; equal top degrees may cancel.
    i128 sum(std::initializer_list<i128> parts) {
        i128 best = -1;
        int count = 0;
        for (i128 v : parts) {
            if (v < 0) continue;
            if (v > best) best = v, count = 1;
            else if (v == best) ++count;
        }
        if (count > 1 && best > 0) exact = false;
        return best;
    }
    i128 payload(const Poly2& P, i128 du, i128 dv) {
        i128 best = -1;
        int count = 0;
        for (const auto& t : P.terms()) {
            if (t.coef == cplx(0.0) || t.x.is_zero() || t.y.is_zero()) continue;
            i128 v = clamp(i128(t.x.degree()) * du + i128(t.y.degree()) * dv);
            if (v > best) best = v, count = 1;
            else if (v == best) ++count;
        }
        if (count > 1 && best > 0) exact = false;
        return best;
    }
};

}  // namespace

DegreeReport degree_of(const Automorphism3& F) {
    Tracker tr;
    long double bound = 1.0L;
    for (const Generator& g : F.gens) {
        auto& d = tr.d;
        std::visit(overloaded{[&](const HenonSkew& h) {
                                  i128 pz = h.p.degree() >= 0 ? tr.clamp(i128(h.p.degree()) * d[0]) : -1;
                                  i128 qz = h.q.degree() >= 0 ? tr.clamp(i128(h.q.degree()) * d[0]) : -1;
                                  std::array<i128, 3> n{tr.sum({pz, d[1]}), d[0], tr.sum({d[2], qz})};
                                  d = n;
                                  bound *= std::max({h.p.degree(), h.q.degree(), 1});
                              },
                              [&](const ShearZ& s) {
                                  d[0] = tr.sum({d[0], tr.payload(s.P, d[1], d[2])});
                                  bound *= std::max(1, s.P.degree());
                              },
                              [&](const ShearW& s) {
                                  d[1] = tr.sum({d[1], tr.payload(s.P, d[0], d[2])});
                                  bound *= std::max(1, s.P.degree());
                              },
                              [&](const ShearT& s) {
                                  d[2] = tr.sum({d[2], tr.payload(s.P, d[0], d[1])});
                                  bound *= std::max(1, s.P.degree());
                              }},
                   g);
    }
    DegreeReport r;
    i128 v = std::max({tr.d[0], tr.d[1], tr.d[2]});
    r.value = (long long)std::min(v, cap);
    r.overflow = tr.overflow || bound > (long double)cap;
    r.bound = bound > (long double)cap ? (long long)cap : (long long)bound;
    r.exact = tr.exact && !r.overflow;
    return r;
}

}  // namespace hc
