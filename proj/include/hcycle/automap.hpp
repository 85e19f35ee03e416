#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hcycle/config.hpp"
#include "hcycle/ivbox.hpp"
#include "hcycle/poly.hpp"

namespace hc {

// Polynomial in two variables (u, v), kept as a sum of separable terms
// coef * x(u) * y(v) so that high degree bump factors stay well conditioned.
class Poly2 {
public:
    struct Term {
        cplx coef;
        Poly1 x;
        Poly1 y;
    };

    Poly2() = default;
    // grid[i][j] multiplies u^i v^j.
    static Poly2 from_grid(const std::vector<std::vector<cplx>>& grid);
    static Poly2 in_u(const Poly1& f, cplx scale = 1.0);
    static Poly2 in_v(const Poly1& f, cplx scale = 1.0);
    Poly2& add(cplx coef, const Poly1& x, const Poly1& y);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;

    cplx eval(cplx u, cplx v) const;
    cplx du(cplx u, cplx v) const;
    cplx dv(cplx u, cplx v) const;
    CBox eval_box(const CBox& u, const CBox& v) const;
    CBox du_box(const CBox& u, const CBox& v) const;
    CBox dv_box(const CBox& u, const CBox& v) const;

private:
    std::vector<Term> terms_;
};

struct HenonSkew {
    Poly1 p, q;
    cplx b;
    double lambda;

    HenonSkew(Poly1 p, Poly1 q, cplx b, double lambda);
};

// z += P(w, t)
struct ShearZ {
    Poly2 P;
};
// w += P(z, t)
struct ShearW {
    Poly2 P;
};
// t += P(z, w)
struct ShearT {
    Poly2 P;
};

using Generator = std::variant<HenonSkew, ShearZ, ShearW, ShearT>;

std::string generator_tag(const Generator& g);

// Composition of generators; gens[0] is applied first.
struct Automorphism3 {
    std::vector<Generator> gens;
    std::string label;

    Vec3 apply(const Vec3& x) const;
    Vec3 apply_inv(const Vec3& x) const;
    Mat3 jacobian(const Vec3& x) const;
    Mat3 jacobian_inv(const Vec3& x) const;
    Box3 apply_box(const Box3& X) const;
    Box3 apply_inv_box(const Box3& X) const;
    MatrixEnclosure jacobian_box(const Box3& X) const;
    MatrixEnclosure jacobian_inv_box(const Box3& X) const;

    // (*this) after g.
    Automorphism3 after(const Automorphism3& g) const;
    Automorphism3 then(const Generator& g) const;
    const HenonSkew& skew() const;  // the first generator, which must be a HenonSkew
};

Vec3 apply(const Generator& g, const Vec3& x);
Vec3 apply_inv(const Generator& g, const Vec3& x);
Mat3 jacobian(const Generator& g, const Vec3& x);

Automorphism3 build_F1(const Poly1& p, const Poly1& q, const ModelConfig& cfg);

// Orbit of x under F; points[k] = F^k(x).
std::vector<Vec3> orbit(const Automorphism3& F, const Vec3& x, int n);

struct BranchSpec {
    int j = 0;
    cplx z_center;
    double selection_radius = 3e-4;
};

std::vector<BranchSpec> default_branches(const ModelConfig& cfg);

enum class BoundaryClass { interior, dz, dw, dt, outside };

const char* boundary_name(BoundaryClass c);

struct Membership {
    int j;
    BoundaryClass cls;
};

std::optional<Membership> branch_membership(const Automorphism3& F, const std::vector<BranchSpec>& branches,
                                            const Vec3& x, double band = 1e-9);

struct DegreeReport {
    long long bound = 0;  // product-rule upper bound
    long long value = 0;  // tracked degree
    bool exact = false;   // no leading-term cancellation was possible
    bool overflow = false;
};

DegreeReport degree_of(const Automorphism3& F);

}  // namespace hc
