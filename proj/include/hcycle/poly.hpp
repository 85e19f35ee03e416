#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "hcycle/ivbox.hpp"

namespace hc {

struct ExactCoeffs;

// Re-centred Taylor expansion of a polynomial on a disk, rounded to double.
// `err` bounds the rounding of the coefficients times radius^k, summed.
struct Chart {
    cplx center;
    double radius = 0.0;
    std::vector<cplx> t;
    double err = 0.0;
    std::vector<cplx> dt;  // derivative
    double derr = 0.0;

    bool covers(cplx z) const { return std::abs(z - center) <= radius; }
    bool covers(const CBox& x) const { return x.max_dist(center) <= radius; }
};

// Complex polynomial in one variable.
//
// A plain polynomial keeps its double coefficients and is evaluated directly.
// An exact polynomial keeps high precision monomial coefficients (needed once
// coefficients reach 1e20 and beyond) and evaluates through charts, falling
// back to multiprecision Horner away from them.
class Poly1 {
public:
    Poly1() = default;
    explicit Poly1(std::vector<cplx> coeffs);
    static Poly1 constant(cplx c) { return Poly1(std::vector<cplx>{c}); }
    static Poly1 affine(cplx a0, cplx a1) { return Poly1(std::vector<cplx>{a0, a1}); }

    int degree() const;
    bool is_zero() const { return c_.empty(); }
    bool exact() const { return exact_ != nullptr; }
    // Monomial coefficients rounded to double.
    const std::vector<cplx>& coeffs() const { return c_; }
    const std::vector<Chart>& charts() const { return charts_; }

    cplx operator()(cplx z) const { return eval(z); }
    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;
    CBox eval_box(const CBox& x) const;
    CBox deriv_box(const CBox& x) const;

    Poly1 derivative() const;

    // Taylor chart at `center` valid on the closed disk of `radius`.
    Chart make_chart(cplx center, double radius) const;
    void add_chart(cplx center, double radius);
    const Chart* find_chart(const CBox& x) const;

    // One coefficient per line, "re im", ascending degree.
    std::string to_text() const;
    static Poly1 from_text(const std::string& text);

    bool same_coeffs(const Poly1& o) const;

    static Poly1 from_exact(std::shared_ptr<const ExactCoeffs> e);
    const ExactCoeffs* exact_coeffs() const { return exact_.get(); }

private:
    std::vector<cplx> c_;
    std::shared_ptr<const ExactCoeffs> exact_;
    std::vector<Chart> charts_;

    cplx eval_exact(cplx z, bool derivative) const;
};

}  // namespace hc
