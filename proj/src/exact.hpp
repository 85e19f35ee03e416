#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <complex>
#include <vector>

#include "hcycle/poly.hpp"

namespace hc {

using big = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<300, boost::multiprecision::allocate_stack>,
                                          boost::multiprecision::et_off>;

struct BigC {
    big re = 0;
    big im = 0;

    BigC() = default;
    BigC(cplx z) : re(z.real()), im(z.imag()) {}
    BigC(big r, big i) : re(std::move(r)), im(std::move(i)) {}

    cplx to_cplx() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
    big abs() const { return boost::multiprecision::sqrt(re * re + im * im); }
};

inline BigC operator+(const BigC& a, const BigC& b) { return {a.re + b.re, a.im + b.im}; }
inline BigC operator-(const BigC& a, const BigC& b) { return {a.re - b.re, a.im - b.im}; }
inline BigC operator*(const BigC& a, const BigC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline BigC operator/(const BigC& a, const BigC& b) {
    big d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

struct ExactCoeffs {
    std::vector<BigC> a;
};

// Coefficients of sum a_k (z - c)^k from monomial a.
std::vector<BigC> taylor_shift(std::vector<BigC> a, const BigC& c);

}  // namespace hc
