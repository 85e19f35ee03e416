#include "hcycle/poly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "exact.hpp"

namespace hc {

std::vector<BigC> taylor_shift(std::vector<BigC> a, const BigC& c) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) a[i - 1] = a[i - 1] + c * a[i];
    return a;
}

namespace {

void trim(std::vector<cplx>& c) {
    while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
}

cplx horner(const std::vector<cplx>& c, cplx h) {
    cplx r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * h + c[k];
    return r;
}

cplx dhorner(const std::vector<cplx>& c, cplx h) {
    cplx r = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) r = r * h + double(k) * c[k];
    return r;
}

// Upper bound, as a double, of a nonnegative big number.
double round_up(const big& x) {
    double d = x.convert_to<double>();
    return std::nextafter(d * (1.0 + 1e-12), INFINITY);
}

void rounded(const std::vector<BigC>& b, double r, std::vector<cplx>& out, double& err) {
    out.resize(b.size());
    big e = 0, rk = 1, R = r;
    for (std::size_t k = 0; k < b.size(); ++k) {
        out[k] = b[k].to_cplx();
        e += (b[k] - BigC(out[k])).abs() * rk;
        rk *= R;
    }
    err = round_up(e) + 1e-300;
}

}  // namespace

Poly1::Poly1(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(c_); }

Poly1 Poly1::from_exact(std::shared_ptr<const ExactCoeffs> e) {
    auto a = e->a;
    while (!a.empty() && a.back().re == 0 && a.back().im == 0) a.pop_back();
    auto ex = std::make_shared<ExactCoeffs>();
    ex->a = std::move(a);
    Poly1 p;
    p.c_.reserve(ex->a.size());
    for (const BigC& x : ex->a) p.c_.push_back(x.to_cplx());
    p.exact_ = std::move(ex);
    return p;
}

int Poly1::degree() const {
    if (exact_) return int(exact_->a.size()) - 1;
    return int(c_.size()) - 1;
}

cplx Poly1::eval_exact(cplx z, bool derivative) const {
    const auto& a = exact_->a;
    BigC Z(z), r;
    if (!derivative) {
        for (std::size_t k = a.size(); k-- > 0;) r = r * Z + a[k];
    } else {
        for (std::size_t k = a.size(); k-- > 1;) {
            BigC ak = a[k];
            ak.re *= int(k);
            ak.im *= int(k);
            r = r * Z + ak;
        }
    }
    return r.to_cplx();
}

cplx Poly1::eval(cplx z) const {
    if (!exact_) return horner(c_, z);
    for (const Chart& ch : charts_)
        if (ch.covers(z)) return horner(ch.t, z - ch.center);
    return eval_exact(z, false);
}

cplx Poly1::deriv(cplx z) const {
    if (!exact_) return dhorner(c_, z);
    for (const Chart& ch : charts_)
        if (ch.covers(z)) return horner(ch.dt, z - ch.center);
    return eval_exact(z, true);
}

const Chart* Poly1::find_chart(const CBox& x) const {
    for (const Chart& ch : charts_)
        if (ch.covers(x)) return &ch;
    return nullptr;
}

CBox Poly1::eval_box(const CBox& x) const {
    if (!exact_) return eval_poly_box(c_, 0.0, x);
    const Chart* ch = find_chart(x);
    if (!ch) throw EnclosureError("box outside every chart");
    return inflate(eval_poly_disk(ch->t, ch->center, x), ch->err);
}

CBox Poly1::deriv_box(const CBox& x) const {
    if (!exact_) {
        std::vector<cplx> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(double(k) * c_[k]);
        return eval_poly_box(d, 0.0, x);
    }
    const Chart* ch = find_chart(x);
    if (!ch) throw EnclosureError("box outside every chart");
    return inflate(eval_poly_disk(ch->dt, ch->center, x), ch->derr);
}

Poly1 Poly1::derivative() const {
    if (!exact_) {
        std::vector<cplx> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(double(k) * c_[k]);
        return Poly1(d);
    }
    auto e = std::make_shared<ExactCoeffs>();
    for (std::size_t k = 1; k < exact_->a.size(); ++k) {
        BigC x = exact_->a[k];
        x.re *= int(k);
        x.im *= int(k);
        e->a.push_back(x);
    }
    Poly1 d = from_exact(e);
    for (const Chart& ch : charts_) d.add_chart(ch.center, ch.radius);
    return d;
}

Chart Poly1::make_chart(cplx center, double radius) const {
    std::vector<BigC> a;
    if (exact_)
        a = exact_->a;
    else
        for (cplx x : c_) a.emplace_back(x);
    std::vector<BigC> t = taylor_shift(std::move(a), BigC(center));
    Chart ch;
    ch.center = center;
    ch.radius = radius;
    rounded(t, radius, ch.t, ch.err);
    std::vector<BigC> dt;
    for (std::size_t k = 1; k < t.size(); ++k) {
        BigC x = t[k];
        x.re *= int(k);
        x.im *= int(k);
        dt.push_back(x);
    }
    rounded(dt, radius, ch.dt, ch.derr);
    return ch;
}

void Poly1::add_chart(cplx center, double radius) {
    if (!exact_) return;
    charts_.push_back(make_chart(center, radius));
}

std::string Poly1::to_text() const {
    std::ostringstream os;
    if (exact_) {
        for (const BigC& x : exact_->a)
            os << x.re.str(0, std::ios_base::scientific) << ' ' << x.im.str(0, std::ios_base::scientific)
               << '\n';
    } else {
        os.precision(17);
        for (cplx x : c_) os << x.real() << ' ' << x.imag() << '\n';
    }
    return os.str();
}

Poly1 Poly1::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string re, im;
    std::vector<std::pair<std::string, std::string>> rows;
    bool long_digits = false;
    while (is >> re >> im) {
        rows.emplace_back(re, im);
        if (re.size() > 30 || im.size() > 30) long_digits = true;
    }
    if (!long_digits) {
        std::vector<cplx> c;
        for (auto& [r, i] : rows) c.emplace_back(std::stod(r), std::stod(i));
        return Poly1(c);
    }
    auto e = std::make_shared<ExactCoeffs>();
    for (auto& [r, i] : rows) e->a.emplace_back(big(r), big(i));
    return from_exact(e);
}

bool Poly1::same_coeffs(const Poly1& o) const {
    if (bool(exact_) != bool(o.exact_)) return false;
    if (!exact_) return c_ == o.c_;
    if (exact_->a.size() != o.exact_->a.size()) return false;
    for (std::size_t k = 0; k < exact_->a.size(); ++k)
        if (exact_->a[k].re != o.exact_->a[k].re || exact_->a[k].im != o.exact_->a[k].im) return false;
    return true;
}

}  // namespace hc
