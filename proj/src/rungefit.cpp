#include "hcycle/rungefit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "exact.hpp"

namespace hc {

void ModelConfig::validate() const {
    if (!(eps > 0 && zeta > 0 && omega > 0 && bump_tol > 0 && mu_search_radius > 0 && delta_pert >= 0 &&
          newton_tol > 0))
        throw std::invalid_argument("tolerances must be positive");
    if (b == std::complex<double>(0.0)) throw std::invalid_argument("b must be nonzero");
    if (p_degree < 5 || q_degree < 5 || bump_degree < 2 || degree_budget < 5 || samples_factor < 4)
        throw std::invalid_argument("fit degrees too small or samples_factor < 4");
    if (chain_length < 1) throw std::invalid_argument("chain_length must be >= 1");
}

DiskSpec::DiskSpec(cplx c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw std::invalid_argument("disk radius must be positive");
}

bool disjoint(const DiskSpec& a, const DiskSpec& b) {
    return std::abs(a.center - b.center) > a.radius + b.radius;
}

void PiecewiseTarget::check() const {
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            if (!disjoint(pieces[i].disk, pieces[j].disk))
                throw std::invalid_argument("target disks are not pairwise disjoint");
}

namespace {

using Column = std::vector<cplx>;

cplx dot(const Column& a, const Column& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Vandermonde with Arnoldi: returns H ((n+2) x (n+1), column major by k)
// and the coefficients d in the orthogonal basis.
void arnoldi_lsq(const std::vector<cplx>& Z, const std::vector<cplx>& F, int n,
                 std::vector<std::vector<cplx>>& H, std::vector<cplx>& d) {
    const std::size_t m = Z.size();
    const double dm = double(m);
    std::vector<Column> Q(n + 1, Column(m));
    std::fill(Q[0].begin(), Q[0].end(), cplx(1.0));
    H.assign(n, std::vector<cplx>(n + 1, 0.0));
    for (int k = 0; k < n; ++k) {
        Column v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = Z[i] * Q[k][i];
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j <= k; ++j) {
                cplx h = dot(Q[j], v) / dm;
                H[k][j] += h;
                for (std::size_t i = 0; i < m; ++i) v[i] -= h * Q[j][i];
            }
        double nv = std::sqrt(std::real(dot(v, v)) / dm);
        if (!(nv > 1e-300)) throw std::runtime_error("Arnoldi breakdown: lower the degree");
        H[k][k + 1] = nv;
        for (std::size_t i = 0; i < m; ++i) Q[k + 1][i] = v[i] / nv;
    }
    d.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) d[k] = dot(Q[k], F) / dm;
}

// Exact monomial expansion of sum d_k q_k.
std::shared_ptr<ExactCoeffs> arnoldi_to_monomial(const std::vector<std::vector<cplx>>& H,
                                                 const std::vector<cplx>& d) {
    const int n = int(d.size()) - 1;
    std::vector<std::vector<BigC>> q(n + 1);
    q[0] = {BigC(cplx(1.0))};
    auto out = std::make_shared<ExactCoeffs>();
    out->a.assign(n + 1, BigC());
    auto accumulate = [&](int k) {
        BigC dk(d[k]);
        for (std::size_t i = 0; i < q[k].size(); ++i) out->a[i] = out->a[i] + dk * q[k][i];
    };
    accumulate(0);
    for (int k = 0; k < n; ++k) {
        std::vector<BigC> nq(k + 2);
        for (int i = 0; i <= k; ++i) nq[i + 1] = q[k][i];
        for (int j = 0; j <= k; ++j) {
            BigC h(H[k][j]);
            for (std::size_t i = 0; i < q[j].size(); ++i) nq[i] = nq[i] - h * q[j][i];
        }
        BigC inv = BigC(cplx(1.0)) / BigC(H[k][k + 1]);
        for (BigC& x : nq) x = x * inv;
        q[k + 1] = std::move(nq);
        accumulate(k + 1);
    }
    return out;
}

cplx arc_point(const DiskSpec& d, double th) { return d.center + d.radius * cplx(std::cos(th), std::sin(th)); }

double sup_on_circle(const std::vector<cplx>& t, cplx center, const DiskSpec& disk, double tol, bool& ok) {
    struct Arc {
        double a, b;
    };
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Arc> todo;
    const int n0 = 64;
    for (int k = n0 - 1; k >= 0; --k) todo.push_back({two_pi * k / n0, two_pi * (k + 1) / n0});
    // Lower bound from point values; an arc is settled once its enclosure is
    // narrow or cannot raise the supremum by more than tol.
    double lower = 0.0, best = 0.0;
    for (int k = 0; k < n0; ++k) {
        cplx z = arc_point(disk, two_pi * (k + 0.5) / n0);
        lower = std::max(lower, std::abs(eval_poly_disk(t, center, CBox(z)).mid()));
    }
    long budget = 1L << 20;
    const double slop = 4e-16 * (std::abs(disk.center) + disk.radius);
    while (!todo.empty()) {
        Arc arc = todo.back();
        todo.pop_back();
        cplx z0 = arc_point(disk, arc.a), z1 = arc_point(disk, arc.b);
        double sag = disk.radius * (1.0 - std::cos(0.5 * (arc.b - arc.a)));
        CBox box = inflate(hull(CBox(z0), CBox(z1)), sag + slop);
        CBox e = eval_poly_disk(t, center, box);
        double hi = e.abs().hi;
        lower = std::max(lower, std::abs(e.mid()) - 0.5 * std::sqrt(2.0) * e.diam());
        if (e.diam() <= tol || hi <= lower + tol || --budget <= 0) {
            if (budget <= 0) ok = false;
            best = std::max(best, hi);
        } else {
            double m = 0.5 * (arc.a + arc.b);
            todo.push_back({m, arc.b});
            todo.push_back({arc.a, m});
        }
    }
    return best;
}

}  // namespace

Poly1 fit_polynomial(const PiecewiseTarget& target, int degree, int samples_per_disk) {
    target.check();
    if (degree < int(target.pieces.size())) throw std::invalid_argument("degree below number of pieces");
    if (samples_per_disk < 4 * degree) throw std::invalid_argument("need at least 4*degree samples per disk");
    std::vector<cplx> Z, F;
    for (const Piece& pc : target.pieces)
        for (int k = 0; k < samples_per_disk; ++k) {
            cplx z = arc_point(pc.disk, 2.0 * std::numbers::pi * (k + 0.5) / samples_per_disk);
            Z.push_back(z);
            F.push_back(pc.target(z));
        }
    std::vector<std::vector<cplx>> H;
    std::vector<cplx> d;
    arnoldi_lsq(Z, F, degree, H, d);
    Poly1 p = Poly1::from_exact(arnoldi_to_monomial(H, d));
    for (const Piece& pc : target.pieces) p.add_chart(pc.disk.center, pc.disk.radius);
    return p;
}

SupBound certify_sup(const Poly1& p, const Poly1& target, const DiskSpec& disk, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    Chart local;
    const Chart* ch = nullptr;
    for (const Chart& c : p.charts())
        if (std::abs(c.center - disk.center) + disk.radius <= c.radius) {
            ch = &c;
            break;
        }
    if (!ch) {
        local = p.make_chart(disk.center, disk.radius);
        ch = &local;
    }
    Chart tc = target.make_chart(ch->center, ch->radius);
    auto diff = [](std::vector<cplx> a, const std::vector<cplx>& b) {
        if (a.size() < b.size()) a.resize(b.size(), 0.0);
        for (std::size_t k = 0; k < b.size(); ++k) a[k] -= b[k];
        return a;
    };
    SupBound r;
    bool ok = true;
    r.value_err = sup_on_circle(diff(ch->t, tc.t), ch->center, disk, tol, ok) + ch->err + tc.err;
    r.deriv_err = sup_on_circle(diff(ch->dt, tc.dt), ch->center, disk, tol, ok) + ch->derr + tc.derr;
    r.certified = ok;
    return r;
}

cplx branch_center(int j) {
    static const cplx c[4] = {{0.25, 0.0}, {0.0, 0.25}, {-0.25, 0.0}, {0.0, -0.25}};
    if (j < 0 || j > 3) throw std::out_of_range("branch index");
    return c[j];
}

DiskSpec branch_disk(const ModelConfig& cfg, int j) {
    if (j == 4) return {3.0, 1.0};
    return {branch_center(j), cfg.eta};
}

Poly1 affine_model(const ModelConfig& cfg, int j) {
    if (j == 4) return Poly1::affine(3.0 - 3.0 * cfg.eta, cfg.eta);
    cplx c = branch_center(j);
    return Poly1::affine(-c / cfg.eta, 1.0 / cfg.eta);
}

namespace {

// Fit radius of the tiny disks; leaves room for points with |l_j(z)| ~ 2.5.
constexpr double wide = 3.0;

FitResult escalate(const std::string& name, const PiecewiseTarget& fit, const std::vector<Piece>& checks,
                   int start, const ModelConfig& cfg, double tol, const std::vector<bool>& need_deriv) {
    FitResult res;
    for (int n = start;; n = int(std::ceil(n * 1.5))) {
        n = std::min(n, cfg.degree_budget);
        Poly1 p = fit_polynomial(fit, n, cfg.samples_factor * n);
        FitReport rep;
        rep.name = name;
        rep.degree = p.degree();
        rep.tol = tol;
        rep.certified = true;
        for (std::size_t i = 0; i < checks.size(); ++i) {
            SupBound s = certify_sup(p, checks[i].target, checks[i].disk, tol / 10.0);
            rep.disks.push_back(checks[i].disk);
            rep.value_err.push_back(s.value_err);
            rep.deriv_err.push_back(s.deriv_err);
            if (!s.certified || s.value_err > tol || (need_deriv[i] && s.deriv_err > tol)) rep.certified = false;
        }
        res = {p, rep};
        if (rep.certified || n >= cfg.degree_budget) break;
    }
    return res;
}

PiecewiseTarget branch_pieces(const ModelConfig& cfg, const std::vector<Poly1>& targets) {
    PiecewiseTarget t;
    for (int j = 0; j < 4; ++j) t.pieces.push_back({{branch_center(j), wide * cfg.eta}, targets[j]});
    t.pieces.push_back({{3.0, 1.05}, targets[4]});
    return t;
}

}  // namespace

FitResult make_p(const ModelConfig& cfg) {
    if (!(cfg.eps > 0)) throw std::invalid_argument("eps must be positive");
    std::vector<Poly1> targets;
    for (int j = 0; j <= 4; ++j) targets.push_back(affine_model(cfg, j));
    std::vector<Piece> checks;
    std::vector<bool> need;
    for (int j = 0; j <= 4; ++j) {
        checks.push_back({branch_disk(cfg, j), targets[j]});
        need.push_back(true);
    }
    for (int j = 0; j < 4; ++j) {
        checks.push_back({{branch_center(j), 2.5 * cfg.eta}, targets[j]});
        need.push_back(false);
    }
    FitResult r = escalate("p", branch_pieces(cfg, targets), checks, cfg.p_degree, cfg, cfg.eps, need);
    if (!r.report.certified)
        throw std::runtime_error("p not certified at degree " + std::to_string(r.report.degree));
    cplx zs = poly_fixed_point(r.poly, 3.0);
    if (std::abs(zs - 3.0) > 10 * cfg.eps / (1 - cfg.eta) || std::abs(r.poly.deriv(zs) - cfg.eta) > 10 * cfg.eps)
        throw std::runtime_error("p: attracting fixed point near 3 not within tolerance");
    return r;
}

FitResult make_q(const ModelConfig& cfg) {
    if (!(cfg.zeta > 0)) throw std::invalid_argument("zeta must be positive");
    std::vector<Poly1> targets;
    for (int j = 0; j < 4; ++j) targets.push_back(Poly1::constant(0.1 * std::pow(cplx(0, 1), j)));
    targets.push_back(Poly1::constant(-1.0 / 3.0));
    std::vector<Piece> checks;
    std::vector<bool> need;
    for (int j = 0; j <= 4; ++j) {
        checks.push_back({branch_disk(cfg, j), targets[j]});
        need.push_back(true);
    }
    FitResult r = escalate("q", branch_pieces(cfg, targets), checks, cfg.q_degree, cfg, cfg.zeta, need);
    if (!r.report.certified)
        throw std::runtime_error("q not certified at degree " + std::to_string(r.report.degree));
    return r;
}

FitResult make_bump(const DiskSpec& on, const std::vector<DiskSpec>& off, const ModelConfig& cfg,
                    const std::string& name) {
    std::vector<DiskSpec> all{on};
    all.insert(all.end(), off.begin(), off.end());
    for (const DiskSpec& d : off)
        if (!disjoint(on, d)) throw std::invalid_argument("bump on-disk meets an off-disk");
    // Enlarge each disk by 5% of its radius, capped at a third of the nearest gap.
    PiecewiseTarget fit;
    std::vector<Piece> checks;
    for (std::size_t i = 0; i < all.size(); ++i) {
        double gap = INFINITY;
        for (std::size_t j = 0; j < all.size(); ++j)
            if (i != j) gap = std::min(gap, std::abs(all[i].center - all[j].center) - all[i].radius - all[j].radius);
        double grow = std::min(0.05 * all[i].radius, gap / 3.0);
        Poly1 tgt = Poly1::constant(i == 0 ? 1.0 : 0.0);
        fit.pieces.push_back({{all[i].center, all[i].radius + grow}, tgt});
        checks.push_back({all[i], tgt});
    }
    fit.check();
    std::vector<bool> need(checks.size(), false);
    FitResult r = escalate(name, fit, checks, cfg.bump_degree, cfg, cfg.bump_tol, need);
    if (!r.report.certified)
        throw std::runtime_error(name + " not certified at degree " + std::to_string(r.report.degree));
    return r;
}

cplx branch_inverse(const Poly1& p, int j, cplx target, double eta) {
    if (std::abs(target) > 1.0 + 1e-3) throw std::invalid_argument("branch_inverse target outside D(0, 1+1e-3)");
    cplx c = branch_center(j);
    cplx z = c + eta * target;
    for (int it = 0; it < 60; ++it) {
        cplx r = p(z) - target;
        if (std::abs(r) <= 1e-13) break;
        z -= r / p.deriv(z);
    }
    if (!(std::abs(p(z) - target) <= 1e-12) || std::abs(z - c) > 3.0 * eta)
        throw std::runtime_error("branch_inverse: Newton failed or left the selection disk");
    return z;
}

cplx poly_fixed_point(const Poly1& p, cplx seed) {
    cplx z = seed;
    for (int it = 0; it < 100; ++it) {
        cplx r = p(z) - z;
        cplx step = r / (p.deriv(z) - 1.0);
        z -= step;
        if (std::abs(step) < 1e-15 * (1 + std::abs(z))) return z;
    }
    if (std::abs(p(z) - z) < 1e-12) return z;
    throw std::runtime_error("fixed point Newton did not converge");
}

}  // namespace hc
