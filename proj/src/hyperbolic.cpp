#include "hcycle/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "linalg.hpp"

namespace hc {

namespace {

double max_step_residual(const Automorphism3& F, const std::vector<Vec3>& xs) {
    double r = 0.0;
    std::size_t n = xs.size();
    for (std::size_t k = 0; k < n; ++k) r = std::max(r, norm(sub(F.apply(xs[k]), xs[(k + 1) % n])));
    return r;
}

std::string describe(const Vec3& x) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
    return os.str();
}

}  // namespace

SaddleData newton_periodic(const Automorphism3& F, std::vector<Vec3> xs, int max_iter) {
    const int n = static_cast<int>(xs.size());
    if (n < 1) throw std::invalid_argument("newton_periodic: empty seed");
    const int N = 3 * n;
    double res = max_step_residual(F, xs);
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        MatX J = MatX::Zero(N, N);
        VecX G(N);
        for (int k = 0; k < n; ++k) {
            Vec3 r = sub(F.apply(xs[k]), xs[(k + 1) % n]);
            for (int i = 0; i < 3; ++i) G(3 * k + i) = r[i];
            put_block(J, 3 * k, 3 * k, F.jacobian(xs[k]));
            put_minus_identity(J, 3 * k, 3 * ((k + 1) % n));
            if (n == 1)
                for (int i = 0; i < 3; ++i) J(i, i) = F.jacobian(xs[0])[4 * i] - 1.0;
        }
        VecX d = J.partialPivLu().solve(-G);
        double step = 0.0, scale = 0.0;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < 3; ++i) {
                xs[k][i] += d(3 * k + i);
                step = std::max(step, std::abs(d(3 * k + i)));
                scale = std::max(scale, std::abs(xs[k][i]));
            }
        res = max_step_residual(F, xs);
        if (!std::isfinite(res)) break;
        if (step <= 1e-15 * (1.0 + scale) || (step <= 1e-12 * (1.0 + scale) && res <= 1e-13)) {
            converged = true;
            break;
        }
    }
    if (!converged && !(res <= 1e-10))
        throw std::runtime_error("newton_periodic: no convergence, last iterate " + describe(xs[0]));

    SaddleData s;
    s.location = xs[0];
    s.period = n;
    s.orbit = xs;
    s.residual = res;
    Mat3 M = identity3();
    for (int k = 0; k < n; ++k) M = mul(F.jacobian(xs[k]), M);
    Eigen::Matrix3cd A;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) A(i, k) = M[3 * i + k];
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(A);
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b)); });
    for (int e = 0; e < 3; ++e) {
        s.eigenvalues[e] = es.eigenvalues()(order[e]);
        Eigen::Vector3cd v = es.eigenvectors().col(order[e]).normalized();
        s.eigenvectors[e] = {v(0), v(1), v(2)};
        if (std::abs(s.eigenvalues[e]) > 1.0) ++s.index;
    }
    return s;
}

SaddleData newton_fixed(const Automorphism3& F, const Vec3& seed, int period) {
    if (period < 1) throw std::invalid_argument("newton_fixed: period must be positive");
    std::vector<Vec3> xs{seed};
    for (int k = 1; k < period; ++k) xs.push_back(F.apply(xs.back()));
    return newton_periodic(F, std::move(xs));
}

Automorphism3 henon_factor(const Poly1& p, cplx b) {
    return Automorphism3{{HenonSkew(p, Poly1(), b, 1.0)}, "H"};
}

// ---------------------------------------------------------------- cones

std::vector<ConePair> skew_cone_pairs(const ModelConfig& cfg) {
    ConeSpec cu{ConeKind::C_u, 1e-3, 1.0};
    ConeSpec cuu{ConeKind::C_uu, 1e-3, 1.0};
    ConeSpec cs{ConeKind::C_s, 1e-3, std::abs(cfg.b)};
    return {{cu, cu, (1.0 + cfg.lambda) / 2.0, false, "C_u forward"},
            {cuu, cuu, 1e3, false, "C_uu forward"},
            {cs, cs, 1e3, true, "C_s backward"}};
}

std::vector<ConePair> henon_cone_pairs() {
    ConeSpec xu{ConeKind::chi_u, 1e-3, 1.0};
    ConeSpec xs{ConeKind::chi_s, 1e-3, 1.0};
    return {{xu, xu, 1e3, false, "chi_u forward"}, {xs, xs, 1e3, true, "chi_s backward"}};
}

namespace {

// Squares of side `side` covering the closed disk D(c, r), those meeting it.
std::vector<CBox> square_cover(cplx c, double r, int per_axis) {
    std::vector<CBox> out;
    double side = 2.0 * r / per_axis;
    for (int i = 0; i < per_axis; ++i)
        for (int k = 0; k < per_axis; ++k) {
            CBox s(Interval(c.real() - r + i * side, c.real() - r + (i + 1) * side),
                   Interval(c.imag() - r + k * side, c.imag() - r + (k + 1) * side));
            if (s.min_dist(c) <= r) out.push_back(s);
        }
    return out;
}

bool misses_unit_polydisk(const Box3& X, bool two_dim) {
    for (int i = 0; i < (two_dim ? 2 : 3); ++i)
        if (X[i].min_dist(0.0) > 1.0) return true;
    return false;
}

struct PendingBox {
    Box3 X;
    int depth;
    unsigned mask;
    double weight;
    int branch;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Hull of f and f' over the closed disk D(c, r).
std::pair<CBox, CBox> disk_range(const Poly1& f, cplx c, double r) {
    if (f.degree() <= 0) return {CBox(f.eval(c)), CBox(cplx(0.0))};
    int n = std::max(1, int(std::ceil(2.0 * r / 0.02)));
    auto squares = square_cover(c, r, n);
    CBox v = f.eval_box(squares[0]), d = f.deriv_box(squares[0]);
    for (const CBox& q : squares) {
        v = hull(v, f.eval_box(q));
        d = hull(d, f.deriv_box(q));
    }
    return {v, d};
}

// Derivative enclosures of the shears that follow the Henon skew, valid on
// the region (plus a margin) that F1 maps R^j into. Each shear moves one
// coordinate by P of the other two, so Dg = I + e_k grad P and
// Dg^{-1} = I - e_k grad P.
struct TailEnclosure {
    MatrixEnclosure fwd, bwd;
    double displacement = 0.0;
};

TailEnclosure tail_enclosure(const std::vector<Generator>& tail, const std::array<std::pair<cplx, double>, 3>& region) {
    constexpr double margin = 1e-3;
    struct Shear {
        int k, a, b;
        const Poly2* P;
    };
    std::vector<Shear> shears;
    for (const Generator& g : tail)
        std::visit(overloaded{[&](const HenonSkew&) { throw std::invalid_argument("verify_cones: skew after the first generator"); },
                              [&](const ShearZ& s) { shears.push_back({0, 1, 2, &s.P}); },
                              [&](const ShearW& s) { shears.push_back({1, 0, 2, &s.P}); },
                              [&](const ShearT& s) { shears.push_back({2, 0, 1, &s.P}); }},
                   g);
    TailEnclosure te;
    te.fwd = te.bwd = MatrixEnclosure::identity();
    for (const Shear& sh : shears) {
        CBox val(cplx(0.0)), da(cplx(0.0)), db(cplx(0.0));
        for (const auto& term : sh.P->terms()) {
            auto [xv, xd] = disk_range(term.x, region[sh.a].first, region[sh.a].second + margin);
            auto [yv, yd] = disk_range(term.y, region[sh.b].first, region[sh.b].second + margin);
            val = val + CBox(term.coef) * xv * yv;
            da = da + CBox(term.coef) * xd * yv;
            db = db + CBox(term.coef) * xv * yd;
        }
        te.displacement += val.abs().hi;
        MatrixEnclosure up = MatrixEnclosure::identity(), down = MatrixEnclosure::identity();
        up(sh.k, sh.a) = da;
        up(sh.k, sh.b) = db;
        down(sh.k, sh.a) = -da;
        down(sh.k, sh.b) = -db;
        te.fwd = up * te.fwd;
        te.bwd = te.bwd * down;
    }
    if (!(te.displacement <= margin)) throw EnclosureError("shears move the region by more than the margin");
    return te;
}

Box3 inflate(const Box3& X, double r) { return {inflate(X.z, r), inflate(X.w, r), inflate(X.t, r)}; }

}  // namespace

ConeReport verify_cones(const Automorphism3& F, const std::vector<BranchSpec>& branches,
                        const std::vector<ConePair>& pairs, int max_depth, bool two_dim) {
    if (pairs.size() > 31) throw std::invalid_argument("verify_cones: too many pairs");
    ConeReport rep;
    rep.pairs.resize(pairs.size());
    std::vector<double> ok_weight(pairs.size(), 0.0), open_weight(pairs.size(), 0.0);
    for (std::size_t i = 0; i < pairs.size(); ++i) rep.pairs[i].name = pairs[i].name;

    // Maps built from F1 by further shears are handled as tail o F1: the shear
    // part is enclosed once per branch on the region F1 sends R^j into.
    const bool split = !two_dim && F.gens.size() > 1;
    const Automorphism3 base = split ? Automorphism3{{F.gens[0]}, F.label} : F;
    std::vector<TailEnclosure> tails;
    if (split) {
        std::vector<Generator> tail(F.gens.begin() + 1, F.gens.end());
        for (const BranchSpec& br : branches)
            tails.push_back(tail_enclosure(tail, {{{0.0, 1.0}, {br.z_center, br.selection_radius + 1e-3}, {0.0, 1.0}}}));
    }

    for (int dir = 0; dir < 2; ++dir) {
        const bool backward = dir == 1;
        unsigned all = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].backward == backward) all |= 1u << i;
        if (!all) continue;

        // Forward: z near c_j, w and t in the unit disk. Backward: the same with
        // the roles of z and w swapped, since F(R^j) has w near c_j.
        std::vector<PendingBox> stack;
        for (std::size_t bi = 0; bi < branches.size(); ++bi) {
            const BranchSpec& br = branches[bi];
            // R^j sits inside D(c_j, 1.01 eta); 0.7 of the selection radius keeps
            // every square of the cover inside the charts of p.
            auto near = square_cover(br.z_center, 0.7 * br.selection_radius, 6);
            auto unit = square_cover(0.0, 1.0, 2);
            std::vector<CBox> ts = two_dim ? std::vector<CBox>{CBox(cplx(0.0))} : unit;
            std::vector<Box3> init;
            for (const CBox& a : near)
                for (const CBox& u : unit)
                    for (const CBox& t : ts) init.push_back(backward ? Box3{u, a, t} : Box3{a, u, t});
            for (const Box3& X : init)
                stack.push_back({X, 0, all, 1.0 / double(init.size() * branches.size()), int(bi)});
        }

        while (!stack.empty()) {
            PendingBox nb = stack.back();
            stack.pop_back();
            const Box3& X = nb.X;
            if (misses_unit_polydisk(X, two_dim)) continue;
            try {
                const double d = split ? tails[nb.branch].displacement : 0.0;
                Box3 Y = backward ? base.apply_inv_box(inflate(X, d)) : inflate(base.apply_box(X), d);
                if (misses_unit_polydisk(Y, two_dim)) continue;
                if (backward && std::none_of(branches.begin(), branches.end(), [&](const BranchSpec& br) {
                        return Y.z.min_dist(br.z_center) <= br.selection_radius;
                    }))
                    continue;
            } catch (const EnclosureError&) {
            }

            unsigned left = 0;
            bool have_m = true;
            MatrixEnclosure M;
            try {
                if (!split) {
                    M = backward ? F.jacobian_inv_box(X) : F.jacobian_box(X);
                } else {
                    const TailEnclosure& te = tails[nb.branch];
                    M = backward ? base.jacobian_inv_box(inflate(X, te.displacement)) * te.bwd
                                 : te.fwd * base.jacobian_box(X);
                }
            } catch (const EnclosureError&) {
                have_m = false;
            }
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                if (!(nb.mask & (1u << i))) continue;
                Verdict v = have_m ? cone_map_certify(M, pairs[i].in, pairs[i].out, pairs[i].factor) : Verdict::unknown;
                ConePairResult& r = rep.pairs[i];
                if (v == Verdict::yes) {
                    ++r.boxes;
                    r.deepest = std::max(r.deepest, nb.depth);
                    ok_weight[i] += nb.weight;
                } else if (v == Verdict::no) {
                    ++r.failed;
                    open_weight[i] += nb.weight;
                    if (!r.witness) r.witness = X;
                } else {
                    left |= 1u << i;
                }
            }
            if (!left) continue;
            if (nb.depth >= max_depth) {
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    if (left & (1u << i)) {
                        ++rep.pairs[i].unknown;
                        open_weight[i] += nb.weight;
                        rep.pairs[i].deepest = std::max(rep.pairs[i].deepest, nb.depth);
                    }
                continue;
            }
            auto [a, b] = X.bisect();
            stack.push_back({a, nb.depth + 1, left, nb.weight / 2, nb.branch});
            stack.push_back({b, nb.depth + 1, left, nb.weight / 2, nb.branch});
        }
    }

    rep.certified = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ConePairResult& r = rep.pairs[i];
        double tot = ok_weight[i] + open_weight[i];
        r.certified_fraction = tot > 0 ? ok_weight[i] / tot : 0.0;
        r.certified = r.failed == 0 && r.unknown == 0 && r.boxes > 0;
        rep.certified = rep.certified && r.certified;
    }
    return rep;
}

// ------------------------------------------------------- crossing, sink

namespace {

int winding_number(const std::vector<cplx>& loop) {
    double total = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        cplx a = loop[k], b = loop[(k + 1) % loop.size()];
        double d = std::arg(b / a);
        if (std::abs(d) > 2.0) return 999;  // too coarse to decide
        total += d;
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace

CrossingReport verify_crossing(const Poly1& p, cplx b, const ModelConfig& cfg) {
    CrossingReport rep;
    const int nb = 1024;
    const double slack = 1.05;
    std::vector<cplx> ws{0.0}, targets{0.0};
    for (int k = 0; k < 8; ++k) {
        cplx e = std::polar(1.0, 2 * std::numbers::pi * k / 8);
        ws.push_back(e);
        targets.push_back(0.999 * e);
    }
    for (int j = 0; j < 4; ++j) {
        cplx c = branch_center(j);
        std::vector<cplx> pz(nb);
        for (int k = 0; k < nb; ++k) {
            cplx z = c + cfg.eta * slack * std::polar(1.0, 2 * std::numbers::pi * k / nb);
            pz[k] = p(z);
            rep.max_abs_z_U = std::max(rep.max_abs_z_U, std::abs(z));
        }
        rep.max_abs_w_V = rep.max_abs_z_U;
        rep.full[j] = true;
        rep.winding[j] = 1;
        for (cplx w : ws)
            for (cplx y : targets) {
                std::vector<cplx> loop(nb);
                for (int k = 0; k < nb; ++k) loop[k] = pz[k] + b * w - y;
                int wn = winding_number(loop);
                if (wn != 1) {
                    rep.full[j] = false;
                    rep.winding[j] = wn;
                }
            }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx z = branch_inverse(p, i, branch_center(j), cfg.eta);
            cplx z1 = p(z), z2 = p(z1) + b * z;  // H(z,0) = (z1, z), H^2 = (z2, z1)
            bool in_ui = std::abs(z - branch_center(i)) <= 3 * cfg.eta && std::abs(z1) <= 1.0;
            bool in_uj = std::abs(z1 - branch_center(j)) <= 3 * cfg.eta && std::abs(z2) <= 1.0;
            if (in_ui && in_uj) ++rep.transitions;
        }
    rep.ok = std::all_of(rep.full.begin(), rep.full.end(), [](bool f) { return f; }) &&
             rep.max_abs_z_U <= 1.0 - 1e-3 && rep.max_abs_w_V <= 1.0 - 1e-3 && rep.transitions == 16;
    return rep;
}

SinkReport verify_sink_basin(const Poly1& p, cplx b, int grid) {
    SinkReport rep;
    const cplx c = 3.0;
    auto squares = square_cover(c, 1.0, grid);
    CBox Wall = CBox::disk_hull(c, 1.0);
    CBox B(b);
    bool inv = true, contr = true;
    for (const CBox& Z : squares) {
        ++rep.boxes;
        try {
            CBox img = p.eval_box(Z) + B * Wall;
            double r = img.max_dist(c);
            rep.max_image_radius = std::max(rep.max_image_radius, r);
            if (!(r <= 1.0)) inv = false;
            // DH^2 = DH(H(x)) DH(x) with DH = [[p'(z), b], [1, 0]].
            CBox d0 = p.deriv_box(Z), d1 = p.deriv_box(img);
            CBox m00 = d1 * d0 + B, m01 = d1 * B, m10 = d0, m11 = B;
            Interval fro = sqrt(m00.abs2() + m01.abs2() + m10.abs2() + m11.abs2());
            rep.h2_norm_bound = std::max(rep.h2_norm_bound, fro.hi);
            if (!(fro.hi <= 0.5)) contr = false;
        } catch (const EnclosureError&) {
            inv = contr = false;
            rep.max_image_radius = rep.h2_norm_bound = HUGE_VAL;
        }
    }
    rep.invariance = inv ? Verdict::yes : Verdict::unknown;
    rep.contraction = contr ? Verdict::yes : Verdict::unknown;
    SaddleData s = newton_fixed(henon_factor(p, b), {3.0, 3.0, 0.0}, 1);
    rep.sink = s.location[0];
    rep.multiplier = std::abs(s.eigenvalues[1]) > std::abs(s.eigenvalues[0]) ? s.eigenvalues[1] : s.eigenvalues[0];
    // The embedded t-direction has eigenvalue 1; report the largest of the other two.
    cplx best = 0.0;
    for (const cplx& e : s.eigenvalues)
        if (std::abs(e - 1.0) > 1e-9 && std::abs(e) > std::abs(best)) best = e;
    rep.multiplier = best;
    return rep;
}

// ------------------------------------------------------ horseshoe orbits

HorseshoeOrbit horseshoe_orbit(const Poly1& p, cplx b, const std::vector<int>& symbols, bool periodic) {
    const int n = static_cast<int>(symbols.size());
    if (n == 0) throw std::invalid_argument("horseshoe_orbit: empty word");
    HorseshoeOrbit o;
    o.symbols = symbols;
    o.periodic = periodic;
    o.z.resize(n);
    for (int k = 0; k < n; ++k) o.z[k] = branch_center(symbols[k]);
    auto at = [&](int k) -> cplx {
        if (periodic) return o.z[((k % n) + n) % n];
        return (k < 0 || k >= n) ? cplx(0.0) : o.z[k];
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double change = 0.0;
        for (int k = n - 1; k >= 0; --k) {
            cplx nz = branch_inverse(p, symbols[k], at(k + 1) - b * at(k - 1));
            change = std::max(change, std::abs(nz - o.z[k]));
            o.z[k] = nz;
        }
        if (change <= 1e-17) break;
    }
    o.w0 = at(-1);
    return o;
}

XiResult fibered_xi(const Automorphism3& F1, const HorseshoeOrbit& orbit, int n) {
    const HenonSkew& h = F1.skew();
    const int m = static_cast<int>(orbit.z.size());
    if (!orbit.periodic && m < n + 2) throw std::invalid_argument("fibered_xi: orbit too short");
    for (int k = 0; k < m; ++k)
        if (std::abs(orbit.z[k] - branch_center(orbit.symbols[k])) > 3e-4)
            throw std::runtime_error("fibered_xi: orbit leaves the horseshoe branches");
    auto z = [&](int k) { return orbit.z[k % m]; };
    auto pull = [&](int start, int steps) {
        cplx c = 0.0;
        for (int k = start + steps - 1; k >= start; --k) c = (c - h.q(z(k))) / h.lambda;
        return c;
    };
    XiResult r;
    r.value = pull(0, n);
    r.radius = std::pow(h.lambda, -n);
    cplx next = pull(1, n);
    r.conjugacy_residual = std::abs(h.lambda * r.value + h.q(z(0)) - next);
    return r;
}

// ------------------------------------------------------ periodic points

cplx model_periodic_t(const std::vector<int>& word, double lambda) {
    // t_{k+1} = lambda t_k + q_k with q_k = i^{j_k} / 10.
    const int n = static_cast<int>(word.size());
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += std::pow(lambda, n - 1 - k) * 0.1 * ipow[word[k] & 3];
    return -s / (std::pow(lambda, n) - 1.0);
}

SaddleData periodic_orbit(const Automorphism3& F, const std::vector<int>& word, const ModelConfig& cfg) {
    (void)cfg;
    const HenonSkew& h = F.skew();
    HorseshoeOrbit o = horseshoe_orbit(h.p, h.b, word, true);
    const int n = static_cast<int>(word.size());
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += std::pow(h.lambda, n - 1 - k) * h.q(o.z[k]);
    cplx t = -s / (std::pow(h.lambda, n) - 1.0);
    std::vector<Vec3> seed;
    for (int k = 0; k < n; ++k) {
        seed.push_back({o.z[k], o.z[(k + n - 1) % n], t});
        t = h.lambda * t + h.q(o.z[k]);
    }
    SaddleData sd = newton_periodic(F, seed);
    sd.word = word;
    return sd;
}

namespace {

bool primitive(const std::vector<int>& w) {
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool rep = true;
        for (std::size_t k = d; k < n && rep; ++k) rep = w[k] == w[k - d];
        if (rep) return false;
    }
    return true;
}

}  // namespace

SaddleData periodic_in_slab(const Automorphism3& F, const DiskSpec& t_disk, const ModelConfig& cfg, int max_len) {
    const double lambda = F.skew().lambda;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> w(len, 0);
        while (true) {
            if (primitive(w) && t_disk.contains(model_periodic_t(w, lambda))) {
                SaddleData sd = periodic_orbit(F, w, cfg);
                if (t_disk.contains(sd.location[2])) return sd;
            }
            int k = len - 1;
            while (k >= 0 && w[k] == 3) w[k--] = 0;
            if (k < 0) break;
            ++w[k];
        }
    }
    throw std::runtime_error("periodic_in_slab: no periodic word up to the maximal length lands in the disk");
}

}  // namespace hc
