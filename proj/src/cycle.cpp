#include "hcycle/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "linalg.hpp"

namespace hc {

LegConstants leg_constants(const ModelConfig& cfg) {
    LegConstants c;
    c.pushes = cfg.chain_length + 1;
    c.gamma2 = 3.0 + std::pow(cfg.lambda, c.pushes);
    return c;
}

std::vector<DiskSpec> chain_disks(const ModelConfig& cfg) {
    std::vector<DiskSpec> out;
    for (int k = 1; k <= cfg.chain_length; ++k)
        out.emplace_back(3.0 + std::pow(cfg.lambda, k), std::pow(cfg.lambda, k - 1) / 30.0);
    return out;
}

BumpSet make_bumps(const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    const double w = cfg.omega;
    std::vector<DiskSpec> chain = chain_disks(cfg);
    std::vector<DiskSpec> anchor_off{{0.0, 1.05}, {3.0, 1.02}, {lc.gamma2, w}};
    anchor_off.insert(anchor_off.end(), chain.begin(), chain.end());
    std::vector<DiskSpec> lift_off{{0.0, 1.05}, {3.0, 1.02}};
    lift_off.insert(lift_off.end(), chain.begin(), chain.end());
    BumpSet b{make_bump({lc.a1, w}, anchor_off, cfg, "anchor"),
              make_bump({lc.alpha1p, w}, {{0.0, 1.05}, {3.0, 0.5}}, cfg, "fan"),
              make_bump({lc.gamma2, w}, lift_off, cfg, "lift"),
              make_bump({lc.beta2p, w}, {{0.0, 0.5}, {3.0, 1.02}}, cfg, "land")};
    return b;
}

Leg1 build_F2(const Automorphism3& F1, const BumpSet& bumps, const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    Leg1 L;
    SaddleData S = newton_fixed(F1, {3.0, 3.0, 3.0}, 1);
    SaddleData A = newton_fixed(F1, {0.25, 0.25, -0.9}, 1);
    GraphPatch gam = unstable_surface_K(F1, {0}, cfg);
    const cplx t = A.location[2];
    cplx z = branch_center(0) + cfg.eta * lc.a1;
    for (int it = 0; it < 50; ++it) {
        auto v = gam.eval(z, t);
        Mat3 D = F1.jacobian(v.point);
        cplx phi = F1.apply(v.point)[0] - lc.a1;
        cplx dz = phi / (D[0] + D[1] * v.d1);
        z -= dz;
        if (std::abs(dz) <= 1e-17) break;
    }
    L.anchor = gam.eval(z, t).point;
    L.M1 = F1.apply(L.anchor);
    if (std::abs(L.M1[0] - lc.a1) > 1e-9) throw std::runtime_error("build_F2: anchor Newton failed");
    GraphPatch sigma = stable_surface_S(F1, S);
    L.gamma1p = sigma.eval(lc.alpha1p, lc.alpha1p).point[2].real();
    L.N1 = {lc.alpha1p, lc.alpha1p, sigma.eval(lc.alpha1p, lc.alpha1p).point[2]};
    const cplx beta1 = L.M1[1], c1 = L.M1[2], g1p = L.N1[2];
    const Poly1& PA = bumps.anchor.poly;
    const Poly1& P2 = bumps.fan.poly;
    L.F2 = F1.then(ShearT{Poly2::in_u(PA, lc.T - c1)})
               .then(ShearZ{Poly2::in_v(PA, lc.alpha1p - lc.a1)})
               .then(ShearW{Poly2::in_u(P2, lc.alpha1p - beta1)})
               .then(ShearT{Poly2::in_u(P2, g1p - lc.T)});
    L.F2.label = "F2";
    L.S = newton_fixed(L.F2, S.location, 1);
    L.A = newton_fixed(L.F2, A.location, 1);
    L.A.word = {0};
    return L;
}

TransverseResult transverse_leg(const Automorphism3& F, const SaddleData& S, const Vec3& source_seed,
                                const ModelConfig& cfg, cplx slice_z) {
    GraphPatch gam = unstable_surface_K(F, {0}, cfg);
    GraphPatch sigma = stable_surface_S(F, S);
    cplx zu = source_seed[0], tu = source_seed[2];
    TransverseResult r;
    Vec3 cz{}, ct{};
    GraphPatch::Value sv;
    for (int it = 0; it < 60; ++it) {
        auto v = gam.eval(zu, tu);
        Vec3 y = F.apply(v.point);
        Mat3 D = F.jacobian(v.point);
        cz = mul(D, Vec3{1.0, v.d1, 0.0});
        ct = mul(D, Vec3{0.0, v.d2, 1.0});
        sv = sigma.eval(y[0], y[1]);
        cplx R1 = y[0] - slice_z, R2 = y[2] - sv.point[2];

        cplx a = cz[0], b = ct[0];
        cplx c = cz[2] - sv.d1 * cz[0] - sv.d2 * cz[1];
        cplx d = ct[2] - sv.d1 * ct[0] - sv.d2 * ct[1];
        cplx det = a * d - b * c;
        cplx dzu = (d * R1 - b * R2) / det, dtu = (a * R2 - c * R1) / det;
        zu -= dzu;
        tu -= dtu;
        r.source = v.point;
        r.point = y;
        if (std::abs(dzu) + std::abs(dtu) <= 1e-16 && it > 0) break;
    }
    auto v = gam.eval(zu, tu);
    r.source = v.point;
    r.point = F.apply(v.point);
    sv = sigma.eval(r.point[0], r.point[1]);
    r.residual = std::max(std::abs(r.point[0] - slice_z), std::abs(r.point[2] - sv.point[2]));
    if (!(r.residual <= 1e-10)) throw std::runtime_error("transverse_leg: Newton did not converge");

    Vec3 u{ct[0] * cz[0] - cz[0] * ct[0], ct[0] * cz[1] - cz[0] * ct[1], ct[0] * cz[2] - cz[0] * ct[2]};
    Vec3 s1{1.0, 0.0, sv.d1}, s2{0.0, 1.0, sv.d2};
    Eigen::Matrix3cd M;
    const Vec3* cols[3] = {&u, &s1, &s2};
    for (int k = 0; k < 3; ++k) {
        double n = norm(*cols[k]);
        for (int i = 0; i < 3; ++i) M(i, k) = (*cols[k])[i] / n;
    }
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(M);
    r.margin = svd.singularValues()(2);
    return r;
}

Vec3 UnstableArc::point(cplx s) const {
    Vec3 x = local.eval(s, 0.0).point;
    for (int k = 0; k < pushes; ++k) x = F.apply(x);
    return x;
}

Vec3 UnstableArc::tangent(cplx s) const {
    auto v = local.eval(s, 0.0);
    Vec3 x = v.point, d = v.tangent;
    for (int k = 0; k < pushes; ++k) {
        d = mul(F.jacobian(x), d);
        x = F.apply(x);
    }
    return d;
}

UnstableArc unstable_arc(const Automorphism3& F, const SaddleData& S, int pushes) {
    return UnstableArc{unstable_curve_S(F, S, 40), pushes, F};
}

Leg2 prepare_leg2(const Automorphism3& F2, const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    Leg2 L;
    L.S2 = newton_fixed(F2, {3.0, 3.0, 3.0}, 1);
    UnstableArc arc = unstable_arc(F2, L.S2, lc.pushes);
    cplx s = 1.0;
    for (int it = 0; it < 50; ++it) {
        cplx ds = (arc.point(s)[2] - lc.gamma2) / arc.tangent(s)[2];
        s -= ds;
        if (std::abs(ds) <= 1e-16) break;
    }
    L.s_M2 = s;
    L.M2 = arc.point(s);
    if (std::abs(L.M2[2] - lc.gamma2) > 1e-9) throw std::runtime_error("prepare_leg2: M2 search failed");
    L.B2 = periodic_in_slab(F2, {0.0, 0.1}, cfg);
    GraphPatch U = stable_curve_K(F2, {}, L.B2);
    L.N2 = U.eval(lc.beta2p, 0.0).point;
    return L;
}

Automorphism3 build_F3(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, cplx mu,
                       const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    const cplx alpha2 = leg.M2[0], beta2 = leg.M2[1], gamma2 = leg.M2[2];
    const cplx alpha2p = leg.N2[0], gamma2p = leg.N2[2];
    const Poly1& Q1 = bumps.lift.poly;
    const Poly1& Q2 = bumps.land.poly;
    Poly2 h3 = Poly2::in_u(Q2, alpha2p - alpha2 + mu - gamma2p);
    h3.add(1.0, Q2, Poly1::affine(0.0, 1.0));
    Automorphism3 F3 = F2.then(ShearW{Poly2::in_v(Q1, lc.beta2p - beta2)})
                           .then(ShearT{Poly2::in_v(Q2, gamma2p - gamma2)})
                           .then(ShearZ{h3});
    F3.label = "F3";
    return F3;
}

namespace {

struct GapEval {
    cplx G;
    cplx s;
    Vec3 N, tangent;
    SaddleData B3;
    Automorphism3 F3;
};

GapEval gap(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, cplx mu, const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    GapEval g;
    g.F3 = build_F3(F2, bumps, leg, mu, cfg);
    SaddleData S3 = newton_fixed(g.F3, leg.S2.location, 1);
    UnstableArc arc = unstable_arc(g.F3, S3, lc.pushes);
    g.B3 = newton_periodic(g.F3, leg.B2.orbit);
    g.B3.word = leg.B2.word;
    GraphPatch U = stable_curve_K(g.F3, {}, g.B3);
    cplx s = leg.s_M2;
    for (int it = 0; it < 40; ++it) {
        Vec3 Y = arc.point(s), dY = arc.tangent(s);
        auto u = U.eval(Y[1], 0.0);
        cplx f = Y[2] - u.point[2];
        cplx df = dY[2] - u.tangent[2] * dY[1];
        cplx ds = f / df;
        s -= ds;
        if (std::abs(ds) <= 1e-16 * (1.0 + std::abs(s))) break;
    }
    g.s = s;
    g.N = arc.point(s);
    g.tangent = arc.tangent(s);
    auto u = U.eval(g.N[1], 0.0);
    if (std::abs(g.N[2] - u.point[2]) > 1e-10) throw std::runtime_error("solve_mu: t-level matching failed");
    g.G = g.N[0] - u.point[0];
    return g;
}

int winding(const std::vector<cplx>& loop) {
    double total = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) total += std::arg(loop[(k + 1) % loop.size()] / loop[k]);
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace

MuSolution solve_mu(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, const ModelConfig& cfg) {
    MuSolution m;
    const double R = cfg.mu_search_radius;
    std::vector<cplx> loop;
    for (int k = 0; k < 32; ++k) loop.push_back(gap(F2, bumps, leg, std::polar(R, 2 * std::numbers::pi * k / 32), cfg).G);
    m.winding = winding(loop);
    if (m.winding != 1) throw std::runtime_error("solve_mu: gap function has no single root in the search disk");

    cplx mu0 = 0.0, mu1 = 1e-3;
    GapEval g0 = gap(F2, bumps, leg, mu0, cfg), g1 = gap(F2, bumps, leg, mu1, cfg);
    m.slope_error = std::abs((g1.G - g0.G) / (mu1 - mu0) - 1.0);
    for (int it = 0; it < 30 && std::abs(g1.G) > 1e-12; ++it) {
        cplx mu2 = mu1 - g1.G * (mu1 - mu0) / (g1.G - g0.G);
        mu0 = mu1;
        g0 = std::move(g1);
        mu1 = mu2;
        g1 = gap(F2, bumps, leg, mu1, cfg);
        if (std::abs(mu1 - mu0) <= 1e-16) break;
    }
    if (!(std::abs(g1.G) <= 1e-10) || std::abs(mu1) > R) throw std::runtime_error("solve_mu: secant iteration failed");
    MuSolution out = evaluate_mu(F2, bumps, leg, mu1, cfg);
    out.winding = m.winding;
    out.slope_error = m.slope_error;
    return out;
}

MuSolution evaluate_mu(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, cplx mu, const ModelConfig& cfg) {
    GapEval g = gap(F2, bumps, leg, mu, cfg);
    MuSolution m;
    m.mu0 = mu;
    m.gap = std::abs(g.G);
    m.N = g.N;
    m.tangent = g.tangent;
    m.s_N = g.s;
    m.B3 = std::move(g.B3);
    m.F3 = std::move(g.F3);
    // Distance between complex directions, modulo a unit factor.
    double nt = norm(m.tangent);
    cplx ip = (m.tangent[0] + m.tangent[2]) / (nt * std::sqrt(2.0));
    m.tangent_error = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(ip)));
    return m;
}

UUResult unstable_to_uu(const Automorphism3& F3, const SaddleData& S, const SaddleData& B, cplx s_N,
                        const ModelConfig& cfg) {
    LegConstants lc = leg_constants(cfg);
    UnstableArc arc = unstable_arc(F3, S, lc.pushes);
    const int per = B.period;
    // Quadratic model of the arc around N in the offset from s_N. The offsets
    // needed are ~1e-9, so pushing arc(s_N + e) directly would lose everything
    // to rounding in s.
    const Vec3 N = arc.point(s_N), T = arc.tangent(s_N);
    const double h = 1e-3;
    const Vec3 Tp = arc.tangent(s_N + h), Tm = arc.tangent(s_N - h);
    Vec3 C;
    for (int i = 0; i < 3; ++i) C[i] = (Tp[i] - Tm[i]) / (2 * h);
    auto image = [&](cplx e, int n, Vec3* d) {
        Vec3 x, v;
        for (int i = 0; i < 3; ++i) {
            x[i] = N[i] + e * (T[i] + 0.5 * e * C[i]);
            v[i] = T[i] + e * C[i];
        }
        for (int k = 0; k < n; ++k) {
            v = mul(F3.jacobian(x), v);
            x = F3.apply(x);
        }
        if (d) *d = v;
        return x;
    };
    UUResult r;
    Vec3 x = N;
    std::string last = "no multiple of the period tried";
    for (int n = per; n <= 10 * per; n += per) {
        for (int k = r.n; k < n; ++k) {
            Mat3 D = F3.jacobian(x);
            double e = std::abs(D[0] - 1.0 / cfg.eta) * cfg.eta;
            const double model[9] = {0, 0, 0, 1, 0, 0, 0, 0, cfg.lambda};
            for (int i = 1; i < 9; ++i) e = std::max(e, std::abs(D[i] - model[i]));
            r.premise_error = std::max(r.premise_error, e);
            x = F3.apply(x);
        }
        r.n = n;
        if (r.premise_error > 0.1) throw std::runtime_error("unstable_to_uu: differential along the orbit is not near the model");
        // Recenter on the parameter whose n-th image has z = 0, one iterate at a
        // time along the word of B so every stage stays inside the charts.
        std::vector<cplx> zeta(n + 1, 0.0);
        for (int k = n; k-- > 1;) zeta[k] = branch_inverse(F3.skew().p, B.word[k % B.word.size()], zeta[k + 1], cfg.eta);
        cplx e0 = 0.0;
        Vec3 d0, X0;
        for (int k = 1; k <= n; ++k)
            for (int it = 0; it < 20; ++it) {
                X0 = image(e0, k, &d0);
                cplx de = (X0[0] - zeta[k]) / d0[0];
                e0 -= de;
                if (std::abs(de) * std::abs(d0[0]) <= 1e-12) break;
            }
        X0 = image(e0, n, &d0);
        if (!(std::abs(X0[0]) <= 1e-6)) {
            last = "no point of the arc image over z = 0 at n = " + std::to_string(n);
            continue;
        }
        std::vector<cplx> s2(UUCurve::samples), s3(UUCurve::samples);
        bool ok = true;
        for (int m = 0; m < UUCurve::samples && ok; ++m) {
            cplx target = UUCurve::root(m);
            cplx s = e0 + (target - X0[0]) / d0[0];
            Vec3 X, d;
            for (int it = 0; it < 12; ++it) {
                X = image(s, n, &d);
                cplx ds = (X[0] - target) / d[0];
                s -= ds;
                if (std::abs(ds) * std::abs(d[0]) <= 1e-12) break;
            }
            X = image(s, n, &d);
            if (!(std::abs(X[0] - target) <= 1e-6)) ok = false;
            // First-order correction for the small miss in z.
            cplx dz = target - X[0];
            s2[m] = X[1] + d[1] / d[0] * dz;
            s3[m] = X[2] + d[2] / d[0] * dz;
        }
        if (!ok) {
            last = "reparametrization over z failed at n = " + std::to_string(n);
            continue;
        }
        UUCurve c = UUCurve::from_samples(std::move(s2), std::move(s3));
        double top = 0.0;
        for (cplx v : c.s3) top = std::max(top, std::abs(v));
        if (uu_validate(c) && top <= 1.0 / 3.0) {
            r.curve = std::move(c);
            return r;
        }
        last = "image at n = " + std::to_string(n) + " is not a uu-curve in the slab";
    }
    throw std::runtime_error("unstable_to_uu: " + last);
}

CycleWitness verify_cycle(const Automorphism3& F, const CycleSeeds& seeds, const ModelConfig& cfg, bool with_cones) {
    CycleWitness W;
    W.F = F;
    W.seeds = seeds;
    W.degree = degree_of(F);
    try {
        W.S = newton_fixed(F, seeds.S, 1);
        W.A = newton_fixed(F, seeds.A, 1);
        W.A.word = {0};
        W.B = newton_periodic(F, seeds.B_orbit);
        W.B.word = seeds.B_word;
    } catch (const std::exception& e) {
        W.failures.push_back(std::string("saddles: ") + e.what());
        return W;
    }
    if (W.S.index != 1) W.failures.push_back("saddles: index of S is " + std::to_string(W.S.index));
    if (W.A.index != 2 || W.B.index != 2) W.failures.push_back("saddles: horseshoe points are not of index 2");

    try {
        TransverseResult tr = transverse_leg(F, W.S, seeds.source, cfg);
        W.transverse_point = tr.point;
        W.margin = tr.margin;
        W.transverse_residual = tr.residual;
        W.seeds.source = tr.source;
        W.transverse_ok = tr.margin >= 1e-3;
        if (!W.transverse_ok) W.failures.push_back("transverse leg: margin below 1e-3");
    } catch (const std::exception& e) {
        W.failures.push_back(std::string("transverse leg: ") + e.what());
    }

    try {
        UUResult uu = unstable_to_uu(F, W.S, W.B, seeds.s_N, cfg);
        W.uu_curve = uu.curve;
        W.n_iterate = uu.n;
        W.blender_trace = intersect_stable(F, uu.curve, 10, 1e-10, cfg);
        W.blender_ok = true;
    } catch (const std::exception& e) {
        W.failures.push_back(std::string("blender leg: ") + e.what());
    }

    if (with_cones) {
        W.cones = verify_cones(F, default_branches(cfg), skew_cone_pairs(cfg), 8);
        if (!W.cones->certified) W.failures.push_back("cones: C_u/C_uu/C_s certificates incomplete");
    }
    return W;
}

Construction build_cycle(const Automorphism3& F1, const BumpSet& bumps, const ModelConfig& cfg) {
    Construction c;
    c.leg1 = build_F2(F1, bumps, cfg);
    c.leg2 = prepare_leg2(c.leg1.F2, cfg);
    c.mu = solve_mu(c.leg1.F2, bumps, c.leg2, cfg);
    CycleSeeds seeds{c.leg2.S2.location, c.leg1.A.location, c.mu.B3.orbit, c.mu.B3.word, c.leg1.anchor, c.mu.s_N};
    c.witness = verify_cycle(c.mu.F3, seeds, cfg, true);
    c.witness.M1 = c.leg1.M1;
    c.witness.N1 = c.leg1.N1;
    c.witness.M2 = c.leg2.M2;
    c.witness.N2 = c.leg2.N2;
    c.witness.mu0 = c.mu.mu0;
    return c;
}

Automorphism3 perturb(const Automorphism3& F, double delta, std::uint64_t seed) {
    if (delta == 0.0) return F;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    auto payload = [&] {
        std::vector<std::vector<cplx>> grid(3, std::vector<cplx>(3, 0.0));
        double sup = 0.0;
        for (int i = 0; i <= 2; ++i)
            for (int k = 0; i + k <= 2; ++k) {
                grid[i][k] = cplx(nd(rng), nd(rng));
                sup += std::abs(grid[i][k]) * std::pow(5.0, i + k);
            }
        for (auto& row : grid)
            for (cplx& c : row) c *= delta / sup;
        return Poly2::from_grid(grid);
    };
    Automorphism3 G = F.then(ShearZ{payload()}).then(ShearW{payload()}).then(ShearT{payload()});
    G.label = F.label + "+pert";
    return G;
}

SweepReport sweep(const Automorphism3& F3, const CycleSeeds& seeds, double delta, int trials, std::uint64_t seed,
                  const ModelConfig& cfg) {
    if (trials < 1) throw std::invalid_argument("sweep: trials must be positive");
    SweepReport rep;
    rep.trials = trials;
    rep.delta = delta;
    std::seed_seq sq{seed};
    std::vector<std::uint64_t> sub(trials);
    {
        std::vector<std::uint32_t> raw(2 * trials);
        sq.generate(raw.begin(), raw.end());
        for (int i = 0; i < trials; ++i) sub[i] = (std::uint64_t(raw[2 * i]) << 32) | raw[2 * i + 1];
    }
    for (int i = 0; i < trials; ++i) {
        CycleWitness w = verify_cycle(perturb(F3, delta, sub[i]), seeds, cfg, false);
        rep.transverse_successes += w.transverse_ok;
        rep.blender_successes += w.blender_ok;
        rep.both += w.both_legs();
        rep.margins.push_back(w.margin);
        for (const auto& f : w.failures) rep.failures.push_back("trial " + std::to_string(i) + ": " + f);
    }
    return rep;
}

}  // namespace hc
