#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hcycle/hyperbolic.hpp"
#include "linalg.hpp"

namespace hc {

const char* patch_kind_name(GraphPatch::Kind k) {
    switch (k) {
        case GraphPatch::Kind::surface_over_zw: return "surface_over_zw";
        case GraphPatch::Kind::surface_over_zt: return "surface_over_zt";
        case GraphPatch::Kind::curve_over_w: return "curve_over_w";
        case GraphPatch::Kind::curve_over_t: return "curve_over_t";
    }
    return "?";
}

namespace {

// Points spread over the closed disk D(c, r): a sunflower pattern.
std::vector<cplx> disk_samples(cplx c, double r, int n) {
    std::vector<cplx> out;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) out.push_back(c + r * std::sqrt((k + 0.5) / n) * std::polar(1.0, k * golden));
    return out;
}

struct Propagated {
    Vec3 end;
    Mat3 D;  // DF^k at the start point
};

Propagated push(const Automorphism3& F, Vec3 x, int k) {
    Mat3 D = identity3();
    for (int i = 0; i < k; ++i) {
        D = mul(F.jacobian(x), D);
        x = F.apply(x);
    }
    return {x, D};
}

}  // namespace

// Graph t = sigma(z, w) of W^s_loc(S). The k-th graph transform iterate of the
// constant graph t = S_t is F^{-k}{t = S_t}, evaluated pointwise by Newton.
GraphPatch stable_surface_S(const Automorphism3& F, const SaddleData& S, int iters) {
    GraphPatch g;
    g.kind = GraphPatch::Kind::surface_over_zw;
    g.center[0] = g.center[1] = 3.0;
    g.radius[0] = g.radius[1] = 1.0;
    const cplx target = S.location[2];
    auto used = std::make_shared<int>(0);
    g.eval = [F, target, iters, used](cplx z, cplx w) {
        cplx t = target, prev = target;
        double last_change = HUGE_VAL;
        int growth = 0;
        Propagated pr{};
        for (int k = 1; k <= iters; ++k) {
            for (int it = 0; it < 40; ++it) {
                pr = push(F, {z, w, t}, k);
                cplx dt = (pr.end[2] - target) / pr.D[8];
                t -= dt;
                if (std::abs(dt) <= 1e-16 * (1.0 + std::abs(t))) break;
            }
            double change = std::abs(t - prev);
            prev = t;
            *used = std::max(*used, k);
            if (k > 1 && change <= 1e-13) break;
            growth = change > last_change ? growth + 1 : 0;
            if (growth >= 3) throw std::runtime_error("stable_surface_S: graph transform is not contracting");
            last_change = change;
        }
        pr = push(F, {z, w, t}, *used);
        GraphPatch::Value v;
        v.point = {z, w, t};
        v.d1 = -pr.D[6] / pr.D[8];
        v.d2 = -pr.D[7] / pr.D[8];
        return v;
    };
    for (cplx z : disk_samples(3.0, 0.95, 6))
        for (cplx w : disk_samples(3.0, 0.95, 6)) {
            Vec3 x = g.eval(z, w).point;
            g.samples.push_back(x);
            Vec3 y = F.apply(x);
            if (std::abs(y[0] - 3.0) < 1.0 && std::abs(y[1] - 3.0) < 1.0)
                g.invariance_residual = std::max(g.invariance_residual, std::abs(y[2] - g.eval(y[0], y[1]).point[2]));
        }
    g.iterations = *used;
    return g;
}

// Curve s -> point of W^u_loc(S) with third coordinate S_t + s: push a point
// of the unstable eigenline forward k times and Newton on its eigen parameter.
GraphPatch unstable_curve_S(const Automorphism3& F, const SaddleData& S, int iters) {
    GraphPatch g;
    g.kind = GraphPatch::Kind::curve_over_t;
    g.center[0] = S.location[2];
    g.radius[0] = 1.0;
    const cplx mu = S.eigenvalues[2];
    Vec3 vu = S.eigenvectors[2];
    if (std::abs(vu[2]) < 1e-3) throw std::runtime_error("unstable_curve_S: unstable direction not transverse to t = const");
    for (cplx& c : vu) c /= S.eigenvectors[2][2];
    const Vec3 base = S.location;
    const int k = iters;
    g.eval = [F, base, vu, mu, k](cplx s, cplx) {
        cplx target = base[2] + s;
        cplx tau = s / std::pow(mu, k);
        Propagated pr{};
        for (int it = 0; it < 40; ++it) {
            Vec3 x0{base[0] + tau * vu[0], base[1] + tau * vu[1], base[2] + tau * vu[2]};
            pr = push(F, x0, k);
            cplx d = pr.D[6] * vu[0] + pr.D[7] * vu[1] + pr.D[8] * vu[2];
            cplx step = (pr.end[2] - target) / d;
            tau -= step;
            if (std::abs(step) <= 1e-12 * std::abs(tau) + 1e-300) break;
        }
        Vec3 x0{base[0] + tau * vu[0], base[1] + tau * vu[1], base[2] + tau * vu[2]};
        pr = push(F, x0, k);
        Vec3 tan = mul(pr.D, vu);
        GraphPatch::Value v;
        v.point = pr.end;
        v.point[2] = target;
        for (cplx& c : tan) c /= tan[2];
        v.tangent = tan;
        v.d1 = tan[0];
        v.d2 = tan[1];
        return v;
    };
    for (cplx s : disk_samples(0.0, 0.85, 64)) {
        Vec3 x = g.eval(s, 0.0).point;
        g.samples.push_back(x);
        Vec3 y = F.apply(x);
        cplx s1 = y[2] - base[2];
        if (std::abs(s1) < 1.0) g.invariance_residual = std::max(g.invariance_residual, norm(sub(y, g.eval(s1, 0.0).point)));
    }
    g.iterations = k;
    return g;
}

namespace {

// Backward shooting for W^u_loc: x_{-d} = (z, w_ref, t) with z, t free, then
// full points up to x_{-1}, and w_0. Equations F(x_{-i}) = x_{-i+1}.
struct UnstableShooter {
    Automorphism3 F;
    std::vector<int> sym;  // sym[i-1] = j_{-i}, i = 1..depth
    int depth;
    double lambda;

    struct Result {
        std::vector<Vec3> xs;  // x_{-depth} .. x_{-1}, x_0
        cplx dwz, dwt;
        double residual;
    };

    Result solve(cplx z, cplx t) const {
        const HenonSkew& h = F.skew();
        std::vector<cplx> zs(depth + 2);  // zs[i] = z_{-i}
        zs[0] = z;
        for (int i = 1; i <= depth + 1; ++i) zs[i] = branch_inverse(h.p, sym[(i - 1) % sym.size()], zs[i - 1]);
        std::vector<Vec3> xs(depth + 1);  // xs[i] = x_{-depth+i}
        cplx tt = t;
        for (int i = depth; i >= 0; --i) {
            int idx = depth - i;  // x_{-idx}
            xs[i] = {zs[idx], zs[idx + 1], tt};
            if (idx + 1 <= depth) tt = (tt - h.q(zs[idx + 1])) / lambda;
        }
        xs[depth][0] = z;
        xs[depth][2] = t;
        const cplx w_ref = xs[0][1];
        const int N = 3 * depth;
        // Unknowns: z_{-d}, t_{-d}, then x_{-d+1..-1} (3 each), then w_0.
        auto unpack = [&](const VecX& u) {
            xs[0] = {u(0), w_ref, u(1)};
            for (int i = 1; i < depth; ++i) xs[i] = {u(2 + 3 * (i - 1)), u(3 + 3 * (i - 1)), u(4 + 3 * (i - 1))};
            xs[depth] = {z, u(N - 1), t};
        };
        VecX u(N);
        u(0) = xs[0][0];
        u(1) = xs[0][2];
        for (int i = 1; i < depth; ++i)
            for (int c = 0; c < 3; ++c) u(2 + 3 * (i - 1) + c) = xs[i][c];
        u(N - 1) = xs[depth][1];
        auto col = [&](int i, int c) -> int {  // column of coordinate c of xs[i], -1 if fixed
            if (i == 0) return c == 0 ? 0 : (c == 2 ? 1 : -1);
            if (i == depth) return c == 1 ? N - 1 : -1;
            return 2 + 3 * (i - 1) + c;
        };
        MatX J(N, N);
        VecX G(N);
        auto assemble = [&] {
            J.setZero();
            for (int i = 0; i < depth; ++i) {
                Vec3 r = sub(F.apply(xs[i]), xs[i + 1]);
                Mat3 D = F.jacobian(xs[i]);
                for (int a = 0; a < 3; ++a) {
                    G(3 * i + a) = r[a];
                    for (int c = 0; c < 3; ++c) {
                        int ci = col(i, c);
                        if (ci >= 0) J(3 * i + a, ci) += D[3 * a + c];
                    }
                    int cn = col(i + 1, a);
                    if (cn >= 0) J(3 * i + a, cn) -= 1.0;
                }
            }
        };
        double res = HUGE_VAL;
        for (int it = 0; it < 50; ++it) {
            assemble();
            VecX d = J.partialPivLu().solve(-G);
            u += d;
            unpack(u);
            double step = d.cwiseAbs().maxCoeff();
            if (step <= 1e-15 * (1.0 + u.cwiseAbs().maxCoeff())) break;
        }
        assemble();
        res = G.cwiseAbs().maxCoeff();
        if (!(res <= 1e-10)) throw std::runtime_error("unstable_surface_K: shooting did not converge");
        auto lu = J.partialPivLu();
        VecX ez = VecX::Zero(N), et = VecX::Zero(N);
        ez(N - 3) = 1.0;  // d/dz of -x_0 in the last block is -e_1; moved to the right side
        et(N - 1) = 1.0;
        VecX dz = lu.solve(ez), dt = lu.solve(et);
        return {xs, dz(N - 1), dt(N - 1), res};
    }
};

}  // namespace

GraphPatch unstable_surface_K(const Automorphism3& F, const std::vector<int>& backward, const ModelConfig& cfg,
                              int depth) {
    if (backward.empty()) throw std::invalid_argument("unstable_surface_K: empty itinerary");
    GraphPatch g;
    g.kind = GraphPatch::Kind::surface_over_zt;
    UnstableShooter sh{F, backward, depth, F.skew().lambda};
    g.eval = [sh](cplx z, cplx t) {
        auto r = sh.solve(z, t);
        GraphPatch::Value v;
        v.point = r.xs.back();
        v.d1 = r.dwz;
        v.d2 = r.dwt;
        return v;
    };
    ConeSpec cu{ConeKind::C_u, 1e-3, 1.0};
    auto zs = disk_samples(0.0, 0.98, 32);
    for (cplx z : zs)
        for (cplx t : zs) {
            auto r = sh.solve(z, t);
            g.invariance_residual = std::max(g.invariance_residual, r.residual);
            if (!cone_member({1.0, r.dwz, 0.0}, cu) || !cone_member({0.0, r.dwt, 1.0}, cu))
                throw std::runtime_error("unstable_surface_K: tangent plane leaves C_u");
            if (g.samples.size() < 256) g.samples.push_back(r.xs.back());
        }
    // For a constant word the graph is invariant: F maps its part over
    // D(c_j, eta) back onto the graph.
    if (std::all_of(backward.begin(), backward.end(), [&](int j) { return j == backward[0]; })) {
        cplx c = branch_center(backward[0]);
        for (cplx z : disk_samples(c, 0.9 * cfg.eta, 16))
            for (cplx t : disk_samples(0.0, 0.5, 8)) {
                Vec3 x = g.eval(z, t).point;
                Vec3 y = F.apply(x);
                if (std::abs(y[0]) < 1.0 && std::abs(y[2]) < 1.0)
                    g.invariance_residual = std::max(g.invariance_residual, std::abs(y[1] - g.eval(y[0], y[2]).point[1]));
            }
    }
    g.iterations = depth;
    return g;
}

namespace {

// Forward shooting for W^s_loc: x_0 = (z, w, t) with w given, then x_1..x_N
// with z_N, t_N pinned to the periodic orbit point reached after N steps.
struct StableShooter {
    Automorphism3 F;
    std::vector<int> syms;  // j_0 .. j_N
    Vec3 end;               // periodic orbit point matching j_N
    int N;

    struct Result {
        std::vector<Vec3> xs;
        Vec3 tangent;
        double residual;
    };

    Result solve(cplx w) const {
        const HenonSkew& h = F.skew();
        std::vector<cplx> z(N + 1);
        for (int i = 0; i <= N; ++i) z[i] = branch_center(syms[i]);
        z[N] = end[0];
        for (int sweep = 0; sweep < 20; ++sweep)
            for (int i = N - 1; i >= 0; --i)
                z[i] = branch_inverse(h.p, syms[i], z[i + 1] - h.b * (i == 0 ? w : z[i - 1]));
        std::vector<Vec3> xs(N + 1);
        cplx t = end[2];
        for (int i = N; i >= 0; --i) {
            xs[i] = {z[i], i == 0 ? w : z[i - 1], t};
            if (i > 0) t = (t - h.q(z[i - 1])) / h.lambda;
        }
        const int U = 3 * N;
        // Unknowns: z_0, t_0, x_1..x_{N-1} (3 each), w_N.
        auto col = [&](int i, int c) -> int {
            if (i == 0) return c == 0 ? 0 : (c == 2 ? 1 : -1);
            if (i == N) return c == 1 ? U - 1 : -1;
            return 2 + 3 * (i - 1) + c;
        };
        VecX u(U);
        for (int i = 0; i <= N; ++i)
            for (int c = 0; c < 3; ++c)
                if (col(i, c) >= 0) u(col(i, c)) = xs[i][c];
        MatX J(U, U);
        VecX G(U);
        auto assemble = [&] {
            J.setZero();
            for (int i = 0; i < N; ++i) {
                Vec3 r = sub(F.apply(xs[i]), xs[i + 1]);
                Mat3 D = F.jacobian(xs[i]);
                for (int a = 0; a < 3; ++a) {
                    G(3 * i + a) = r[a];
                    for (int c = 0; c < 3; ++c)
                        if (col(i, c) >= 0) J(3 * i + a, col(i, c)) += D[3 * a + c];
                    if (col(i + 1, a) >= 0) J(3 * i + a, col(i + 1, a)) -= 1.0;
                }
            }
        };
        for (int it = 0; it < 50; ++it) {
            assemble();
            VecX d = J.partialPivLu().solve(-G);
            u += d;
            for (int i = 0; i <= N; ++i)
                for (int c = 0; c < 3; ++c)
                    if (col(i, c) >= 0) xs[i][c] = u(col(i, c));
            if (d.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + u.cwiseAbs().maxCoeff())) break;
        }
        assemble();
        double res = G.cwiseAbs().maxCoeff();
        if (!(res <= 1e-10)) throw std::runtime_error("stable_curve_K: shooting did not converge");
        // dG/dw = DF(x_0) e_2 in the first block.
        VecX rhs = VecX::Zero(U);
        Mat3 D0 = F.jacobian(xs[0]);
        for (int a = 0; a < 3; ++a) rhs(a) = -D0[3 * a + 1];
        VecX d = J.partialPivLu().solve(rhs);
        return {xs, {d(0), 1.0, d(1)}, res};
    }
};

}  // namespace

GraphPatch stable_curve_K(const Automorphism3& F, const std::vector<int>& prefix, const SaddleData& B, int w_samples,
                          int N) {
    if (B.word.empty()) throw std::invalid_argument("stable_curve_K: periodic orbit without a word");
    const int per = static_cast<int>(B.word.size());
    std::vector<int> syms;
    for (int i = 0; i <= N; ++i) {
        int k = i - static_cast<int>(prefix.size());
        syms.push_back(k < 0 ? prefix[i] : B.word[k % per]);
    }
    int k_end = N - static_cast<int>(prefix.size());
    if (k_end < 0) throw std::invalid_argument("stable_curve_K: prefix longer than the segment");
    StableShooter sh{F, syms, B.orbit[k_end % per], N};
    GraphPatch g;
    g.kind = GraphPatch::Kind::curve_over_w;
    g.eval = [sh](cplx w, cplx) {
        auto r = sh.solve(w);
        GraphPatch::Value v;
        v.point = r.xs[0];
        v.tangent = r.tangent;
        v.d1 = r.tangent[0];
        v.d2 = r.tangent[2];
        return v;
    };
    ConeSpec cs{ConeKind::C_s, 1e-3, std::abs(F.skew().b)};
    std::vector<int> failed;
    auto ws = disk_samples(0.0, 0.98, w_samples);
    for (int k = 0; k < w_samples; ++k) {
        try {
            auto r = sh.solve(ws[k]);
            g.invariance_residual = std::max(g.invariance_residual, r.residual);
            if (!cone_member(r.tangent, cs)) throw std::runtime_error("stable_curve_K: tangent leaves C_s");
            g.samples.push_back(r.xs[0]);
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()).find("C_s") != std::string::npos) throw;
            failed.push_back(k);
        }
    }
    if (!failed.empty()) {
        std::string msg = "stable_curve_K: shooting failed at samples";
        for (int k : failed) msg += " " + std::to_string(k);
        throw std::runtime_error(msg);
    }
    g.iterations = N;
    return g;
}

}  // namespace hc
