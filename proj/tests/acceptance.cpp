// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "hcycle/cycle.hpp"
#include "report_json.hpp"

using namespace hc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_coord_dist(const Vec3& a, const Vec3& b) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double c3_range(const UUCurve& c) {
    double r = 0.0;
    for (cplx v : c.s3) r = std::max(r, std::abs(v));
    return r + c.tail_bound;
}

// Runs fn, turning an exception into a failed line.
void guarded(int id, const char* name, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    const ModelConfig cfg;
    const Clock::time_point start = Clock::now();

    guarded(1, "covering inequality", [&] {
        auto t0 = Clock::now();
        CoveringReport r = verify_covering(100);
        double dt = seconds_since(t0);
        bool ok = r.ok && std::abs(r.lhs - 0.1944604) <= 1e-6 && std::abs(r.rhs - 0.2000773) <= 1e-6 &&
                  r.points == 10000 && r.failures == 0 && dt < 1.0;
        report(1, "covering inequality", ok,
               fmt("%.7f < 0.2 < %.7f, %ld/%ld grid points covered, %.3f s (limit 1 s)", r.lhs, r.rhs,
                   r.points - r.failures, r.points, dt));
    });

    // Fits are shared by everything below.
    auto t_fit = Clock::now();
    FitResult p = make_p(cfg), q = make_q(cfg);
    double fit_time = seconds_since(t_fit);
    guarded(2, "approximation certificates", [&] {
        double worst_v = 0.0, worst_d = 0.0;
        bool certified = p.report.certified && q.report.certified;
        for (const FitResult* f : {&p, &q})
            for (std::size_t i = 0; i < f->report.disks.size(); ++i) {
                worst_v = std::max(worst_v, f->report.value_err[i]);
                worst_d = std::max(worst_d, f->report.deriv_err[i]);
            }
        cplx z = poly_fixed_point(p.poly, 3.0), mult = p.poly.deriv(z);
        bool ok = certified && worst_v <= 1e-6 && worst_d <= 1e-6 && std::abs(z - 3.0) <= 1e-3 &&
                  std::abs(mult - 1e-4) <= 1e-3 && fit_time < 60.0;
        report(2, "approximation certificates", ok,
               fmt("value err %.2e, deriv err %.2e (limit 1e-6), fixed point %.6f%+.1ei, multiplier %.3e, %.1f s "
                   "(limit 60 s)",
                   worst_v, worst_d, z.real(), z.imag(), std::abs(mult), fit_time));
    });

    const Automorphism3 F1 = build_F1(p.poly, q.poly, cfg);
    auto t_cycle = Clock::now();
    std::optional<Construction> con;
    std::optional<BumpSet> bumps;
    try {
        bumps = make_bumps(cfg);
        con = build_cycle(F1, *bumps, cfg);
    } catch (const std::exception& e) {
        std::printf("cycle construction failed: %s\n", e.what());
    }
    double cycle_time = seconds_since(t_cycle);
    std::printf("(cycle construction %.1f s)\n", cycle_time);

    guarded(3, "hyperbolicity certificates", [&] {
        if (!con) throw std::runtime_error("no cycle construction");
        auto t0 = Clock::now();
        auto branches = default_branches(cfg);
        long boxes = 0;
        auto count = [&](const ConeReport& r) {
            for (const auto& pr : r.pairs) boxes += pr.boxes + pr.unknown + pr.failed;
            return r.certified;
        };
        bool h = count(verify_cones(henon_factor(p.poly, cfg.b), branches, henon_cone_pairs(), 8, true));
        bool f1 = count(verify_cones(F1, branches, skew_cone_pairs(cfg), 8));
        bool f2 = count(verify_cones(con->leg1.F2, branches, skew_cone_pairs(cfg), 8));
        bool f3 = count(verify_cones(con->mu.F3, branches, skew_cone_pairs(cfg), 8));
        SinkReport s = verify_sink_basin(p.poly, cfg.b, 64);
        double dt = seconds_since(t0);
        bool sink = s.invariance == Verdict::yes && s.contraction == Verdict::yes && s.max_image_radius <= 1.0 &&
                    s.h2_norm_bound <= 0.5;
        bool ok = h && f1 && f2 && f3 && sink && boxes <= 1000000 && dt < 600.0;
        report(3, "hyperbolicity certificates", ok,
               fmt("H %s, F1 %s, F2 %s, F3 %s, %ld boxes (limit 1e6), sink image radius %.4f, |DH^2| <= %.2e, "
                   "%.1f s (limit 600 s)",
                   h ? "yes" : "no", f1 ? "yes" : "no", f2 ? "yes" : "no", f3 ? "yes" : "no", boxes,
                   s.max_image_radius, s.h2_norm_bound, dt));
    });

    guarded(4, "saddle data", [&] {
        SaddleData S = newton_fixed(F1, {3.0, 3.0, 3.0}, 1);
        SaddleData A = newton_fixed(F1, {0.25, 0.25, -0.9}, 1);
        double ds = max_coord_dist(S.location, {3.0, 3.0, 3.0}), da = max_coord_dist(A.location, {0.25, 0.25, -0.9});
        double e0 = std::abs(S.eigenvalues[0]), e1 = std::abs(S.eigenvalues[1]), e2 = std::abs(S.eigenvalues[2]);
        bool ok = ds <= 0.05 && e0 <= 1e-3 && e1 <= 1e-3 && std::abs(e2 - 10.0 / 9.0) <= 1e-2 && S.index == 1 &&
                  da <= 1e-3 && A.index == 2;
        report(4, "saddle data", ok,
               fmt("S off by %.2e, |eig| = %.2e %.2e %.6f, index %d; A off by %.2e, index %d", ds, e0, e1, e2, S.index,
                   da, A.index));
    });

    guarded(5, "blender engine", [&] {
        auto t0 = Clock::now();
        std::mt19937_64 rng(cfg.seed);
        auto branches = default_branches(cfg);
        int ok_count = 0, max_steps = 0;
        double worst = 0.0;
        std::string first_error;
        for (int i = 0; i < 100; ++i) {
            UUCurve c = random_uu_curve(rng);
            try {
                BlenderTrace tr = intersect_stable(F1, c, 6, 1e-10, cfg);
                for (const UUCurve& k : tr.curves)
                    if (!uu_validate(k) || c3_range(k) > 0.5) throw std::runtime_error("intermediate curve invalid");
                Vec3 x = tr.point;
                for (int j : tr.itinerary) {
                    auto m = branch_membership(F1, branches, x);
                    if (!m || m->j != j) throw std::runtime_error("orbit leaves its word");
                    x = F1.apply(x);
                }
                if (tr.t_diameters.back() > 1e-10) throw std::runtime_error("diameter above 1e-10");
                ++ok_count;
                max_steps = std::max<int>(max_steps, tr.itinerary.size());
                worst = std::max(worst, tr.t_diameters.back());
            } catch (const std::exception& e) {
                if (first_error.empty()) first_error = e.what();
            }
        }
        double dt = seconds_since(t0);
        bool ok = ok_count == 100 && max_steps <= 6 && dt < 300.0;
        report(5, "blender engine", ok,
               fmt("%d/100 curves, max %d steps (limit 6), final diameter <= %.2e, %.1f s (limit 300 s)%s%s", ok_count,
                   max_steps, worst, dt, first_error.empty() ? "" : "; first error: ", first_error.c_str()));
    });

    guarded(6, "cycle leg 1", [&] {
        if (!con) throw std::runtime_error("no cycle construction");
        const Leg1& l = con->leg1;
        TransverseResult t = transverse_leg(l.F2, l.S, l.anchor, cfg);
        double d = max_coord_dist(t.point, {3.9, 3.9, 3.0});
        bool ok = d <= 0.1 && t.residual <= 1e-10 && t.margin >= 1e-3;
        report(6, "cycle leg 1", ok,
               fmt("point off (3.9, 3.9, 3) by %.2e, residual %.2e (limit 1e-10), margin %.3f (limit 1e-3)", d,
                   t.residual, t.margin));
    });

    guarded(7, "cycle leg 2", [&] {
        if (!con) throw std::runtime_error("no cycle construction");
        const MuSolution& mu = con->mu;
        const CycleWitness& w = con->witness;
        double range = c3_range(w.uu_curve);
        bool mu_ok = std::abs(mu.mu0) < 0.1 && mu.gap <= 1e-10 && mu.tangent_error <= 0.1;
        bool uu_ok = uu_validate(w.uu_curve) && range <= 1.0 / 3.0 && w.n_iterate <= 10 * w.B.period;
        bool ok = mu_ok && uu_ok && w.blender_ok;
        report(7, "cycle leg 2", ok,
               fmt("|mu0| = %.2e, gap %.2e (limit 1e-10), tangent error %.2e (limit 0.1), uu-curve at n = %d "
                   "(limit %d) with |c3| <= %.3f, blender %s after %zu steps",
                   std::abs(mu.mu0), mu.gap, mu.tangent_error, w.n_iterate, 10 * w.B.period, range,
                   w.blender_ok ? "reached" : "failed", w.blender_trace.itinerary.size()));
    });

    guarded(8, "robustness sweep", [&] {
        if (!con) throw std::runtime_error("no cycle construction");
        auto t0 = Clock::now();
        const CycleSeeds& s = con->witness.seeds;
        std::string base = json(verify_cycle(con->mu.F3, s, cfg, false)).dump();
        std::string zero = json(verify_cycle(perturb(con->mu.F3, 0.0, cfg.seed), s, cfg, false)).dump();
        SweepReport r = sweep(con->mu.F3, s, 1e-6, 20, cfg.seed, cfg);
        double dt = seconds_since(t0) + cycle_time;
        bool ok = r.both == 20 && base == zero && dt < 1800.0;
        report(8, "robustness sweep", ok,
               fmt("delta 1e-6: %d/20 leg 1, %d/20 leg 2, %d/20 both; delta 0 %s; %.1f s with construction "
                   "(limit 1800 s)",
                   r.transverse_successes, r.blender_successes, r.both, base == zero ? "byte-identical" : "differs",
                   dt));
    });

    guarded(9, "degree report", [&] {
        if (!con) throw std::runtime_error("no cycle construction");
        DegreeReport a = degree_of(con->mu.F3);
        Automorphism3 again = build_F3(con->leg1.F2, *bumps, con->leg2, con->mu.mu0, cfg);
        DegreeReport b = degree_of(again);
        bool ok = a.value > 0 && a.value == b.value && a.value == con->witness.degree.value;
        report(9, "degree report", ok,
               fmt("deg F3 = %lld (bound %lld, %s), rebuild gives %lld", a.value, a.bound,
                   a.exact ? "no cancellation possible" : "cancellation not excluded", b.value));
    });

    std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
