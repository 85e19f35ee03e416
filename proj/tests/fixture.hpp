#pragma once

#include "hcycle/cycle.hpp"

namespace hc::test {

// Fits and maps at the default config, built once per test binary.
struct Model {
    ModelConfig cfg;
    FitResult p, q;
    Automorphism3 F1;
};

inline const Model& model() {
    static const Model m = [] {
        ModelConfig cfg;
        FitResult p = make_p(cfg), q = make_q(cfg);
        Automorphism3 F1 = build_F1(p.poly, q.poly, cfg);
        return Model{cfg, std::move(p), std::move(q), std::move(F1)};
    }();
    return m;
}

struct Legs {
    BumpSet bumps;
    Leg1 leg1;
    Leg2 leg2;
};

inline const Legs& legs() {
    static const Legs l = [] {
        const Model& m = model();
        BumpSet b = make_bumps(m.cfg);
        Leg1 l1 = build_F2(m.F1, b, m.cfg);
        Leg2 l2 = prepare_leg2(l1.F2, m.cfg);
        return Legs{std::move(b), std::move(l1), std::move(l2)};
    }();
    return l;
}

inline double dist(const Vec3& a, const Vec3& b) { return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]}); }

}  // namespace hc::test
