#pragma once

#include <optional>
#include <random>
#include <vector>

#include "hcycle/automap.hpp"

namespace hc {

// Holomorphic graph z -> (z, c2(z), c3(z)) over the unit disk, stored as
// truncated Taylor series fitted to samples at the 256th roots of unity.
struct UUCurve {
    static constexpr int samples = 256;

    std::vector<cplx> c2, c3;  // coefficients, degree samples - 1
    std::vector<cplx> s2, s3;  // boundary samples
    double tail_bound = 0.0;

    static UUCurve constant(cplx c2, cplx c3);
    static UUCurve from_samples(std::vector<cplx> s2, std::vector<cplx> s3);
    template <class F2, class F3>
    static UUCurve from_functions(F2 f2, F3 f3) {
        std::vector<cplx> a(samples), b(samples);
        for (int m = 0; m < samples; ++m) {
            cplx z = root(m);
            a[m] = f2(z);
            b[m] = f3(z);
        }
        return from_samples(std::move(a), std::move(b));
    }
    static cplx root(int m);

    cplx at2(cplx z) const;
    cplx at3(cplx z) const;
    cplx d2(cplx z) const;
    cplx d3(cplx z) const;
    Vec3 point(cplx z) const { return {z, at2(z), at3(z)}; }
    // Upper bound of the neglected derivative terms on the closed unit disk.
    double deriv_tail() const { return samples * tail_bound; }
};

struct CoverChoice {
    int j;
    cplx tau;
};

// Inverse of the backward fiber model L_j(t) = 0.9 t - 0.09 i^j.
cplx fiber_model(int j, cplx t);
CoverChoice covering_select(cplx t);

struct CoveringReport {
    double lhs = 0.0, middle = 0.2, rhs = 0.0;
    long points = 0;
    long failures = 0;
    std::optional<cplx> witness;
    bool ok = false;
};

CoveringReport verify_covering(int grid_n);

bool uu_validate(const UUCurve& c);

struct StepResult {
    int j = 0;
    cplx tau;
    UUCurve next;
    std::vector<cplx> preimages;  // parameters on the input curve of the new boundary samples
};

StepResult step(const Automorphism3& F, const UUCurve& c, const ModelConfig& cfg);

// Parameter on c whose image under F has first coordinate target, seeded on branch j.
cplx pull_parameter(const Automorphism3& F, const UUCurve& c, int j, cplx target);

struct BlenderTrace {
    std::vector<int> itinerary;
    std::vector<UUCurve> curves;
    std::vector<double> t_diameters;  // diameters of the nested pieces of the first curve
    Vec3 point;
    cplx parameter;  // z with point = curves[0].point(z)
    int orbit_check_depth = 0;
};

// Constant levels w in D(0, 0.9), t in D(0, 0.45) plus a cubic perturbation
// of slope below 1e-3 on the closed unit disk.
UUCurve random_uu_curve(std::mt19937_64& rng);

BlenderTrace intersect_stable(const Automorphism3& F, const UUCurve& c, int n_max, double tol, const ModelConfig& cfg);

}  // namespace hc
