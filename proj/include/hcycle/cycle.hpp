#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcycle/blender.hpp"
#include "hcycle/hyperbolic.hpp"
#include "hcycle/rungefit.hpp"

namespace hc {

// Bump polynomials of the two legs.
//  anchor:  1 near the leg-1 anchor level a1 = -2, used in z and in t
//  fan:     1 near z = 3.9, moves w and t onto W^s(S)
//  lift:    1 near the leg-2 level gamma2 in t, moves w to beta'2
//  land:    1 near w = beta'2, moves t and z onto W^s(B)
struct BumpSet {
    FitResult anchor, fan, lift, land;
};

struct LegConstants {
    double a1 = -2.0;       // first coordinate of M1
    double T = -2.0;        // intermediate t-level of the leg-1 shears
    double alpha1p = 3.9;   // alpha'_1
    double beta2p = -0.9;   // beta'_2
    double gamma2 = 0.0;    // 3 + lambda^(K+1)
    int pushes = 0;         // K + 1
};

LegConstants leg_constants(const ModelConfig& cfg);
std::vector<DiskSpec> chain_disks(const ModelConfig& cfg);
BumpSet make_bumps(const ModelConfig& cfg);

struct Leg1 {
    Automorphism3 F2;
    SaddleData S, A;
    Vec3 M1, N1;
    Vec3 anchor;  // point of W^u_loc(A) with F1(anchor) = M1
    double gamma1p = 0.0;
};

Leg1 build_F2(const Automorphism3& F1, const BumpSet& bumps, const ModelConfig& cfg);

struct TransverseResult {
    Vec3 point;
    Vec3 source;  // the point of W^u_loc(A) mapped to `point`
    double margin = 0.0;
    double residual = 0.0;
};

// W^s_loc(S) and F(W^u_loc(A)) meet on the slice z = slice_z.
TransverseResult transverse_leg(const Automorphism3& F, const SaddleData& S, const Vec3& source_seed,
                                const ModelConfig& cfg, cplx slice_z = 3.9);

// The arc s -> F^pushes(point of W^u_loc(S) with third coordinate S_t + s).
struct UnstableArc {
    GraphPatch local;
    int pushes = 0;
    Automorphism3 F;

    Vec3 point(cplx s) const;
    Vec3 tangent(cplx s) const;  // d/ds
};

UnstableArc unstable_arc(const Automorphism3& F, const SaddleData& S, int pushes);

struct Leg2 {
    SaddleData S2, B2;
    Vec3 M2, N2;
    cplx s_M2;  // arc parameter of M2
};

Leg2 prepare_leg2(const Automorphism3& F2, const ModelConfig& cfg);
Automorphism3 build_F3(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, cplx mu, const ModelConfig& cfg);

struct MuSolution {
    cplx mu0;
    Vec3 N;
    Vec3 tangent;
    cplx s_N;
    double gap = 0.0;
    double slope_error = 0.0;  // |dG/dmu - 1|
    int winding = 0;
    double tangent_error = 0.0;
    SaddleData B3;
    Automorphism3 F3;
};

MuSolution solve_mu(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, const ModelConfig& cfg);
// Everything but the winding number and slope, at a given mu.
MuSolution evaluate_mu(const Automorphism3& F2, const BumpSet& bumps, const Leg2& leg, cplx mu, const ModelConfig& cfg);

struct UUResult {
    int n = 0;
    UUCurve curve;
    double premise_error = 0.0;  // max relative deviation of DF from the model differential
};

UUResult unstable_to_uu(const Automorphism3& F3, const SaddleData& S, const SaddleData& B, cplx s_N,
                        const ModelConfig& cfg);

// Everything needed to rerun the cycle on a nearby map.
struct CycleSeeds {
    Vec3 S, A;
    std::vector<Vec3> B_orbit;
    std::vector<int> B_word;
    Vec3 source;  // transverse-leg point of W^u_loc(A)
    cplx s_N;
};

struct CycleWitness {
    Automorphism3 F;
    SaddleData S, A, B;
    Vec3 M1{}, N1{}, M2{}, N2{};
    Vec3 transverse_point{};
    double margin = 0.0;
    double transverse_residual = 0.0;
    cplx mu0;
    UUCurve uu_curve;
    int n_iterate = 0;
    BlenderTrace blender_trace;
    DegreeReport degree;
    std::optional<ConeReport> cones;
    bool transverse_ok = false;
    bool blender_ok = false;
    std::vector<std::string> failures;
    CycleSeeds seeds;

    bool both_legs() const { return transverse_ok && blender_ok; }
};

CycleWitness verify_cycle(const Automorphism3& F, const CycleSeeds& seeds, const ModelConfig& cfg, bool with_cones);

struct Construction {
    Leg1 leg1;
    Leg2 leg2;
    MuSolution mu;
    CycleWitness witness;
};

Construction build_cycle(const Automorphism3& F1, const BumpSet& bumps, const ModelConfig& cfg);

struct SweepReport {
    int trials = 0;
    double delta = 0.0;
    int transverse_successes = 0;
    int blender_successes = 0;
    int both = 0;
    std::vector<std::string> failures;
    std::vector<double> margins;
};

// Random shears with degree <= 2 payloads of sup <= delta on D(0,5)^2.
Automorphism3 perturb(const Automorphism3& F, double delta, std::uint64_t seed);

SweepReport sweep(const Automorphism3& F3, const CycleSeeds& seeds, double delta, int trials, std::uint64_t seed,
                  const ModelConfig& cfg);

}  // namespace hc
