#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcycle/automap.hpp"
#include "hcycle/rungefit.hpp"

namespace hc {

struct SaddleData {
    Vec3 location{};
    int period = 1;
    std::vector<Vec3> orbit;  // location, F(location), ...
    std::array<cplx, 3> eigenvalues{};
    std::array<Vec3, 3> eigenvectors{};  // unit vectors, sorted by |eigenvalue| ascending
    int index = 0;
    double residual = 0.0;  // max |F(x_k) - x_{k+1}| around the cycle
    std::vector<int> word;  // branch symbols, when known
};

// Periodic orbit by multiple shooting from a seed orbit (seed.size() == period).
SaddleData newton_periodic(const Automorphism3& F, std::vector<Vec3> seed, int max_iter = 100);
SaddleData newton_fixed(const Automorphism3& F, const Vec3& seed, int period);

// The base Henon factor H(z, w) = (p(z) + b w, z), embedded as a skew product
// with zero fiber so that the 3x3 machinery applies (t stays 0).
Automorphism3 henon_factor(const Poly1& p, cplx b);

struct ConePair {
    ConeSpec in;
    ConeSpec out;
    double factor = 1.0;
    bool backward = false;  // use DF^{-1} on F(R^j)
    std::string name;
};

struct ConePairResult {
    std::string name;
    long boxes = 0;  // leaf boxes that were certified
    long unknown = 0;
    long failed = 0;
    int deepest = 0;
    double certified_fraction = 0.0;  // by volume of the initial cover
    bool certified = false;
    std::optional<Box3> witness;
};

struct ConeReport {
    std::vector<ConePairResult> pairs;
    bool certified = false;
};

// Adaptive box cover of the union of R^j (forward pairs) or F(R^j) (backward
// pairs); two_dim restricts to the Henon factor (t fixed to 0).
ConeReport verify_cones(const Automorphism3& F, const std::vector<BranchSpec>& branches,
                        const std::vector<ConePair>& pairs, int max_depth, bool two_dim = false);

struct CrossingReport {
    std::array<int, 4> winding{};
    std::array<bool, 4> full{};
    double max_abs_z_U = 0.0;  // over samples of U_j
    double max_abs_w_V = 0.0;  // over samples of V_j
    int transitions = 0;       // nonempty U_i n H^{-1}(U_j)
    bool ok = false;
};

CrossingReport verify_crossing(const Poly1& p, cplx b, const ModelConfig& cfg);

struct SinkReport {
    Verdict invariance = Verdict::unknown;
    Verdict contraction = Verdict::unknown;
    double max_image_radius = 0.0;  // sup |first coordinate of H - 3| over the cover
    double h2_norm_bound = 0.0;
    int boxes = 0;
    cplx sink;
    cplx multiplier;
};

SinkReport verify_sink_basin(const Poly1& p, cplx b, int grid = 16);

// Base orbit on the Henon horseshoe with the given symbols; z_k solves
// z_{k+1} = p(z_k) + b z_{k-1} with z_k near c_{j_k}.
struct HorseshoeOrbit {
    std::vector<int> symbols;
    std::vector<cplx> z;  // z[k] for k = 0..n-1, point k is (z[k], z[k-1])
    cplx w0;              // w-coordinate of point 0
    bool periodic = false;
};

HorseshoeOrbit horseshoe_orbit(const Poly1& p, cplx b, const std::vector<int>& symbols, bool periodic);

struct XiResult {
    cplx value;
    double radius = 0.0;
    double conjugacy_residual = 0.0;
};

// Fibered coordinate over point 0 of the orbit, from the nested disks pulled
// back along n forward steps.
XiResult fibered_xi(const Automorphism3& F1, const HorseshoeOrbit& orbit, int n);

// Holomorphic graph over a polydisk. Values and first derivatives come from
// the evaluator; samples are kept for export.
struct GraphPatch {
    enum class Kind { surface_over_zw, surface_over_zt, curve_over_w, curve_over_t };
    struct Value {
        Vec3 point;
        cplx d1 = 0.0;  // derivative of the graph coordinate(s) wrt the first parameter
        cplx d2 = 0.0;  // wrt the second parameter (surfaces)
        Vec3 tangent{};  // curves: full tangent vector
    };
    Kind kind = Kind::surface_over_zw;
    cplx center[2] = {0.0, 0.0};
    double radius[2] = {1.0, 1.0};
    std::function<Value(cplx, cplx)> eval;
    double invariance_residual = 0.0;
    int iterations = 0;
    std::vector<Vec3> samples;
};

const char* patch_kind_name(GraphPatch::Kind k);

// W^s_loc(S): graph t = sigma(z, w) over D(3,1)^2.
GraphPatch stable_surface_S(const Automorphism3& F, const SaddleData& S, int iters = 200);
// W^u_loc(S): curve over t in D(S_t, 1), third coordinate = S_t + s.
GraphPatch unstable_curve_S(const Automorphism3& F, const SaddleData& S, int iters = 60);
// W^u_loc of the horseshoe point with backward symbols (j_{-1}, j_{-2}, ...):
// graph w = gamma(z, t) over D^2.
GraphPatch unstable_surface_K(const Automorphism3& F, const std::vector<int>& backward, const ModelConfig& cfg,
                              int depth = 4);
// W^s_loc of the point with forward symbols prefix + periodic word of B:
// curve over w in D.
GraphPatch stable_curve_K(const Automorphism3& F, const std::vector<int>& prefix, const SaddleData& B,
                          int w_samples = 16, int N = 20);

// Affine-model t-coordinate of the periodic point with the given word.
cplx model_periodic_t(const std::vector<int>& word, double lambda);

SaddleData periodic_in_slab(const Automorphism3& F, const DiskSpec& t_disk, const ModelConfig& cfg,
                            int max_len = 8);

// Periodic orbit with the given word, seeded from the affine model.
SaddleData periodic_orbit(const Automorphism3& F, const std::vector<int>& word, const ModelConfig& cfg);

std::vector<ConePair> skew_cone_pairs(const ModelConfig& cfg);
std::vector<ConePair> henon_cone_pairs();

}  // namespace hc
