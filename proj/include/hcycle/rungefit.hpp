#pragma once

#include <string>
#include <vector>

#include "hcycle/config.hpp"
#include "hcycle/poly.hpp"

namespace hc {

struct DiskSpec {
    cplx center;
    double radius = 1.0;

    DiskSpec() = default;
    DiskSpec(cplx c, double r);
    DiskSpec scaled(double f) const { return {center, radius * f}; }
    bool contains(cplx z) const { return std::abs(z - center) <= radius; }
};

bool disjoint(const DiskSpec& a, const DiskSpec& b);

struct Piece {
    DiskSpec disk;
    Poly1 target;
};

struct PiecewiseTarget {
    std::vector<Piece> pieces;

    // Throws unless disks are pairwise disjoint.
    void check() const;
};

struct SupBound {
    double value_err = 0.0;
    double deriv_err = 0.0;
    bool certified = false;
};

struct FitReport {
    std::string name;
    int degree = 0;
    std::vector<DiskSpec> disks;
    std::vector<double> value_err;
    std::vector<double> deriv_err;
    double tol = 0.0;
    bool certified = false;
};

// Discrete least squares over boundary samples of every disk, via Arnoldi
// orthogonalisation; charts are added on each disk.
Poly1 fit_polynomial(const PiecewiseTarget& target, int degree, int samples_per_disk);

// Rigorous bounds of sup |p - target| and sup |p' - target'| on the closed
// disk, from interval enclosures of boundary arcs.
SupBound certify_sup(const Poly1& p, const Poly1& target, const DiskSpec& disk, double tol);

// The four tiny disks D_j = D(i^j / 4, eta) and D_4 = D(3, 1).
DiskSpec branch_disk(const ModelConfig& cfg, int j);
cplx branch_center(int j);
// l_j(z) = (z - c_j) / eta for j < 4, l_4(z) = 3 + eta (z - 3).
Poly1 affine_model(const ModelConfig& cfg, int j);

struct FitResult {
    Poly1 poly;
    FitReport report;
};

FitResult make_p(const ModelConfig& cfg);
FitResult make_q(const ModelConfig& cfg);
FitResult make_bump(const DiskSpec& on, const std::vector<DiskSpec>& off, const ModelConfig& cfg,
                    const std::string& name = "bump");

// Solves p(z) = target near c_j by Newton from l_j^{-1}(target).
cplx branch_inverse(const Poly1& p, int j, cplx target, double eta = 1e-4);

// Fixed point of p near `seed`.
cplx poly_fixed_point(const Poly1& p, cplx seed);

}  // namespace hc
