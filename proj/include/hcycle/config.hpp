#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace hc {

struct ModelConfig {
    double eta = 1e-4;
    double lambda = 10.0 / 9.0;
    std::complex<double> b = 1e-8;
    double eps = 1e-6;
    double zeta = 1e-6;
    double omega = 1e-2;
    double bump_tol = 1e-6;
    double mu_search_radius = 0.1;
    double delta_pert = 1e-6;

    // Starting degrees; fits grow by half until certified or the budget is hit.
    int p_degree = 80;
    int q_degree = 80;
    int bump_degree = 150;
    int degree_budget = 500;
    int samples_factor = 4;

    // Off-disks of the leg-2 bump cover the orbit levels 3 + lambda^k, k = 1..chain_length.
    int chain_length = 15;

    double newton_tol = 1e-12;
    std::uint64_t seed = 1;

    void validate() const;
};

}  // namespace hc
