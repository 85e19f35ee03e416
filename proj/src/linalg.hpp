#pragma once

#include <Eigen/Dense>

#include "hcycle/ivbox.hpp"

namespace hc {

using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline void put_block(MatX& J, int r, int c, const Mat3& m) {
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) J(r + i, c + k) = m[3 * i + k];
}

inline void put_minus_identity(MatX& J, int r, int c) {
    for (int i = 0; i < 3; ++i) J(r + i, c + i) = -1.0;
}

inline Mat3 identity3() { return {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0}; }

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace hc
