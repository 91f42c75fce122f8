#pragma once

#include "qlna/circuit_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace testing {

inline qlna::circuit::SmallSignalModel example_model() {
    qlna::circuit::SmallSignalModel m;
    m.c_in = 1e-12;
    m.c_gs1 = 2.6e-12;
    m.c_gd1 = 0.12e-12;
    m.c_gs2 = 2.6e-12;
    m.c_gd2 = 0.12e-12;
    m.c_ds3 = 1e-12;
    m.l_g1 = 1.1e-9;
    m.l_d2 = 2.2e-9;
    m.l_d3 = 0.1e-9;
    return m;
}

// Component values spread over roughly a decade either side of the example values.
inline qlna::circuit::SmallSignalModel random_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
    qlna::circuit::SmallSignalModel m;
    m.c_in = log_uniform(0.1e-12, 10e-12);
    m.c_gs1 = log_uniform(0.5e-12, 10e-12);
    m.c_gd1 = log_uniform(0.01e-12, 1e-12);
    m.c_gs2 = log_uniform(0.5e-12, 10e-12);
    m.c_gd2 = log_uniform(0.01e-12, 1e-12);
    m.c_ds3 = log_uniform(0.1e-12, 10e-12);
    m.l_g1 = log_uniform(0.1e-9, 10e-9);
    m.l_d2 = log_uniform(0.1e-9, 10e-9);
    m.l_d3 = log_uniform(0.05e-9, 5e-9);
    m.g_m1 = log_uniform(1e-3, 1.0);
    m.g_m2 = log_uniform(1e-3, 1.0);
    m.v_rf = log_uniform(1e-6, 1e-2);
    m.i_n2 = log_uniform(1e-12, 1e-6);
    return m;
}

inline Eigen::Vector3d random_vector(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {scale * u(rng), scale * u(rng), scale * u(rng)};
}

// Adjugate over determinant, written out without Eigen's solvers.
inline Eigen::Matrix3d cofactor_inverse(const Eigen::Matrix3d& a) {
    const auto minor = [&](int r, int c) {
        int rows[2], cols[2];
        for (int i = 0, k = 0; i < 3; ++i)
            if (i != r) rows[k++] = i;
        for (int j = 0, k = 0; j < 3; ++j)
            if (j != c) cols[k++] = j;
        return a(rows[0], cols[0]) * a(rows[1], cols[1]) - a(rows[0], cols[1]) * a(rows[1], cols[0]);
    };
    const double det = a(0, 0) * minor(0, 0) - a(0, 1) * minor(0, 1) + a(0, 2) * minor(0, 2);
    Eigen::Matrix3d inv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) inv(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * minor(j, i) / det;
    return inv;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing
