#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace g2fgt {

// Lower-triangular L with L L^T = a for a symmetric positive semidefinite a.
// Pivots that are negative by less than `tolerance * max|diag|` are floored at
// zero (rank-deficient case); more negative pivots throw std::domain_error.
template <int N>
Eigen::Matrix<double, N, N> psd_cholesky(const Eigen::Matrix<double, N, N>& a, double tolerance = 1e-12) {
    const double scale = a.diagonal().cwiseAbs().maxCoeff();
    Eigen::Matrix<double, N, N> l = Eigen::Matrix<double, N, N>::Zero();
    for (int j = 0; j < N; ++j) {
        double pivot = a(j, j);
        for (int k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (pivot < -tolerance * scale) {
            throw std::domain_error("psd_cholesky: matrix is not positive semidefinite");
        }
        if (pivot <= 1e-15 * scale) continue;  // zero column
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (int i = j + 1; i < N; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / d;
        }
    }
    return l;
}

}  // namespace g2fgt
