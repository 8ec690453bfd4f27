#include "direct_kernels.hpp"

#include <cmath>

namespace g2fgt::fgt::detail {

double gauss_row_sum_1d(const double* y0, const double* q, std::size_t n, double x0, double inv_bandwidth) {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = 0; j < n; ++j) {
        const double a = x0 - y0[j];
        acc += q[j] * std::exp(-a * a * inv_bandwidth);
    }
    return acc;
}

double gauss_row_sum_2d(const double* y0, const double* y1, const double* q, std::size_t n, double x0,
                        double x1, double inv_bandwidth) {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = 0; j < n; ++j) {
        const double a = x0 - y0[j];
        const double b = x1 - y1[j];
        acc += q[j] * std::exp(-(a * a + b * b) * inv_bandwidth);
    }
    return acc;
}

}  // namespace g2fgt::fgt::detail
