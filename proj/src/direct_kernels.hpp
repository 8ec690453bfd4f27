#pragma once

#include <cstddef>

// Vectorised Gaussian row sums. Compiled in their own translation unit with
// -ffast-math so the SIMD exp from libmvec is used; the serial reference in
// fgt.cpp keeps strict IEEE semantics.
namespace g2fgt::fgt::detail {

double gauss_row_sum_1d(const double* y0, const double* q, std::size_t n, double x0, double inv_bandwidth);

double gauss_row_sum_2d(const double* y0, const double* y1, const double* q, std::size_t n, double x0,
                        double x1, double inv_bandwidth);

}  // namespace g2fgt::fgt::detail
