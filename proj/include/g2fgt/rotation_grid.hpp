#pragma once

// Integration lattices in rotated state coordinates y = Xi X, where Xi is
// chosen so that the unconditional covariance of y at the grid date is
// diagonal, and the whitened form of the one-step transition density
// between two such lattices.

#include <g2fgt/model.hpp>

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace g2fgt {

// Angle zeroing the off-diagonal of Xi cov Xi^T, picking the branch that
// leaves the smaller variance on axis 0. Zero for a zero covariance.
double rotation_angle(const Eigen::Matrix2d& cov);

// [[cos, -sin], [sin, cos]]
Eigen::Matrix2d rotation_matrix(double angle);

struct RotatedGrid {
    double time = 0.0;
    double angle = 0.0;
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();  // Xi
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();    // Xi Sigma(0, time) Xi^T
    std::array<std::size_t, 2> counts{1, 1};
    std::array<double, 2> half_span{0.0, 0.0};
    std::array<double, 2> spacing{1.0, 1.0};
    double weight = 1.0;
    // Row-major over (axis 0 index, axis 1 index).
    std::vector<double> values;

    std::size_t size() const { return counts[0] * counts[1]; }
    bool degenerate() const { return size() == 1; }
    std::size_t index(std::size_t i0, std::size_t i1) const { return i0 * counts[1] + i1; }
    double coordinate(int axis, std::size_t i) const {
        return counts[axis] == 1 ? 0.0 : -half_span[axis] + static_cast<double>(i) * spacing[axis];
    }
    Eigen::Vector2d node(std::size_t i0, std::size_t i1) const { return {coordinate(0, i0), coordinate(1, i1)}; }
    Eigen::Vector2d node(std::size_t flat) const { return node(flat / counts[1], flat % counts[1]); }
    Eigen::Vector2d state(std::size_t flat) const { return rotation.transpose() * node(flat); }

    // Bilinear interpolation of `values` at rotated point y. Points outside
    // the lattice are clamped to its boundary and reported through `clamped`.
    double interpolate(const Eigen::Vector2d& y, bool* clamped = nullptr) const;
};

// (n_y + 1)^2 nodes covering +-m sqrt(Sigma_hat_dd(0, tau)) per axis, with
// uniform weight dy_0 dy_1. Axes with zero variance get a single node at 0.
// Without `rotate` the lattice is laid out in the original coordinates.
RotatedGrid build_grid(const ModelParams& params, double tau, int n_y, double m, bool rotate = true);

// The single state X = 0 at time 0.
RotatedGrid origin_grid();

// sum_k scale_k exp(-loading_k . X) at every node, X = Xi^T y. Each term is
// separable on the lattice so the sum is a rank-K product.
std::vector<double> lattice_exponential_sum(const RotatedGrid& grid, std::span<const BondFactor> terms);

// Transition density of y_tau given y_t written as
// norm * exp(-|n - m|^2 / 2) with n = C^-1 y_tau, m = C^-1 (mu_hat y_t + eta_hat)
// and C C^T = Sigma_hat(t, tau).
struct WhitenedTransition {
    Eigen::Matrix2d root = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d inverse_root = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d mean_map = Eigen::Matrix2d::Identity();  // C^-1 mu_hat
    Eigen::Vector2d mean_shift = Eigen::Vector2d::Zero();     // C^-1 eta_hat
    double norm = 0.0;                                        // 1 / (2 pi |Sigma_hat|^1/2)

    Eigen::Vector2d later(const Eigen::Vector2d& y_tau) const { return inverse_root * y_tau; }
    Eigen::Vector2d earlier(const Eigen::Vector2d& y_t) const { return mean_map * y_t + mean_shift; }
    double density(const Eigen::Vector2d& y_tau, const Eigen::Vector2d& y_t) const;
};

// Throws std::domain_error when sigma_hat is numerically singular.
WhitenedTransition whiten_moments(const Eigen::Matrix2d& mu_hat, const Eigen::Vector2d& eta_hat,
                                  const Eigen::Matrix2d& sigma_hat);

// Transition between two rotated frames under the tau-forward measure.
WhitenedTransition whiten(const ModelParams& params, double t, const Eigen::Matrix2d& rotation_t, double tau,
                          const Eigen::Matrix2d& rotation_tau);
WhitenedTransition whiten(const ModelParams& params, const RotatedGrid& at_t, const RotatedGrid& at_tau);

// Bandwidth of the Gaussian sums produced by a whitened transition.
inline constexpr double kWhitenedBandwidth = 2.0;

}  // namespace g2fgt
