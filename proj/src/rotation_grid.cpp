#include <g2fgt/rotation_grid.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace g2fgt {

namespace {

// Variance on axis 0 after rotating by `angle`.
double rotated_first_variance(const Eigen::Matrix2d& cov, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return c * c * cov(0, 0) - 2.0 * c * s * cov(1, 0) + s * s * cov(1, 1);
}

// Interpolation cell and fraction along one axis.
struct AxisCell {
    std::size_t lower;
    double fraction;
    bool clamped;
};

AxisCell locate(double y, double half_span, double spacing, std::size_t count) {
    if (count == 1) return {0, 0.0, std::abs(y) > 1e-12};
    const double u = (y + half_span) / spacing;
    const double last = static_cast<double>(count - 1);
    // Round-off at the outermost nodes is not a clamp event.
    const bool clamped = u < -1e-9 || u > last + 1e-9;
    const double c = std::clamp(u, 0.0, last);
    const std::size_t lower = std::min(static_cast<std::size_t>(c), count - 2);
    return {lower, c - static_cast<double>(lower), clamped};
}

}  // namespace

double rotation_angle(const Eigen::Matrix2d& cov) {
    if (cov.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const double diff = cov(0, 0) - cov(1, 1);
    const double base = diff == 0.0 ? std::numbers::pi / 4.0 : 0.5 * std::atan(-2.0 * cov(1, 0) / diff);
    const double alt = base + std::numbers::pi / 2.0;
    const double v_base = rotated_first_variance(cov, base);
    const double v_alt = rotated_first_variance(cov, alt);
    const double tie = 1e-14 * std::max(std::abs(v_base), std::abs(v_alt));
    if (std::abs(v_base - v_alt) <= tie) return std::abs(base) <= std::abs(alt) ? base : alt;
    return v_base < v_alt ? base : alt;
}

Eigen::Matrix2d rotation_matrix(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

double RotatedGrid::interpolate(const Eigen::Vector2d& y, bool* clamped) const {
    if (values.size() != size()) throw std::logic_error("grid: values not filled");
    const AxisCell a = locate(y(0), half_span[0], spacing[0], counts[0]);
    const AxisCell b = locate(y(1), half_span[1], spacing[1], counts[1]);
    if (clamped) *clamped = a.clamped || b.clamped;
    const std::size_t a1 = counts[0] == 1 ? a.lower : a.lower + 1;
    const std::size_t b1 = counts[1] == 1 ? b.lower : b.lower + 1;
    const double v00 = values[index(a.lower, b.lower)];
    const double v01 = values[index(a.lower, b1)];
    const double v10 = values[index(a1, b.lower)];
    const double v11 = values[index(a1, b1)];
    return (1.0 - a.fraction) * ((1.0 - b.fraction) * v00 + b.fraction * v01) +
           a.fraction * ((1.0 - b.fraction) * v10 + b.fraction * v11);
}

RotatedGrid build_grid(const ModelParams& params, double tau, int n_y, double m, bool rotate) {
    if (!(tau > 0.0)) throw std::invalid_argument("build_grid: date must be positive");
    if (n_y < 2) throw std::invalid_argument("build_grid: N_y must be at least 2");
    if (!(m > 0.0)) throw std::invalid_argument("build_grid: M must be positive");

    const Eigen::Matrix2d cov = transition_moments(params, 0.0, tau).covariance;
    RotatedGrid grid;
    grid.time = tau;
    grid.angle = rotate ? rotation_angle(cov) : 0.0;
    grid.rotation = rotation_matrix(grid.angle);
    grid.covariance = grid.rotation * cov * grid.rotation.transpose();

    const double scale = std::max(cov(0, 0) + cov(1, 1), 0.0);
    grid.weight = 1.0;
    for (int d = 0; d < 2; ++d) {
        const double var = grid.covariance(d, d);
        if (!(var > 1e-14 * scale) || scale == 0.0) {
            grid.counts[d] = 1;
            grid.half_span[d] = 0.0;
            grid.spacing[d] = 1.0;
            continue;
        }
        grid.counts[d] = static_cast<std::size_t>(n_y) + 1;
        grid.half_span[d] = m * std::sqrt(var);
        grid.spacing[d] = 2.0 * grid.half_span[d] / n_y;
        grid.weight *= grid.spacing[d];
    }
    return grid;
}

RotatedGrid origin_grid() { return RotatedGrid{}; }

std::vector<double> lattice_exponential_sum(const RotatedGrid& grid, std::span<const BondFactor> terms) {
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto n0 = static_cast<Eigen::Index>(grid.counts[0]);
    const auto n1 = static_cast<Eigen::Index>(grid.counts[1]);
    const auto k = static_cast<Eigen::Index>(terms.size());
    std::vector<double> out(grid.size(), 0.0);
    if (k == 0) return out;

    RowMatrix a0(n0, k);
    RowMatrix a1(n1, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        // loading . Xi^T y = (Xi loading) . y
        const Eigen::Vector2d l = grid.rotation * terms[static_cast<std::size_t>(j)].loading;
        const double scale = terms[static_cast<std::size_t>(j)].scale;
        for (Eigen::Index i = 0; i < n0; ++i) a0(i, j) = scale * std::exp(-l(0) * grid.coordinate(0, i));
        for (Eigen::Index i = 0; i < n1; ++i) a1(i, j) = std::exp(-l(1) * grid.coordinate(1, i));
    }
    Eigen::Map<RowMatrix>(out.data(), n0, n1).noalias() = a0 * a1.transpose();
    return out;
}

double WhitenedTransition::density(const Eigen::Vector2d& y_tau, const Eigen::Vector2d& y_t) const {
    return norm * std::exp(-0.5 * (later(y_tau) - earlier(y_t)).squaredNorm());
}

WhitenedTransition whiten_moments(const Eigen::Matrix2d& mu_hat, const Eigen::Vector2d& eta_hat,
                                  const Eigen::Matrix2d& sigma_hat) {
    const double s00 = sigma_hat(0, 0);
    const double s11 = sigma_hat(1, 1);
    const double s10 = 0.5 * (sigma_hat(1, 0) + sigma_hat(0, 1));
    const double schur = s11 - (s00 > 0.0 ? s10 * s10 / s00 : 0.0);
    if (!(s00 > 0.0) || !(s11 > 0.0) || !(schur > 1e-12 * s11)) {
        throw std::domain_error(
            "whiten: transition covariance is numerically singular; use a coarser time step between grids");
    }
    WhitenedTransition w;
    const double c00 = std::sqrt(s00);
    const double c10 = s10 / c00;
    const double c11 = std::sqrt(schur);
    w.root << c00, 0.0, c10, c11;
    w.inverse_root << 1.0 / c00, 0.0, -c10 / (c00 * c11), 1.0 / c11;
    w.mean_map = w.inverse_root * mu_hat;
    w.mean_shift = w.inverse_root * eta_hat;
    w.norm = 1.0 / (2.0 * std::numbers::pi * c00 * c11);
    return w;
}

WhitenedTransition whiten(const ModelParams& params, double t, const Eigen::Matrix2d& rotation_t, double tau,
                          const Eigen::Matrix2d& rotation_tau) {
    if (!(tau - t > 1e-12)) {
        throw std::domain_error("whiten: dates " + std::to_string(t) + " and " + std::to_string(tau) +
                                " are too close; use a coarser time step between grids");
    }
    const TransitionMoments mom = transition_moments(params, t, tau);
    const Eigen::Matrix2d mu_hat = rotation_tau * mom.decay.asDiagonal() * rotation_t.transpose();
    const Eigen::Vector2d eta_hat = rotation_tau * mom.forward_drift;
    const Eigen::Matrix2d sigma_hat = rotation_tau * mom.covariance * rotation_tau.transpose();
    return whiten_moments(mu_hat, eta_hat, sigma_hat);
}

WhitenedTransition whiten(const ModelParams& params, const RotatedGrid& at_t, const RotatedGrid& at_tau) {
    return whiten(params, at_t.time, at_t.rotation, at_tau.time, at_tau.rotation);
}

}  // namespace g2fgt
