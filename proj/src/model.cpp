#include <g2fgt/linalg.hpp>
#include <g2fgt/model.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace g2fgt {

namespace {

// 12-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 6> kGlNodes = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                                            0.7699026741943047, 0.9041172563704748, 0.9815606342467192};
constexpr std::array<double, 6> kGlWeights = {0.2491470458134027, 0.2334925365383546, 0.2031674267230656,
                                              0.1600783285433461, 0.1069393259953189, 0.0471753363865120};

template <typename F>
double gauss_legendre(F&& f, double length) {
    const double half = 0.5 * length;
    double acc = 0.0;
    for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        acc += kGlWeights[k] * (f(half * (1.0 - kGlNodes[k])) + f(half * (1.0 + kGlNodes[k])));
    }
    return acc * half;
}

// Below this (a + b) T the closed forms lose digits to cancellation and the
// integrand is smooth enough for a fixed 12-point rule.
constexpr double kSmallArgument = 0.5;

// int_0^T exp(-a u) chi(b, u) du
double decay_chi_integral(double a, double b, double length) {
    if ((a + b) * length < kSmallArgument) {
        return gauss_legendre([&](double u) { return std::exp(-a * u) * chi(b, u); }, length);
    }
    return (chi(a, length) - chi(a + b, length)) / b;
}

// int_0^T chi(a, u) chi(b, u) du
double chi_chi_integral(double a, double b, double length) {
    if ((a + b) * length < kSmallArgument) {
        return gauss_legendre([&](double u) { return chi(a, u) * chi(b, u); }, length);
    }
    return (length - chi(a, length) - chi(b, length) + chi(a + b, length)) / (a * b);
}

void check_interval(double t, double tau, const char* what) {
    if (!(t >= 0.0) || !(tau >= t)) {
        throw std::invalid_argument(std::string(what) + ": need 0 <= t <= tau, got t=" + std::to_string(t) +
                                    ", tau=" + std::to_string(tau));
    }
}

}  // namespace

void ModelParams::validate() const {
    if (!(kappa0 > 0.0) || !(kappa1 > 0.0)) throw std::invalid_argument("model: mean reversions must be positive");
    if (!(sigma0 >= 0.0) || !(sigma1 >= 0.0)) throw std::invalid_argument("model: volatilities must be non-negative");
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("model: correlation must lie in [-1, 1]");
}

Eigen::Matrix2d ModelParams::correlation() const {
    Eigen::Matrix2d c;
    c << 1.0, rho, rho, 1.0;
    return c;
}

Eigen::Matrix2d ModelParams::instantaneous_covariance() const {
    Eigen::Matrix2d c;
    c << sigma0 * sigma0, rho * sigma0 * sigma1, rho * sigma0 * sigma1, sigma1 * sigma1;
    return c;
}

namespace presets {
ModelParams usd_2018() { return {0.764924667, 0.352480535, 0.064510503, 0.043555081, -0.988465395}; }
ModelParams usd_2019() { return {1.557180934, 0.080090711, 0.010574543, 0.008692398, -0.900422625}; }
}  // namespace presets

double chi(double a, double t) {
    const double x = a * t;
    if (std::abs(x) < 1e-8) return t * (1.0 - x / 2.0 + x * x / 6.0);
    return -std::expm1(-x) / a;
}

TransitionMoments transition_moments(const ModelParams& params, double t, double tau) {
    check_interval(t, tau, "transition_moments");
    const double len = tau - t;
    const std::array<double, 2> kappa = {params.kappa0, params.kappa1};
    const Eigen::Matrix2d c = params.instantaneous_covariance();

    TransitionMoments m;
    for (int i = 0; i < 2; ++i) {
        m.decay(i) = std::exp(-kappa[i] * len);
        m.integrated_decay(i) = chi(kappa[i], len);
        double drift = 0.0;
        for (int j = 0; j < 2; ++j) {
            m.covariance(i, j) = c(i, j) * chi(kappa[i] + kappa[j], len);
            drift -= c(i, j) * decay_chi_integral(kappa[i], kappa[j], len);
        }
        m.forward_drift(i) = drift;
    }
    m.integrated_variance = integrated_variance(params, t, tau);
    return m;
}

double integrated_variance(const ModelParams& params, double t, double tau) {
    check_interval(t, tau, "integrated_variance");
    const double len = tau - t;
    const std::array<double, 2> kappa = {params.kappa0, params.kappa1};
    const Eigen::Matrix2d c = params.instantaneous_covariance();
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v += c(i, j) * chi_chi_integral(kappa[i], kappa[j], len);
    return v;
}

Eigen::Matrix3d state_integral_covariance(const ModelParams& params, double t, double tau) {
    const TransitionMoments m = transition_moments(params, t, tau);
    Eigen::Matrix3d cov;
    cov.topLeftCorner<2, 2>() = m.covariance;
    // Cov(U_i, V_0 + V_1) is exactly -eta_i.
    cov.block<2, 1>(0, 2) = -m.forward_drift;
    cov.block<1, 2>(2, 0) = -m.forward_drift.transpose();
    cov(2, 2) = m.integrated_variance;
    return cov;
}

double BondFactor::operator()(const Eigen::Vector2d& x) const { return scale * std::exp(-loading.dot(x)); }

BondFactor bond_factor(const ModelParams& params, const DiscountCurve& curve, double t, double tau) {
    check_interval(t, tau, "bond_factor");
    BondFactor f;
    const double v_span = integrated_variance(params, t, tau);
    const double v_end = integrated_variance(params, 0.0, tau);
    const double v_start = integrated_variance(params, 0.0, t);
    f.scale = curve.discount(tau) / curve.discount(t) * std::exp(0.5 * (v_span - v_end + v_start));
    f.loading = {chi(params.kappa0, tau - t), chi(params.kappa1, tau - t)};
    return f;
}

double bond_price(const ModelParams& params, const CurveSet& curves, double t, double tau, const Eigen::Vector2d& x) {
    curves.check_horizon(tau, "bond_price");
    return bond_factor(params, curves.discount, t, tau)(x);
}

double deterministic_discount(const ModelParams& params, const DiscountCurve& curve, double t) {
    return curve.discount(t) * std::exp(-0.5 * integrated_variance(params, 0.0, t));
}

Eigen::Vector2d evolve_state(const ModelParams& params, double t, double tau, const Eigen::Vector2d& x,
                             const Eigen::Vector2d& z, Measure measure) {
    const TransitionMoments m = transition_moments(params, t, tau);
    const Eigen::Matrix2d root = psd_cholesky<2>(m.covariance);
    Eigen::Vector2d out = m.decay.cwiseProduct(x) + root * z;
    if (measure == Measure::terminal_forward) out += m.forward_drift;
    return out;
}

ExactStepper::ExactStepper(const ModelParams& params, double t, double tau) {
    const TransitionMoments m = transition_moments(params, t, tau);
    decay_ = m.decay;
    integrated_decay_ = m.integrated_decay;
    root_ = psd_cholesky<3>(state_integral_covariance(params, t, tau), 1e-10);
}

StateAndIntegral ExactStepper::step(const Eigen::Vector2d& x, const Eigen::Vector3d& z) const {
    const Eigen::Vector3d shock = root_ * z;
    StateAndIntegral out;
    out.state = decay_.cwiseProduct(x) + shock.head<2>();
    out.integral = integrated_decay_.dot(x) + shock(2);
    return out;
}

StateAndIntegral joint_sample_state_and_integral(const ModelParams& params, double t, double tau,
                                                 const Eigen::Vector2d& x, const Eigen::Vector3d& z) {
    return ExactStepper(params, t, tau).step(x, z);
}

}  // namespace g2fgt
