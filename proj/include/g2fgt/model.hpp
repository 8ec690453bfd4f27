#pragma once

// Two-factor Gaussian short-rate model with constant coefficients:
//   R_t = X_0 + X_1 + psi(t),  dX = -kappa X dt + sigma C_rho dW.
// psi is never materialised: it enters only through integrals fitted to the
// discount curve, so time-0 discount factors are reproduced exactly.

#include <g2fgt/curves.hpp>

#include <Eigen/Core>

namespace g2fgt {

struct ModelParams {
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double rho = 0.0;

    void validate() const;
    // [[1, rho], [rho, 1]]
    Eigen::Matrix2d correlation() const;
    // sigma * correlation * sigma
    Eigen::Matrix2d instantaneous_covariance() const;
};

namespace presets {
// Calibrated to USD swaptions on 2018-09-20 (correlation close to -1).
ModelParams usd_2018();
// Calibrated to USD swaptions on 2019-12-05.
ModelParams usd_2019();
}  // namespace presets

// (1 - exp(-a t)) / a, with its series near a t = 0.
double chi(double a, double t);

struct TransitionMoments {
    Eigen::Vector2d decay;             // mu: exp(-kappa_d (tau - t))
    Eigen::Vector2d integrated_decay;  // nu: chi(kappa_d, tau - t)
    Eigen::Matrix2d covariance;        // Sigma(t, tau) of U(t, tau)
    Eigen::Vector2d forward_drift;     // eta: drift of X_tau under the tau-forward measure
    double integrated_variance = 0.0;  // v: variance of int_t^tau (X_0 + X_1) ds
};

TransitionMoments transition_moments(const ModelParams& params, double t, double tau);

double integrated_variance(const ModelParams& params, double t, double tau);

// Covariance of (U_0, U_1, V_0 + V_1) over [t, tau]; the last entry is v.
Eigen::Matrix3d state_integral_covariance(const ModelParams& params, double t, double tau);

// Zero-coupon bond as a function of state: P_t(tau)(X) = scale * exp(-loading . X).
struct BondFactor {
    double scale = 1.0;                             // F(t, tau)
    Eigen::Vector2d loading = Eigen::Vector2d::Zero();  // nu(t, tau) 1

    double operator()(const Eigen::Vector2d& x) const;
};

BondFactor bond_factor(const ModelParams& params, const DiscountCurve& curve, double t, double tau);

double bond_price(const ModelParams& params, const CurveSet& curves, double t, double tau, const Eigen::Vector2d& x);

// exp(-int_0^t psi(s) ds), so that the pathwise deflator is
// deterministic_discount(t) * exp(-int_0^t (X_0 + X_1) ds).
double deterministic_discount(const ModelParams& params, const DiscountCurve& curve, double t);

enum class Measure { risk_neutral, terminal_forward };

// X_tau = mu X_t + [eta] + L z with L L^T = Sigma(t, tau).
Eigen::Vector2d evolve_state(const ModelParams& params, double t, double tau, const Eigen::Vector2d& x,
                             const Eigen::Vector2d& z, Measure measure);

struct StateAndIntegral {
    Eigen::Vector2d state;
    double integral = 0.0;  // int_t^tau (X_0 + X_1) ds
};

// Exact risk-neutral step of (X, int X) over a fixed interval.
class ExactStepper {
public:
    ExactStepper(const ModelParams& params, double t, double tau);
    StateAndIntegral step(const Eigen::Vector2d& x, const Eigen::Vector3d& z) const;
    const Eigen::Matrix3d& root() const { return root_; }

private:
    Eigen::Vector2d decay_;
    Eigen::Vector2d integrated_decay_;
    Eigen::Matrix3d root_;
};

StateAndIntegral joint_sample_state_and_integral(const ModelParams& params, double t, double tau,
                                                 const Eigen::Vector2d& x, const Eigen::Vector3d& z);

}  // namespace g2fgt
