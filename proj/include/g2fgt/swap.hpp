#pragma once

#include <g2fgt/curves.hpp>
#include <g2fgt/model.hpp>

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace g2fgt {

enum class Direction { receive_fixed, pay_fixed };

// Fixed-vs-floating swap with a common schedule t_0 < t_1 < ... < t_N on both
// legs; period i accrues over [t_{i-1}, t_i] and pays at t_i.
struct SwapSpec {
    std::vector<double> schedule;
    double fixed_rate = 0.0;
    double notional = 1.0;
    Direction direction = Direction::receive_fixed;

    void validate() const;
    std::size_t periods() const { return schedule.empty() ? 0 : schedule.size() - 1; }
    double sign() const { return direction == Direction::receive_fixed ? 1.0 : -1.0; }
    // The periods starting on or after `start`.
    SwapSpec tail_from(double start) const;
};

// Simple forward rate on the forecast basis seen at (t, x).
double forward_rate(const CurveSet& curves, const ModelParams& params, double t, double ts, double te,
                    const Eigen::Vector2d& x);

// Fixed rate making the swap worth zero at time 0.
double par_rate(const CurveSet& curves, const SwapSpec& spec);

// Swap value at a fixed valuation time as a function of state, precomputed as
// a sum of exponentials in X. Cash flows paying at or before t are dropped.
// When t falls inside a period, that period's floating coupon uses
// `running_fixing` if given, otherwise the simple forecast rate from t to
// the period end implied by the model bond ratio at t.
class SwapValuator {
public:
    SwapValuator(const CurveSet& curves, const ModelParams& params, double t, const SwapSpec& spec);

    double operator()(const Eigen::Vector2d& x, std::optional<double> running_fixing = std::nullopt) const;

    double time() const { return t_; }
    bool expired() const { return bonds_.empty(); }
    // True when t falls strictly inside a period.
    bool in_period() const { return running_.has_value(); }
    // The value as scale * exp(-loading . x) terms with the notional and
    // direction folded in. Throws std::logic_error when t is inside a period.
    std::vector<BondFactor> exponential_terms() const;

private:
    struct Term {
        double coefficient;
        BondFactor bond;
    };
    struct Running {
        double accrual;
        double remaining;  // t_end - t
        double spread;     // spread factor over [t, t_end]
        BondFactor end_bond;
    };

    double t_;
    double scale_;
    std::vector<Term> bonds_;
    std::optional<Running> running_;
};

double swap_value(const CurveSet& curves, const ModelParams& params, double t, const Eigen::Vector2d& x,
                  const SwapSpec& spec, std::optional<double> running_fixing = std::nullopt);

}  // namespace g2fgt
