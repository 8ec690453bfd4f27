#include <g2fgt/swap.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace g2fgt {

namespace {
constexpr double kTimeEps = 1e-12;
}

void SwapSpec::validate() const {
    if (schedule.size() < 2) throw std::invalid_argument("swap: schedule needs at least one period");
    if (schedule.front() < 0.0) throw std::invalid_argument("swap: schedule starts before 0");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (!(schedule[i] > schedule[i - 1])) throw std::invalid_argument("swap: schedule must be strictly increasing");
    }
    if (!std::isfinite(fixed_rate) || !std::isfinite(notional)) throw std::invalid_argument("swap: non-finite terms");
}

SwapSpec SwapSpec::tail_from(double start) const {
    SwapSpec tail = *this;
    tail.schedule.clear();
    for (double t : schedule) {
        if (t >= start - kTimeEps) tail.schedule.push_back(t);
    }
    if (tail.schedule.size() < 2) tail.schedule.clear();
    return tail;
}

double forward_rate(const CurveSet& curves, const ModelParams& params, double t, double ts, double te,
                    const Eigen::Vector2d& x) {
    if (!(t <= ts && ts < te)) throw std::invalid_argument("forward_rate: need t <= ts < te");
    const double ps = bond_price(params, curves, t, ts, x);
    const double pe = bond_price(params, curves, t, te, x);
    return (spread_factor(curves, ts, te) * ps / pe - 1.0) / (te - ts);
}

double par_rate(const CurveSet& curves, const SwapSpec& spec) {
    spec.validate();
    curves.check_horizon(spec.schedule.back(), "par_rate");
    double floating = 0.0;
    double annuity = 0.0;
    for (std::size_t i = 1; i < spec.schedule.size(); ++i) {
        const double ts = spec.schedule[i - 1];
        const double te = spec.schedule[i];
        floating += spread_factor(curves, ts, te) * curves.discount.discount(ts) - curves.discount.discount(te);
        annuity += (te - ts) * curves.discount.discount(te);
    }
    return floating / annuity;
}

SwapValuator::SwapValuator(const CurveSet& curves, const ModelParams& params, double t, const SwapSpec& spec)
    : t_(t), scale_(spec.sign() * spec.notional) {
    if (spec.schedule.empty()) return;
    spec.validate();
    if (spec.schedule.back() <= t + kTimeEps) return;
    curves.check_horizon(spec.schedule.back(), "swap_value");

    for (std::size_t i = 1; i < spec.schedule.size(); ++i) {
        const double ts = spec.schedule[i - 1];
        const double te = spec.schedule[i];
        if (te <= t + kTimeEps) continue;
        const double accrual = te - ts;
        const BondFactor end = bond_factor(params, curves.discount, t, te);
        if (ts >= t - kTimeEps) {
            // Fixed coupon plus the floating leg as D P(ts) - P(te).
            bonds_.push_back({spec.fixed_rate * accrual + 1.0, end});
            bonds_.push_back({-spread_factor(curves, ts, te), bond_factor(params, curves.discount, t, std::max(ts, t))});
        } else {
            bonds_.push_back({spec.fixed_rate * accrual, end});
            running_ = Running{accrual, te - t, spread_factor(curves, t, te), end};
        }
    }
}

double SwapValuator::operator()(const Eigen::Vector2d& x, std::optional<double> running_fixing) const {
    double value = 0.0;
    for (const auto& term : bonds_) value += term.coefficient * term.bond(x);
    if (running_) {
        const double end = running_->end_bond(x);
        const double fixing =
            running_fixing ? *running_fixing : (running_->spread / end - 1.0) / running_->remaining;
        value -= running_->accrual * fixing * end;
    }
    return scale_ * value;
}

std::vector<BondFactor> SwapValuator::exponential_terms() const {
    if (running_) throw std::logic_error("swap: running coupon is not a sum of exponentials");
    std::vector<BondFactor> terms;
    terms.reserve(bonds_.size());
    for (const auto& term : bonds_) terms.push_back({scale_ * term.coefficient * term.bond.scale, term.bond.loading});
    return terms;
}

double swap_value(const CurveSet& curves, const ModelParams& params, double t, const Eigen::Vector2d& x,
                  const SwapSpec& spec, std::optional<double> running_fixing) {
    return SwapValuator(curves, params, t, spec)(x, running_fixing);
}

}  // namespace g2fgt
