#include <g2fgt/curves.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace g2fgt {

namespace {
constexpr double kHorizonSlack = 1e-12;
}

DiscountCurve::DiscountCurve(std::vector<std::pair<double, double>> pillars) {
    if (pillars.empty()) throw std::invalid_argument("curve: no pillars");
    std::sort(pillars.begin(), pillars.end());
    if (pillars.front().first < 0.0) throw std::invalid_argument("curve: negative maturity");
    if (pillars.front().first > 0.0) pillars.insert(pillars.begin(), {0.0, 1.0});
    for (std::size_t i = 0; i < pillars.size(); ++i) {
        const auto [t, df] = pillars[i];
        if (!(df > 0.0) || !std::isfinite(df)) {
            throw std::invalid_argument("curve: discount factor at t=" + std::to_string(t) + " must be positive");
        }
        if (i > 0 && !(t > pillars[i - 1].first)) {
            throw std::invalid_argument("curve: pillar maturities must be strictly increasing");
        }
        times_.push_back(t);
        log_df_.push_back(std::log(df));
    }
    if (std::abs(log_df_.front()) > 1e-14) throw std::invalid_argument("curve: discount factor at 0 must equal 1");
    log_df_.front() = 0.0;
    if (times_.size() < 2) throw std::invalid_argument("curve: need at least one positive maturity");
}

DiscountCurve DiscountCurve::flat(double continuous_rate, double horizon) {
    return DiscountCurve({{0.0, 1.0}, {horizon, std::exp(-continuous_rate * horizon)}});
}

double DiscountCurve::discount(double t) const {
    if (times_.empty()) throw std::logic_error("curve: empty");
    if (t < 0.0) throw std::invalid_argument("curve: negative time " + std::to_string(t));
    if (t == 0.0) return 1.0;
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        const std::size_t n = times_.size();
        const double slope = (log_df_[n - 1] - log_df_[n - 2]) / (times_[n - 1] - times_[n - 2]);
        return std::exp(log_df_[n - 1] + slope * (t - times_[n - 1]));
    }
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return std::exp(log_df_[i - 1] + w * (log_df_[i] - log_df_[i - 1]));
}

double DiscountCurve::instantaneous_forward(double t) const {
    const std::size_t n = times_.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1);
    return -(log_df_[i] - log_df_[i - 1]) / (times_[i] - times_[i - 1]);
}

std::vector<std::pair<double, double>> DiscountCurve::pillars() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < times_.size(); ++i) out.emplace_back(times_[i], std::exp(log_df_[i]));
    return out;
}

double CurveSet::horizon() const { return std::min(discount.horizon(), forecast.horizon()); }

void CurveSet::check_horizon(double t, const char* what) const {
    if (t < 0.0 || t > horizon() * (1.0 + kHorizonSlack)) {
        throw std::out_of_range(std::string(what) + ": time " + std::to_string(t) + " outside curve horizon [0, " +
                                std::to_string(horizon()) + "]");
    }
}

double spread_factor(const CurveSet& curves, double ts, double te) {
    if (ts < 0.0 || te < ts) throw std::invalid_argument("spread_factor: need 0 <= ts <= te");
    curves.check_horizon(te, "spread_factor");
    return (curves.forecast.discount(ts) * curves.discount.discount(te)) /
           (curves.forecast.discount(te) * curves.discount.discount(ts));
}

}  // namespace g2fgt
