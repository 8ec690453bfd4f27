#pragma once

#include <g2fgt/bermudan.hpp>
#include <g2fgt/curves.hpp>
#include <g2fgt/execution.hpp>
#include <g2fgt/model.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace g2fgt {

struct LsmcConfig {
    std::size_t paths_per_set = 10000;
    std::size_t sets = 32;
    std::uint64_t seed = 20240101;
    // Regress only on paths with positive exercise value.
    bool in_the_money_only = false;

    void validate() const;
};

// Risk-neutral paths observed on a set of dates. Row p of `states[d]` is the
// state of path p at dates[d]; `deflators[d][p]` is exp(-int_0^{dates[d]} R).
struct PathEnsemble {
    std::vector<double> dates;
    std::vector<std::vector<Eigen::Vector2d>> states;
    std::vector<std::vector<double>> deflators;

    std::size_t paths() const { return states.empty() ? 0 : states.front().size(); }
};

// Exact joint stepping of (X, int X) between consecutive dates.
PathEnsemble simulate_paths(const ModelParams& params, const CurveSet& curves, const std::vector<double>& dates,
                            std::size_t paths, std::uint64_t seed, std::uint64_t stream = 0);

struct LsmcResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::vector<double> set_means;
};

// Regression basis 1, x, r, x^2, x r, r^2 in x = max(E, 0) and r = X_0 + X_1.
// Exercise decisions use the fitted continuation; values use realised cash flows.
LsmcResult lsmc_price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                      const LsmcConfig& config, Execution execution = Execution::parallel);

// Least-squares coefficients of y on the columns of a, dropping columns in
// order when they are collinear with earlier ones (their coefficient is 0).
Eigen::VectorXd ordered_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

}  // namespace g2fgt
