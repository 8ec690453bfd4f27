#include <g2fgt/bermudan.hpp>

#include "direct_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace g2fgt {

namespace {

bool deterministic(const ModelParams& params) { return params.sigma0 == 0.0 && params.sigma1 == 0.0; }

void check_values(const RotatedGrid& grid) {
    if (grid.values.size() != grid.size()) throw std::invalid_argument("rollback: later grid has no values");
}

// Zero-volatility transfer: X_tau = mu X_t exactly.
std::vector<double> deterministic_rollback(const ModelParams& params, const CurveSet& curves,
                                           const RotatedGrid& at_t, const RotatedGrid& at_tau) {
    const TransitionMoments mom = transition_moments(params, at_t.time, at_tau.time);
    const BondFactor bond = bond_factor(params, curves.discount, at_t.time, at_tau.time);
    std::vector<double> out(at_t.size());
    for (std::size_t j = 0; j < at_t.size(); ++j) {
        const Eigen::Vector2d x = at_t.state(j);
        const Eigen::Vector2d x_tau = mom.decay.cwiseProduct(x) + mom.forward_drift;
        out[j] = bond(x) * at_tau.interpolate(at_tau.rotation * x_tau);
    }
    return out;
}

}  // namespace

void BermudanSpec::validate() const {
    underlying.validate();
    if (exercise_dates.empty()) throw std::invalid_argument("bermudan: no exercise dates");
    for (std::size_t k = 0; k < exercise_dates.size(); ++k) {
        if (!(exercise_dates[k] > 0.0)) throw std::invalid_argument("bermudan: exercise dates must be positive");
        if (k > 0 && !(exercise_dates[k] > exercise_dates[k - 1])) {
            throw std::invalid_argument("bermudan: exercise dates must be strictly increasing");
        }
    }
    if (exercise_dates.back() > underlying.schedule.back()) {
        throw std::invalid_argument("bermudan: exercise after the final swap payment");
    }
}

std::string MethodFlags::label() const {
    std::string s = use_fgt ? "FGT" : "NoFGT";
    if (use_rotation) s += "+Rotate";
    return s;
}

void PricingSettings::validate() const {
    if (n_y < 2) throw std::invalid_argument("pricing: N_y must be at least 2");
    if (!(m > 0.0)) throw std::invalid_argument("pricing: M must be positive");
    fgt.validate();
}

std::vector<double> exercise_value(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                   std::size_t k, const RotatedGrid& grid) {
    const SwapSpec tail = spec.exercised_at(k);
    if (tail.schedule.empty()) return std::vector<double>(grid.size(), 0.0);
    const SwapValuator swap(curves, params, grid.time, tail);
    const std::vector<BondFactor> terms = swap.exponential_terms();
    return lattice_exponential_sum(grid, terms);
}

std::vector<double> rollback(const ModelParams& params, const CurveSet& curves, const RotatedGrid& at_t,
                             const RotatedGrid& at_tau, const PricingSettings& settings, bool normalize) {
    check_values(at_tau);
    curves.check_horizon(at_tau.time, "rollback");
    if (deterministic(params)) return deterministic_rollback(params, curves, at_t, at_tau);

    const WhitenedTransition w = whiten(params, at_t, at_tau);

    fgt::GaussSumProblem<2> problem;
    problem.bandwidth = kWhitenedBandwidth;
    const double scale = at_tau.weight * w.norm;
    // Nodes with zero value contribute nothing to the sum, but they do carry mass.
    std::size_t live = 0;
    for (double v : at_tau.values) live += normalize || v != 0.0;
    problem.sources.reserve(live);
    problem.weights.reserve(live);
    for (std::size_t i = 0; i < at_tau.size(); ++i) {
        const double v = at_tau.values[i];
        if (v == 0.0 && !normalize) continue;
        const Eigen::Vector2d n = w.later(at_tau.node(i));
        problem.sources.push_back({n(0), n(1)});
        problem.weights.push_back(scale * v);
    }
    if (problem.sources.empty()) return std::vector<double>(at_t.size(), 0.0);

    problem.targets.resize(at_t.size());
    const auto nt = static_cast<std::ptrdiff_t>(at_t.size());
#pragma omp parallel for schedule(static) if (settings.execution == Execution::parallel)
    for (std::ptrdiff_t j = 0; j < nt; ++j) {
        const Eigen::Vector2d m = w.earlier(at_t.node(static_cast<std::size_t>(j)));
        problem.targets[static_cast<std::size_t>(j)] = {m(0), m(1)};
    }

    std::optional<fgt::FgtPlan<2>> plan;
    if (settings.flags.use_fgt) plan = fgt::plan_fgt(problem, settings.fgt);
    auto gauss_sum = [&] {
        return plan ? fgt::fgt_apply(problem, *plan, settings.execution)
                    : fgt::direct_gauss_sum(problem, settings.execution);
    };
    std::vector<double> g = gauss_sum();
    if (normalize) {
        std::fill(problem.weights.begin(), problem.weights.end(), scale);
        const std::vector<double> mass = gauss_sum();
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = mass[j] > 0.0 ? g[j] / mass[j] : 0.0;
    }
    problem = {};
    plan.reset();

    const BondFactor bond = bond_factor(params, curves.discount, at_t.time, at_tau.time);
    const std::vector<double> discount = lattice_exponential_sum(at_t, std::span<const BondFactor>(&bond, 1));
    for (std::size_t j = 0; j < g.size(); ++j) g[j] *= discount[j];
    return g;
}

double rollback_to_origin(const ModelParams& params, const CurveSet& curves, const RotatedGrid& at_tau,
                          const PricingSettings& settings) {
    check_values(at_tau);
    curves.check_horizon(at_tau.time, "rollback");
    const RotatedGrid origin = origin_grid();
    if (deterministic(params)) return deterministic_rollback(params, curves, origin, at_tau).front();

    const WhitenedTransition w = whiten(params, origin, at_tau);
    const Eigen::Vector2d m = w.earlier(Eigen::Vector2d::Zero());
    const std::size_t n = at_tau.size();

    // A single target gains nothing from expansions; sum directly.
    double sum = 0.0;
    if (settings.execution == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = at_tau.values[i];
            if (v == 0.0) continue;
            sum += v * std::exp(-0.5 * (w.later(at_tau.node(i)) - m).squaredNorm());
        }
    } else {
        const std::size_t rows = at_tau.counts[0];
        const std::size_t cols = at_tau.counts[1];
        const auto nrows = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel reduction(+ : sum)
        {
            std::vector<double> n0(cols), n1(cols);
#pragma omp for schedule(static)
            for (std::ptrdiff_t r = 0; r < nrows; ++r) {
                const auto i0 = static_cast<std::size_t>(r);
                for (std::size_t i1 = 0; i1 < cols; ++i1) {
                    const Eigen::Vector2d p = w.later(at_tau.node(i0, i1));
                    n0[i1] = p(0);
                    n1[i1] = p(1);
                }
                sum += fgt::detail::gauss_row_sum_2d(n0.data(), n1.data(), at_tau.values.data() + i0 * cols, cols,
                                                     m(0), m(1), 1.0 / kWhitenedBandwidth);
            }
        }
    }
    const BondFactor bond = bond_factor(params, curves.discount, 0.0, at_tau.time);
    return bond.scale * at_tau.weight * w.norm * sum;
}

InductionResult backward_induction(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                   const PricingSettings& settings, bool keep_grids) {
    spec.validate();
    params.validate();
    settings.validate();
    curves.check_horizon(spec.underlying.schedule.back(), "bermudan");

    const std::size_t n = spec.exercise_dates.size();
    InductionResult result;
    if (keep_grids) {
        result.grids.resize(n);
        result.continuation.resize(n);
    }

    auto make_grid = [&](std::size_t k) {
        return build_grid(params, spec.exercise_dates[k], settings.n_y, settings.m, settings.flags.use_rotation);
    };

    RotatedGrid next = make_grid(n - 1);
    next.values = exercise_value(spec, params, curves, n - 1, next);
    for (double& v : next.values) v = std::max(v, 0.0);
    if (keep_grids) result.continuation[n - 1].assign(next.size(), 0.0);

    for (std::size_t k = n - 1; k-- > 0;) {
        RotatedGrid current = make_grid(k);
        std::vector<double> hold = rollback(params, curves, current, next, settings);
        if (keep_grids) {
            result.grids[k + 1] = std::move(next);
        } else {
            next = {};
        }
        current.values = exercise_value(spec, params, curves, k, current);
        for (std::size_t j = 0; j < hold.size(); ++j) current.values[j] = std::max(current.values[j], hold[j]);
        if (keep_grids) result.continuation[k] = std::move(hold);
        next = std::move(current);
    }

    result.pv = rollback_to_origin(params, curves, next, settings);
    if (keep_grids) result.grids[0] = std::move(next);
    return result;
}

double price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
             const PricingSettings& settings) {
    return backward_induction(spec, params, curves, settings, false).pv;
}

}  // namespace g2fgt
