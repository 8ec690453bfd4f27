#include <g2fgt/lsmc.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace g2fgt {

namespace {

constexpr int kBasisSize = 6;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Centred and scaled copy; a constant column becomes all zeros.
Eigen::VectorXd standardise(const Eigen::VectorXd& v) {
    const double mean = v.mean();
    const Eigen::VectorXd c = v.array() - mean;
    const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(v.size()));
    if (!(sd > 1e-14 * std::max(1.0, std::abs(mean)))) return Eigen::VectorXd::Zero(v.size());
    return c / sd;
}

Eigen::MatrixXd basis(const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
    const Eigen::VectorXd xs = standardise(x);
    const Eigen::VectorXd rs = standardise(r);
    Eigen::MatrixXd a(x.size(), kBasisSize);
    a.col(0).setOnes();
    a.col(1) = xs;
    a.col(2) = rs;
    a.col(3) = xs.array().square();
    a.col(4) = xs.array() * rs.array();
    a.col(5) = rs.array().square();
    return a;
}

double set_value(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                 const std::vector<std::vector<BondFactor>>& exercise_terms, const LsmcConfig& config,
                 std::uint64_t stream) {
    const std::size_t n_dates = spec.exercise_dates.size();
    const PathEnsemble paths =
        simulate_paths(params, curves, spec.exercise_dates, config.paths_per_set, config.seed, stream);
    const std::size_t n = paths.paths();

    Eigen::VectorXd cash = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));  // deflated
    Eigen::VectorXd e(static_cast<Eigen::Index>(n));
    for (std::size_t k = n_dates; k-- > 0;) {
        const auto& states = paths.states[k];
        const auto& defl = paths.deflators[k];
        for (std::size_t p = 0; p < n; ++p) {
            double v = 0.0;
            for (const auto& term : exercise_terms[k]) v += term(states[p]);
            e(static_cast<Eigen::Index>(p)) = v;
        }

        Eigen::VectorXd continuation = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        if (k + 1 < n_dates) {
            std::vector<Eigen::Index> rows;
            for (std::size_t p = 0; p < n; ++p) {
                if (!config.in_the_money_only || e(static_cast<Eigen::Index>(p)) > 0.0) {
                    rows.push_back(static_cast<Eigen::Index>(p));
                }
            }
            if (!rows.empty()) {
                const auto m = static_cast<Eigen::Index>(rows.size());
                Eigen::VectorXd x(m), r(m), y(m);
                for (Eigen::Index i = 0; i < m; ++i) {
                    const auto p = static_cast<std::size_t>(rows[static_cast<std::size_t>(i)]);
                    x(i) = std::max(e(rows[static_cast<std::size_t>(i)]), 0.0);
                    r(i) = states[p].sum();
                    y(i) = cash(rows[static_cast<std::size_t>(i)]) / defl[p];
                }
                const Eigen::MatrixXd a = basis(x, r);
                const Eigen::VectorXd fitted = a * ordered_least_squares(a, y);
                for (Eigen::Index i = 0; i < m; ++i) continuation(rows[static_cast<std::size_t>(i)]) = fitted(i);
            }
        }

        for (std::size_t p = 0; p < n; ++p) {
            const double ev = e(static_cast<Eigen::Index>(p));
            const bool last = k + 1 == n_dates;
            if (ev > 0.0 && (last || ev >= continuation(static_cast<Eigen::Index>(p)))) {
                cash(static_cast<Eigen::Index>(p)) = defl[p] * ev;
            }
        }
    }
    return cash.mean();
}

}  // namespace

void LsmcConfig::validate() const {
    if (paths_per_set < 1000) throw std::invalid_argument("lsmc: need at least 1000 paths per set");
    if (sets < 1) throw std::invalid_argument("lsmc: need at least one set");
}

PathEnsemble simulate_paths(const ModelParams& params, const CurveSet& curves, const std::vector<double>& dates,
                            std::size_t paths, std::uint64_t seed, std::uint64_t stream) {
    params.validate();
    PathEnsemble out;
    out.dates = dates;
    for (std::size_t d = 0; d < dates.size(); ++d) {
        if (!(dates[d] > (d == 0 ? 0.0 : dates[d - 1]))) {
            throw std::invalid_argument("simulate_paths: dates must be positive and strictly increasing");
        }
    }
    if (!dates.empty()) curves.check_horizon(dates.back(), "simulate_paths");

    std::vector<ExactStepper> steppers;
    std::vector<double> curve_part;
    for (std::size_t d = 0; d < dates.size(); ++d) {
        steppers.emplace_back(params, d == 0 ? 0.0 : dates[d - 1], dates[d]);
        curve_part.push_back(deterministic_discount(params, curves.discount, dates[d]));
    }

    out.states.assign(dates.size(), std::vector<Eigen::Vector2d>(paths));
    out.deflators.assign(dates.size(), std::vector<double>(paths));
    std::mt19937_64 engine = make_engine(seed, stream);
    std::normal_distribution<double> normal;
    for (std::size_t p = 0; p < paths; ++p) {
        Eigen::Vector2d x = Eigen::Vector2d::Zero();
        double integral = 0.0;
        for (std::size_t d = 0; d < dates.size(); ++d) {
            const Eigen::Vector3d z(normal(engine), normal(engine), normal(engine));
            const StateAndIntegral s = steppers[d].step(x, z);
            x = s.state;
            integral += s.integral;
            out.states[d][p] = x;
            out.deflators[d][p] = curve_part[d] * std::exp(-integral);
        }
    }
    return out;
}

Eigen::VectorXd ordered_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
    const Eigen::Index k = a.cols();
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::VectorXd rhs = a.transpose() * y;

    // Incremental Cholesky over the columns in order; a column whose pivot is
    // tiny relative to its own norm is a combination of earlier ones.
    std::vector<Eigen::Index> active;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index na = static_cast<Eigen::Index>(active.size());
        Eigen::VectorXd row(na);
        for (Eigen::Index i = 0; i < na; ++i) {
            double s = gram(j, active[static_cast<std::size_t>(i)]);
            for (Eigen::Index m = 0; m < i; ++m) s -= l(na, m) * l(i, m);
            row(i) = s / l(i, i);
            l(na, i) = row(i);
        }
        const double pivot = gram(j, j) - row.squaredNorm();
        if (!(gram(j, j) > 0.0) || pivot <= 1e-10 * gram(j, j)) {
            l.row(na).setZero();
            continue;
        }
        l(na, na) = std::sqrt(pivot);
        active.push_back(j);
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    if (na == 0) return beta;
    Eigen::VectorXd b(na);
    for (Eigen::Index i = 0; i < na; ++i) b(i) = rhs(active[static_cast<std::size_t>(i)]);
    const auto lower = l.topLeftCorner(na, na).triangularView<Eigen::Lower>();
    const Eigen::VectorXd z = lower.solve(b);
    const Eigen::VectorXd sol = lower.transpose().solve(z);
    for (Eigen::Index i = 0; i < na; ++i) beta(active[static_cast<std::size_t>(i)]) = sol(i);
    return beta;
}

LsmcResult lsmc_price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                      const LsmcConfig& config, Execution execution) {
    spec.validate();
    params.validate();
    config.validate();

    std::vector<std::vector<BondFactor>> terms;
    for (std::size_t k = 0; k < spec.exercise_dates.size(); ++k) {
        const SwapSpec tail = spec.exercised_at(k);
        if (tail.schedule.empty()) {
            terms.emplace_back();
            continue;
        }
        terms.push_back(SwapValuator(curves, params, spec.exercise_dates[k], tail).exponential_terms());
    }

    LsmcResult result;
    result.set_means.assign(config.sets, 0.0);
    const auto sets = static_cast<std::ptrdiff_t>(config.sets);
#pragma omp parallel for schedule(dynamic, 1) if (execution == Execution::parallel)
    for (std::ptrdiff_t s = 0; s < sets; ++s) {
        result.set_means[static_cast<std::size_t>(s)] =
            set_value(spec, params, curves, terms, config, static_cast<std::uint64_t>(s));
    }

    const Eigen::Map<const Eigen::VectorXd> means(result.set_means.data(), sets);
    result.estimate = means.mean();
    if (sets > 1) {
        const double var = (means.array() - result.estimate).square().sum() / static_cast<double>(sets - 1);
        result.std_error = std::sqrt(var / static_cast<double>(sets));
    }
    return result;
}

}  // namespace g2fgt
