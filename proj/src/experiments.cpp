#include <g2fgt/experiments.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace g2fgt {

namespace {

template <std::size_t D>
fgt::GaussSumProblem<D> uniform_problem(std::size_t n, double bandwidth, double domain, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> coord(0.0, domain * std::sqrt(bandwidth));
    std::uniform_real_distribution<double> weight(-1.0, 1.0);
    fgt::GaussSumProblem<D> p;
    p.bandwidth = bandwidth;
    p.sources.resize(n);
    p.targets.resize(n);
    p.weights.resize(n);
    for (auto& s : p.sources)
        for (auto& c : s) c = coord(engine);
    for (auto& w : p.weights) w = weight(engine);
    for (auto& t : p.targets)
        for (auto& c : t) c = coord(engine);
    return p;
}

}  // namespace

std::uint64_t now_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

double elapsed_ms(std::uint64_t start_ns) { return static_cast<double>(now_ns() - start_ns) * 1e-6; }

fgt::GaussSumProblem<2> uniform_problem_2d(std::size_t n, double bandwidth, double domain, std::uint64_t seed) {
    return uniform_problem<2>(n, bandwidth, domain, seed);
}

fgt::GaussSumProblem<1> uniform_problem_1d(std::size_t n, double bandwidth, double domain, std::uint64_t seed) {
    return uniform_problem<1>(n, bandwidth, domain, seed);
}

namespace {

// Fastest of up to three runs; stops repeating once a second has been spent.
template <typename F>
double best_ms(F&& f) {
    double best = std::numeric_limits<double>::infinity(), total = 0.0;
    for (int rep = 0; rep < 3 && total < 1000.0; ++rep) {
        const auto start = now_ns();
        f();
        const double ms = elapsed_ms(start);
        best = std::min(best, ms);
        total += ms;
    }
    return best;
}

}  // namespace

FgtBenchRow fgt_bench_row(std::size_t n, const FgtBenchSettings& settings, std::uint64_t seed) {
    const auto problem = uniform_problem_2d(n, settings.bandwidth, settings.domain, seed);
    FgtBenchRow row;
    row.n = n;
    for (double w : problem.weights) row.weight_l1 += std::abs(w);

    std::vector<double> direct, fast;
    row.direct_ms = best_ms([&] { direct = fgt::direct_gauss_sum(problem, Execution::parallel); });
    fgt::FgtSettings fs;
    fs.order = settings.order;
    row.fgt_ms = best_ms([&] { fast = fgt::fast_gauss_sum(problem, fs, Execution::parallel); });

    for (std::size_t i = 0; i < n; ++i) row.max_abs_err = std::max(row.max_abs_err, std::abs(fast[i] - direct[i]));
    return row;
}

PriceRow timed_price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                     const PricingSettings& settings) {
    PriceRow row;
    row.n_y = settings.n_y;
    row.flags = settings.flags.label();
    const auto start = now_ns();
    row.pv = price(spec, params, curves, settings);
    row.wall_ms = elapsed_ms(start);
    return row;
}

}  // namespace g2fgt
