#pragma once

// Timed runs shared by the command-line driver and the acceptance suite.

#include <g2fgt/bermudan.hpp>
#include <g2fgt/fgt.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace g2fgt {

struct FgtBenchSettings {
    std::vector<std::size_t> sizes{10000, 100000};
    double bandwidth = 2.0;
    int order = 32;
    // Points fill [0, domain sqrt(bandwidth)]^2 at every N.
    double domain = 20.0;
};

struct FgtBenchRow {
    std::size_t n = 0;
    double direct_ms = 0.0;
    double fgt_ms = 0.0;
    double max_abs_err = 0.0;
    double weight_l1 = 0.0;  // sum |q|
};

// N uniform sources and N uniform targets on the square, weights in [-1, 1].
fgt::GaussSumProblem<2> uniform_problem_2d(std::size_t n, double bandwidth, double domain, std::uint64_t seed);
fgt::GaussSumProblem<1> uniform_problem_1d(std::size_t n, double bandwidth, double domain, std::uint64_t seed);

// Direct sum (vectorised, parallel) against the FGT on one random problem.
// Times are the fastest of up to three runs.
FgtBenchRow fgt_bench_row(std::size_t n, const FgtBenchSettings& settings, std::uint64_t seed);

struct PriceRow {
    int n_y = 0;
    double pv = 0.0;
    double wall_ms = 0.0;
    std::string flags;
};

PriceRow timed_price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                     const PricingSettings& settings);

double elapsed_ms(std::uint64_t start_ns);
std::uint64_t now_ns();

}  // namespace g2fgt
