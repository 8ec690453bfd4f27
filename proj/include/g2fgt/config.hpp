#pragma once

// Run configuration read from a JSON file. Layout:
//
//   model     {kappa0, kappa1, sigma0, sigma1, rho} or {"preset": "usd_2018" | "usd_2019"}
//   curves    {discount: [[t, df], ...], forecast: [[t, df], ...]}   forecast defaults to discount
//   deal      {schedule, fixed_rate, notional, direction, exercise_dates}
//             schedule / exercise_dates: explicit list or {start, end, step}
//   numerics  {n_y, m, use_fgt, use_rotation, order, block_width_multiplier, cutoff, fallback_threshold}
//   converge  {n_y: [...], reference_n_y}
//   fgt_bench {n: [...], bandwidth, order, domain}
//   lsmc      {paths_per_set, sets, in_the_money_only}
//   exposure  {paths, n_y, spacing, end, dates, mode, normalize, hazard_rate, lgd}
//   seed, threads, output
//
// model, curves and deal are required; everything else has defaults.

#include <g2fgt/bermudan.hpp>
#include <g2fgt/curves.hpp>
#include <g2fgt/experiments.hpp>
#include <g2fgt/exposure.hpp>
#include <g2fgt/lsmc.hpp>
#include <g2fgt/model.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace g2fgt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConvergeSettings {
    std::vector<int> n_y{50, 100, 200, 400, 800};
    int reference_n_y = 6400;
};

struct RunConfig {
    ModelParams model;
    CurveSet curves;
    BermudanSpec deal;
    PricingSettings pricing;
    ConvergeSettings converge;
    FgtBenchSettings fgt_bench;
    LsmcConfig lsmc;
    ExposureConfig exposure;
    std::uint64_t seed = 20240101;
    int threads = 0;
    std::string output;  // empty: stdout
};

// Throws ConfigError naming the offending section.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// start, start + step, ... up to end inclusive (within rounding).
std::vector<double> date_range(double start, double end, double step);

}  // namespace g2fgt
