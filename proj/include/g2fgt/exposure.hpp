#pragma once

#include <g2fgt/bermudan.hpp>
#include <g2fgt/curves.hpp>
#include <g2fgt/model.hpp>
#include <g2fgt/rotation_grid.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace g2fgt {

enum class Scheduling {
    leap,  // each observation grid rolled back directly from the next exercise date
    step,  // chained backward through the intermediate observation dates
};

struct ExposureConfig {
    std::vector<double> observation_dates;  // starts at 0, strictly increasing
    std::size_t paths = 10000;
    PricingSettings pricing = [] {
        PricingSettings p;
        p.n_y = 300;
        return p;
    }();
    Scheduling scheduling = Scheduling::leap;
    // Divide living-value quadratures by their discrete mass. Only matters for
    // steps shorter than the lattice can resolve.
    bool normalize = false;
    double hazard_rate = 0.0;
    double lgd = 0.6;
    std::uint64_t seed = 20240101;

    void validate() const;
};

// 0, spacing, 2 spacing, ... up to and including `end`.
std::vector<double> uniform_dates(double end, double spacing);

struct LivingValueGrids {
    InductionResult induction;  // exercise-date grids and continuation values
    // One per observation date holding the value of the unexercised option.
    // Values are empty at s = 0 and after the last exercise date.
    std::vector<RotatedGrid> grids;
    std::vector<std::string> warnings;
};

LivingValueGrids living_value_grids(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                    const ExposureConfig& config);

struct ExposureProfile {
    std::vector<double> dates;
    std::vector<double> epe;
    std::vector<double> std_error;
    std::vector<std::size_t> clamp_count;
    // Pathwise e_i - (e_{i-1} + e_{i+1}) / 2 of the discounted positive
    // exposure, its mean and standard error. Zero at the two ends and wherever
    // a payment or exercise date falls strictly between the two neighbours,
    // since exposure steps there.
    std::vector<double> curvature;
    std::vector<double> curvature_error;
    double option_value = 0.0;
    std::vector<std::string> warnings;
};

ExposureProfile epe_profile(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                            const ExposureConfig& config);

// Interior indices whose curvature exceeds `threshold` standard errors.
std::vector<std::size_t> find_spikes(const ExposureProfile& profile, double threshold = 5.0);

// Trapezoidal LGD int lambda exp(-lambda s) EPE(s) ds with a flat hazard rate.
double cva_from_epe(const std::vector<double>& dates, const std::vector<double>& epe, double hazard_rate,
                    double lgd);

}  // namespace g2fgt
