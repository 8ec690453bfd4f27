#pragma once

#include <g2fgt/curves.hpp>
#include <g2fgt/execution.hpp>
#include <g2fgt/fgt.hpp>
#include <g2fgt/model.hpp>
#include <g2fgt/rotation_grid.hpp>
#include <g2fgt/swap.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace g2fgt {

// Option to enter, on one of the exercise dates t_k, the periods of the
// underlying swap that start on or after t_k.
struct BermudanSpec {
    SwapSpec underlying;
    std::vector<double> exercise_dates;

    void validate() const;
    SwapSpec exercised_at(std::size_t k) const { return underlying.tail_from(exercise_dates.at(k)); }
};

struct MethodFlags {
    bool use_fgt = true;
    bool use_rotation = true;

    // "FGT+Rotate", "NoFGT+Rotate", "FGT", "NoFGT"
    std::string label() const;
};

struct PricingSettings {
    int n_y = 200;
    double m = 8.0;
    MethodFlags flags;
    fgt::FgtSettings fgt;
    Execution execution = Execution::parallel;

    void validate() const;
};

// Value of entering the exercised swap at every node of a grid dated t_k.
std::vector<double> exercise_value(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                   std::size_t k, const RotatedGrid& grid);

// Discounted expectation at the nodes of `at_t` of the values held on the
// later grid `at_tau`. With `normalize` each target's quadrature weights are
// divided by their discrete sum, so a step whose transition is narrower than
// the lattice spacing still carries unit mass.
std::vector<double> rollback(const ModelParams& params, const CurveSet& curves, const RotatedGrid& at_t,
                             const RotatedGrid& at_tau, const PricingSettings& settings, bool normalize = false);

// The same expectation for the single state X = 0 at time 0.
double rollback_to_origin(const ModelParams& params, const CurveSet& curves, const RotatedGrid& at_tau,
                          const PricingSettings& settings);

struct InductionResult {
    double pv = 0.0;
    // Filled only when requested: per exercise date the grid holding
    // max(E, H) and the continuation values H on the same nodes.
    std::vector<RotatedGrid> grids;
    std::vector<std::vector<double>> continuation;
};

InductionResult backward_induction(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                   const PricingSettings& settings, bool keep_grids = false);

double price(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
             const PricingSettings& settings);

}  // namespace g2fgt
