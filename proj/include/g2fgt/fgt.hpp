#pragma once

// Blocked fast Gauss transform in one and two dimensions.
//
// Evaluates g_i = sum_j q_j exp(-|x_i - y_j|^2 / delta) for targets x_i and
// weighted sources y_j. Points are bucketed into axis-aligned square blocks
// of side `block_width_multiplier * sqrt(delta)` anchored at the origin.
// For every (source block, target block) pair whose centre distance is
// within `cutoff * sqrt(delta)`, the source block's scaled moments are
// translated into a Taylor expansion about the target block centre through
// the Hermite functions h_n(x) = exp(-x^2) H_n(x). In 2-D the kernel is a
// product of 1-D kernels, so moments and coefficients are (p+1)x(p+1)
// tensors and translation is two Hankel contractions.

#include <g2fgt/execution.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace g2fgt::fgt {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
using BlockKey = std::array<std::int64_t, D>;

template <std::size_t D>
struct GaussSumProblem {
    std::vector<Point<D>> sources;
    std::vector<double> weights;
    std::vector<Point<D>> targets;
    double bandwidth = 1.0;  // delta

    // Throws std::invalid_argument on a malformed problem.
    void validate() const;
};

inline constexpr int kMaxOrder = 64;

struct FgtSettings {
    int order = 32;                       // p: sums run over 0..p per axis
    double block_width_multiplier = 2.0;  // block side in units of sqrt(delta)
    double cutoff = 8.0;                  // sigma_max in units of sqrt(delta)
    std::size_t fallback_threshold = 0;   // direct sum below this block population

    void validate() const;
};

// Points grouped by block. `members[offsets[b] .. offsets[b+1])` are the
// indices of the points in block b.
template <std::size_t D>
struct BlockPartition {
    std::vector<BlockKey<D>> keys;
    std::vector<Point<D>> centers;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> block_of;

    std::size_t size() const { return keys.size(); }
    std::size_t population(std::size_t b) const { return offsets[b + 1] - offsets[b]; }
    std::span<const std::uint32_t> block(std::size_t b) const {
        return {members.data() + offsets[b], population(b)};
    }
};

template <std::size_t D>
struct FgtPlan {
    FgtSettings settings;
    double bandwidth = 1.0;
    double block_width = 0.0;      // absolute
    double cutoff_distance = 0.0;  // absolute centre-distance cutoff
    std::size_t source_count = 0;
    std::size_t target_count = 0;
    BlockPartition<D> sources;
    BlockPartition<D> targets;
    // Interaction lists: for target block b, the source blocks
    // `pair_sources[pair_offsets[b] .. pair_offsets[b+1])` are evaluated.
    std::vector<std::size_t> pair_offsets;
    std::vector<std::uint32_t> pair_sources;

    std::size_t active_pairs() const { return pair_sources.size(); }
    std::span<const std::uint32_t> interactions(std::size_t target_block) const {
        return {pair_sources.data() + pair_offsets[target_block],
                pair_offsets[target_block + 1] - pair_offsets[target_block]};
    }
    // True when the pair is dropped by the centre-distance cutoff.
    bool skipped(std::size_t source_block, std::size_t target_block) const;
};

// h_0(x) .. h_{order_max}(x) with h_n(x) = exp(-x^2) H_n(x) (physicists'
// Hermite polynomials), by the three-term recurrence.
std::vector<double> hermite_h(int order_max, double x);

template <std::size_t D>
std::vector<double> direct_gauss_sum(const GaussSumProblem<D>& problem,
                                     Execution exec = Execution::parallel);

template <std::size_t D>
FgtPlan<D> plan_fgt(const GaussSumProblem<D>& problem, const FgtSettings& settings = {});

template <std::size_t D>
std::vector<double> fgt_apply(const GaussSumProblem<D>& problem, const FgtPlan<D>& plan,
                              Execution exec = Execution::parallel);

// plan_fgt followed by fgt_apply.
template <std::size_t D>
std::vector<double> fast_gauss_sum(const GaussSumProblem<D>& problem,
                                   const FgtSettings& settings = {},
                                   Execution exec = Execution::parallel);

}  // namespace g2fgt::fgt
