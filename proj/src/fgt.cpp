#include <g2fgt/fgt.hpp>

#include "direct_kernels.hpp"

#include <Eigen/Dense>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace g2fgt {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace g2fgt

namespace g2fgt::fgt {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kChunk = 128;

template <std::size_t D>
struct KeyHash {
    std::size_t operator()(const BlockKey<D>& k) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : k) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

template <std::size_t D>
bool all_finite(const Point<D>& p) {
    return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t D>
BlockKey<D> key_of(const Point<D>& p, double side) {
    BlockKey<D> k{};
    for (std::size_t d = 0; d < D; ++d) k[d] = static_cast<std::int64_t>(std::floor(p[d] / side));
    return k;
}

template <std::size_t D>
BlockPartition<D> partition(const std::vector<Point<D>>& points, double side) {
    BlockPartition<D> part;
    const std::size_t n = points.size();
    part.block_of.resize(n);
    std::unordered_map<BlockKey<D>, std::uint32_t, KeyHash<D>> index;
    BlockKey<D> last{};
    std::uint32_t last_id = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
        const BlockKey<D> key = key_of(points[i], side);
        if (last_id == std::numeric_limits<std::uint32_t>::max() || key != last) {
            auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(part.keys.size()));
            if (inserted) part.keys.push_back(key);
            last = key;
            last_id = it->second;
        }
        part.block_of[i] = last_id;
    }

    const std::size_t nb = part.keys.size();
    part.offsets.assign(nb + 1, 0);
    for (auto b : part.block_of) ++part.offsets[b + 1];
    for (std::size_t b = 0; b < nb; ++b) part.offsets[b + 1] += part.offsets[b];
    part.members.resize(n);
    std::vector<std::size_t> cursor(part.offsets.begin(), part.offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i) part.members[cursor[part.block_of[i]]++] = static_cast<std::uint32_t>(i);

    part.centers.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t d = 0; d < D; ++d) {
            part.centers[b][d] = (static_cast<double>(part.keys[b][d]) + 0.5) * side;
        }
    }
    return part;
}

// Key offsets compare exactly because both partitions share the same anchor.
template <std::size_t D>
bool within_cutoff(const BlockKey<D>& a, const BlockKey<D>& b, double multiplier, double cutoff) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
        const double diff = static_cast<double>(a[d] - b[d]);
        d2 += diff * diff;
    }
    return d2 * multiplier * multiplier <= cutoff * cutoff * (1.0 + 1e-12);
}

// Rows: t^k / k! for k = 0..p, scaled by `scale`.
inline void scaled_powers(double t, double scale, int p, double* row) {
    double v = scale;
    row[0] = v;
    for (int k = 1; k <= p; ++k) {
        v *= t / k;
        row[k] = v;
    }
}

}  // namespace

template <std::size_t D>
void GaussSumProblem<D>::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("gauss sum: bandwidth must be positive and finite");
    }
    if (sources.size() != weights.size()) {
        throw std::invalid_argument("gauss sum: " + std::to_string(sources.size()) + " sources but " +
                                    std::to_string(weights.size()) + " weights");
    }
    if (sources.size() > std::numeric_limits<std::uint32_t>::max() ||
        targets.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("gauss sum: too many points");
    }
    for (const auto& p : sources) {
        if (!all_finite<D>(p)) throw std::invalid_argument("gauss sum: non-finite source coordinate");
    }
    for (const auto& p : targets) {
        if (!all_finite<D>(p)) throw std::invalid_argument("gauss sum: non-finite target coordinate");
    }
}

void FgtSettings::validate() const {
    if (order < 1 || order > kMaxOrder) {
        throw std::invalid_argument("fgt: order must lie in [1, " + std::to_string(kMaxOrder) + "]");
    }
    if (!(block_width_multiplier > 0.0)) throw std::invalid_argument("fgt: block width must be positive");
    if (!(cutoff > 0.0)) throw std::invalid_argument("fgt: cutoff must be positive");
}

template <std::size_t D>
bool FgtPlan<D>::skipped(std::size_t source_block, std::size_t target_block) const {
    return !within_cutoff<D>(sources.keys.at(source_block), targets.keys.at(target_block),
                             settings.block_width_multiplier, settings.cutoff);
}

std::vector<double> hermite_h(int order_max, double x) {
    if (order_max < 0) throw std::invalid_argument("hermite_h: negative order");
    if (!std::isfinite(x)) throw std::invalid_argument("hermite_h: non-finite argument");
    std::vector<double> h(static_cast<std::size_t>(order_max) + 1);
    h[0] = std::exp(-x * x);
    if (order_max >= 1) h[1] = 2.0 * x * h[0];
    for (int n = 1; n < order_max; ++n) {
        h[n + 1] = 2.0 * x * h[n] - 2.0 * n * h[n - 1];
    }
    return h;
}

template <std::size_t D>
std::vector<double> direct_gauss_sum(const GaussSumProblem<D>& problem, Execution exec) {
    problem.validate();
    const std::size_t ns = problem.sources.size();
    const std::size_t nt = problem.targets.size();
    const double inv = 1.0 / problem.bandwidth;

    // Structure-of-arrays copy so the inner loop vectorises.
    std::array<std::vector<double>, D> src;
    for (std::size_t d = 0; d < D; ++d) {
        src[d].resize(ns);
        for (std::size_t j = 0; j < ns; ++j) src[d][j] = problem.sources[j][d];
    }
    const double* q = problem.weights.data();

    std::vector<double> out(nt, 0.0);
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < nt; ++i) {
            const auto& x = problem.targets[i];
            double acc = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                double d2 = 0.0;
                for (std::size_t d = 0; d < D; ++d) d2 += (x[d] - src[d][j]) * (x[d] - src[d][j]);
                acc += q[j] * std::exp(-d2 * inv);
            }
            out[i] = acc;
        }
        return out;
    }

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nt; ++i) {
        const auto& x = problem.targets[i];
        if constexpr (D == 1) {
            out[i] = detail::gauss_row_sum_1d(src[0].data(), q, ns, x[0], inv);
        } else {
            out[i] = detail::gauss_row_sum_2d(src[0].data(), src[1].data(), q, ns, x[0], x[1], inv);
        }
    }
    return out;
}

template <std::size_t D>
FgtPlan<D> plan_fgt(const GaussSumProblem<D>& problem, const FgtSettings& settings) {
    problem.validate();
    settings.validate();
    FgtPlan<D> plan;
    plan.settings = settings;
    plan.bandwidth = problem.bandwidth;
    const double root = std::sqrt(problem.bandwidth);
    plan.block_width = settings.block_width_multiplier * root;
    plan.cutoff_distance = settings.cutoff * root;
    plan.source_count = problem.sources.size();
    plan.target_count = problem.targets.size();
    plan.sources = partition<D>(problem.sources, plan.block_width);
    plan.targets = partition<D>(problem.targets, plan.block_width);

    const auto radius = static_cast<std::int64_t>(std::floor(settings.cutoff / settings.block_width_multiplier + 1e-12));
    std::size_t cube = 1;
    for (std::size_t d = 0; d < D; ++d) cube *= static_cast<std::size_t>(2 * radius + 1);

    std::unordered_map<BlockKey<D>, std::uint32_t, KeyHash<D>> source_index;
    const bool scan_neighbours = cube < plan.sources.size();
    if (scan_neighbours) {
        source_index.reserve(plan.sources.size());
        for (std::size_t b = 0; b < plan.sources.size(); ++b) {
            source_index.emplace(plan.sources.keys[b], static_cast<std::uint32_t>(b));
        }
    }

    const std::size_t ntb = plan.targets.size();
    plan.pair_offsets.assign(ntb + 1, 0);
    for (std::size_t tb = 0; tb < ntb; ++tb) {
        const auto& kt = plan.targets.keys[tb];
        if (scan_neighbours) {
            BlockKey<D> off{};
            off.fill(-radius);
            for (;;) {
                BlockKey<D> ks = kt;
                for (std::size_t d = 0; d < D; ++d) ks[d] += off[d];
                if (within_cutoff<D>(ks, kt, settings.block_width_multiplier, settings.cutoff)) {
                    if (auto it = source_index.find(ks); it != source_index.end()) {
                        plan.pair_sources.push_back(it->second);
                    }
                }
                std::size_t d = 0;
                while (d < D && ++off[d] > radius) off[d++] = -radius;
                if (d == D) break;
            }
        } else {
            for (std::size_t sb = 0; sb < plan.sources.size(); ++sb) {
                if (within_cutoff<D>(plan.sources.keys[sb], kt, settings.block_width_multiplier, settings.cutoff)) {
                    plan.pair_sources.push_back(static_cast<std::uint32_t>(sb));
                }
            }
        }
        plan.pair_offsets[tb + 1] = plan.pair_sources.size();
    }
    return plan;
}

template <std::size_t D>
std::vector<double> fgt_apply(const GaussSumProblem<D>& problem, const FgtPlan<D>& plan, Execution exec) {
    if (problem.sources.size() != plan.source_count || problem.targets.size() != plan.target_count ||
        problem.bandwidth != plan.bandwidth) {
        throw std::invalid_argument("fgt_apply: plan was built for a different problem");
    }
    const int p = plan.settings.order;
    const int n_coef = p + 1;
    const double inv_root = 1.0 / std::sqrt(problem.bandwidth);
    const std::size_t threshold = plan.settings.fallback_threshold;
    const bool par = exec == Execution::parallel;
    const double inv_bw = 1.0 / problem.bandwidth;

    const auto& sp = plan.sources;
    const auto& tp = plan.targets;

    // Hankel translation matrices H(a, b) = h_{a+b}(d * multiplier), one per
    // per-axis key offset d = target key - source key.
    const auto radius = static_cast<std::int64_t>(std::floor(plan.settings.cutoff / plan.settings.block_width_multiplier + 1e-12));
    std::vector<Matrix> hankel(static_cast<std::size_t>(2 * radius + 1));
    for (std::int64_t d = -radius; d <= radius; ++d) {
        const auto h = hermite_h(2 * p, static_cast<double>(d) * plan.settings.block_width_multiplier);
        Matrix m(n_coef, n_coef);
        for (int a = 0; a < n_coef; ++a)
            for (int b = 0; b < n_coef; ++b) m(a, b) = h[a + b];
        hankel[static_cast<std::size_t>(d + radius)] = std::move(m);
    }
    auto hankel_for = [&](std::int64_t d) -> const Matrix& { return hankel[static_cast<std::size_t>(d + radius)]; };

    // Step 1: scaled moments per source block, sum_j q_j prod_d t_d^a / a!.
    const std::size_t nsb = sp.size();
    std::vector<Matrix> moments(nsb);
#pragma omp parallel if (par)
    {
        Matrix a0(kChunk, n_coef);
        Matrix a1(kChunk, n_coef);
#pragma omp for schedule(dynamic, 1)
        for (std::size_t sb = 0; sb < nsb; ++sb) {
            if (sp.population(sb) < threshold) continue;
            Matrix m = Matrix::Zero(n_coef, D == 1 ? 1 : n_coef);
            const auto members = sp.block(sb);
            const auto& c = sp.centers[sb];
            for (std::size_t begin = 0; begin < members.size(); begin += kChunk) {
                const std::size_t len = std::min(kChunk, members.size() - begin);
                for (std::size_t r = 0; r < len; ++r) {
                    const std::uint32_t j = members[begin + r];
                    const auto& y = problem.sources[j];
                    const double q = problem.weights[j];
                    if constexpr (D == 1) {
                        scaled_powers((y[0] - c[0]) * inv_root, q, p, &a0(static_cast<Eigen::Index>(r), 0));
                    } else {
                        scaled_powers((y[0] - c[0]) * inv_root, 1.0, p, &a0(static_cast<Eigen::Index>(r), 0));
                        scaled_powers((y[1] - c[1]) * inv_root, q, p, &a1(static_cast<Eigen::Index>(r), 0));
                    }
                }
                const auto rows = static_cast<Eigen::Index>(len);
                if constexpr (D == 1) {
                    m.col(0).noalias() += a0.topRows(rows).colwise().sum().transpose();
                } else {
                    m.noalias() += a0.topRows(rows).transpose() * a1.topRows(rows);
                }
            }
            moments[sb] = std::move(m);
        }
    }

    // Steps 2 and 3: per target block, translate then evaluate.
    std::vector<double> out(problem.targets.size(), 0.0);
    const std::size_t ntb = tp.size();
#pragma omp parallel if (par)
    {
        Matrix coef(n_coef, D == 1 ? 1 : n_coef);
        Matrix tmp(n_coef, n_coef);
        Matrix s0(kChunk, n_coef);
        Matrix s1(kChunk, n_coef);
        Matrix prod(kChunk, D == 1 ? 1 : n_coef);
#pragma omp for schedule(dynamic, 1)
        for (std::size_t tb = 0; tb < ntb; ++tb) {
            const auto targets = tp.block(tb);
            const bool target_sparse = targets.size() < threshold;
            coef.setZero();
            bool any_expansion = false;
            for (const std::uint32_t sb : plan.interactions(tb)) {
                if (target_sparse || sp.population(sb) < threshold) {
                    for (const std::uint32_t i : targets) {
                        const auto& x = problem.targets[i];
                        double acc = 0.0;
                        for (const std::uint32_t j : sp.block(sb)) {
                            const auto& y = problem.sources[j];
                            double d2 = 0.0;
                            for (std::size_t d = 0; d < D; ++d) d2 += (x[d] - y[d]) * (x[d] - y[d]);
                            acc += problem.weights[j] * std::exp(-d2 * inv_bw);
                        }
                        out[i] += acc;
                    }
                    continue;
                }
                any_expansion = true;
                const auto& kt = tp.keys[tb];
                const auto& ks = sp.keys[sb];
                if constexpr (D == 1) {
                    coef.noalias() += hankel_for(kt[0] - ks[0]) * moments[sb];
                } else {
                    tmp.noalias() = moments[sb] * hankel_for(kt[1] - ks[1]);
                    coef.noalias() += hankel_for(kt[0] - ks[0]) * tmp;
                }
            }
            if (!any_expansion) continue;

            const auto& c = tp.centers[tb];
            for (std::size_t begin = 0; begin < targets.size(); begin += kChunk) {
                const std::size_t len = std::min(kChunk, targets.size() - begin);
                for (std::size_t r = 0; r < len; ++r) {
                    const auto& x = problem.targets[targets[begin + r]];
                    scaled_powers((c[0] - x[0]) * inv_root, 1.0, p, &s0(static_cast<Eigen::Index>(r), 0));
                    if constexpr (D == 2) {
                        scaled_powers((c[1] - x[1]) * inv_root, 1.0, p, &s1(static_cast<Eigen::Index>(r), 0));
                    }
                }
                const auto rows = static_cast<Eigen::Index>(len);
                prod.topRows(rows).noalias() = s0.topRows(rows) * coef;
                for (std::size_t r = 0; r < len; ++r) {
                    const auto row = static_cast<Eigen::Index>(r);
                    double g = 0.0;
                    if constexpr (D == 1) {
                        g = prod(row, 0);
                    } else {
                        g = prod.row(row).dot(s1.row(row));
                    }
                    out[targets[begin + r]] += g;
                }
            }
        }
    }
    return out;
}

template <std::size_t D>
std::vector<double> fast_gauss_sum(const GaussSumProblem<D>& problem, const FgtSettings& settings, Execution exec) {
    return fgt_apply<D>(problem, plan_fgt<D>(problem, settings), exec);
}

#define G2FGT_INSTANTIATE(D)                                                                          \
    template struct GaussSumProblem<D>;                                                               \
    template struct FgtPlan<D>;                                                                       \
    template std::vector<double> direct_gauss_sum<D>(const GaussSumProblem<D>&, Execution);           \
    template FgtPlan<D> plan_fgt<D>(const GaussSumProblem<D>&, const FgtSettings&);                   \
    template std::vector<double> fgt_apply<D>(const GaussSumProblem<D>&, const FgtPlan<D>&, Execution); \
    template std::vector<double> fast_gauss_sum<D>(const GaussSumProblem<D>&, const FgtSettings&, Execution);

G2FGT_INSTANTIATE(1)
G2FGT_INSTANTIATE(2)

#undef G2FGT_INSTANTIATE

}  // namespace g2fgt::fgt
