#include <g2fgt/exposure.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace g2fgt {

namespace {

constexpr double kSameDate = 1e-10;

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), 0x65706563u};
    return std::mt19937_64(seq);
}

// Where an observation date sits relative to the exercise dates.
struct Placement {
    enum Kind { origin, before_exercise, at_exercise, expired } kind;
    std::size_t exercise = 0;  // next (or coinciding) exercise index
};

Placement place(double s, const std::vector<double>& exercise_dates) {
    if (s <= kSameDate) return {Placement::origin};
    for (std::size_t k = 0; k < exercise_dates.size(); ++k) {
        if (std::abs(s - exercise_dates[k]) <= kSameDate) return {Placement::at_exercise, k};
        if (s < exercise_dates[k]) return {Placement::before_exercise, k};
    }
    return {Placement::expired};
}

// Smallest transition standard deviation over the larger lattice spacing of
// the later grid. Below 1 the midpoint rule under-resolves the density.
double resolution_ratio(const ModelParams& params, const RotatedGrid& at_t, const RotatedGrid& at_tau) {
    const Eigen::Matrix2d cov = transition_moments(params, at_t.time, at_tau.time).covariance;
    const double min_var = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues()(0);
    double spacing = 0.0;
    for (int d = 0; d < 2; ++d) {
        if (at_tau.counts[d] > 1) spacing = std::max(spacing, at_tau.spacing[d]);
    }
    if (spacing == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(min_var, 0.0)) / spacing;
}

struct ResolutionLog {
    std::size_t count = 0;
    double worst = std::numeric_limits<double>::infinity();

    void note(double ratio) {
        if (ratio < 1.0) ++count;
        worst = std::min(worst, ratio);
    }
    void report(std::vector<std::string>& warnings) const {
        if (count == 0) return;
        std::ostringstream os;
        os << count << " observation grid(s) were rolled back over a step whose transition width is below the "
           << "lattice spacing (smallest ratio " << worst << "); living values there may be inaccurate";
        warnings.push_back(os.str());
    }
};

// Living-value grids for the observation dates `obs` (ascending, all strictly
// before exercise date k and after exercise date k - 1).
std::vector<RotatedGrid> interval_grids(const ModelParams& params, const CurveSet& curves,
                                        const ExposureConfig& config, const RotatedGrid& exercise_grid,
                                        const std::vector<double>& obs, ResolutionLog& log) {
    const PricingSettings& ps = config.pricing;
    std::vector<RotatedGrid> out(obs.size());
    const RotatedGrid* later = &exercise_grid;
    for (std::size_t i = obs.size(); i-- > 0;) {
        RotatedGrid g = build_grid(params, obs[i], ps.n_y, ps.m, ps.flags.use_rotation);
        const RotatedGrid& from = config.scheduling == Scheduling::leap ? exercise_grid : *later;
        log.note(resolution_ratio(params, g, from));
        g.values = rollback(params, curves, g, from, ps, config.normalize);
        out[i] = std::move(g);
        later = &out[i];
    }
    return out;
}

RotatedGrid with_values(const RotatedGrid& grid, const std::vector<double>& values) {
    RotatedGrid g = grid;
    g.values = values;
    return g;
}

struct Event {
    double time;
    std::optional<std::size_t> observation;
    std::optional<std::size_t> exercise;
    std::optional<std::size_t> period_start;  // index i of the period [t_i, t_{i+1}]
};

std::vector<Event> merge_events(const std::vector<double>& obs, const std::vector<double>& exercise,
                                const std::vector<double>& schedule, double horizon) {
    std::vector<Event> raw;
    for (std::size_t i = 0; i < obs.size(); ++i) raw.push_back({obs[i], i, std::nullopt, std::nullopt});
    for (std::size_t k = 0; k < exercise.size(); ++k) {
        if (exercise[k] <= horizon + kSameDate) raw.push_back({exercise[k], std::nullopt, k, std::nullopt});
    }
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
        if (schedule[i] <= horizon + kSameDate) raw.push_back({schedule[i], std::nullopt, std::nullopt, i});
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    std::vector<Event> out;
    for (const Event& e : raw) {
        if (!out.empty() && e.time - out.back().time <= kSameDate) {
            Event& m = out.back();
            if (e.observation) m.observation = e.observation;
            if (e.exercise) m.exercise = e.exercise;
            if (e.period_start) m.period_start = e.period_start;
            continue;
        }
        out.push_back(e);
    }
    return out;
}

struct PathState {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double integral = 0.0;
    std::optional<std::size_t> exercised;
    double fixing = 0.0;
};

}  // namespace

void ExposureConfig::validate() const {
    if (observation_dates.empty()) throw std::invalid_argument("exposure: no observation dates");
    if (observation_dates.front() != 0.0) throw std::invalid_argument("exposure: observation dates must start at 0");
    for (std::size_t i = 1; i < observation_dates.size(); ++i) {
        if (!(observation_dates[i] > observation_dates[i - 1])) {
            throw std::invalid_argument("exposure: observation dates must be strictly increasing");
        }
    }
    if (paths < 1) throw std::invalid_argument("exposure: need at least one path");
    if (!(hazard_rate >= 0.0)) throw std::invalid_argument("exposure: hazard rate must be non-negative");
    if (!(lgd >= 0.0 && lgd <= 1.0)) throw std::invalid_argument("exposure: LGD must lie in [0, 1]");
    pricing.validate();
}

std::vector<double> uniform_dates(double end, double spacing) {
    if (!(spacing > 0.0) || !(end >= 0.0)) throw std::invalid_argument("uniform_dates: bad spacing or end");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor(end / spacing + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) * spacing);
    if (end - out.back() > 1e-9 * std::max(1.0, end)) out.push_back(end);
    return out;
}

LivingValueGrids living_value_grids(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                                    const ExposureConfig& config) {
    config.validate();
    LivingValueGrids out;
    out.induction = backward_induction(spec, params, curves, config.pricing, true);
    const auto& dates = config.observation_dates;
    out.grids.resize(dates.size());

    std::vector<std::vector<std::size_t>> between(spec.exercise_dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const Placement p = place(dates[i], spec.exercise_dates);
        if (p.kind == Placement::before_exercise) between[p.exercise].push_back(i);
        if (p.kind == Placement::at_exercise) {
            out.grids[i] = with_values(out.induction.grids[p.exercise], out.induction.continuation[p.exercise]);
        }
    }
    ResolutionLog log;
    for (std::size_t k = 0; k < between.size(); ++k) {
        if (between[k].empty()) continue;
        std::vector<double> obs;
        for (auto i : between[k]) obs.push_back(dates[i]);
        auto grids = interval_grids(params, curves, config, out.induction.grids[k], obs, log);
        for (std::size_t j = 0; j < grids.size(); ++j) out.grids[between[k][j]] = std::move(grids[j]);
    }
    log.report(out.warnings);
    return out;
}

ExposureProfile epe_profile(const BermudanSpec& spec, const ModelParams& params, const CurveSet& curves,
                            const ExposureConfig& config) {
    config.validate();
    spec.validate();
    const InductionResult induction = backward_induction(spec, params, curves, config.pricing, true);
    const std::vector<double>& obs = config.observation_dates;
    const std::size_t n_obs = obs.size();
    const std::size_t n_ex = spec.exercise_dates.size();
    const std::vector<double>& schedule = spec.underlying.schedule;

    std::vector<RotatedGrid> continuation;
    std::vector<std::vector<BondFactor>> exercise_terms;
    for (std::size_t k = 0; k < n_ex; ++k) {
        continuation.push_back(with_values(induction.grids[k], induction.continuation[k]));
        const SwapSpec tail = spec.exercised_at(k);
        exercise_terms.push_back(tail.schedule.empty()
                                     ? std::vector<BondFactor>{}
                                     : SwapValuator(curves, params, spec.exercise_dates[k], tail).exponential_terms());
    }
    // P_{t_i}(t_{i+1}) and the spread factor, for fixing each period at its start.
    std::vector<BondFactor> period_bond;
    std::vector<double> period_spread;
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
        period_bond.push_back(bond_factor(params, curves.discount, schedule[i], schedule[i + 1]));
        period_spread.push_back(spread_factor(curves, schedule[i], schedule[i + 1]));
    }

    std::vector<Placement> placement;
    std::vector<std::vector<std::size_t>> between(n_ex);
    for (std::size_t i = 0; i < n_obs; ++i) {
        placement.push_back(place(obs[i], spec.exercise_dates));
        if (placement.back().kind == Placement::before_exercise) between[placement.back().exercise].push_back(i);
    }

    ExposureProfile profile;
    profile.dates = obs;
    profile.epe.assign(n_obs, 0.0);
    profile.std_error.assign(n_obs, 0.0);
    profile.clamp_count.assign(n_obs, 0);
    profile.curvature.assign(n_obs, 0.0);
    profile.curvature_error.assign(n_obs, 0.0);
    profile.option_value = induction.pv;

    const std::size_t n_paths = config.paths;
    std::vector<PathState> state(n_paths);
    std::vector<std::mt19937_64> engines;
    engines.reserve(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) engines.push_back(path_engine(config.seed, p));
    std::vector<double> e_now(n_paths), e_prev(n_paths), e_prev2(n_paths);
    std::vector<unsigned char> clamped(n_paths);

    std::vector<double> breaks = spec.exercise_dates;
    breaks.insert(breaks.end(), schedule.begin(), schedule.end());
    auto straddles = [&](double a, double b) {
        return std::any_of(breaks.begin(), breaks.end(),
                           [&](double d) { return d > a + kSameDate && d < b - kSameDate; });
    };

    const std::vector<Event> events = merge_events(obs, spec.exercise_dates, schedule, obs.back());
    ResolutionLog log;
    std::vector<RotatedGrid> interval;  // living grids for the current exercise interval
    std::size_t interval_k = n_ex;
    double t_prev = 0.0;
    std::size_t seen_obs = 0;
    const bool parallel = config.pricing.execution == Execution::parallel;

    for (const Event& ev : events) {
        const double t = ev.time;
        if (t - t_prev > kSameDate) {
            const ExactStepper stepper(params, t_prev, t);
            const auto np = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static) if (parallel)
            for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
                const auto p = static_cast<std::size_t>(pi);
                std::normal_distribution<double> normal;
                const Eigen::Vector3d z(normal(engines[p]), normal(engines[p]), normal(engines[p]));
                const StateAndIntegral s = stepper.step(state[p].x, z);
                state[p].x = s.state;
                state[p].integral += s.integral;
            }
            t_prev = t;
        }

        if (ev.exercise) {
            const std::size_t k = *ev.exercise;
            const bool last = k + 1 == n_ex;
            const auto np = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static) if (parallel)
            for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
                PathState& ps = state[static_cast<std::size_t>(pi)];
                if (ps.exercised) continue;
                double e = 0.0;
                for (const auto& term : exercise_terms[k]) e += term(ps.x);
                const double h = last ? 0.0 : continuation[k].interpolate(continuation[k].rotation * ps.x);
                if (e > 0.0 && e >= h) ps.exercised = k;
            }
        }

        if (ev.period_start) {
            const std::size_t i = *ev.period_start;
            const double accrual = schedule[i + 1] - schedule[i];
            for (auto& ps : state) ps.fixing = (period_spread[i] / period_bond[i](ps.x) - 1.0) / accrual;
        }

        if (!ev.observation) continue;
        const std::size_t j = *ev.observation;
        const Placement pl = placement[j];
        const double det = deterministic_discount(params, curves.discount, t);

        if (pl.kind == Placement::before_exercise && interval_k != pl.exercise) {
            std::vector<double> dates;
            for (auto i : between[pl.exercise]) dates.push_back(obs[i]);
            interval = interval_grids(params, curves, config, induction.grids[pl.exercise], dates, log);
            interval_k = pl.exercise;
        }
        const RotatedGrid* living = nullptr;
        if (pl.kind == Placement::at_exercise) living = &continuation[pl.exercise];
        if (pl.kind == Placement::before_exercise) {
            const auto& idx = between[pl.exercise];
            living = &interval[static_cast<std::size_t>(std::find(idx.begin(), idx.end(), j) - idx.begin())];
        }

        std::vector<std::optional<SwapValuator>> swaps(n_ex);
        for (std::size_t k = 0; k < n_ex; ++k) {
            if (spec.exercise_dates[k] <= t + kSameDate && !spec.exercised_at(k).schedule.empty()) {
                swaps[k].emplace(curves, params, t, spec.exercised_at(k));
            }
        }

        const auto np = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
            const auto p = static_cast<std::size_t>(pi);
            const PathState& ps = state[p];
            double v = 0.0;
            bool c = false;
            if (pl.kind == Placement::origin) {
                v = induction.pv;
            } else if (ps.exercised) {
                const auto& swap = swaps[*ps.exercised];
                if (swap && !swap->expired()) {
                    v = swap->in_period() ? (*swap)(ps.x, ps.fixing) : (*swap)(ps.x);
                }
            } else if (living) {
                v = living->interpolate(living->rotation * ps.x, &c);
            }
            clamped[p] = c;
            e_now[p] = det * std::exp(-ps.integral) * std::max(v, 0.0);
        }

        double sum = 0.0, sum_sq = 0.0;
        std::size_t clamps = 0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            sum += e_now[p];
            sum_sq += e_now[p] * e_now[p];
            clamps += clamped[p];
        }
        const double n = static_cast<double>(n_paths);
        profile.epe[j] = sum / n;
        profile.std_error[j] = n_paths > 1 ? std::sqrt(std::max(sum_sq / n - profile.epe[j] * profile.epe[j], 0.0) /
                                                       (n - 1.0))
                                           : 0.0;
        profile.clamp_count[j] = clamps;
        if (pl.kind == Placement::origin) {
            profile.epe[j] = induction.pv;
            profile.std_error[j] = 0.0;
        }

        if (seen_obs >= 2 && !straddles(obs[j - 2], obs[j])) {
            double cs = 0.0, cs2 = 0.0;
            for (std::size_t p = 0; p < n_paths; ++p) {
                const double d = e_prev[p] - 0.5 * (e_prev2[p] + e_now[p]);
                cs += d;
                cs2 += d * d;
            }
            const double mean = cs / n;
            profile.curvature[j - 1] = mean;
            profile.curvature_error[j - 1] =
                n_paths > 1 ? std::sqrt(std::max(cs2 / n - mean * mean, 0.0) / (n - 1.0)) : 0.0;
        }
        std::swap(e_prev2, e_prev);
        std::swap(e_prev, e_now);
        ++seen_obs;
    }
    log.report(profile.warnings);
    return profile;
}

std::vector<std::size_t> find_spikes(const ExposureProfile& profile, double threshold) {
    std::vector<std::size_t> out;
    const std::size_t n = profile.dates.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double c = std::abs(profile.curvature[i]);
        if (c > threshold * profile.curvature_error[i] && c > 0.0) out.push_back(i);
    }
    return out;
}

double cva_from_epe(const std::vector<double>& dates, const std::vector<double>& epe, double hazard_rate,
                    double lgd) {
    if (dates.empty() || dates.size() != epe.size()) throw std::invalid_argument("cva: profile is empty or ragged");
    auto integrand = [&](std::size_t i) { return hazard_rate * std::exp(-hazard_rate * dates[i]) * epe[i]; };
    double acc = 0.0;
    for (std::size_t i = 1; i < dates.size(); ++i) acc += 0.5 * (dates[i] - dates[i - 1]) * (integrand(i) + integrand(i - 1));
    return lgd * acc;
}

}  // namespace g2fgt
