// Acceptance suite: one PASS/FAIL line per criterion. Arguments select
// criteria by substring; no arguments runs everything. Exit status is the
// number of failures.

#include <g2fgt/config.hpp>
#include <g2fgt/experiments.hpp>
#include <g2fgt/exposure.hpp>
#include <g2fgt/lsmc.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace g2fgt;

namespace {

// Tolerances and brackets.
constexpr double kFgtOracleRel = 1e-10;
constexpr double kFgtOracleSeconds = 5.0;
constexpr double kFgtGrowthMax = 5.0;
constexpr double kDirectGrowthMin = 30.0;
constexpr double kMomentRel = 1e-8;
constexpr double kPillarRel = 1e-12;
constexpr double kRotationOffDiag = 1e-12;
constexpr double kRollbackReproRel = 1e-10;
constexpr double kRollbackRatioLow = 2.5;
constexpr double kRollbackRatioHigh = 6.5;
constexpr double kTransparencyAbs = 1e-9;
constexpr double kSlopeLow = -2.5;
constexpr double kSlopeHigh = -1.5;
constexpr double kLsmcSigmas = 3.0;
constexpr double kEpeOriginAbs = 1e-4;
constexpr double kSpikeSigmas = 5.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string config_path(const char* name) { return std::string(G2FGT_CONFIG_DIR) + "/" + name; }

RunConfig table1() { return load_config(config_path("usd_2018_like.json")); }
RunConfig table2() { return load_config(config_path("usd_2019_like.json")); }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <std::size_t D>
void fgt_oracle_case(const fgt::GaussSumProblem<D>& problem, double& worst_ratio, double& seconds) {
    fgt::FgtSettings s;
    s.order = 32;
    s.block_width_multiplier = 2.0;
    s.cutoff = 8.0;
    const auto exact = fgt::direct_gauss_sum(problem, Execution::serial);
    const auto t0 = now_ns();
    const auto fast = fgt::fast_gauss_sum(problem, s);
    seconds += elapsed_ms(t0) / 1e3;
    double l1 = 0.0, err = 0.0;
    for (double q : problem.weights) l1 += std::abs(q);
    for (std::size_t i = 0; i < exact.size(); ++i) err = std::max(err, std::abs(fast[i] - exact[i]));
    worst_ratio = std::max(worst_ratio, err / l1);
}

Outcome fgt_oracle() {
    double worst = 0.0, seconds = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        fgt_oracle_case(uniform_problem_1d(2000, 2.0, 20.0, seed), worst, seconds);
        fgt_oracle_case(uniform_problem_2d(2000, 2.0, 20.0, seed), worst, seconds);
    }
    return {worst <= kFgtOracleRel && seconds < kFgtOracleSeconds,
            fmt("max |fgt - direct| / sum|q| = %.2e (limit %.0e), fgt time %.2f s over 6 problems", worst,
                kFgtOracleRel, seconds)};
}

Outcome fgt_complexity() {
    FgtBenchSettings s;
    const FgtBenchRow a = fgt_bench_row(10000, s, 11);
    const FgtBenchRow b = fgt_bench_row(100000, s, 11);
    const double fgt_growth = b.fgt_ms / a.fgt_ms;
    const double direct_growth = b.direct_ms / a.direct_ms;
    return {fgt_growth <= kFgtGrowthMax && direct_growth >= kDirectGrowthMin,
            fmt("N 1e4 -> 1e5: fgt %.1f -> %.1f ms (x%.2f, limit %.0f), direct %.0f -> %.0f ms (x%.1f, need %.0f)",
                a.fgt_ms, b.fgt_ms, fgt_growth, kFgtGrowthMax, a.direct_ms, b.direct_ms, direct_growth,
                kDirectGrowthMin)};
}

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

Outcome moments() {
    double worst = 0.0;
    for (const ModelParams& p : {presets::usd_2018(), presets::usd_2019()}) {
        const double k[2] = {p.kappa0, p.kappa1};
        const double sig[2] = {p.sigma0, p.sigma1};
        auto c = [&](int i, int j) { return (i == j ? 1.0 : p.rho) * sig[i] * sig[j]; };
        auto chi_q = [](double a, double u) { return (1.0 - std::exp(-a * u)) / a; };
        for (auto [t, tau] : {std::pair{0.0, 0.25}, {0.0, 1.0}, {0.5, 2.0}, {1.0, 5.0}}) {
            const TransitionMoments m = transition_moments(p, t, tau);
            auto rel = [&](double got, double want) { worst = std::max(worst, std::abs(got - want) / std::abs(want)); };
            double v = 0.0;
            for (int i = 0; i < 2; ++i) {
                double eta = 0.0;
                for (int j = 0; j < 2; ++j) {
                    rel(m.covariance(i, j),
                        c(i, j) * quad([&](double s) { return std::exp(-(k[i] + k[j]) * (tau - s)); }, t, tau));
                    v += c(i, j) * quad([&](double s) { return chi_q(k[i], tau - s) * chi_q(k[j], tau - s); }, t, tau);
                    eta -= c(i, j) * quad([&](double s) { return std::exp(-k[i] * (tau - s)) * chi_q(k[j], tau - s); },
                                          t, tau);
                }
                rel(m.forward_drift(i), eta);
            }
            rel(m.integrated_variance, v);
        }
    }
    return {worst <= kMomentRel, fmt("worst relative deviation of Sigma, v, eta from quadrature %.2e (limit %.0e)",
                                     worst, kMomentRel)};
}

Outcome curve_reproduction() {
    double worst = 0.0;
    std::size_t count = 0;
    for (const RunConfig& c : {table1(), table2()}) {
        for (auto [t, df] : c.curves.discount.pillars()) {
            if (t <= 0.0) continue;
            const double p = bond_price(c.model, c.curves, 0.0, t, Eigen::Vector2d::Zero());
            worst = std::max(worst, std::abs(p - df) / df);
            ++count;
        }
    }
    return {worst <= kPillarRel, fmt("%zu pillars, worst relative error %.2e (limit %.0e)", count, worst, kPillarRel)};
}

Outcome rotation_condition() {
    double worst = 0.0;
    bool ordered = true;
    for (const ModelParams& p : {presets::usd_2018(), presets::usd_2019()}) {
        for (int i = 1; i <= 50; ++i) {
            const RotatedGrid g = build_grid(p, 0.1 * i, 50, 8.0);
            worst = std::max(worst, std::abs(g.covariance(1, 0)) / g.covariance.norm());
            ordered = ordered && g.covariance(0, 0) <= g.covariance(1, 1);
        }
    }
    return {worst <= kRotationOffDiag && ordered,
            fmt("max |Sigma10| / |Sigma| = %.2e (limit %.0e), Sigma00 <= Sigma11 at all tau: %s", worst,
                kRotationOffDiag, ordered ? "yes" : "no")};
}

double constant_rollback(const RunConfig& c, int n_y) {
    PricingSettings s = c.pricing;
    s.n_y = n_y;
    RotatedGrid later = build_grid(c.model, 1.0, n_y, s.m);
    later.values.assign(later.size(), 1.0);
    for (double t : {0.75, 0.5, 0.25}) {
        RotatedGrid g = build_grid(c.model, t, n_y, s.m);
        g.values = rollback(c.model, c.curves, g, later, s);
        later = std::move(g);
    }
    return rollback_to_origin(c.model, c.curves, later, s);
}

Outcome rollback_identity() {
    const RunConfig c = table2();
    const double exact = c.curves.discount.discount(1.0);
    const double repro = std::abs(constant_rollback(c, 200) - exact) / exact;
    std::vector<double> err;
    for (int n : {8, 16, 32}) err.push_back(std::abs(constant_rollback(c, n) - exact) / exact);
    bool ratios_ok = true;
    std::ostringstream os;
    os << fmt("N_y=200 relative error %.2e (limit %.0e); errors at N_y 8/16/32: %.2e %.2e %.2e, ratios", repro,
              kRollbackReproRel, err[0], err[1], err[2]);
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
        const double r = err[i] / err[i + 1];
        ratios_ok = ratios_ok && r >= kRollbackRatioLow && r <= kRollbackRatioHigh;
        os << fmt(" %.1f", r);
    }
    os << fmt(" (need %.1f..%.1f)", kRollbackRatioLow, kRollbackRatioHigh);
    return {repro <= kRollbackReproRel && ratios_ok, os.str()};
}

Outcome method_transparency() {
    double worst = 0.0;
    std::ostringstream os;
    for (const RunConfig& c : {table1(), table2()}) {
        PricingSettings s = c.pricing;
        s.n_y = 200;
        s.flags = {true, true};
        const PriceRow fast = timed_price(c.deal, c.model, c.curves, s);
        s.flags = {false, true};
        const PriceRow direct = timed_price(c.deal, c.model, c.curves, s);
        worst = std::max(worst, std::abs(fast.pv - direct.pv) / c.deal.underlying.notional);
        os << fmt("pv %.12f vs %.12f (%.0f / %.0f ms); ", fast.pv, direct.pv, fast.wall_ms, direct.wall_ms);
    }
    os << fmt("max diff %.2e (limit %.0e)", worst, kTransparencyAbs);
    return {worst <= kTransparencyAbs, os.str()};
}

Outcome convergence_slope() {
    const RunConfig c = table2();
    PricingSettings s = c.pricing;
    s.flags = {true, true};
    s.n_y = 6400;
    const double reference = price(c.deal, c.model, c.curves, s);
    std::vector<double> lx, ly;
    std::ostringstream os;
    for (int n : {50, 100, 200, 400, 800}) {
        s.n_y = n;
        const double e = std::abs(price(c.deal, c.model, c.curves, s) - reference);
        lx.push_back(std::log(n));
        ly.push_back(std::log(e));
        os << fmt("%d:%.2e ", n, e);
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    os << fmt("slope %.2f (need %.1f..%.1f)", slope, kSlopeLow, kSlopeHigh);
    return {slope >= kSlopeLow && slope <= kSlopeHigh, os.str()};
}

Outcome rotation_stabilization() {
    const RunConfig c = table1();
    PricingSettings s = c.pricing;
    s.flags = {true, true};
    s.n_y = 1600;
    const double reference = price(c.deal, c.model, c.curves, s);
    bool pass = true;
    std::ostringstream os;
    for (int n : {50, 100}) {
        s.n_y = n;
        s.flags = {true, true};
        const PriceRow rot = timed_price(c.deal, c.model, c.curves, s);
        s.flags = {true, false};
        const PriceRow plain = timed_price(c.deal, c.model, c.curves, s);
        const double er = std::abs(rot.pv - reference), ep = std::abs(plain.pv - reference);
        pass = pass && ep >= er && plain.wall_ms > rot.wall_ms;
        os << fmt("N_y=%d error rotated %.2e unrotated %.2e, time %.0f / %.0f ms; ", n, er, ep, rot.wall_ms,
                  plain.wall_ms);
    }
    return {pass, os.str()};
}

Outcome lsmc_cross_check() {
    const RunConfig c = table2();
    LsmcConfig l = c.lsmc;
    l.sets = 32;
    l.paths_per_set = 10000;
    const LsmcResult r = lsmc_price(c.deal, c.model, c.curves, l);
    PricingSettings s = c.pricing;
    s.n_y = 400;
    const double grid = price(c.deal, c.model, c.curves, s);
    const double z = std::abs(grid - r.estimate) / r.std_error;
    return {z <= kLsmcSigmas,
            fmt("grid %.8f, lsmc %.8f +- %.2e: %.2f standard errors (limit %.0f)", grid, r.estimate, r.std_error, z,
                kLsmcSigmas)};
}

Outcome epe_sanity() {
    const RunConfig c = table1();
    ExposureConfig x = c.exposure;
    x.paths = 10000;
    x.pricing.n_y = 300;
    x.scheduling = Scheduling::leap;
    x.normalize = false;
    // Day 1, then every day of the exercise interval (1.0, 1.25), then two
    // dates after the final payment.
    const double first_day = 1.0 / 365;
    x.observation_dates = {0.0, first_day};
    for (int d = 1; 1.0 + d / 365.0 < 1.25; ++d) x.observation_dates.push_back(1.0 + d / 365.0);
    const double last_payment = c.deal.underlying.schedule.back();
    x.observation_dates.push_back(last_payment + 0.01);
    x.observation_dates.push_back(last_payment + 0.5);

    std::ostringstream os;
    bool pass = true;
    for (bool rotate : {true, false}) {
        x.pricing.flags.use_rotation = rotate;
        const ExposureProfile p = epe_profile(c.deal, c.model, c.curves, x);
        const double origin = std::abs(p.epe[0] - p.option_value);
        const double day1 = std::abs(p.epe[1] - p.option_value);
        const std::size_t n = p.epe.size();
        const bool zero_after = p.epe[n - 2] == 0.0 && p.epe[n - 1] == 0.0;
        const auto spikes = find_spikes(p, kSpikeSigmas);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p.curvature_error[i] > 0.0) worst = std::max(worst, std::abs(p.curvature[i]) / p.curvature_error[i]);
        }
        pass = pass && origin <= kEpeOriginAbs && day1 <= kEpeOriginAbs && zero_after;
        pass = pass && (rotate ? spikes.empty() : !spikes.empty());
        os << fmt("%s: |EPE(0)-V| %.1e, |EPE(1d)-V| %.1e, zero after payment %s, spikes %zu (worst %.1f se",
                  rotate ? "rotated" : "unrotated", origin, day1, zero_after ? "yes" : "no", spikes.size(), worst);
        if (!spikes.empty()) os << fmt(" at s=%.5f", p.dates[spikes.front()]);
        os << "); ";
    }
    os << fmt("need rotated 0 spikes, unrotated >= 1 at %.0f se", kSpikeSigmas);
    return {pass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"fgt_oracle_equivalence", fgt_oracle},
        {"fgt_complexity", fgt_complexity},
        {"moment_formulas", moments},
        {"curve_reproduction", curve_reproduction},
        {"rotation_condition", rotation_condition},
        {"rollback_identity", rollback_identity},
        {"method_transparency", method_transparency},
        {"convergence_slope", convergence_slope},
        {"rotation_stabilization", rotation_stabilization},
        {"lsmc_cross_check", lsmc_cross_check},
        {"epe_sanity", epe_sanity},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        if (argc > 1 && std::none_of(argv + 1, argv + argc, [&](const char* a) {
                return std::string(name).find(a) != std::string::npos;
            })) {
            continue;
        }
        const auto t0 = now_ns();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), elapsed_ms(t0) / 1e3);
        std::fflush(stdout);
    }
    return failures;
}
