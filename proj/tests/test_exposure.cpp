#include <g2fgt/exposure.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace g2fgt;

namespace {

CurveSet flat_curves() {
    const auto d = DiscountCurve::flat(0.02, 10.0);
    return {d, d};
}

BermudanSpec deal() {
    BermudanSpec b;
    for (double t = 0.5; t <= 2.5 + 1e-9; t += 0.25) b.underlying.schedule.push_back(t);
    b.underlying.fixed_rate = 0.021;
    for (double t = 0.5; t <= 2.25 + 1e-9; t += 0.25) b.exercise_dates.push_back(t);
    return b;
}

ExposureConfig config(std::vector<double> dates, std::size_t paths = 2000) {
    ExposureConfig c;
    c.observation_dates = std::move(dates);
    c.paths = paths;
    c.pricing.n_y = 60;
    c.seed = 5;
    return c;
}

}  // namespace

TEST(Dates, Uniform) {
    const auto d = uniform_dates(1.0, 0.25);
    ASSERT_EQ(d.size(), 5u);
    EXPECT_DOUBLE_EQ(d[4], 1.0);
    const auto e = uniform_dates(1.1, 0.25);
    ASSERT_EQ(e.size(), 6u);
    EXPECT_DOUBLE_EQ(e.back(), 1.1);
    EXPECT_THROW(uniform_dates(1.0, 0.0), std::invalid_argument);
}

TEST(Cva, ConstantProfile) {
    const auto d = uniform_dates(5.0, 0.01);
    const std::vector<double> epe(d.size(), 0.02);
    const double exact = 0.6 * 0.02 * (1.0 - std::exp(-0.05 * 5.0));
    EXPECT_NEAR(cva_from_epe(d, epe, 0.05, 0.6), exact, 1e-9);
    EXPECT_EQ(cva_from_epe(d, epe, 0.0, 0.6), 0.0);
    EXPECT_THROW(cva_from_epe(d, {}, 0.05, 0.6), std::invalid_argument);
}

TEST(Spikes, FlagsLargeCurvatureOnly) {
    ExposureProfile p;
    p.dates = {0, 1, 2, 3, 4};
    p.curvature = {0.0, 1e-6, 5e-4, -2e-6, 0.0};
    p.curvature_error = {0.0, 1e-6, 1e-5, 1e-6, 0.0};
    const auto s = find_spikes(p);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0], 2u);
}

TEST(Config, Validation) {
    ExposureConfig c = config({0.0, 0.5});
    EXPECT_NO_THROW(c.validate());
    c.observation_dates = {0.1, 0.5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.observation_dates = {0.0, 0.5, 0.5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = config({0.0});
    c.lgd = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Epe, OriginAndExpiry) {
    const auto p = presets::usd_2019();
    const auto prof = epe_profile(deal(), p, flat_curves(), config({0.0, 1.1, 2.6}, 500));
    EXPECT_EQ(prof.epe[0], prof.option_value);  // exact: no paths involved at s = 0
    EXPECT_EQ(prof.std_error[0], 0.0);
    EXPECT_GT(prof.epe[1], 0.0);
    EXPECT_EQ(prof.epe[2], 0.0);
}

TEST(Epe, DiscountedOptionIsMartingaleBeforeFirstExercise) {
    const auto p = presets::usd_2019();
    const auto prof = epe_profile(deal(), p, flat_curves(), config({0.0, 0.2, 0.45}, 4000));
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_NEAR(prof.epe[i], prof.option_value, 4.0 * prof.std_error[i] + 1e-6) << i;
        EXPECT_EQ(prof.clamp_count[i], 0u);
    }
}

TEST(Epe, ReproducibleAndSerialMatchesParallel) {
    const auto p = presets::usd_2018();
    ExposureConfig c = config({0.0, 0.6, 0.75, 1.3}, 300);
    const auto a = epe_profile(deal(), p, flat_curves(), c);
    c.pricing.execution = Execution::serial;
    const auto b = epe_profile(deal(), p, flat_curves(), c);
    for (std::size_t i = 0; i < a.epe.size(); ++i) EXPECT_NEAR(a.epe[i], b.epe[i], 1e-13) << i;
    c.seed = 6;
    const auto d = epe_profile(deal(), p, flat_curves(), c);
    EXPECT_NE(a.epe[3], d.epe[3]);
}

TEST(Epe, CurvatureReported) {
    const auto p = presets::usd_2019();
    const auto prof = epe_profile(deal(), p, flat_curves(), config({0.0, 0.55, 0.6, 0.65, 0.7}, 1000));
    EXPECT_EQ(prof.curvature[0], 0.0);
    EXPECT_EQ(prof.curvature[4], 0.0);
    for (std::size_t i = 2; i < 4; ++i) EXPECT_GT(prof.curvature_error[i], 0.0);
}

TEST(Epe, NoCurvatureAcrossPaymentDates) {
    const auto p = presets::usd_2019();
    const auto prof = epe_profile(deal(), p, flat_curves(), config({0.0, 0.55, 0.6, 0.65, 0.7, 0.8}, 500));
    EXPECT_EQ(prof.curvature_error[1], 0.0);  // 0.5 lies between 0 and 0.6
    EXPECT_GT(prof.curvature_error[2], 0.0);
    EXPECT_GT(prof.curvature_error[3], 0.0);
    EXPECT_EQ(prof.curvature_error[4], 0.0);  // 0.75 lies between 0.65 and 0.8
}

TEST(LivingGrids, LeapAndStepAgree) {
    const auto p = presets::usd_2019();
    const std::vector<double> dates = {0.0, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2};
    ExposureConfig c = config(dates);
    c.pricing.n_y = 80;
    const auto leap = living_value_grids(deal(), p, flat_curves(), c);
    c.scheduling = Scheduling::step;
    const auto step = living_value_grids(deal(), p, flat_curves(), c);
    ASSERT_EQ(leap.grids.size(), dates.size());
    EXPECT_TRUE(leap.grids[0].values.empty());
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const auto& a = leap.grids[i];
        const auto& b = step.grids[i];
        ASSERT_EQ(a.values.size(), a.size()) << i;
        for (std::size_t i0 = 20; i0 <= 60; i0 += 10)
            for (std::size_t i1 = 20; i1 <= 60; i1 += 10) {
                const std::size_t n = a.index(i0, i1);
                EXPECT_NEAR(a.values[n], b.values[n], 1e-7) << i;
            }
    }
}

TEST(LivingGrids, ExerciseDateHoldsContinuation) {
    const auto p = presets::usd_2019();
    const auto r = living_value_grids(deal(), p, flat_curves(), config({0.0, 0.75}));
    const auto& g = r.grids[1];
    EXPECT_EQ(g.values, r.induction.continuation[1]);
}
