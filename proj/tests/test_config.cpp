#include <g2fgt/config.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <string>

using namespace g2fgt;

namespace {

const std::string kMinimal = R"({
  "model": {"preset": "usd_2019"},
  "curves": {"discount": [[1.0, 0.98], [6.0, 0.9]]},
  "deal": {"schedule": {"start": 0.5, "end": 3.0, "step": 0.5}, "fixed_rate": 0.02,
           "exercise_dates": [0.5, 1.0, 1.5]}
})";

std::string without(const std::string& key) {
    auto j = nlohmann::json::parse(kMinimal);
    j.erase(key);
    return j.dump();
}

}  // namespace

TEST(DateRange, InclusiveEnd) {
    const auto d = date_range(0.25, 1.0, 0.25);
    ASSERT_EQ(d.size(), 4u);
    EXPECT_DOUBLE_EQ(d.back(), 1.0);
    EXPECT_THROW(date_range(1.0, 0.0, 0.25), std::invalid_argument);
}

TEST(Config, MinimalDefaults) {
    const RunConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.model.kappa0, presets::usd_2019().kappa0);
    EXPECT_EQ(c.deal.underlying.schedule.size(), 6u);
    EXPECT_EQ(c.deal.exercise_dates.size(), 3u);
    EXPECT_EQ(c.deal.underlying.direction, Direction::receive_fixed);
    EXPECT_NEAR(c.curves.forecast.discount(2.0), c.curves.discount.discount(2.0), 1e-15);
    EXPECT_EQ(c.pricing.n_y, 200);
    EXPECT_EQ(c.exposure.pricing.n_y, 300);
    EXPECT_DOUBLE_EQ(c.exposure.hazard_rate, 0.01);
    EXPECT_EQ(c.exposure.observation_dates.front(), 0.0);
    EXPECT_GT(c.exposure.observation_dates.back(), 3.0);
    EXPECT_EQ(c.converge.reference_n_y, 6400);
}

TEST(Config, Overrides) {
    std::string s = kMinimal;
    s.insert(s.rfind('}'), R"(, "numerics": {"n_y": 64, "use_fgt": false, "order": 16},
      "lsmc": {"paths_per_set": 2000, "sets": 4}, "exposure": {"mode": "step", "dates": [0, 0.25], "n_y": 50, "normalize": true},
      "seed": 9, "model_unused": 1)");
    const RunConfig c = parse_config(s);
    EXPECT_EQ(c.pricing.n_y, 64);
    EXPECT_FALSE(c.pricing.flags.use_fgt);
    EXPECT_EQ(c.pricing.fgt.order, 16);
    EXPECT_EQ(c.lsmc.sets, 4u);
    EXPECT_EQ(c.lsmc.seed, 9u);
    EXPECT_EQ(c.exposure.scheduling, Scheduling::step);
    EXPECT_TRUE(c.exposure.normalize);
    EXPECT_EQ(c.exposure.observation_dates.size(), 2u);
    EXPECT_EQ(c.exposure.pricing.n_y, 50);
    EXPECT_FALSE(c.exposure.pricing.flags.use_fgt);
}

TEST(Config, ExplicitModel) {
    std::string s = kMinimal;
    s.replace(s.find(R"({"preset": "usd_2019"})"), 22,
              R"({"kappa0": 0.5, "kappa1": 0.1, "sigma0": 0.01, "sigma1": 0.008, "rho": -0.5})");
    EXPECT_DOUBLE_EQ(parse_config(s).model.rho, -0.5);
}

TEST(Config, MissingSectionsNamed) {
    for (const char* key : {"model", "curves", "deal"}) {
        try {
            parse_config(without(key));
            FAIL() << key;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    }
}

TEST(Config, BadValuesRaiseConfigError) {
    EXPECT_THROW(parse_config("not json"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
    std::string s = kMinimal;
    s.replace(s.find("usd_2019"), 8, "usd_1999");
    EXPECT_THROW(parse_config(s), ConfigError);
    s = kMinimal;
    s.replace(s.find("[0.5, 1.0, 1.5]"), 15, "[0.5, 0.4]");
    EXPECT_THROW(parse_config(s), ConfigError);
    s = kMinimal;
    s.replace(s.find("[6.0, 0.9]"), 10, "[2.0, 0.9]");
    EXPECT_THROW(parse_config(s), ConfigError);
    s = kMinimal;
    s.insert(s.rfind('}'), R"(, "exposure": {"mode": "hop"})");
    EXPECT_THROW(parse_config(s), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/run.json"), ConfigError);
}
