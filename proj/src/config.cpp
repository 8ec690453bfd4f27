#include <g2fgt/config.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace g2fgt {

namespace {

using nlohmann::json;

const json& section(const json& root, const char* name) {
    if (!root.contains(name)) throw ConfigError(std::string("missing required section '") + name + "'");
    const json& s = root.at(name);
    if (!s.is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
    return s;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

std::vector<std::pair<double, double>> pillars(const json& arr, const char* what) {
    if (!arr.is_array()) throw ConfigError(std::string("curves.") + what + " must be a list of [t, df] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw ConfigError(std::string("curves.") + what + ": bad pillar");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

std::vector<double> dates(const json& v, const char* what) {
    if (v.is_array()) return v.get<std::vector<double>>();
    if (v.is_object()) return date_range(v.at("start").get<double>(), v.at("end").get<double>(), v.at("step").get<double>());
    throw ConfigError(std::string("deal.") + what + " must be a list or {start, end, step}");
}

ModelParams parse_model(const json& m) {
    if (m.contains("preset")) {
        const std::string name = m.at("preset").get<std::string>();
        if (name == "usd_2018") return presets::usd_2018();
        if (name == "usd_2019") return presets::usd_2019();
        throw ConfigError("model: unknown preset '" + name + "'");
    }
    ModelParams p{m.at("kappa0").get<double>(), m.at("kappa1").get<double>(), m.at("sigma0").get<double>(),
                  m.at("sigma1").get<double>(), m.at("rho").get<double>()};
    p.validate();
    return p;
}

BermudanSpec parse_deal(const json& d) {
    BermudanSpec spec;
    spec.underlying.schedule = dates(d.at("schedule"), "schedule");
    spec.underlying.fixed_rate = d.at("fixed_rate").get<double>();
    spec.underlying.notional = get_or(d, "notional", 1.0);
    const std::string dir = get_or<std::string>(d, "direction", "receive_fixed");
    if (dir == "receive_fixed") {
        spec.underlying.direction = Direction::receive_fixed;
    } else if (dir == "pay_fixed") {
        spec.underlying.direction = Direction::pay_fixed;
    } else {
        throw ConfigError("deal: direction must be receive_fixed or pay_fixed");
    }
    spec.exercise_dates = dates(d.at("exercise_dates"), "exercise_dates");
    spec.validate();
    return spec;
}

void parse_numerics(const json& n, PricingSettings& p) {
    p.n_y = get_or(n, "n_y", p.n_y);
    p.m = get_or(n, "m", p.m);
    p.flags.use_fgt = get_or(n, "use_fgt", p.flags.use_fgt);
    p.flags.use_rotation = get_or(n, "use_rotation", p.flags.use_rotation);
    p.fgt.order = get_or(n, "order", p.fgt.order);
    p.fgt.block_width_multiplier = get_or(n, "block_width_multiplier", p.fgt.block_width_multiplier);
    p.fgt.cutoff = get_or(n, "cutoff", p.fgt.cutoff);
    p.fgt.fallback_threshold = get_or(n, "fallback_threshold", p.fgt.fallback_threshold);
    p.validate();
}

// Runs a parser step, turning library and JSON errors into ConfigError with the section name.
template <typename F>
void in_section(const char* name, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("section '") + name + "': " + e.what());
    }
}

}  // namespace

std::vector<double> date_range(double start, double end, double step) {
    if (!(step > 0.0) || !(end >= start)) throw std::invalid_argument("date range: need step > 0 and end >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((end - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig c;
    const json& model = section(root, "model");
    const json& curves = section(root, "curves");
    const json& deal = section(root, "deal");
    in_section("model", [&] { c.model = parse_model(model); });
    in_section("curves", [&] {
        if (!curves.contains("discount")) throw ConfigError("curves: missing 'discount'");
        c.curves.discount = DiscountCurve(pillars(curves.at("discount"), "discount"));
        c.curves.forecast = curves.contains("forecast") ? DiscountCurve(pillars(curves.at("forecast"), "forecast"))
                                                        : c.curves.discount;
    });
    in_section("deal", [&] {
        c.deal = parse_deal(deal);
        c.curves.check_horizon(c.deal.underlying.schedule.back(), "deal");
    });

    c.seed = get_or<std::uint64_t>(root, "seed", c.seed);
    c.threads = get_or(root, "threads", c.threads);
    c.output = get_or<std::string>(root, "output", "");

    if (root.contains("numerics")) in_section("numerics", [&] { parse_numerics(root.at("numerics"), c.pricing); });
    if (root.contains("converge")) {
        in_section("converge", [&] {
            const json& s = root.at("converge");
            c.converge.n_y = get_or(s, "n_y", c.converge.n_y);
            c.converge.reference_n_y = get_or(s, "reference_n_y", c.converge.reference_n_y);
        });
    }
    if (root.contains("fgt_bench")) {
        in_section("fgt_bench", [&] {
            const json& s = root.at("fgt_bench");
            c.fgt_bench.sizes = get_or(s, "n", c.fgt_bench.sizes);
            c.fgt_bench.bandwidth = get_or(s, "bandwidth", c.fgt_bench.bandwidth);
            c.fgt_bench.order = get_or(s, "order", c.fgt_bench.order);
            c.fgt_bench.domain = get_or(s, "domain", c.fgt_bench.domain);
        });
    }
    c.lsmc.seed = c.seed;
    if (root.contains("lsmc")) {
        in_section("lsmc", [&] {
            const json& s = root.at("lsmc");
            c.lsmc.paths_per_set = get_or(s, "paths_per_set", c.lsmc.paths_per_set);
            c.lsmc.sets = get_or(s, "sets", c.lsmc.sets);
            c.lsmc.in_the_money_only = get_or(s, "in_the_money_only", c.lsmc.in_the_money_only);
            c.lsmc.validate();
        });
    }

    ExposureConfig& x = c.exposure;
    x.pricing = c.pricing;
    x.pricing.n_y = 300;
    x.seed = c.seed;
    double spacing = 7.0 / 365.0;
    double end = c.deal.underlying.schedule.back() + spacing;
    in_section("exposure", [&] {
        const json s = root.contains("exposure") ? root.at("exposure") : json::object();
        x.paths = get_or(s, "paths", x.paths);
        x.pricing.n_y = get_or(s, "n_y", x.pricing.n_y);
        x.hazard_rate = get_or(s, "hazard_rate", 0.01);
        x.lgd = get_or(s, "lgd", x.lgd);
        const std::string mode = get_or<std::string>(s, "mode", "leap");
        if (mode != "leap" && mode != "step") throw ConfigError("exposure: mode must be leap or step");
        x.scheduling = mode == "leap" ? Scheduling::leap : Scheduling::step;
        x.normalize = get_or(s, "normalize", x.normalize);
        spacing = get_or(s, "spacing", spacing);
        end = get_or(s, "end", end);
        x.observation_dates = s.contains("dates") ? s.at("dates").get<std::vector<double>>() : uniform_dates(end, spacing);
        x.validate();
    });
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace g2fgt
