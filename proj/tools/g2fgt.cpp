// Command-line driver: price, converge, fgt-bench, lsmc, epe.
// Every subcommand writes CSV with a header row to stdout or --output.

#include <g2fgt/bermudan.hpp>
#include <g2fgt/config.hpp>
#include <g2fgt/experiments.hpp>
#include <g2fgt/exposure.hpp>
#include <g2fgt/lsmc.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace g2fgt;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool no_fgt = false;
    bool no_rotate = false;
    std::string output;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
    auto* opt = cmd->add_option("config", c.config_path, "JSON run configuration");
    if (config_required) opt->required();
    cmd->add_option("--seed", c.seed, "Random seed (overrides the config)");
    cmd->add_option("--threads", c.threads, "Worker threads (default: all available)");
    cmd->add_flag("--no-fgt", c.no_fgt, "Direct Gaussian sums instead of the FGT");
    cmd->add_flag("--no-rotate", c.no_rotate, "Lay grids out in unrotated coordinates");
    cmd->add_option("-o,--output", c.output, "CSV output path (default: stdout)");
}

RunConfig prepare(const Common& c) {
    RunConfig cfg = load_config(c.config_path);
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.lsmc.seed = *c.seed;
        cfg.exposure.seed = *c.seed;
    }
    if (c.no_fgt) cfg.pricing.flags.use_fgt = cfg.exposure.pricing.flags.use_fgt = false;
    if (c.no_rotate) cfg.pricing.flags.use_rotation = cfg.exposure.pricing.flags.use_rotation = false;
    if (!c.output.empty()) cfg.output = c.output;
    if (c.threads > 0) cfg.threads = c.threads;
    set_thread_count(cfg.threads);
    return cfg;
}

// stdout unless a path is given.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
        out().precision(15);
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_price(const Common& c) {
    const RunConfig cfg = prepare(c);
    const PriceRow row = timed_price(cfg.deal, cfg.model, cfg.curves, cfg.pricing);
    Sink sink(cfg.output);
    sink.out() << "pv,wall_ms,flags\n" << row.pv << ',' << row.wall_ms << ',' << row.flags << '\n';
    return 0;
}

int cmd_converge(const Common& c, const std::vector<int>& n_y_override, std::optional<int> reference_override) {
    RunConfig cfg = prepare(c);
    if (!n_y_override.empty()) cfg.converge.n_y = n_y_override;
    if (reference_override) cfg.converge.reference_n_y = *reference_override;
    if (cfg.converge.n_y.empty()) throw ConfigError("converge: the N_y list is empty");

    PricingSettings ref = cfg.pricing;
    ref.n_y = cfg.converge.reference_n_y;
    ref.flags = {true, true};
    const double reference = price(cfg.deal, cfg.model, cfg.curves, ref);
    std::cerr << "reference N_y=" << ref.n_y << " pv=" << std::setprecision(15) << reference << '\n';

    Sink sink(cfg.output);
    sink.out() << "N_y,pv,abs_error,wall_ms,flags\n";
    for (int n_y : cfg.converge.n_y) {
        PricingSettings s = cfg.pricing;
        s.n_y = n_y;
        const PriceRow row = timed_price(cfg.deal, cfg.model, cfg.curves, s);
        sink.out() << row.n_y << ',' << row.pv << ',' << std::abs(row.pv - reference) << ',' << row.wall_ms << ','
                   << row.flags << std::endl;
    }
    return 0;
}

int cmd_fgt_bench(const Common& c, std::vector<std::size_t> sizes, std::optional<double> bandwidth,
                  std::optional<int> order) {
    FgtBenchSettings bench;
    std::uint64_t seed = 20240101;
    std::string output = c.output;
    if (!c.config_path.empty()) {
        const RunConfig cfg = prepare(c);
        bench = cfg.fgt_bench;
        seed = cfg.seed;
        if (output.empty()) output = cfg.output;
    } else {
        set_thread_count(c.threads);
        if (c.seed) seed = *c.seed;
    }
    if (!sizes.empty()) bench.sizes = sizes;
    if (bandwidth) bench.bandwidth = *bandwidth;
    if (order) bench.order = *order;
    if (bench.sizes.empty()) throw ConfigError("fgt-bench: the N list is empty");

    Sink sink(output);
    sink.out() << "N,direct_ms,fgt_ms,max_abs_err\n";
    for (std::size_t n : bench.sizes) {
        const FgtBenchRow row = fgt_bench_row(n, bench, seed);
        sink.out() << row.n << ',' << row.direct_ms << ',' << row.fgt_ms << ',' << row.max_abs_err << std::endl;
        std::cerr << "N=" << n << " sum|q|=" << row.weight_l1 << '\n';
    }
    return 0;
}

int cmd_lsmc(const Common& c) {
    const RunConfig cfg = prepare(c);
    const auto start = now_ns();
    const LsmcResult r = lsmc_price(cfg.deal, cfg.model, cfg.curves, cfg.lsmc);
    const double ms = elapsed_ms(start);
    Sink sink(cfg.output);
    sink.out() << "estimate,stderr,wall_ms\n" << r.estimate << ',' << r.std_error << ',' << ms << '\n';
    return 0;
}

int cmd_epe(const Common& c) {
    const RunConfig cfg = prepare(c);
    const ExposureProfile p = epe_profile(cfg.deal, cfg.model, cfg.curves, cfg.exposure);
    Sink sink(cfg.output);
    sink.out() << "s,epe,stderr,clamp_count\n";
    std::size_t clamps = 0;
    for (std::size_t i = 0; i < p.dates.size(); ++i) {
        sink.out() << p.dates[i] << ',' << p.epe[i] << ',' << p.std_error[i] << ',' << p.clamp_count[i] << '\n';
        clamps += p.clamp_count[i];
    }
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
    if (clamps > 0) std::cerr << "clamped interpolations: " << clamps << '\n';
    for (std::size_t i : find_spikes(p)) {
        std::cerr << "spike: s=" << p.dates[i] << " curvature=" << p.curvature[i] << " stderr=" << p.curvature_error[i]
                  << '\n';
    }
    std::cerr << std::setprecision(15) << "option_value=" << p.option_value
              << " cva=" << cva_from_epe(p.dates, p.epe, cfg.exposure.hazard_rate, cfg.exposure.lgd) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bermudan swaption pricing under G2++ with a blocked fast Gauss transform"};
    app.require_subcommand(1);

    Common price_opts, converge_opts, bench_opts, lsmc_opts, epe_opts;
    auto* price_cmd = app.add_subcommand("price", "Price the configured Bermudan swaption");
    add_common(price_cmd, price_opts);

    auto* converge_cmd = app.add_subcommand("converge", "Sweep N_y against a fine-grid reference");
    add_common(converge_cmd, converge_opts);
    std::vector<int> n_y_list;
    std::optional<int> reference;
    converge_cmd->add_option("--n-y", n_y_list, "Grid sizes (overrides converge.n_y)");
    converge_cmd->add_option("--reference", reference, "Reference N_y (overrides converge.reference_n_y)");

    auto* bench_cmd = app.add_subcommand("fgt-bench", "Time direct summation against the FGT");
    add_common(bench_cmd, bench_opts, false);
    std::vector<std::size_t> sizes;
    std::optional<double> bandwidth;
    std::optional<int> order;
    bench_cmd->add_option("--n", sizes, "Problem sizes N = N'");
    bench_cmd->add_option("--bandwidth", bandwidth, "Kernel bandwidth delta");
    bench_cmd->add_option("--order", order, "Expansion order p");

    auto* lsmc_cmd = app.add_subcommand("lsmc", "Least-squares Monte Carlo price");
    add_common(lsmc_cmd, lsmc_opts);

    auto* epe_cmd = app.add_subcommand("epe", "Expected positive exposure profile and CVA");
    add_common(epe_cmd, epe_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*price_cmd) return cmd_price(price_opts);
        if (*converge_cmd) return cmd_converge(converge_opts, n_y_list, reference);
        if (*bench_cmd) return cmd_fgt_bench(bench_opts, sizes, bandwidth, order);
        if (*lsmc_cmd) return cmd_lsmc(lsmc_opts);
        if (*epe_cmd) return cmd_epe(epe_opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
