// spde: run stochastic Allen-Cahn simulations and convergence studies
// from a sectioned key = value config file.

#include "spde/config.hpp"
#include "spde/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kConfigRejected = 2,
    kDiverged = 3,
    kIoFailure = 4,
    kRuntimeFailure = 5,
};

std::optional<std::uint64_t> parse_seed(const std::string& text) {
    // stoull would quietly wrap "-3".
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    try {
        std::size_t pos = 0;
        const auto value = std::stoull(text, &pos);
        if (pos == text.size()) return value;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tamed spectral-Galerkin solver for stochastic Allen-Cahn type equations"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the simulation or study described by a config file");
    std::string config_path;
    int workers = spde::default_workers();
    std::string seed_flag;
    std::string csv_flag;
    std::string svg_flag;
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--workers", workers, "Worker threads for Monte Carlo realizations")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed_flag, "Master seed (overrides SPDE_SEED and the config)");
    run->add_option("--csv", csv_flag, "CSV output path (overrides [output] csv; '-' for stdout)");
    run->add_option("--svg", svg_flag, "SVG plot path (overrides [output] svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "spde: cannot read config file '" << config_path << "'\n";
        return kIoFailure;
    }
    std::stringstream text;
    text << in.rdbuf();

    spde::ParseResult parsed = spde::parse_config(text.str());
    if (!parsed.ok()) {
        std::cerr << "spde: config rejected (" << parsed.errors.size() << " problem"
                  << (parsed.errors.size() == 1 ? "" : "s") << "):\n";
        for (const auto& err : parsed.errors) std::cerr << "  - " << err << '\n';
        return kConfigRejected;
    }
    spde::ConfigFile config = std::move(*parsed.config);

    if (const char* env = std::getenv("SPDE_SEED"); env && *env) {
        auto seed = parse_seed(env);
        if (!seed) {
            std::cerr << "spde: SPDE_SEED must be a non-negative integer\n";
            return kConfigRejected;
        }
        config.output.seed = *seed;
    }
    if (!seed_flag.empty()) {
        auto seed = parse_seed(seed_flag);
        if (!seed) {
            std::cerr << "spde: --seed must be a non-negative integer\n";
            return kConfigRejected;
        }
        config.output.seed = *seed;
    }
    config.run.master_seed = config.output.seed;
    if (!csv_flag.empty()) config.output.csv = csv_flag;
    if (!svg_flag.empty()) config.output.svg = svg_flag;

    const auto start = std::chrono::steady_clock::now();
    spde::StudyOutcome outcome;
    try {
        outcome = spde::run_study(config, workers);
    } catch (const spde::DivergenceError& e) {
        std::cerr << "spde: divergence: " << e.what() << '\n';
        return kDiverged;
    } catch (const std::exception& e) {
        std::cerr << "spde: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (config.output.csv.empty() || config.output.csv == "-") {
        spde::write_csv(std::cout, config, outcome, wall);
    } else {
        std::ofstream csv(config.output.csv);
        if (csv) spde::write_csv(csv, config, outcome, wall);
        if (!csv) {
            std::cerr << "spde: failed to write CSV to '" << config.output.csv << "'\n";
            return kIoFailure;
        }
    }
    if (!config.output.svg.empty()) {
        std::ofstream svg(config.output.svg);
        if (svg) spde::write_svg(svg, config, outcome);
        if (!svg) {
            std::cerr << "spde: failed to write SVG to '" << config.output.svg << "'\n";
            return kIoFailure;
        }
    }
    if (outcome.fitted_slope) std::cerr << "fitted slope: " << *outcome.fitted_slope << '\n';
    return kOk;
}
