#pragma once

#include "spde/experiments.hpp"
#include "spde/stepper.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spde {

enum class StudyKind { single, spatial, temporal, stability };

std::string_view to_string(StudyKind kind);

struct StudySpec {
    StudyKind kind = StudyKind::single;
    std::vector<double> axis;  // N values, M values or taus
    int K = 50;
    int reference_N = 64;
    int reference_M = 9216;
    bool coupled = true;
};

struct OutputSpec {
    std::string csv;
    std::string svg;
    std::uint64_t seed = 0;
};

/// Parsed and validated config file. `entries` keeps every
/// (section.key, value) pair in file order for echoing into outputs.
struct ConfigFile {
    RunConfig run;
    StudySpec study;
    OutputSpec output;
    std::vector<std::pair<std::string, std::string>> entries;
};

struct ParseResult {
    std::optional<ConfigFile> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value(); }
};

/// Flat sectioned key = value text; '#' and ';' start comments. Collects
/// every violation instead of stopping at the first.
ParseResult parse_config(std::string_view text);

/// Output of one CLI run, independent of how it is rendered.
struct StudyOutcome {
    std::string axis_kind;  // spatial_N, temporal_M, tau or time
    std::vector<ErrorRow> rows;
    std::optional<double> fitted_slope;
    std::optional<double> fitted_intercept;
    double reference_slope = 0.0;
    bool log_log = true;
    std::vector<std::string> notes;  // extra metadata lines
};

/// Expected decay rate for the guide line in plots.
double expected_rate(const ConfigFile& config);

StudyOutcome run_study(const ConfigFile& config, int workers);

}  // namespace spde
