#pragma once

#include "spde/stepper.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spde {

enum class AxisKind { spatial_N, temporal_M };

std::string_view to_string(AxisKind axis);

struct ErrorRow {
    double axis_value = 0.0;  // N or M
    int K = 0;
    double rms_error = 0.0;
    double standard_error = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max |log err - fit|
    int rows_used = 0;
    std::vector<std::string> warnings;
};

/// Strong-error table. The slope is a positive decay rate in N for
/// spatial tables and the exponent of tau = T/M for temporal tables.
struct ErrorTable {
    AxisKind axis = AxisKind::spatial_N;
    std::vector<ErrorRow> rows;
    double horizon = 1.0;
    int reference_N = 0;
    int reference_M = 0;
    bool fit_reliable = false;
    RateFit fit;
    std::string fit_note;
};

/// Least squares on (log axis, log error); axis is N (spatial, slope
/// negated) or T/M (temporal). Throws if fewer than 3 usable rows.
RateFit fit_rate(const ErrorTable& table);

struct StudyOptions {
    int K = 50;
    std::uint64_t master_seed = 0;
    int workers = 1;
    /// Temporal studies only: drive the coarse runs by the reference path.
    bool coupled = true;
};

int default_workers();

struct StrongError {
    double rms = 0.0;
    double standard_error = 0.0;
    bool standard_error_defined = false;
    int K = 0;
};

/// RMS over realizations of the final-time L2 distance, with a jackknife
/// standard error. K = 1 reports standard_error = 0, undefined.
StrongError rms_with_jackknife(const std::vector<double>& errors);

/// `config` and `reference` may differ only in N and M; reference.M must be
/// a multiple of config.M. Both runs share the lattice sampled at
/// reference.M for every realization.
StrongError strong_error(const RunConfig& config, const RunConfig& reference, const StudyOptions& options);

ErrorTable spatial_study(const RunConfig& base, const std::vector<int>& cutoffs, int reference_cutoff,
                         const StudyOptions& options);

ErrorTable temporal_study(const RunConfig& base, const std::vector<int>& steps, int reference_steps,
                          const StudyOptions& options);

struct StabilityRow {
    double tau = 0.0;
    int M = 0;
    int K = 0;
    double max_mean_sq = 0.0;  // max_k of the sample mean of ||u^k||^2
    double bound = 0.0;
    bool bound_holds = false;
    bool monotone_nonincreasing = false;
    std::vector<double> mean_sq;  // per step, k = 0..M
};

/// exp((2K + 2c^2 TrQ) T) (E||u0||^2 + 1 / (K + c^2 TrQ)).
double stability_bound(const RunConfig& config, double initial_mean_sq);

std::vector<StabilityRow> stability_sweep(const RunConfig& base, const std::vector<double>& taus,
                                          const StudyOptions& options);

}  // namespace spde
