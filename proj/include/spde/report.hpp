#pragma once

#include "spde/config.hpp"

#include <ostream>

namespace spde {

/// '#'-prefixed metadata (config echo, seed, wall time, slope, notes)
/// followed by axis_kind,axis_value,K,rms_error,std_error rows.
void write_csv(std::ostream& out, const ConfigFile& config, const StudyOutcome& outcome, double wall_seconds);

/// Data rows only, in the exact form write_csv emits them.
std::string format_csv_rows(const StudyOutcome& outcome);

/// Static log-log plot: data points, fitted line and a guide line with
/// the expected slope.
void write_svg(std::ostream& out, const ConfigFile& config, const StudyOutcome& outcome);

}  // namespace spde
