#include "spde/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace spde {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Plot x coordinate: N for spatial tables, tau = T/M for temporal ones.
double plot_x(const ConfigFile& config, const StudyOutcome& outcome, double axis_value) {
    return outcome.axis_kind == "temporal_M" ? config.run.T / axis_value : axis_value;
}

}  // namespace

std::string format_csv_rows(const StudyOutcome& outcome) {
    std::ostringstream out;
    for (const ErrorRow& row : outcome.rows) {
        out << outcome.axis_kind << ',' << num(row.axis_value) << ',' << row.K << ',' << num(row.rms_error) << ','
            << num(row.standard_error) << '\n';
    }
    return out.str();
}

void write_csv(std::ostream& out, const ConfigFile& config, const StudyOutcome& outcome, double wall_seconds) {
    out << "# spde study output\n";
    std::string current;
    for (const auto& [key, value] : config.entries) {
        const std::string section = key.substr(0, key.find('.'));
        if (section != current) {
            out << "# [" << section << "]\n";
            current = section;
        }
        out << "#   " << key.substr(key.find('.') + 1) << " = " << value << '\n';
    }
    out << "# seed=" << config.output.seed << '\n';
    out << "# study=" << to_string(config.study.kind) << '\n';
    out << "# wall_time_s=" << short_num(wall_seconds) << '\n';
    if (outcome.fitted_slope) out << "# fitted_slope=" << num(*outcome.fitted_slope) << '\n';
    else out << "# fitted_slope=none\n";
    out << "# expected_slope=" << num(outcome.reference_slope) << '\n';
    for (const std::string& note : outcome.notes) out << "# " << note << '\n';
    out << "axis_kind,axis_value,K,rms_error,std_error\n";
    out << format_csv_rows(outcome);
}

void write_svg(std::ostream& out, const ConfigFile& config, const StudyOutcome& outcome) {
    constexpr double width = 640, height = 480;
    constexpr double left = 80, right = 30, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::vector<std::pair<double, double>> points;
    for (const ErrorRow& row : outcome.rows) {
        const double x = plot_x(config, outcome, row.axis_value);
        if (row.rms_error > 0.0 && x > 0.0 && std::isfinite(row.rms_error)) points.emplace_back(x, row.rms_error);
    }
    const bool logx = outcome.log_log;
    auto tx = [&](double x) { return logx ? std::log10(x) : x; };
    auto ty = [](double y) { return std::log10(y); };

    double x0 = 0, x1 = 1, y0 = -1, y1 = 0;
    if (!points.empty()) {
        x0 = x1 = tx(points.front().first);
        y0 = y1 = ty(points.front().second);
        for (const auto& [x, y] : points) {
            x0 = std::min(x0, tx(x));
            x1 = std::max(x1, tx(x));
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    }
    const double xpad = std::max(0.05 * (x1 - x0), logx ? 0.05 : 1e-3);
    const double ypad = std::max(0.1 * (y1 - y0), 0.1);
    x0 -= xpad;
    x1 += xpad;
    y0 -= ypad;
    y1 += ypad;
    auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * plot_w; };
    auto py = [&](double y) { return top + (y1 - ty(y)) / (y1 - y0) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Decade ticks, plus the data extremes when less than one decade is shown.
    auto ticks = [](double lo, double hi, bool log) {
        std::vector<double> t;
        if (log) {
            for (double e = std::ceil(lo); e <= hi; e += 1.0) t.push_back(std::pow(10.0, e));
            if (t.size() < 2) {
                t.push_back(std::pow(10.0, lo + 0.1 * (hi - lo)));
                t.push_back(std::pow(10.0, hi - 0.1 * (hi - lo)));
            }
        } else {
            for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * (0.1 + 0.2 * i));
        }
        return t;
    };
    for (double v : ticks(x0, x1, logx)) {
        const double x = px(v);
        out << "<line x1=\"" << x << "\" y1=\"" << top + plot_h << "\" x2=\"" << x << "\" y2=\"" << top + plot_h + 6
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << top + plot_h + 20 << "\" text-anchor=\"middle\">" << short_num(v)
            << "</text>\n";
    }
    for (double v : ticks(y0, y1, true)) {
        const double y = py(v);
        out << "<line x1=\"" << left - 6 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << short_num(v)
            << "</text>\n";
    }

    const std::string xlabel = outcome.axis_kind == "spatial_N"    ? "N"
                               : outcome.axis_kind == "temporal_M" ? "tau = T/M"
                                                                   : outcome.axis_kind;
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << top + plot_h / 2 << ")\">RMS strong error</text>\n";

    // Fitted and guide lines span the data range. A spatial slope p means
    // err ~ N^-p; a temporal slope p means err ~ tau^p.
    const double sign = outcome.axis_kind == "spatial_N" ? -1.0 : 1.0;
    if (points.size() >= 2 && logx) {
        const double xa = points.front().first;
        const double xb = points.back().first;
        if (outcome.fitted_slope && outcome.fitted_intercept) {
            const double s = sign * *outcome.fitted_slope;
            auto fit = [&](double x) { return std::exp(*outcome.fitted_intercept + s * std::log(x)); };
            out << "<line x1=\"" << px(xa) << "\" y1=\"" << py(fit(xa)) << "\" x2=\"" << px(xb) << "\" y2=\""
                << py(fit(xb)) << "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
        }
        if (outcome.reference_slope > 0.0) {
            const double s = sign * outcome.reference_slope;
            const double anchor = points.front().second * 0.5;
            auto guide = [&](double x) { return anchor * std::pow(x / xa, s); };
            out << "<line x1=\"" << px(xa) << "\" y1=\"" << py(guide(xa)) << "\" x2=\"" << px(xb) << "\" y2=\""
                << py(guide(xb)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        }
    }
    for (const auto& [x, y] : points) {
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"crimson\"/>\n";
    }

    std::string title = std::string(to_string(config.study.kind)) + " study";
    if (outcome.fitted_slope) title += ", fitted slope " + short_num(*outcome.fitted_slope);
    if (outcome.reference_slope > 0.0) title += " (guide " + short_num(outcome.reference_slope) + ")";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "</svg>\n";
}

}  // namespace spde
