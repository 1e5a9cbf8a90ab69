#include "spde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace spde {

namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& schema() {
    static const std::map<std::string, std::set<std::string>, std::less<>> keys = {
        {"problem", {"dimension", "diffusivity", "reaction", "diffusion", "initial"}},
        {"noise", {"decay", "modes", "J", "quadrature"}},
        {"discretization", {"N", "M", "T"}},
        {"study", {"kind", "axis", "K", "reference_N", "reference_M", "coupled"}},
        {"output", {"csv", "svg", "seed"}},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    const std::string t = trim(s);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return value;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    const std::string t = trim(s);
    Int value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return value;
}

// "0.5", "1/pi^2", "1/2pi^2" or "3/4".
std::optional<double> parse_scalar_expression(std::string_view s) {
    const auto parts = split(s, '/');
    if (parts.size() == 1) return parse_double(parts[0]);
    if (parts.size() != 2) return std::nullopt;
    const auto num = parse_double(parts[0]);
    if (!num) return std::nullopt;
    std::string den = parts[1];
    den.erase(std::remove(den.begin(), den.end(), ' '), den.end());
    double scale = 1.0;
    if (den.size() >= 4 && den.ends_with("pi^2")) {
        den.resize(den.size() - 4);
        if (den.ends_with("*")) den.pop_back();
        scale = M_PI * M_PI;
        if (den.empty()) return *num / scale;
    }
    const auto d = parse_double(den);
    if (!d || *d == 0.0) return std::nullopt;
    return *num / (*d * scale);
}

bool parse_bool(std::string_view s, bool& out) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes") return out = true, true;
    if (t == "false" || t == "0" || t == "no") return out = false, true;
    return false;
}

}  // namespace

std::string_view to_string(StudyKind kind) {
    switch (kind) {
    case StudyKind::single: return "single";
    case StudyKind::spatial: return "spatial";
    case StudyKind::temporal: return "temporal";
    case StudyKind::stability: return "stability";
    }
    return "unknown";
}

ParseResult parse_config(std::string_view text) {
    ParseResult result;
    auto& errors = result.errors;
    std::map<std::string, std::string, std::less<>> values;
    std::vector<std::pair<std::string, std::string>> entries;

    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + "malformed section header '" + line + "'");
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!schema().contains(section)) errors.push_back(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + "expected key = value, got '" + line + "'");
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) {
            errors.push_back(where + "key '" + key + "' appears before any section");
            continue;
        }
        const auto sec = schema().find(section);
        if (sec == schema().end()) continue;  // already reported
        if (!sec->second.contains(key)) {
            errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
            continue;
        }
        const std::string full = section + "." + key;
        if (values.contains(full)) {
            errors.push_back(where + "duplicate key '" + full + "'");
            continue;
        }
        values[full] = value;
        entries.emplace_back(full, value);
    }

    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto it = values.find(key); it != values.end()) return it->second;
        return std::nullopt;
    };
    auto required = [&](const std::string& key) -> std::optional<std::string> {
        auto v = get(key);
        if (!v) errors.push_back("missing required key '" + key + "'");
        return v;
    };

    ConfigFile cfg;
    RunConfig& run = cfg.run;

    if (auto v = required("problem.dimension")) {
        auto d = parse_int<int>(*v);
        if (!d || (*d != 1 && *d != 2)) errors.push_back("problem.dimension must be 1 or 2, got '" + *v + "'");
        else run.op.dimension = *d;
    }
    const int dim = run.op.dimension;
    run.noise.dimension = dim;
    run.noise.truncation = dim == 1 ? 100 : 10;

    if (auto v = required("problem.diffusivity")) {
        auto nu = parse_scalar_expression(*v);
        if (!nu || !(*nu > 0.0) || !std::isfinite(*nu)) {
            errors.push_back("problem.diffusivity must be a positive number, got '" + *v + "'");
        } else {
            run.op.diffusivity = *nu;
        }
    }
    if (auto v = required("problem.reaction")) {
        ReactionSpec spec;
        bool ok = true;
        if (*v != "none") {
            for (const std::string& part : split(*v, ',')) {
                auto a = parse_double(part);
                if (!a) {
                    errors.push_back("problem.reaction: cannot parse coefficient '" + part + "'");
                    ok = false;
                    break;
                }
                spec.coefficients.push_back(*a);
            }
        }
        if (ok) {
            if (auto reason = validate_reaction(spec)) {
                errors.push_back("problem.reaction rejected: " + *reason +
                                 " (the drift must satisfy the one-sided Lipschitz and coercivity conditions)");
            }
            run.reaction = spec;
        }
    }
    if (auto v = required("problem.diffusion")) {
        const std::string d = *v;
        if (d == "identity") run.diffusion = DiffusionSpec::additive();
        else if (d == "sine") run.diffusion = {DiffusionKind::sine, 1.0};
        else if (d == "rational") run.diffusion = {DiffusionKind::rational, 1.0};
        else if (d == "zero") run.diffusion = DiffusionSpec::zero();
        else if (d.starts_with("linear:")) {
            auto c = parse_double(std::string_view(d).substr(7));
            if (!c) errors.push_back("problem.diffusion: cannot parse linear coefficient in '" + d + "'");
            else run.diffusion = {DiffusionKind::linear, *c};
        } else {
            errors.push_back("problem.diffusion must be identity, linear:<c>, sine, rational or zero, got '" + d + "'");
        }
    }
    if (auto v = get("problem.initial")) {
        if (*v == "zero") run.u0 = InitialCondition::zero;
        else if (*v == "sine") run.u0 = InitialCondition::sine;
        else if (*v == "bump") run.u0 = InitialCondition::bump;
        else errors.push_back("problem.initial must be zero, sine or bump, got '" + *v + "'");
    }

    if (auto v = get("noise.decay")) {
        auto s = parse_double(*v);
        if (!s || !(*s > 0.0)) errors.push_back("noise.decay must be a positive number, got '" + *v + "'");
        else run.noise.decay = *s;
    }
    if (auto v = get("noise.J")) {
        auto j = parse_int<int>(*v);
        if (!j || *j < 0) errors.push_back("noise.J must be a non-negative integer, got '" + *v + "'");
        else run.noise.truncation = *j;
    }
    if (auto v = get("noise.modes")) {
        if (*v == "sine") run.noise.kind = ModeKind::sine;
        else if (*v == "sine_plus_basis_phase") run.noise.kind = ModeKind::sine_plus_basis_phase;
        else if (*v == "product_sine_basis") run.noise.kind = ModeKind::product_sine_basis;
        else errors.push_back("noise.modes must be sine, sine_plus_basis_phase or product_sine_basis, got '" + *v + "'");
    }
    if (run.op.dimension == 1 && run.noise.kind == ModeKind::product_sine_basis) {
        errors.push_back("noise.modes product_sine_basis requires dimension 2");
    }
    if (run.op.dimension == 2 && run.noise.kind == ModeKind::sine_plus_basis_phase) {
        errors.push_back("noise.modes sine_plus_basis_phase requires dimension 1");
    }
    if (auto v = get("noise.quadrature")) {
        if (*v == "resolved") run.noise_quadrature = NoiseQuadrature::resolved;
        else if (*v == "collocated") run.noise_quadrature = NoiseQuadrature::collocated;
        else errors.push_back("noise.quadrature must be resolved or collocated, got '" + *v + "'");
    }

    if (auto v = get("discretization.N")) {
        auto n = parse_int<int>(*v);
        if (!n || *n < 3) errors.push_back("discretization.N must be an integer >= 3, got '" + *v + "'");
        else run.N = *n;
    }
    if (auto v = get("discretization.M")) {
        auto m = parse_int<int>(*v);
        if (!m || *m < 1) errors.push_back("discretization.M must be an integer >= 1, got '" + *v + "'");
        else run.M = *m;
    }
    if (auto v = required("discretization.T")) {
        auto t = parse_double(*v);
        if (!t || !(*t > 0.0) || !std::isfinite(*t)) errors.push_back("discretization.T must be positive, got '" + *v + "'");
        else run.T = *t;
    }

    StudySpec& study = cfg.study;
    if (auto v = required("study.kind")) {
        if (*v == "single") study.kind = StudyKind::single;
        else if (*v == "spatial") study.kind = StudyKind::spatial;
        else if (*v == "temporal") study.kind = StudyKind::temporal;
        else if (*v == "stability") study.kind = StudyKind::stability;
        else errors.push_back("study.kind must be single, spatial, temporal or stability, got '" + *v + "'");
    }
    if (auto v = get("study.K")) {
        auto k = parse_int<int>(*v);
        if (!k || *k < 1) errors.push_back("study.K must be an integer >= 1, got '" + *v + "'");
        else study.K = *k;
    }
    if (auto v = get("study.reference_N")) {
        auto n = parse_int<int>(*v);
        if (!n || *n < 3) errors.push_back("study.reference_N must be an integer >= 3, got '" + *v + "'");
        else study.reference_N = *n;
    }
    if (auto v = get("study.reference_M")) {
        auto m = parse_int<int>(*v);
        if (!m || *m < 1) errors.push_back("study.reference_M must be an integer >= 1, got '" + *v + "'");
        else study.reference_M = *m;
    }
    if (auto v = get("study.coupled")) {
        if (!parse_bool(*v, study.coupled)) errors.push_back("study.coupled must be true or false, got '" + *v + "'");
    }
    const bool needs_axis = study.kind != StudyKind::single;
    if (auto v = needs_axis ? required("study.axis") : get("study.axis")) {
        for (const std::string& part : split(*v, ',')) {
            auto a = parse_double(part);
            if (!a) {
                errors.push_back("study.axis: cannot parse value '" + part + "'");
                study.axis.clear();
                break;
            }
            study.axis.push_back(*a);
        }
    }
    auto integral = [](double a) { return a == std::floor(a) && std::abs(a) < 1e9; };
    if (!study.axis.empty()) {
        switch (study.kind) {
        case StudyKind::spatial: {
            for (double a : study.axis) {
                if (!integral(a) || a < 3) errors.push_back("study.axis: spatial N values must be integers >= 3");
            }
            const double largest = *std::max_element(study.axis.begin(), study.axis.end());
            if (study.reference_N <= largest) {
                errors.push_back("study.reference_N = " + std::to_string(study.reference_N) +
                                 " must exceed the largest N in study.axis");
            }
            break;
        }
        case StudyKind::temporal:
            for (double a : study.axis) {
                if (!integral(a) || a < 1) {
                    errors.push_back("study.axis: temporal M values must be positive integers");
                } else if (study.reference_M % static_cast<int>(a) != 0) {
                    errors.push_back("study.axis: M = " + std::to_string(static_cast<int>(a)) +
                                     " does not divide study.reference_M = " + std::to_string(study.reference_M));
                }
            }
            break;
        case StudyKind::stability:
            for (double tau : study.axis) {
                const double steps = run.T / tau;
                if (!(tau > 0.0) || std::abs(steps - std::round(steps)) > 1e-9 * steps) {
                    errors.push_back("study.axis: stability tau values must be positive and divide T");
                }
            }
            break;
        case StudyKind::single: break;
        }
    }

    if (auto v = get("output.csv")) cfg.output.csv = *v;
    if (auto v = get("output.svg")) cfg.output.svg = *v;
    if (auto v = get("output.seed")) {
        auto s = parse_int<std::uint64_t>(*v);
        if (!s) errors.push_back("output.seed must be a non-negative integer, got '" + *v + "'");
        else cfg.output.seed = *s;
    }

    if (errors.empty()) {
        cfg.run.master_seed = cfg.output.seed;
        cfg.entries = std::move(entries);
        result.config = std::move(cfg);
    }
    return result;
}

double expected_rate(const ConfigFile& config) {
    const RunConfig& run = config.run;
    const double gamma = run.noise.predicted_regularity();
    switch (config.study.kind) {
    case StudyKind::spatial: return run.has_noise() ? gamma : 0.0;
    case StudyKind::temporal:
        if (!run.has_noise()) return 1.0;
        if (run.diffusion.kind == DiffusionKind::identity) return std::min(0.5 * gamma, 1.0);
        return 0.5;
    default: return 0.0;
    }
}

StudyOutcome run_study(const ConfigFile& config, int workers) {
    RunConfig run = config.run;
    run.master_seed = config.output.seed;
    const StudySpec& study = config.study;
    StudyOptions options;
    options.K = study.K;
    options.master_seed = config.output.seed;
    options.workers = workers;
    options.coupled = study.coupled;

    StudyOutcome outcome;
    outcome.reference_slope = expected_rate(config);
    auto as_ints = [](const std::vector<double>& xs) {
        std::vector<int> out;
        for (double x : xs) out.push_back(static_cast<int>(x));
        return out;
    };
    auto from_table = [&](const ErrorTable& table) {
        outcome.axis_kind = std::string(to_string(table.axis));
        outcome.rows = table.rows;
        if (table.fit_reliable) {
            outcome.fitted_slope = table.fit.slope;
            outcome.fitted_intercept = table.fit.intercept;
        } else {
            outcome.notes.push_back("fit_unreliable=" + table.fit_note);
        }
        for (const auto& w : table.fit.warnings) outcome.notes.push_back("fit_warning=" + w);
        outcome.notes.push_back("reference_N=" + std::to_string(table.reference_N));
        outcome.notes.push_back("reference_M=" + std::to_string(table.reference_M));
    };

    switch (study.kind) {
    case StudyKind::single: {
        PathOptions opts;
        opts.record_snapshots = true;
        PathResult result;
        if (run.has_noise()) {
            const BrownianLattice lattice = sample_lattice(run.noise, run.M, run.T, run.master_seed, 0);
            result = solve_path(run, lattice, 1, opts);
        } else {
            result = solve_deterministic(run, opts);
        }
        outcome.axis_kind = "time";
        outcome.log_log = false;
        for (const Snapshot& s : result.snapshots) outcome.rows.push_back({s.time, 1, s.l2_norm, 0.0});
        outcome.notes.push_back("value_column=l2_norm_of_state");
        break;
    }
    case StudyKind::spatial:
        from_table(spatial_study(run, as_ints(study.axis), study.reference_N, options));
        break;
    case StudyKind::temporal:
        from_table(temporal_study(run, as_ints(study.axis), study.reference_M, options));
        break;
    case StudyKind::stability: {
        outcome.axis_kind = "tau";
        outcome.notes.push_back("value_column=max_over_steps_of_sample_mean_squared_l2_norm");
        for (const StabilityRow& row : stability_sweep(run, study.axis, options)) {
            outcome.rows.push_back({row.tau, row.K, row.max_mean_sq, 0.0});
            std::ostringstream note;
            note.precision(17);
            note << "stability tau=" << row.tau << " bound=" << row.bound
                 << " bound_holds=" << (row.bound_holds ? "true" : "false");
            outcome.notes.push_back(note.str());
        }
        break;
    }
    }
    return outcome;
}

}  // namespace spde
