#include "spde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <memory>
#include <stdexcept>
#include <thread>

namespace spde {

namespace {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results land
// in realization order; the lowest-index failure is rethrown.
template <class Fn>
auto for_each_realization(int count, int workers, Fn fn) -> std::vector<decltype(fn(0))> {
    using Result = decltype(fn(0));
    std::vector<Result> results(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                results[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int pool = std::clamp(workers, 1, std::max(count, 1));
    if (pool == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

void require_study(const StudyOptions& options) {
    if (options.K < 1) throw std::invalid_argument("study: K must be >= 1");
}

std::vector<double> column(const std::vector<std::vector<double>>& table, std::size_t j) {
    std::vector<double> out;
    out.reserve(table.size());
    for (const auto& row : table) out.push_back(row[j]);
    return out;
}

void attach_fit(ErrorTable& table) {
    const double largest = std::accumulate(table.rows.begin(), table.rows.end(), 0.0,
                                           [](double acc, const ErrorRow& r) { return std::max(acc, r.rms_error); });
    try {
        table.fit = fit_rate(table);
        table.fit_reliable = largest > 1e-11;
        if (!table.fit_reliable) table.fit_note = "errors at round-off level; slope is not meaningful";
    } catch (const std::exception& e) {
        table.fit = RateFit{};
        table.fit.slope = std::numeric_limits<double>::quiet_NaN();
        table.fit_reliable = false;
        table.fit_note = e.what();
    }
}

}  // namespace

std::string_view to_string(AxisKind axis) { return axis == AxisKind::spatial_N ? "spatial_N" : "temporal_M"; }

int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

RateFit fit_rate(const ErrorTable& table) {
    RateFit fit;
    std::vector<double> xs, ys;
    for (const ErrorRow& row : table.rows) {
        if (!(row.rms_error > 0.0) || !std::isfinite(row.rms_error)) {
            fit.warnings.push_back("excluded row at axis value " + std::to_string(row.axis_value) +
                                   ": non-positive or non-finite error");
            continue;
        }
        const double axis = table.axis == AxisKind::spatial_N ? row.axis_value : table.horizon / row.axis_value;
        xs.push_back(std::log(axis));
        ys.push_back(std::log(row.rms_error));
    }
    if (xs.size() < 3) {
        throw std::invalid_argument("fit_rate: need at least 3 rows with positive errors, have " +
                                    std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: axis values are all equal");
    const double raw = sxy / sxx;
    fit.intercept = my - raw * mx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fit.residual = std::max(fit.residual, std::abs(ys[i] - (fit.intercept + raw * xs[i])));
    }
    fit.slope = table.axis == AxisKind::spatial_N ? -raw : raw;
    fit.rows_used = static_cast<int>(xs.size());
    return fit;
}

StrongError rms_with_jackknife(const std::vector<double>& errors) {
    StrongError out;
    out.K = static_cast<int>(errors.size());
    if (errors.empty()) return out;
    double sum_sq = 0.0;
    for (double e : errors) sum_sq += e * e;
    const double k = static_cast<double>(errors.size());
    out.rms = std::sqrt(sum_sq / k);
    if (errors.size() < 2) return out;

    std::vector<double> loo(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
        loo[i] = std::sqrt(std::max(0.0, sum_sq - errors[i] * errors[i]) / (k - 1.0));
    }
    const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / k;
    double var = 0.0;
    for (double v : loo) var += (v - mean) * (v - mean);
    out.standard_error = std::sqrt((k - 1.0) / k * var);
    out.standard_error_defined = true;
    return out;
}

StrongError strong_error(const RunConfig& config, const RunConfig& reference, const StudyOptions& options) {
    validate(config);
    validate(reference);
    require_study(options);
    if (reference.M % config.M != 0) {
        throw std::invalid_argument("strong_error: reference M = " + std::to_string(reference.M) +
                                    " is not a multiple of M = " + std::to_string(config.M));
    }
    if (config.T != reference.T || config.op.dimension != reference.op.dimension ||
        config.op.diffusivity != reference.op.diffusivity) {
        throw std::invalid_argument("strong_error: configurations differ beyond N and M");
    }
    auto disc = std::make_shared<const Discretization>(config.op, config.noise, config.N, config.noise_quadrature);
    auto ref_disc = config.N == reference.N
                        ? disc
                        : std::make_shared<const Discretization>(reference.op, reference.noise, reference.N,
                                                                 reference.noise_quadrature);
    const QuadratureRule rule = common_error_rule(config.N, reference.N);
    const FieldSampler sample(*disc, rule);
    const FieldSampler sample_ref(*ref_disc, rule);
    const int dim = config.op.dimension;

    const auto errors = for_each_realization(options.K, options.workers, [&](int i) {
        const auto id = static_cast<std::uint64_t>(i);
        const BrownianLattice lattice = sample_lattice(reference.noise, reference.M, reference.T, options.master_seed, id);
        RunConfig run = config;
        RunConfig ref_run = reference;
        run.realization_id = ref_run.realization_id = id;
        const PathResult a = solve_path(run, disc, lattice, reference.M / config.M);
        const PathResult b = solve_path(ref_run, ref_disc, lattice, 1);
        return l2_norm(sample.values(a.final_state.V) - sample_ref.values(b.final_state.V), rule, dim);
    });
    return rms_with_jackknife(errors);
}

ErrorTable spatial_study(const RunConfig& base, const std::vector<int>& cutoffs, int reference_cutoff,
                         const StudyOptions& options) {
    validate(base);
    require_study(options);
    if (cutoffs.empty()) throw std::invalid_argument("spatial_study: no cutoffs given");
    std::vector<int> sorted = cutoffs;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 3) throw std::invalid_argument("spatial_study: every N must be >= 3");
    if (reference_cutoff <= sorted.back()) {
        throw std::invalid_argument("spatial_study: reference N must exceed every study N");
    }

    const QuadratureRule rule = common_error_rule(sorted.back(), reference_cutoff);
    auto ref_disc = std::make_shared<const Discretization>(base.op, base.noise, reference_cutoff, base.noise_quadrature);
    const FieldSampler ref_sample(*ref_disc, rule);
    std::vector<std::shared_ptr<const Discretization>> discs;
    std::vector<FieldSampler> samplers;
    for (int n : sorted) {
        discs.push_back(std::make_shared<const Discretization>(base.op, base.noise, n, base.noise_quadrature));
        samplers.emplace_back(*discs.back(), rule);
    }
    const int dim = base.op.dimension;

    const auto per_realization = for_each_realization(options.K, options.workers, [&](int i) {
        const auto id = static_cast<std::uint64_t>(i);
        const BrownianLattice lattice = sample_lattice(base.noise, base.M, base.T, options.master_seed, id);
        RunConfig run = base;
        run.realization_id = id;
        run.N = reference_cutoff;
        const Eigen::MatrixXd reference = ref_sample.values(solve_path(run, ref_disc, lattice, 1).final_state.V);
        std::vector<double> errors;
        for (std::size_t r = 0; r < sorted.size(); ++r) {
            run.N = sorted[r];
            const PathResult path = solve_path(run, discs[r], lattice, 1);
            errors.push_back(l2_norm(samplers[r].values(path.final_state.V) - reference, rule, dim));
        }
        return errors;
    });

    ErrorTable table;
    table.axis = AxisKind::spatial_N;
    table.horizon = base.T;
    table.reference_N = reference_cutoff;
    table.reference_M = base.M;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        const StrongError e = rms_with_jackknife(column(per_realization, r));
        table.rows.push_back({static_cast<double>(sorted[r]), options.K, e.rms, e.standard_error});
    }
    attach_fit(table);
    return table;
}

ErrorTable temporal_study(const RunConfig& base, const std::vector<int>& steps, int reference_steps,
                          const StudyOptions& options) {
    validate(base);
    require_study(options);
    if (steps.empty()) throw std::invalid_argument("temporal_study: no step counts given");
    std::vector<int> sorted = steps;
    std::sort(sorted.begin(), sorted.end());
    if (reference_steps < 1) throw std::invalid_argument("temporal_study: reference M must be >= 1");
    for (int m : sorted) {
        if (m < 1 || reference_steps % m != 0) {
            throw std::invalid_argument("temporal_study: M = " + std::to_string(m) + " does not divide reference M = " +
                                        std::to_string(reference_steps));
        }
    }

    auto disc = std::make_shared<const Discretization>(base.op, base.noise, base.N, base.noise_quadrature);
    const QuadratureRule rule = common_error_rule(base.N, base.N);
    const FieldSampler sample(*disc, rule);
    const int dim = base.op.dimension;

    const auto per_realization = for_each_realization(options.K, options.workers, [&](int i) {
        const auto id = static_cast<std::uint64_t>(i);
        const BrownianLattice lattice = sample_lattice(base.noise, reference_steps, base.T, options.master_seed, id);
        RunConfig run = base;
        run.realization_id = id;
        run.M = reference_steps;
        const Eigen::MatrixXd reference = sample.values(solve_path(run, disc, lattice, 1).final_state.V);
        std::vector<double> errors;
        for (std::size_t r = 0; r < sorted.size(); ++r) {
            run.M = sorted[r];
            PathResult path;
            if (options.coupled) {
                path = solve_path(run, disc, lattice, reference_steps / sorted[r]);
            } else {
                const auto control_id = static_cast<std::uint64_t>(options.K) * (r + 1) + id;
                const BrownianLattice independent =
                    sample_lattice(base.noise, sorted[r], base.T, options.master_seed, control_id);
                path = solve_path(run, disc, independent, 1);
            }
            errors.push_back(l2_norm(sample.values(path.final_state.V) - reference, rule, dim));
        }
        return errors;
    });

    ErrorTable table;
    table.axis = AxisKind::temporal_M;
    table.horizon = base.T;
    table.reference_N = base.N;
    table.reference_M = reference_steps;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        const StrongError e = rms_with_jackknife(column(per_realization, r));
        table.rows.push_back({static_cast<double>(sorted[r]), options.K, e.rms, e.standard_error});
    }
    attach_fit(table);
    return table;
}

double stability_bound(const RunConfig& config, double initial_mean_sq) {
    const double k = coercivity_constant(config.reaction);
    const double c = config.has_noise() ? config.diffusion.lipschitz_constant() : 0.0;
    const double noise = c * c * (config.has_noise() ? config.noise.trace() : 0.0);
    const double growth = std::exp((2.0 * k + 2.0 * noise) * config.T);
    const double denom = k + noise;
    const double tail = denom > 0.0 ? growth / denom : std::numeric_limits<double>::infinity();
    return growth * initial_mean_sq + tail;
}

std::vector<StabilityRow> stability_sweep(const RunConfig& base, const std::vector<double>& taus,
                                          const StudyOptions& options) {
    validate(base);
    require_study(options);
    auto disc = std::make_shared<const Discretization>(base.op, base.noise, base.N, base.noise_quadrature);
    std::vector<StabilityRow> rows;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::invalid_argument("stability_sweep: tau must be positive");
        const double steps = base.T / tau;
        const int m = static_cast<int>(std::lround(steps));
        if (m < 1 || std::abs(steps - m) > 1e-9 * steps) {
            throw std::invalid_argument("stability_sweep: T / tau must be an integer, got " + std::to_string(steps));
        }
        RunConfig run = base;
        run.M = m;

        const auto traces = for_each_realization(options.K, options.workers, [&](int i) {
            RunConfig cfg = run;
            cfg.realization_id = static_cast<std::uint64_t>(i);
            std::vector<double> norms;
            norms.reserve(static_cast<std::size_t>(m) + 1);
            const TamedEulerStepper probe(disc, cfg.reaction, cfg.diffusion, cfg.tau());
            PathOptions opts;
            opts.observer = [&](const SolverState& s) {
                const double n = probe.l2_norm(s);
                norms.push_back(n * n);
            };
            if (cfg.has_noise()) {
                const BrownianLattice lattice =
                    sample_lattice(cfg.noise, m, cfg.T, options.master_seed, cfg.realization_id);
                solve_path(cfg, disc, lattice, 1, opts);
            } else {
                const BrownianLattice lattice(Eigen::MatrixXd::Zero(cfg.noise.mode_count(), m + 1), cfg.T,
                                              options.master_seed, cfg.realization_id);
                solve_path(cfg, disc, lattice, 1, opts);
            }
            return norms;
        });

        StabilityRow row;
        row.tau = tau;
        row.M = m;
        row.K = options.K;
        row.mean_sq.assign(static_cast<std::size_t>(m) + 1, 0.0);
        for (const auto& trace : traces) {
            for (std::size_t k = 0; k < trace.size(); ++k) row.mean_sq[k] += trace[k];
        }
        for (double& v : row.mean_sq) v /= options.K;
        row.max_mean_sq = *std::max_element(row.mean_sq.begin(), row.mean_sq.end());
        row.bound = stability_bound(run, row.mean_sq.front());
        row.bound_holds = row.max_mean_sq <= row.bound;
        row.monotone_nonincreasing = true;
        for (std::size_t k = 1; k < row.mean_sq.size(); ++k) {
            if (row.mean_sq[k] > row.mean_sq[k - 1] * (1.0 + 1e-12)) row.monotone_nonincreasing = false;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace spde
