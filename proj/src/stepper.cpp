#include "spde/stepper.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace spde {

std::string_view to_string(InitialCondition u0) {
    switch (u0) {
    case InitialCondition::zero: return "zero";
    case InitialCondition::sine: return "sine";
    case InitialCondition::bump: return "bump";
    }
    return "unknown";
}

std::string_view to_string(NoiseQuadrature q) {
    return q == NoiseQuadrature::resolved ? "resolved" : "collocated";
}

InitialFunction initial_function(InitialCondition u0, int dimension) {
    switch (u0) {
    case InitialCondition::zero: return [](double, double) { return 0.0; };
    case InitialCondition::sine:
        if (dimension == 1) return [](double x, double) { return std::sin(M_PI * x); };
        return [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
    case InitialCondition::bump:
        if (dimension == 1) return [](double x, double) { return x * (1.0 - x); };
        return [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };
    }
    throw std::invalid_argument("initial_function: unknown initial condition");
}

void validate(const RunConfig& config) {
    validate(config.op);
    validate(config.noise);
    if (config.noise.dimension != config.op.dimension) {
        throw std::invalid_argument("RunConfig: noise dimension differs from operator dimension");
    }
    if (auto reason = validate_reaction(config.reaction)) throw std::invalid_argument("RunConfig: " + *reason);
    if (config.N < 3) throw std::invalid_argument("RunConfig: N must be >= 3");
    if (config.M < 1) throw std::invalid_argument("RunConfig: M must be >= 1");
    if (!(config.T > 0.0) || !std::isfinite(config.T)) throw std::invalid_argument("RunConfig: T must be positive");
}

DivergenceError::DivergenceError(int step, std::uint64_t realization_id)
    : std::runtime_error("non-finite state at step " + std::to_string(step) + " in realization " +
                         std::to_string(realization_id)),
      step_(step),
      realization_(realization_id) {}

int drift_quadrature_order(int cutoff) { return cutoff + 8; }

int noise_quadrature_order(int cutoff, const QWienerSpec& noise, NoiseQuadrature mode) {
    const int drift = drift_quadrature_order(cutoff);
    if (mode == NoiseQuadrature::collocated) return drift;
    // sin(J pi x) is a Legendre series of effective degree ~ J pi / 2 plus
    // a boundary layer; 2J + 16 clears it with margin for J up to a few hundred.
    return std::max(drift, 2 * noise.truncation + 16);
}

Discretization::Discretization(const OperatorSpec& op, const QWienerSpec& noise, int cutoff,
                               NoiseQuadrature quadrature)
    : op_(op),
      noise_(noise),
      cutoff_(cutoff),
      drift_(cutoff, gauss_lobatto_rule(drift_quadrature_order(cutoff))),
      noise_basis_(cutoff, gauss_lobatto_rule(noise_quadrature_order(cutoff, noise, quadrature))) {
    validate(op_);
    validate(noise_);
    if (noise_.dimension != op_.dimension) {
        throw std::invalid_argument("Discretization: noise dimension differs from operator dimension");
    }
    mass_ = assemble_mass(cutoff);
    stiffness_ = assemble_stiffness(cutoff, op_);
    eigen_ = generalized_eigendecomposition(mass_, stiffness_);
    modes_ = mode_values(noise_, noise_basis_.rule());
    sqrt_q_ = noise_.eigenvalues().cwiseSqrt();

    drift_synth_ = drift_.values_at_nodes() * eigen_.H;
    drift_proj_ = eigen_.H.transpose() * drift_.load_matrix();
    noise_synth_ = noise_basis_.values_at_nodes() * eigen_.H;
    noise_proj_ = eigen_.H.transpose() * noise_basis_.load_matrix();
}

Eigen::MatrixXd Discretization::to_eigen(const Eigen::MatrixXd& coeffs) const {
    // H^{-1} = H^T A since H^T A H = I.
    const Eigen::MatrixXd inv = eigen_.H.transpose() * stiffness_;
    if (dimension() == 1) return inv * coeffs;
    return inv * coeffs * inv.transpose();
}

Eigen::MatrixXd Discretization::to_coefficients(const Eigen::MatrixXd& V) const {
    if (dimension() == 1) return eigen_.H * V;
    return eigen_.H * V * eigen_.H.transpose();
}

Eigen::MatrixXd Discretization::apply(const Eigen::MatrixXd& op, const Eigen::MatrixXd& x) const {
    if (dimension() == 1) return op * x;
    return op * x * op.transpose();
}

TamedEulerStepper::TamedEulerStepper(std::shared_ptr<const Discretization> disc, ReactionSpec reaction,
                                     DiffusionSpec diffusion, double tau)
    : disc_(std::move(disc)), reaction_(std::move(reaction)), diffusion_(diffusion), tau_(tau) {
    if (!disc_) throw std::invalid_argument("TamedEulerStepper: null discretization");
    if (!(tau_ > 0.0)) throw std::invalid_argument("TamedEulerStepper: tau must be positive");
    if (auto reason = validate_reaction(reaction_)) throw std::invalid_argument(*reason);

    const Eigen::VectorXd& lam = disc_->eigen().lambda;
    if (disc_->dimension() == 1) {
        mass_weight_ = lam;
        denominator_ = (lam.array() + tau_).matrix();
    } else {
        mass_weight_ = lam * lam.transpose();
        const Eigen::Index n = lam.size();
        denominator_.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                denominator_(i, j) = mass_weight_(i, j) + tau_ * (lam[i] + lam[j]);
            }
        }
    }
}

SolverState TamedEulerStepper::initial_state(const InitialFunction& u0) const {
    const Eigen::MatrixXd coeffs = project_initial(u0, disc_->drift_basis(), disc_->mass(), disc_->dimension());
    return state_from_eigen(disc_->to_eigen(coeffs), 0);
}

SolverState TamedEulerStepper::state_from_eigen(Eigen::MatrixXd V, int step) const {
    SolverState state;
    state.step = step;
    state.nodal = disc_->apply(disc_->drift_synthesis(), V);
    state.V = std::move(V);
    return state;
}

TamedEulerStepper::Loads TamedEulerStepper::loads(const SolverState& state, const Eigen::MatrixXd& noise_field) const {
    const Discretization& d = *disc_;
    const int dim = d.dimension();
    Loads out;

    const Eigen::MatrixXd fu = f_eval(reaction_, state.nodal);
    const double f_norm = spde::l2_norm(fu, d.drift_basis().rule(), dim);
    out.f_norm_sq = f_norm * f_norm;
    out.drift = d.apply(d.drift_projection(), fu);

    if (noise_field.size() == 0 || diffusion_.is_zero()) {
        out.noise = Eigen::MatrixXd::Zero(state.V.rows(), state.V.cols());
        return out;
    }
    Eigen::MatrixXd forcing;
    if (diffusion_.kind == DiffusionKind::identity) {
        forcing = noise_field;
    } else {
        const Eigen::MatrixXd u_noise = d.shares_rule() ? state.nodal : d.apply(d.noise_synthesis(), state.V);
        forcing = g_eval(diffusion_, u_noise).cwiseProduct(noise_field);
    }
    out.noise = d.apply(d.noise_projection(), forcing);
    return out;
}

SolverState TamedEulerStepper::step(const SolverState& state, const Eigen::MatrixXd& noise_field,
                                    std::uint64_t realization_id) const {
    const Loads l = loads(state, noise_field);
    const double theta = taming_factor(tau_, l.f_norm_sq);
    assert(tau_ * std::sqrt(l.f_norm_sq) * theta <= 0.5 * std::sqrt(tau_) * (1.0 + 1e-12));

    Eigen::MatrixXd next = (mass_weight_.array() * state.V.array() + (tau_ * theta) * l.drift.array() +
                            l.noise.array()) /
                           denominator_.array();
    if (!next.allFinite() || !std::isfinite(l.f_norm_sq)) throw DivergenceError(state.step + 1, realization_id);
    SolverState out = state_from_eigen(std::move(next), state.step + 1);
    if (!out.nodal.allFinite()) throw DivergenceError(state.step + 1, realization_id);
    return out;
}

double TamedEulerStepper::l2_norm(const SolverState& state) const {
    return spde::l2_norm(state.nodal, disc_->drift_basis().rule(), disc_->dimension());
}

namespace {

void check_matches(const RunConfig& config, const Discretization& disc) {
    if (disc.cutoff() != config.N || disc.dimension() != config.op.dimension ||
        disc.op().diffusivity != config.op.diffusivity || disc.noise().truncation != config.noise.truncation ||
        disc.noise().kind != config.noise.kind || disc.noise().decay != config.noise.decay) {
        throw std::invalid_argument("solve_path: discretization does not match run configuration");
    }
}

PathResult run(const RunConfig& config, std::shared_ptr<const Discretization> disc, const BrownianLattice* lattice,
               int factor, const PathOptions& options) {
    const TamedEulerStepper stepper(disc, config.reaction, config.diffusion, config.tau());
    SolverState state = stepper.initial_state(initial_function(config.u0, config.op.dimension));
    if (!state.V.allFinite()) throw DivergenceError(0, config.realization_id);

    const int snapshot_every = std::max(1, (config.M + 99) / 100);
    PathResult result;
    auto record = [&]() {
        if (options.observer) options.observer(state);
        if (options.record_snapshots && (state.step % snapshot_every == 0 || state.step == config.M)) {
            result.snapshots.push_back({state.step * config.tau(), stepper.l2_norm(state), state.nodal});
        }
    };
    record();

    const Eigen::MatrixXd empty;
    const Eigen::MatrixXd& path = lattice ? lattice->path() : empty;
    const bool noisy = lattice && config.has_noise();
    Eigen::MatrixXd field;
    for (int k = 0; k < config.M; ++k) {
        if (noisy) {
            const Eigen::VectorXd dbeta = path.col((k + 1) * factor) - path.col(k * factor);
            field = increment_field(disc->modes(), disc->sqrt_q(), dbeta);
        }
        state = stepper.step(state, noisy ? field : empty, config.realization_id);
        record();
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace

PathResult solve_path(const RunConfig& config, std::shared_ptr<const Discretization> disc,
                      const BrownianLattice& lattice, int factor, const PathOptions& options) {
    validate(config);
    if (!disc) throw std::invalid_argument("solve_path: null discretization");
    check_matches(config, *disc);
    if (factor < 1 || static_cast<long long>(factor) * config.M != lattice.steps()) {
        throw std::invalid_argument("solve_path: lattice has " + std::to_string(lattice.steps()) +
                                    " steps, expected factor * M = " + std::to_string(factor) + " * " +
                                    std::to_string(config.M));
    }
    if (lattice.modes() != config.noise.mode_count()) {
        throw std::invalid_argument("solve_path: lattice mode count does not match noise spec");
    }
    if (std::abs(lattice.horizon() - config.T) > 1e-12 * config.T) {
        throw std::invalid_argument("solve_path: lattice horizon does not match T");
    }
    return run(config, std::move(disc), &lattice, factor, options);
}

PathResult solve_path(const RunConfig& config, const BrownianLattice& lattice, int factor,
                      const PathOptions& options) {
    validate(config);
    auto disc = std::make_shared<const Discretization>(config.op, config.noise, config.N, config.noise_quadrature);
    return solve_path(config, std::move(disc), lattice, factor, options);
}

PathResult solve_deterministic(const RunConfig& config, const PathOptions& options) {
    validate(config);
    if (config.has_noise()) throw std::invalid_argument("solve_deterministic: configuration has a noise term");
    auto disc = std::make_shared<const Discretization>(config.op, config.noise, config.N, config.noise_quadrature);
    return run(config, std::move(disc), nullptr, 1, options);
}

FieldSampler::FieldSampler(const Discretization& disc, const QuadratureRule& rule)
    : dimension_(disc.dimension()) {
    const BasisSet basis(disc.cutoff(), rule);
    synth_ = basis.values_at_nodes() * disc.eigen().H;
}

Eigen::MatrixXd FieldSampler::values(const Eigen::MatrixXd& V) const {
    if (dimension_ == 1) return synth_ * V;
    return synth_ * V * synth_.transpose();
}

QuadratureRule common_error_rule(int cutoff_a, int cutoff_b) {
    return gauss_lobatto_rule(std::max(cutoff_a, cutoff_b) + 8);
}

double l2_error(const SolverState& a, const Discretization& disc_a, const SolverState& b,
                const Discretization& disc_b) {
    if (disc_a.dimension() != disc_b.dimension()) throw std::invalid_argument("l2_error: dimension mismatch");
    const QuadratureRule rule = common_error_rule(disc_a.cutoff(), disc_b.cutoff());
    const Eigen::MatrixXd diff = FieldSampler(disc_a, rule).values(a.V) - FieldSampler(disc_b, rule).values(b.V);
    return l2_norm(diff, rule, disc_a.dimension());
}

}  // namespace spde
