#pragma once

#include "spde/basis.hpp"
#include "spde/dynamics.hpp"
#include "spde/noise.hpp"
#include "spde/operators.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

enum class InitialCondition {
    zero,
    sine,  // sin(pi x), or sin(pi x) sin(pi y) in 2-d
    bump,  // x(1-x), or x(1-x) y(1-y) in 2-d
};

std::string_view to_string(InitialCondition u0);
InitialFunction initial_function(InitialCondition u0, int dimension);

/// Rule on which g(u) dW is formed and projected. `resolved` raises the
/// Lobatto order until every retained noise mode is resolved; `collocated`
/// reuses the order N+8 rule of the drift term.
enum class NoiseQuadrature { resolved, collocated };

std::string_view to_string(NoiseQuadrature q);

struct RunConfig {
    OperatorSpec op;
    ReactionSpec reaction = ReactionSpec::allen_cahn();
    DiffusionSpec diffusion = DiffusionSpec::additive();
    QWienerSpec noise;
    int N = 32;
    int M = 1024;
    double T = 1.0;
    InitialCondition u0 = InitialCondition::sine;
    std::uint64_t master_seed = 0;
    std::uint64_t realization_id = 0;
    NoiseQuadrature noise_quadrature = NoiseQuadrature::resolved;

    double tau() const { return T / M; }
    bool has_noise() const { return !diffusion.is_zero() && noise.mode_count() > 0; }
};

/// Throws std::invalid_argument listing the first violated invariant.
void validate(const RunConfig& config);

/// Non-finite state reached; carries the step and realization.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int step, std::uint64_t realization_id);
    int step() const { return step_; }
    std::uint64_t realization_id() const { return realization_; }

private:
    int step_;
    std::uint64_t realization_;
};

int drift_quadrature_order(int cutoff);
int noise_quadrature_order(int cutoff, const QWienerSpec& noise, NoiseQuadrature mode);

/// Everything about a run that does not depend on the time step or the
/// sample path: basis caches, the eigen system and the mode values.
/// Immutable; shared by all realizations of a study.
class Discretization {
public:
    Discretization(const OperatorSpec& op, const QWienerSpec& noise, int cutoff,
                   NoiseQuadrature quadrature = NoiseQuadrature::resolved);

    int dimension() const { return op_.dimension; }
    int cutoff() const { return cutoff_; }
    const OperatorSpec& op() const { return op_; }
    const QWienerSpec& noise() const { return noise_; }

    const BasisSet& drift_basis() const { return drift_; }
    const BasisSet& noise_basis() const { return noise_basis_; }
    bool shares_rule() const { return drift_.rule().order == noise_basis_.rule().order; }

    const Eigen::MatrixXd& mass() const { return mass_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const EigenSystem& eigen() const { return eigen_; }
    const ModeValues& modes() const { return modes_; }
    const Eigen::VectorXd& sqrt_q() const { return sqrt_q_; }

    /// phi(x_i) H on each rule, and H^T times the load matrix.
    const Eigen::MatrixXd& drift_synthesis() const { return drift_synth_; }
    const Eigen::MatrixXd& drift_projection() const { return drift_proj_; }
    const Eigen::MatrixXd& noise_synthesis() const { return noise_synth_; }
    const Eigen::MatrixXd& noise_projection() const { return noise_proj_; }

    /// Eigen coordinates V for phi-coefficients C (C = H V, or H V H^T).
    Eigen::MatrixXd to_eigen(const Eigen::MatrixXd& coeffs) const;
    Eigen::MatrixXd to_coefficients(const Eigen::MatrixXd& eigen_coords) const;

    /// Applies a (nodes x modes) synthesis matrix along every axis.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& op, const Eigen::MatrixXd& x) const;

private:
    OperatorSpec op_;
    QWienerSpec noise_;
    int cutoff_;
    BasisSet drift_;
    BasisSet noise_basis_;
    Eigen::MatrixXd mass_;
    Eigen::MatrixXd stiffness_;
    EigenSystem eigen_;
    ModeValues modes_;
    Eigen::VectorXd sqrt_q_;
    Eigen::MatrixXd drift_synth_;
    Eigen::MatrixXd drift_proj_;
    Eigen::MatrixXd noise_synth_;
    Eigen::MatrixXd noise_proj_;
};

/// V holds eigen coordinates ((N-1) x 1 in 1-d, (N-1) x (N-1) in 2-d);
/// nodal holds u on the drift rule and is kept in sync with V.
struct SolverState {
    int step = 0;
    Eigen::MatrixXd V;
    Eigen::MatrixXd nodal;
};

/// Tamed semi-implicit Euler step in diagonalized form.
///
/// With C = H V and H^T A H = I, H^T B H = Lambda, the Galerkin system
/// (B + tau A) c' = B c + tau theta F + W decouples to
///   1-d: v'_m  = (lam_m v_m + tau theta Fh_m + Wh_m) / (lam_m + tau)
///   2-d: V'_mn = (lam_m lam_n V_mn + tau theta Fh_mn + Wh_mn)
///                / (lam_m lam_n + tau (lam_m + lam_n))
/// where theta = 1 / (1 + tau ||f(u)||^2), Fh = H^T F (H), Wh = H^T W (H).
/// The noise load W enters once, without a factor tau.
class TamedEulerStepper {
public:
    TamedEulerStepper(std::shared_ptr<const Discretization> disc, ReactionSpec reaction, DiffusionSpec diffusion,
                      double tau);

    const Discretization& discretization() const { return *disc_; }
    double tau() const { return tau_; }

    SolverState initial_state(const InitialFunction& u0) const;
    SolverState state_from_eigen(Eigen::MatrixXd V, int step = 0) const;

    /// `noise_field` is Delta W^Q at the noise-rule nodes; pass an empty
    /// matrix for a deterministic step.
    SolverState step(const SolverState& state, const Eigen::MatrixXd& noise_field,
                     std::uint64_t realization_id = 0) const;

    /// Drift and noise loads in eigen coordinates, before the diagonal solve.
    struct Loads {
        Eigen::MatrixXd drift;  // H^T F (H), untamed
        Eigen::MatrixXd noise;  // H^T W (H)
        double f_norm_sq = 0.0;
    };
    Loads loads(const SolverState& state, const Eigen::MatrixXd& noise_field) const;

    double l2_norm(const SolverState& state) const;

private:
    std::shared_ptr<const Discretization> disc_;
    ReactionSpec reaction_;
    DiffusionSpec diffusion_;
    double tau_;
    Eigen::MatrixXd mass_weight_;  // lam (1-d) or lam_m lam_n (2-d)
    Eigen::MatrixXd denominator_;
};

struct Snapshot {
    double time = 0.0;
    double l2_norm = 0.0;
    Eigen::MatrixXd nodal;
};

struct PathOptions {
    bool record_snapshots = false;
    /// Called after the initial state and after every step.
    std::function<void(const SolverState&)> observer;
};

struct PathResult {
    SolverState final_state;
    std::vector<Snapshot> snapshots;
};

/// Runs M steps of `config` driven by `lattice` coarsened by `factor`
/// (factor * M must equal lattice.steps()). `disc` must match config.
PathResult solve_path(const RunConfig& config, std::shared_ptr<const Discretization> disc,
                      const BrownianLattice& lattice, int factor, const PathOptions& options = {});

/// Builds the discretization on the fly.
PathResult solve_path(const RunConfig& config, const BrownianLattice& lattice, int factor,
                      const PathOptions& options = {});

/// Deterministic run (no lattice needed; noise must be absent).
PathResult solve_deterministic(const RunConfig& config, const PathOptions& options = {});

/// Samples fields of several discretizations on one shared Lobatto rule.
class FieldSampler {
public:
    FieldSampler(const Discretization& disc, const QuadratureRule& rule);
    Eigen::MatrixXd values(const Eigen::MatrixXd& V) const;

private:
    int dimension_;
    Eigen::MatrixXd synth_;
};

QuadratureRule common_error_rule(int cutoff_a, int cutoff_b);

/// L2 distance between two states, possibly of different cutoffs, on a
/// shared rule of order max(N_a, N_b) + 8.
double l2_error(const SolverState& a, const Discretization& disc_a, const SolverState& b,
                const Discretization& disc_b);

}  // namespace spde
