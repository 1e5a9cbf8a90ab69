#pragma once

#include "spde/basis.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace spde {

/// How e_j is defined pointwise.
///   sine                  1-d: sin(j pi x);  2-d: sin(j1 pi x) sin(j2 pi y)
///   sine_plus_basis_phase 1-d: sin(j pi x + phi_j(x))
///   product_sine_basis    2-d: sin(j1 pi x + phi_j1(x)) (sin(j2 pi y) + phi_j2(y))
enum class ModeKind { sine, sine_plus_basis_phase, product_sine_basis };

std::string_view to_string(ModeKind kind);

/// Truncated Q-Wiener process. Eigenvalues are q_j = j^-s in 1-d and
/// q_{j1 j2} = (j1^2 + j2^2)^(-s/2) in 2-d; j starts at 1. In 2-d the mode
/// (j1, j2) has flat index (j1-1) * J + (j2-1).
struct QWienerSpec {
    int dimension = 1;
    int truncation = 100;
    double decay = 5.001;
    ModeKind kind = ModeKind::sine;

    int mode_count() const { return dimension == 1 ? truncation : truncation * truncation; }
    Eigen::VectorXd eigenvalues() const;
    double trace() const;
    /// Regularity index predicted from the decay; reporting only.
    double predicted_regularity() const;
};

void validate(const QWienerSpec& spec);

/// Brownian paths for every retained mode on a uniform grid of `steps`
/// intervals of [0, horizon]. Stored as cumulative values, path(j, k) =
/// beta_j(t_k) with path(j, 0) = 0, so coarser lattices are exact
/// subsamples of finer ones.
class BrownianLattice {
public:
    BrownianLattice(Eigen::MatrixXd path, double horizon, std::uint64_t master_seed, std::uint64_t realization_id);

    int steps() const { return static_cast<int>(path_.cols()) - 1; }
    int modes() const { return static_cast<int>(path_.rows()); }
    double horizon() const { return horizon_; }
    double step_size() const { return horizon_ / steps(); }
    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t realization_id() const { return realization_; }

    const Eigen::MatrixXd& path() const { return path_; }
    double increment(int mode, int step) const;
    /// All per-mode increments for interval [t_step, t_step+1].
    Eigen::VectorXd increments(int step) const;

    bool operator==(const BrownianLattice& other) const;

private:
    Eigen::MatrixXd path_;
    double horizon_;
    std::uint64_t seed_;
    std::uint64_t realization_;
};

/// Standard normal draw for one (seed, realization, mode, step) counter.
/// Pure function; no shared state.
double gaussian_at(std::uint64_t master_seed, std::uint64_t realization_id, std::uint64_t mode, std::uint64_t step);

BrownianLattice sample_lattice(const QWienerSpec& spec, int steps, double horizon, std::uint64_t master_seed,
                               std::uint64_t realization_id);

/// Same path at steps / factor intervals.
BrownianLattice coarsen(const BrownianLattice& lattice, int factor);

/// Mode functions evaluated at quadrature nodes. Every catalog mode is
/// separable, e_j(x, y) = X_j1(x) Y_j2(y), so only the 1-d factors are
/// stored; `y` is empty in 1-d.
struct ModeValues {
    int dimension = 1;
    Eigen::MatrixXd x;  // nodes x J
    Eigen::MatrixXd y;  // nodes x J (2-d only)

    /// nodes x modes in 1-d, (nodes^2, column-major) x modes in 2-d.
    Eigen::MatrixXd dense() const;
};

ModeValues mode_values(const QWienerSpec& spec, const QuadratureRule& rule);

/// Nodal values of Delta W^Q = sum_j sqrt(q_j) e_j dbeta_j, summed in
/// ascending mode order.
Eigen::MatrixXd increment_field(const ModeValues& modes, const Eigen::VectorXd& sqrt_q,
                                const Eigen::VectorXd& dbeta);

/// Convenience form: step `step` of `lattice` after coarsening by `factor`.
Eigen::MatrixXd increment_field(const BrownianLattice& lattice, const QWienerSpec& spec, int step,
                                const ModeValues& modes, int factor = 1);

}  // namespace spde
