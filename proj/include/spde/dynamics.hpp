#pragma once

#include "spde/basis.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace spde {

/// Reaction polynomial f(u) = sum_j a_j u^j. An empty coefficient list
/// (or all zeros) means no reaction term.
struct ReactionSpec {
    std::vector<double> coefficients;

    static ReactionSpec allen_cahn() { return {{0.0, 1.0, 0.0, -1.0}}; }
    static ReactionSpec none() { return {}; }

    /// Index of the highest nonzero coefficient, -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return degree() < 0; }
};

/// Accepts the zero polynomial or an odd degree with negative leading
/// coefficient. Returns the rejection reason otherwise.
std::optional<std::string> validate_reaction(const ReactionSpec& spec);

/// Upper bound K on (f(u) - a_0) / u, scanned over |u| <= 10, plus |a_0|/2.
/// For u - u^3 this is 1.
double coercivity_constant(const ReactionSpec& spec);

enum class DiffusionKind { identity, linear, sine, rational };

/// Noise coefficient g from a fixed catalog, all globally Lipschitz with
/// linear growth:
///   identity  g = 1                  (additive noise)
///   linear    g = c u
///   sine      g = sin u
///   rational  g = (1 - u^2) / (1 + u^2)
struct DiffusionSpec {
    DiffusionKind kind = DiffusionKind::identity;
    double scale = 1.0;  // c for the linear kind

    static DiffusionSpec additive() { return {DiffusionKind::identity, 1.0}; }
    static DiffusionSpec zero() { return {DiffusionKind::linear, 0.0}; }

    bool is_zero() const { return kind == DiffusionKind::linear && scale == 0.0; }
    /// Combined Lipschitz / growth constant c.
    double lipschitz_constant() const;
};

std::string to_string(const DiffusionSpec& spec);

Eigen::MatrixXd f_eval(const ReactionSpec& spec, const Eigen::MatrixXd& u);
Eigen::MatrixXd g_eval(const DiffusionSpec& spec, const Eigen::MatrixXd& u);

/// Discrete L2 norm from nodal values on a Lobatto rule (tensor rule in 2-d).
double l2_norm(const Eigen::MatrixXd& values, const QuadratureRule& rule, int dimension);

inline double taming_factor(double tau, double f_norm_sq) { return 1.0 / (1.0 + tau * f_norm_sq); }

}  // namespace spde
