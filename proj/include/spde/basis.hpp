#pragma once

#include <Eigen/Dense>

#include <span>

namespace spde {

/// Legendre-Gauss-Lobatto rule mapped to [0,1]. Holds order+1 nodes
/// including both endpoints.
struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    int order = 0;

    int size() const { return order + 1; }
};

/// L_n(2x-1), by the three-term recurrence.
double shifted_legendre(int n, double x);

/// Fills out[0..n] with L_0(2x-1)..L_n(2x-1).
void shifted_legendre_all(double x, std::span<double> out);

/// d/dx of L_n(2x-1).
double shifted_legendre_derivative(int n, double x);

QuadratureRule gauss_lobatto_rule(int order);

/// Dirichlet basis function (L_m - L_{m+2}) / (2 sqrt(4m+6)) on [0,1].
double basis_eval(int m, double x);
double basis_derivative(int m, double x);

/// Discrete Legendre transform matrix T for a Lobatto rule: if v holds
/// nodal values, T * v holds the coefficients of the interpolant in the
/// shifted Legendre basis L_0..L_order.
Eigen::MatrixXd legendre_analysis_matrix(const QuadratureRule& rule);

/// Coefficients of the interpolant through `values` (one column per
/// transform in 1-d, rows x columns = x nodes by y nodes in 2-d).
Eigen::MatrixXd analyze(const Eigen::MatrixXd& values, const QuadratureRule& rule, int dimension);

/// Cached basis data for a cutoff N (basis indices 0..N-2) on one
/// quadrature rule.
///
/// Fields are stored node-major: values_at_nodes()(i, m) is phi_m(x_i).
/// In 2-d, nodal fields are matrices indexed (x node, y node) and
/// coefficient fields are matrices indexed (m, n) for phi_m(x) phi_n(y).
class BasisSet {
public:
    BasisSet(int cutoff, QuadratureRule rule);

    int cutoff() const { return cutoff_; }
    int size() const { return cutoff_ - 1; }
    const QuadratureRule& rule() const { return rule_; }

    const Eigen::MatrixXd& values_at_nodes() const { return phi_; }
    const Eigen::MatrixXd& legendre_at_nodes() const { return legendre_; }
    const Eigen::MatrixXd& analysis_matrix() const { return analysis_; }

    /// Row m maps nodal values to the integral of the interpolant
    /// against phi_m.
    const Eigen::MatrixXd& load_matrix() const { return load_; }

    Eigen::MatrixXd synthesize(const Eigen::MatrixXd& coeffs, int dimension) const;
    Eigen::MatrixXd load_vector(const Eigen::MatrixXd& values, int dimension) const;

private:
    int cutoff_;
    QuadratureRule rule_;
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd legendre_;
    Eigen::MatrixXd analysis_;
    Eigen::MatrixXd load_;
};

}  // namespace spde
