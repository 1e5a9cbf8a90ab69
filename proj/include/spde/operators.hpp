#pragma once

#include "spde/basis.hpp"

#include <Eigen/Dense>

#include <functional>

namespace spde {

/// Constant-coefficient operator nu * Laplacian on (0,1)^d with
/// homogeneous Dirichlet data.
struct OperatorSpec {
    int dimension = 1;
    double diffusivity = 1.0;
};

void validate(const OperatorSpec& spec);

/// Generalized eigenpairs of the pencil B h = lambda A h, normalized so
/// that H^T A H = I and H^T B H = diag(lambda). Eigenvalues ascending.
struct EigenSystem {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd H;
    int cutoff = 0;
};

/// Mass matrix b_mn = (phi_m, phi_n), pentadiagonal closed form.
Eigen::MatrixXd assemble_mass(int cutoff);

/// nu * (phi'_m, phi'_n), integrated exactly by a Lobatto rule.
Eigen::MatrixXd assemble_stiffness(int cutoff, const OperatorSpec& spec);

EigenSystem generalized_eigendecomposition(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness);

using InitialFunction = std::function<double(double x, double y)>;

/// L2 projection of u0 onto V_N: solves B c = (I u0, phi) in 1-d and
/// B C B = (I u0, phi x phi) in 2-d. Returns coefficients in the phi basis.
Eigen::MatrixXd project_initial(const InitialFunction& u0, const BasisSet& basis, const Eigen::MatrixXd& mass,
                                int dimension);

}  // namespace spde
