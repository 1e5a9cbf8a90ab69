#include "spde/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

void validate(const OperatorSpec& spec) {
    if (spec.dimension != 1 && spec.dimension != 2) {
        throw std::invalid_argument("OperatorSpec: dimension must be 1 or 2");
    }
    if (!(spec.diffusivity > 0.0) || !std::isfinite(spec.diffusivity)) {
        throw std::invalid_argument("OperatorSpec: diffusivity must be positive and finite");
    }
}

Eigen::MatrixXd assemble_mass(int cutoff) {
    if (cutoff < 3) throw std::invalid_argument("assemble_mass: N must be >= 3");
    const int modes = cutoff - 1;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(modes, modes);
    for (int m = 0; m < modes; ++m) {
        const double c = 4.0 * m + 6.0;
        mass(m, m) = (1.0 / (2.0 * m + 1.0) + 1.0 / (2.0 * m + 5.0)) / (4.0 * c);
        if (m >= 2) {
            const double off = -1.0 / (4.0 * std::sqrt(c * (4.0 * m - 2.0)) * (2.0 * m + 1.0));
            mass(m, m - 2) = off;
            mass(m - 2, m) = off;
        }
    }
    return mass;
}

Eigen::MatrixXd assemble_stiffness(int cutoff, const OperatorSpec& spec) {
    if (cutoff < 3) throw std::invalid_argument("assemble_stiffness: N must be >= 3");
    validate(spec);
    const int modes = cutoff - 1;
    // phi'_m has degree <= N-1, so the products have degree <= 2N-2.
    const QuadratureRule rule = gauss_lobatto_rule(cutoff);
    Eigen::MatrixXd derivs(rule.size(), modes);
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        for (int m = 0; m < modes; ++m) derivs(i, m) = basis_derivative(m, rule.nodes[i]);
    }
    Eigen::MatrixXd stiffness = derivs.transpose() * rule.weights.asDiagonal() * derivs;
    stiffness = 0.5 * (stiffness + stiffness.transpose()).eval();
    return spec.diffusivity * stiffness;
}

EigenSystem generalized_eigendecomposition(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness) {
    if (mass.rows() != mass.cols() || stiffness.rows() != stiffness.cols() || mass.rows() != stiffness.rows()) {
        throw std::invalid_argument("generalized_eigendecomposition: matrices must be square and equal size");
    }
    const Eigen::LLT<Eigen::MatrixXd> mass_chol(mass);
    if (mass_chol.info() != Eigen::Success) {
        throw std::runtime_error("generalized_eigendecomposition: mass matrix is not SPD");
    }
    const Eigen::LLT<Eigen::MatrixXd> stiff_chol(stiffness);
    if (stiff_chol.info() != Eigen::Success) {
        throw std::runtime_error("generalized_eigendecomposition: stiffness matrix is not SPD");
    }

    // A = L L^T; L^{-1} B L^{-T} y = lambda y; h = L^{-T} y.
    const Eigen::MatrixXd lower = stiff_chol.matrixL();
    Eigen::MatrixXd reduced = lower.triangularView<Eigen::Lower>().solve(mass);
    reduced = lower.triangularView<Eigen::Lower>().solve(reduced.transpose()).transpose();
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("generalized_eigendecomposition: symmetric eigensolver failed");
    }

    EigenSystem sys;
    sys.cutoff = static_cast<int>(mass.rows()) + 1;
    sys.lambda = solver.eigenvalues();
    sys.H = lower.transpose().triangularView<Eigen::Upper>().solve(solver.eigenvectors());
    if ((sys.lambda.array() <= 0.0).any()) {
        throw std::runtime_error("generalized_eigendecomposition: non-positive eigenvalue");
    }
    return sys;
}

Eigen::MatrixXd project_initial(const InitialFunction& u0, const BasisSet& basis, const Eigen::MatrixXd& mass,
                                int dimension) {
    const QuadratureRule& rule = basis.rule();
    const Eigen::Index count = rule.size();
    Eigen::MatrixXd values;
    if (dimension == 1) {
        values.resize(count, 1);
        for (Eigen::Index i = 0; i < count; ++i) values(i, 0) = u0(rule.nodes[i], 0.0);
    } else if (dimension == 2) {
        values.resize(count, count);
        for (Eigen::Index j = 0; j < count; ++j) {
            for (Eigen::Index i = 0; i < count; ++i) values(i, j) = u0(rule.nodes[i], rule.nodes[j]);
        }
    } else {
        throw std::invalid_argument("project_initial: dimension must be 1 or 2");
    }

    const Eigen::MatrixXd load = basis.load_vector(values, dimension);
    const Eigen::LLT<Eigen::MatrixXd> chol(mass);
    if (chol.info() != Eigen::Success) {
        throw std::runtime_error("project_initial: mass matrix factorization failed");
    }
    Eigen::MatrixXd coeffs = chol.solve(load);
    if (dimension == 2) coeffs = chol.solve(coeffs.transpose()).transpose();
    return coeffs;
}

}  // namespace spde
