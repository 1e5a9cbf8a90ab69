#include "spde/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

namespace {

void require_dimension(int dimension) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("dimension must be 1 or 2, got " + std::to_string(dimension));
    }
}

void require_rows(const Eigen::MatrixXd& m, Eigen::Index rows, int dimension, const char* what) {
    const bool ok = m.rows() == rows && (dimension == 1 ? m.cols() >= 1 : m.cols() == rows);
    if (!ok) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) +
                                    (dimension == 1 ? " rows" : " x " + std::to_string(rows)) +
                                    ", got " + std::to_string(m.rows()) + " x " +
                                    std::to_string(m.cols()));
    }
}

}  // namespace

double shifted_legendre(int n, double x) {
    const double t = 2.0 * x - 1.0;
    if (n == 0) return 1.0;
    double prev = 1.0;
    double curr = t;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * t * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

void shifted_legendre_all(double x, std::span<double> out) {
    if (out.empty()) return;
    const double t = 2.0 * x - 1.0;
    out[0] = 1.0;
    if (out.size() == 1) return;
    out[1] = t;
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double kk = static_cast<double>(k);
        out[k + 1] = ((2.0 * kk + 1.0) * t * out[k] - kk * out[k - 1]) / (kk + 1.0);
    }
}

double shifted_legendre_derivative(int n, double x) {
    if (n == 0) return 0.0;
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k on [-1,1]; chain rule contributes 2.
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    shifted_legendre_all(x, p);
    double d_prev = 0.0;  // P'_0
    double d_curr = 1.0;  // P'_1
    for (int k = 1; k < n; ++k) {
        const double d_next = d_prev + (2.0 * k + 1.0) * p[static_cast<std::size_t>(k)];
        d_prev = d_curr;
        d_curr = d_next;
    }
    return 2.0 * d_curr;
}

QuadratureRule gauss_lobatto_rule(int order) {
    if (order < 1) {
        throw std::invalid_argument("gauss_lobatto_rule: order must be >= 1");
    }
    const int n = order;
    const auto count = static_cast<std::size_t>(n) + 1;
    std::vector<double> t(count);
    for (std::size_t j = 0; j < count; ++j) {
        t[j] = -std::cos(M_PI * static_cast<double>(j) / n);
    }

    // Newton on (1-t^2) L'_n using x L_n - L_{n-1} = (t^2-1) L'_n / n.
    std::vector<double> pn(count), pn1(count);
    auto evaluate = [&]() {
        for (std::size_t j = 0; j < count; ++j) {
            double prev = 1.0;
            double curr = t[j];
            for (int k = 1; k < n; ++k) {
                const double next = ((2.0 * k + 1.0) * t[j] * curr - k * prev) / (k + 1.0);
                prev = curr;
                curr = next;
            }
            pn[j] = curr;
            pn1[j] = prev;
        }
    };

    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
        evaluate();
        double max_step = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            const double step = (t[j] * pn[j] - pn1[j]) / ((n + 1.0) * pn[j]);
            t[j] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step <= 1e-14) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw std::runtime_error("gauss_lobatto_rule: Newton iteration did not converge for order " +
                                 std::to_string(order));
    }

    for (std::size_t j = 0; j < count / 2; ++j) {
        const double s = 0.5 * (t[count - 1 - j] - t[j]);
        t[j] = -s;
        t[count - 1 - j] = s;
    }
    if (count % 2 == 1) t[count / 2] = 0.0;
    t.front() = -1.0;
    t.back() = 1.0;
    evaluate();

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(static_cast<Eigen::Index>(count));
    rule.weights.resize(static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        rule.nodes[i] = 0.5 * (t[j] + 1.0);
        rule.weights[i] = 1.0 / (n * (n + 1.0) * pn[j] * pn[j]);
    }
    rule.nodes[0] = 0.0;
    rule.nodes[static_cast<Eigen::Index>(count) - 1] = 1.0;
    return rule;
}

double basis_eval(int m, double x) {
    if (m < 0) throw std::invalid_argument("basis_eval: m must be >= 0");
    std::vector<double> p(static_cast<std::size_t>(m) + 3);
    shifted_legendre_all(x, p);
    return (p[static_cast<std::size_t>(m)] - p[static_cast<std::size_t>(m) + 2]) /
           (2.0 * std::sqrt(4.0 * m + 6.0));
}

double basis_derivative(int m, double x) {
    if (m < 0) throw std::invalid_argument("basis_derivative: m must be >= 0");
    return (shifted_legendre_derivative(m, x) - shifted_legendre_derivative(m + 2, x)) /
           (2.0 * std::sqrt(4.0 * m + 6.0));
}

Eigen::MatrixXd legendre_analysis_matrix(const QuadratureRule& rule) {
    const int np = rule.order;
    const Eigen::Index count = rule.size();
    Eigen::MatrixXd transform(count, count);
    std::vector<double> p(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        shifted_legendre_all(rule.nodes[i], p);
        for (Eigen::Index n = 0; n < count; ++n) {
            // Discrete norm of the top mode is 1/np instead of 1/(2np+1).
            const double inv_norm = n < np ? 2.0 * static_cast<double>(n) + 1.0 : static_cast<double>(np);
            transform(n, i) = inv_norm * rule.weights[i] * p[static_cast<std::size_t>(n)];
        }
    }
    return transform;
}

Eigen::MatrixXd analyze(const Eigen::MatrixXd& values, const QuadratureRule& rule, int dimension) {
    require_dimension(dimension);
    require_rows(values, rule.size(), dimension, "analyze");
    const Eigen::MatrixXd transform = legendre_analysis_matrix(rule);
    if (dimension == 1) return transform * values;
    return transform * values * transform.transpose();
}

BasisSet::BasisSet(int cutoff, QuadratureRule rule) : cutoff_(cutoff), rule_(std::move(rule)) {
    if (cutoff_ < 3) {
        throw std::invalid_argument("BasisSet: cutoff N must be >= 3, got " + std::to_string(cutoff_));
    }
    const Eigen::Index count = rule_.size();
    const int modes = size();
    phi_.resize(count, modes);
    const Eigen::Index legendre_count = std::max<Eigen::Index>(count, cutoff_ + 1);
    legendre_.resize(count, legendre_count);
    std::vector<double> p(static_cast<std::size_t>(legendre_count));
    for (Eigen::Index i = 0; i < count; ++i) {
        shifted_legendre_all(rule_.nodes[i], p);
        for (Eigen::Index n = 0; n < legendre_count; ++n) legendre_(i, n) = p[static_cast<std::size_t>(n)];
        for (int m = 0; m < modes; ++m) {
            phi_(i, m) = (p[static_cast<std::size_t>(m)] - p[static_cast<std::size_t>(m) + 2]) /
                         (2.0 * std::sqrt(4.0 * m + 6.0));
        }
    }

    analysis_ = legendre_analysis_matrix(rule_);
    if (rule_.order >= cutoff_ + 1) {
        // (I v, phi_m) = (h_m / (2m+1) - h_{m+2} / (2m+5)) / (2 sqrt(4m+6))
        load_.resize(modes, count);
        for (int m = 0; m < modes; ++m) {
            const double scale = 1.0 / (2.0 * std::sqrt(4.0 * m + 6.0));
            load_.row(m) = scale * (analysis_.row(m) / (2.0 * m + 1.0) -
                                    analysis_.row(m + 2) / (2.0 * m + 5.0));
        }
    }
}

Eigen::MatrixXd BasisSet::synthesize(const Eigen::MatrixXd& coeffs, int dimension) const {
    require_dimension(dimension);
    require_rows(coeffs, size(), dimension, "synthesize");
    if (dimension == 1) return phi_ * coeffs;
    return phi_ * coeffs * phi_.transpose();
}

Eigen::MatrixXd BasisSet::load_vector(const Eigen::MatrixXd& values, int dimension) const {
    require_dimension(dimension);
    if (load_.size() == 0) {
        throw std::invalid_argument("load_vector: quadrature order " + std::to_string(rule_.order) +
                                    " too small for cutoff " + std::to_string(cutoff_) +
                                    " (needs >= N+1)");
    }
    require_rows(values, rule_.size(), dimension, "load_vector");
    if (dimension == 1) return load_ * values;
    return load_ * values * load_.transpose();
}

}  // namespace spde
