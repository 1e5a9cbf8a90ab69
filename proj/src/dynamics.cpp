#include "spde/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spde {

int ReactionSpec::degree() const {
    for (int j = static_cast<int>(coefficients.size()) - 1; j >= 0; --j) {
        if (coefficients[static_cast<std::size_t>(j)] != 0.0) return j;
    }
    return -1;
}

std::optional<std::string> validate_reaction(const ReactionSpec& spec) {
    for (double a : spec.coefficients) {
        if (!std::isfinite(a)) return "reaction coefficients must be finite";
    }
    const int p = spec.degree();
    if (p < 0) return std::nullopt;
    if (p % 2 == 0) {
        return "reaction polynomial must have odd degree, got degree " + std::to_string(p);
    }
    if (spec.coefficients[static_cast<std::size_t>(p)] >= 0.0) {
        return "reaction polynomial must have a negative leading coefficient";
    }
    return std::nullopt;
}

double coercivity_constant(const ReactionSpec& spec) {
    const int p = spec.degree();
    if (p < 1) return p == 0 ? 0.5 * std::abs(spec.coefficients[0]) : 0.0;
    double sup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
        const double u = -10.0 + 20.0 * i / 4000.0;
        // (f(u) - a_0) / u = sum_{j>=1} a_j u^{j-1}
        double acc = 0.0;
        for (int j = p; j >= 1; --j) acc = acc * u + spec.coefficients[static_cast<std::size_t>(j)];
        sup = std::max(sup, acc);
    }
    return std::max(sup, 0.0) + 0.5 * std::abs(spec.coefficients[0]);
}

double DiffusionSpec::lipschitz_constant() const {
    switch (kind) {
    case DiffusionKind::identity: return 1.0;
    case DiffusionKind::linear: return std::abs(scale);
    case DiffusionKind::sine: return 1.0;
    case DiffusionKind::rational: return 3.0 * std::sqrt(3.0) / 4.0;  // max |g'| at u = 1/sqrt(3)
    }
    return 1.0;
}

std::string to_string(const DiffusionSpec& spec) {
    switch (spec.kind) {
    case DiffusionKind::identity: return "identity";
    case DiffusionKind::linear: {
        std::ostringstream out;
        out.precision(17);
        out << "linear:" << spec.scale;
        return out.str();
    }
    case DiffusionKind::sine: return "sine";
    case DiffusionKind::rational: return "rational";
    }
    return "unknown";
}

Eigen::MatrixXd f_eval(const ReactionSpec& spec, const Eigen::MatrixXd& u) {
    const int p = spec.degree();
    if (p < 0) return Eigen::MatrixXd::Zero(u.rows(), u.cols());
    const auto& a = spec.coefficients;
    return u.unaryExpr([&a, p](double v) {
        double acc = a[static_cast<std::size_t>(p)];
        for (int j = p - 1; j >= 0; --j) acc = acc * v + a[static_cast<std::size_t>(j)];
        return acc;
    });
}

Eigen::MatrixXd g_eval(const DiffusionSpec& spec, const Eigen::MatrixXd& u) {
    switch (spec.kind) {
    case DiffusionKind::identity: return Eigen::MatrixXd::Ones(u.rows(), u.cols());
    case DiffusionKind::linear: return spec.scale * u;
    case DiffusionKind::sine: return u.array().sin().matrix();
    case DiffusionKind::rational: {
        const Eigen::ArrayXXd sq = u.array().square();
        return ((1.0 - sq) / (1.0 + sq)).matrix();
    }
    }
    throw std::invalid_argument("g_eval: unknown diffusion kind");
}

double l2_norm(const Eigen::MatrixXd& values, const QuadratureRule& rule, int dimension) {
    if (dimension == 1) {
        if (values.rows() != rule.size() || values.cols() != 1) {
            throw std::invalid_argument("l2_norm: nodal vector does not match rule");
        }
        return std::sqrt(rule.weights.dot(values.col(0).cwiseAbs2()));
    }
    if (values.rows() != rule.size() || values.cols() != rule.size()) {
        throw std::invalid_argument("l2_norm: nodal matrix does not match rule");
    }
    return std::sqrt(rule.weights.dot(values.cwiseAbs2() * rule.weights));
}

}  // namespace spde
