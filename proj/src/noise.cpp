#include "spde/noise.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t realization_id) {
    return splitmix64(master_seed ^ splitmix64(realization_id ^ 0x5bd1e9955bd1e995ULL));
}

double gaussian_from_key(std::uint64_t key, std::uint64_t mode, std::uint64_t step) {
    const std::uint64_t counter = (mode << 32) | (step & 0xffffffffULL);
    const std::uint64_t bits = splitmix64(key ^ splitmix64(counter));
    const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

}  // namespace

std::string_view to_string(ModeKind kind) {
    switch (kind) {
    case ModeKind::sine: return "sine";
    case ModeKind::sine_plus_basis_phase: return "sine_plus_basis_phase";
    case ModeKind::product_sine_basis: return "product_sine_basis";
    }
    return "unknown";
}

Eigen::VectorXd QWienerSpec::eigenvalues() const {
    Eigen::VectorXd q(mode_count());
    if (dimension == 1) {
        for (int j = 1; j <= truncation; ++j) q[j - 1] = std::pow(static_cast<double>(j), -decay);
    } else {
        for (int j1 = 1; j1 <= truncation; ++j1) {
            for (int j2 = 1; j2 <= truncation; ++j2) {
                const double r2 = static_cast<double>(j1 * j1 + j2 * j2);
                q[(j1 - 1) * truncation + (j2 - 1)] = std::pow(r2, -0.5 * decay);
            }
        }
    }
    return q;
}

double QWienerSpec::trace() const { return eigenvalues().sum(); }

double QWienerSpec::predicted_regularity() const {
    // sum_j j^{2(gamma-1)} q_j < inf in 1-d; the 2-d lattice sum adds one
    // power of the radius.
    return dimension == 1 ? 0.5 * (decay + 1.0) : 0.5 * decay;
}

void validate(const QWienerSpec& spec) {
    if (spec.dimension != 1 && spec.dimension != 2) {
        throw std::invalid_argument("QWienerSpec: dimension must be 1 or 2");
    }
    if (spec.truncation < 0) throw std::invalid_argument("QWienerSpec: truncation J must be >= 0");
    if (!(spec.decay > 0.0)) throw std::invalid_argument("QWienerSpec: decay exponent must be positive");
    if (spec.dimension == 1 && spec.kind == ModeKind::product_sine_basis) {
        throw std::invalid_argument("QWienerSpec: product_sine_basis modes require dimension 2");
    }
    if (spec.dimension == 2 && spec.kind == ModeKind::sine_plus_basis_phase) {
        throw std::invalid_argument("QWienerSpec: sine_plus_basis_phase modes require dimension 1");
    }
}

BrownianLattice::BrownianLattice(Eigen::MatrixXd path, double horizon, std::uint64_t master_seed,
                                 std::uint64_t realization_id)
    : path_(std::move(path)), horizon_(horizon), seed_(master_seed), realization_(realization_id) {
    if (path_.cols() < 2) throw std::invalid_argument("BrownianLattice: need at least one step");
}

double BrownianLattice::increment(int mode, int step) const {
    if (step < 0 || step >= steps() || mode < 0 || mode >= modes()) {
        throw std::out_of_range("BrownianLattice::increment: index out of range");
    }
    return path_(mode, step + 1) - path_(mode, step);
}

Eigen::VectorXd BrownianLattice::increments(int step) const {
    if (step < 0 || step >= steps()) {
        throw std::out_of_range("BrownianLattice::increments: step " + std::to_string(step) + " outside [0, " +
                                std::to_string(steps()) + ")");
    }
    return path_.col(step + 1) - path_.col(step);
}

bool BrownianLattice::operator==(const BrownianLattice& other) const {
    return horizon_ == other.horizon_ && seed_ == other.seed_ && realization_ == other.realization_ &&
           path_.rows() == other.path_.rows() && path_.cols() == other.path_.cols() && path_ == other.path_;
}

double gaussian_at(std::uint64_t master_seed, std::uint64_t realization_id, std::uint64_t mode, std::uint64_t step) {
    return gaussian_from_key(stream_key(master_seed, realization_id), mode, step);
}

BrownianLattice sample_lattice(const QWienerSpec& spec, int steps, double horizon, std::uint64_t master_seed,
                               std::uint64_t realization_id) {
    validate(spec);
    if (steps < 1) throw std::invalid_argument("sample_lattice: steps must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_lattice: horizon must be positive");

    const int modes = spec.mode_count();
    const std::uint64_t key = stream_key(master_seed, realization_id);
    const double sd = std::sqrt(horizon / steps);
    Eigen::MatrixXd path(modes, steps + 1);
    for (int j = 0; j < modes; ++j) {
        double w = 0.0;
        path(j, 0) = 0.0;
        for (int k = 0; k < steps; ++k) {
            w += sd * gaussian_from_key(key, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(k));
            path(j, k + 1) = w;
        }
    }
    return BrownianLattice(std::move(path), horizon, master_seed, realization_id);
}

BrownianLattice coarsen(const BrownianLattice& lattice, int factor) {
    if (factor < 1 || lattice.steps() % factor != 0) {
        throw std::invalid_argument("coarsen: factor " + std::to_string(factor) + " does not divide " +
                                    std::to_string(lattice.steps()) + " steps");
    }
    if (factor == 1) return lattice;
    const int coarse_steps = lattice.steps() / factor;
    Eigen::MatrixXd path(lattice.modes(), coarse_steps + 1);
    for (int k = 0; k <= coarse_steps; ++k) path.col(k) = lattice.path().col(k * factor);
    return BrownianLattice(std::move(path), lattice.horizon(), lattice.master_seed(), lattice.realization_id());
}

Eigen::MatrixXd ModeValues::dense() const {
    if (dimension == 1) return x;
    const Eigen::Index nodes = x.rows();
    const Eigen::Index count = x.cols();
    Eigen::MatrixXd out(nodes * nodes, count * count);
    for (Eigen::Index j1 = 0; j1 < count; ++j1) {
        for (Eigen::Index j2 = 0; j2 < count; ++j2) {
            const Eigen::MatrixXd field = x.col(j1) * y.col(j2).transpose();
            out.col(j1 * count + j2) = field.reshaped();
        }
    }
    return out;
}

ModeValues mode_values(const QWienerSpec& spec, const QuadratureRule& rule) {
    validate(spec);
    const Eigen::Index nodes = rule.size();
    const int count = spec.truncation;
    ModeValues out;
    out.dimension = spec.dimension;
    out.x.resize(nodes, count);
    if (spec.dimension == 2) out.y.resize(nodes, count);
    for (int j = 1; j <= count; ++j) {
        const double freq = j * M_PI;
        for (Eigen::Index i = 0; i < nodes; ++i) {
            const double s = rule.nodes[i];
            switch (spec.kind) {
            case ModeKind::sine:
                out.x(i, j - 1) = std::sin(freq * s);
                if (spec.dimension == 2) out.y(i, j - 1) = std::sin(freq * s);
                break;
            case ModeKind::sine_plus_basis_phase:
                out.x(i, j - 1) = std::sin(freq * s + basis_eval(j, s));
                break;
            case ModeKind::product_sine_basis:
                out.x(i, j - 1) = std::sin(freq * s + basis_eval(j, s));
                out.y(i, j - 1) = std::sin(freq * s) + basis_eval(j, s);
                break;
            }
        }
    }
    return out;
}

Eigen::MatrixXd increment_field(const ModeValues& modes, const Eigen::VectorXd& sqrt_q, const Eigen::VectorXd& dbeta) {
    const Eigen::Index count = modes.x.cols();
    const Eigen::Index nodes = modes.x.rows();
    if (modes.dimension == 1) {
        if (sqrt_q.size() != count || dbeta.size() != count) {
            throw std::invalid_argument("increment_field: mode count mismatch");
        }
        Eigen::MatrixXd field = Eigen::MatrixXd::Zero(nodes, 1);
        for (Eigen::Index j = 0; j < count; ++j) field.col(0) += (sqrt_q[j] * dbeta[j]) * modes.x.col(j);
        return field;
    }
    if (sqrt_q.size() != count * count || dbeta.size() != count * count) {
        throw std::invalid_argument("increment_field: mode count mismatch");
    }
    // Row j1, column j2 matches the flat index (j1-1) J + (j2-1).
    const Eigen::MatrixXd amplitude = (sqrt_q.array() * dbeta.array()).matrix().reshaped(count, count).transpose();
    const Eigen::MatrixXd half = amplitude * modes.y.transpose();
    return modes.x * half;
}

Eigen::MatrixXd increment_field(const BrownianLattice& lattice, const QWienerSpec& spec, int step,
                                const ModeValues& modes, int factor) {
    if (factor < 1 || lattice.steps() % factor != 0) {
        throw std::invalid_argument("increment_field: factor does not divide lattice steps");
    }
    const int coarse_steps = lattice.steps() / factor;
    if (step < 0 || step >= coarse_steps) {
        throw std::out_of_range("increment_field: step " + std::to_string(step) + " outside [0, " +
                                std::to_string(coarse_steps) + ")");
    }
    if (lattice.modes() != spec.mode_count()) {
        throw std::invalid_argument("increment_field: lattice mode count does not match noise spec");
    }
    const Eigen::VectorXd dbeta = lattice.path().col((step + 1) * factor) - lattice.path().col(step * factor);
    const Eigen::VectorXd sqrt_q = spec.eigenvalues().cwiseSqrt();
    return increment_field(modes, sqrt_q, dbeta);
}

}  // namespace spde
