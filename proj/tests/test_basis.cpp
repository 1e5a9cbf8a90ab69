#include "oracle.hpp"

#include "spde/basis.hpp"

#include <doctest.h>

#include <random>

using spde::BasisSet;
using spde::gauss_lobatto_rule;

TEST_SUITE("basis") {

TEST_CASE("shifted Legendre values") {
    CHECK(spde::shifted_legendre(0, 0.3) == 1.0);
    CHECK(std::abs(spde::shifted_legendre(1, 0.5)) <= 1e-16);
    CHECK(spde::shifted_legendre(2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("shifted Legendre matches the library oracle up to degree 200") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = unif(rng);
        for (int n : {3, 10, 31, 64, 127, 200}) {
            CHECK(std::abs(spde::shifted_legendre(n, x) - oracle::legendre01(n, x)) < 1e-12);
        }
    }
}

TEST_CASE("shifted Legendre derivative against finite differences") {
    for (int n : {1, 2, 5, 12}) {
        for (double x : {0.1, 0.37, 0.8}) {
            const double h = 1e-6;
            const double fd = (oracle::legendre01(n, x + h) - oracle::legendre01(n, x - h)) / (2 * h);
            CHECK(spde::shifted_legendre_derivative(n, x) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("Lobatto rule, small orders") {
    const auto r1 = gauss_lobatto_rule(1);
    REQUIRE(r1.size() == 2);
    CHECK(r1.nodes[0] == 0.0);
    CHECK(r1.nodes[1] == 1.0);
    CHECK(r1.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r1.weights[1] == doctest::Approx(0.5).epsilon(1e-15));

    const auto r2 = gauss_lobatto_rule(2);
    REQUIRE(r2.size() == 3);
    CHECK(r2.nodes[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r2.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(r2.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r2.weights[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    CHECK_THROWS_AS(gauss_lobatto_rule(0), std::invalid_argument);
}

TEST_CASE("Lobatto rule integrates monomials up to degree 2Np-1") {
    for (int np : {2, 3, 5, 8, 16, 33, 72, 216}) {
        const auto rule = gauss_lobatto_rule(np);
        CHECK(rule.nodes[0] == 0.0);
        CHECK(rule.nodes[np] == 1.0);
        CHECK(std::abs(rule.weights.sum() - 1.0) < 1e-13);
        for (int i = 1; i <= np; ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        CHECK((rule.weights.array() > 0).all());
        CHECK(std::abs(rule.weights.dot(rule.nodes.cwiseAbs2()) - 1.0 / 3.0) < 1e-13);
        for (int k = 0; k <= 2 * np - 1; ++k) {
            const double exact = 1.0 / (k + 1.0);
            const double approx = rule.weights.dot(rule.nodes.array().pow(k).matrix());
            CHECK(std::abs(approx - exact) <= 1e-12 * exact);
        }
    }
}

TEST_CASE("basis function values and boundary zeros") {
    CHECK(spde::basis_eval(0, 0.0) == doctest::Approx(0.0).scale(1e-16));
    CHECK(spde::basis_eval(0, 0.5) == doctest::Approx(0.75 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(spde::basis_eval(0, 0.5) == doctest::Approx(0.30618621784789724).epsilon(1e-14));
    CHECK(std::abs(spde::basis_eval(3, 1.0)) < 1e-15);
    for (int m = 0; m <= 30; ++m) {
        CHECK(std::abs(spde::basis_eval(m, 0.0)) + std::abs(spde::basis_eval(m, 1.0)) <= 1e-13);
        CHECK(spde::basis_eval(m, 0.3) == doctest::Approx(oracle::phi(m, 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("shifted Legendre orthogonality on [0,1]") {
    for (int m = 0; m <= 30; ++m) {
        for (int n = 0; n <= 30; ++n) {
            const double integral =
                oracle::integrate([&](double x) { return spde::shifted_legendre(m, x) * spde::shifted_legendre(n, x); });
            const double expected = m == n ? 1.0 / (2.0 * m + 1.0) : 0.0;
            CHECK(std::abs(integral - expected) < 1e-12);
        }
    }
}

TEST_CASE("synthesize") {
    const BasisSet basis(10, gauss_lobatto_rule(18));
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(9);
    CHECK(basis.synthesize(zero, 1).isZero(0.0));

    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(9);
    e0[0] = 1.0;
    const Eigen::MatrixXd values = basis.synthesize(e0, 1);
    for (Eigen::Index i = 0; i < basis.rule().size(); ++i) {
        CHECK(values(i, 0) == doctest::Approx(oracle::phi(0, basis.rule().nodes[i])).epsilon(1e-14));
    }

    CHECK_THROWS_AS(basis.synthesize(Eigen::VectorXd::Zero(8), 1), std::invalid_argument);
    CHECK_THROWS_AS(basis.synthesize(Eigen::MatrixXd::Zero(9, 8), 2), std::invalid_argument);
}

TEST_CASE("2-d synthesis is the tensor product") {
    const BasisSet basis(6, gauss_lobatto_rule(14));
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(5, 5);
    coeffs(1, 3) = 2.0;
    const Eigen::MatrixXd values = basis.synthesize(coeffs, 2);
    const auto& x = basis.rule().nodes;
    for (Eigen::Index i = 0; i < x.size(); i += 3) {
        for (Eigen::Index j = 0; j < x.size(); j += 2) {
            CHECK(values(i, j) == doctest::Approx(2.0 * oracle::phi(1, x[i]) * oracle::phi(3, x[j])).scale(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("synthesize then analyze recovers basis coefficients") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    const int n = 14;
    const BasisSet basis(n, gauss_lobatto_rule(n + 8));
    Eigen::VectorXd c(n - 1);
    for (auto& e : c) e = normal(rng);
    const Eigen::MatrixXd h = spde::analyze(basis.synthesize(c, 1), basis.rule(), 1);
    // h_m = k_m c_m - k_{m-2} c_{m-2} with k_m = 1 / (2 sqrt(4m+6)); unwind it.
    auto k = [](int m) { return 1.0 / (2.0 * std::sqrt(4.0 * m + 6.0)); };
    Eigen::VectorXd back(n - 1);
    for (int m = 0; m < n - 1; ++m) back[m] = (h(m, 0) + (m >= 2 ? k(m - 2) * back[m - 2] : 0.0)) / k(m);
    CHECK((back - c).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index j = n + 1; j < h.rows(); ++j) CHECK(std::abs(h(j, 0)) < 1e-13);
}

TEST_CASE("analyze: constants and single Legendre modes") {
    const auto rule = gauss_lobatto_rule(6);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rule.size());
    const Eigen::MatrixXd h = spde::analyze(ones, rule, 1);
    CHECK(std::abs(h(0, 0) - 1.0) < 1e-13);
    for (Eigen::Index n = 1; n < h.rows(); ++n) CHECK(std::abs(h(n, 0)) < 1e-13);

    for (int np : {3, 6, 11}) {
        const auto r = gauss_lobatto_rule(np);
        Eigen::VectorXd l2(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) l2[i] = oracle::legendre01(2, r.nodes[i]);
        const Eigen::MatrixXd c = spde::analyze(l2, r, 1);
        for (Eigen::Index n = 0; n < c.rows(); ++n) CHECK(std::abs(c(n, 0) - (n == 2 ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("analyze: x^3 on four nodes matches a direct change of basis") {
    const auto rule = gauss_lobatto_rule(3);
    // Oracle: solve sum_n h_n L_n(t_k) = t_k^3 at four distinct points.
    Eigen::Matrix4d vander;
    Eigen::Vector4d rhs;
    const double pts[4] = {0.1, 0.35, 0.6, 0.95};
    for (int k = 0; k < 4; ++k) {
        for (int n = 0; n < 4; ++n) vander(k, n) = oracle::legendre01(n, pts[k]);
        rhs[k] = pts[k] * pts[k] * pts[k];
    }
    const Eigen::Vector4d expected = vander.fullPivLu().solve(rhs);
    Eigen::VectorXd values(4);
    for (int i = 0; i < 4; ++i) values[i] = std::pow(rule.nodes[i], 3);
    const Eigen::MatrixXd h = spde::analyze(values, rule, 1);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(h(n, 0) - expected[n]) < 1e-13);
    CHECK(expected[3] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("analyze round trip on polynomials of degree <= Np") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int np : {4, 9, 20, 40}) {
        const auto rule = gauss_lobatto_rule(np);
        Eigen::VectorXd coeffs(np + 1);
        for (auto& c : coeffs) c = normal(rng);
        Eigen::VectorXd values(rule.size());
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            double v = 0.0;
            for (int n = 0; n <= np; ++n) v += coeffs[n] * oracle::legendre01(n, rule.nodes[i]);
            values[i] = v;
        }
        const Eigen::MatrixXd h = spde::analyze(values, rule, 1);
        CHECK((h.col(0) - coeffs).cwiseAbs().maxCoeff() < 1e-11);

        // Lift back to nodes.
        Eigen::VectorXd lifted = Eigen::VectorXd::Zero(rule.size());
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            for (int n = 0; n <= np; ++n) lifted[i] += h(n, 0) * spde::shifted_legendre(n, rule.nodes[i]);
        }
        CHECK((lifted - values).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("load vector") {
    const int n = 12;
    const BasisSet basis(n, gauss_lobatto_rule(n + 8));
    const auto& x = basis.rule().nodes;

    CHECK(basis.load_vector(Eigen::VectorXd::Zero(x.size()), 1).isZero(0.0));

    Eigen::VectorXd phi0(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) phi0[i] = oracle::phi(0, x[i]);
    const Eigen::MatrixXd load = basis.load_vector(phi0, 1);
    for (int m = 0; m < n - 1; ++m) {
        const double bm0 = oracle::integrate([&](double s) { return oracle::phi(m, s) * oracle::phi(0, s); });
        CHECK(std::abs(load(m, 0) - bm0) < 1e-14);
    }
}

TEST_CASE("load vector of L_5 with a small cutoff") {
    const int n = 4;  // modes 0..2
    const BasisSet basis(n, gauss_lobatto_rule(n + 8));
    const auto& x = basis.rule().nodes;
    Eigen::VectorXd l5(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) l5[i] = oracle::legendre01(5, x[i]);
    const Eigen::MatrixXd load = basis.load_vector(l5, 1);
    for (int m = 0; m <= 2; ++m) {
        const double expected = oracle::integrate([&](double s) { return oracle::legendre01(5, s) * oracle::phi(m, s); });
        CHECK(std::abs(load(m, 0) - expected) < 1e-12);
    }
}

TEST_CASE("load vector equals direct Lobatto quadrature of the interpolant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    const int n = 16;
    const BasisSet basis(n, gauss_lobatto_rule(n + 8));
    Eigen::VectorXd v(basis.rule().size());
    for (auto& e : v) e = normal(rng);
    const Eigen::MatrixXd load = basis.load_vector(v, 1);
    const Eigen::VectorXd direct =
        basis.values_at_nodes().transpose() * basis.rule().weights.cwiseProduct(v);
    CHECK((load.col(0) - direct).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("2-d load of a separable field is the outer product of 1-d loads") {
    const BasisSet basis(8, gauss_lobatto_rule(16));
    const auto& x = basis.rule().nodes;
    Eigen::VectorXd fx(x.size()), gy(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        fx[i] = std::cos(2.0 * x[i]);
        gy[i] = x[i] * x[i] + 1.0;
    }
    const Eigen::MatrixXd field = fx * gy.transpose();
    const Eigen::MatrixXd load2 = basis.load_vector(field, 2);
    const Eigen::MatrixXd expected = basis.load_vector(fx, 1) * basis.load_vector(gy, 1).transpose();
    CHECK((load2 - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("load vector rejects an under-resolved rule") {
    const BasisSet basis(10, gauss_lobatto_rule(10));
    CHECK_THROWS_AS(basis.load_vector(Eigen::VectorXd::Zero(11), 1), std::invalid_argument);
    CHECK_THROWS_AS(BasisSet(2, gauss_lobatto_rule(5)), std::invalid_argument);
}

}
