#include "spde/dynamics.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace spde;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("reaction evaluation") {
    const auto ac = ReactionSpec::allen_cahn();
    CHECK(f_eval(ac, scalar(2.0))(0, 0) == -6.0);
    CHECK(f_eval(ac, scalar(0.0))(0, 0) == 0.0);
    CHECK(f_eval(ReactionSpec::none(), scalar(3.0))(0, 0) == 0.0);
    CHECK(ac.degree() == 3);
    CHECK(ReactionSpec::none().is_zero());
    CHECK(ReactionSpec{{0.0, 0.0, 0.0}}.is_zero());

    const auto rule = gauss_lobatto_rule(40);
    Eigen::MatrixXd u(rule.size(), 1);
    for (Eigen::Index i = 0; i < rule.size(); ++i) u(i, 0) = std::sin(std::numbers::pi * rule.nodes[i]);
    const Eigen::MatrixXd f = f_eval(ac, u);
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        const double s = std::sin(std::numbers::pi * rule.nodes[i]);
        CHECK(std::abs(f(i, 0) - (s - s * s * s)) <= 1e-13);
    }
}

TEST_CASE("Horner agrees with naive evaluation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), arg(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = 1 + 2 * static_cast<int>(trial % 5);  // odd degrees up to 9
        ReactionSpec spec;
        for (int j = 0; j <= p; ++j) spec.coefficients.push_back(coef(rng));
        spec.coefficients.back() = -std::abs(spec.coefficients.back()) - 0.1;
        const double v = arg(rng);
        double naive = 0.0, scale = 0.0;
        for (int j = 0; j <= p; ++j) {
            const double term = spec.coefficients[static_cast<std::size_t>(j)] * std::pow(v, j);
            naive += term;
            scale += std::abs(term);
        }
        CHECK(std::abs(f_eval(spec, scalar(v))(0, 0) - naive) <= 1e-12 * scale);
    }
}

TEST_CASE("diffusion catalog") {
    const Eigen::MatrixXd u = (Eigen::MatrixXd(2, 2) << 0.3, -1.0, 7.0, 0.0).finished();
    CHECK((g_eval(DiffusionSpec::additive(), u).array() == 1.0).all());
    const DiffusionSpec rational{DiffusionKind::rational, 1.0};
    CHECK(g_eval(rational, scalar(0.0))(0, 0) == 1.0);
    CHECK(g_eval(rational, scalar(1.0))(0, 0) == 0.0);
    CHECK(g_eval(DiffusionSpec{DiffusionKind::sine, 1.0}, scalar(std::numbers::pi / 2))(0, 0) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_eval(DiffusionSpec{DiffusionKind::linear, 0.5}, u)(1, 0) == 3.5);
    CHECK(g_eval(DiffusionSpec::zero(), u).isZero(0.0));
    CHECK(DiffusionSpec::zero().is_zero());
    CHECK_FALSE(DiffusionSpec::additive().is_zero());
    CHECK(to_string(DiffusionSpec{DiffusionKind::linear, 0.5}) == "linear:0.5");
    CHECK(to_string(rational) == "rational");
}

TEST_CASE("Lipschitz constants bound finite differences") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> arg(-20.0, 20.0);
    for (const DiffusionSpec spec : {DiffusionSpec::additive(), DiffusionSpec{DiffusionKind::linear, -2.0},
                                     DiffusionSpec{DiffusionKind::sine, 1.0},
                                     DiffusionSpec{DiffusionKind::rational, 1.0}}) {
        const double c = spec.lipschitz_constant();
        for (int trial = 0; trial < 500; ++trial) {
            const double a = arg(rng), b = arg(rng);
            const double ga = g_eval(spec, scalar(a))(0, 0), gb = g_eval(spec, scalar(b))(0, 0);
            CHECK(std::abs(ga - gb) <= c * std::abs(a - b) * (1.0 + 1e-12));
        }
    }
    // The rational kind's bound is attained near u = 1/sqrt(3).
    const double u0 = 1.0 / std::sqrt(3.0), h = 1e-6;
    const DiffusionSpec rational{DiffusionKind::rational, 1.0};
    const double slope = (g_eval(rational, scalar(u0 + h))(0, 0) - g_eval(rational, scalar(u0 - h))(0, 0)) / (2 * h);
    CHECK(std::abs(slope) == doctest::Approx(rational.lipschitz_constant()).epsilon(1e-8));
}

TEST_CASE("reaction validation") {
    CHECK_FALSE(validate_reaction(ReactionSpec::allen_cahn()).has_value());
    CHECK_FALSE(validate_reaction(ReactionSpec::none()).has_value());
    CHECK_FALSE(validate_reaction(ReactionSpec{{1.0, -2.0, 0.5, 0.0, 0.0, -0.1}}).has_value());

    const auto even = validate_reaction(ReactionSpec{{0.0, 0.0, 1.0}});
    REQUIRE(even.has_value());
    CHECK(*even == "reaction polynomial must have odd degree, got degree 2");

    const auto positive = validate_reaction(ReactionSpec{{0.0, 1.0, 0.0, 1.0}});
    REQUIRE(positive.has_value());
    CHECK(positive->find("negative leading coefficient") != std::string::npos);

    // Trailing zeros do not count toward the degree.
    CHECK(validate_reaction(ReactionSpec{{0.0, 1.0, 0.0, 0.0}}).has_value());
    CHECK(validate_reaction(ReactionSpec{{0.0, -1.0, 0.0, 0.0}}) == std::nullopt);
    CHECK(validate_reaction(ReactionSpec{{std::numeric_limits<double>::quiet_NaN(), -1.0}}).has_value());
}

TEST_CASE("coercivity constant") {
    CHECK(coercivity_constant(ReactionSpec::allen_cahn()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coercivity_constant(ReactionSpec::none()) == 0.0);
    CHECK(coercivity_constant(ReactionSpec{{0.0, -3.0}}) == 0.0);
    CHECK(coercivity_constant(ReactionSpec{{2.0, 1.0, 0.0, -1.0}}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("l2 norm") {
    const auto rule = gauss_lobatto_rule(32);
    CHECK(l2_norm(Eigen::MatrixXd::Zero(rule.size(), 1), rule, 1) == 0.0);
    CHECK(l2_norm(Eigen::MatrixXd::Ones(rule.size(), 1), rule, 1) == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::MatrixXd s(rule.size(), 1);
    for (Eigen::Index i = 0; i < rule.size(); ++i) s(i, 0) = std::sin(std::numbers::pi * rule.nodes[i]);
    CHECK(std::abs(l2_norm(s, rule, 1) - 1.0 / std::sqrt(2.0)) <= 1e-10);
    CHECK(l2_norm(-3.0 * s, rule, 1) == doctest::Approx(3.0 * l2_norm(s, rule, 1)).epsilon(1e-15));

    // Tensor rule in 2-d: ||sin(pi x) sin(pi y)|| = 1/2.
    const Eigen::MatrixXd s2 = s * s.transpose();
    CHECK(std::abs(l2_norm(s2, rule, 2) - 0.5) <= 1e-10);
    CHECK(l2_norm(Eigen::MatrixXd::Ones(rule.size(), rule.size()), rule, 2) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("taming factor") {
    CHECK(taming_factor(0.1, 0.0) == 1.0);
    CHECK(taming_factor(0.01, 1e4) == doctest::Approx(1.0 / 101.0).epsilon(1e-15));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lt(-8.0, 1.0), lx(-6.0, 8.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const double tau = std::pow(10.0, lt(rng));
        const double x = std::pow(10.0, lx(rng));
        const double factor = taming_factor(tau, x * x);
        CHECK(factor > 0.0);
        CHECK(factor <= 1.0);
        CHECK(tau * x * factor <= 0.5 * std::sqrt(tau) * (1.0 + 1e-12));
    }
}

}
