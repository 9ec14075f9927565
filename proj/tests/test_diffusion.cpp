#include "cgame/diffusion.hpp"
#include "cgame/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace cgame {
namespace {

using oracle::example_params;

class DiffusionTest : public ::testing::Test {
protected:
    ModelParams p = example_params();
    GbmModel m{p};
};

TEST_F(DiffusionTest, FundamentalPairMatchesQuadraticRoots) {
    const auto g = fundamental_pair(p);
    EXPECT_NEAR(g.gamma_minus, -1.7103, 1e-4);
    EXPECT_NEAR(g.gamma_plus, 18.7103, 1e-4);
    EXPECT_NEAR(g.gamma_plus * g.gamma_minus, -2.0 * p.r / (p.sigma * p.sigma), 1e-10);
    for (double gm : {g.gamma_minus, g.gamma_plus}) {
        const double residual = 0.5 * p.sigma * p.sigma * gm * (gm - 1.0) + p.mu * gm - p.r;
        EXPECT_LT(std::abs(residual), 1e-10);
    }
    EXPECT_GT(g.gamma_plus, 1.0);
    EXPECT_LT(g.gamma_minus, 0.0);
    EXPECT_DOUBLE_EQ(m.phi(1.0), 1.0);
    EXPECT_DOUBLE_EQ(m.psi(1.0), 1.0);
}

TEST_F(DiffusionTest, InvalidParamsRejected) {
    auto bad = p;
    bad.mu = 0.0;
    EXPECT_THROW(fundamental_pair(bad), ParameterError);
    bad = p;
    bad.sigma = -1.0;
    EXPECT_THROW(GbmModel{bad}, ParameterError);
    bad = p;
    bad.alpha_profit = 1.0;
    EXPECT_THROW(GbmModel{bad}, ParameterError);
    bad = p;
    bad.k = 0.0;
    EXPECT_THROW(GbmModel{bad}, ParameterError);
    // delta(alpha) exceeding r makes the resolvent infinite; with mu < 0 and
    // alpha in (0,1) delta is negative, so build the failure through r instead.
    bad = p;
    bad.r = 0.0;
    EXPECT_THROW(GbmModel{bad}, ParameterError);
}

TEST_F(DiffusionTest, ResolventClosedForm) {
    EXPECT_DOUBLE_EQ(m.discount_gap(), 1.2578125);
    EXPECT_DOUBLE_EQ(m.resolvent(1.0), 1.0 / 1.2578125);
    EXPECT_NEAR(m.resolvent(0.148), 0.30586, 1e-5);
    EXPECT_THROW(m.resolvent(0.0), DomainError);
    EXPECT_THROW(m.resolvent(-1.0), DomainError);
    EXPECT_NEAR(m.dresolvent(0.3), oracle::d1([&](double x) { return m.resolvent(x); }, 0.3),
                1e-8);
}

TEST_F(DiffusionTest, GeneratorIdentities) {
    auto res = [&](double x) { return m.resolvent(x); };
    auto phi = [&](double x) { return m.phi(x); };
    for (double x : oracle::log_grid(1e-3, 10.0, 20)) {
        const double residual = oracle::generator_fd(p, res, x) + m.profit(x);
        EXPECT_LT(std::abs(residual) / m.profit(x), 1e-6) << "x = " << x;
    }
    for (double x : oracle::log_grid(1e-3, 10.0, 50)) {
        const double lhs = oracle::generator_fd(p, res, x) + m.profit(x);
        EXPECT_LT(std::abs(lhs) / m.profit(x), 1e-5) << "x = " << x;
        EXPECT_LT(std::abs(oracle::generator_fd(p, phi, x)) / (p.r * m.phi(x)), 1e-5) << "x = " << x;
    }
}

TEST_F(DiffusionTest, ScaleAndSpeed) {
    EXPECT_DOUBLE_EQ(m.scale_density(1.0), 1.0);
    EXPECT_NEAR(m.scale_density(0.5), std::pow(0.5, 16.0), 1e-15);
    EXPECT_NEAR(m.scale_density(2.0), 65536.0, 1e-9);
    double prev = 0.0;
    for (double x : oracle::log_grid(1e-2, 10.0, 100)) {
        EXPECT_GT(m.scale_density(x), prev);
        prev = m.scale_density(x);
        EXPECT_NEAR(m.speed_density(x) * p.sigma * p.sigma * x * x * m.scale_density(x), 2.0, 1e-12);
    }
    EXPECT_THROW(m.scale_density(0.0), DomainError);
}

TEST_F(DiffusionTest, RhoShape) {
    EXPECT_LT(std::abs(m.rho(1e-14)), 1e-6);
    EXPECT_NEAR(m.x_star_closed_form(), 1.0 / 9.0, 1e-14);
    int changes = 0;
    const auto grid = oracle::log_grid(1e-6, 100.0, 500);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if ((m.drho(grid[i - 1]) > 0.0) != (m.drho(grid[i]) > 0.0)) ++changes;
    }
    EXPECT_EQ(changes, 1);
}

TEST_F(DiffusionTest, IAndJClosedForms) {
    const double zs = m.z_star_closed_form();
    EXPECT_LT(std::abs(m.I(zs)), 1e-15);
    EXPECT_LT(std::abs(m.I(1e-12)), 1e-20);
    EXPECT_LT(std::abs(m.J(1e-12)), 1e-5);
    // I from its definition ((R)' - k) / phi'.
    for (double x : oracle::log_grid(1e-3, 1.0, 30)) {
        EXPECT_NEAR(m.I(x), (m.dresolvent(x) - p.k) / m.dphi(x), 1e-12 * (1.0 + std::abs(m.I(x))));
        EXPECT_NEAR(m.J(x), m.resolvent(x) - p.k * x - m.I(x) * m.phi(x), 1e-12);
    }
    // With alpha = 1/2 the first-order condition gives R(z*) = 2 k z*, so J(z*) = k z*.
    EXPECT_NEAR(m.J(zs), p.k * zs, 1e-12);
    EXPECT_NEAR(m.J(zs), 0.1580, 1e-4);
}

TEST_F(DiffusionTest, DerivativeAccessorsAgreeWithFiniteDifferences) {
    auto I = [&](double x) { return m.I(x); };
    auto J = [&](double x) { return m.J(x); };
    for (double x : oracle::log_grid(5e-3, 1.0, 40)) {
        const double scale = std::abs(m.dI(x)) + 1e-12;
        EXPECT_LT(std::abs(m.dI(x) - oracle::d1(I, x)) / scale, 1e-6) << "x = " << x;
        // J' = -I' phi.
        EXPECT_LT(std::abs(m.dJ(x) + m.dI(x) * m.phi(x)) / (std::abs(m.dJ(x)) + 1e-12), 1e-9);
        EXPECT_LT(std::abs(oracle::d1(J, x) + m.dI(x) * m.phi(x)) / (std::abs(m.dJ(x)) + 1e-12),
                  1e-6)
            << "x = " << x;
    }
}

TEST_F(DiffusionTest, CriticalPoints) {
    const auto cp = critical_points(m);
    EXPECT_NEAR(cp.z_star, 0.15802, 1e-5);
    const double z_bisect =
        oracle::bisection([&](double x) { return m.dresolvent(x) - p.k; }, 1e-4, 10.0);
    EXPECT_NEAR(cp.z_star, z_bisect, 1e-12);
    EXPECT_LT(cp.x_hat, cp.z_star);
    EXPECT_LT(cp.x_hat, cp.x_star);
    EXPECT_NEAR(cp.x_hat, m.x_hat_closed_form(), 1e-11);
    EXPECT_LT(m.dI(cp.x_hat * (1.0 - 1e-3)), 0.0);
    EXPECT_GT(m.dI(cp.x_hat * (1.0 + 1e-3)), 0.0);
    EXPECT_NEAR(cp.j_zstar, m.J(cp.z_star), 0.0);
    EXPECT_NEAR(-m.I(cp.x_hat), 2.95e-4, 0.02 * 2.95e-4);
}

TEST_F(DiffusionTest, EllSignsFollowIPrime) {
    const auto cp = critical_points(m);
    EXPECT_LT(std::abs(m.ell(cp.x_hat)), 1e-9 * std::abs(m.ell(cp.x_hat * 0.5)));
    for (double x : oracle::log_grid(1e-4, 10.0, 300)) {
        if (std::abs(x / cp.x_hat - 1.0) < 1e-9) continue;
        EXPECT_EQ(m.ell(x) > 0.0, m.dI(x) > 0.0);
        EXPECT_EQ(m.ell(x) < 0.0, x < cp.x_hat) << "x = " << x;
    }
}

TEST_F(DiffusionTest, IShapeAndSign) {
    const auto cp = critical_points(m);
    const auto below = oracle::log_grid(1e-4 * cp.x_hat, cp.x_hat, 200);
    for (std::size_t i = 1; i < below.size(); ++i) EXPECT_LT(m.I(below[i]), m.I(below[i - 1]));
    const auto above = oracle::log_grid(cp.x_hat, 50.0 * cp.x_hat, 200);
    for (std::size_t i = 1; i < above.size(); ++i) EXPECT_GT(m.I(above[i]), m.I(above[i - 1]));
    for (double x : oracle::log_grid(1e-4, 10.0, 200)) {
        if (std::abs(x / cp.z_star - 1.0) < 1e-9) continue;
        EXPECT_EQ(m.I(x) < 0.0, x < cp.z_star) << "x = " << x;
    }
}

TEST_F(DiffusionTest, ProfitScaleDoublesFlowTerms) {
    const GbmModel planner(p, 2.0);
    EXPECT_DOUBLE_EQ(planner.resolvent(0.3), 2.0 * m.resolvent(0.3));
    EXPECT_NEAR(planner.z_star_closed_form(), 4.0 * m.z_star_closed_form(), 1e-14);
    EXPECT_THROW(GbmModel(p, 0.0), ParameterError);
}

TEST(AssumptionReportTest, ExampleParametersPass) {
    const auto rep = check_assumptions(example_params(), 0.0165, 0.015);
    EXPECT_TRUE(rep.all_ok()) << ::testing::PrintToString(rep.failures());
    EXPECT_EQ(rep.z_star_sign_changes, 1);
    EXPECT_TRUE(rep.l_negative_at.has_value());
    EXPECT_LT(*rep.x2c, rep.z_star + 1e-15);
    EXPECT_NEAR(rep.j_zstar, 0.158, 1e-3);
    EXPECT_LT(0.015, rep.j_zstar);
}

TEST(AssumptionReportTest, CostAboveJzStarFlagged) {
    const GbmModel m(example_params());
    const double c = m.J(m.z_star_closed_form()) * 1.01;
    const auto rep = check_assumptions(example_params(), c, c);
    EXPECT_FALSE(rep.c2_in_range);
    EXPECT_FALSE(rep.all_ok());
    ASSERT_FALSE(rep.failures().empty());
}

TEST(AssumptionReportTest, InvalidInputsThrow) {
    auto p = example_params();
    p.mu = 0.1;
    EXPECT_THROW(check_assumptions(p, 0.02, 0.015), ParameterError);
    EXPECT_THROW(check_assumptions(example_params(), 0.01, 0.015), ParameterError);
}

}  // namespace
}  // namespace cgame
