#include <intreg/lasso_ir.hpp>
#include <intreg/ls_fit.hpp>
#include <intreg/oracle.hpp>

#include <gtest/gtest.h>

using namespace intreg;

namespace {

Coefficients model_m_truth(double b1a, double b1b, double b2a, double b2b)
{
    auto c = Coefficients::zero(2);
    c.b1 << b1a, b1b;
    c.b2 << b2a, b2b;
    return c;
}

// Mid slope far above the spread slope: pulling spread coefficients toward
// the mid ones inflates fitted spreads past the observed ones.
IntervalSample adversarial_sample()
{
    Rng rng(8);
    std::vector<Interval> x, y;
    for (int j = 0; j < 30; ++j) {
        const Interval xi(rng.uniform(-5, 5), rng.uniform(0.5, 3));
        x.push_back(xi);
        y.emplace_back(3.0 * xi.mid() + rng.uniform(-0.1, 0.1), 0.2 * xi.spr() + rng.uniform(0, 0.1));
    }
    return IntervalSample(y, x, 1);
}

} // namespace

TEST(LassoIr, ZeroBudgetTiesSpreadToMid)
{
    const auto s = oracle::simulate(30, 2, model_m_truth(1.0, 0.5, 0.3, 0.8), 2.0, 1);
    const auto d = build_design(s, ModelVariant::ModelM);
    const auto fit = fit_lasso_ir(d, Tau(), 0.0);
    EXPECT_EQ(fit.a_a, Vector::Zero(2));
    EXPECT_EQ(fit.fit.coefficients.b2, fit.fit.coefficients.b1);
    EXPECT_EQ(fit.fit.coefficients.b3, Vector::Zero(2));
    EXPECT_EQ(fit.fit.coefficients.b4, Vector::Zero(2));
}

TEST(LassoIr, BudgetRespectedAndObjectiveMonotone)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = oracle::simulate(40, 2, model_m_truth(1.0, -0.5, 0.3, 0.8), 2.0, seed);
        const auto d = build_design(s, ModelVariant::ModelM);
        const Tau tau(0.5);
        const auto grid = budget_grid(d, tau, 19);
        ASSERT_EQ(grid.size(), 20u);
        double prev = std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const auto fit = fit_lasso_ir(d, tau, t);
            EXPECT_LE(fit.a_a.cwiseAbs().sum(), t + 1e-8);
            EXPECT_LE(fit.objective, prev + 1e-8 * std::max(1.0, prev == INFINITY ? 1.0 : prev));
            prev = fit.objective;
            // Nonnegative fitted spread part on every row.
            EXPECT_GE((d.spread_rows * fit.spread_coefficients()).minCoeff(), -1e-8);
        }
    }
}

TEST(LassoIr, MatchesBruteForceQp)
{
    Rng seeds(29);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = oracle::simulate(6, 2, model_m_truth(1.0, -0.5, 0.3, 0.8), 3.0, seeds.index(1u << 30));
        const auto d = build_design(s, ModelVariant::ModelM);
        const double t = seeds.uniform(0.01, 1.0);
        const auto fit = fit_lasso_ir(d, Tau(0.5), t);
        const auto qp = oracle::lasso_ir_qp(d, 0.5, t);
        const auto ref = oracle::brute_force_qp(qp);
        ASSERT_TRUE(ref.feasible);
        // The QP objective omits the constant ||v||^2 terms.
        const double constant = 0.5 * d.vm.squaredNorm() + 0.5 * d.vs.squaredNorm();
        EXPECT_NEAR(fit.objective, ref.objective + constant, 1e-6 * std::max(1.0, fit.objective));
    }
}

TEST(LassoIr, AdversarialDataBreaksHukuharaResiduals)
{
    const auto d = build_design(adversarial_sample(), ModelVariant::ModelM);
    const auto fit = fit_lasso_ir(d, Tau(0.5), 0.0);
    EXPECT_FALSE(fit.hukuhara_residuals_exist);
    EXPECT_EQ(fit.fit.fitted.size(), d.n());

    // The LS fit on the same data keeps every residual well defined.
    const auto ls = fit_ls(d, Tau(0.5));
    EXPECT_LE(((d.spread_rows * spr_block(d, ls.coefficients)) - d.sprY).maxCoeff(), 1e-8);
}

TEST(LassoIr, RejectsFullDesign)
{
    const auto s = oracle::simulate(10, 1, Coefficients::zero(1), 1.0, 1);
    try {
        fit_lasso_ir(build_design(s, ModelVariant::Full), Tau(), 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(LassoIr, CannotMatchCrossEffects)
{
    auto truth = model_m_truth(1.0, -0.5, 0.3, 0.8);
    truth.b4 << 1.5, 0.0;
    truth.b3 << 0.0, 0.4;
    const auto s = oracle::simulate(59, 2, truth, 0.0, 4);
    const auto ls = fit_ls(build_design(s, ModelVariant::Full), Tau());
    const auto ir = fit_lasso_ir(build_design(s, ModelVariant::ModelM), Tau(), 1e3);
    EXPECT_NEAR(ls.mse, 0.0, 1e-12);
    EXPECT_GT(ir.fit.mse, ls.mse + 1e-3);
}

TEST(SelectBudget, SingletonAndDeterminism)
{
    const auto s = oracle::simulate(30, 2, model_m_truth(1.0, -0.5, 0.3, 0.8), 2.0, 6);
    EXPECT_EQ(select_budget(s, Tau(), {0.25}, 5, 1), 0.25);
    const std::vector<double> grid{0.0, 0.1, 0.5, 1.0, 2.0};
    EXPECT_EQ(select_budget(s, Tau(), grid, 5, 11), select_budget(s, Tau(), grid, 5, 11));
}

TEST(SelectBudget, PrefersLargeBudgetWhenSlopesDiffer)
{
    // Spread slopes differ strongly from mid slopes.
    const auto s = oracle::simulate(40, 2, model_m_truth(2.0, -1.5, 0.2, 0.1), 0.5, 7);
    EXPECT_EQ(select_budget(s, Tau(), {0.0, 50.0}, 5, 2), 50.0);
}
