#pragma once

#include <intreg/design.hpp>
#include <intreg/error.hpp>
#include <intreg/interval.hpp>
#include <intreg/lasso.hpp>
#include <intreg/lcp.hpp>
#include <intreg/ls_fit.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace intreg {

/// Lasso-IR estimate. Spread coefficients are a_m + a_a, and the additive
/// part a_a lives in the L1 ball of radius t. Nothing forces the fitted
/// spread part below the observed spreads, so Hukuhara residuals may fail
/// to exist; the flags report it.
struct LassoIrFit {
    Vector a_m;
    Vector a_a;
    double t = 0.0;
    double objective = 0.0;
    bool fitted_spr_nonneg = true;
    bool hukuhara_residuals_exist = true;
    FitResult fit;

    Vector spread_coefficients() const { return a_m + a_a; }
};

namespace detail {

constexpr Eigen::Index max_lasso_ir_dim = 12;

inline double lasso_ir_objective(const DesignSystem& d, const Vector& am, const Vector& aa, Tau tau)
{
    return tau.mid_weight() * (d.vm - d.Fm * am).squaredNorm() +
           tau.spr_weight() * (d.vs - d.Fs * (am + aa)).squaredNorm();
}

/// QP over z = (a_m, a_a). The budget sum|a_a| <= t is written as one row
/// s'a_a <= t per sign vector s; `budget` = nullopt drops it entirely.
inline Qp lasso_ir_problem(const DesignSystem& d, Tau tau, std::optional<double> budget)
{
    const auto p = d.block_size();
    const auto n = static_cast<Eigen::Index>(d.n());
    if (p > max_lasso_ir_dim)
        fail(ErrorCode::TooLarge, "Lasso-IR budget rows grow as 2^p; p = " + std::to_string(p));
    const Matrix Gm = d.Fm.transpose() * d.Fm;
    const Matrix Gs = d.Fs.transpose() * d.Fs;
    const Vector hm = d.Fm.transpose() * d.vm;
    const Vector hs = d.Fs.transpose() * d.vs;
    const double wm = tau.mid_weight(), ws = tau.spr_weight();

    Qp qp;
    qp.Q.resize(2 * p, 2 * p);
    qp.Q << 2.0 * (wm * Gm + ws * Gs), 2.0 * ws * Gs, 2.0 * ws * Gs, 2.0 * ws * Gs;
    qp.c.resize(2 * p);
    qp.c << -2.0 * (wm * hm + ws * hs), -2.0 * ws * hs;

    const Eigen::Index rows = budget ? n + (Eigen::Index{1} << p) : n;
    qp.R = Matrix::Zero(rows, 2 * p);
    qp.r = Vector::Zero(rows);
    qp.R.leftCols(p).topRows(n) = d.spread_rows;
    qp.R.rightCols(p).topRows(n) = d.spread_rows;
    if (budget) {
        for (Eigen::Index s = 0; s < (Eigen::Index{1} << p); ++s) {
            for (Eigen::Index i = 0; i < p; ++i)
                qp.R(n + s, p + i) = ((s >> i) & 1) ? -1.0 : 1.0;
            qp.r(n + s) = -*budget;
        }
    }
    return qp;
}

/// t = 0 pins a_a to zero; solve over a_m alone.
inline Vector lasso_ir_zero_budget(const DesignSystem& d, Tau tau, int& pivots)
{
    const double wm = tau.mid_weight(), ws = tau.spr_weight();
    Qp qp;
    qp.Q = 2.0 * (wm * d.Fm.transpose() * d.Fm + ws * d.Fs.transpose() * d.Fs);
    qp.c = -2.0 * (wm * d.Fm.transpose() * d.vm + ws * d.Fs.transpose() * d.vs);
    qp.R = d.spread_rows;
    qp.r = Vector::Zero(qp.R.rows());
    const auto sol = solve_qp(qp);
    pivots = sol.pivots;
    return sol.z;
}

} // namespace detail

/// Fit Lasso-IR on a Model M design at budget t.
inline LassoIrFit fit_lasso_ir(const DesignSystem& d, Tau tau, double t,
                               MseConvention convention = MseConvention::DTau)
{
    if (d.variant != ModelVariant::ModelM)
        fail(ErrorCode::InvalidArgument, "Lasso-IR pairs mid and spread coefficients one-to-one and "
                                         "needs a model-m design");
    if (!(t >= 0.0))
        fail(ErrorCode::InvalidArgument, "budget t must be nonnegative");
    const auto p = d.block_size();

    LassoIrFit out;
    out.t = t;
    int pivots = 0;
    if (t == 0.0) {
        out.a_m = detail::lasso_ir_zero_budget(d, tau, pivots);
        out.a_a = Vector::Zero(p);
    } else {
        const Qp qp = detail::lasso_ir_problem(d, tau, std::isfinite(t) ? std::optional<double>(t) : std::nullopt);
        const auto sol = solve_qp(qp);
        pivots = sol.pivots;
        out.a_m = sol.z.head(p);
        out.a_a = sol.z.tail(p);
        out.fit.diagnostics["ridge"] = sol.ridge;
        out.fit.diagnostics["stationarity"] = sol.stationarity;
    }
    out.objective = detail::lasso_ir_objective(d, out.a_m, out.a_a, tau);

    FitResult& fit = out.fit;
    fit.method = Method::LassoIR;
    fit.variant = d.variant;
    fit.tau = tau.value();
    fit.mse_convention = convention;
    fit.t_budget = t;
    fit.coefficients = coefficients_from_blocks(d, out.a_m, out.spread_coefficients());

    // Intercept as in the LS fit, except the spread difference may be negative here.
    const RawInterval mean_part = mean_linear_part(d, fit.coefficients);
    const double delta_spr = d.meanY.spr() - mean_part.spr;
    const double tol = 1e-9 * std::max(1.0, d.sprY.cwiseAbs().maxCoeff());
    fit.coefficients.delta = Interval(d.meanY.mid() - mean_part.mid, std::max(0.0, delta_spr));

    const Vector spread_part = d.spread_rows * out.spread_coefficients();
    out.fitted_spr_nonneg = (spread_part.array() + delta_spr).minCoeff() >= -tol;
    out.hukuhara_residuals_exist = delta_spr >= -tol && (spread_part - d.sprY).maxCoeff() <= tol;

    fit.diagnostics["pivots"] = pivots;
    fit.diagnostics["objective"] = out.objective;
    fit.diagnostics["l1_additive"] = out.a_a.cwiseAbs().sum();
    fit.diagnostics["intercept_spr_raw"] = delta_spr;
    fit.diagnostics["fitted_spr_nonneg"] = out.fitted_spr_nonneg ? 1.0 : 0.0;
    fit.diagnostics["hukuhara_residuals_exist"] = out.hukuhara_residuals_exist ? 1.0 : 0.0;
    detail::finish_fit(d, fit, tau);
    return out;
}

/// Default budget grid: t = 0 followed by `count` log-spaced values up to the
/// L1 norm of a_a in the unbudgeted fit.
inline std::vector<double> budget_grid(const DesignSystem& d, Tau tau, int count = 20, double ratio = 1e-3)
{
    const auto unbounded = fit_lasso_ir(d, tau, std::numeric_limits<double>::infinity());
    const double top = unbounded.a_a.cwiseAbs().sum();
    std::vector<double> grid{0.0};
    if (!(top > 0.0) || count < 1) return grid;
    for (int i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(count - 1 - i) / (count - 1);
        grid.push_back(top * std::exp(std::log(ratio) * frac));
    }
    return grid;
}

/// Budget minimizing the K-fold CV mean squared d_tau error; ties go to the
/// earlier grid entry.
inline double select_budget(const IntervalSample& s, Tau tau, const std::vector<double>& grid, int folds,
                            std::uint64_t seed, std::vector<double>* cv_mean = nullptr)
{
    if (grid.empty())
        fail(ErrorCode::InvalidArgument, "empty budget grid");
    if (grid.size() == 1) {
        if (cv_mean) cv_mean->assign(1, 0.0);
        return grid.front();
    }
    const auto labels = assign_folds(s.n(), folds, seed);
    std::vector<double> mean(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        const auto split = fold_split(labels, f);
        const auto train = build_design(s.subset(split.train), ModelVariant::ModelM);
        const auto test = s.subset(split.test);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto fit = fit_lasso_ir(train, tau, grid[g]);
            std::vector<Interval> fitted;
            for (std::size_t j = 0; j < test.n(); ++j) fitted.push_back(predict(fit.fit.coefficients, test.row(j)));
            mean[g] += mean_squared_dtau(test.y(), fitted, tau) / folds;
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (mean[g] < mean[best]) best = g;
    if (cv_mean) *cv_mean = mean;
    return grid[best];
}

} // namespace intreg
