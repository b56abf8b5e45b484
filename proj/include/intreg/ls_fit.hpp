#pragma once

#include <intreg/design.hpp>
#include <intreg/error.hpp>
#include <intreg/interval.hpp>
#include <intreg/lcp.hpp>

#include <Eigen/Dense>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace intreg {

enum class Method { LS, Lasso, LassoIR };

constexpr std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::LS: return "ls";
    case Method::Lasso: return "lasso";
    case Method::LassoIR: return "lasso-ir";
    }
    return "ls";
}

/// How the reported MSE weighs mid and spread errors.
enum class MseConvention { DTau, Unweighted };

constexpr std::string_view to_string(MseConvention m) noexcept
{
    return m == MseConvention::DTau ? "dtau" : "unweighted";
}

struct FitResult {
    Coefficients coefficients;
    Method method = Method::LS;
    ModelVariant variant = ModelVariant::Full;
    double tau = 0.5;
    MseConvention mse_convention = MseConvention::DTau;
    double lambda_mid = 0.0;
    double lambda_spr = 0.0;
    double t_budget = 0.0;
    std::vector<Interval> fitted;
    double mse = 0.0;
    std::map<std::string, double> diagnostics;
};

/// (1/n) sum_j d_tau^2(y_j, yhat_j), or the unweighted mid^2 + spr^2 form.
inline double mean_squared_dtau(std::span<const Interval> y, std::span<const Interval> y_hat, Tau tau,
                                MseConvention convention = MseConvention::DTau)
{
    if (y.size() != y_hat.size())
        fail(ErrorCode::LengthMismatch, "observed and fitted sequences differ in length");
    if (y.empty())
        fail(ErrorCode::EmptySample, "mean squared error of an empty sample");
    double acc = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (convention == MseConvention::DTau) {
            acc += d_tau_squared(y[j], y_hat[j], tau);
        } else {
            const double dm = y[j].mid() - y_hat[j].mid();
            const double ds = y[j].spr() - y_hat[j].spr();
            acc += dm * dm + ds * ds;
        }
    }
    return acc / static_cast<double>(y.size());
}

/// Regressor row j of the design as intervals.
inline std::vector<Interval> design_row(const DesignSystem& d, std::size_t j)
{
    std::vector<Interval> row;
    row.reserve(d.k);
    const auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d.k); ++i)
        row.emplace_back(d.midX(jj, i), d.sprX(jj, i));
    return row;
}

/// Mean over the sample of the non-intercept part X^ebl B.
inline RawInterval mean_linear_part(const DesignSystem& d, const Coefficients& c)
{
    RawInterval m;
    m.mid = d.midX.colwise().mean().dot(c.b1) + d.sprX.colwise().mean().dot(c.b4);
    m.spr = d.sprX.colwise().mean().dot(c.b2) + d.absMidX.colwise().mean().dot(c.b3);
    return m;
}

/// Intercept as the Hukuhara difference between the mean response and the
/// mean fitted part.
inline Interval estimate_intercept(const DesignSystem& d, const Coefficients& c)
{
    const RawInterval part = mean_linear_part(d, c);
    if (part.spr < -1e-12 * std::max(1.0, d.meanY.spr()))
        fail(ErrorCode::NotHukuharaDecomposable, "mean fitted spread is negative");
    return hukuhara_diff(d.meanY, Interval(part.mid, std::max(0.0, part.spr)));
}

namespace detail {

inline double block_objective(const DesignSystem& d, const Vector& a_mid, const Vector& a_spr, Tau tau)
{
    return tau.mid_weight() * (d.vm - d.Fm * a_mid).squaredNorm() +
           tau.spr_weight() * (d.vs - d.Fs * a_spr).squaredNorm();
}

/// Indices of spread-design columns that carry variation after centering.
inline std::vector<Eigen::Index> live_columns(const Matrix& F)
{
    std::vector<Eigen::Index> live;
    const Vector norms = F.colwise().norm().transpose();
    const double scale = norms.size() > 0 ? norms.maxCoeff() : 0.0;
    for (Eigen::Index c = 0; c < F.cols(); ++c)
        if (norms(c) > 1e-10 * std::max(1.0, scale)) live.push_back(c);
    return live;
}

/// Minimize 1/2 a'Ha + g'a over the spread feasibility set. Columns of Fs
/// without variation do not enter the objective and are pinned at zero,
/// which is always feasible because the spread rows are nonnegative.
inline Vector solve_spread_block(const DesignSystem& d, const Matrix& H, const Vector& g,
                                 std::map<std::string, double>& diag)
{
    const auto p = d.block_size();
    const auto live = live_columns(d.Fs);
    Vector a = Vector::Zero(p);
    diag["spr_dropped_columns"] = static_cast<double>(p - static_cast<Eigen::Index>(live.size()));
    diag["spr_pivots"] = 0.0;
    diag["spr_ridge"] = 0.0;
    diag["spr_stationarity"] = 0.0;
    if (live.empty())
        return a;

    const auto m = static_cast<Eigen::Index>(live.size());
    const auto n = static_cast<Eigen::Index>(d.n());
    Qp qp;
    qp.Q.resize(m, m);
    qp.c.resize(m);
    qp.R.resize(m + n, m);
    qp.R.setZero();
    qp.r = Vector::Zero(m + n);
    for (Eigen::Index a_i = 0; a_i < m; ++a_i) {
        const auto ci = live[static_cast<std::size_t>(a_i)];
        qp.c(a_i) = g(ci);
        for (Eigen::Index b_i = 0; b_i < m; ++b_i)
            qp.Q(a_i, b_i) = H(ci, live[static_cast<std::size_t>(b_i)]);
        qp.R(a_i, a_i) = 1.0;
        qp.R.col(a_i).tail(n) = -d.spread_rows.col(ci);
    }
    qp.r.tail(n) = -d.sprY;

    const QpSolution sol = solve_qp(qp);
    for (Eigen::Index a_i = 0; a_i < m; ++a_i)
        a(live[static_cast<std::size_t>(a_i)]) = sol.z(a_i);
    diag["spr_pivots"] = sol.pivots;
    diag["spr_ridge"] = sol.ridge;
    diag["spr_stationarity"] = sol.stationarity;
    diag["spr_infeasibility"] = sol.infeasibility;
    return a;
}

/// Minimum-norm least squares for the mid block.
inline Vector solve_mid_ols(const DesignSystem& d, std::map<std::string, double>& diag)
{
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(d.Fm);
    cod.setThreshold(1e-10);
    diag["mid_rank"] = static_cast<double>(cod.rank());
    diag["degenerate_design"] = cod.rank() < d.Fm.cols() ? 1.0 : 0.0;
    return cod.solve(d.vm);
}

inline void finish_fit(const DesignSystem& d, FitResult& fit, Tau tau)
{
    fit.fitted.clear();
    fit.fitted.reserve(d.n());
    std::vector<Interval> y;
    y.reserve(d.n());
    for (std::size_t j = 0; j < d.n(); ++j) {
        const auto row = design_row(d, j);
        fit.fitted.push_back(predict(fit.coefficients, row));
        const auto jj = static_cast<Eigen::Index>(j);
        y.emplace_back(d.midY(jj), d.sprY(jj));
    }
    fit.mse = mean_squared_dtau(y, fit.fitted, tau, fit.mse_convention);
}

} // namespace detail

/// Least-squares fit: OLS for the mid block, the constrained spread QP
/// (through its LCP) for the spread block, then the Hukuhara intercept.
inline FitResult fit_ls(const DesignSystem& d, Tau tau, MseConvention convention = MseConvention::DTau)
{
    FitResult fit;
    fit.method = Method::LS;
    fit.variant = d.variant;
    fit.tau = tau.value();
    fit.mse_convention = convention;

    const Vector a_mid = detail::solve_mid_ols(d, fit.diagnostics);
    const Matrix H = 2.0 * tau.spr_weight() * d.Fs.transpose() * d.Fs;
    const Vector g = -2.0 * tau.spr_weight() * d.Fs.transpose() * d.vs;
    const Vector a_spr = detail::solve_spread_block(d, H, g, fit.diagnostics);

    fit.diagnostics["objective"] = detail::block_objective(d, a_mid, a_spr, tau);
    fit.coefficients = coefficients_from_blocks(d, a_mid, a_spr);
    fit.coefficients.delta = estimate_intercept(d, fit.coefficients);
    detail::finish_fit(d, fit, tau);
    return fit;
}

} // namespace intreg
