#pragma once

#include <intreg/design.hpp>
#include <intreg/error.hpp>
#include <intreg/interval.hpp>
#include <intreg/ls_fit.hpp>
#include <intreg/random.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace intreg {

enum class Block { Mid, Spread };

enum class LambdaRule { MinMse, OneSe };

constexpr std::string_view to_string(LambdaRule r) noexcept
{
    return r == LambdaRule::MinMse ? "mse" : "1se";
}

namespace detail {

inline double soft_threshold(double x, double lambda) noexcept
{
    if (x > lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

/// Largest subgradient violation of 1/2||v - F a||^2 + lambda||a||_1 at a.
inline double lasso_kkt_violation(const Matrix& G, const Vector& h, const Vector& a, double lambda)
{
    const Vector grad = h - G * a; // F'(v - F a)
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a(j) == 0.0)
            worst = std::max(worst, std::abs(grad(j)) - lambda);
        else
            worst = std::max(worst, std::abs(grad(j) - lambda * (a(j) > 0 ? 1.0 : -1.0)));
    }
    return std::max(worst, 0.0);
}

/// Re-solve the stationarity equations on the current support and sign
/// pattern; keep the result when it is sign-consistent and improves KKT.
inline void polish_lasso(const Matrix& G, const Vector& h, Vector& a, double lambda)
{
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < a.size(); ++j)
        if (a(j) != 0.0) support.push_back(j);
    if (support.empty()) return;
    const auto s = static_cast<Eigen::Index>(support.size());
    Matrix Gs(s, s);
    Vector rhs(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto ji = support[static_cast<std::size_t>(i)];
        rhs(i) = h(ji) - lambda * (a(ji) > 0 ? 1.0 : -1.0);
        for (Eigen::Index k = 0; k < s; ++k) Gs(i, k) = G(ji, support[static_cast<std::size_t>(k)]);
    }
    Eigen::LDLT<Matrix> ldlt(Gs);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13) return;
    const Vector x = ldlt.solve(rhs);
    Vector candidate = a;
    for (Eigen::Index i = 0; i < s; ++i) {
        const auto ji = support[static_cast<std::size_t>(i)];
        if (x(i) * a(ji) <= 0.0) return;
        candidate(ji) = x(i);
    }
    if (lasso_kkt_violation(G, h, candidate, lambda) <= lasso_kkt_violation(G, h, a, lambda))
        a = candidate;
}

} // namespace detail

/// Cyclic coordinate descent for 1/2||vm - Fm a||^2 + lambda||a||_1,
/// finished by an exact solve on the detected support.
inline Vector fit_lasso_mid(const DesignSystem& d, double lambda, const Vector* warm_start = nullptr)
{
    if (!(lambda >= 0.0))
        fail(ErrorCode::InvalidArgument, "lambda must be nonnegative");
    const auto p = d.block_size();
    const Matrix G = d.Fm.transpose() * d.Fm;
    const Vector h = d.Fm.transpose() * d.vm;
    Vector a = warm_start && warm_start->size() == p ? *warm_start : Vector::Zero(p);
    const double gscale = std::max(1.0, G.diagonal().maxCoeff());

    Vector grad = h - G * a;
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double max_step = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double gjj = G(j, j);
            if (gjj <= 1e-14 * gscale) {
                a(j) = 0.0;
                continue;
            }
            const double old = a(j);
            const double updated = detail::soft_threshold(grad(j) + gjj * old, lambda) / gjj;
            const double step = updated - old;
            if (step != 0.0) {
                a(j) = updated;
                grad -= step * G.col(j);
                max_step = std::max(max_step, std::abs(step) * std::sqrt(gjj));
            }
        }
        if (max_step <= 1e-13 * std::max(1.0, std::sqrt(d.vm.squaredNorm())))
            break;
        if (sweep % 64 == 63)
            grad = h - G * a; // resynchronize against drift
    }
    detail::polish_lasso(G, h, a, lambda);
    return a;
}

inline double lasso_mid_objective(const DesignSystem& d, const Vector& a, double lambda)
{
    return 0.5 * (d.vm - d.Fm * a).squaredNorm() + lambda * a.cwiseAbs().sum();
}

inline double lasso_mid_kkt(const DesignSystem& d, const Vector& a, double lambda)
{
    return detail::lasso_kkt_violation(d.Fm.transpose() * d.Fm, d.Fm.transpose() * d.vm, a, lambda);
}

/// 1/2||vs - Fs a||^2 + lambda||a||_1 over the spread feasibility set. On
/// that set a >= 0, so the penalty is linear and the problem is a QP solved
/// through the LCP path.
inline Vector fit_lasso_spr(const DesignSystem& d, double lambda,
                            std::map<std::string, double>* diagnostics = nullptr)
{
    if (!(lambda >= 0.0))
        fail(ErrorCode::InvalidArgument, "lambda must be nonnegative");
    const auto p = d.block_size();
    const Matrix H = d.Fs.transpose() * d.Fs;
    const Vector g = (-d.Fs.transpose() * d.vs).array() + lambda;
    std::map<std::string, double> local;
    auto& diag = diagnostics ? *diagnostics : local;
    // Zero is feasible; it is optimal whenever the gradient there is >= 0.
    if (g.minCoeff() >= 0.0) {
        diag["spr_pivots"] = 0.0;
        return Vector::Zero(p);
    }
    return detail::solve_spread_block(d, H, g, diag);
}

inline double lasso_spr_objective(const DesignSystem& d, const Vector& a, double lambda)
{
    return 0.5 * (d.vs - d.Fs * a).squaredNorm() + lambda * a.cwiseAbs().sum();
}

/// Smallest lambda at which the block's solution is identically zero.
inline double lambda_max(const DesignSystem& d, Block block)
{
    if (block == Block::Mid) {
        const Vector h = d.Fm.transpose() * d.vm;
        return h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
    }
    const Vector h = d.Fs.transpose() * d.vs;
    return h.size() ? std::max(0.0, h.maxCoeff()) : 0.0;
}

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
inline std::vector<double> lambda_grid(const DesignSystem& d, Block block, int count = 100, double ratio = 1e-3)
{
    if (count < 2)
        fail(ErrorCode::InvalidArgument, "lambda grid needs at least two points");
    if (!(ratio > 0.0 && ratio < 1.0))
        fail(ErrorCode::InvalidArgument, "lambda grid ratio must lie in (0,1)");
    double top = lambda_max(d, block);
    if (!(top > 0.0)) top = 1.0; // no signal: every lambda gives the zero fit
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double step = std::log(ratio) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = top * std::exp(step * i);
    grid.front() = top;
    grid.back() = top * ratio;
    return grid;
}

/// Regularization path of one block with its cross-validation summary.
struct LassoPath {
    Block block = Block::Mid;
    std::vector<double> lambdas;
    std::vector<Vector> coefs; // full-sample fits, design coordinates
    std::vector<double> cv_mean;
    std::vector<double> cv_std_err;
    double lambda_mse = 0.0;
    double lambda_1se = 0.0;

    double select(LambdaRule rule) const { return rule == LambdaRule::MinMse ? lambda_mse : lambda_1se; }
};

struct CvResult {
    LassoPath mid;
    LassoPath spr;
};

struct CvOptions {
    int folds = 5;
    std::uint64_t seed = 0;
    int grid_size = 100;
    double grid_ratio = 1e-3;
    bool standardize = false;
    /// Optional explicit grids; must be strictly decreasing and nonnegative.
    std::vector<double> mid_lambdas;
    std::vector<double> spr_lambdas;
};

/// Seeded fold labels: observation permutation[i] goes to fold i mod K.
inline std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed)
{
    if (folds < 2 || static_cast<std::size_t>(folds) > n)
        fail(ErrorCode::InvalidArgument, "need 2 <= folds <= n, got folds=" + std::to_string(folds) +
                                             " n=" + std::to_string(n));
    Rng rng(seed);
    const auto perm = rng.permutation(n);
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) label[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    return label;
}

/// Training/held-out split for one fold. Throws FoldTooSmall when the
/// training part cannot support a design.
struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline FoldSplit fold_split(const std::vector<int>& labels, int fold)
{
    FoldSplit s;
    for (std::size_t j = 0; j < labels.size(); ++j)
        (labels[j] == fold ? s.test : s.train).push_back(j);
    if (s.test.empty() || s.train.size() < 2)
        fail(ErrorCode::FoldTooSmall, "fold " + std::to_string(fold) + " leaves " +
                                          std::to_string(s.train.size()) + " training rows and " +
                                          std::to_string(s.test.size()) + " held-out rows");
    return s;
}

namespace detail {

inline void check_grid(const std::vector<double>& grid)
{
    if (grid.size() < 1)
        fail(ErrorCode::InvalidArgument, "empty lambda grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0))
            fail(ErrorCode::InvalidArgument, "lambda grid values must be nonnegative");
        if (i > 0 && !(grid[i] < grid[i - 1]))
            fail(ErrorCode::InvalidArgument, "lambda grid must be strictly decreasing");
    }
}

/// Held-out squared error of one block, weighted by its d_tau share.
/// `a` is in the training design's coordinates.
inline double heldout_block_error(const DesignSystem& train, const IntervalSample& test, Block block,
                                  const Vector& a, Tau tau)
{
    const auto p = train.block_size();
    const Vector coef = block == Block::Mid ? Vector(a.cwiseQuotient(train.scale_mid))
                                            : Vector(a.cwiseQuotient(train.scale_spr));
    const double intercept = block == Block::Mid ? train.meanY.mid() - train.meanMidXebl.dot(coef)
                                                 : train.meanY.spr() - train.meanSprXebl.dot(coef);
    const double weight = block == Block::Mid ? tau.mid_weight() : tau.spr_weight();
    double acc = 0.0;
    Vector mid_part(p), spr_part(p);
    for (std::size_t j = 0; j < test.n(); ++j) {
        fill_parts(train.variant, test.row(j), mid_part, spr_part);
        const double fitted = intercept + (block == Block::Mid ? mid_part.dot(coef) : spr_part.dot(coef));
        const double observed = block == Block::Mid ? test.y(j).mid() : test.y(j).spr();
        acc += weight * (observed - fitted) * (observed - fitted);
    }
    return acc / static_cast<double>(test.n());
}

inline std::vector<Vector> block_path(const DesignSystem& d, Block block, const std::vector<double>& grid)
{
    std::vector<Vector> path;
    path.reserve(grid.size());
    Vector warm = Vector::Zero(d.block_size());
    for (double lambda : grid) {
        if (block == Block::Mid) {
            warm = fit_lasso_mid(d, lambda, &warm);
            path.push_back(warm);
        } else {
            path.push_back(fit_lasso_spr(d, lambda));
        }
    }
    return path;
}

inline void summarize(LassoPath& path, const std::vector<std::vector<double>>& fold_errors)
{
    const auto folds = fold_errors.size();
    const auto m = path.lambdas.size();
    path.cv_mean.assign(m, 0.0);
    path.cv_std_err.assign(m, 0.0);
    for (std::size_t l = 0; l < m; ++l) {
        double mean = 0.0;
        for (const auto& f : fold_errors) mean += f[l];
        mean /= static_cast<double>(folds);
        double ss = 0.0;
        for (const auto& f : fold_errors) ss += (f[l] - mean) * (f[l] - mean);
        path.cv_mean[l] = mean;
        path.cv_std_err[l] = std::sqrt(ss / static_cast<double>(folds - 1)) / std::sqrt(static_cast<double>(folds));
    }
    std::size_t best = 0;
    for (std::size_t l = 1; l < m; ++l)
        if (path.cv_mean[l] < path.cv_mean[best]) best = l;
    path.lambda_mse = path.lambdas[best];
    const double bound = path.cv_mean[best] + path.cv_std_err[best];
    // Grid is decreasing: the first index within the bound is the largest lambda.
    for (std::size_t l = 0; l <= best; ++l) {
        if (path.cv_mean[l] <= bound) {
            path.lambda_1se = path.lambdas[l];
            break;
        }
    }
}

} // namespace detail

/// K-fold cross-validation of both blocks over their own lambda grids.
/// Grids come from the full sample; each fold re-centers on its training rows.
inline CvResult cross_validate(const IntervalSample& s, ModelVariant variant, Tau tau, const CvOptions& opt = {})
{
    const auto full = build_design(s, variant, opt.standardize);
    CvResult out;
    out.mid.block = Block::Mid;
    out.spr.block = Block::Spread;
    out.mid.lambdas = opt.mid_lambdas.empty() ? lambda_grid(full, Block::Mid, opt.grid_size, opt.grid_ratio)
                                              : opt.mid_lambdas;
    out.spr.lambdas = opt.spr_lambdas.empty() ? lambda_grid(full, Block::Spread, opt.grid_size, opt.grid_ratio)
                                              : opt.spr_lambdas;
    detail::check_grid(out.mid.lambdas);
    detail::check_grid(out.spr.lambdas);

    out.mid.coefs = detail::block_path(full, Block::Mid, out.mid.lambdas);
    out.spr.coefs = detail::block_path(full, Block::Spread, out.spr.lambdas);

    const auto labels = assign_folds(s.n(), opt.folds, opt.seed);
    std::vector<std::vector<double>> mid_err, spr_err;
    for (int f = 0; f < opt.folds; ++f) {
        const auto split = fold_split(labels, f);
        const auto train = build_design(s.subset(split.train), variant, opt.standardize);
        const auto test = s.subset(split.test);
        const auto mid_path = detail::block_path(train, Block::Mid, out.mid.lambdas);
        const auto spr_path = detail::block_path(train, Block::Spread, out.spr.lambdas);
        std::vector<double> me, se;
        for (const auto& a : mid_path) me.push_back(detail::heldout_block_error(train, test, Block::Mid, a, tau));
        for (const auto& a : spr_path) se.push_back(detail::heldout_block_error(train, test, Block::Spread, a, tau));
        mid_err.push_back(std::move(me));
        spr_err.push_back(std::move(se));
    }
    detail::summarize(out.mid, mid_err);
    detail::summarize(out.spr, spr_err);
    return out;
}

/// Lasso fit at explicit per-block penalties; the intercept is unpenalized.
inline FitResult fit_lasso_fixed(const DesignSystem& d, double lambda_mid, double lambda_spr, Tau tau,
                                 MseConvention convention = MseConvention::DTau)
{
    FitResult fit;
    fit.method = Method::Lasso;
    fit.variant = d.variant;
    fit.tau = tau.value();
    fit.mse_convention = convention;
    fit.lambda_mid = lambda_mid;
    fit.lambda_spr = lambda_spr;

    const Vector a_mid = fit_lasso_mid(d, lambda_mid);
    const Vector a_spr = fit_lasso_spr(d, lambda_spr, &fit.diagnostics);
    fit.diagnostics["mid_kkt"] = lasso_mid_kkt(d, a_mid, lambda_mid);
    fit.diagnostics["objective"] = detail::block_objective(d, a_mid, a_spr, tau);
    fit.coefficients = coefficients_from_blocks(d, a_mid, a_spr);
    fit.coefficients.delta = estimate_intercept(d, fit.coefficients);
    detail::finish_fit(d, fit, tau);
    return fit;
}

/// Cross-validated lasso: each block picks its own lambda by `rule`, then
/// both are refit on the full sample.
inline FitResult fit_lasso(const IntervalSample& s, ModelVariant variant, Tau tau, LambdaRule rule,
                           const CvOptions& opt = {}, MseConvention convention = MseConvention::DTau)
{
    const auto cv = cross_validate(s, variant, tau, opt);
    const auto d = build_design(s, variant, opt.standardize);
    auto fit = fit_lasso_fixed(d, cv.mid.select(rule), cv.spr.select(rule), tau, convention);
    fit.diagnostics["cv_folds"] = opt.folds;
    fit.diagnostics["cv_seed"] = static_cast<double>(opt.seed);
    fit.diagnostics["lambda_mid_mse"] = cv.mid.lambda_mse;
    fit.diagnostics["lambda_mid_1se"] = cv.mid.lambda_1se;
    fit.diagnostics["lambda_spr_mse"] = cv.spr.lambda_mse;
    fit.diagnostics["lambda_spr_1se"] = cv.spr.lambda_1se;
    return fit;
}

} // namespace intreg
