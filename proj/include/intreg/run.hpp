#pragma once

#include <intreg/design.hpp>
#include <intreg/error.hpp>
#include <intreg/interval.hpp>
#include <intreg/io.hpp>
#include <intreg/lasso.hpp>
#include <intreg/lasso_ir.hpp>
#include <intreg/ls_fit.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace intreg {

enum class OutputFormat { Table, Json, Csv };

constexpr std::string_view to_string(OutputFormat f) noexcept
{
    switch (f) {
    case OutputFormat::Table: return "table";
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    }
    return "?";
}

struct RunConfig {
    std::string input_path;
    Format format = Format::MidSpr;
    Method method = Method::LS;
    /// Unset means full for ls/lasso and model-m for lasso-ir.
    std::optional<ModelVariant> variant;
    double tau = 0.5;
    /// Unset means mse for every block without an override.
    std::optional<LambdaRule> lambda_rule;
    std::optional<double> lambda_mid;
    std::optional<double> lambda_spr;
    std::optional<double> t_budget;
    int folds = 5;
    std::uint64_t seed = 0;
    MseConvention mse_convention = MseConvention::DTau;
    OutputFormat output_format = OutputFormat::Table;

    ModelVariant resolved_variant() const
    {
        if (variant) return *variant;
        return method == Method::LassoIR ? ModelVariant::ModelM : ModelVariant::Full;
    }
    LambdaRule resolved_rule() const { return lambda_rule.value_or(LambdaRule::MinMse); }
};

/// Name-to-enum parsers shared by the CLI and the json reader.
inline Method parse_method(std::string_view s)
{
    if (s == "ls") return Method::LS;
    if (s == "lasso") return Method::Lasso;
    if (s == "lasso-ir") return Method::LassoIR;
    fail(ErrorCode::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

inline ModelVariant parse_variant(std::string_view s)
{
    if (s == "full") return ModelVariant::Full;
    if (s == "model-m") return ModelVariant::ModelM;
    fail(ErrorCode::InvalidArgument, "unknown variant '" + std::string(s) + "'");
}

inline LambdaRule parse_lambda_rule(std::string_view s)
{
    if (s == "mse") return LambdaRule::MinMse;
    if (s == "1se") return LambdaRule::OneSe;
    fail(ErrorCode::InvalidArgument, "unknown lambda rule '" + std::string(s) + "'");
}

inline MseConvention parse_mse_convention(std::string_view s)
{
    if (s == "dtau") return MseConvention::DTau;
    if (s == "unweighted") return MseConvention::Unweighted;
    fail(ErrorCode::InvalidArgument, "unknown mse convention '" + std::string(s) + "'");
}

inline OutputFormat parse_output_format(std::string_view s)
{
    if (s == "table") return OutputFormat::Table;
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    fail(ErrorCode::InvalidArgument, "unknown output format '" + std::string(s) + "'");
}

inline void validate(const RunConfig& c)
{
    Tau{c.tau};
    if (c.folds < 2)
        fail(ErrorCode::InvalidArgument, "folds must be at least 2");
    const bool lasso = c.method == Method::Lasso;
    if (!lasso && (c.lambda_mid || c.lambda_spr || c.lambda_rule))
        fail(ErrorCode::InvalidArgument, "lambda options apply to method lasso only");
    if (c.t_budget && c.method != Method::LassoIR)
        fail(ErrorCode::InvalidArgument, "t-budget applies to method lasso-ir only");
    if (lasso && c.lambda_mid && c.lambda_spr && c.lambda_rule)
        fail(ErrorCode::InvalidArgument, "lambda-rule conflicts with explicit lambdas for both blocks");
    for (const auto& v : {c.lambda_mid, c.lambda_spr, c.t_budget})
        if (v && !(*v >= 0.0 && std::isfinite(*v)))
            fail(ErrorCode::InvalidArgument, "penalties and budgets must be finite and nonnegative");
    if (c.method == Method::LassoIR && c.resolved_variant() != ModelVariant::ModelM)
        fail(ErrorCode::InvalidArgument, "lasso-ir needs variant model-m");
}

/// Fit the configured estimator on an already ingested sample.
inline FitResult run(const RunConfig& c, const IntervalSample& s)
{
    validate(c);
    const Tau tau(c.tau);
    const auto variant = c.resolved_variant();
    const auto d = build_design(s, variant);

    if (c.method == Method::LS)
        return fit_ls(d, tau, c.mse_convention);

    if (c.method == Method::Lasso) {
        double lm = c.lambda_mid.value_or(0.0);
        double ls = c.lambda_spr.value_or(0.0);
        std::optional<CvResult> cv;
        if (!c.lambda_mid || !c.lambda_spr) {
            CvOptions opt;
            opt.folds = c.folds;
            opt.seed = c.seed;
            cv = cross_validate(s, variant, tau, opt);
            if (!c.lambda_mid) lm = cv->mid.select(c.resolved_rule());
            if (!c.lambda_spr) ls = cv->spr.select(c.resolved_rule());
        }
        auto fit = fit_lasso_fixed(d, lm, ls, tau, c.mse_convention);
        if (cv) {
            fit.diagnostics["cv_folds"] = c.folds;
            fit.diagnostics["lambda_mid_mse"] = cv->mid.lambda_mse;
            fit.diagnostics["lambda_mid_1se"] = cv->mid.lambda_1se;
            fit.diagnostics["lambda_spr_mse"] = cv->spr.lambda_mse;
            fit.diagnostics["lambda_spr_1se"] = cv->spr.lambda_1se;
        }
        return fit;
    }

    double t = 0.0;
    if (c.t_budget) {
        t = *c.t_budget;
    } else {
        t = select_budget(s, tau, budget_grid(d, tau), c.folds, c.seed);
    }
    auto fit = fit_lasso_ir(d, tau, t, c.mse_convention).fit;
    if (!c.t_budget) fit.diagnostics["cv_folds"] = c.folds;
    return fit;
}

inline FitResult run(const RunConfig& c)
{
    validate(c);
    return run(c, ingest(c.input_path, c.format));
}

} // namespace intreg
