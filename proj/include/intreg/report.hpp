#pragma once

#include <intreg/design.hpp>
#include <intreg/io.hpp>
#include <intreg/ls_fit.hpp>
#include <intreg/run.hpp>

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace intreg {

using Json = nlohmann::json;

namespace detail {

inline Json vector_json(const Vector& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Vector vector_from_json(const Json& a)
{
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

inline double number_or_zero(const Json& j) { return j.is_null() ? 0.0 : j.get<double>(); }

inline std::vector<std::string> warnings(const FitResult& fit)
{
    std::vector<std::string> w;
    auto flag = [&](const char* key) {
        const auto it = fit.diagnostics.find(key);
        return it != fit.diagnostics.end() && it->second > 0.0;
    };
    if (flag("degenerate_design") || flag("spr_dropped_columns")) w.emplace_back("DegenerateDesign");
    const auto h = fit.diagnostics.find("hukuhara_residuals_exist");
    if (h != fit.diagnostics.end() && h->second == 0.0) w.emplace_back("HukuharaResidualsMissing");
    return w;
}

} // namespace detail

inline Json config_json(const RunConfig& c)
{
    Json j;
    j["input_path"] = c.input_path;
    j["format"] = std::string(to_string(c.format));
    j["method"] = std::string(to_string(c.method));
    j["variant"] = std::string(to_string(c.resolved_variant()));
    j["tau"] = c.tau;
    j["lambda_rule"] = c.lambda_rule ? Json(std::string(to_string(*c.lambda_rule))) : Json(nullptr);
    j["lambda_mid"] = c.lambda_mid ? Json(*c.lambda_mid) : Json(nullptr);
    j["lambda_spr"] = c.lambda_spr ? Json(*c.lambda_spr) : Json(nullptr);
    j["t_budget"] = c.t_budget ? Json(*c.t_budget) : Json(nullptr);
    j["folds"] = c.folds;
    j["seed"] = c.seed;
    j["mse_convention"] = std::string(to_string(c.mse_convention));
    j["output_format"] = std::string(to_string(c.output_format));
    return j;
}

/// Report with every FitResult field; `names` are the regressor names.
inline Json to_json(const FitResult& fit, const std::vector<std::string>& names, const RunConfig* config = nullptr)
{
    Json j;
    j["method"] = std::string(to_string(fit.method));
    j["variant"] = std::string(to_string(fit.variant));
    j["tau"] = fit.tau;
    j["mse_convention"] = std::string(to_string(fit.mse_convention));
    j["coefficients"] = {{"regressors", names},
                         {"b1", detail::vector_json(fit.coefficients.b1)},
                         {"b2", detail::vector_json(fit.coefficients.b2)},
                         {"b3", detail::vector_json(fit.coefficients.b3)},
                         {"b4", detail::vector_json(fit.coefficients.b4)}};
    j["delta"] = {{"mid", fit.coefficients.delta.mid()}, {"spr", fit.coefficients.delta.spr()}};
    const bool lasso = fit.method == Method::Lasso;
    j["lambda_mid"] = lasso ? Json(fit.lambda_mid) : Json(nullptr);
    j["lambda_spr"] = lasso ? Json(fit.lambda_spr) : Json(nullptr);
    j["t"] = fit.method == Method::LassoIR ? Json(fit.t_budget) : Json(nullptr);
    j["mse"] = fit.mse;
    j["diagnostics"] = fit.diagnostics;
    j["warnings"] = detail::warnings(fit);
    Json fitted = Json::array();
    for (const auto& iv : fit.fitted) fitted.push_back({iv.mid(), iv.spr()});
    j["fitted"] = fitted;
    if (config) j["config"] = config_json(*config);
    return j;
}

inline FitResult fit_from_json(const Json& j)
{
    FitResult fit;
    fit.method = parse_method(j.at("method").get<std::string>());
    fit.variant = parse_variant(j.at("variant").get<std::string>());
    fit.tau = j.at("tau").get<double>();
    fit.mse_convention = parse_mse_convention(j.at("mse_convention").get<std::string>());
    const auto& c = j.at("coefficients");
    fit.coefficients.b1 = detail::vector_from_json(c.at("b1"));
    fit.coefficients.b2 = detail::vector_from_json(c.at("b2"));
    fit.coefficients.b3 = detail::vector_from_json(c.at("b3"));
    fit.coefficients.b4 = detail::vector_from_json(c.at("b4"));
    fit.coefficients.delta = Interval(j.at("delta").at("mid").get<double>(), j.at("delta").at("spr").get<double>());
    fit.lambda_mid = detail::number_or_zero(j.at("lambda_mid"));
    fit.lambda_spr = detail::number_or_zero(j.at("lambda_spr"));
    fit.t_budget = detail::number_or_zero(j.at("t"));
    fit.mse = j.at("mse").get<double>();
    fit.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    for (const auto& iv : j.at("fitted")) fit.fitted.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    return fit;
}

/// Coefficient table, one line per regressor.
inline std::string render_table(const FitResult& fit, const std::vector<std::string>& names)
{
    std::ostringstream out;
    char buf[256];
    out << "method " << to_string(fit.method) << ", variant " << to_string(fit.variant) << ", tau "
        << detail::format_double(fit.tau) << '\n';
    std::snprintf(buf, sizeof buf, "%-16s %10s %10s %10s %10s\n", "regressor", "b1", "b2", "b3", "b4");
    out << buf;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        std::snprintf(buf, sizeof buf, "%-16s %10.4f %10.4f %10.4f %10.4f\n", names[i].c_str(),
                      fit.coefficients.b1(ii), fit.coefficients.b2(ii), fit.coefficients.b3(ii),
                      fit.coefficients.b4(ii));
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "delta            [%.4f, %.4f] (mid %.4f, spr %.4f)\n",
                  fit.coefficients.delta.inf(), fit.coefficients.delta.sup(), fit.coefficients.delta.mid(),
                  fit.coefficients.delta.spr());
    out << buf;
    if (fit.method == Method::Lasso) {
        std::snprintf(buf, sizeof buf, "lambda           (%.4f, %.4f)\n", fit.lambda_mid, fit.lambda_spr);
        out << buf;
    }
    if (fit.method == Method::LassoIR) {
        std::snprintf(buf, sizeof buf, "t                %.4f\n", fit.t_budget);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "MSE              %.4f", fit.mse);
    out << buf << " (" << to_string(fit.mse_convention) << ")\n";
    for (const auto& w : detail::warnings(fit)) out << "warning: " << w << '\n';
    return out.str();
}

/// Long format: field,regressor,value.
inline std::string render_csv(const FitResult& fit, const std::vector<std::string>& names)
{
    std::ostringstream out;
    out << "field,regressor,value\n";
    auto row = [&](const std::string& field, const std::string& reg, double v) {
        out << field << ',' << reg << ',' << detail::format_double(v) << '\n';
    };
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        row("b1", names[i], fit.coefficients.b1(ii));
        row("b2", names[i], fit.coefficients.b2(ii));
        row("b3", names[i], fit.coefficients.b3(ii));
        row("b4", names[i], fit.coefficients.b4(ii));
    }
    row("delta_mid", "", fit.coefficients.delta.mid());
    row("delta_spr", "", fit.coefficients.delta.spr());
    if (fit.method == Method::Lasso) {
        row("lambda_mid", "", fit.lambda_mid);
        row("lambda_spr", "", fit.lambda_spr);
    }
    if (fit.method == Method::LassoIR) row("t", "", fit.t_budget);
    row("mse", "", fit.mse);
    return out.str();
}

inline std::string render(const RunConfig& c, const FitResult& fit, const std::vector<std::string>& names)
{
    switch (c.output_format) {
    case OutputFormat::Json: return to_json(fit, names, &c).dump(2) + "\n";
    case OutputFormat::Csv: return render_csv(fit, names);
    case OutputFormat::Table: break;
    }
    return render_table(fit, names);
}

/// Regressor names of a sample (its names without the response).
inline std::vector<std::string> regressor_names(const IntervalSample& s)
{
    return {s.names().begin() + 1, s.names().end()};
}

} // namespace intreg
