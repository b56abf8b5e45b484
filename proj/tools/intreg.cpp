// intreg: fit interval-valued linear regressions from a CSV sample.
#include <intreg/report.hpp>
#include <intreg/run.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

std::string one_line(std::string s)
{
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

int report_error(const std::string& code, const std::string& message)
{
    std::cerr << "error=" << code << " " << one_line(message) << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interval-valued linear regression: ls, lasso and lasso-ir fits"};

    intreg::RunConfig config;
    std::string format = "midspr", method = "ls", variant, lambda_rule, mse_convention = "dtau",
                output_format = "table";
    std::optional<double> lambda_mid, lambda_spr, t_budget;

    app.add_option("--input-path", config.input_path, "CSV sample")->required();
    app.add_option("--format", format, "midspr or infsup")->check(CLI::IsMember({"midspr", "infsup"}));
    app.add_option("--method", method, "ls, lasso or lasso-ir")->check(CLI::IsMember({"ls", "lasso", "lasso-ir"}));
    app.add_option("--variant", variant, "full or model-m")->check(CLI::IsMember({"full", "model-m"}));
    app.add_option("--tau", config.tau, "d_tau weight in (0,1)");
    app.add_option("--lambda-rule", lambda_rule, "mse or 1se")->check(CLI::IsMember({"mse", "1se"}));
    app.add_option("--lambda-mid", lambda_mid, "explicit mid-block penalty");
    app.add_option("--lambda-spr", lambda_spr, "explicit spread-block penalty");
    app.add_option("--t-budget", t_budget, "Lasso-IR L1 budget");
    app.add_option("--folds", config.folds, "cross-validation folds");
    app.add_option("--seed", config.seed, "fold assignment seed");
    app.add_option("--mse-convention", mse_convention, "dtau or unweighted")
        ->check(CLI::IsMember({"dtau", "unweighted"}));
    app.add_option("--output-format", output_format, "table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("InvalidArgument", e.what());
        return 2;
    }

    try {
        config.format = intreg::parse_format(format);
        config.method = intreg::parse_method(method);
        if (!variant.empty()) config.variant = intreg::parse_variant(variant);
        if (!lambda_rule.empty()) config.lambda_rule = intreg::parse_lambda_rule(lambda_rule);
        config.lambda_mid = lambda_mid;
        config.lambda_spr = lambda_spr;
        config.t_budget = t_budget;
        config.mse_convention = intreg::parse_mse_convention(mse_convention);
        config.output_format = intreg::parse_output_format(output_format);

        intreg::validate(config);
        const auto sample = intreg::ingest(config.input_path, config.format);
        const auto fit = intreg::run(config, sample);
        std::cout << intreg::render(config, fit, intreg::regressor_names(sample));
    } catch (const intreg::Error& e) {
        const std::string what = e.what();
        const std::string code(intreg::to_string(e.code()));
        return report_error(code, what.starts_with(code + ": ") ? what.substr(code.size() + 2) : what);
    } catch (const std::exception& e) {
        return report_error("Internal", e.what());
    }
    return 0;
}
