// Writes the frozen synthetic sample and its expected fits, computed with the
// brute-force oracle solvers only.
#include <intreg/io.hpp>
#include <intreg/oracle.hpp>
#include <intreg/report.hpp>

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

using namespace intreg;

namespace {

constexpr double tau_value = 0.5;
constexpr double lambda_mid = 0.6094;
constexpr double lambda_spr = 0.0259;
constexpr double t_budget = 0.10;

Json expected_fit(const DesignSystem& d, const Vector& a_mid, const Vector& a_spr, bool clamp_delta)
{
    const Tau tau(tau_value);
    Coefficients c = coefficients_from_blocks(d, a_mid, a_spr);
    const RawInterval part = mean_linear_part(d, c);
    const double dspr = d.meanY.spr() - part.spr;
    c.delta = clamp_delta ? Interval(d.meanY.mid() - part.mid, std::max(0.0, dspr)) : estimate_intercept(d, c);

    std::vector<Interval> y, yhat;
    for (std::size_t j = 0; j < d.n(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        y.emplace_back(d.midY(jj), d.sprY(jj));
        yhat.push_back(predict(c, design_row(d, j)));
    }
    Json j;
    j["b1"] = detail::vector_json(c.b1);
    j["b2"] = detail::vector_json(c.b2);
    j["b3"] = detail::vector_json(c.b3);
    j["b4"] = detail::vector_json(c.b4);
    j["delta"] = {c.delta.mid(), c.delta.spr()};
    j["mse"] = mean_squared_dtau(y, yhat, tau);
    return j;
}

Vector solved(const oracle::QpResult& r)
{
    if (!r.feasible) {
        std::cerr << "oracle QP infeasible\n";
        std::exit(1);
    }
    return r.z;
}

} // namespace

int main(int argc, char** argv)
{
    const std::string dir = argc > 1 ? argv[1] : "tests/fixtures";
    auto truth = Coefficients::zero(2);
    truth.b1 << 0.45, 0.05;
    truth.b2 << 0.25, 0.15;
    truth.b3 << 0.10, 0.00;
    truth.b4 << 0.00, 0.20;
    truth.delta = Interval(20.0, 3.0);
    const auto s = oracle::simulate(59, 2, truth, 4.0, 59);
    write_sample(dir + "/synthetic_59x2.csv", s, Format::MidSpr);
    // Re-read so the expected values come from exactly what the tests ingest.
    const auto sample = ingest(dir + "/synthetic_59x2.csv", Format::MidSpr);

    const oracle::Caps caps{4, 80};
    Json out;
    out["sample"] = "synthetic_59x2.csv";
    out["format"] = "midspr";
    out["tau"] = tau_value;
    out["tolerance"] = 1e-9;

    const auto full = build_design(sample, ModelVariant::Full);
    {
        const Vector a_mid = oracle::ols(full.Fm, full.vm);
        const Matrix H = 2.0 * tau_value * full.Fs.transpose() * full.Fs;
        const Vector g = -2.0 * tau_value * full.Fs.transpose() * full.vs;
        const Vector a_spr = solved(oracle::brute_force_qp(oracle::spread_qp(full, H, g), caps));
        out["ls"] = expected_fit(full, a_mid, a_spr, false);
        out["ls"]["variant"] = "full";
    }
    {
        const Vector a_mid = oracle::brute_force_lasso(full.Fm, full.vm, lambda_mid);
        const Matrix H = full.Fs.transpose() * full.Fs;
        const Vector g = (-full.Fs.transpose() * full.vs).array() + lambda_spr;
        const Vector a_spr = solved(oracle::brute_force_qp(oracle::spread_qp(full, H, g), caps));
        out["lasso"] = expected_fit(full, a_mid, a_spr, false);
        out["lasso"]["variant"] = "full";
        out["lasso"]["lambda_mid"] = lambda_mid;
        out["lasso"]["lambda_spr"] = lambda_spr;
    }
    {
        const auto mm = build_design(sample, ModelVariant::ModelM);
        const Vector z = solved(oracle::brute_force_qp(oracle::lasso_ir_qp(mm, tau_value, t_budget), caps));
        out["lasso_ir"] = expected_fit(mm, z.head(2), z.head(2) + z.tail(2), true);
        out["lasso_ir"]["variant"] = "model-m";
        out["lasso_ir"]["t"] = t_budget;
    }
    std::ofstream(dir + "/synthetic_59x2.expected.json") << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}
