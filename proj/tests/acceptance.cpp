// Acceptance run: one PASS/FAIL/SKIP line per criterion.
#include <intreg/interval.hpp>
#include <intreg/io.hpp>
#include <intreg/lasso.hpp>
#include <intreg/lasso_ir.hpp>
#include <intreg/lcp.hpp>
#include <intreg/ls_fit.hpp>
#include <intreg/oracle.hpp>
#include <intreg/random.hpp>
#include <intreg/report.hpp>
#include <intreg/run.hpp>

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>

using namespace intreg;

namespace {

const std::string fixture_dir = INTREG_FIXTURE_DIR;

using Clock = std::chrono::steady_clock;

struct Outcome {
    enum Kind { Pass, Fail, Skip } kind = Pass;
    std::string detail;
};

class Checker {
public:
    void expect(bool ok, const std::string& what)
    {
        ++checks_;
        if (!ok && failures_++ < 5) first_ += (first_.empty() ? "" : "; ") + what;
    }
    long checks() const { return checks_; }
    long failures() const { return failures_; }
    Outcome outcome(const std::string& summary) const
    {
        if (failures_ == 0) return {Outcome::Pass, summary};
        return {Outcome::Fail, std::to_string(failures_) + "/" + std::to_string(checks_) + " failed: " + first_};
    }

private:
    long checks_ = 0;
    long failures_ = 0;
    std::string first_;
};

bool rel_close(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

Interval random_interval(Rng& rng, double scale = 10.0)
{
    return Interval(rng.uniform(-scale, scale), rng.uniform(0.0, scale));
}

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c)
{
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

Vector random_vector(Rng& rng, Eigen::Index n, double lo, double hi)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

Coefficients random_truth(Rng& rng, std::size_t k, ModelVariant variant)
{
    auto c = Coefficients::zero(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        c.b1(ii) = rng.uniform(-2.0, 2.0);
        c.b2(ii) = rng.uniform(0.0, 1.5);
        if (variant == ModelVariant::Full) {
            c.b3(ii) = rng.uniform(0.0, 1.0);
            c.b4(ii) = rng.uniform(-1.0, 1.0);
        }
    }
    return c;
}

double vector_gap(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome metric_suite()
{
    const auto start = Clock::now();
    Checker ck;
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const Tau tau(rng.uniform(0.01, 0.99));
        const Interval a = random_interval(rng), b = random_interval(rng), c = random_interval(rng);
        const double dab = d_tau(a, b, tau), dba = d_tau(b, a, tau);
        ck.expect(d_tau(a, a, tau) == 0.0, "identity");
        ck.expect(dab >= 0.0 && dab == dba, "symmetry");
        ck.expect(d_tau(a, c, tau) <= (dab + d_tau(b, c, tau)) * (1.0 + 1e-12), "triangle");
        ck.expect(a == b || dab > 0.0, "separation");

        const Interval back = hukuhara_diff(a + b, b);
        ck.expect(rel_close(back.mid(), a.mid(), 1e-12) && rel_close(back.spr(), a.spr(), 1e-12), "minkowski/hukuhara");
        const double lambda = rng.uniform(-3.0, 3.0);
        const Interval scaled = lambda * a;
        ck.expect(rel_close(d_tau(scaled, lambda * b, tau), std::abs(lambda) * dab, 1e-12), "homogeneity");
        ck.expect(scaled.spr() == std::abs(lambda) * a.spr(), "scalar spread");

        std::vector<Interval> u;
        const std::size_t n = 2 + rng.index(30);
        for (std::size_t j = 0; j < n; ++j) u.push_back(random_interval(rng));
        const Interval mean = aumann_mean(u);
        double direct = 0.0, vm = 0.0, vs = 0.0;
        for (const auto& x : u) {
            direct += d_tau_squared(x, mean, tau);
            vm += (x.mid() - mean.mid()) * (x.mid() - mean.mid());
            vs += (x.spr() - mean.spr()) * (x.spr() - mean.spr());
        }
        const double nn = static_cast<double>(n);
        const double var = d_tau_variance(u, tau);
        ck.expect(rel_close(var, direct / nn, 1e-12), "variance = mean squared distance");
        ck.expect(rel_close(var, tau.mid_weight() * vm / nn + tau.spr_weight() * vs / nn, 1e-12),
                  "variance = weighted mid/spr variances");
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    ck.expect(secs < 5.0, "runtime " + std::to_string(secs) + " s");
    return ck.outcome(std::to_string(ck.checks()) + " checks over 1000 instances in " + std::to_string(secs) + " s");
}

Outcome lcp_oracle()
{
    const auto start = Clock::now();
    Checker ck;
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = static_cast<Eigen::Index>(1 + rng.index(4));
        const auto p = static_cast<Eigen::Index>(1 + rng.index(6));
        const Matrix A = random_matrix(rng, m + 2, m);
        Qp qp;
        qp.Q = A.transpose() * A + 0.1 * Matrix::Identity(m, m);
        qp.c = random_vector(rng, m, -2.0, 2.0);
        qp.R = random_matrix(rng, p, m);
        qp.r = qp.R * random_vector(rng, m, -1.0, 1.0) - random_vector(rng, p, 0.0, 1.0);

        const auto sol = solve_qp(qp);
        const auto ref = oracle::brute_force_qp(qp);
        ck.expect(ref.feasible, "oracle feasible");
        ck.expect(rel_close(qp.objective(sol.z), ref.objective, 1e-6), "objective gap trial " + std::to_string(trial));

        const Lcp lcp = qp_to_lcp(qp);
        const auto s = lemke_solve(lcp);
        const double comp = (s.lambda.array() * s.omega.array()).abs().maxCoeff();
        const double resid = (lcp.M * s.lambda + lcp.q - s.omega).cwiseAbs().maxCoeff();
        ck.expect(s.status == LcpStatus::Solved && comp <= 1e-9 && resid <= 1e-9 && s.lambda.minCoeff() >= -1e-9 &&
                      s.omega.minCoeff() >= -1e-9,
                  "complementarity trial " + std::to_string(trial));
    }
    int pivots = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.index(2));
        const Matrix A = random_matrix(rng, m + 2, m);
        Qp qp;
        qp.Q = A.transpose() * A + 0.1 * Matrix::Identity(m, m);
        const Vector zstar = random_vector(rng, m, -1.0, 1.0);
        const Matrix base = random_matrix(rng, 3, m);
        qp.R.resize(6, m);
        qp.R << base, base;
        qp.r = qp.R * zstar;
        qp.c = -qp.Q * (zstar - 0.5 * base.row(0).transpose());
        const auto s = lemke_solve(qp_to_lcp(qp), {.record_bases = true});
        const std::set<std::vector<int>> seen(s.bases.begin(), s.bases.end());
        ck.expect(s.status == LcpStatus::Solved && seen.size() == s.bases.size(),
                  "basis revisited in degenerate trial " + std::to_string(trial));
        pivots += s.pivots;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    ck.expect(secs < 60.0, "runtime");
    return ck.outcome("200 QPs matched the oracle; 20 degenerate instances, " + std::to_string(pivots) +
                      " pivots, no basis revisited; " + std::to_string(secs) + " s");
}

Outcome ls_recovery()
{
    const auto start = Clock::now();
    Checker ck;
    double worst_coef = 0.0, worst_delta = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(1000 + seed);
        const auto truth = random_truth(rng, 2, ModelVariant::Full);
        const auto s = oracle::simulate(59, 2, truth, 0.0, seed);
        const auto fit = fit_ls(build_design(s, ModelVariant::Full), Tau());
        const auto& c = fit.coefficients;
        const double gap = std::max({vector_gap(c.b1, truth.b1), vector_gap(c.b2, truth.b2),
                                     vector_gap(c.b3, truth.b3), vector_gap(c.b4, truth.b4)});
        const double dgap = std::max(std::abs(c.delta.mid()), std::abs(c.delta.spr()));
        worst_coef = std::max(worst_coef, gap);
        worst_delta = std::max(worst_delta, dgap);
        ck.expect(gap <= 1e-6, "coefficients seed " + std::to_string(seed));
        ck.expect(dgap <= 1e-8, "delta seed " + std::to_string(seed));
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    ck.expect(secs < 30.0, "runtime");
    char buf[160];
    std::snprintf(buf, sizeof buf, "50 seeds, max coefficient error %.2e, max |delta| %.2e, %.3f s", worst_coef,
                  worst_delta, secs);
    return ck.outcome(buf);
}

Outcome lasso_limits()
{
    Checker ck;
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 1 + rng.index(3);
        const auto truth = random_truth(rng, k, ModelVariant::Full);
        const auto s = oracle::simulate(30 + rng.index(30), k, truth, rng.uniform(0.5, 3.0), 500 + trial);
        const auto d = build_design(s, ModelVariant::Full);
        const auto ls = fit_ls(d, Tau());
        const std::string tag = " dataset " + std::to_string(trial);

        const Vector a_mid = fit_lasso_mid(d, 0.0), a_spr = fit_lasso_spr(d, 0.0);
        ck.expect(rel_close(lasso_mid_objective(d, a_mid, 0.0), lasso_mid_objective(d, mid_block(d, ls.coefficients), 0.0), 1e-6),
                  "mid lambda=0" + tag);
        ck.expect(rel_close(lasso_spr_objective(d, a_spr, 0.0), lasso_spr_objective(d, spr_block(d, ls.coefficients), 0.0), 1e-6),
                  "spr lambda=0" + tag);

        for (Block block : {Block::Mid, Block::Spread}) {
            const double top = lambda_max(d, block);
            for (double lambda : {top, 1.5 * top + 1.0}) {
                const Vector a = block == Block::Mid ? fit_lasso_mid(d, lambda) : fit_lasso_spr(d, lambda);
                ck.expect(a == Vector::Zero(a.size()), "exact zero at lambda_max" + tag);
            }
            const auto grid = lambda_grid(d, block, 100);
            ck.expect(grid.size() == 100, "grid size");
            double prev_l1 = -1.0;
            for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
                const double lambda = *it;
                const Vector a = block == Block::Mid ? fit_lasso_mid(d, lambda) : fit_lasso_spr(d, lambda);
                const double l1 = a.cwiseAbs().sum();
                if (prev_l1 >= 0.0) ck.expect(l1 <= prev_l1 + 1e-8, "L1 monotone" + tag);
                prev_l1 = l1;
                if (block == Block::Spread) {
                    const double viol = std::max(-a.minCoeff(), (d.spread_rows * a - d.sprY).maxCoeff());
                    ck.expect(viol <= 1e-8, "gamma feasibility" + tag);
                }
            }
        }
    }
    return ck.outcome(std::to_string(ck.checks()) + " checks on 20 datasets, 100-point paths per block");
}

const char* convention_name(MseConvention c) { return c == MseConvention::DTau ? "dtau" : "unweighted"; }

Outcome published_estimates()
{
    const std::string dir = fixture_dir + "/blood_pressure";
    std::ifstream in(dir + "/expected.json");
    if (!in) return {Outcome::Fail, "expected.json missing from the fixture slot"};
    const Json e = Json::parse(in);
    const std::string path = dir + "/" + e["dataset"].get<std::string>();
    if (!std::filesystem::exists(path))
        return {Outcome::Skip, "dataset not placed at " + path + "; criterion 6 applies"};

    Checker ck;
    RunConfig base;
    base.input_path = path;
    base.format = parse_format(e["format"].get<std::string>());
    base.variant = parse_variant(e["variant"].get<std::string>());
    base.tau = e["tau"].get<double>();
    const auto sample = ingest(path, base.format);
    ck.expect(sample.n() == 59 && sample.k() == 2, "expected 59 rows and 2 regressors");

    auto table_row = [](const FitResult& f) {
        return std::vector<double>{f.coefficients.b1(0), f.coefficients.b1(1), f.coefficients.b2(0), f.coefficients.b2(1)};
    };
    std::vector<MseConvention> conventions{MseConvention::DTau, MseConvention::Unweighted};
    if (!e["mse_convention"].is_null()) conventions = {parse_mse_convention(e["mse_convention"].get<std::string>())};

    std::string chosen;
    for (const auto conv : conventions) {
        Checker local;
        auto fit_row = [&](const char* key, Method method) {
            RunConfig c = base;
            c.method = method;
            c.mse_convention = conv;
            const Json& row = e[key];
            if (method == Method::Lasso) {
                c.lambda_mid = row["lambda_mid"].get<double>();
                c.lambda_spr = row["lambda_spr"].get<double>();
            }
            if (method == Method::LassoIR) c.t_budget = row["t"].get<double>();
            const auto fit = run(c, sample);
            if (row.contains("tolerance")) {
                const auto got = table_row(fit);
                for (std::size_t i = 0; i < 4; ++i)
                    local.expect(std::abs(got[i] - row["coefficients"][i].get<double>()) <= row["tolerance"].get<double>(),
                                 std::string(key) + " b" + std::to_string(i + 1));
            }
            local.expect(rel_close(fit.mse, row["mse"].get<double>(), e["mse_relative_tolerance"].get<double>()),
                         std::string(key) + " mse " + std::to_string(fit.mse));
        };
        fit_row("ls", Method::LS);
        fit_row("lasso_mse", Method::Lasso);
        fit_row("lasso_1se", Method::Lasso);
        fit_row("lasso_ir", Method::LassoIR);
        if (local.failures() == 0) {
            chosen = convention_name(conv);
            break;
        }
        if (conventions.size() == 1 || conv == conventions.back())
            return local.outcome("");
    }
    return {Outcome::Pass, "published blood-pressure estimates reproduced with mse-convention " + chosen +
                               (e["mse_convention"].is_null() ? " (record it in expected.json)" : "")};
}

Outcome synthetic_fixture()
{
    Checker ck;
    std::ifstream in(fixture_dir + "/synthetic_59x2.expected.json");
    if (!in) return {Outcome::Fail, "synthetic_59x2.expected.json missing"};
    const Json e = Json::parse(in);
    const double tol = e["tolerance"].get<double>();
    RunConfig base;
    base.input_path = fixture_dir + "/" + e["sample"].get<std::string>();
    base.format = parse_format(e["format"].get<std::string>());
    base.tau = e["tau"].get<double>();
    const auto sample = ingest(base.input_path, base.format);
    ck.expect(sample.n() == 59 && sample.k() == 2, "shape");

    double worst = 0.0;
    auto compare = [&](const char* key, RunConfig c) {
        const Json& row = e[key];
        c.variant = parse_variant(row["variant"].get<std::string>());
        const auto fit = run(c, sample);
        const Vector* blocks[] = {&fit.coefficients.b1, &fit.coefficients.b2, &fit.coefficients.b3, &fit.coefficients.b4};
        for (int b = 0; b < 4; ++b)
            for (Eigen::Index i = 0; i < blocks[b]->size(); ++i) {
                const double gap = std::abs((*blocks[b])(i) - row["b" + std::to_string(b + 1)][static_cast<std::size_t>(i)].get<double>());
                worst = std::max(worst, gap);
                ck.expect(gap <= tol, std::string(key) + " b" + std::to_string(b + 1));
            }
        const double gaps[] = {std::abs(fit.coefficients.delta.mid() - row["delta"][0].get<double>()),
                               std::abs(fit.coefficients.delta.spr() - row["delta"][1].get<double>()),
                               std::abs(fit.mse - row["mse"].get<double>())};
        for (double g : gaps) {
            worst = std::max(worst, g);
            ck.expect(g <= tol, std::string(key) + " delta/mse");
        }
    };
    RunConfig ls = base;
    compare("ls", ls);
    RunConfig lasso = base;
    lasso.method = Method::Lasso;
    lasso.lambda_mid = e["lasso"]["lambda_mid"].get<double>();
    lasso.lambda_spr = e["lasso"]["lambda_spr"].get<double>();
    compare("lasso", lasso);
    RunConfig ir = base;
    ir.method = Method::LassoIR;
    ir.t_budget = e["lasso_ir"]["t"].get<double>();
    compare("lasso_ir", ir);
    char buf[128];
    std::snprintf(buf, sizeof buf, "ls, lasso and lasso-ir match oracle expectations; max gap %.2e (tol %.0e)", worst, tol);
    return ck.outcome(buf);
}

Outcome lasso_ir_behaviour()
{
    const auto start = Clock::now();
    Checker ck;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(700 + seed);
        const auto truth = random_truth(rng, 2, ModelVariant::ModelM);
        const auto s = oracle::simulate(59, 2, truth, 2.0, seed);
        const auto d = build_design(s, ModelVariant::ModelM);
        const Tau tau;
        const auto zero = fit_lasso_ir(d, tau, 0.0);
        ck.expect(zero.fit.coefficients.b2 == zero.fit.coefficients.b1, "t=0 spread == mid seed " + std::to_string(seed));

        const auto grid = budget_grid(d, tau, 19);
        ck.expect(grid.size() == 20, "20-point grid");
        double prev = std::numeric_limits<double>::infinity();
        for (double t : grid) {
            const auto fit = fit_lasso_ir(d, tau, t);
            ck.expect(fit.objective <= prev + 1e-9 * std::max(1.0, std::abs(fit.objective)), "objective monotone");
            ck.expect(fit.a_a.cwiseAbs().sum() <= t + 1e-8, "budget");
            prev = fit.objective;
        }
    }
    // Mid slope far above the spread slope.
    Rng rng(8);
    std::vector<Interval> x, y;
    for (int j = 0; j < 30; ++j) {
        const Interval xi(rng.uniform(-5, 5), rng.uniform(0.5, 3));
        x.push_back(xi);
        y.emplace_back(3.0 * xi.mid() + rng.uniform(-0.1, 0.1), 0.2 * xi.spr() + rng.uniform(0, 0.1));
    }
    const auto adversarial = fit_lasso_ir(build_design(IntervalSample(y, x, 1), ModelVariant::ModelM), Tau(), 0.0);
    ck.expect(!adversarial.hukuhara_residuals_exist, "adversarial flag");
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    ck.expect(secs < 30.0, "runtime");
    return ck.outcome("t=0 ties spread to mid, objective monotone over 20-point grids on 10 datasets, adversarial "
                      "hukuharaResidualsExist=false; " + std::to_string(secs) + " s");
}

} // namespace

int main()
{
    const auto start = Clock::now();
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "metric and interval arithmetic suite", metric_suite},
        {2, "LCP/QP oracle equivalence", lcp_oracle},
        {3, "LS recovery on noiseless data", ls_recovery},
        {4, "Lasso limits and paths", lasso_limits},
        {5, "published blood-pressure estimates", published_estimates},
        {6, "frozen synthetic fixture", synthetic_fixture},
        {7, "Lasso-IR behaviour", lasso_ir_behaviour},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
        failed += o.kind == Outcome::Fail;
        std::printf("%s criterion %d (%s): %s\n", tag, c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    const double own = std::chrono::duration<double>(Clock::now() - start).count();
    // The unit suites run here too so the budget covers everything ctest runs.
    int unit_failed = 0;
    std::string units = INTREG_UNIT_BINARIES;
    for (std::size_t pos = 0; pos <= units.size();) {
        const auto comma = std::min(units.find(',', pos), units.size());
        const std::string name = units.substr(pos, comma - pos);
        pos = comma + 1;
        if (name.empty()) continue;
        const std::string cmd = std::string(INTREG_TEST_DIR) + "/" + name + " > /dev/null 2>&1";
        unit_failed += std::system(cmd.c_str()) != 0;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool fast = secs < 300.0 && unit_failed == 0;
    failed += !fast;
    std::printf("%s criterion 8 (full suite wall-clock): %.2f s total, acceptance %.2f s, unit suites %.2f s, "
                "%d unit suite failures\n",
                fast ? "PASS" : "FAIL", secs, own, secs - own, unit_failed);
    return failed == 0 ? 0 : 1;
}
