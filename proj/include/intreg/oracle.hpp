#pragma once

// Brute-force reference solvers and a synthetic data generator. Nothing in
// here calls the Lemke path, the coordinate-descent path or an Eigen
// decomposition; linear systems are solved by the local elimination routine.

#include <intreg/design.hpp>
#include <intreg/error.hpp>
#include <intreg/interval.hpp>
#include <intreg/lcp.hpp>
#include <intreg/random.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace intreg::oracle {

/// Gaussian elimination with partial pivoting. Returns nullopt when the
/// system is numerically singular.
inline std::optional<Vector> gauss_solve(Matrix A, Vector b)
{
    const auto n = A.rows();
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index i = col + 1; i < n; ++i)
            if (std::abs(A(i, col)) > std::abs(A(piv, col))) piv = i;
        if (std::abs(A(piv, col)) <= 1e-12 * scale)
            return std::nullopt;
        if (piv != col) {
            A.row(piv).swap(A.row(col));
            std::swap(b(piv), b(col));
        }
        for (Eigen::Index i = col + 1; i < n; ++i) {
            const double f = A(i, col) / A(col, col);
            if (f == 0.0) continue;
            for (Eigen::Index j = col; j < n; ++j) A(i, j) -= f * A(col, j);
            b(i) -= f * b(col);
        }
    }
    Vector x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = b(i);
        for (Eigen::Index j = i + 1; j < n; ++j) s -= A(i, j) * x(j);
        x(i) = s / A(i, i);
    }
    return x;
}

struct Caps {
    Eigen::Index max_dim = 6;
    Eigen::Index max_constraints = 12;
};

struct QpResult {
    bool feasible = false;
    Vector z;
    double objective = std::numeric_limits<double>::infinity();
    long candidates = 0;
};

/// Exact QP optimum by enumerating every active set of at most `dim`
/// constraints, solving the equality-constrained KKT system of each and
/// keeping the best feasible stationary point. Needs Q positive definite.
inline QpResult brute_force_qp(const Qp& qp, Caps caps = {})
{
    const auto m = qp.dim();
    const auto p = qp.constraints();
    if (m > caps.max_dim || p > caps.max_constraints)
        fail(ErrorCode::TooLarge, "brute-force QP limited to m <= " + std::to_string(caps.max_dim) +
                                      ", p <= " + std::to_string(caps.max_constraints));
    const double rscale = std::max({1.0, qp.r.size() ? qp.r.cwiseAbs().maxCoeff() : 0.0});
    QpResult best;
    std::vector<Eigen::Index> active;

    auto evaluate = [&] {
        const auto s = static_cast<Eigen::Index>(active.size());
        Matrix K = Matrix::Zero(m + s, m + s);
        Vector rhs(m + s);
        K.topLeftCorner(m, m) = qp.Q;
        rhs.head(m) = -qp.c;
        for (Eigen::Index a = 0; a < s; ++a) {
            const auto row = active[static_cast<std::size_t>(a)];
            K.block(0, m + a, m, 1) = -qp.R.row(row).transpose();
            K.block(m + a, 0, 1, m) = qp.R.row(row);
            rhs(m + a) = qp.r(row);
        }
        ++best.candidates;
        const auto sol = gauss_solve(K, rhs);
        if (!sol) return;
        const Vector z = sol->head(m);
        const Vector slack = qp.R * z - qp.r;
        if (p > 0 && slack.minCoeff() < -1e-9 * rscale) return;
        const double obj = 0.5 * z.dot(qp.Q * z) + qp.c.dot(z);
        if (obj < best.objective) {
            best.objective = obj;
            best.z = z;
            best.feasible = true;
        }
    };

    // Depth-first enumeration of subsets of size <= m.
    auto recurse = [&](auto&& self, Eigen::Index start) -> void {
        evaluate();
        if (static_cast<Eigen::Index>(active.size()) == m) return;
        for (Eigen::Index j = start; j < p; ++j) {
            active.push_back(j);
            self(self, j + 1);
            active.pop_back();
        }
    };
    recurse(recurse, 0);
    return best;
}

/// Unconstrained lasso 1/2||v - F a||^2 + lambda ||a||_1 by enumerating all
/// sign patterns in {-1, 0, +1}^p.
inline Vector brute_force_lasso(const Matrix& F, const Vector& v, double lambda, Eigen::Index max_dim = 8)
{
    const auto p = F.cols();
    if (p > max_dim)
        fail(ErrorCode::TooLarge, "brute-force lasso limited to p <= " + std::to_string(max_dim));
    const Matrix G = F.transpose() * F;
    const Vector h = F.transpose() * v;
    Vector best = Vector::Zero(p);
    double best_obj = 0.5 * v.squaredNorm();
    std::vector<int> sign(static_cast<std::size_t>(p), 0);
    long total = 1;
    for (Eigen::Index i = 0; i < p; ++i) total *= 3;
    for (long code = 1; code < total; ++code) {
        long c = code;
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < p; ++i) {
            sign[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;
            c /= 3;
            if (sign[static_cast<std::size_t>(i)] != 0) support.push_back(i);
        }
        if (support.empty()) continue;
        const auto s = static_cast<Eigen::Index>(support.size());
        Matrix A(s, s);
        Vector b(s);
        for (Eigen::Index a = 0; a < s; ++a) {
            const auto ia = support[static_cast<std::size_t>(a)];
            b(a) = h(ia) - lambda * sign[static_cast<std::size_t>(ia)];
            for (Eigen::Index bb = 0; bb < s; ++bb) A(a, bb) = G(ia, support[static_cast<std::size_t>(bb)]);
        }
        const auto sol = gauss_solve(A, b);
        if (!sol) continue;
        Vector x = Vector::Zero(p);
        bool consistent = true;
        for (Eigen::Index a = 0; a < s; ++a) {
            const auto ia = support[static_cast<std::size_t>(a)];
            if ((*sol)(a) * sign[static_cast<std::size_t>(ia)] < 0.0) consistent = false;
            x(ia) = (*sol)(a);
        }
        if (!consistent) continue;
        const double obj = 0.5 * (v - F * x).squaredNorm() + lambda * x.cwiseAbs().sum();
        if (obj < best_obj) {
            best_obj = obj;
            best = x;
        }
    }
    return best;
}

/// Oracle least squares for the mid block via the normal equations.
inline Vector ols(const Matrix& F, const Vector& v)
{
    const auto sol = gauss_solve(F.transpose() * F, F.transpose() * v);
    if (!sol)
        fail(ErrorCode::DegenerateDesign, "oracle OLS on a rank-deficient design");
    return *sol;
}

/// Spread feasibility system built independently of spread_constraints().
inline Qp spread_qp(const DesignSystem& d, const Matrix& H, const Vector& g)
{
    const auto p = d.block_size();
    const auto n = static_cast<Eigen::Index>(d.n());
    Qp qp{H, g, Matrix::Zero(p + n, p), Vector::Zero(p + n)};
    for (Eigen::Index i = 0; i < p; ++i) qp.R(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) qp.R(p + j, i) = -d.spread_rows(j, i);
        qp.r(p + j) = -d.sprY(j);
    }
    return qp;
}

/// Lasso-IR as a QP over (A_m, A_a) with one budget row per sign vector.
inline Qp lasso_ir_qp(const DesignSystem& d, double tau, double t)
{
    const auto p = d.block_size();
    const auto n = static_cast<Eigen::Index>(d.n());
    const Matrix Gm = d.Fm.transpose() * d.Fm;
    const Matrix Gs = d.Fs.transpose() * d.Fs;
    Qp qp;
    qp.Q.resize(2 * p, 2 * p);
    qp.Q.topLeftCorner(p, p) = 2.0 * ((1.0 - tau) * Gm + tau * Gs);
    qp.Q.topRightCorner(p, p) = 2.0 * tau * Gs;
    qp.Q.bottomLeftCorner(p, p) = 2.0 * tau * Gs;
    qp.Q.bottomRightCorner(p, p) = 2.0 * tau * Gs;
    qp.c.resize(2 * p);
    qp.c.head(p) = -2.0 * ((1.0 - tau) * d.Fm.transpose() * d.vm + tau * d.Fs.transpose() * d.vs);
    qp.c.tail(p) = -2.0 * tau * d.Fs.transpose() * d.vs;
    const Eigen::Index signs = Eigen::Index{1} << p;
    qp.R = Matrix::Zero(n + signs, 2 * p);
    qp.r = Vector::Zero(n + signs);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < p; ++i) {
            qp.R(j, i) = d.spread_rows(j, i);
            qp.R(j, p + i) = d.spread_rows(j, i);
        }
    for (Eigen::Index s = 0; s < signs; ++s) {
        for (Eigen::Index i = 0; i < p; ++i) qp.R(n + s, p + i) = ((s >> i) & 1) ? 1.0 : -1.0;
        qp.r(n + s) = -t;
    }
    return qp;
}

/// Synthetic sample following the split mid/spread model.
///
/// Regressor mids are U(-10, 10) and spreads U(0, 5). Errors are
///   mid eps = delta.mid + noise * U(-1, 1)
///   spr eps = delta.spr + noise * U(0, 1)
/// so spreads of y always dominate the fitted spread part and the planted
/// coefficients lie in the feasibility set.
inline IntervalSample simulate(std::size_t n, std::size_t k, const Coefficients& truth, double noise,
                               std::uint64_t seed)
{
    const auto kk = static_cast<Eigen::Index>(k);
    if (truth.b1.size() != kk || truth.b2.size() != kk || truth.b3.size() != kk || truth.b4.size() != kk)
        fail(ErrorCode::InvalidTruth, "coefficient blocks must have length k");
    if ((truth.b2.array() < 0.0).any() || (truth.b3.array() < 0.0).any())
        fail(ErrorCode::InvalidTruth, "b2 and b3 must be nonnegative");
    if (noise < 0.0)
        fail(ErrorCode::InvalidTruth, "noise must be nonnegative");

    Rng rng(seed);
    std::vector<Interval> y, x;
    y.reserve(n);
    x.reserve(n * k);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Interval> row;
        for (std::size_t i = 0; i < k; ++i) {
            const double m = rng.uniform(-10.0, 10.0);
            const double s = rng.uniform(0.0, 5.0);
            row.emplace_back(m, s);
        }
        const RawInterval part = linear_part(truth, row);
        const double em = truth.delta.mid() + noise * rng.uniform(-1.0, 1.0);
        const double es = truth.delta.spr() + noise * rng.uniform(0.0, 1.0);
        y.emplace_back(part.mid + em, part.spr + es);
        x.insert(x.end(), row.begin(), row.end());
    }
    return IntervalSample(std::move(y), std::move(x), k);
}

struct Report {
    std::string instance_id;
    double main_objective = 0.0;
    double oracle_objective = 0.0;
    double gap = 0.0;
    double feas_violation = 0.0;

    static Report make(std::string id, double main_obj, double oracle_obj, double feas)
    {
        return {std::move(id), main_obj, oracle_obj, main_obj - oracle_obj, feas};
    }

    static std::string csv_header() { return "instance_id,main_objective,oracle_objective,gap,feas_violation"; }

    std::string csv_row() const
    {
        std::ostringstream os;
        os.precision(17);
        os << instance_id << ',' << main_objective << ',' << oracle_objective << ',' << gap << ','
           << feas_violation;
        return os.str();
    }
};

} // namespace intreg::oracle
