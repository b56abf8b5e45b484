#pragma once

#include <intreg/design.hpp>
#include <intreg/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace intreg {

/// minimize 1/2 z'Qz + c'z  subject to  R z >= r
struct Qp {
    Matrix Q;
    Vector c;
    Matrix R;
    Vector r;

    double objective(const Vector& z) const { return 0.5 * z.dot(Q * z) + c.dot(z); }
    Eigen::Index dim() const noexcept { return Q.rows(); }
    Eigen::Index constraints() const noexcept { return R.rows(); }
};

/// Find w, lambda >= 0 with w = M lambda + q and w'lambda = 0.
struct Lcp {
    Matrix M;
    Vector q;
};

enum class LcpStatus { Solved, RayTermination };

struct LcpSolution {
    Vector lambda;
    Vector omega;
    LcpStatus status = LcpStatus::Solved;
    int pivots = 0;
    /// Direction of the terminal ray in lambda-space (RayTermination only).
    Vector ray;
    /// Sorted basis signatures visited, when requested.
    std::vector<std::vector<int>> bases;
};

struct LemkeOptions {
    int max_pivots = 0; // 0 selects 50 * dimension
    bool record_bases = false;
};

namespace detail {

inline void check_qp(const Qp& qp)
{
    const auto m = qp.Q.rows();
    if (qp.Q.cols() != m || qp.c.size() != m || qp.R.cols() != m || qp.r.size() != qp.R.rows())
        fail(ErrorCode::DimensionMismatch, "inconsistent QP dimensions");
    const double scale = std::max(1.0, qp.Q.cwiseAbs().maxCoeff());
    if ((qp.Q - qp.Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        fail(ErrorCode::InvalidArgument, "Q is not symmetric");
}

/// Factorization of Q, ridged when numerically singular.
struct QpFactor {
    Eigen::LLT<Matrix> llt;
    double ridge = 0.0;
};

inline QpFactor factor_q(const Matrix& Q)
{
    constexpr double ridge_eps = 1e-10;
    const auto m = Q.rows();
    QpFactor f;
    f.llt.compute(Q);
    if (f.llt.info() == Eigen::Success && f.llt.rcond() > 1e-12)
        return f;
    const double tr = Q.trace();
    if (!(tr > 0.0))
        fail(ErrorCode::SingularQ, "Q has zero trace");
    f.ridge = ridge_eps * tr / static_cast<double>(m);
    f.llt.compute(Q + f.ridge * Matrix::Identity(m, m));
    if (f.llt.info() != Eigen::Success)
        fail(ErrorCode::SingularQ, "Q is not positive definite even after ridge " +
                                       std::to_string(f.ridge));
    return f;
}

inline Lcp reduce(const Qp& qp, const QpFactor& f)
{
    const Matrix QinvRt = f.llt.solve(qp.R.transpose());
    const Vector Qinvc = f.llt.solve(qp.c);
    Lcp lcp;
    lcp.M = qp.R * QinvRt;
    lcp.M = 0.5 * (lcp.M + lcp.M.transpose()).eval();
    lcp.q = -qp.R * Qinvc - qp.r;
    return lcp;
}

/// Largest violation of the LCP conditions for a candidate lambda.
inline double lcp_violation(const Lcp& lcp, const Vector& lambda)
{
    const Vector w = lcp.M * lambda + lcp.q;
    double v = 0.0;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
        v = std::max(v, -lambda(j));
        v = std::max(v, -w(j));
        v = std::max(v, std::abs(lambda(j) * w(j)));
    }
    return v;
}

} // namespace detail

/// M = R Q^-1 R', q = -R Q^-1 c - r.
inline Lcp qp_to_lcp(const Qp& qp)
{
    detail::check_qp(qp);
    return detail::reduce(qp, detail::factor_q(qp.Q));
}

/// Lemke's complementary pivoting with a covering vector of ones and a
/// lexicographic ratio test, so no basis is ever revisited.
///
/// Tableau columns: w (0..d-1), lambda (d..2d-1), artificial z0 (2d), rhs.
/// Row equations read  w - M lambda - e z0 = q.
inline LcpSolution lemke_solve(const Lcp& lcp, LemkeOptions opts = {})
{
    const auto d = lcp.q.size();
    if (lcp.M.rows() != d || lcp.M.cols() != d)
        fail(ErrorCode::DimensionMismatch, "LCP matrix is not d x d");
    const int max_pivots = opts.max_pivots > 0 ? opts.max_pivots : static_cast<int>(50 * std::max<Eigen::Index>(d, 1));

    LcpSolution sol;
    sol.lambda = Vector::Zero(d);
    sol.omega = lcp.q;
    if (d == 0 || lcp.q.minCoeff() >= 0.0)
        return sol;

    const Eigen::Index z0 = 2 * d;
    const Eigen::Index rhs = 2 * d + 1;
    Matrix T(d, 2 * d + 2);
    T.leftCols(d).setIdentity();
    T.middleCols(d, d) = -lcp.M;
    T.col(z0).setConstant(-1.0);
    T.col(rhs) = lcp.q;

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) basis[static_cast<std::size_t>(i)] = i;

    auto record = [&] {
        if (!opts.record_bases) return;
        std::vector<int> sig(basis.begin(), basis.end());
        std::sort(sig.begin(), sig.end());
        sol.bases.push_back(sig);
    };
    record();

    auto pivot = [&](Eigen::Index row, Eigen::Index col) {
        T.row(row) /= T(row, col);
        for (Eigen::Index i = 0; i < d; ++i)
            if (i != row && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(row);
        basis[static_cast<std::size_t>(row)] = col;
        ++sol.pivots;
        record();
    };

    const double qscale = std::max(1.0, lcp.q.cwiseAbs().maxCoeff());
    auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-11 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    // Lexicographically smallest row of [rhs, B^-1] / col among `rows`.
    auto lexmin = [&](std::vector<Eigen::Index> rows, const Vector& col) {
        for (Eigen::Index c = -1; c < d && rows.size() > 1; ++c) {
            const Eigen::Index tc = c < 0 ? rhs : c;
            double best = T(rows[0], tc) / col(rows[0]);
            for (auto i : rows) best = std::min(best, T(i, tc) / col(i));
            std::vector<Eigen::Index> keep;
            for (auto i : rows)
                if (near(T(i, tc) / col(i), best)) keep.push_back(i);
            rows.swap(keep);
        }
        return rows.front();
    };

    // Initial pivot: z0 enters, the row with the most negative q leaves.
    Eigen::Index row = 0;
    {
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < d; ++i) rows[static_cast<std::size_t>(i)] = i;
        const Vector ones = -T.col(z0);
        row = lexmin(rows, ones);
    }
    Eigen::Index leaving = basis[static_cast<std::size_t>(row)];
    pivot(row, z0);
    Eigen::Index entering = leaving + d; // complement of w_j is lambda_j

    for (;;) {
        if (sol.pivots >= max_pivots)
            fail(ErrorCode::PivotLimitExceeded,
                 "Lemke exceeded " + std::to_string(max_pivots) + " pivots");

        const Vector col = T.col(entering);
        const double tol = 1e-11 * std::max(1.0, col.cwiseAbs().maxCoeff());
        std::vector<Eigen::Index> cand;
        for (Eigen::Index i = 0; i < d; ++i)
            if (col(i) > tol) cand.push_back(i);

        if (cand.empty()) {
            sol.status = LcpStatus::RayTermination;
            sol.ray = Vector::Zero(d);
            if (entering >= d && entering < 2 * d) sol.ray(entering - d) = 1.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                const auto b = basis[static_cast<std::size_t>(i)];
                if (b >= d && b < 2 * d) sol.ray(b - d) = std::max(0.0, -col(i));
            }
            break;
        }

        // Minimum ratio, preferring the artificial variable on ties.
        double best = T(cand[0], rhs) / col(cand[0]);
        for (auto i : cand) best = std::min(best, T(i, rhs) / col(i));
        std::vector<Eigen::Index> ties;
        Eigen::Index z0_row = -1;
        for (auto i : cand) {
            if (near(T(i, rhs) / col(i), best) ||
                T(i, rhs) / col(i) <= best + 1e-13 * qscale) {
                ties.push_back(i);
                if (basis[static_cast<std::size_t>(i)] == z0) z0_row = i;
            }
        }
        row = z0_row >= 0 ? z0_row : lexmin(ties, col);
        leaving = basis[static_cast<std::size_t>(row)];
        pivot(row, entering);
        if (leaving == z0) break;
        entering = leaving < d ? leaving + d : leaving - d;
    }

    for (Eigen::Index i = 0; i < d; ++i) {
        const auto b = basis[static_cast<std::size_t>(i)];
        if (b >= d && b < 2 * d) sol.lambda(b - d) = std::max(0.0, T(i, rhs));
    }

    if (sol.status == LcpStatus::Solved) {
        // Polish: re-solve M_SS lambda_S = -q_S on the final support, keep it
        // if it reduces the complementarity violation.
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto b = basis[static_cast<std::size_t>(i)];
            if (b >= d && b < 2 * d) support.push_back(b - d);
        }
        if (!support.empty()) {
            const auto s = static_cast<Eigen::Index>(support.size());
            Matrix Mss(s, s);
            Vector qs(s);
            for (Eigen::Index a = 0; a < s; ++a) {
                qs(a) = lcp.q(support[static_cast<std::size_t>(a)]);
                for (Eigen::Index b = 0; b < s; ++b)
                    Mss(a, b) = lcp.M(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
            }
            const Vector ls = Mss.completeOrthogonalDecomposition().solve(-qs);
            Vector polished = Vector::Zero(d);
            for (Eigen::Index a = 0; a < s; ++a)
                polished(support[static_cast<std::size_t>(a)]) = std::max(0.0, ls(a));
            if (polished.allFinite() &&
                detail::lcp_violation(lcp, polished) <= detail::lcp_violation(lcp, sol.lambda))
                sol.lambda = polished;
        }
    }
    sol.omega = lcp.M * sol.lambda + lcp.q;
    return sol;
}

struct QpSolution {
    Vector z;
    Vector multipliers;
    int pivots = 0;
    double ridge = 0.0;
    double stationarity = 0.0; // ||Qz + c - R'lambda||_inf against the (ridged) Q
    double infeasibility = 0.0; // max(r - Rz, 0)
};

/// Solve the QP through its LCP: z = Q^-1 (R'lambda - c).
inline QpSolution solve_qp(const Qp& qp, LemkeOptions opts = {})
{
    detail::check_qp(qp);
    const auto m = qp.dim();
    const auto p = qp.constraints();
    const auto f = detail::factor_q(qp.Q);

    QpSolution out;
    out.ridge = f.ridge;
    if (p == 0) {
        out.z = f.llt.solve(-qp.c);
        out.multipliers = Vector(0);
        return out;
    }

    const Lcp lcp = detail::reduce(qp, f);
    const LcpSolution sol = lemke_solve(lcp, opts);
    out.pivots = sol.pivots;

    if (sol.status == LcpStatus::RayTermination) {
        // A ray y >= 0 with R'y = 0 and r'y > 0 certifies {z : Rz >= r} = {}.
        const Vector& y = sol.ray;
        const double ynorm = y.cwiseAbs().maxCoeff();
        if (ynorm > 0.0) {
            const Vector yn = y / ynorm;
            const double rscale = std::max(1.0, qp.R.cwiseAbs().maxCoeff());
            const double ry = qp.r.dot(yn);
            if ((qp.R.transpose() * yn).cwiseAbs().maxCoeff() <= 1e-8 * rscale && ry > 1e-10)
                fail(ErrorCode::InfeasibleQp, "constraint system R z >= r is empty");
        }
        fail(ErrorCode::RayTermination, "Lemke terminated on a secondary ray");
    }

    out.multipliers = sol.lambda;
    out.z = f.llt.solve(qp.R.transpose() * sol.lambda - qp.c);

    // Snap coordinates sitting on simple bounds z_i >= r_j.
    const double zscale = std::max(1.0, out.z.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Index idx = -1;
        bool unit = true;
        for (Eigen::Index i = 0; i < m && unit; ++i) {
            if (qp.R(j, i) == 0.0) continue;
            if (qp.R(j, i) == 1.0 && idx < 0) idx = i;
            else unit = false;
        }
        if (unit && idx >= 0 && std::abs(out.z(idx) - qp.r(j)) <= 1e-12 * zscale)
            out.z(idx) = qp.r(j);
    }

    const Matrix Qr = qp.Q + f.ridge * Matrix::Identity(m, m);
    out.stationarity = (Qr * out.z + qp.c - qp.R.transpose() * sol.lambda).cwiseAbs().maxCoeff();
    out.infeasibility = std::max(0.0, (qp.r - qp.R * out.z).maxCoeff());
    return out;
}

} // namespace intreg
