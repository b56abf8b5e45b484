#pragma once

#include <intreg/error.hpp>
#include <intreg/interval.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>

namespace intreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Full keeps every mid/spread cross-relationship; ModelM fixes b3 = b4 = 0.
enum class ModelVariant { Full, ModelM };

constexpr std::string_view to_string(ModelVariant v) noexcept
{
    return v == ModelVariant::Full ? "full" : "model-m";
}

/// Real-valued system derived from an interval sample.
///
/// Column layout (Full):
///   mid part    (midX | sprX)    paired with A_m = (b1 | b4)
///   spread part (sprX | |midX|)  paired with A_s = (b2 | b3)
/// Under ModelM the mid part is midX alone (b1) and the spread part is sprX
/// alone (b2).
///
/// Fm/Fs are the column-centered parts, vm/vs the centered response mids and
/// spreads. The uncentered spread part `spread_rows` carries the feasibility
/// rows spread_rows * A_s <= sprY. When standardized, Fm/Fs columns (and the
/// matching spread_rows columns) are divided by `scale_mid`/`scale_spr`.
struct DesignSystem {
    ModelVariant variant = ModelVariant::Full;
    std::size_t k = 0;

    Matrix Fm;
    Matrix Fs;
    Vector vm;
    Vector vs;

    Matrix midX;    // n x k
    Matrix sprX;    // n x k
    Matrix absMidX; // n x k
    Vector midY;
    Vector sprY;

    Matrix spread_rows;  // uncentered spread part, scaled like Fs
    Vector meanMidXebl;  // column means of the uncentered mid part
    Vector meanSprXebl;  // column means of the uncentered spread part
    Interval meanY;

    Vector scale_mid; // all ones unless standardized
    Vector scale_spr;

    std::size_t n() const noexcept { return static_cast<std::size_t>(Fm.rows()); }
    Eigen::Index block_size() const noexcept { return Fm.cols(); }
};

/// Regression parameters B = (b1|b2|b3|b4) and the interval intercept.
struct Coefficients {
    Vector b1, b2, b3, b4;
    Interval delta;

    static Coefficients zero(std::size_t k)
    {
        const auto kk = static_cast<Eigen::Index>(k);
        return {Vector::Zero(kk), Vector::Zero(kk), Vector::Zero(kk), Vector::Zero(kk), Interval()};
    }

    std::size_t k() const noexcept { return static_cast<std::size_t>(b1.size()); }
};

/// Uncentered mid and spread parts for one observation row of the sample.
namespace detail {

inline void fill_parts(ModelVariant variant, std::span<const Interval> row, Eigen::Ref<Vector> mid_part,
                       Eigen::Ref<Vector> spr_part)
{
    const auto k = static_cast<Eigen::Index>(row.size());
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& x = row[static_cast<std::size_t>(i)];
        mid_part(i) = x.mid();
        spr_part(i) = x.spr();
        if (variant == ModelVariant::Full) {
            mid_part(k + i) = x.spr();
            spr_part(k + i) = std::abs(x.mid());
        }
    }
}

} // namespace detail

inline DesignSystem build_design(const IntervalSample& s, ModelVariant variant,
                                 bool standardize = false)
{
    const auto n = static_cast<Eigen::Index>(s.n());
    const auto k = static_cast<Eigen::Index>(s.k());
    if (n < 2)
        fail(ErrorCode::DegenerateSample, "need at least two observations, got " + std::to_string(n));

    const Eigen::Index p = variant == ModelVariant::Full ? 2 * k : k;

    DesignSystem d;
    d.variant = variant;
    d.k = s.k();
    d.midX.resize(n, k);
    d.sprX.resize(n, k);
    d.absMidX.resize(n, k);
    d.midY.resize(n);
    d.sprY.resize(n);
    Matrix mid_part(n, p), spr_part(n, p);

    for (Eigen::Index j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        for (Eigen::Index i = 0; i < k; ++i) {
            const auto& x = s.x(jj, static_cast<std::size_t>(i));
            d.midX(j, i) = x.mid();
            d.sprX(j, i) = x.spr();
            d.absMidX(j, i) = std::abs(x.mid());
        }
        Vector mrow(p), srow(p);
        detail::fill_parts(variant, s.row(jj), mrow, srow);
        mid_part.row(j) = mrow.transpose();
        spr_part.row(j) = srow.transpose();
        d.midY(j) = s.y(jj).mid();
        d.sprY(j) = s.y(jj).spr();
    }

    d.meanMidXebl = mid_part.colwise().mean().transpose();
    d.meanSprXebl = spr_part.colwise().mean().transpose();
    d.meanY = aumann_mean(s.y());

    d.Fm = mid_part.rowwise() - d.meanMidXebl.transpose();
    d.Fs = spr_part.rowwise() - d.meanSprXebl.transpose();
    d.vm = d.midY.array() - d.meanY.mid();
    d.vs = d.sprY.array() - d.meanY.spr();
    d.spread_rows = spr_part;

    d.scale_mid = Vector::Ones(p);
    d.scale_spr = Vector::Ones(p);
    if (standardize) {
        const double nn = static_cast<double>(n);
        for (Eigen::Index c = 0; c < p; ++c) {
            const double sm = d.Fm.col(c).norm() / std::sqrt(nn);
            const double ss = d.Fs.col(c).norm() / std::sqrt(nn);
            if (sm > 0.0) d.scale_mid(c) = sm;
            if (ss > 0.0) d.scale_spr(c) = ss;
        }
        d.Fm = d.Fm * d.scale_mid.cwiseInverse().asDiagonal();
        d.Fs = d.Fs * d.scale_spr.cwiseInverse().asDiagonal();
        d.spread_rows = d.spread_rows * d.scale_spr.cwiseInverse().asDiagonal();
    }
    return d;
}

/// Feasibility system R a >= r for the spread block: a >= 0 and
/// spread_rows * a <= sprY.
struct SpreadConstraints {
    Matrix R;
    Vector r;
};

inline SpreadConstraints spread_constraints(const DesignSystem& d)
{
    const auto p = d.block_size();
    const auto n = static_cast<Eigen::Index>(d.n());
    SpreadConstraints c;
    c.R.resize(p + n, p);
    c.R.topRows(p) = Matrix::Identity(p, p);
    c.R.bottomRows(n) = -d.spread_rows;
    c.r.resize(p + n);
    c.r.head(p).setZero();
    c.r.tail(n) = -d.sprY;
    return c;
}

/// Assemble coefficients from block solutions expressed in the design's
/// (possibly standardized) coordinates. The intercept is left at zero.
inline Coefficients coefficients_from_blocks(const DesignSystem& d, const Vector& a_mid,
                                             const Vector& a_spr)
{
    const auto k = static_cast<Eigen::Index>(d.k);
    if (a_mid.size() != d.block_size() || a_spr.size() != d.block_size())
        fail(ErrorCode::DimensionMismatch, "block vector does not match design");
    const Vector am = a_mid.cwiseQuotient(d.scale_mid);
    const Vector as = a_spr.cwiseQuotient(d.scale_spr);
    auto c = Coefficients::zero(d.k);
    c.b1 = am.head(k);
    c.b2 = as.head(k);
    if (d.variant == ModelVariant::Full) {
        c.b4 = am.tail(k);
        c.b3 = as.tail(k);
    }
    return c;
}

/// Inverse of coefficients_from_blocks for the mid block, in design coordinates.
inline Vector mid_block(const DesignSystem& d, const Coefficients& c)
{
    Vector a(d.block_size());
    const auto k = static_cast<Eigen::Index>(d.k);
    a.head(k) = c.b1;
    if (d.variant == ModelVariant::Full) a.tail(k) = c.b4;
    return a.cwiseProduct(d.scale_mid);
}

inline Vector spr_block(const DesignSystem& d, const Coefficients& c)
{
    Vector a(d.block_size());
    const auto k = static_cast<Eigen::Index>(d.k);
    a.head(k) = c.b2;
    if (d.variant == ModelVariant::Full) a.tail(k) = c.b3;
    return a.cwiseProduct(d.scale_spr);
}

/// Fitted interval for one regressor row:
///   mid = midx'b1 + sprx'b4 + delta.mid
///   spr = sprx'b2 + |midx|'b3 + delta.spr
inline Interval predict(const Coefficients& c, std::span<const Interval> x)
{
    const auto k = static_cast<Eigen::Index>(x.size());
    if (c.b1.size() != k || c.b2.size() != k || c.b3.size() != k || c.b4.size() != k)
        fail(ErrorCode::DimensionMismatch, "coefficient length does not match regressor row");
    double m = c.delta.mid();
    double r = c.delta.spr();
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& xi = x[static_cast<std::size_t>(i)];
        m += xi.mid() * c.b1(i) + xi.spr() * c.b4(i);
        r += xi.spr() * c.b2(i) + std::abs(xi.mid()) * c.b3(i);
    }
    // b2, b3 >= 0 keeps r >= 0 in exact arithmetic; clamp roundoff only.
    return Interval(m, std::max(0.0, r));
}

/// The non-intercept part X^ebl B for one row, as raw (mid, spr) values.
/// Spread may be negative when b2/b3 carry negative entries.
struct RawInterval {
    double mid = 0.0;
    double spr = 0.0;
};

inline RawInterval linear_part(const Coefficients& c, std::span<const Interval> x)
{
    RawInterval out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.mid += x[i].mid() * c.b1(ii) + x[i].spr() * c.b4(ii);
        out.spr += x[i].spr() * c.b2(ii) + std::abs(x[i].mid()) * c.b3(ii);
    }
    return out;
}

} // namespace intreg
