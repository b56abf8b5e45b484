#pragma once

#include <intreg/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace intreg {

/// A compact real interval in midpoint/radius coordinates. The endpoint
/// form [inf, sup] is only a view; all arithmetic happens on (mid, spr).
class Interval {
public:
    constexpr Interval() = default;

    Interval(double mid, double spr) : mid_(mid), spr_(spr)
    {
        if (!std::isfinite(mid) || !std::isfinite(spr) || spr < 0.0)
            fail(ErrorCode::InvalidInterval,
                 "need finite mid and spr >= 0, got mid=" + std::to_string(mid) +
                     " spr=" + std::to_string(spr));
    }

    static Interval from_endpoints(double inf, double sup)
    {
        if (!(inf <= sup))
            fail(ErrorCode::InvalidInterval,
                 "inf > sup: [" + std::to_string(inf) + ", " + std::to_string(sup) + "]");
        return Interval((sup + inf) / 2.0, (sup - inf) / 2.0);
    }

    double mid() const noexcept { return mid_; }
    double spr() const noexcept { return spr_; }
    double inf() const noexcept { return mid_ - spr_; }
    double sup() const noexcept { return mid_ + spr_; }

    bool degenerate() const noexcept { return spr_ == 0.0; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double mid_ = 0.0;
    double spr_ = 0.0;
};

/// Weight between mid and spread discrepancies, strictly inside (0,1).
class Tau {
public:
    explicit Tau(double value = 0.5) : value_(value)
    {
        if (!(value > 0.0 && value < 1.0))
            fail(ErrorCode::InvalidTau, "tau must lie in (0,1), got " + std::to_string(value));
    }

    double value() const noexcept { return value_; }
    double mid_weight() const noexcept { return 1.0 - value_; }
    double spr_weight() const noexcept { return value_; }

private:
    double value_;
};

/// Minkowski combination a + delta*b.
inline Interval add_scaled(const Interval& a, double delta, const Interval& b)
{
    return Interval(a.mid() + delta * b.mid(), a.spr() + std::abs(delta) * b.spr());
}

inline Interval operator+(const Interval& a, const Interval& b) { return add_scaled(a, 1.0, b); }

inline Interval operator*(double delta, const Interval& a)
{
    return Interval(delta * a.mid(), std::abs(delta) * a.spr());
}

/// Hukuhara difference a -_H b, the C with b + C = a. Exists only when
/// spr b <= spr a; a relative slack of 1e-12 absorbs solver roundoff and the
/// resulting spread is clamped at zero.
inline Interval hukuhara_diff(const Interval& a, const Interval& b)
{
    const double slack = 1e-12 * std::max(1.0, a.spr());
    if (b.spr() > a.spr() + slack)
        fail(ErrorCode::NotHukuharaDecomposable,
             "spr of subtrahend " + std::to_string(b.spr()) + " exceeds spr of minuend " +
                 std::to_string(a.spr()));
    return Interval(a.mid() - b.mid(), std::max(0.0, a.spr() - b.spr()));
}

inline double d_tau_squared(const Interval& a, const Interval& b, Tau tau) noexcept
{
    const double dm = a.mid() - b.mid();
    const double ds = a.spr() - b.spr();
    return tau.mid_weight() * dm * dm + tau.spr_weight() * ds * ds;
}

inline double d_tau(const Interval& a, const Interval& b, Tau tau) noexcept
{
    return std::sqrt(d_tau_squared(a, b, tau));
}

/// Sample Aumann mean: componentwise mean of mids and spreads.
inline Interval aumann_mean(std::span<const Interval> s)
{
    if (s.empty())
        fail(ErrorCode::EmptySample, "aumann_mean of an empty sequence");
    double m = 0.0, r = 0.0;
    for (const auto& a : s) {
        m += a.mid();
        r += a.spr();
    }
    const auto n = static_cast<double>(s.size());
    return Interval(m / n, r / n);
}

/// (1-tau) cov(mid u, mid v) + tau cov(spr u, spr v), divisor n.
inline double d_tau_covariance(std::span<const Interval> u, std::span<const Interval> v, Tau tau)
{
    if (u.size() != v.size())
        fail(ErrorCode::LengthMismatch, "covariance of sequences of different length");
    if (u.size() < 2)
        fail(ErrorCode::EmptySample, "covariance needs at least two observations");
    const Interval mu = aumann_mean(u);
    const Interval mv = aumann_mean(v);
    double cm = 0.0, cs = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cm += (u[i].mid() - mu.mid()) * (v[i].mid() - mv.mid());
        cs += (u[i].spr() - mu.spr()) * (v[i].spr() - mv.spr());
    }
    const auto n = static_cast<double>(u.size());
    return tau.mid_weight() * cm / n + tau.spr_weight() * cs / n;
}

/// Frechet variance with respect to d_tau around the Aumann mean.
inline double d_tau_variance(std::span<const Interval> u, Tau tau)
{
    return d_tau_covariance(u, u, tau);
}

/// n observations of a response interval and k regressor intervals.
/// Regressors are stored row-major: x(j, i) is regressor i of observation j.
class IntervalSample {
public:
    IntervalSample() = default;

    IntervalSample(std::vector<Interval> y, std::vector<Interval> x, std::size_t k,
                   std::vector<std::string> names = {})
        : y_(std::move(y)), x_(std::move(x)), k_(k), names_(std::move(names))
    {
        if (y_.empty())
            fail(ErrorCode::EmptySample, "sample has no observations");
        if (k_ == 0)
            fail(ErrorCode::DimensionMismatch, "sample needs at least one regressor");
        if (x_.size() != y_.size() * k_)
            fail(ErrorCode::DimensionMismatch, "regressor grid is not n x k");
        if (names_.empty()) {
            names_.push_back("y");
            for (std::size_t i = 0; i < k_; ++i)
                names_.push_back("x" + std::to_string(i + 1));
        }
        if (names_.size() != k_ + 1)
            fail(ErrorCode::DimensionMismatch, "need k+1 variable names");
    }

    std::size_t n() const noexcept { return y_.size(); }
    std::size_t k() const noexcept { return k_; }

    const Interval& y(std::size_t j) const { return y_[j]; }
    const Interval& x(std::size_t j, std::size_t i) const { return x_[j * k_ + i]; }
    std::span<const Interval> y() const noexcept { return y_; }
    std::span<const Interval> row(std::size_t j) const
    {
        return std::span<const Interval>(x_).subspan(j * k_, k_);
    }
    const std::vector<std::string>& names() const noexcept { return names_; }

    /// Observations at the given row indices, in that order.
    IntervalSample subset(std::span<const std::size_t> rows) const
    {
        std::vector<Interval> y, x;
        y.reserve(rows.size());
        x.reserve(rows.size() * k_);
        for (auto j : rows) {
            y.push_back(y_.at(j));
            auto r = row(j);
            x.insert(x.end(), r.begin(), r.end());
        }
        return IntervalSample(std::move(y), std::move(x), k_, names_);
    }

    friend bool operator==(const IntervalSample&, const IntervalSample&) = default;

private:
    std::vector<Interval> y_;
    std::vector<Interval> x_;
    std::size_t k_ = 0;
    std::vector<std::string> names_;
};

} // namespace intreg
