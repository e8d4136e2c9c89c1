#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "slq/error.hpp"
#include "slq/expr.hpp"

namespace slq {

/// Piecewise expression. `breakpoints` is strictly increasing and the
/// segment list has one entry per open interval between consecutive
/// breakpoints plus the two unbounded end segments, so
/// segments.size() == breakpoints.size() + 1. At a breakpoint the right
/// segment governs (one-sided convention).
class PiecewiseFn {
public:
    /// Constant zero.
    PiecewiseFn() : segments_{Expr::number(0.0)} {}

    explicit PiecewiseFn(Expr single) : segments_{std::move(single)} {}

    PiecewiseFn(std::vector<double> breakpoints, std::vector<Expr> segments)
        : breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
        if (segments_.size() != breakpoints_.size() + 1)
            throw Error("piecewise: segment count must be breakpoint count + 1");
        for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
            if (!(breakpoints_[i] < breakpoints_[i + 1]))
                throw Error("piecewise: breakpoints not strictly increasing");
        for (double b : breakpoints_)
            if (!std::isfinite(b)) throw Error("piecewise: breakpoint not finite");
    }

    static PiecewiseFn constant(double v) { return PiecewiseFn(Expr::number(v)); }

    /// Index of the segment governing x (right convention at breakpoints).
    std::size_t segment_index(double x) const {
        return static_cast<std::size_t>(
            std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
    }

    /// Index of the segment covering the open interval (lo, hi). The
    /// interval must not straddle a breakpoint.
    std::size_t segment_index_of_interval(double lo, double hi) const {
        return segment_index(0.5 * (lo + hi));
    }

    /// Checked evaluation: throws EvalError (with segment index) when the
    /// governing segment produces a non-finite value.
    double operator()(double x) const {
        const std::size_t k = segment_index(x);
        const double v = segments_[k](x);
        if (!std::isfinite(v))
            throw EvalError("piecewise: non-finite value in segment " + std::to_string(k) +
                                " at x = " + std::to_string(x),
                            x, static_cast<long>(k));
        return v;
    }

    /// Unchecked evaluation; NaN/inf pass through.
    double eval_unchecked(double x) const noexcept { return segments_[segment_index(x)](x); }

    const Expr& segment(std::size_t i) const { return segments_[i]; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    std::size_t segment_count() const { return segments_.size(); }

private:
    std::vector<double> breakpoints_;
    std::vector<Expr> segments_;
};

/// Left-continuous step function: value(x) is the sum of the heights of all
/// jumps located strictly left of x.
class StepFn {
public:
    StepFn() = default;

    explicit StepFn(std::vector<std::pair<double, double>> jumps) : jumps_(std::move(jumps)) {
        for (std::size_t i = 0; i + 1 < jumps_.size(); ++i)
            if (!(jumps_[i].first < jumps_[i + 1].first))
                throw Error("step function: jump locations not strictly increasing");
        for (const auto& [loc, h] : jumps_)
            if (!std::isfinite(loc) || !std::isfinite(h))
                throw Error("step function: non-finite jump data");
    }

    double operator()(double x) const noexcept {
        double v = 0.0;
        for (const auto& [loc, h] : jumps_) {
            if (loc < x) v += h;
            else break;
        }
        return v;
    }

    const std::vector<std::pair<double, double>>& jumps() const { return jumps_; }
    bool empty() const { return jumps_.empty(); }

private:
    std::vector<std::pair<double, double>> jumps_;
};

enum class GrowthClass { Power, Exponential, Bounded, Unspecified };

/// User-declared asymptotic behavior of p toward one infinity. `value` is
/// the exponent for Power and the rate for Exponential; unused otherwise.
struct GrowthTag {
    GrowthClass cls = GrowthClass::Unspecified;
    double value = 0.0;
};

/// Coefficients of one interval with no interior breakpoints, frozen to
/// their governing segments. Evaluating a slice at its endpoints yields the
/// one-sided limits from inside the interval.
struct CoefficientSlice {
    Expr p, Q_ac, s, r;
    double Q_jump = 0.0;

    /// p(x), checked: throws DegeneratePointError at zeros of p and
    /// EvalError on non-finite values.
    double p_checked(double x) const {
        const double v = p(x);
        if (!std::isfinite(v)) throw EvalError("coefficient p is not finite", x);
        if (v == 0.0) throw DegeneratePointError(x);
        return v;
    }
    double Q(double x) const {
        const double v = Q_ac(x) + Q_jump;
        if (!std::isfinite(v)) throw EvalError("coefficient Q is not finite", x);
        return v;
    }
    double s_at(double x) const {
        const double v = s(x);
        if (!std::isfinite(v)) throw EvalError("coefficient s is not finite", x);
        return v;
    }
    double r_at(double x) const {
        const double v = r(x);
        if (!std::isfinite(v)) throw EvalError("coefficient r is not finite", x);
        return v;
    }
};

/// The coefficient tuple (p, Q, s, r) with Q split into an absolutely
/// continuous part and a jump part, plus declared growth of p.
struct CoefficientSet {
    PiecewiseFn p = PiecewiseFn::constant(1.0);
    PiecewiseFn Q_ac;
    StepFn Q_jump;
    PiecewiseFn s;
    PiecewiseFn r;
    GrowthTag p_growth_plus;
    GrowthTag p_growth_minus;

    double p_at(double x) const { return p(x); }
    double Q_at(double x) const { return Q_ac(x) + Q_jump(x); }
    double s_at(double x) const { return s(x); }
    double r_at(double x) const { return r(x); }

    /// Breakpoints and jump locations strictly inside (lo, hi), sorted and
    /// deduplicated. Order of lo/hi does not matter.
    std::vector<double> interior_breakpoints(double lo, double hi) const {
        if (lo > hi) std::swap(lo, hi);
        std::vector<double> pts;
        auto take = [&](const std::vector<double>& src) {
            for (double b : src)
                if (b > lo && b < hi) pts.push_back(b);
        };
        take(p.breakpoints());
        take(Q_ac.breakpoints());
        take(s.breakpoints());
        take(r.breakpoints());
        for (const auto& [loc, h] : Q_jump.jumps())
            if (loc > lo && loc < hi) pts.push_back(loc);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

    /// Freezes the governing segments over the breakpoint-free open
    /// interval (lo, hi).
    CoefficientSlice slice(double lo, double hi) const {
        if (lo > hi) std::swap(lo, hi);
        const double mid = 0.5 * (lo + hi);
        return CoefficientSlice{p.segment(p.segment_index(mid)),
                                Q_ac.segment(Q_ac.segment_index(mid)),
                                s.segment(s.segment_index(mid)),
                                r.segment(r.segment_index(mid)),
                                Q_jump(mid)};
    }
};

} // namespace slq
