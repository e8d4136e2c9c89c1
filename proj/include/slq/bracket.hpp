#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/quadrature.hpp"
#include "slq/trajectory.hpp"

namespace slq {

/// The Lagrange bracket [u,v](t) = u conj(v^[1]) - u^[1] conj(v).
struct BracketValue {
    double t = 0.0;
    std::complex<double> value{};
};

inline BracketValue bracket_at(const QuasiTrajectory& u, const QuasiTrajectory& v, double t) {
    if (!u.contains(t) || !v.contains(t))
        throw Error("bracket_at: t = " + std::to_string(t) + " outside a trajectory span");
    const QuasiState su = u.state(t);
    const QuasiState sv = v.state(t);
    return {t, su.u * std::conj(sv.u1) - su.u1 * std::conj(sv.u)};
}

/// Residual of the Lagrange identity on [a, b],
///
///   | int_a^b fu conj(v) - int_a^b u conj(fv) - [u,v]_a^b |,
///
/// where fu, fv are the inhomogeneities used to produce u and v at the
/// same real shift (the lambda terms cancel; pass nullopt for homogeneous
/// solutions). A small value certifies the identity.
inline double lagrange_residual(const CoefficientSet& c, const QuasiTrajectory& u,
                                const std::optional<PiecewiseFn>& fu, const QuasiTrajectory& v,
                                const std::optional<PiecewiseFn>& fv, double a, double b) {
    if (!u.contains(a) || !u.contains(b) || !v.contains(a) || !v.contains(b))
        throw Error("lagrange_residual: [a, b] not inside both spans");

    std::vector<double> cuts = c.interior_breakpoints(a, b);
    auto add_cuts = [&](const std::optional<PiecewiseFn>& f) {
        if (!f) return;
        for (double x : f->breakpoints())
            if (x > std::min(a, b) && x < std::max(a, b)) cuts.push_back(x);
    };
    add_cuts(fu);
    add_cuts(fv);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::complex<double> lhs{};
    if (fu) {
        lhs += integrate_or_throw(
            [&](double x) { return std::complex<double>((*fu)(x), 0.0) * std::conj(v.u(x)); }, a, b, cuts, 1e-10,
            1e-13);
    }
    if (fv) {
        lhs -= integrate_or_throw([&](double x) { return u.u(x) * std::conj(std::complex<double>((*fv)(x), 0.0)); },
                                  a, b, cuts, 1e-10, 1e-13);
    }
    const std::complex<double> jump = bracket_at(u, v, b).value - bracket_at(u, v, a).value;
    return std::abs(lhs - jump);
}

/// Estimate of lim [u,v](t) along one direction, evaluated at the given
/// window points (increasing |t|). `converged` demands that successive
/// differences shrink monotonically (up to noise) and end below
/// 1e-6 (1 + |estimate|).
struct TailLimit {
    std::complex<double> estimate{};
    bool converged = false;
    std::vector<BracketValue> values;
};

enum class TailDirection { Plus, Minus };

inline TailLimit bracket_tail_limit(const QuasiTrajectory& u, const QuasiTrajectory& v, TailDirection dir,
                                    const std::vector<double>& window_ts) {
    if (window_ts.size() < 2) throw Error("bracket_tail_limit: need at least two window points");
    TailLimit out;
    for (std::size_t i = 0; i < window_ts.size(); ++i) {
        const double t = window_ts[i];
        if (dir == TailDirection::Plus && t < 0.0)
            throw Error("bracket_tail_limit: + direction expects nonnegative window points");
        if (dir == TailDirection::Minus && t > 0.0)
            throw Error("bracket_tail_limit: - direction expects nonpositive window points");
        if (i > 0 && !(std::fabs(t) > std::fabs(window_ts[i - 1])))
            throw Error("bracket_tail_limit: window points must increase in |t|");
        out.values.push_back(bracket_at(u, v, t));
    }
    out.estimate = out.values.back().value;

    const double scale = 1.0 + std::abs(out.estimate);
    const double noise_floor = 1e-9 * scale;
    bool monotone = true;
    double prev_diff = 0.0;
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        const double d = std::abs(out.values[i].value - out.values[i - 1].value);
        if (i > 1 && d > prev_diff && d > noise_floor) monotone = false;
        prev_diff = d;
    }
    out.converged = monotone && prev_diff <= 1e-6 * scale;
    return out;
}

} // namespace slq
