#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/shinzettl.hpp"
#include "slq/trajectory.hpp"

namespace slq {

/// Stepper tolerances. `max_step` caps the step length so the cubic dense
/// output stays accurate between nodes; 0 means 1/64 of the span.
struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
    long max_steps = 1'000'000;
    double max_step = 0.0;
};

namespace detail {

struct SystemState {
    Complex u, q;
};

inline SystemState operator+(SystemState a, SystemState b) { return {a.u + b.u, a.q + b.q}; }
inline SystemState operator*(double c, SystemState a) { return {c * a.u, c * a.q}; }

/// Right-hand side of y' = A(x) y + (0, -f(x)) on a breakpoint-free slice.
struct SliceSystem {
    CoefficientSlice coeffs;
    double lambda = 0.0;
    const Expr* forcing = nullptr; // frozen segment of the inhomogeneity

    SystemState operator()(double x, const SystemState& y) const {
        const double p = coeffs.p_checked(x);
        const double Q = coeffs.Q(x);
        const double r = coeffs.r_at(x);
        const double s = coeffs.s_at(x);
        const Matrix2c A = shin_zettl_entries(p, Q, r, s, lambda);
        SystemState dy{A.a11 * y.u + A.a12 * y.q, A.a21 * y.u + A.a22 * y.q};
        if (forcing != nullptr) {
            const double f = (*forcing)(x);
            if (!std::isfinite(f)) throw EvalError("inhomogeneity is not finite", x);
            dy.q -= f;
        }
        return dy;
    }
};

// Dormand-Prince 5(4) tableau.
inline constexpr double kDP_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDP_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double kDP_err[7] = {71.0 / 57600,      0.0,        -71.0 / 16695, 71.0 / 1920,
                                      -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

/// Integrates one breakpoint-free stretch [xa -> xb] (either orientation),
/// appending dense-output pieces and advancing y. FSAL Dormand-Prince with
/// a PI step controller.
inline void integrate_slice(const SliceSystem& sys, double xa, double xb, SystemState& y, const Tolerances& tol,
                            double max_step_abs, long& steps_left, std::vector<QuasiTrajectory::Piece>& pieces) {
    const double dir = (xb >= xa) ? 1.0 : -1.0;
    const double span = std::fabs(xb - xa);
    if (span == 0.0) return;

    double x = xa;
    SystemState f_cur = sys(x, y);
    double h_abs = std::min({span, max_step_abs, std::max(span / 16.0, 1e-10)});
    double err_prev = 1.0;

    while (dir * (xb - x) > 0.0) {
        if (--steps_left < 0) throw IntegratorError("integrator: step budget exhausted", x);

        const double remaining = std::fabs(xb - x);
        bool last = false;
        if (h_abs >= remaining * (1.0 - 1e-14)) {
            h_abs = remaining;
            last = true;
        }
        const double h = dir * h_abs;

        std::array<SystemState, 7> k;
        k[0] = f_cur;
        bool stage_ok = true;
        SystemState y_new{};
        try {
            for (int i = 1; i < 7; ++i) {
                SystemState acc = y;
                for (int j = 0; j < i; ++j) acc = acc + (h * kDP_a[i][j]) * k[j];
                k[i] = sys(x + kDP_c[i] * h, acc);
            }
            SystemState acc = y;
            for (int j = 0; j < 6; ++j) acc = acc + (h * kDP_a[6][j]) * k[j];
            y_new = acc;
        } catch (const DegeneratePointError&) {
            // A stage landed on a zero of p inside the slice; shrink and
            // retry, and report underflow if that cannot help.
            stage_ok = false;
        }

        double err = 0.0;
        if (stage_ok) {
            Complex eu{}, eq{};
            for (int j = 0; j < 7; ++j) {
                eu += (h * kDP_err[j]) * k[j].u;
                eq += (h * kDP_err[j]) * k[j].q;
            }
            const double sc_u = tol.abs + tol.rel * std::max(std::abs(y.u), std::abs(y_new.u));
            const double sc_q = tol.abs + tol.rel * std::max(std::abs(y.q), std::abs(y_new.q));
            const double ru = std::abs(eu) / sc_u;
            const double rq = std::abs(eq) / sc_q;
            err = std::sqrt(0.5 * (ru * ru + rq * rq));
            if (!std::isfinite(err)) {
                stage_ok = false;
                err = 1e10;
            }
        }

        if (stage_ok && err <= 1.0) {
            const double x_next = last ? xb : x + h;
            const SystemState f_new = k[6]; // FSAL: k7 = f(x+h, y_new)
            QuasiTrajectory::Piece piece;
            if (dir > 0)
                piece = {x, x_next, y.u, y.q, y_new.u, y_new.q, f_cur.u, f_cur.q, f_new.u, f_new.q};
            else
                piece = {x_next, x, y_new.u, y_new.q, y.u, y.q, f_new.u, f_new.q, f_cur.u, f_cur.q};
            pieces.push_back(piece);

            x = x_next;
            y = y_new;
            f_cur = f_new;

            const double e = std::max(err, 1e-30);
            double factor = 0.9 * std::pow(e, -0.17) * std::pow(err_prev, 0.04);
            factor = std::clamp(factor, 0.2, 5.0);
            h_abs = std::min(h_abs * factor, max_step_abs);
            err_prev = e;
        } else {
            const double shrink = stage_ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            h_abs *= std::min(shrink, 0.9);
            if (h_abs < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x)))
                throw IntegratorError("integrator: step size underflow near x = " + std::to_string(x), x);
        }
    }
}

} // namespace detail

/// Solves y' = A(x) y + (0, -f(x)) for y = (u, u^[1]) from y0 at the start
/// of the span to its end, restarting exactly at every breakpoint and jump
/// location with carried state. The optional inhomogeneity f realizes
/// l[u] = lambda u + f.
inline QuasiTrajectory solve_system(const CoefficientSet& c, double lambda, double x_from, double x_to,
                                    const QuasiState& y0, const std::optional<PiecewiseFn>& f = std::nullopt,
                                    const Tolerances& tol = {}) {
    if (!(std::isfinite(x_from) && std::isfinite(x_to)) || x_from == x_to)
        throw Error("solve_system: span must be finite and nondegenerate");
    if (std::fabs(y0.x - x_from) > 1e-9 * (1.0 + std::fabs(x_from)))
        throw Error("solve_system: initial state must sit at the span start");
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0)) throw Error("solve_system: tolerances must be positive");

    const Direction dir = (x_to > x_from) ? Direction::Forward : Direction::Backward;
    const double span = std::fabs(x_to - x_from);
    const double max_step_abs = tol.max_step > 0.0 ? tol.max_step : span / 64.0;

    // Stops: breakpoints of all coefficients (and of f) interior to the span.
    std::vector<double> stops = c.interior_breakpoints(x_from, x_to);
    if (f) {
        for (double b : f->breakpoints()) {
            const double lo = std::min(x_from, x_to), hi = std::max(x_from, x_to);
            if (b > lo && b < hi) stops.push_back(b);
        }
        std::sort(stops.begin(), stops.end());
        stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    }
    if (dir == Direction::Backward) std::reverse(stops.begin(), stops.end());
    stops.push_back(x_to);

    detail::SystemState y{y0.u, y0.u1};
    long steps_left = tol.max_steps;
    std::vector<QuasiTrajectory::Piece> pieces;

    double x = x_from;
    for (double stop : stops) {
        const CoefficientSlice slice = c.slice(x, stop);
        detail::SliceSystem sys{slice, lambda, nullptr};
        const Expr* fseg = nullptr;
        if (f) {
            fseg = &f->segment(f->segment_index_of_interval(std::min(x, stop), std::max(x, stop)));
            sys.forcing = fseg;
        }
        detail::integrate_slice(sys, x, stop, y, tol, max_step_abs, steps_left, pieces);
        x = stop;
    }

    if (dir == Direction::Backward) std::reverse(pieces.begin(), pieces.end());
    return QuasiTrajectory(std::move(pieces), lambda, dir);
}

/// The fundamental pair theta, phi with quasi-initial data (1, 0) and
/// (0, 1) at the span start; their bracket at the start is 1.
inline std::pair<QuasiTrajectory, QuasiTrajectory> fundamental_pair(const CoefficientSet& c, double lambda,
                                                                    double x_from, double x_to,
                                                                    const Tolerances& tol = {}) {
    QuasiTrajectory theta =
        solve_system(c, lambda, x_from, x_to, QuasiState{x_from, {1.0, 0.0}, {0.0, 0.0}}, std::nullopt, tol);
    QuasiTrajectory phi =
        solve_system(c, lambda, x_from, x_to, QuasiState{x_from, {0.0, 0.0}, {1.0, 0.0}}, std::nullopt, tol);
    return {std::move(theta), std::move(phi)};
}

} // namespace slq
