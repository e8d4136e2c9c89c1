#pragma once

#include <cmath>
#include <complex>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"

namespace slq {

using Complex = std::complex<double>;

struct Matrix2c {
    Complex a11, a12, a21, a22;
};

namespace detail {

/// Entries of A(x) from pointwise coefficient values. The spectral shift
/// replaces s by s - lambda so that the homogeneous system encodes
/// l[u] = lambda u.
inline Matrix2c shin_zettl_entries(double p, double Q, double r, double s, double lambda) {
    const Complex i{0.0, 1.0};
    return Matrix2c{(Q + i * r) / p, Complex{1.0 / p, 0.0},
                    Complex{-(Q * Q + r * r) / p + s - lambda, 0.0}, -(Q - i * r) / p};
}

} // namespace detail

/// Evaluator for the 2x2 system matrix A(x) built from a coefficient set,
/// with a real spectral shift lambda:
///
///   a11 = (Q+ir)/p   a12 = 1/p
///   a21 = -(Q^2+r^2)/p + s - lambda   a22 = -(Q-ir)/p
///
/// where Q = Q_ac + Q_jump. Entries use the one-sided conventions of the
/// coefficient types at breakpoints.
class ShinZettlMatrix {
public:
    explicit ShinZettlMatrix(const CoefficientSet& c, double lambda = 0.0) : c_(&c), lambda_(lambda) {}

    Matrix2c at(double x) const {
        const double p = c_->p(x);
        if (p == 0.0) throw DegeneratePointError(x);
        return detail::shin_zettl_entries(p, c_->Q_at(x), c_->r(x), c_->s(x), lambda_);
    }

    double lambda() const noexcept { return lambda_; }
    const CoefficientSet& coefficients() const noexcept { return *c_; }

private:
    const CoefficientSet* c_;
    double lambda_;
};

inline Matrix2c matrix_at(const ShinZettlMatrix& A, double x) { return A.at(x); }

/// The first quasi-derivative u^[1] = p u' - (Q + i r) u at x.
inline Complex quasi_derivative_1(const CoefficientSet& c, Complex u, Complex du, double x) {
    const Complex i{0.0, 1.0};
    return c.p(x) * du - (c.Q_at(x) + i * c.r(x)) * u;
}

/// Applies the differential expression to a smooth test expression at a
/// point where all coefficients are classical, via the quasi-derivative
/// chain with central finite differences:
///
///   l[u] = -u^[2],  u^[2] = (u^[1])' + ((Q-ir)/p) u^[1] + ((Q^2+r^2)/p - s) u.
///
/// Exists only for cross-checks on smooth data. Throws when x is within
/// 3h of a breakpoint or jump (h = max(1e-5, 1e-5 |x|)).
inline Complex apply_l_smooth(const CoefficientSet& c, const Expr& u, double x) {
    const double h = std::max(1e-5, 1e-5 * std::fabs(x));
    const auto near_pts = c.interior_breakpoints(x - 4.0 * h, x + 4.0 * h);
    for (double b : near_pts)
        if (std::fabs(b - x) < 3.0 * h)
            throw Error("apply_l_smooth: x = " + std::to_string(x) +
                        " is within the finite-difference stencil of a breakpoint");

    const Complex i{0.0, 1.0};
    auto du = [&](double t) { return (u(t + h) - u(t - h)) / (2.0 * h); };
    auto u1 = [&](double t) -> Complex {
        const double p = c.p(t);
        if (p == 0.0) throw DegeneratePointError(t);
        return p * du(t) - (c.Q_at(t) + i * c.r(t)) * u(t);
    };

    const Complex du1 = (u1(x + h) - u1(x - h)) / (2.0 * h);
    const double p = c.p(x);
    if (p == 0.0) throw DegeneratePointError(x);
    const double Q = c.Q_at(x);
    const double r = c.r(x);
    const double s = c.s(x);
    const Complex u2 = du1 + ((Q - i * r) / p) * u1(x) + ((Q * Q + r * r) / p - s) * u(x);
    if (!std::isfinite(std::abs(u2))) throw EvalError("apply_l_smooth: non-finite result", x);
    return -u2;
}

} // namespace slq
