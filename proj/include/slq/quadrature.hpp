#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "slq/error.hpp"

namespace slq {

/// Outcome of an adaptive quadrature. When `converged` is false the value
/// is the best estimate after exhausting the subdivision budget.
template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    bool converged = false;
    int subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kGK15Nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr std::array<double, 8> kGK15Weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGauss7Weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double quad_abs(const T& v) {
    return std::abs(v);
}

/// One GK 7-15 panel on [a, b]. Throws EvalError when the integrand yields
/// a non-finite sample (carrying the node).
template <class F, class T>
std::pair<T, double> gk15_panel(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T kronrod{};
    T gauss{};
    for (std::size_t i = 0; i < kGK15Nodes.size(); ++i) {
        const double off = half * kGK15Nodes[i];
        T sum{};
        if (kGK15Nodes[i] == 0.0) {
            sum = f(mid);
            if (!std::isfinite(quad_abs(sum)))
                throw EvalError("quadrature: non-finite integrand sample", mid);
        } else {
            const double xl = mid - off;
            const double xr = mid + off;
            const T fl = f(xl);
            if (!std::isfinite(quad_abs(fl))) throw EvalError("quadrature: non-finite integrand sample", xl);
            const T fr = f(xr);
            if (!std::isfinite(quad_abs(fr))) throw EvalError("quadrature: non-finite integrand sample", xr);
            sum = fl + fr;
        }
        kronrod += kGK15Weights[i] * sum;
        if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * sum;
    }
    kronrod = half * kronrod;
    gauss = half * gauss;
    // The plain 15-vs-7 difference overestimates the Kronrod error, which
    // only costs a few extra splits.
    const double diff = quad_abs(kronrod - gauss);
    return {kronrod, std::max(diff, 1e-300)};
}

} // namespace detail

/// Adaptive Gauss-Kronrod 7-15 over [a, b] (a > b integrates backwards).
/// Splits the interval with the largest error estimate until the global
/// estimate meets max(atol, rtol * |I|) or the budget runs out.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double rtol = 1e-10, double atol = 1e-12,
                        int max_subdivisions = 4000) -> QuadratureResult<decltype(f(a))> {
    using T = decltype(f(a));
    QuadratureResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    struct Piece {
        double a, b, err;
        T val;
    };
    std::vector<Piece> pieces;
    auto [v0, e0] = detail::gk15_panel<F, T>(f, a, b);
    pieces.push_back({a, b, e0, v0});

    for (;;) {
        T total{};
        double err = 0.0;
        for (const auto& p : pieces) {
            total += p.val;
            err += p.err;
        }
        const double tol = std::max(atol, rtol * detail::quad_abs(total));
        out.value = sign * total;
        out.error = err;
        out.subdivisions = static_cast<int>(pieces.size());
        if (err <= tol) {
            out.converged = true;
            return out;
        }
        if (static_cast<int>(pieces.size()) >= max_subdivisions) return out;

        std::size_t worst = 0;
        for (std::size_t i = 1; i < pieces.size(); ++i)
            if (pieces[i].err > pieces[worst].err) worst = i;
        const Piece p = pieces[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (!(p.a < mid && mid < p.b)) return out; // interval exhausted at machine precision
        auto [vl, el] = detail::gk15_panel<F, T>(f, p.a, mid);
        auto [vr, er] = detail::gk15_panel<F, T>(f, mid, p.b);
        pieces[worst] = {p.a, mid, el, vl};
        pieces.push_back({mid, p.b, er, vr});
    }
}

/// Adaptive quadrature over [a, b] pre-split at the given interior points
/// (piecewise-smooth integrands should pass their breakpoints here).
template <class F>
auto integrate_piecewise(F&& f, double a, double b, const std::vector<double>& interior, double rtol = 1e-10,
                         double atol = 1e-12, int max_subdivisions = 4000) -> QuadratureResult<decltype(f(a))> {
    using T = decltype(f(a));
    double sign = 1.0;
    double lo = a, hi = b;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    std::vector<double> cuts{lo};
    for (double c : interior)
        if (c > lo && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    QuadratureResult<T> out;
    out.converged = true;
    const std::size_t pieces = cuts.size() - 1;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto r = integrate_adaptive(f, cuts[i], cuts[i + 1], rtol, atol / static_cast<double>(pieces),
                                    max_subdivisions / static_cast<int>(pieces) + 15);
        out.value += r.value;
        out.error += r.error;
        out.subdivisions += r.subdivisions;
        out.converged = out.converged && r.converged;
    }
    out.value = sign * out.value;
    return out;
}

/// Throwing convenience wrapper.
template <class F>
auto integrate_or_throw(F&& f, double a, double b, const std::vector<double>& interior = {}, double rtol = 1e-10,
                        double atol = 1e-12) -> decltype(f(a)) {
    auto r = integrate_piecewise(std::forward<F>(f), a, b, interior, rtol, atol);
    if (!r.converged)
        throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                              "], error estimate " + std::to_string(r.error));
    return r.value;
}

} // namespace slq
