#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/integrator.hpp"

namespace slq {

/// Dirichlet eigenvalue approximations on a finite interval, strictly
/// increasing, with the shooting residual |u(beta; lambda)| and the final
/// bisection bracket per eigenvalue.
struct EigenResult {
    std::vector<double> lambdas;
    std::vector<double> residuals;
    std::vector<std::pair<double, double>> brackets;
    int k_first = 1;
    bool complex_mode = false; // r != 0 path (experimental)

    /// CSV export: header `k,lambda,residual,bracket_lo,bracket_hi`.
    void write_csv(std::ostream& os) const {
        os << "k,lambda,residual,bracket_lo,bracket_hi\n";
        char buf[160];
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g\n", k_first + static_cast<int>(i),
                          lambdas[i], residuals[i], brackets[i].first, brackets[i].second);
            os << buf;
        }
    }
};

/// Shooting value for the Dirichlet problem: integrates from quasi-initial
/// data (u, u^[1]) = (0, 1) at the left end and returns u at the right end.
/// For real data with r = 0 the value is real; otherwise the real part is
/// returned and `imag_warning` (if given) is set.
inline double dirichlet_shoot(const CoefficientSet& c, double lambda, double span_lo, double span_hi,
                              const Tolerances& tol = {}, bool* imag_warning = nullptr) {
    const QuasiState y0{span_lo, {0.0, 0.0}, {1.0, 0.0}};
    const QuasiTrajectory traj = solve_system(c, lambda, span_lo, span_hi, y0, std::nullopt, tol);
    const std::complex<double> u_end = traj.u(span_hi);
    if (imag_warning != nullptr)
        *imag_warning = std::fabs(u_end.imag()) > 1e-6 * (1.0 + std::fabs(u_end.real()));
    return u_end.real();
}

namespace detail {

inline bool r_is_identically_zero(const CoefficientSet& c) {
    for (std::size_t i = 0; i < c.r.segment_count(); ++i)
        if (c.r.segment(i).str() != "0") return false;
    return true;
}

inline std::complex<double> shoot_complex(const CoefficientSet& c, double lambda, double lo, double hi,
                                          const Tolerances& tol) {
    const QuasiState y0{lo, {0.0, 0.0}, {1.0, 0.0}};
    return solve_system(c, lambda, lo, hi, y0, std::nullopt, tol).u(hi);
}

} // namespace detail

/// Default scan range [-50, 50 count^2 / (b-a)^2] with 400 count steps,
/// sized from the free-case eigenvalue spacing.
struct ScanRange {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

inline ScanRange default_scan_range(double span_lo, double span_hi, int count) {
    const double len = span_hi - span_lo;
    return {-50.0, 50.0 * count * count / (len * len), 400 * count};
}

/// Finds the first `count` Dirichlet eigenvalues by scanning the shooting
/// value for sign changes and refining each bracket with bisection plus a
/// secant polish. The scan runs at a loosened tolerance; refinement uses
/// the requested one. Throws when the scan finds fewer sign changes than
/// requested (the message reports how many).
///
/// With r != 0 the shooting value is complex and roots are located as
/// minima of |u(beta)|^2 by golden-section refinement; this path is
/// experimental and flagged in the result.
inline EigenResult eigenvalues_on_interval(const CoefficientSet& c, double span_lo, double span_hi, int count,
                                           std::optional<ScanRange> scan = std::nullopt,
                                           const Tolerances& tol = {}) {
    if (count < 1) throw Error("eigenvalues_on_interval: count must be >= 1");
    const ScanRange range = scan ? *scan : default_scan_range(span_lo, span_hi, count);
    if (!(range.lo < range.hi) || range.steps < 2) throw Error("eigenvalues_on_interval: bad scan range");

    Tolerances scan_tol = tol;
    scan_tol.rel = std::max(tol.rel, 1e-7);
    scan_tol.abs = std::max(tol.abs, 1e-9);

    EigenResult result;

    if (!detail::r_is_identically_zero(c)) {
        // Complex shooting: golden-section on |u|^2 around scan minima.
        result.complex_mode = true;
        const double step = (range.hi - range.lo) / range.steps;
        std::vector<double> mags(range.steps + 1);
        for (int i = 0; i <= range.steps; ++i)
            mags[i] = std::norm(detail::shoot_complex(c, range.lo + i * step, span_lo, span_hi, scan_tol));
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int i = 1; i < range.steps && static_cast<int>(result.lambdas.size()) < count; ++i) {
            if (!(mags[i] < mags[i - 1] && mags[i] < mags[i + 1])) continue;
            double a = range.lo + (i - 1) * step, b = range.lo + (i + 1) * step;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = std::norm(detail::shoot_complex(c, x1, span_lo, span_hi, tol));
            double f2 = std::norm(detail::shoot_complex(c, x2, span_lo, span_hi, tol));
            while (b - a > tol.rel * (1.0 + std::fabs(a))) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = std::norm(detail::shoot_complex(c, x1, span_lo, span_hi, tol));
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = std::norm(detail::shoot_complex(c, x2, span_lo, span_hi, tol));
                }
            }
            const double lam = 0.5 * (a + b);
            result.lambdas.push_back(lam);
            result.residuals.push_back(std::sqrt(std::min(f1, f2)));
            result.brackets.emplace_back(a, b);
        }
        if (static_cast<int>(result.lambdas.size()) < count)
            throw Error("eigenvalues_on_interval: found " + std::to_string(result.lambdas.size()) +
                        " candidate minima of " + std::to_string(count) + " requested in the scan range");
        return result;
    }

    auto g_loose = [&](double lam) { return dirichlet_shoot(c, lam, span_lo, span_hi, scan_tol); };
    auto g_tight = [&](double lam) { return dirichlet_shoot(c, lam, span_lo, span_hi, tol); };

    // Scan for sign changes.
    const double step = (range.hi - range.lo) / range.steps;
    std::vector<std::pair<double, double>> candidates;
    double prev_lam = range.lo;
    double prev_val = g_loose(prev_lam);
    for (int i = 1; i <= range.steps && static_cast<int>(candidates.size()) < count; ++i) {
        const double lam = range.lo + i * step;
        const double val = g_loose(lam);
        if (prev_val == 0.0) candidates.emplace_back(prev_lam, prev_lam);
        else if ((prev_val < 0.0) != (val < 0.0)) candidates.emplace_back(prev_lam, lam);
        prev_lam = lam;
        prev_val = val;
    }
    if (static_cast<int>(candidates.size()) < count)
        throw Error("eigenvalues_on_interval: found " + std::to_string(candidates.size()) +
                    " sign changes of " + std::to_string(count) + " requested in the scan range [" +
                    std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");

    for (const auto& [b_lo, b_hi] : candidates) {
        double lo = b_lo, hi = b_hi;
        double f_lo = g_tight(lo);
        double f_hi = g_tight(hi);
        if ((f_lo < 0.0) == (f_hi < 0.0) && f_lo != 0.0) {
            // The loose scan bracketed numerical noise; widen once.
            lo -= 0.5 * step;
            hi += 0.5 * step;
            f_lo = g_tight(lo);
            f_hi = g_tight(hi);
        }
        while (hi - lo > tol.rel * (1.0 + std::fabs(lo))) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = g_tight(mid);
            if (f_mid == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
        }

        // Secant polish from the bracket ends.
        double x0 = lo, x1 = hi, y0v = f_lo, y1v = f_hi;
        double best_x = std::fabs(y0v) < std::fabs(y1v) ? x0 : x1;
        double best_y = std::min(std::fabs(y0v), std::fabs(y1v));
        for (int it = 0; it < 12 && y1v != y0v; ++it) {
            const double x2 = x1 - y1v * (x1 - x0) / (y1v - y0v);
            if (!std::isfinite(x2) || x2 < b_lo - step || x2 > b_hi + step) break;
            const double y2 = g_tight(x2);
            x0 = x1;
            y0v = y1v;
            x1 = x2;
            y1v = y2;
            if (std::fabs(y2) < best_y) {
                best_y = std::fabs(y2);
                best_x = x2;
            }
            if (y2 == 0.0) break;
        }

        result.lambdas.push_back(best_x);
        result.residuals.push_back(best_y);
        result.brackets.emplace_back(lo, hi);
    }

    // The scan produces increasing brackets, so eigenvalues come ordered.
    for (std::size_t i = 0; i + 1 < result.lambdas.size(); ++i)
        if (!(result.lambdas[i] < result.lambdas[i + 1]))
            throw Error("eigenvalues_on_interval: eigenvalues not strictly increasing (scan step too coarse?)");
    return result;
}

} // namespace slq
