#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/quadrature.hpp"
#include "slq/report.hpp"

namespace slq {

namespace detail {

/// Partial integrals of f over the window with a shrinking hole around the
/// suspected singularity; the hole half-width halves per entry.
struct DivergenceProbe {
    std::vector<double> partials;
    double last_ratio = 0.0; // growth across the last three halvings
    bool divergent = false;
};

template <class F>
DivergenceProbe probe_divergence(F& f, double lo, double hi, double hotspot, const std::vector<double>& cuts,
                                 double overflow_threshold = 1e12) {
    DivergenceProbe probe;
    double delta = (hi - lo) / 16.0;
    const int halvings = 14;
    for (int k = 0; k <= halvings; ++k) {
        double sum = 0.0;
        const double a_cut = hotspot - delta;
        const double b_cut = hotspot + delta;
        if (a_cut > lo) sum += integrate_piecewise(f, lo, a_cut, cuts, 1e-9, 1e-12).value;
        if (b_cut < hi) sum += integrate_piecewise(f, b_cut, hi, cuts, 1e-9, 1e-12).value;
        probe.partials.push_back(sum);
        if (sum > overflow_threshold) {
            probe.divergent = true;
            break;
        }
        delta *= 0.5;
    }
    const std::size_t n = probe.partials.size();
    if (n >= 4 && probe.partials[n - 4] > 0.0) {
        probe.last_ratio = probe.partials[n - 1] / probe.partials[n - 4];
        if (probe.last_ratio >= 1.5) probe.divergent = true;
    }
    return probe;
}

} // namespace detail

/// Numerically audits the local-integrability assumptions on a finite
/// window: 1/|p|, Q^2/|p|, r^2/|p| and |s| must integrate to finite values.
/// Divergent quantities (overflow past 1e12 or partial integrals still
/// growing by a factor of at least 1.5 across the last three hole
/// halvings) give "violated"; quantities that fail to converge without
/// meeting the divergence rule give "inconclusive". Also samples the sign
/// of p and reports whether 1/p != 0 held at every sample point.
inline ConditionReport validate_local_integrability(const CoefficientSet& c, double window_lo, double window_hi) {
    if (!(window_lo < window_hi)) throw Error("validate: window must satisfy lo < hi");
    ConditionReport report;
    report.criterion = "local_integrability";

    const std::vector<double> cuts = c.interior_breakpoints(window_lo, window_hi);

    struct Quantity {
        const char* label;
        std::function<double(double)> f;
    };
    const std::vector<Quantity> quantities = {
        {"int_inv_abs_p", [&](double x) { return 1.0 / std::fabs(c.p.eval_unchecked(x)); }},
        {"int_Q2_over_abs_p",
         [&](double x) {
             const double q = c.Q_at(x);
             return q * q / std::fabs(c.p.eval_unchecked(x));
         }},
        {"int_r2_over_abs_p",
         [&](double x) {
             const double r = c.r.eval_unchecked(x);
             return r * r / std::fabs(c.p.eval_unchecked(x));
         }},
        {"int_abs_s", [&](double x) { return std::fabs(c.s.eval_unchecked(x)); }},
    };

    bool any_divergent = false;
    bool any_inconclusive = false;
    for (const auto& q : quantities) {
        auto f = q.f;
        bool needs_probe = false;
        double hotspot = 0.0;
        try {
            auto r = integrate_piecewise(f, window_lo, window_hi, cuts, 1e-9, 1e-13);
            if (r.converged && std::fabs(r.value) < 1e12) {
                report.add(q.label, r.value);
                continue;
            }
            needs_probe = true;
            // Locate the hotspot as the largest integrand sample on a
            // coarse grid.
            hotspot = 0.5 * (window_lo + window_hi);
            double worst = -1.0;
            const int scan = 4096;
            for (int i = 1; i < scan; ++i) {
                const double x = window_lo + (window_hi - window_lo) * i / scan;
                const double v = std::fabs(f(x));
                if (v > worst) {
                    worst = v;
                    hotspot = x;
                }
            }
        } catch (const EvalError& e) {
            needs_probe = true;
            hotspot = e.x();
        }
        if (needs_probe) {
            auto probe = detail::probe_divergence(f, window_lo, window_hi, hotspot, cuts);
            report.add(std::string(q.label) + "_hotspot", hotspot);
            for (std::size_t k = 0; k < probe.partials.size(); ++k)
                report.add(std::string(q.label) + "_partial_" + std::to_string(k), probe.partials[k]);
            report.add(std::string(q.label) + "_growth_ratio", probe.last_ratio);
            if (probe.divergent) {
                any_divergent = true;
                report.notes += std::string(q.label) + " diverges by the doubling rule. ";
            } else {
                any_inconclusive = true;
                report.notes +=
                    std::string(q.label) + " did not converge; partial sums grow too slowly to flag divergence. ";
            }
        }
    }

    // Sign sampling of p: 1/p != 0 a.e. is only checkable at sample points.
    const int samples = 512;
    int sign_changes = 0;
    int zero_samples = 0;
    double min_abs_p = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i <= samples; ++i) {
        const double x = window_lo + (window_hi - window_lo) * (i + 0.31) / (samples + 1.0);
        if (x >= window_hi) break;
        const double v = c.p.eval_unchecked(x);
        if (!std::isfinite(v) || v == 0.0) {
            ++zero_samples;
            continue;
        }
        min_abs_p = std::min(min_abs_p, std::fabs(v));
        if (have_prev && ((prev < 0) != (v < 0))) ++sign_changes;
        prev = v;
        have_prev = true;
    }
    report.add("p_sign_changes", sign_changes);
    report.add("p_zero_or_nonfinite_samples", zero_samples);
    report.add("min_abs_p_sample", min_abs_p);
    if (zero_samples == 0)
        report.notes += "1/p != 0 held at all sample points (a.e. condition checked at samples only). ";
    else
        report.notes += "p vanished or was non-finite at sample points. ";

    report.verdict = any_divergent    ? Verdict::Violated
                     : any_inconclusive ? Verdict::Inconclusive
                                        : Verdict::Satisfied;
    return report;
}

} // namespace slq
