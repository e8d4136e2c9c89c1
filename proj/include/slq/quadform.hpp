#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"
#include "slq/quadrature.hpp"
#include "slq/trajectory.hpp"

namespace slq {

/// Compactly supported surrogate for a form-domain element: u with a
/// declared derivative du on [support_lo, support_hi], both as expression
/// pairs (real and imaginary parts) so complex-valued test functions are
/// representable. u must vanish at the support endpoints and du must match
/// finite differences of u.
struct TestFunction {
    Expr u_re, u_im;
    Expr du_re, du_im;
    double support_lo = 0.0;
    double support_hi = 1.0;

    TestFunction(Expr u, Expr du, double lo, double hi)
        : u_re(std::move(u)), u_im(), du_re(std::move(du)), du_im(), support_lo(lo), support_hi(hi) {
        check();
    }
    TestFunction(Expr u_re_, Expr u_im_, Expr du_re_, Expr du_im_, double lo, double hi)
        : u_re(std::move(u_re_)), u_im(std::move(u_im_)), du_re(std::move(du_re_)), du_im(std::move(du_im_)),
          support_lo(lo), support_hi(hi) {
        check();
    }

    std::complex<double> u(double x) const { return {u_re(x), u_im(x)}; }
    std::complex<double> du(double x) const { return {du_re(x), du_im(x)}; }

private:
    void check() const {
        if (!(support_lo < support_hi)) throw Error("test function: support must satisfy lo < hi");
        if (std::abs(u(support_lo)) > 1e-10 || std::abs(u(support_hi)) > 1e-10)
            throw Error("test function: u must vanish at the support endpoints");
        // Declared derivative against central differences at interior points.
        const double L = support_hi - support_lo;
        const double h = 1e-6 * L;
        double du_max = 0.0;
        for (int i = 1; i <= 100; ++i) du_max = std::max(du_max, std::abs(du(support_lo + L * i / 101.0)));
        for (int i = 1; i <= 100; ++i) {
            const double x = support_lo + L * i / 101.0;
            const std::complex<double> fd = (u(x + h) - u(x - h)) / (2.0 * h);
            const std::complex<double> d = du(x);
            const double tolerance = 1e-6 * std::max(std::abs(d), std::abs(fd)) + 1e-8 * (1.0 + du_max);
            if (std::abs(d - fd) > tolerance)
                throw Error("test function: declared derivative disagrees with finite differences at x = " +
                            std::to_string(x));
        }
    }
};

/// Smooth cutoff with value 1 on the plateau and 0 outside the support,
/// with polynomial smoothstep ramps. Quintic ramps are C^2; cubic ramps
/// are C^1 and kept for comparison runs.
enum class CutoffShape { Cubic, Quintic };

class CutoffFamily {
public:
    CutoffFamily(double support_lo, double plateau_lo, double plateau_hi, double support_hi,
                 CutoffShape shape = CutoffShape::Quintic, int index = 0)
        : a_(support_lo), c_(plateau_lo), d_(plateau_hi), b_(support_hi), shape_(shape), index_(index) {
        if (!(a_ < c_ && c_ <= d_ && d_ < b_))
            throw Error("cutoff: need support_lo < plateau_lo <= plateau_hi < support_hi");
        const double w = std::min(c_ - a_, b_ - d_);
        k_bound_ = (shape_ == CutoffShape::Quintic ? 15.0 / 8.0 : 3.0 / 2.0) / w;
    }

    /// The family member phi_n of the half-line proofs: plateau [-n, n],
    /// support [-n-1, n+1]; its derivative bound K is independent of n.
    static CutoffFamily indexed(int n, CutoffShape shape = CutoffShape::Quintic) {
        return CutoffFamily(-n - 1.0, -static_cast<double>(n), static_cast<double>(n), n + 1.0, shape, n);
    }

    double operator()(double x) const {
        if (x <= a_ || x >= b_) return 0.0;
        if (x >= c_ && x <= d_) return 1.0;
        const double v = x < c_ ? ramp((x - a_) / (c_ - a_)) : ramp((b_ - x) / (b_ - d_));
        return std::clamp(v, 0.0, 1.0); // polynomial evaluation may overshoot by an ulp
    }

    double derivative(double x) const {
        if (x <= a_ || x >= b_ || (x >= c_ && x <= d_)) return 0.0;
        if (x < c_) return ramp_d((x - a_) / (c_ - a_)) / (c_ - a_);
        return -ramp_d((b_ - x) / (b_ - d_)) / (b_ - d_);
    }

    double second_derivative(double x) const {
        if (x <= a_ || x >= b_ || (x >= c_ && x <= d_)) return 0.0;
        if (x < c_) return ramp_dd((x - a_) / (c_ - a_)) / ((c_ - a_) * (c_ - a_));
        return ramp_dd((b_ - x) / (b_ - d_)) / ((b_ - d_) * (b_ - d_));
    }

    double derivative_bound() const noexcept { return k_bound_; }
    double support_lo() const noexcept { return a_; }
    double support_hi() const noexcept { return b_; }
    double plateau_lo() const noexcept { return c_; }
    double plateau_hi() const noexcept { return d_; }
    CutoffShape shape() const noexcept { return shape_; }
    int index() const noexcept { return index_; }

    /// The four ramp corner abscissae (for quadrature splitting).
    std::vector<double> corners() const { return {a_, c_, d_, b_}; }

private:
    double a_, c_, d_, b_;
    CutoffShape shape_;
    int index_;
    double k_bound_;

    double ramp(double t) const {
        return shape_ == CutoffShape::Quintic ? ((6.0 * t - 15.0) * t + 10.0) * t * t * t
                                              : (3.0 - 2.0 * t) * t * t;
    }
    double ramp_d(double t) const {
        return shape_ == CutoffShape::Quintic ? 30.0 * t * t * (1.0 - t) * (1.0 - t) : 6.0 * t * (1.0 - t);
    }
    double ramp_dd(double t) const {
        return shape_ == CutoffShape::Quintic ? ((120.0 * t - 180.0) * t + 60.0) * t : 6.0 - 12.0 * t;
    }
};

namespace detail {

inline void require_bounded_inverse_p(const CoefficientSet& c, double lo, double hi) {
    double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
        // Endpoints included: sup-norm hypotheses live on the closure.
        const double x = lo + (hi - lo) * i / samples;
        const double v = c.p.eval_unchecked(x);
        if (!std::isfinite(v)) throw Error("form: p is not finite on the support (sampled)");
        max_abs = std::max(max_abs, std::fabs(v));
        min_abs = std::min(min_abs, std::fabs(v));
    }
    if (min_abs <= 1e-10 * std::max(1.0, max_abs))
        throw Error("form: 1/p looks unbounded on the support (sampled)");
}

} // namespace detail

/// Quadratic form of the expression on a compactly supported test function:
///
///   int p |u'|^2 dx - int Q (u' conj(u) + u conj(u')) dx + int s |u|^2 dx
///
/// over the support, split at coefficient breakpoints and jumps. The middle
/// term realizes -int Q d|u|^2; rewriting the measure integral this way is
/// valid because |u|^2 is absolutely continuous and Q is bounded measurable
/// on the support.
inline double form_value(const CoefficientSet& c, const TestFunction& tf) {
    detail::require_bounded_inverse_p(c, tf.support_lo, tf.support_hi);
    const std::vector<double> cuts = c.interior_breakpoints(tf.support_lo, tf.support_hi);
    auto integrand = [&](double x) {
        const std::complex<double> u = tf.u(x);
        const std::complex<double> du = tf.du(x);
        const double p = c.p(x);
        const double Q = c.Q_at(x);
        const double s = c.s(x);
        return p * std::norm(du) - Q * 2.0 * std::real(du * std::conj(u)) + s * std::norm(u);
    };
    return integrate_or_throw(integrand, tf.support_lo, tf.support_hi, cuts, 1e-11, 1e-13);
}

/// Multiplies a trajectory by a cutoff: components (phi u, p phi' u + phi u^[1])
/// on the trajectory's span, identically zero outside the support. Requires
/// p positive (sampled) wherever phi' != 0 inside the span; p must also be
/// continuous there, which is checked at the declared breakpoints.
inline QuasiTrajectory cutoff_multiply(const CoefficientSet& c, const CutoffFamily& phi,
                                       const QuasiTrajectory& traj) {
    const double lo = traj.span_lo();
    const double hi = traj.span_hi();

    // Positivity of p where the ramps live, sampled.
    for (const auto& [ra, rb] : {std::pair{phi.support_lo(), phi.plateau_lo()},
                                 std::pair{phi.plateau_hi(), phi.support_hi()}}) {
        const double a = std::max(ra, lo), b = std::min(rb, hi);
        if (!(a < b)) continue;
        for (int i = 0; i <= 64; ++i) {
            const double x = a + (b - a) * (i + 0.41) / 65.0;
            if (x >= b) break;
            if (c.p.eval_unchecked(x) <= 0.0)
                throw Error("cutoff_multiply: p <= 0 at x = " + std::to_string(x) + " where phi' != 0");
        }
        for (double bp : c.p.breakpoints()) {
            if (bp <= a || bp >= b) continue;
            const double jump =
                std::fabs(c.p.segment(c.p.segment_index(bp))(bp) -
                          c.p.segment(c.p.segment_index(bp) - 1)(bp));
            if (jump > 1e-9 * (1.0 + std::fabs(c.p(bp))))
                throw Error("cutoff_multiply: p is discontinuous inside a ramp at x = " + std::to_string(bp));
        }
    }

    // Node set: trajectory piece boundaries, coefficient breakpoints, ramp
    // corners, plus enough ramp subdivision for the Hermite pieces to
    // resolve the quintic.
    std::vector<double> nodes;
    nodes.push_back(lo);
    nodes.push_back(hi);
    {
        std::vector<QuasiState> s = traj.samples();
        for (const auto& st : s) nodes.push_back(st.x);
    }
    for (double x : c.interior_breakpoints(lo, hi)) nodes.push_back(x);
    for (double x : phi.corners())
        if (x > lo && x < hi) nodes.push_back(x);
    auto add_ramp_nodes = [&](double ra, double rb) {
        const double a = std::max(ra, lo), b = std::min(rb, hi);
        if (!(a < b)) return;
        const int n = 128;
        for (int i = 1; i < n; ++i) nodes.push_back(a + (b - a) * i / n);
    };
    add_ramp_nodes(phi.support_lo(), phi.plateau_lo());
    add_ramp_nodes(phi.plateau_hi(), phi.support_hi());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    // p' one-sided into each piece, by a second-order difference shifted a
    // hair inside so it never crosses the node's segment boundary.
    auto p_prime_inside = [&](double x, double into, double len) {
        const double step = std::min(1e-6 * (1.0 + std::fabs(x)), 0.25 * len) * into;
        const double t0 = x + 1e-3 * step;
        const double p0 = c.p(t0);
        const double p1 = c.p(t0 + step);
        const double p2 = c.p(t0 + 2.0 * step);
        return (-1.5 * p0 + 2.0 * p1 - 0.5 * p2) / step;
    };

    auto value_at = [&](double x) {
        const QuasiState st = traj.state(x);
        const double f = phi(x);
        const double fd = phi.derivative(x);
        std::complex<double> second = f * st.u1;
        if (fd != 0.0) second += c.p(x) * fd * st.u;
        return std::pair{f * st.u, second};
    };
    auto deriv_at = [&](double x, Side side, double into, double len) {
        const QuasiState st = traj.state(x);
        const std::complex<double> du = traj.u_prime(x, side);
        const std::complex<double> dq = traj.u1_prime(x, side);
        // Nudge phi evaluations into the piece so ramp corners take the
        // one-sided branch consistent with this piece.
        const double xq = x + 1e-9 * into * len;
        const double f = phi(x);
        const double fd = phi.derivative(xq);
        const double fdd = phi.second_derivative(xq);
        std::complex<double> d1 = fd * st.u + f * du;
        std::complex<double> d2 = fd * st.u1 + f * dq;
        if (fd != 0.0 || fdd != 0.0) {
            const double pv = c.p(x);
            const double pd = p_prime_inside(x, into, len);
            d2 += (pd * fd + pv * fdd) * st.u + pv * fd * du;
        }
        return std::pair{d1, d2};
    };

    std::vector<QuasiTrajectory::Piece> pieces;
    pieces.reserve(nodes.size());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double xa = nodes[i], xb = nodes[i + 1];
        const double len = xb - xa;
        QuasiTrajectory::Piece pc;
        pc.xa = xa;
        pc.xb = xb;
        auto [ua, qa] = value_at(xa);
        auto [ub, qb] = value_at(xb);
        auto [dua, dqa] = deriv_at(xa, Side::Right, +1.0, len);
        auto [dub, dqb] = deriv_at(xb, Side::Left, -1.0, len);
        pc.ua = ua;
        pc.qa = qa;
        pc.ub = ub;
        pc.qb = qb;
        pc.dua = dua;
        pc.dqa = dqa;
        pc.dub = dub;
        pc.dqb = dqb;
        pieces.push_back(pc);
    }
    return QuasiTrajectory(std::move(pieces), traj.lambda(), traj.direction());
}

/// Minimum Rayleigh quotient form_value(u) / ||u||^2 over a finite family.
/// Evidence only: a finite family bounds the spectrum from above, it cannot
/// certify semi-boundedness.
struct RayleighEstimate {
    double min_quotient = 0.0;
    std::size_t argmin = 0;
};

inline RayleighEstimate rayleigh_lower_bound_probe(const CoefficientSet& c,
                                                   const std::vector<TestFunction>& family) {
    if (family.empty()) throw Error("rayleigh probe: empty family");
    RayleighEstimate best;
    bool first = true;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const TestFunction& tf = family[i];
        const double form = form_value(c, tf);
        const double norm2 = integrate_or_throw([&](double x) { return std::norm(tf.u(x)); }, tf.support_lo,
                                                tf.support_hi, {}, 1e-11, 1e-14);
        if (norm2 <= 1e-300) throw Error("rayleigh probe: zero-norm family member");
        const double q = form / norm2;
        if (first || q < best.min_quotient) {
            best.min_quotient = q;
            best.argmin = i;
            first = false;
        }
    }
    return best;
}

} // namespace slq
