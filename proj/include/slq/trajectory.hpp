#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <vector>

#include "slq/error.hpp"

namespace slq {

enum class Direction { Forward, Backward };
enum class Side { Left, Right };

/// One point of a solved path: position, u and the quasi-derivative u^[1].
struct QuasiState {
    double x = 0.0;
    std::complex<double> u{};
    std::complex<double> u1{};
};

/// A solved path of (x, u, u^[1]) with per-step cubic Hermite dense output.
///
/// Pieces are stored in ascending x regardless of integration direction;
/// each piece carries both endpoint values and one-sided derivatives, so u
/// and u^[1] are continuous across breakpoints (carried state) while their
/// classical derivatives may jump there.
class QuasiTrajectory {
public:
    struct Piece {
        double xa, xb;                    // xa < xb
        std::complex<double> ua, qa;      // state at xa
        std::complex<double> ub, qb;      // state at xb
        std::complex<double> dua, dqa;    // d/dx from inside the piece at xa
        std::complex<double> dub, dqb;    // d/dx from inside the piece at xb
    };

    QuasiTrajectory(std::vector<Piece> pieces, double lambda, Direction dir)
        : pieces_(std::move(pieces)), lambda_(lambda), direction_(dir) {
        if (pieces_.empty()) throw Error("trajectory: no pieces");
        for (auto& p : pieces_)
            if (!(p.xa < p.xb)) throw Error("trajectory: empty or reversed piece");
        for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
            if (pieces_[i].xb != pieces_[i + 1].xa) throw Error("trajectory: pieces not contiguous");
    }

    double lambda() const noexcept { return lambda_; }
    Direction direction() const noexcept { return direction_; }
    double span_lo() const noexcept { return pieces_.front().xa; }
    double span_hi() const noexcept { return pieces_.back().xb; }

    bool contains(double x) const noexcept {
        const double slack = 1e-12 * (1.0 + std::fabs(span_lo()) + std::fabs(span_hi()));
        return x >= span_lo() - slack && x <= span_hi() + slack;
    }

    std::complex<double> u(double x) const { return eval(x, Side::Right).first; }
    std::complex<double> u1(double x) const { return eval(x, Side::Right).second; }

    QuasiState state(double x) const {
        auto [u, q] = eval(x, Side::Right);
        return {x, u, q};
    }

    /// Classical derivative u'(x) of the interpolant; `side` picks the
    /// governing piece when x sits exactly on a piece boundary.
    std::complex<double> u_prime(double x, Side side = Side::Right) const {
        return eval_derivative(x, side).first;
    }
    /// Derivative of the quasi-derivative component (jumps where Q jumps).
    std::complex<double> u1_prime(double x, Side side = Side::Right) const {
        return eval_derivative(x, side).second;
    }

    /// States at the piece boundaries, in integration order.
    std::vector<QuasiState> samples() const {
        std::vector<QuasiState> out;
        out.reserve(pieces_.size() + 1);
        out.push_back({pieces_.front().xa, pieces_.front().ua, pieces_.front().qa});
        for (const auto& p : pieces_) out.push_back({p.xb, p.ub, p.qb});
        if (direction_ == Direction::Backward) std::reverse(out.begin(), out.end());
        return out;
    }

    std::size_t piece_count() const noexcept { return pieces_.size(); }

    /// CSV export: header `x,re_u,im_u,re_u1,im_u1`, one row per sample.
    void write_csv(std::ostream& os) const {
        os << "x,re_u,im_u,re_u1,im_u1\n";
        char buf[160];
        for (const auto& s : samples()) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", s.x, s.u.real(), s.u.imag(),
                          s.u1.real(), s.u1.imag());
            os << buf;
        }
    }

private:
    std::vector<Piece> pieces_;
    double lambda_;
    Direction direction_;

    const Piece& locate(double x, Side side) const {
        if (!contains(x))
            throw Error("trajectory: x = " + std::to_string(x) + " outside span [" + std::to_string(span_lo()) +
                        ", " + std::to_string(span_hi()) + "]");
        // First piece with xb >= x; for Side::Left prefer the piece ending at x.
        std::size_t lo = 0, hi = pieces_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (pieces_[mid].xb < x) lo = mid + 1;
            else hi = mid;
        }
        if (side == Side::Right && pieces_[lo].xb == x && lo + 1 < pieces_.size()) {
            // Boundary point: both pieces agree on values; prefer the right
            // piece so derivatives are right-sided.
            return pieces_[lo + 1];
        }
        return pieces_[lo];
    }

    static std::complex<double> hermite(double t, double h, std::complex<double> ya, std::complex<double> da,
                                        std::complex<double> yb, std::complex<double> db) {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * da + (-2 * t3 + 3 * t2) * yb +
               (t3 - t2) * h * db;
    }
    static std::complex<double> hermite_derivative(double t, double h, std::complex<double> ya,
                                                   std::complex<double> da, std::complex<double> yb,
                                                   std::complex<double> db) {
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * ya + (3 * t2 - 4 * t + 1) * h * da + (-6 * t2 + 6 * t) * yb +
                (3 * t2 - 2 * t) * h * db) /
               h;
    }

    std::pair<std::complex<double>, std::complex<double>> eval(double x, Side side) const {
        const Piece& p = locate(x, side);
        const double h = p.xb - p.xa;
        const double t = std::clamp((x - p.xa) / h, 0.0, 1.0);
        return {hermite(t, h, p.ua, p.dua, p.ub, p.dub), hermite(t, h, p.qa, p.dqa, p.qb, p.dqb)};
    }

    std::pair<std::complex<double>, std::complex<double>> eval_derivative(double x, Side side) const {
        const Piece& p = locate(x, side);
        const double h = p.xb - p.xa;
        const double t = std::clamp((x - p.xa) / h, 0.0, 1.0);
        return {hermite_derivative(t, h, p.ua, p.dua, p.ub, p.dub),
                hermite_derivative(t, h, p.qa, p.dqa, p.qb, p.dqb)};
    }
};

} // namespace slq
