#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "slq/integrator.hpp"
#include "slq/problem_io.hpp"

using namespace slq;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

CoefficientSet delta_coeffs(double strength = 10.0, double at = 0.5) {
    CoefficientSet c;
    c.Q_jump = StepFn({{at, strength}});
    return c;
}

} // namespace

TEST_CASE("free case, u'' = 0") {
    CoefficientSet c;
    const QuasiTrajectory t = solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}});
    CHECK(t.u(1.0).real() == Approx(1.0).epsilon(1e-12));
    CHECK(t.u1(1.0).real() == Approx(1.0).epsilon(1e-12));
    CHECK(t.u(0.37).real() == Approx(0.37).epsilon(1e-12));
}

TEST_CASE("free case at lambda = pi^2 reproduces sin(pi x)") {
    CoefficientSet c;
    const QuasiTrajectory t = solve_system(c, pi * pi, 0.0, 1.0, {0.0, {0.0, 0.0}, {pi, 0.0}});
    CHECK(t.u(1.0).real() == Approx(0.0).margin(1e-8));
    CHECK(t.u1(1.0).real() == Approx(-pi).epsilon(1e-8));
    // dense output against the closed form
    for (double x : {0.1, 0.25, 0.033, 0.5, 0.77, 0.99})
        CHECK(t.u(x).real() == Approx(std::sin(pi * x)).margin(1e-9));
}

TEST_CASE("delta potential: u1 continuous, classical slope jumps by strength * u") {
    const CoefficientSet c = delta_coeffs();
    const QuasiTrajectory t = solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}});

    // Hand solution: u = x left of 0.5, then slope 6, u(1) = 3.5.
    CHECK(t.u(1.0).real() == Approx(3.5).epsilon(1e-10));
    CHECK(t.u(0.5).real() == Approx(0.5).epsilon(1e-10));

    // u^[1] is continuous across the jump ...
    CHECK(std::abs(t.u1(0.5 + 1e-12) - t.u1(0.5 - 1e-12)) < 1e-9);
    CHECK(t.u1(0.5).real() == Approx(1.0).epsilon(1e-9));

    // ... while the classical derivative of u jumps by 10 u(0.5) = 5.
    const double slope_left = t.u_prime(0.5, Side::Left).real();
    const double slope_right = t.u_prime(0.5, Side::Right).real();
    CHECK(slope_left == Approx(1.0).epsilon(1e-9));
    CHECK(slope_right == Approx(6.0).epsilon(1e-9));
    CHECK(slope_right - slope_left == Approx(10.0 * t.u(0.5).real()).epsilon(1e-9));

    // u^[1](1) = u'(1) - 10 u(1) = 6 - 35 = -29.
    CHECK(t.u1(1.0).real() == Approx(-29.0).epsilon(1e-9));
}

TEST_CASE("fundamental pair in the free case") {
    CoefficientSet c;
    auto [theta, phi] = fundamental_pair(c, 0.0, 0.0, 1.0);
    CHECK(theta.u(0.73).real() == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(theta.u1(0.73)) < 1e-12);
    CHECK(phi.u(0.73).real() == Approx(0.73).epsilon(1e-12));
    CHECK(phi.u1(0.73).real() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fundamental pair at lambda = 1 is cos, sin") {
    CoefficientSet c;
    auto [theta, phi] = fundamental_pair(c, 1.0, 0.0, 1.0);
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        CHECK(theta.u(x).real() == Approx(std::cos(x)).margin(1e-8));
        CHECK(phi.u(x).real() == Approx(std::sin(x)).margin(1e-8));
    }
}

TEST_CASE("linearity of the homogeneous solve") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("1+x^2"));
    c.s = PiecewiseFn(Expr::parse("cos(x)"));
    const double lambda = 2.0;
    const std::complex<double> alpha{1.3, -0.2}, beta{-0.7, 0.5};

    const QuasiTrajectory a = solve_system(c, lambda, 0.0, 1.0, {0.0, {1.0, 0.0}, {0.0, 0.0}});
    const QuasiTrajectory b = solve_system(c, lambda, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}});
    const QuasiTrajectory combo =
        solve_system(c, lambda, 0.0, 1.0, {0.0, alpha * 1.0 + beta * 0.0, alpha * 0.0 + beta * 1.0});

    const Tolerances tol{};
    for (double x : {0.1, 0.4, 0.85, 1.0}) {
        const std::complex<double> expect_u = alpha * a.u(x) + beta * b.u(x);
        const std::complex<double> expect_q = alpha * a.u1(x) + beta * b.u1(x);
        CHECK(std::abs(combo.u(x) - expect_u) <= 10.0 * tol.rel * (1.0 + std::abs(expect_u)));
        CHECK(std::abs(combo.u1(x) - expect_q) <= 10.0 * tol.rel * (1.0 + std::abs(expect_q)));
    }
}

TEST_CASE("reversibility") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("2+sin(x)"));
    c.Q_ac = PiecewiseFn(Expr::parse("0.5*x"));
    const QuasiTrajectory fwd = solve_system(c, 1.5, 0.0, 2.0, {0.0, {0.3, 0.1}, {1.0, -0.4}});
    const QuasiState end = fwd.state(2.0);
    const QuasiTrajectory bwd = solve_system(c, 1.5, 2.0, 0.0, end);
    const Tolerances tol{};
    CHECK(std::abs(bwd.u(0.0) - std::complex<double>{0.3, 0.1}) <= 100.0 * tol.rel);
    CHECK(std::abs(bwd.u1(0.0) - std::complex<double>{1.0, -0.4}) <= 100.0 * tol.rel);
}

TEST_CASE("real data with r = 0 stays real") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("1+0.5*cos(x)"));
    c.Q_ac = PiecewiseFn(Expr::parse("x"));
    c.s = PiecewiseFn(Expr::parse("sin(x)"));
    const QuasiTrajectory t = solve_system(c, -2.0, 0.0, 3.0, {0.0, {1.0, 0.0}, {0.5, 0.0}});
    const Tolerances tol{};
    for (double x = 0.0; x <= 3.0; x += 0.01) {
        CHECK(std::fabs(t.u(x).imag()) <= tol.abs);
        CHECK(std::fabs(t.u1(x).imag()) <= tol.abs);
    }
}

TEST_CASE("continuity of u1 across multiple jumps") {
    CoefficientSet c;
    c.Q_jump = StepFn({{0.25, 3.0}, {0.5, -7.0}, {0.75, 2.5}});
    const QuasiTrajectory t = solve_system(c, 1.0, 0.0, 1.0, {0.0, {1.0, 0.0}, {0.0, 0.0}});
    const Tolerances tol{};
    for (double x0 : {0.25, 0.5, 0.75}) {
        const auto before = t.u1(x0 - 1e-13);
        const auto after = t.u1(x0 + 1e-13);
        CHECK(std::abs(after - before) <= 10.0 * tol.abs + 1e-10);
    }
}

TEST_CASE("inhomogeneity drives the second component") {
    // l[u] = -u'' = 1 with u(0) = 0, u'(0) = 0 has u = -x^2/2.
    CoefficientSet c;
    const PiecewiseFn f(Expr::parse("1"));
    const QuasiTrajectory t = solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {0.0, 0.0}}, f);
    CHECK(t.u(1.0).real() == Approx(-0.5).epsilon(1e-10));
    CHECK(t.u(0.6).real() == Approx(-0.18).epsilon(1e-9));
}

TEST_CASE("interior zero of p is a hard error") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("x-0.5"));
    // u' = u^[1]/p blows up at the undeclared zero of p; the stepper must
    // underflow there rather than step across.
    CHECK_THROWS_AS(solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}}),
                    IntegratorError);
}

TEST_CASE("csv export headers and shape") {
    CoefficientSet c;
    const QuasiTrajectory t = solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}});
    std::ostringstream os;
    t.write_csv(os);
    const std::string out = os.str();
    CHECK(out.rfind("x,re_u,im_u,re_u1,im_u1\n", 0) == 0);
    CHECK(out.find("\n0,") != std::string::npos);
}

TEST_CASE("initial state must sit at the span start") {
    CoefficientSet c;
    CHECK_THROWS_AS(solve_system(c, 0.0, 0.0, 1.0, {0.5, {0.0, 0.0}, {1.0, 0.0}}), Error);
}
