#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "slq/bracket.hpp"
#include "slq/integrator.hpp"

using namespace slq;
using Catch::Approx;

TEST_CASE("bracket of a real trajectory with itself vanishes") {
    CoefficientSet c;
    c.s = PiecewiseFn(Expr::parse("1"));
    const QuasiTrajectory t = solve_system(c, 0.0, 0.0, 2.0, {0.0, {1.0, 0.0}, {-1.0, 0.0}});
    for (double x : {0.0, 0.5, 1.7, 2.0}) {
        const auto b = bracket_at(t, t, x);
        CHECK(b.value.real() == 0.0); // exactly, by antisymmetry of the real part
        CHECK(std::fabs(b.value.imag()) < 1e-12);
    }
}

TEST_CASE("free fundamental pair has bracket 1") {
    CoefficientSet c;
    auto [theta, phi] = fundamental_pair(c, 0.0, 0.0, 1.0);
    CHECK(bracket_at(theta, phi, 0.3).value.real() == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Wronskian identity for cos and sin") {
    CoefficientSet c;
    auto [theta, phi] = fundamental_pair(c, 1.0, 0.0, 3.0);
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.0})
        CHECK(bracket_at(theta, phi, t).value.real() == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bracket outside the span is an error") {
    CoefficientSet c;
    auto [theta, phi] = fundamental_pair(c, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(bracket_at(theta, phi, 1.5), Error);
}

TEST_CASE("antisymmetry and sesquilinearity") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("1+0.25*x^2"));
    c.Q_ac = PiecewiseFn(Expr::parse("sin(x)"));
    c.r = PiecewiseFn(Expr::parse("0.5*x"));
    const double lambda = 1.2;
    const QuasiTrajectory u = solve_system(c, lambda, 0.0, 2.0, {0.0, {1.0, 0.3}, {0.2, -0.4}});
    const QuasiTrajectory v = solve_system(c, lambda, 0.0, 2.0, {0.0, {-0.5, 0.1}, {1.0, 0.6}});
    const QuasiTrajectory w = solve_system(c, lambda, 0.0, 2.0, {0.0, {0.4, -0.2}, {0.0, 1.0}});

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ts(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double t = ts(rng);
        const auto buv = bracket_at(u, v, t).value;
        const auto bvu = bracket_at(v, u, t).value;
        CHECK(std::abs(buv + std::conj(bvu)) < 1e-12 * (1.0 + std::abs(buv)));
    }

    // Additivity in the first argument: [u + w, v] = [u,v] + [w,v].
    // Trajectories are linear in initial data, so solve the sum directly.
    const QuasiTrajectory sum = solve_system(
        c, lambda, 0.0, 2.0, {0.0, {1.0 + 0.4, 0.3 - 0.2}, {0.2 + 0.0, -0.4 + 1.0}});
    for (int i = 0; i < 20; ++i) {
        const double t = ts(rng);
        const auto lhs = bracket_at(sum, v, t).value;
        const auto rhs = bracket_at(u, v, t).value + bracket_at(w, v, t).value;
        CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("bracket constancy for solution pairs") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("2+cos(x)"));
    c.Q_ac = PiecewiseFn(Expr::parse("0.3*x"));
    c.s = PiecewiseFn(Expr::parse("x"));
    c.r = PiecewiseFn(Expr::parse("0.1*x"));
    for (double lambda : {-1.0, 0.0, 2.5}) {
        auto [u, v] = fundamental_pair(c, lambda, 0.0, 1.0);
        const auto b0 = bracket_at(u, v, 0.0).value;
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            worst = std::max(worst, std::abs(bracket_at(u, v, t).value - b0));
        }
        CHECK(worst <= 1e-7 * (1.0 + std::abs(b0)));
    }
}

TEST_CASE("lagrange residual for homogeneous pairs is the bracket increment") {
    CoefficientSet c;
    c.Q_jump = StepFn({{0.5, 10.0}});
    auto [u, v] = fundamental_pair(c, 0.0, 0.0, 1.0);
    const double res = lagrange_residual(c, u, std::nullopt, v, std::nullopt, 0.0, 1.0);
    const auto b = bracket_at(u, v, 0.0).value;
    CHECK(res <= 1e-8 * (1.0 + std::abs(b)));
}

TEST_CASE("lagrange residual with a forced solution") {
    // u solves l[u] = 1 (f = 1), v is the free theta; on [0,1] the identity
    // couples the quadrature of conj(v) against the bracket increment.
    CoefficientSet c;
    const PiecewiseFn f(Expr::parse("1"));
    const QuasiTrajectory u = solve_system(c, 0.0, 0.0, 1.0, {0.0, {0.0, 0.0}, {0.0, 0.0}}, f);
    const QuasiTrajectory v = solve_system(c, 0.0, 0.0, 1.0, {0.0, {1.0, 0.0}, {0.0, 0.0}});
    const double res = lagrange_residual(c, u, f, v, std::nullopt, 0.0, 1.0);
    CHECK(res <= 1e-7);
}

TEST_CASE("self residual of a real homogeneous solution is tiny") {
    CoefficientSet c;
    c.s = PiecewiseFn(Expr::parse("x"));
    const QuasiTrajectory u = solve_system(c, 0.0, 0.0, 1.0, {0.0, {1.0, 0.0}, {0.2, 0.0}});
    CHECK(lagrange_residual(c, u, std::nullopt, u, std::nullopt, 0.0, 1.0) <= 1e-10);
}

TEST_CASE("tail limits") {
    // p = 1, s = 1, lambda = 0: e^{-x} solves and decays with its
    // quasi-derivative, so [u, u](t) -> 0.
    CoefficientSet c;
    c.s = PiecewiseFn(Expr::parse("1"));
    const QuasiTrajectory u = solve_system(c, 0.0, 0.0, 20.0, {0.0, {1.0, 0.0}, {-1.0, 0.0}});
    const auto lim = bracket_tail_limit(u, u, TailDirection::Plus, {5.0, 10.0, 15.0, 20.0});
    CHECK(std::abs(lim.estimate) < 1e-8);
    CHECK(lim.converged);

    // Free fundamental pair: the bracket is constant, hence converged.
    CoefficientSet free;
    auto [theta, phi] = fundamental_pair(free, 0.0, 0.0, 100.0);
    const auto lim2 = bracket_tail_limit(theta, phi, TailDirection::Plus, {25.0, 50.0, 75.0, 100.0});
    CHECK(lim2.converged);
    CHECK(lim2.estimate.real() == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("tail limit flags non-convergence") {
    // lambda = -1 on the free operator: solutions grow like e^{x}, and the
    // bracket of two independent complex solutions oscillates... use a pair
    // whose bracket actually moves: a homogeneous u against a forced v.
    CoefficientSet c;
    const PiecewiseFn f(Expr::parse("1"));
    const QuasiTrajectory u = solve_system(c, 0.0, 0.0, 40.0, {0.0, {1.0, 0.0}, {0.0, 0.0}});
    const QuasiTrajectory v = solve_system(c, 0.0, 0.0, 40.0, {0.0, {0.0, 0.0}, {0.0, 0.0}}, f);
    const auto lim = bracket_tail_limit(u, v, TailDirection::Plus, {10.0, 20.0, 30.0, 40.0});
    CHECK_FALSE(lim.converged);
}
