#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "slq/coefficients.hpp"

using namespace slq;

TEST_CASE("piecewise evaluation with the right-segment convention") {
    PiecewiseFn f({0.0}, {Expr::parse("1"), Expr::parse("1+x^2")});
    CHECK(f(-3.0) == 1.0);
    CHECK(f(2.0) == 5.0);
    CHECK(f(0.0) == 1.0); // right segment at the breakpoint: 1 + 0^2
    CHECK(f.segment_index(0.0) == 1);
    CHECK(f.segment_index(-1e-300) == 0);
}

TEST_CASE("single-segment piecewise is the expression everywhere") {
    PiecewiseFn f(Expr::parse("1"));
    CHECK(f(7.3) == 1.0);
    CHECK(f(-1e9) == 1.0);
}

TEST_CASE("piecewise constants evaluate bit-equal") {
    PiecewiseFn f({-1.0, 2.5}, {Expr::number(0.1), Expr::number(0.1), Expr::number(0.1)});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> xs(-10.0, 10.0);
    for (int i = 0; i < 300; ++i) CHECK(f(xs(rng)) == 0.1);
}

TEST_CASE("piecewise construction validation") {
    CHECK_THROWS_AS(PiecewiseFn({1.0, 0.0}, {Expr(), Expr(), Expr()}), Error);
    CHECK_THROWS_AS(PiecewiseFn({0.0}, {Expr()}), Error);
}

TEST_CASE("piecewise evaluation reports the failing segment") {
    PiecewiseFn f({0.0}, {Expr::parse("1"), Expr::parse("log(-1+0*x)")});
    try {
        f(1.0);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.segment() == 1);
        CHECK(e.x() == 1.0);
    }
}

TEST_CASE("step function is left-continuous and accumulates heights") {
    StepFn q({{0.0, 10.0}, {1.0, -3.0}});
    CHECK(q(-1.0) == 0.0);
    CHECK(q(0.0) == 0.0);  // left-continuous: the jump at 0 is excluded
    CHECK(q(0.5) == 10.0);
    CHECK(q(1.0) == 10.0);
    CHECK(q(2.0) == 7.0);
}

TEST_CASE("step function with nonnegative heights is nondecreasing") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> h(0.0, 5.0);
    std::vector<std::pair<double, double>> jumps;
    for (int i = 0; i < 12; ++i) jumps.emplace_back(-3.0 + 0.5 * i, h(rng));
    StepFn q(jumps);
    std::uniform_real_distribution<double> xs(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        const double a = xs(rng), b = xs(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(q(lo) <= q(hi));
    }
}

TEST_CASE("step function rejects unsorted locations") {
    CHECK_THROWS_AS(StepFn({{1.0, 1.0}, {0.0, 1.0}}), Error);
}

TEST_CASE("coefficient slices freeze segments and jumps") {
    CoefficientSet c;
    c.p = PiecewiseFn({0.5}, {Expr::parse("1"), Expr::parse("2")});
    c.Q_jump = StepFn({{0.5, 10.0}});
    const CoefficientSlice left = c.slice(0.0, 0.5);
    const CoefficientSlice right = c.slice(0.5, 1.0);
    CHECK(left.p_checked(0.5) == 1.0);  // one-sided limit from inside
    CHECK(right.p_checked(0.5) == 2.0);
    CHECK(left.Q(0.49) == 0.0);
    CHECK(right.Q(0.51) == 10.0);
    CHECK(right.Q(0.5) == 10.0); // frozen constant on the slice
}

TEST_CASE("interior breakpoints merge all coefficient structure") {
    CoefficientSet c;
    c.p = PiecewiseFn({0.25, 0.75}, {Expr::parse("1"), Expr::parse("2"), Expr::parse("3")});
    c.Q_jump = StepFn({{0.5, 1.0}, {2.0, 1.0}});
    c.s = PiecewiseFn({0.25}, {Expr::parse("0"), Expr::parse("1")});
    const auto pts = c.interior_breakpoints(0.0, 1.0);
    CHECK(pts == std::vector<double>{0.25, 0.5, 0.75});
}
