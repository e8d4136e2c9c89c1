#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "slq/bracket.hpp"
#include "slq/spectral.hpp"

using namespace slq;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// Independent oracle for -u'' + kappa delta_{1/2} u = lambda u on [0,1]
// with Dirichlet ends: the first eigenvalue k^2 solves
// 2 k cos(k/2) + kappa sin(k/2) = 0 on (pi, 2 pi). Bisection only.
double delta_midpoint_first_eigenvalue(double kappa) {
    auto g = [kappa](double k) { return 2.0 * k * std::cos(0.5 * k) + kappa * std::sin(0.5 * k); };
    double lo = pi, hi = 2.0 * pi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0.0) == (g(lo) < 0.0)) lo = mid;
        else hi = mid;
    }
    const double k = 0.5 * (lo + hi);
    return k * k;
}

} // namespace

TEST_CASE("dirichlet shooting closed forms") {
    CoefficientSet c;
    CHECK(dirichlet_shoot(c, pi * pi, 0.0, 1.0) == Approx(0.0).margin(1e-8));
    CHECK(dirichlet_shoot(c, 0.0, 0.0, 1.0) == Approx(1.0).epsilon(1e-10));
    CHECK(dirichlet_shoot(c, -1.0, 0.0, 1.0) == Approx(std::sinh(1.0)).epsilon(1e-8));
}

TEST_CASE("free spectrum (k pi)^2") {
    CoefficientSet c;
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 3);
    REQUIRE(res.lambdas.size() == 3);
    for (int k = 1; k <= 3; ++k)
        CHECK(res.lambdas[k - 1] == Approx(k * k * pi * pi).epsilon(1e-7));
    for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
        CHECK(res.residuals[i] <= 1e-8);
        CHECK(res.brackets[i].first <= res.lambdas[i] + 1e-9);
        CHECK(res.lambdas[i] <= res.brackets[i].second + 1e-9);
    }
}

TEST_CASE("delta potential first eigenvalue against the matching oracle") {
    CoefficientSet c;
    c.Q_jump = StepFn({{0.5, 10.0}});
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 1);
    const double oracle = delta_midpoint_first_eigenvalue(10.0);
    CHECK(res.lambdas[0] == Approx(oracle).epsilon(1e-7));
}

TEST_CASE("scaled p multiplies the spectrum") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("4"));
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 1);
    CHECK(res.lambdas[0] == Approx(4.0 * pi * pi).epsilon(1e-7));
}

TEST_CASE("interlacing: a nonnegative delta never lowers the ground state") {
    CoefficientSet free;
    CoefficientSet bump;
    bump.Q_jump = StepFn({{0.5, 10.0}});
    const double lam_free = eigenvalues_on_interval(free, 0.0, 1.0, 1).lambdas[0];
    const double lam_bump = eigenvalues_on_interval(bump, 0.0, 1.0, 1).lambdas[0];
    CHECK(lam_bump >= lam_free - 1e-9);
}

TEST_CASE("eigenfunction quasi-Wronskian: forward and backward shots align") {
    CoefficientSet c;
    c.Q_jump = StepFn({{0.5, 10.0}});
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 2);
    for (double lam : res.lambdas) {
        const QuasiTrajectory fwd = solve_system(c, lam, 0.0, 1.0, {0.0, {0.0, 0.0}, {1.0, 0.0}});
        const QuasiTrajectory bwd = solve_system(c, lam, 1.0, 0.0, {1.0, {0.0, 0.0}, {1.0, 0.0}});
        const auto b = bracket_at(fwd, bwd, 0.5).value;
        const auto su = fwd.state(0.5);
        const auto sv = bwd.state(0.5);
        // Scale that stays positive when the eigenfunction vanishes at the
        // midpoint (k = 2 does, for the midpoint delta).
        const double scale = (std::abs(su.u) + std::abs(su.u1)) * (std::abs(sv.u) + std::abs(sv.u1));
        CHECK(std::abs(b) <= 1e-6 * scale);
    }
}

TEST_CASE("mesh independence: halving tolerances moves eigenvalues less than the bracket") {
    CoefficientSet c;
    c.p = PiecewiseFn(Expr::parse("1+0.2*x^2"));
    c.s = PiecewiseFn(Expr::parse("cos(x)"));
    Tolerances coarse;
    Tolerances fine;
    fine.rel = coarse.rel / 2.0;
    fine.abs = coarse.abs / 2.0;
    const EigenResult a = eigenvalues_on_interval(c, 0.0, 1.0, 2, std::nullopt, coarse);
    const EigenResult b = eigenvalues_on_interval(c, 0.0, 1.0, 2, std::nullopt, fine);
    for (std::size_t i = 0; i < 2; ++i) {
        const double bracket_width = a.brackets[i].second - a.brackets[i].first;
        CHECK(std::fabs(a.lambdas[i] - b.lambdas[i]) <= std::max(bracket_width, 1e-9 * (1.0 + a.lambdas[i])));
    }
}

TEST_CASE("asking for too many eigenvalues reports how many were found") {
    CoefficientSet c;
    try {
        eigenvalues_on_interval(c, 0.0, 1.0, 3, ScanRange{0.0, 15.0, 100});
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("found 1") != std::string::npos);
    }
}

TEST_CASE("constant r shifts the free spectrum (complex shooting path)") {
    // With r constant, substituting u = e^{i r x} w turns the expression
    // into -w'' - r^2 w, so the eigenvalues are (k pi)^2 - r^2.
    CoefficientSet c;
    c.r = PiecewiseFn(Expr::parse("0.1"));
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 2, ScanRange{1.0, 50.0, 600});
    REQUIRE(res.complex_mode);
    REQUIRE(res.lambdas.size() == 2);
    CHECK(res.lambdas[0] == Approx(pi * pi - 0.01).epsilon(1e-6));
    CHECK(res.lambdas[1] == Approx(4.0 * pi * pi - 0.01).epsilon(1e-6));
}

TEST_CASE("eigen csv export header") {
    CoefficientSet c;
    const EigenResult res = eigenvalues_on_interval(c, 0.0, 1.0, 1);
    std::ostringstream os;
    res.write_csv(os);
    CHECK(os.str().rfind("k,lambda,residual,bracket_lo,bracket_hi\n", 0) == 0);
}
