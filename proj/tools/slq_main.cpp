// Command-line front end for the Sturm-Liouville quasi-derivative toolkit.
//
// Subcommands: validate, solve, eig, bracket, form, check, probe, rho.
// Exit codes: 0 success (verdicts of any kind are successful runs),
// 1 domain/numeric/file errors, 2 usage errors.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slq/slq.hpp"

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CommonOpts {
    std::string problem;
    std::string format = "text";
    std::string output;
    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--problem", o.problem, "Problem file (see README for the format)")->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
    sub->add_option("--output", o.output, "Write output to this file instead of stdout");
    sub->add_option("--tol-rel", o.tol_rel, "Relative tolerance");
    sub->add_option("--tol-abs", o.tol_abs, "Absolute tolerance");
}

slq::Tolerances tolerances(const CommonOpts& o) {
    slq::Tolerances tol;
    tol.rel = o.tol_rel;
    tol.abs = o.tol_abs;
    return tol;
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw slq::Error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_report(const slq::ConditionReport& rep, const CommonOpts& o) {
    OutputStream out(o.output);
    if (o.format == "csv") rep.write_csv(out.get());
    else rep.write_text(out.get());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slq: Sturm-Liouville operators with distributional coefficients via quasi-derivatives"};
    app.require_subcommand(1);

    // validate
    CommonOpts validate_opts;
    std::vector<double> validate_span;
    auto* cmd_validate = app.add_subcommand(
        "validate", "Audit local integrability of 1/|p|, Q^2/|p|, r^2/|p|, |s| on a finite window");
    add_common(cmd_validate, validate_opts);
    cmd_validate->add_option("--span", validate_span, "Window [A, B] (default: problem domain)")->expected(2);

    // solve
    CommonOpts solve_opts;
    std::vector<double> solve_span, solve_u0{0.0, 0.0}, solve_u1{1.0, 0.0};
    double solve_lambda = 0.0;
    std::string solve_forcing;
    auto* cmd_solve =
        app.add_subcommand("solve", "Integrate the first-order system for (u, u^[1]) across the span");
    add_common(cmd_solve, solve_opts);
    cmd_solve->add_option("--lambda", solve_lambda, "Spectral shift lambda");
    cmd_solve->add_option("--span", solve_span, "Span [A, B] (default: problem domain)")->expected(2);
    cmd_solve->add_option("--u0", solve_u0, "Initial u as RE IM")->expected(2);
    cmd_solve->add_option("--u1", solve_u1, "Initial u^[1] as RE IM")->expected(2);
    cmd_solve->add_option("--f", solve_forcing, "Inhomogeneity expression f(x) for l[u] = lambda u + f");

    // eig
    CommonOpts eig_opts;
    std::vector<double> eig_span, eig_scan;
    int eig_count = 1;
    auto* cmd_eig = app.add_subcommand(
        "eig",
        "Dirichlet eigenvalues (boundary condition u(A) = u(B) = 0; the minimal operator's condition "
        "u^[j] = 0 for j = 0,1 at both ends has no eigenfunctions generically, so the standard "
        "self-adjoint Dirichlet restriction is computed)");
    add_common(cmd_eig, eig_opts);
    cmd_eig->add_option("--span", eig_span, "Interval [A, B] (default: problem domain)")->expected(2);
    cmd_eig->add_option("--count", eig_count, "Number of eigenvalues");
    cmd_eig->add_option("--scan", eig_scan, "Scan as MIN MAX STEP (default: free-case sizing)")->expected(3);

    // bracket
    CommonOpts bracket_opts;
    std::vector<double> bracket_span;
    double bracket_lambda = 0.0;
    auto* cmd_bracket = app.add_subcommand(
        "bracket", "Lagrange bracket diagnostics for the fundamental pair at a given lambda");
    add_common(cmd_bracket, bracket_opts);
    cmd_bracket->add_option("--lambda", bracket_lambda, "Spectral shift lambda");
    cmd_bracket->add_option("--span", bracket_span, "Span [A, B] (default: problem domain)")->expected(2);

    // form
    CommonOpts form_opts;
    std::string form_u, form_du;
    std::vector<double> form_support;
    auto* cmd_form =
        app.add_subcommand("form", "Quadratic form value and Rayleigh quotient of a test function");
    add_common(cmd_form, form_opts);
    cmd_form->add_option("--u", form_u, "Test function expression")->required();
    cmd_form->add_option("--du", form_du, "Declared derivative expression")->required();
    cmd_form->add_option("--support", form_support, "Support [A, B] (default: problem domain)")->expected(2);

    // check
    CommonOpts check_opts;
    std::string check_criterion;
    std::string check_intervals;
    auto* cmd_check = app.add_subcommand("check", "Self-adjointness hypothesis audits");
    add_common(cmd_check, check_opts);
    cmd_check->add_option("--criterion", check_criterion, "One of hr, clark, thmB, thmC")
        ->required()
        ->check(CLI::IsMember({"hr", "clark", "thmB", "thmC"}));
    cmd_check->add_option("--intervals", check_intervals, "CSV file 'n,a,b' with the Delta_n (thmC only)");

    // probe
    CommonOpts probe_opts;
    int probe_windows = 8;
    int probe_directions = 32;
    double probe_lambda0 = 0.0;
    auto* cmd_probe = app.add_subcommand(
        "probe", "Kernel probe: no solution of l[v] = lambda0 v should look square-integrable");
    add_common(cmd_probe, probe_opts);
    cmd_probe->add_option("--windows", probe_windows, "Number of nested rho-radius windows");
    cmd_probe->add_option("--directions", probe_directions, "Sampled initial directions");
    auto* lambda0_opt = cmd_probe->add_option("--lambda0", probe_lambda0, "Override the probe shift");

    // rho
    CommonOpts rho_opts;
    std::vector<double> rho_span;
    auto* cmd_rho = app.add_subcommand("rho", "The change of variable rho(x) = int_0^x p^{-1/2}");
    add_common(cmd_rho, rho_opts);
    cmd_rho->add_option("--span", rho_span, "Window [A, B] (default: problem domain)")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_validate->parsed()) {
            const slq::Problem prob = slq::load_problem(validate_opts.problem);
            const double a = validate_span.size() == 2 ? validate_span[0] : prob.domain_lo;
            const double b = validate_span.size() == 2 ? validate_span[1] : prob.domain_hi;
            emit_report(slq::validate_local_integrability(prob.coeffs, a, b), validate_opts);
        } else if (cmd_solve->parsed()) {
            const slq::Problem prob = slq::load_problem(solve_opts.problem);
            const double a = solve_span.size() == 2 ? solve_span[0] : prob.domain_lo;
            const double b = solve_span.size() == 2 ? solve_span[1] : prob.domain_hi;
            std::optional<slq::PiecewiseFn> forcing;
            if (!solve_forcing.empty()) forcing.emplace(slq::Expr::parse(solve_forcing));
            const slq::QuasiState y0{a, {solve_u0[0], solve_u0[1]}, {solve_u1[0], solve_u1[1]}};
            const slq::QuasiTrajectory traj =
                slq::solve_system(prob.coeffs, solve_lambda, a, b, y0, forcing, tolerances(solve_opts));
            OutputStream out(solve_opts.output);
            if (solve_opts.format == "csv") {
                traj.write_csv(out.get());
            } else {
                out.get() << "lambda: " << fmt(solve_lambda) << "\n";
                out.get() << "span: [" << fmt(a) << ", " << fmt(b) << "]\n";
                out.get() << "steps: " << traj.piece_count() << "\n";
                for (int i = 0; i <= 10; ++i) {
                    const double x = a + (b - a) * i / 10.0;
                    const slq::QuasiState st = traj.state(x);
                    out.get() << "x=" << fmt(x) << "  u=(" << fmt(st.u.real()) << ", " << fmt(st.u.imag())
                              << ")  u1=(" << fmt(st.u1.real()) << ", " << fmt(st.u1.imag()) << ")\n";
                }
            }
        } else if (cmd_eig->parsed()) {
            const slq::Problem prob = slq::load_problem(eig_opts.problem);
            const double a = eig_span.size() == 2 ? eig_span[0] : prob.domain_lo;
            const double b = eig_span.size() == 2 ? eig_span[1] : prob.domain_hi;
            std::optional<slq::ScanRange> scan;
            if (eig_scan.size() == 3) {
                const int steps = std::max(2, static_cast<int>((eig_scan[1] - eig_scan[0]) / eig_scan[2]));
                scan = slq::ScanRange{eig_scan[0], eig_scan[1], steps};
            }
            const slq::EigenResult res =
                slq::eigenvalues_on_interval(prob.coeffs, a, b, eig_count, scan, tolerances(eig_opts));
            OutputStream out(eig_opts.output);
            if (eig_opts.format == "csv") {
                res.write_csv(out.get());
            } else {
                if (res.complex_mode)
                    out.get() << "note: r != 0, complex shooting via |u(beta)|^2 minima (experimental)\n";
                for (std::size_t i = 0; i < res.lambdas.size(); ++i)
                    out.get() << "k=" << res.k_first + static_cast<int>(i) << "  lambda=" << fmt(res.lambdas[i])
                              << "  residual=" << fmt(res.residuals[i]) << "  bracket=["
                              << fmt(res.brackets[i].first) << ", " << fmt(res.brackets[i].second) << "]\n";
            }
        } else if (cmd_bracket->parsed()) {
            const slq::Problem prob = slq::load_problem(bracket_opts.problem);
            const double a = bracket_span.size() == 2 ? bracket_span[0] : prob.domain_lo;
            const double b = bracket_span.size() == 2 ? bracket_span[1] : prob.domain_hi;
            auto [theta, phi] =
                slq::fundamental_pair(prob.coeffs, bracket_lambda, a, b, tolerances(bracket_opts));
            OutputStream out(bracket_opts.output);
            if (bracket_opts.format == "csv") {
                out.get() << "t,re_bracket,im_bracket\n";
                for (int i = 0; i <= 200; ++i) {
                    const double t = a + (b - a) * i / 200.0;
                    const auto v = slq::bracket_at(theta, phi, t).value;
                    out.get() << fmt(t) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
                }
            } else {
                const auto b0 = slq::bracket_at(theta, phi, a).value;
                const auto b1 = slq::bracket_at(theta, phi, b).value;
                double worst = 0.0;
                for (int i = 0; i <= 1000; ++i) {
                    const double t = a + (b - a) * i / 1000.0;
                    worst = std::max(worst, std::abs(slq::bracket_at(theta, phi, t).value - b0));
                }
                const double res =
                    slq::lagrange_residual(prob.coeffs, theta, std::nullopt, phi, std::nullopt, a, b);
                out.get() << "bracket(a): (" << fmt(b0.real()) << ", " << fmt(b0.imag()) << ")\n";
                out.get() << "bracket(b): (" << fmt(b1.real()) << ", " << fmt(b1.imag()) << ")\n";
                out.get() << "max deviation from bracket(a) over 1001 points: " << fmt(worst) << "\n";
                out.get() << "lagrange residual: " << fmt(res) << "\n";
            }
        } else if (cmd_form->parsed()) {
            const slq::Problem prob = slq::load_problem(form_opts.problem);
            const double a = form_support.size() == 2 ? form_support[0] : prob.domain_lo;
            const double b = form_support.size() == 2 ? form_support[1] : prob.domain_hi;
            const slq::TestFunction tf(slq::Expr::parse(form_u), slq::Expr::parse(form_du), a, b);
            const double form = slq::form_value(prob.coeffs, tf);
            const double norm2 = slq::integrate_or_throw(
                [&](double x) { return std::norm(tf.u(x)); }, a, b, {}, 1e-11, 1e-14);
            OutputStream out(form_opts.output);
            if (form_opts.format == "csv") {
                out.get() << "label,value\n";
                out.get() << "form_value," << fmt(form) << "\n";
                out.get() << "norm_sq," << fmt(norm2) << "\n";
                out.get() << "rayleigh_quotient," << fmt(form / norm2) << "\n";
            } else {
                out.get() << "form value: " << fmt(form) << "\n";
                out.get() << "norm^2:     " << fmt(norm2) << "\n";
                out.get() << "quotient:   " << fmt(form / norm2) << "\n";
            }
        } else if (cmd_check->parsed()) {
            const slq::Problem prob = slq::load_problem(check_opts.problem);
            slq::ConditionReport rep;
            if (check_criterion == "hr") {
                rep = slq::check_hartman_rellich(prob.coeffs);
            } else if (check_criterion == "clark") {
                rep = slq::check_clark(prob.coeffs);
            } else if (check_criterion == "thmB") {
                rep = slq::check_theorem_b(prob.coeffs);
            } else {
                if (check_intervals.empty())
                    throw slq::Error("check --criterion thmC needs --intervals CSV (rows n,a,b)");
                std::ifstream in(check_intervals);
                if (!in) throw slq::Error("cannot open intervals file '" + check_intervals + "'");
                rep = slq::check_theorem_c(prob.coeffs, slq::IntervalSequence::from_csv(in));
            }
            emit_report(rep, check_opts);
        } else if (cmd_probe->parsed()) {
            const slq::Problem prob = slq::load_problem(probe_opts.problem);
            const auto windows = slq::default_probe_windows(prob.coeffs, probe_windows);
            std::optional<double> lambda0;
            if (lambda0_opt->count() > 0) lambda0 = probe_lambda0;
            emit_report(slq::kernel_probe(prob.coeffs, windows, tolerances(probe_opts), lambda0,
                                          probe_directions),
                        probe_opts);
        } else if (cmd_rho->parsed()) {
            const slq::Problem prob = slq::load_problem(rho_opts.problem);
            const double a = rho_span.size() == 2 ? rho_span[0] : prob.domain_lo;
            const double b = rho_span.size() == 2 ? rho_span[1] : prob.domain_hi;
            const slq::RhoMap map = slq::rho_transform(prob.coeffs, a, b, tolerances(rho_opts));
            OutputStream out(rho_opts.output);
            if (rho_opts.format == "csv") {
                out.get() << "x,rho\n";
                for (int i = 0; i <= 256; ++i) {
                    const double x = a + (b - a) * i / 256.0;
                    out.get() << fmt(x) << "," << fmt(map.rho(x)) << "\n";
                }
            } else {
                for (int i = 0; i <= 10; ++i) {
                    const double x = a + (b - a) * i / 10.0;
                    out.get() << "rho(" << fmt(x) << ") = " << fmt(map.rho(x)) << "\n";
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
