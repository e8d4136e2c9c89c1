#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#ifndef SLQ_CLI_PATH
#error "SLQ_CLI_PATH must be defined"
#endif
#ifndef SLQ_PROBLEMS_DIR
#error "SLQ_PROBLEMS_DIR must be defined"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(SLQ_CLI_PATH) + " " + args + " 2>&1";
    RunResult res;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string problem(const char* name) { return std::string(SLQ_PROBLEMS_DIR) + "/" + name; }

} // namespace

TEST_CASE("eig on the free problem") {
    const auto res = run_cli("eig --problem " + problem("free.slq") + " --count 3");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("lambda=9.8696044") != std::string::npos);
    CHECK(res.output.find("lambda=39.4784176") != std::string::npos);
    CHECK(res.output.find("lambda=88.8264396") != std::string::npos);
}

TEST_CASE("eig csv header is exact") {
    const auto res = run_cli("eig --problem " + problem("free.slq") + " --count 1 --format csv");
    CHECK(res.exit_code == 0);
    CHECK(res.output.rfind("k,lambda,residual,bracket_lo,bracket_hi\n", 0) == 0);
}

TEST_CASE("check hr on the quartic problem reports violated with exit 0") {
    const auto res = run_cli("check --problem " + problem("p_quartic.slq") + " --criterion hr");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("verdict:   violated") != std::string::npos);
}

TEST_CASE("check clark on the exponential problem") {
    const auto res = run_cli("check --problem " + problem("p_exp.slq") + " --criterion clark");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("violated") != std::string::npos);
}

TEST_CASE("usage errors give exit code 2") {
    CHECK(run_cli("eig --count").exit_code == 2);
    CHECK(run_cli("nonsense").exit_code == 2);
    CHECK(run_cli("eig").exit_code == 2); // missing --problem
    CHECK(run_cli("check --problem " + problem("free.slq") + " --criterion bogus").exit_code == 2);
}

TEST_CASE("missing problem file gives exit code 1") {
    const auto res = run_cli("eig --problem /nonexistent.slq --count 1");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("error:") != std::string::npos);
}

TEST_CASE("domain errors give exit code 1") {
    // thmC without an intervals file is a domain error, not a usage error.
    const auto res = run_cli("check --problem " + problem("free.slq") + " --criterion thmC");
    CHECK(res.exit_code == 1);
}

TEST_CASE("validate and rho run on the quadratic problem") {
    const auto v = run_cli("validate --problem " + problem("p_quadratic.slq"));
    CHECK(v.exit_code == 0);
    CHECK(v.output.find("verdict:   satisfied") != std::string::npos);

    const auto r = run_cli("rho --problem " + problem("p_quadratic.slq") + " --span 0 5");
    CHECK(r.exit_code == 0);
    // rho(5) = asinh(5)
    CHECK(r.output.find("2.31243834") != std::string::npos);
}

TEST_CASE("solve emits the trajectory csv schema") {
    const auto res =
        run_cli("solve --problem " + problem("delta.slq") + " --u0 0 0 --u1 1 0 --format csv");
    CHECK(res.exit_code == 0);
    CHECK(res.output.rfind("x,re_u,im_u,re_u1,im_u1\n", 0) == 0);
    // Final state of the hand-solved delta trajectory: u(1) = 3.5.
    CHECK(res.output.find("\n1,3.5,") != std::string::npos);
}

TEST_CASE("bracket subcommand reports constancy diagnostics") {
    const auto res = run_cli("bracket --problem " + problem("delta.slq") + " --lambda 2");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("bracket(a): (1, 0)") != std::string::npos);
    CHECK(res.output.find("lagrange residual:") != std::string::npos);
}

TEST_CASE("form subcommand matches the closed form") {
    const auto res = run_cli("form --problem " + problem("free.slq") +
                             " --u 'sin(pi*x)' --du 'pi*cos(pi*x)' --support 0 1");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("form value: 4.93480220054") != std::string::npos);
    CHECK(res.output.find("quotient:   9.8696044") != std::string::npos);
}

TEST_CASE("probe subcommand on the confined problem") {
    const auto res = run_cli("probe --problem " + problem("confined.slq") + " --windows 6 --directions 8");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("verdict:   satisfied") != std::string::npos);
}

TEST_CASE("check thmC via an intervals csv") {
    const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                             "/slq_intervals_test.csv";
    {
        std::ofstream out(path);
        out << "n,a,b\n";
        for (int n = -5; n <= 5; ++n) out << n << "," << n << "," << n + 1 << "\n";
    }
    const auto res =
        run_cli("check --problem " + problem("free.slq") + " --criterion thmC --intervals " + path);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("verdict:   satisfied") != std::string::npos);
    CHECK(res.output.find("C_star = 1") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("identical invocations produce byte-identical output") {
    const std::string cmd = "eig --problem " + problem("delta.slq") + " --count 2 --format csv";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("output lands in --output file") {
    const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                             "/slq_cli_out_test.csv";
    const auto res = run_cli("eig --problem " + problem("free.slq") + " --count 1 --format csv --output " + path);
    CHECK(res.exit_code == 0);
    CHECK(res.output.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str().rfind("k,lambda,residual,bracket_lo,bracket_hi\n", 0) == 0);
    std::remove(path.c_str());
}
