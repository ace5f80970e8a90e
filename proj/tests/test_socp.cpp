#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "ccopt/socp.hpp"

using namespace ccopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SocpProblem quadratic_box(int d, double lo, double hi) {
    SocpProblem p;
    p.quad = 2.0 * Eigen::MatrixXd::Identity(d, d);
    p.linear = Eigen::VectorXd::Zero(d);
    p.ineq_a = Eigen::MatrixXd::Zero(0, d);
    p.ineq_b = Eigen::VectorXd::Zero(0);
    p.lower = Eigen::VectorXd::Constant(d, lo);
    p.upper = Eigen::VectorXd::Constant(d, hi);
    return p;
}

} // namespace

TEST_CASE("unconstrained box minimum at zero") {
    auto p = quadratic_box(3, -0.1, 0.1);
    const auto res = solve_socp(p, Eigen::VectorXd::Constant(3, 0.05));
    REQUIRE(res.status == SocpStatus::optimal);
    CHECK(res.x.norm() < 1e-6);
    CHECK(res.objective < 1e-9);
}

TEST_CASE("active box bound") {
    auto p = quadratic_box(2, 1.0, 3.0);
    const auto res = solve_socp(p, Eigen::VectorXd::Constant(2, 2.0));
    REQUIRE(res.status == SocpStatus::optimal);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("linear constraint with phase I start outside the feasible set") {
    // min x'x s.t. x0 + x1 >= 3  (written as -x0 - x1 <= -3). Optimum (1.5, 1.5).
    auto p = quadratic_box(2, -10.0, 10.0);
    p.ineq_a = Eigen::MatrixXd(1, 2);
    p.ineq_a << -1.0, -1.0;
    p.ineq_b = Eigen::VectorXd(1);
    p.ineq_b << -3.0;
    const auto res = solve_socp(p, Eigen::VectorXd::Zero(2)); // infeasible start
    REQUIRE(res.status == SocpStatus::optimal);
    CHECK(res.x[0] == doctest::Approx(1.5).epsilon(1e-5));
    CHECK(res.x[1] == doctest::Approx(1.5).epsilon(1e-5));
}

TEST_CASE("infeasible linear rows are reported") {
    auto p = quadratic_box(1, -1.0, 1.0);
    p.ineq_a = Eigen::MatrixXd(2, 1);
    p.ineq_a << 1.0, -1.0;
    p.ineq_b = Eigen::VectorXd(2);
    p.ineq_b << -2.0, -2.0; // x <= -2 and x >= 2 simultaneously
    const auto res = solve_socp(p, Eigen::VectorXd::Zero(1));
    CHECK(res.status == SocpStatus::infeasible);
}

TEST_CASE("second-order cone epigraph: min t s.t. ||x|| <= t") {
    // Variables (x0, x1, t); minimize t with x pinned by a tight box; t* = ||x||.
    SocpProblem p;
    p.quad = Eigen::MatrixXd::Zero(3, 3);
    p.linear = Eigen::VectorXd::Zero(3);
    p.linear[2] = 1.0;
    p.lower = Eigen::VectorXd(3);
    p.upper = Eigen::VectorXd(3);
    p.lower << 1.0 - 1e-9, 2.0 - 1e-9, -kInf;
    p.upper << 1.0 + 1e-9, 2.0 + 1e-9, kInf;
    p.ineq_a = Eigen::MatrixXd::Zero(0, 3);
    p.ineq_b = Eigen::VectorXd::Zero(0);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 3);
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
    p.soc_f = {f};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    c[2] = 1.0;
    p.soc_c = {c};

    Eigen::VectorXd x0(3);
    x0 << 1.0, 2.0, 5.0;
    const auto res = solve_socp(p, x0);
    REQUIRE(res.status == SocpStatus::optimal);
    CHECK(res.x[2] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));
}

TEST_CASE("cone-constrained quadratic matches the analytic solution") {
    // min x'x s.t. 4 - x0 + 2 ||(x1, x2)|| <= 2, box |x| <= 5, via slack t:
    // -x0 + 2 t <= -2, ||(x1,x2)|| <= t. Optimum: x = (2, 0, 0).
    SocpProblem p;
    p.quad = Eigen::MatrixXd::Zero(4, 4);
    p.quad.topLeftCorner(3, 3) = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    p.linear = Eigen::VectorXd::Zero(4);
    p.lower = Eigen::VectorXd::Constant(4, -kInf);
    p.upper = Eigen::VectorXd::Constant(4, kInf);
    p.lower.head(3).setConstant(-5.0);
    p.upper.head(3).setConstant(5.0);
    p.ineq_a = Eigen::MatrixXd(1, 4);
    p.ineq_a << -1.0, 0.0, 0.0, 2.0;
    p.ineq_b = Eigen::VectorXd(1);
    p.ineq_b << -2.0;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 4);
    f(0, 1) = 1.0;
    f(1, 2) = 1.0;
    p.soc_f = {f};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[3] = 1.0;
    p.soc_c = {c};

    Eigen::VectorXd x0(4);
    x0 << 0.0, 0.1, 0.1, 1.0;
    const auto res = solve_socp(p, x0);
    REQUIRE(res.status == SocpStatus::optimal);
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(res.x.segment(1, 2).norm() < 1e-4);
}
