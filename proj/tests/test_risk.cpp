#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccopt/cone.hpp"
#include "ccopt/risk.hpp"

using namespace ccopt;

TEST_CASE("vp_risk direct values") {
    CHECK(vp_risk(2.0) == doctest::Approx(4.0 / 45.0).epsilon(1e-14));
    CHECK(vp_risk(3.0) == doctest::Approx(4.0 / 90.0).epsilon(1e-14));
    // Approaches 1/6 from below at the validity floor.
    CHECK(vp_risk(kVpLambdaFloor + 1e-9) < 1.0 / 6.0);
    CHECK(vp_risk(kVpLambdaFloor + 1e-9) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    CHECK_THROWS_AS(vp_risk(kVpLambdaFloor), std::domain_error);
    CHECK_THROWS_AS(vp_risk(1.0), std::domain_error);
}

TEST_CASE("cantelli_risk direct values") {
    CHECK(cantelli_risk(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cantelli_risk(3.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK_THROWS_AS(cantelli_risk(0.0), std::domain_error);
}

TEST_CASE("vp is a 4/9 tightening of cantelli and both decrease in lambda") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(kVpLambdaFloor + 1e-6, 100.0);
    double prev_lambda = 0.0, prev_vp = 1.0, prev_c = 1.0;
    for (int i = 0; i < 2000; ++i) {
        const double lam = u(rng);
        CHECK(vp_risk(lam) == doctest::Approx((4.0 / 9.0) * cantelli_risk(lam)).epsilon(1e-14));
        if (lam > prev_lambda) {
            CHECK(vp_risk(lam) < prev_vp);
            CHECK(cantelli_risk(lam) < prev_c);
            prev_lambda = lam;
            prev_vp = vp_risk(lam);
            prev_c = cantelli_risk(lam);
        }
    }
}

TEST_CASE("risk_to_lambda inverts both maps") {
    CHECK(risk_to_lambda(4.0 / 45.0, RiskMethod::vp) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(risk_to_lambda(0.5, RiskMethod::cantelli) == doctest::Approx(1.0).epsilon(1e-12));
    // 32 rows sharing alpha = 0.15.
    CHECK(risk_to_lambda(0.15 / 32.0, RiskMethod::vp) == doctest::Approx(9.68585).epsilon(1e-5));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-6, 1.0 / 6.0 - 1e-6);
    for (int i = 0; i < 2000; ++i) {
        const double omega = u(rng);
        CHECK(vp_risk(risk_to_lambda(omega, RiskMethod::vp)) == doctest::Approx(omega).epsilon(1e-12));
        CHECK(cantelli_risk(risk_to_lambda(omega, RiskMethod::cantelli)) ==
              doctest::Approx(omega).epsilon(1e-12));
    }
    CHECK_THROWS_AS(risk_to_lambda(0.2, RiskMethod::vp), std::domain_error);
    CHECK_THROWS_AS(risk_to_lambda(1.2, RiskMethod::cantelli), std::domain_error);
}

namespace {

PolytopeSequence toy_polytopes(int steps, int rows_per_step, int n) {
    PolytopeSequence seq;
    for (int k = 0; k < steps; ++k) {
        seq.g.push_back(Eigen::MatrixXd::Identity(rows_per_step, n));
        seq.h.push_back(Eigen::VectorXd::Ones(rows_per_step));
    }
    return seq;
}

} // namespace

TEST_CASE("uniform_allocation splits the budget evenly") {
    const auto seq = toy_polytopes(8, 4, 4); // M = 32
    const auto alloc = uniform_allocation(seq, 0.15, RiskMethod::vp);
    REQUIRE(alloc.lambda.size() == 32);
    for (double lam : alloc.lambda)
        CHECK(lam == doctest::Approx(9.68585).epsilon(1e-5));
    CHECK(total_risk(alloc) == doctest::Approx(0.15).epsilon(1e-12));

    // M = 1, alpha = 0.15: lambda ~ 1.6499 is still above sqrt(5/3).
    const auto single = uniform_allocation(toy_polytopes(1, 1, 1), 0.15, RiskMethod::vp);
    CHECK(single.lambda[0] == doctest::Approx(std::sqrt(4.0 / (9.0 * 0.15) - 1.0)).epsilon(1e-12));
    CHECK(single.lambda[0] > kVpLambdaFloor);

    CHECK_THROWS_AS(uniform_allocation(seq, 0.2, RiskMethod::vp), std::domain_error);
    CHECK_NOTHROW(uniform_allocation(seq, 0.2, RiskMethod::cantelli));
}

TEST_CASE("total_risk sums the per-row bound") {
    RiskAllocation alloc;
    alloc.method = RiskMethod::vp;
    alloc.alpha = 0.15;
    alloc.lambda = {2.0};
    CHECK(total_risk(alloc) == doctest::Approx(4.0 / 45.0).epsilon(1e-14));
}

TEST_CASE("cone row encodes mean + lambda std <= h") {
    ConstraintGradientData data;
    data.affine = Eigen::VectorXd::Zero(3);
    data.affine << 1.0, -2.0, 0.5;
    data.offset = 0.3;
    data.norm_map = Eigen::MatrixXd::Zero(2, 3);
    data.norm_map << 0.5, 0, 0, 0, 1.5, 0;
    data.step_index = 1;

    const auto row = build_cone_row(1, 0, 2.0, data, 4.0);
    Eigen::VectorXd u(3);
    u << 0.2, -0.1, 0.4;
    const double expected = data.affine.dot(u) + data.offset + 2.0 * (data.norm_map * u).norm();
    CHECK(row.evaluate(u) == doctest::Approx(expected).epsilon(1e-14));

    // Linear in lambda: doubling lambda adds lambda * ||M u|| once more.
    const auto row2 = build_cone_row(1, 0, 4.0, data, 4.0);
    CHECK(row2.evaluate(u) - row.evaluate(u) ==
          doctest::Approx(2.0 * (data.norm_map * u).norm()).epsilon(1e-12));

    // Zero covariance reduces to the deterministic half-space.
    ConstraintGradientData det = data;
    det.norm_map.setZero();
    const auto row3 = build_cone_row(1, 0, 2.0, det, 4.0);
    CHECK(row3.evaluate(u) == doctest::Approx(data.affine.dot(u) + data.offset).epsilon(1e-14));
    CHECK(row3.is_deterministic());
}
