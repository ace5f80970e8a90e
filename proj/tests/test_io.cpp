#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ccopt/problem_io.hpp"

using namespace ccopt;

TEST_CASE("problem JSON round-trip preserves the instance") {
    ProblemBundle bundle;
    bundle.problem = gamma_case();
    bundle.config.max_iterations = 7;
    bundle.config.convergence_tol = 1e-5;
    bundle.seed = 42;

    RiskMethod method = RiskMethod::vp;
    const json j = problem_to_json(bundle, RiskMethod::cantelli);
    const ProblemBundle back = problem_from_json(j, &method);

    CHECK(method == RiskMethod::cantelli);
    CHECK(back.problem.name == "cwh-gamma");
    CHECK(back.seed == 42);
    CHECK(back.config.max_iterations == 7);
    CHECK(back.config.convergence_tol == 1e-5);
    CHECK(back.problem.alpha == bundle.problem.alpha);
    CHECK(back.problem.system.state_matrix.isApprox(bundle.problem.system.state_matrix));
    CHECK(back.problem.system.initial_state.isApprox(bundle.problem.system.initial_state));
    CHECK(back.problem.input_lower.isApprox(bundle.problem.input_lower));
    REQUIRE(back.problem.polytopes.steps() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(back.problem.polytopes.g[k].isApprox(bundle.problem.polytopes.g[k]));
        CHECK(back.problem.polytopes.h[k].isApprox(bundle.problem.polytopes.h[k]));
    }
    REQUIRE(back.problem.control_spec.steps() == 5);
    CHECK(back.problem.control_spec.templates[0].isApprox(bundle.problem.control_spec.templates[0]));
    const auto& col = back.problem.control_spec.columns[0][0];
    REQUIRE(col.dist.has_value());
    CHECK(col.dist->kind_name() == std::string("gamma"));
    CHECK(col.dist->mean() == doctest::Approx(1.0));
    CHECK(col.row_mask == std::vector<bool>({true, true, true, false, false, false}));

    // The rebuilt instance produces identical analytic moments.
    const auto m1 = bundle.problem.moments();
    const auto m2 = back.problem.moments();
    CHECK(m1.per_step_mean[0].isApprox(m2.per_step_mean[0], 1e-14));
    CHECK(m1.per_step_vec_covariance[0].isApprox(m2.per_step_vec_covariance[0], 1e-14));
}

TEST_CASE("parse errors carry the JSON path") {
    ProblemBundle bundle;
    bundle.problem = beta_case();
    json j = problem_to_json(bundle);

    json bad = j;
    bad["schema"] = "other/9";
    CHECK_THROWS_AS(problem_from_json(bad), ProblemParseError);

    bad = j;
    bad["system"]["A"] = json::array({1.0, 2.0}); // not 2-D
    CHECK_THROWS_WITH_AS(problem_from_json(bad), doctest::Contains("system.A"), ProblemParseError);

    bad = j;
    bad["uncertainty"]["steps"][0]["columns"][0]["dist"]["kind"] = "laplace";
    CHECK_THROWS_WITH_AS(problem_from_json(bad), doctest::Contains("unknown distribution kind"),
                         ProblemParseError);

    bad = j;
    bad["uncertainty"]["steps"][0]["columns"][0]["rows"].push_back(17);
    CHECK_THROWS_WITH_AS(problem_from_json(bad), doctest::Contains("row index out of range"),
                         ProblemParseError);

    bad = j;
    bad["cost"]["type"] = "linear";
    CHECK_THROWS_WITH_AS(problem_from_json(bad), doctest::Contains("cost.type"), ProblemParseError);

    bad = j;
    bad.erase("risk");
    CHECK_THROWS_AS(problem_from_json(bad), ProblemParseError);

    // Structurally valid JSON describing an inconsistent instance.
    bad = j;
    bad["system"]["N"] = 4; // horizon no longer matches the 5-step uncertainty model
    CHECK_THROWS_AS(problem_from_json(bad), ProblemParseError);
}

TEST_CASE("built-in problem references and file loading") {
    CHECK(load_problem("cwh-gamma").problem.name == "cwh-gamma");
    CHECK(load_problem("cwh-beta").problem.name == "cwh-beta");
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), ProblemParseError);

    const std::string path = "io_roundtrip_problem.json";
    ProblemBundle bundle;
    bundle.problem = gamma_case();
    bundle.seed = 9;
    write_json_file(problem_to_json(bundle), path);
    const ProblemBundle loaded = load_problem(path);
    CHECK(loaded.problem.name == "cwh-gamma");
    CHECK(loaded.seed == 9);

    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_problem(path), ProblemParseError);
    std::remove(path.c_str());
}

TEST_CASE("solution and report serialization") {
    Solution sol;
    sol.input_seq = Eigen::VectorXd::Constant(3, 0.5);
    sol.allocation.lambda = {2.0, 3.0};
    sol.cost = 0.75;
    sol.iterations = 2;
    sol.status = SolveStatus::converged;
    sol.per_row_slack = {0.1, 0.0};
    sol.cost_history = {0.8, 0.75};

    const json j = solution_to_json(sol, "toy", "vp", 7, ACSConfig{}, 0.25);
    CHECK(j["schema"] == "ccopt-result/1");
    CHECK(j["status"] == "converged");
    CHECK(j["cost"].get<double>() == 0.75);
    CHECK(j["U"].size() == 3);
    CHECK(j["lambda"][1].get<double>() == 3.0);
    CHECK(j["wall_time_s"].get<double>() == 0.25);

    ValidationReport report;
    report.n_samples = 1000;
    report.seed = 5;
    report.joint_satisfaction = 0.99;
    report.per_row_violation = {0.01};
    report.unimodality = {static_cast<int>(UnimodalityVerdict::unimodal)};
    const json r = report_to_json(report, 0.15);
    CHECK(r["schema"] == "ccopt-report/1");
    CHECK(r["joint_satisfaction"].get<double>() == 0.99);
    CHECK(r["unimodality"][0] == "unimodal");
}

TEST_CASE("expected trajectory table") {
    ColumnMultiplier det;
    det.row_mask = {false};
    Problem p;
    p.name = "walk";
    p.system.state_matrix = Eigen::MatrixXd::Identity(1, 1);
    p.system.state_dim = 1;
    p.system.input_dim = 1;
    p.system.horizon = 2;
    p.system.initial_state = Eigen::VectorXd::Constant(1, 1.0);
    p.control_spec = RandomControlMatrixSpec::uniform(Eigen::MatrixXd::Ones(1, 1), {det}, 2);
    p.polytopes.g = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
    p.polytopes.h = {Eigen::VectorXd::Constant(1, 10.0), Eigen::VectorXd::Constant(1, 10.0)};
    p.input_lower = Eigen::VectorXd::Constant(2, -1.0);
    p.input_upper = Eigen::VectorXd::Constant(2, 1.0);

    Eigen::VectorXd u(2);
    u << 0.5, -0.25;
    const std::string csv = expected_trajectory_csv(p, u);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "k,Ex0");
    std::getline(lines, line);
    CHECK(line == "0,1");
    std::getline(lines, line);
    CHECK(line == "1,1.5");
    std::getline(lines, line);
    CHECK(line == "2,1.25");
}
