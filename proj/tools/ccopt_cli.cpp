// Command-line front end: solve / validate / compare / export workflows over
// built-in or file-based problem definitions.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccopt/acs.hpp"
#include "ccopt/problem_io.hpp"
#include "ccopt/scenario.hpp"
#include "ccopt/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitUnsafe = 3;

struct MethodRun {
    std::string method;
    ccopt::Solution solution;
    double wall_time_s = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MethodRun run_method(const ccopt::ProblemBundle& bundle, const std::string& method,
                     double delta, std::uint64_t seed) {
    MethodRun run;
    run.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    if (method == "scenario") {
        std::mt19937_64 rng(seed);
        run.solution = ccopt::scenario_solve(bundle.problem, delta, rng,
                                             bundle.config.subproblem_tol);
    } else {
        run.solution = ccopt::acs_solve(bundle.problem, ccopt::risk_method_from_string(method),
                                        bundle.config);
    }
    run.wall_time_s = seconds_since(t0);
    return run;
}

int cmd_solve(const std::string& problem_ref, const std::string& method, double delta,
              std::uint64_t seed, const std::string& out_path) {
    ccopt::ProblemBundle bundle = ccopt::load_problem(problem_ref);
    const MethodRun run = run_method(bundle, method, delta, seed);

    const ccopt::json j = ccopt::solution_to_json(run.solution, bundle.problem.name, method,
                                                  seed, bundle.config, run.wall_time_s);
    if (!out_path.empty())
        ccopt::write_json_file(j, out_path);
    std::cout << j.dump(2) << "\n";

    if (run.solution.status == ccopt::SolveStatus::infeasible) {
        std::cerr << "solver: infeasible\n";
        return kExitSolver;
    }
    return kExitOk;
}

int cmd_validate(const std::string& problem_ref, const std::string& solution_path,
                 int n_samples, std::uint64_t seed, const std::string& out_path) {
    ccopt::ProblemBundle bundle = ccopt::load_problem(problem_ref);

    std::ifstream in(solution_path);
    if (!in) {
        std::cerr << "cannot open solution file '" << solution_path << "'\n";
        return kExitUsage;
    }
    ccopt::json sol_json;
    try {
        sol_json = ccopt::json::parse(in);
    } catch (const ccopt::json::parse_error& e) {
        std::cerr << "solution file: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!sol_json.contains("U")) {
        std::cerr << "solution file has no control sequence\n";
        return kExitUsage;
    }
    const auto u_list = sol_json["U"].get<std::vector<double>>();
    const Eigen::Index nu =
        static_cast<Eigen::Index>(bundle.problem.system.horizon) * bundle.problem.system.input_dim;
    if (static_cast<Eigen::Index>(u_list.size()) != nu) {
        std::cerr << "solution/problem dimension mismatch: U has " << u_list.size()
                  << " entries, problem expects " << nu << "\n";
        return kExitUsage;
    }
    Eigen::VectorXd u(nu);
    for (Eigen::Index i = 0; i < nu; ++i)
        u[i] = u_list[static_cast<std::size_t>(i)];

    const ccopt::ValidationReport report =
        ccopt::monte_carlo_validate(bundle.problem, u, n_samples, seed, /*with_unimodality=*/true);
    const ccopt::json j = ccopt::report_to_json(report, bundle.problem.alpha);
    if (!out_path.empty())
        ccopt::write_json_file(j, out_path);
    std::cout << j.dump(2) << "\n";

    return report.joint_satisfaction >= 1.0 - bundle.problem.alpha ? kExitOk : kExitUnsafe;
}

int cmd_compare(const std::string& problem_ref, const std::vector<std::string>& methods,
                int n_samples, std::uint64_t seed, double delta, const std::string& out_dir) {
    if (methods.empty()) {
        std::cerr << "compare: at least one method is required\n";
        return kExitUsage;
    }
    ccopt::ProblemBundle bundle = ccopt::load_problem(problem_ref);
    if (!out_dir.empty())
        std::filesystem::create_directories(out_dir);

    ccopt::json table = ccopt::json::array();
    std::cout << std::left << std::setw(10) << "method" << std::setw(12) << "status"
              << std::setw(16) << "cost" << std::setw(8) << "iters" << std::setw(12)
              << "time_s" << std::setw(14) << "satisfaction" << "\n";

    for (const auto& method : methods) {
        const MethodRun run = run_method(bundle, method, delta, seed);
        ccopt::json row;
        row["method"] = method;
        row["status"] = ccopt::to_string(run.solution.status);
        row["iterations"] = run.solution.iterations;
        row["wall_time_s"] = run.wall_time_s;

        std::string satisfaction = "-";
        if (run.solution.status != ccopt::SolveStatus::infeasible) {
            row["cost"] = run.solution.cost;
            const ccopt::ValidationReport report = ccopt::monte_carlo_validate(
                bundle.problem, run.solution.input_seq, n_samples, seed);
            row["joint_satisfaction"] = report.joint_satisfaction;
            row["satisfied_samples"] =
                static_cast<std::int64_t>(std::llround(report.joint_satisfaction * n_samples));
            satisfaction = std::to_string(report.joint_satisfaction);
            if (!out_dir.empty()) {
                std::ofstream csv(out_dir + "/trajectory_" + method + ".csv");
                csv << ccopt::expected_trajectory_csv(bundle.problem, run.solution.input_seq);
                ccopt::write_json_file(
                    ccopt::solution_to_json(run.solution, bundle.problem.name, method, seed,
                                            bundle.config, run.wall_time_s),
                    out_dir + "/solution_" + method + ".json");
            }
        }
        std::cout << std::left << std::setw(10) << method << std::setw(12)
                  << ccopt::to_string(run.solution.status) << std::setw(16)
                  << (run.solution.status != ccopt::SolveStatus::infeasible
                          ? std::to_string(run.solution.cost)
                          : std::string("-"))
                  << std::setw(8) << run.solution.iterations << std::setw(12) << run.wall_time_s
                  << std::setw(14) << satisfaction << "\n";
        table.push_back(std::move(row));
    }

    if (!out_dir.empty()) {
        ccopt::json j;
        j["schema"] = "ccopt-comparison/1";
        j["problem"] = bundle.problem.name;
        j["seed"] = seed;
        j["n_samples"] = n_samples;
        j["rows"] = std::move(table);
        ccopt::write_json_file(j, out_dir + "/comparison.json");
    }
    return kExitOk;
}

int cmd_export(const std::string& builtin, const std::string& out_path) {
    ccopt::ProblemBundle bundle = ccopt::load_problem(builtin);
    const ccopt::json j = ccopt::problem_to_json(bundle);
    if (!out_path.empty())
        ccopt::write_json_file(j, out_path);
    else
        std::cout << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chance-constrained optimal control with random control matrices"};
    app.require_subcommand(1);

    std::string problem_ref, method = "vp", out_path, out_dir, solution_path;
    std::vector<std::string> methods;
    double delta = 1e-8;
    std::uint64_t seed = 0;
    int n_samples = 100000;

    auto* solve = app.add_subcommand("solve", "Solve a problem and write the result file");
    solve->add_option("problem", problem_ref, "Built-in name (cwh-gamma, cwh-beta) or problem file")
        ->required();
    solve->add_option("--method", method, "vp | cantelli | scenario")
        ->check(CLI::IsMember({"vp", "cantelli", "scenario"}));
    solve->add_option("--delta", delta, "Scenario-approach confidence parameter");
    solve->add_option("--seed", seed, "Random seed (scenario sampling)");
    solve->add_option("--out", out_path, "Result file path");

    auto* validate = app.add_subcommand("validate", "Monte Carlo check of a solved control sequence");
    validate->add_option("problem", problem_ref, "Problem reference")->required();
    validate->add_option("solution", solution_path, "Result file from solve")->required();
    validate->add_option("--samples", n_samples, "Monte Carlo sample count");
    validate->add_option("--seed", seed, "Random seed");
    validate->add_option("--out", out_path, "Report file path");

    auto* compare = app.add_subcommand("compare", "Solve + validate several methods side by side");
    compare->add_option("problem", problem_ref, "Problem reference")->required();
    compare->add_option("--methods", methods, "Comma-separated methods")->delimiter(',');
    compare->add_option("--samples", n_samples, "Monte Carlo sample count");
    compare->add_option("--seed", seed, "Random seed");
    compare->add_option("--delta", delta, "Scenario-approach confidence parameter");
    compare->add_option("--out-dir", out_dir, "Directory for result and trajectory files");

    auto* exp = app.add_subcommand("export", "Write a built-in problem as a problem file");
    exp->add_option("problem", problem_ref, "Built-in name")->required();
    exp->add_option("--out", out_path, "Problem file path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve(problem_ref, method, delta, seed, out_path);
        if (validate->parsed())
            return cmd_validate(problem_ref, solution_path, n_samples, seed, out_path);
        if (compare->parsed())
            return cmd_compare(problem_ref, methods, n_samples, seed, delta, out_dir);
        if (exp->parsed())
            return cmd_export(problem_ref, out_path);
    } catch (const ccopt::ProblemParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
