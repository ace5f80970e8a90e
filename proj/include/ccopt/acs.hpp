#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/problem.hpp"
#include "ccopt/socp.hpp"

namespace ccopt {

struct ACSConfig {
    int max_iterations = 20;        // n_max
    double convergence_tol = 1e-6;  // relative cost change between U-steps
    double subproblem_tol = 1e-9;   // cone-solver duality gap
};

/// Cap for rows with zero (or negligible) standard deviation; the associated
/// tail bound 4/(9(lambda^2+1)) is ~4e-13 and contributes nothing to the
/// budget.
inline constexpr double kLambdaMax = 1e6;
inline constexpr double kLambdaEps = 1e-9;

enum class SolveStatus { converged, max_iter, infeasible };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible: return "infeasible";
    }
    return "?";
}

struct Solution {
    Eigen::VectorXd input_seq;       // U*
    RiskAllocation allocation;
    double cost = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> per_row_slack;       // h - (mean + lambda std) at U*
    std::vector<double> cost_history;        // cost after each accepted U-step
    std::vector<std::string> diagnostics;    // violated rows etc. on failure
};

/// Solves the convex U-step: min U'U s.t. box bounds and all cone rows with
/// lambda fixed. Returns nullopt on an infeasible subproblem. A warm start
/// (e.g. the previous iterate) is used when it is strictly feasible; the
/// solver falls back to a cold start otherwise.
inline std::optional<Eigen::VectorXd> solve_U_step(const ConeProgram& program,
                                                   double gap_tol = 1e-9,
                                                   const Eigen::VectorXd* warm = nullptr) {
    program.validate();
    const Eigen::Index nu = program.lower.size();

    // Variables x = (U, t_r for each stochastic row). Deterministic rows
    // (zero norm map) stay plain linear constraints.
    std::vector<int> soc_rows;
    for (std::size_t r = 0; r < program.rows.size(); ++r)
        if (!program.rows[r].is_deterministic())
            soc_rows.push_back(static_cast<int>(r));

    const Eigen::Index d = nu + static_cast<Eigen::Index>(soc_rows.size());
    SocpProblem sp;
    sp.quad = Eigen::MatrixXd::Zero(d, d);
    sp.quad.topLeftCorner(nu, nu) = 2.0 * Eigen::MatrixXd::Identity(nu, nu);
    sp.linear = Eigen::VectorXd::Zero(d);
    sp.lower = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    sp.upper = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    sp.lower.head(nu) = program.lower;
    sp.upper.head(nu) = program.upper;

    sp.ineq_a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(program.rows.size()), d);
    sp.ineq_b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(program.rows.size()));
    Eigen::Index t_slot = nu;
    for (std::size_t r = 0; r < program.rows.size(); ++r) {
        const auto& row = program.rows[r];
        sp.ineq_a.row(static_cast<Eigen::Index>(r)).head(nu) = row.affine.transpose();
        sp.ineq_b[static_cast<Eigen::Index>(r)] = row.bound - row.offset;
        if (!row.is_deterministic()) {
            sp.ineq_a(static_cast<Eigen::Index>(r), t_slot) = row.lambda;
            Eigen::MatrixXd f = Eigen::MatrixXd::Zero(row.norm_map.rows(), d);
            f.leftCols(nu) = row.norm_map;
            sp.soc_f.push_back(std::move(f));
            Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
            c[t_slot] = 1.0;
            sp.soc_c.push_back(std::move(c));
            ++t_slot;
        }
    }

    // Cold start: box midpoint with cone slacks strictly satisfied; phase I
    // inside the solver handles the linear rows.
    Eigen::VectorXd x0(d);
    x0.head(nu) = 0.5 * (program.lower + program.upper);
    t_slot = nu;
    for (int r : soc_rows) {
        x0[t_slot] = (program.rows[static_cast<std::size_t>(r)].norm_map * x0.head(nu)).norm() + 1.0;
        ++t_slot;
    }

    SocpOptions opt;
    opt.gap_tol = gap_tol;

    // Warm start: the previous iterate with each epigraph slack placed half
    // way into the remaining row slack, so every constraint is strictly
    // satisfied and phase I can be skipped entirely.
    if (warm && warm->size() == nu) {
        Eigen::VectorXd xw(d);
        xw.head(nu) = warm->array()
                          .max(program.lower.array() + 1e-12)
                          .min(program.upper.array() - 1e-12)
                          .matrix();
        bool usable = true;
        t_slot = nu;
        for (int r : soc_rows) {
            const auto& row = program.rows[static_cast<std::size_t>(r)];
            const double norm = (row.norm_map * xw.head(nu)).norm();
            const double slack =
                row.bound - row.offset - row.affine.dot(xw.head(nu)) - row.lambda * norm;
            if (!(slack > 0.0)) {
                usable = false;
                break;
            }
            xw[t_slot] = norm + 0.5 * slack / std::max(row.lambda, 1.0);
            ++t_slot;
        }
        for (std::size_t r = 0; usable && r < program.rows.size(); ++r) {
            const auto& row = program.rows[r];
            if (row.is_deterministic() &&
                !(row.affine.dot(xw.head(nu)) + row.offset < row.bound))
                usable = false;
        }
        if (usable) {
            const SocpResult res = solve_socp(sp, xw, opt);
            if (res.status == SocpStatus::optimal)
                return res.x.head(nu).eval();
        }
    }

    const SocpResult res = solve_socp(sp, x0, opt);
    if (res.status != SocpStatus::optimal)
        return std::nullopt;
    return res.x.head(nu).eval();
}

/// Closed-form allocation update with U fixed: per row the largest valid
/// lambda, (h - mean) / std, clamped to [floor + eps, lambda_max]. Rows with
/// zero std get lambda_max. Returns nullopt if a deterministic row is violated
/// or the resulting total risk exceeds alpha.
inline std::optional<RiskAllocation> solve_lambda_step(const ConeProgram& program,
                                                       const Eigen::VectorXd& input_seq,
                                                       double alpha, RiskMethod method,
                                                       std::vector<std::string>* diagnostics = nullptr) {
    const double floor = (method == RiskMethod::vp ? kVpLambdaFloor : 0.0) + kLambdaEps;
    RiskAllocation alloc;
    alloc.alpha = alpha;
    alloc.method = method;
    alloc.lambda.reserve(program.rows.size());

    for (const auto& row : program.rows) {
        const double mean = row.affine.dot(input_seq) + row.offset;
        const double std = (row.norm_map * input_seq).norm();
        if (std <= 0.0) {
            if (mean > row.bound) {
                if (diagnostics)
                    diagnostics->push_back("deterministic row k=" + std::to_string(row.step_index) +
                                           " i=" + std::to_string(row.row_index) + " violated");
                return std::nullopt;
            }
            alloc.lambda.push_back(kLambdaMax);
            continue;
        }
        // The relative back-off keeps the current iterate strictly inside the
        // re-tightened row, so the next subproblem retains an interior point.
        const double lam = (1.0 - 1e-6) * (row.bound - mean) / std;
        alloc.lambda.push_back(std::clamp(lam, floor, kLambdaMax));
    }

    // Tolerance matches the back-off above: a budget-saturated allocation
    // must not be rejected for the hair of risk the back-off adds.
    if (total_risk(alloc) > alpha * (1.0 + 1e-5)) {
        if (diagnostics)
            diagnostics->push_back("allocation exceeds risk budget alpha");
        return std::nullopt;
    }
    return alloc;
}

/// Alternating convex search on (U, lambda): SOCP in U with lambda fixed,
/// closed-form allocation update with U fixed, until the cost settles or
/// n_max rounds elapse. The best (lowest-cost) feasible iterate is kept.
inline Solution acs_solve(const Problem& problem, RiskMethod method, const ACSConfig& config = {}) {
    problem.validate();
    if (config.max_iterations < 1)
        throw std::invalid_argument("acs_solve: max_iterations must be >= 1");

    const StackedControlMoments moments = problem.moments();
    const auto data = problem.all_gradient_data(moments);

    Solution sol;
    sol.allocation = uniform_allocation(problem.polytopes, problem.alpha, method);

    for (int round = 1; round <= config.max_iterations; ++round) {
        const ConeProgram program = problem.assemble(data, sol.allocation);
        const Eigen::VectorXd* warm = round > 1 ? &sol.input_seq : nullptr;
        const auto u = solve_U_step(program, config.subproblem_tol, warm);
        if (!u) {
            if (round == 1) {
                sol.status = SolveStatus::infeasible;
                sol.diagnostics.push_back("initial U-step infeasible under uniform allocation");
                return sol;
            }
            // The previous iterate stays feasible for the tightened rows;
            // treat a failed later subproblem as converged at that iterate.
            sol.status = SolveStatus::converged;
            return sol;
        }

        double cost = u->squaredNorm();
        if (round == 1 || cost <= sol.cost) {
            sol.input_seq = *u;
            sol.cost = cost;
        } else {
            cost = sol.cost; // keep the better feasible iterate
        }
        sol.cost_history.push_back(sol.cost);
        sol.iterations = round;

        if (round > 1) {
            const double prev = sol.cost_history[static_cast<std::size_t>(round) - 2];
            if (std::abs(prev - sol.cost) <= config.convergence_tol * std::max(std::abs(prev), 1e-12)) {
                sol.status = SolveStatus::converged;
                break;
            }
        }
        if (round == config.max_iterations) {
            sol.status = SolveStatus::max_iter;
            break;
        }

        auto alloc = solve_lambda_step(program, sol.input_seq, problem.alpha, method, &sol.diagnostics);
        if (!alloc) {
            // Cannot happen after a successful U-step unless round-off bites;
            // keep the current allocation and stop.
            sol.status = SolveStatus::converged;
            break;
        }
        sol.allocation = std::move(*alloc);
    }

    const ConeProgram final_program = problem.assemble(data, sol.allocation);
    sol.per_row_slack.clear();
    for (const auto& row : final_program.rows)
        sol.per_row_slack.push_back(row.bound - row.evaluate(sol.input_seq));
    return sol;
}

} // namespace ccopt
