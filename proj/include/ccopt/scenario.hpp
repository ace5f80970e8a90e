#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/acs.hpp"
#include "ccopt/problem.hpp"
#include "ccopt/socp.hpp"

namespace ccopt {

/// Scenario-approach sample bound: ceil((2/alpha) (ln(1/delta) + m N)).
inline int scenario_sample_count(double alpha, double delta, int input_dim, int horizon) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("scenario_sample_count: alpha must be in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("scenario_sample_count: delta must be in (0, 1)");
    const double bound = (2.0 / alpha) * (std::log(1.0 / delta) + input_dim * horizon);
    return static_cast<int>(std::ceil(bound));
}

/// Scenario-approach baseline: draw N_s realizations of all control matrices
/// and solve min U'U subject to the box and every sampled constraint row.
template <class Rng>
Solution scenario_solve(const Problem& problem, double delta, Rng& rng,
                        double gap_tol = 1e-9, int sample_override = 0) {
    problem.validate();
    const int n = problem.system.state_dim;
    const int m = problem.system.input_dim;
    const int horizon = problem.system.horizon;
    const Eigen::Index nu = static_cast<Eigen::Index>(horizon) * m;
    const int n_samples = sample_override > 0
                              ? sample_override
                              : scenario_sample_count(problem.alpha, delta, m, horizon);
    const int rows_total = problem.polytopes.total_rows();

    MatrixPowerCache powers(problem.system.state_matrix, horizon);

    SocpProblem sp;
    sp.quad = 2.0 * Eigen::MatrixXd::Identity(nu, nu);
    sp.linear = Eigen::VectorXd::Zero(nu);
    sp.lower = problem.input_lower;
    sp.upper = problem.input_upper;
    sp.ineq_a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_samples) * rows_total, nu);
    sp.ineq_b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_samples) * rows_total);

    Eigen::Index out = 0;
    std::vector<Eigen::MatrixXd> b_draw(static_cast<std::size_t>(horizon));
    for (int s = 0; s < n_samples; ++s) {
        for (int j = 0; j < horizon; ++j)
            b_draw[static_cast<std::size_t>(j)] = sample_control_matrix(problem.control_spec, j, rng);
        for (int k = 1; k <= horizon; ++k) {
            const auto& gk = problem.polytopes.g[static_cast<std::size_t>(k - 1)];
            const auto& hk = problem.polytopes.h[static_cast<std::size_t>(k - 1)];
            // Coefficient of u(j) in G x(k) is G A^{k-1-j} B(j).
            Eigen::MatrixXd coeff(gk.rows(), nu);
            coeff.setZero();
            for (int j = 0; j < k; ++j)
                coeff.middleCols(static_cast<Eigen::Index>(j) * m, m) =
                    gk * powers.power(k - 1 - j) * b_draw[static_cast<std::size_t>(j)];
            sp.ineq_a.middleRows(out, gk.rows()) = coeff;
            sp.ineq_b.segment(out, gk.rows()) =
                hk - gk * powers.power(k) * problem.system.initial_state;
            out += gk.rows();
        }
    }
    (void)n;

    SocpOptions opt;
    opt.gap_tol = gap_tol;
    Eigen::VectorXd x0 = 0.5 * (problem.input_lower + problem.input_upper);
    const SocpResult res = solve_socp(sp, x0, opt);

    Solution sol;
    sol.allocation.alpha = problem.alpha;
    sol.iterations = 0;
    if (res.status != SocpStatus::optimal) {
        sol.status = SolveStatus::infeasible;
        sol.diagnostics.push_back("sampled program infeasible or solver failure");
        return sol;
    }
    sol.status = SolveStatus::converged;
    sol.input_seq = res.x;
    sol.cost = res.x.squaredNorm();
    sol.cost_history.push_back(sol.cost);
    const Eigen::VectorXd resid = sp.ineq_a * res.x - sp.ineq_b;
    sol.per_row_slack.assign(resid.size(), 0.0);
    for (Eigen::Index i = 0; i < resid.size(); ++i)
        sol.per_row_slack[static_cast<std::size_t>(i)] = -resid[i];
    return sol;
}

} // namespace ccopt
