#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/problem.hpp"
#include "ccopt/unimodality.hpp"

namespace ccopt {

/// Monte Carlo assessment of a candidate control sequence.
struct ValidationReport {
    int n_samples = 0;
    std::uint64_t seed = 0;
    double joint_satisfaction = 0.0;          // fraction of samples with zero violations
    std::vector<double> per_row_violation;    // flat-row violation proportions
    std::vector<double> analytic_mean;        // per flat row
    std::vector<double> analytic_std;
    std::vector<double> sample_mean;
    std::vector<double> sample_std;
    std::vector<int> unimodality;             // verdicts per row, cast of UnimodalityVerdict
    double cost = 0.0;
};

namespace validation_detail {

inline int thread_count() {
    if (const char* env = std::getenv("CCOPT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    return 1;
}

/// Exact propagation of one disturbance realization; returns the stacked
/// constraint values G_ki x(k) in flat-row order.
template <class Rng>
void propagate_sample(const Problem& problem, const Eigen::VectorXd& input_seq, Rng& rng,
                      Eigen::VectorXd& row_values) {
    const int m = problem.system.input_dim;
    Eigen::VectorXd x = problem.system.initial_state;
    Eigen::Index out = 0;
    for (int k = 1; k <= problem.system.horizon; ++k) {
        const Eigen::MatrixXd b = sample_control_matrix(problem.control_spec, k - 1, rng);
        x = problem.system.state_matrix * x +
            b * input_seq.segment(static_cast<Eigen::Index>(k - 1) * m, m);
        const auto& gk = problem.polytopes.g[static_cast<std::size_t>(k - 1)];
        row_values.segment(out, gk.rows()) = gk * x;
        out += gk.rows();
    }
}

} // namespace validation_detail

/// Samples n realizations of the control matrices, propagates the dynamics
/// exactly, and reports joint and per-row constraint satisfaction plus moment
/// cross-checks. Ties (G x == h) count as satisfied. Results are a pure
/// function of the seed; worker count (CCOPT_THREADS) never changes counts
/// because every sample owns a seed derived from (seed, sample index).
inline ValidationReport monte_carlo_validate(const Problem& problem, const Eigen::VectorXd& input_seq,
                                             int n_samples, std::uint64_t seed,
                                             bool with_unimodality = false,
                                             std::vector<std::vector<double>>* row_samples_out = nullptr) {
    problem.validate();
    if (n_samples < 1000)
        throw std::invalid_argument("monte_carlo_validate: need at least 10^3 samples");
    const int rows_total = problem.polytopes.total_rows();

    // Stacked bounds in flat-row order.
    Eigen::VectorXd bounds(rows_total);
    Eigen::Index out = 0;
    for (const auto& hk : problem.polytopes.h) {
        bounds.segment(out, hk.size()) = hk;
        out += hk.size();
    }

    const bool keep_samples = with_unimodality || row_samples_out != nullptr;
    const int workers = validation_detail::thread_count();

    struct Accum {
        std::int64_t joint_ok = 0;
        Eigen::VectorXd violations;
        Eigen::VectorXd sum;
        Eigen::VectorXd sum_sq;
    };
    std::vector<Accum> acc(static_cast<std::size_t>(workers));
    for (auto& a : acc) {
        a.violations = Eigen::VectorXd::Zero(rows_total);
        a.sum = Eigen::VectorXd::Zero(rows_total);
        a.sum_sq = Eigen::VectorXd::Zero(rows_total);
    }
    std::vector<std::vector<double>> row_samples;
    if (keep_samples)
        row_samples.assign(static_cast<std::size_t>(rows_total),
                           std::vector<double>(static_cast<std::size_t>(n_samples)));

    auto run_range = [&](int w, int begin, int end) {
        Eigen::VectorXd values(rows_total);
        Accum& a = acc[static_cast<std::size_t>(w)];
        for (int s = begin; s < end; ++s) {
            std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(s)));
            validation_detail::propagate_sample(problem, input_seq, rng, values);
            bool ok = true;
            for (int r = 0; r < rows_total; ++r) {
                if (values[r] > bounds[r]) {
                    a.violations[r] += 1.0;
                    ok = false;
                }
                a.sum[r] += values[r];
                a.sum_sq[r] += values[r] * values[r];
                if (keep_samples)
                    row_samples[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = values[r];
            }
            if (ok)
                ++a.joint_ok;
        }
    };

    if (workers == 1) {
        run_range(0, 0, n_samples);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const int begin = static_cast<int>((static_cast<std::int64_t>(n_samples) * w) / workers);
            const int end = static_cast<int>((static_cast<std::int64_t>(n_samples) * (w + 1)) / workers);
            pool.emplace_back(run_range, w, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }

    ValidationReport report;
    report.n_samples = n_samples;
    report.seed = seed;
    report.cost = input_seq.squaredNorm();

    std::int64_t joint_ok = 0;
    Eigen::VectorXd violations = Eigen::VectorXd::Zero(rows_total);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows_total);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(rows_total);
    for (const auto& a : acc) {
        joint_ok += a.joint_ok;
        violations += a.violations;
        sum += a.sum;
        sum_sq += a.sum_sq;
    }
    report.joint_satisfaction = static_cast<double>(joint_ok) / n_samples;
    report.per_row_violation.resize(static_cast<std::size_t>(rows_total));
    report.sample_mean.resize(static_cast<std::size_t>(rows_total));
    report.sample_std.resize(static_cast<std::size_t>(rows_total));
    for (int r = 0; r < rows_total; ++r) {
        report.per_row_violation[static_cast<std::size_t>(r)] = violations[r] / n_samples;
        const double mean = sum[r] / n_samples;
        report.sample_mean[static_cast<std::size_t>(r)] = mean;
        const double var = std::max(0.0, sum_sq[r] / n_samples - mean * mean) *
                           (static_cast<double>(n_samples) / (n_samples - 1));
        report.sample_std[static_cast<std::size_t>(r)] = std::sqrt(var);
    }

    // Analytic moments per row.
    const StackedControlMoments moments = problem.moments();
    report.analytic_mean.reserve(static_cast<std::size_t>(rows_total));
    report.analytic_std.reserve(static_cast<std::size_t>(rows_total));
    for (int k = 1; k <= problem.system.horizon; ++k) {
        const auto& gk = problem.polytopes.g[static_cast<std::size_t>(k - 1)];
        for (Eigen::Index i = 0; i < gk.rows(); ++i) {
            const Eigen::VectorXd g_row = gk.row(i).transpose();
            report.analytic_mean.push_back(halfspace_mean(problem.system, moments, g_row, k, input_seq));
            report.analytic_std.push_back(halfspace_std(problem.system, moments, g_row, k, input_seq));
        }
    }

    if (with_unimodality)
        for (int r = 0; r < rows_total; ++r)
            report.unimodality.push_back(static_cast<int>(
                empirical_unimodality_check(row_samples[static_cast<std::size_t>(r)])));

    if (row_samples_out)
        *row_samples_out = std::move(row_samples);
    return report;
}

/// Per-row comparison of analytic vs sampled first two moments; rows whose
/// sample mean misses the analytic mean by more than `se_gate` standard
/// errors are flagged.
struct MomentCheckRow {
    int flat_row = 0;
    double analytic_mean = 0.0, sample_mean = 0.0;
    double analytic_std = 0.0, sample_std = 0.0;
    bool mean_ok = true;
};

inline std::vector<MomentCheckRow> moment_crosscheck(const Problem& problem,
                                                     const Eigen::VectorXd& input_seq,
                                                     int n_samples, std::uint64_t seed,
                                                     double se_gate = 4.0) {
    if (n_samples < 10000)
        throw std::invalid_argument("moment_crosscheck: need at least 10^4 samples");
    const ValidationReport report = monte_carlo_validate(problem, input_seq, n_samples, seed);
    std::vector<MomentCheckRow> rows;
    for (std::size_t r = 0; r < report.analytic_mean.size(); ++r) {
        MomentCheckRow row;
        row.flat_row = static_cast<int>(r);
        row.analytic_mean = report.analytic_mean[r];
        row.sample_mean = report.sample_mean[r];
        row.analytic_std = report.analytic_std[r];
        row.sample_std = report.sample_std[r];
        const double se = report.sample_std[r] / std::sqrt(static_cast<double>(n_samples));
        // Absolute floor covers deterministic rows, where se is exactly zero
        // and only float round-off separates the two computations.
        const double tol = se_gate * se + 1e-9 * std::max(1.0, std::abs(row.analytic_mean));
        row.mean_ok = std::abs(row.sample_mean - row.analytic_mean) <= tol;
        rows.push_back(row);
    }
    return rows;
}

} // namespace ccopt
