#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/control_matrix.hpp"
#include "ccopt/linear_system.hpp"

namespace ccopt {

/// First and second moments of the per-step control matrices. Cross-step
/// independence is assumed throughout, so the covariance is stored per step
/// rather than as one dense block matrix.
struct StackedControlMoments {
    std::vector<Eigen::MatrixXd> per_step_mean;            // N matrices, n x m
    std::vector<Eigen::MatrixXd> per_step_vec_covariance;  // N matrices, (nm) x (nm)
    bool cross_step_independent = true;

    static StackedControlMoments from_spec(const RandomControlMatrixSpec& spec) {
        spec.validate();
        StackedControlMoments moments;
        for (int k = 0; k < spec.steps(); ++k) {
            moments.per_step_mean.push_back(control_matrix_mean(spec, k));
            moments.per_step_vec_covariance.push_back(control_matrix_vec_covariance(spec, k));
        }
        return moments;
    }
};

/// Symmetric PSD square root with eigenvalue clamping at max(0, lambda).
/// Eigenvalues below -tol relative to the largest are treated as a numeric
/// error in the assembled covariance.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov, double rel_tol = 1e-10) {
    if (cov.rows() != cov.cols())
        throw std::invalid_argument("psd_sqrt: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const Eigen::VectorXd& evals = es.eigenvalues();
    const double largest = evals.size() ? evals.maxCoeff() : 0.0;
    const double floor = -rel_tol * std::max(largest, 1.0);
    Eigen::VectorXd clamped(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals[i] < floor)
            throw std::runtime_error("psd_sqrt: covariance is not PSD within tolerance");
        clamped[i] = std::sqrt(std::max(0.0, evals[i]));
    }
    return es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
}

namespace detail {

inline void check_step(const LinearSystem& system, int k) {
    if (k < 1 || k > system.horizon)
        throw std::out_of_range("step index out of range");
}

inline void check_shapes(const LinearSystem& system, const StackedControlMoments& moments,
                         const Eigen::VectorXd& g_row, const Eigen::VectorXd& input_seq) {
    if (g_row.size() != system.state_dim)
        throw std::invalid_argument("halfspace row has wrong length");
    if (input_seq.size() != static_cast<Eigen::Index>(system.horizon) * system.input_dim)
        throw std::invalid_argument("input sequence must have length N*m");
    if (static_cast<int>(moments.per_step_mean.size()) != system.horizon)
        throw std::invalid_argument("moments must cover all N steps");
}

} // namespace detail

/// Coefficients of one half-space constraint value G x(k) as a function of the
/// stacked input U: mean = affine' U + offset, std = ||norm_map U||.
struct ConstraintGradientData {
    Eigen::VectorXd affine;    // a, length N*m
    double offset = 0.0;       // b = G A^k x(0)
    Eigen::MatrixXd norm_map;  // M, one (nm)-row block per step j < k
    int step_index = 0;        // k
};

/// E[G x(k)] = G A^k x(0) + sum_{j<k} G A^{k-1-j} E[B(j)] u(j).
inline double halfspace_mean(const LinearSystem& system, const StackedControlMoments& moments,
                             const Eigen::VectorXd& g_row, int k, const Eigen::VectorXd& input_seq) {
    system.validate();
    detail::check_step(system, k);
    detail::check_shapes(system, moments, g_row, input_seq);

    MatrixPowerCache powers(system.state_matrix, k);
    double value = g_row.dot(powers.power(k) * system.initial_state);
    const int m = system.input_dim;
    for (int j = 0; j < k; ++j) {
        const Eigen::RowVectorXd g_j = g_row.transpose() * powers.power(k - 1 - j);
        value += g_j * moments.per_step_mean[static_cast<std::size_t>(j)] *
                 input_seq.segment(static_cast<Eigen::Index>(j) * m, m);
    }
    return value;
}

/// Std[G x(k)], evaluated blockwise over the per-step covariances. Equals the
/// dense Kronecker form || Var[vec(C)]^{1/2} (U (x) I_{nN}) A(k)' G' ||.
inline double halfspace_std(const LinearSystem& system, const StackedControlMoments& moments,
                            const Eigen::VectorXd& g_row, int k, const Eigen::VectorXd& input_seq) {
    system.validate();
    detail::check_step(system, k);
    detail::check_shapes(system, moments, g_row, input_seq);

    MatrixPowerCache powers(system.state_matrix, k);
    const int n = system.state_dim;
    const int m = system.input_dim;
    double var = 0.0;
    for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd g_j = powers.power(k - 1 - j).transpose() * g_row; // (G A^{k-1-j})'
        const Eigen::VectorXd u_j = input_seq.segment(static_cast<Eigen::Index>(j) * m, m);
        // w = u(j) (x) g_j is the vec-direction the step-j covariance acts on.
        Eigen::VectorXd w(n * m);
        for (int c = 0; c < m; ++c)
            w.segment(static_cast<Eigen::Index>(c) * n, n) = u_j[c] * g_j;
        const Eigen::MatrixXd& cov = moments.per_step_vec_covariance[static_cast<std::size_t>(j)];
        const double q = w.dot(cov * w);
        if (q < -1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
            throw std::runtime_error("halfspace_std: covariance quadratic form is negative");
        var += std::max(0.0, q);
    }
    return std::sqrt(var);
}

/// Extracts the affine/norm coefficients of one constraint row so the cone
/// builder can encode a' U + b + lambda ||M U|| <= h.
inline ConstraintGradientData constraint_gradient_data(const LinearSystem& system,
                                                       const StackedControlMoments& moments,
                                                       const Eigen::VectorXd& g_row, int k) {
    system.validate();
    detail::check_step(system, k);
    if (g_row.size() != system.state_dim)
        throw std::invalid_argument("halfspace row has wrong length");
    if (static_cast<int>(moments.per_step_mean.size()) != system.horizon)
        throw std::invalid_argument("moments must cover all N steps");

    MatrixPowerCache powers(system.state_matrix, k);
    const int n = system.state_dim;
    const int m = system.input_dim;
    const int nu = system.horizon * m;

    ConstraintGradientData data;
    data.step_index = k;
    data.offset = g_row.dot(powers.power(k) * system.initial_state);
    data.affine = Eigen::VectorXd::Zero(nu);
    data.norm_map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k) * n * m, nu);

    for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd g_j = powers.power(k - 1 - j).transpose() * g_row;
        data.affine.segment(static_cast<Eigen::Index>(j) * m, m) =
            (g_j.transpose() * moments.per_step_mean[static_cast<std::size_t>(j)]).transpose();

        // Column c of the step-j block of M is C_j^{1/2} (e_c (x) g_j).
        const Eigen::MatrixXd root =
            psd_sqrt(moments.per_step_vec_covariance[static_cast<std::size_t>(j)]);
        Eigen::MatrixXd k_j = Eigen::MatrixXd::Zero(n * m, m);
        for (int c = 0; c < m; ++c)
            k_j.block(static_cast<Eigen::Index>(c) * n, c, n, 1) = g_j;
        data.norm_map.block(static_cast<Eigen::Index>(j) * n * m,
                            static_cast<Eigen::Index>(j) * m, n * m, m) = root * k_j;
    }
    return data;
}

} // namespace ccopt
