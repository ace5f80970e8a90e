#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/distributions.hpp"

namespace ccopt {

/// One random column of a control matrix: an optional multiplier distribution
/// and the set of rows it applies to. Rows outside the mask keep their
/// deterministic template value.
struct ColumnMultiplier {
    std::optional<ScalarDistribution> dist; // none => fully deterministic column
    std::vector<bool> row_mask;             // length n; which rows the multiplier scales
};

/// Stochastic model of the control matrix B(k): a deterministic template per
/// step whose columns are scaled by mutually independent random multipliers.
struct RandomControlMatrixSpec {
    std::vector<Eigen::MatrixXd> templates;               // N matrices, n x m
    std::vector<std::vector<ColumnMultiplier>> columns;   // [step][column]

    int steps() const { return static_cast<int>(templates.size()); }

    void validate() const {
        if (templates.empty())
            throw std::invalid_argument("RandomControlMatrixSpec: no steps");
        if (columns.size() != templates.size())
            throw std::invalid_argument("RandomControlMatrixSpec: step count mismatch");
        const auto n = templates.front().rows();
        const auto m = templates.front().cols();
        for (std::size_t k = 0; k < templates.size(); ++k) {
            if (templates[k].rows() != n || templates[k].cols() != m)
                throw std::invalid_argument("RandomControlMatrixSpec: inconsistent template sizes");
            if (static_cast<Eigen::Index>(columns[k].size()) != m)
                throw std::invalid_argument("RandomControlMatrixSpec: column spec count != m");
            for (const auto& col : columns[k])
                if (col.dist && static_cast<Eigen::Index>(col.row_mask.size()) != n)
                    throw std::invalid_argument("RandomControlMatrixSpec: row mask length != n");
        }
    }

    /// Convenience: the same template and column model at every step.
    static RandomControlMatrixSpec uniform(const Eigen::MatrixXd& tmpl,
                                           std::vector<ColumnMultiplier> cols,
                                           int n_steps) {
        RandomControlMatrixSpec spec;
        spec.templates.assign(static_cast<std::size_t>(n_steps), tmpl);
        spec.columns.assign(static_cast<std::size_t>(n_steps), cols);
        spec.validate();
        return spec;
    }
};

/// Exact mean of B(k) under the column-multiplier model.
inline Eigen::MatrixXd control_matrix_mean(const RandomControlMatrixSpec& spec, int k) {
    const auto& tmpl = spec.templates.at(static_cast<std::size_t>(k));
    Eigen::MatrixXd mean = tmpl;
    const auto& cols = spec.columns.at(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < tmpl.cols(); ++c) {
        const auto& cm = cols[static_cast<std::size_t>(c)];
        if (!cm.dist)
            continue;
        const double mu = cm.dist->mean();
        for (Eigen::Index r = 0; r < tmpl.rows(); ++r)
            if (cm.row_mask[static_cast<std::size_t>(r)])
                mean(r, c) = tmpl(r, c) * mu;
    }
    return mean;
}

/// Exact covariance of vec(B(k)), column-major stacking. Nonzero entries occur
/// only within a column: Cov = t(r,c) t(r',c) Var(multiplier_c) for masked
/// rows r, r'.
inline Eigen::MatrixXd control_matrix_vec_covariance(const RandomControlMatrixSpec& spec, int k) {
    const auto& tmpl = spec.templates.at(static_cast<std::size_t>(k));
    const auto n = tmpl.rows();
    const auto m = tmpl.cols();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n * m, n * m);
    const auto& cols = spec.columns.at(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto& cm = cols[static_cast<std::size_t>(c)];
        if (!cm.dist)
            continue;
        const double var = cm.dist->variance();
        if (var == 0.0)
            continue;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (!cm.row_mask[static_cast<std::size_t>(r)])
                continue;
            for (Eigen::Index r2 = 0; r2 < n; ++r2) {
                if (!cm.row_mask[static_cast<std::size_t>(r2)])
                    continue;
                cov(c * n + r, c * n + r2) = tmpl(r, c) * tmpl(r2, c) * var;
            }
        }
    }
    return cov;
}

/// One i.i.d. realization of B(k): a single multiplier draw per column,
/// applied to the masked rows.
template <class Rng>
Eigen::MatrixXd sample_control_matrix(const RandomControlMatrixSpec& spec, int k, Rng& rng) {
    const auto& tmpl = spec.templates.at(static_cast<std::size_t>(k));
    Eigen::MatrixXd out = tmpl;
    const auto& cols = spec.columns.at(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < tmpl.cols(); ++c) {
        const auto& cm = cols[static_cast<std::size_t>(c)];
        if (!cm.dist)
            continue;
        const double g = cm.dist->sample(rng);
        for (Eigen::Index r = 0; r < tmpl.rows(); ++r)
            if (cm.row_mask[static_cast<std::size_t>(r)])
                out(r, c) = tmpl(r, c) * g;
    }
    return out;
}

} // namespace ccopt
