#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ccopt/moments.hpp"
#include "ccopt/risk.hpp"

namespace ccopt {

/// One reformulated chance-constraint row:
///   a' U + b + lambda ||M U|| <= h
struct ConeConstraint {
    Eigen::VectorXd affine;    // a
    double offset = 0.0;       // b
    double lambda = 0.0;
    Eigen::MatrixXd norm_map;  // M
    double bound = 0.0;        // h
    int step_index = 0;        // k
    int row_index = 0;         // i within step

    double evaluate(const Eigen::VectorXd& input_seq) const {
        return affine.dot(input_seq) + offset + lambda * (norm_map * input_seq).norm();
    }

    bool is_deterministic(double tol = 0.0) const {
        return norm_map.size() == 0 || norm_map.cwiseAbs().maxCoeff() <= tol;
    }
};

inline ConeConstraint build_cone_row(int k, int i, double lambda,
                                     const ConstraintGradientData& data, double bound) {
    ConeConstraint row;
    row.affine = data.affine;
    row.offset = data.offset;
    row.lambda = lambda;
    row.norm_map = data.norm_map;
    row.bound = bound;
    row.step_index = k;
    row.row_index = i;
    return row;
}

/// The convex subproblem solved at each U-step: quadratic cost U'U, box
/// bounds from the admissible input set, and the cone rows.
struct ConeProgram {
    Eigen::VectorXd lower;  // per-entry, length N*m
    Eigen::VectorXd upper;
    std::vector<ConeConstraint> rows;

    void validate() const {
        if (lower.size() != upper.size())
            throw std::invalid_argument("ConeProgram: bound length mismatch");
        for (Eigen::Index i = 0; i < lower.size(); ++i)
            if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
                throw std::invalid_argument("ConeProgram: box bounds must be finite with lower <= upper");
        for (const auto& row : rows)
            if (row.affine.size() != lower.size() || row.norm_map.cols() != lower.size())
                throw std::invalid_argument("ConeProgram: row dimension mismatch");
    }
};

} // namespace ccopt
