#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopt/cone.hpp"
#include "ccopt/control_matrix.hpp"
#include "ccopt/linear_system.hpp"
#include "ccopt/moments.hpp"
#include "ccopt/risk.hpp"

namespace ccopt {

/// A complete chance-constrained optimal control instance: dynamics, the
/// stochastic control-matrix model, target polytopes, risk budget, and the
/// admissible input box. Cost is U'U.
struct Problem {
    std::string name;
    LinearSystem system;
    RandomControlMatrixSpec control_spec;
    PolytopeSequence polytopes;
    double alpha = 0.1;
    Eigen::VectorXd input_lower;  // length N*m
    Eigen::VectorXd input_upper;

    void validate() const {
        system.validate();
        control_spec.validate();
        if (control_spec.steps() != system.horizon)
            throw std::invalid_argument("Problem: control spec must cover N steps");
        if (control_spec.templates.front().rows() != system.state_dim ||
            control_spec.templates.front().cols() != system.input_dim)
            throw std::invalid_argument("Problem: control template must be n x m");
        polytopes.validate(system.state_dim);
        if (polytopes.steps() != system.horizon)
            throw std::invalid_argument("Problem: polytopes must cover steps 1..N");
        const Eigen::Index nu = static_cast<Eigen::Index>(system.horizon) * system.input_dim;
        if (input_lower.size() != nu || input_upper.size() != nu)
            throw std::invalid_argument("Problem: input box must have length N*m");
        if (!(alpha > 0.0))
            throw std::invalid_argument("Problem: alpha must be positive");
    }

    StackedControlMoments moments() const { return StackedControlMoments::from_spec(control_spec); }

    /// Gradient data for every flat constraint row, in flat-row order.
    std::vector<ConstraintGradientData> all_gradient_data(const StackedControlMoments& m) const {
        std::vector<ConstraintGradientData> data;
        data.reserve(static_cast<std::size_t>(polytopes.total_rows()));
        for (int k = 1; k <= polytopes.steps(); ++k) {
            const auto& gk = polytopes.g[static_cast<std::size_t>(k - 1)];
            for (Eigen::Index i = 0; i < gk.rows(); ++i)
                data.push_back(constraint_gradient_data(system, m, gk.row(i).transpose(), k));
        }
        return data;
    }

    /// Assembles the U-step cone program for a fixed allocation.
    ConeProgram assemble(const std::vector<ConstraintGradientData>& data,
                         const RiskAllocation& alloc) const {
        if (data.size() != alloc.lambda.size())
            throw std::invalid_argument("assemble: allocation size mismatch");
        ConeProgram program;
        program.lower = input_lower;
        program.upper = input_upper;
        int flat = 0;
        for (int k = 1; k <= polytopes.steps(); ++k) {
            const auto& hk = polytopes.h[static_cast<std::size_t>(k - 1)];
            for (Eigen::Index i = 0; i < hk.size(); ++i, ++flat) {
                program.rows.push_back(build_cone_row(k, static_cast<int>(i),
                                                      alloc.lambda[static_cast<std::size_t>(flat)],
                                                      data[static_cast<std::size_t>(flat)], hk[i]));
            }
        }
        program.validate();
        return program;
    }
};

} // namespace ccopt
