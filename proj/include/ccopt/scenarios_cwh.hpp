#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "ccopt/problem.hpp"

namespace ccopt {

/// Clohessy-Wiltshire rendezvous parameters (deputy about a chief in circular
/// orbit). Defaults are the GEO docking setup: R0 = 42164 km, 60 s sampling,
/// 5-step horizon.
struct CWHParameters {
    double orbital_radius_km = 42164.0;
    double mu_km3_s2 = 398600.4418;
    double spacecraft_mass_kg = 1.0;
    double sampling_time_s = 60.0;
    int horizon = 5;

    double orbital_rate() const {
        return std::sqrt(mu_km3_s2 / std::pow(orbital_radius_km, 3));
    }

    void validate() const {
        if (!(orbital_radius_km > 0.0) || !(mu_km3_s2 > 0.0) || !(spacecraft_mass_kg > 0.0) ||
            !(sampling_time_s >= 0.0) || horizon < 1)
            throw std::invalid_argument("CWHParameters: all parameters must be positive");
    }
};

/// Closed-form CWH state-transition matrix over one sampling interval, state
/// (x, y, z, vx, vy, vz), and the nominal impulse-control B (the velocity
/// columns of the transition matrix, scaled by 1/m_c).
inline std::pair<LinearSystem, Eigen::MatrixXd> cwh_discretize(const CWHParameters& params) {
    params.validate();
    const double w = params.orbital_rate();
    const double t = params.sampling_time_s;
    const double s = std::sin(w * t);
    const double c = std::cos(w * t);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a << 4.0 - 3.0 * c, 0, 0, s / w, 2.0 * (1.0 - c) / w, 0,
        6.0 * (s - w * t), 1, 0, -2.0 * (1.0 - c) / w, (4.0 * s - 3.0 * w * t) / w, 0,
        0, 0, c, 0, 0, s / w,
        3.0 * w * s, 0, 0, c, 2.0 * s, 0,
        -6.0 * w * (1.0 - c), 0, 0, -2.0 * s, 4.0 * c - 3.0, 0,
        0, 0, -w * s, 0, 0, c;

    const Eigen::MatrixXd b = a.rightCols(3) / params.spacecraft_mass_kg;

    LinearSystem system;
    system.state_matrix = a;
    system.state_dim = 6;
    system.input_dim = 3;
    system.horizon = params.horizon;
    system.initial_state = Eigen::VectorXd::Zero(6);
    return {system, b};
}

namespace cwh_detail {

/// Line-of-sight cone for the transit steps: |y| <= x, |z| <= x, x <= 10 km.
inline void los_polytope(Eigen::MatrixXd& g, Eigen::VectorXd& h) {
    g.setZero(5, 6);
    g << -1, 0, 1, 0, 0, 0,
        -1, 1, 0, 0, 0, 0,
        -1, 0, -1, 0, 0, 0,
        -1, -1, 0, 0, 0, 0,
        1, 0, 0, 0, 0, 0;
    h.resize(5);
    h << 0, 0, 0, 0, 10;
}

/// Terminal docking box: x in [0, 2], |y|, |z| <= 0.5, |v| <= 0.1.
inline void terminal_polytope(Eigen::MatrixXd& g, Eigen::VectorXd& h) {
    g.setZero(12, 6);
    for (int i = 0; i < 6; ++i) {
        g(2 * i, i) = 1.0;
        g(2 * i + 1, i) = -1.0;
    }
    h.resize(12);
    h << 2, 0, 0.5, 0.5, 0.5, 0.5, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1;
}

inline Problem base_case(const CWHParameters& params, const Eigen::VectorXd& initial_state) {
    auto [system, b] = cwh_discretize(params);
    system.initial_state = initial_state;

    Problem problem;
    problem.system = system;
    problem.alpha = 0.15;

    problem.polytopes.g.resize(static_cast<std::size_t>(params.horizon));
    problem.polytopes.h.resize(static_cast<std::size_t>(params.horizon));
    for (int k = 0; k + 1 < params.horizon; ++k)
        los_polytope(problem.polytopes.g[static_cast<std::size_t>(k)],
                     problem.polytopes.h[static_cast<std::size_t>(k)]);
    terminal_polytope(problem.polytopes.g.back(), problem.polytopes.h.back());

    const Eigen::Index nu = static_cast<Eigen::Index>(params.horizon) * 3;
    problem.input_lower = Eigen::VectorXd::Constant(nu, -0.1);
    problem.input_upper = Eigen::VectorXd::Constant(nu, 0.1);

    // Template filled by the specific noise model.
    std::vector<ColumnMultiplier> cols(3);
    problem.control_spec = RandomControlMatrixSpec::uniform(b, cols, params.horizon);
    return problem;
}

inline Eigen::VectorXd default_initial_state() {
    Eigen::VectorXd x0(6);
    x0 << 10.8, 6.0, -6.0, 0.0, 0.0, 0.0;
    return x0;
}

} // namespace cwh_detail

/// Impulse-control inaccuracy case: each column's position rows are scaled by
/// an independent Gamma(10^3, 10^-3) multiplier (unit mean, variance 10^-3).
inline Problem gamma_case(const CWHParameters& params = {},
                          const Eigen::VectorXd& initial_state = cwh_detail::default_initial_state()) {
    Problem problem = cwh_detail::base_case(params, initial_state);
    problem.name = "cwh-gamma";
    std::vector<bool> position_rows = {true, true, true, false, false, false};
    for (auto& step_cols : problem.control_spec.columns)
        for (auto& col : step_cols) {
            col.dist = ScalarDistribution::make_gamma(1e3, 1e-3);
            col.row_mask = position_rows;
        }
    problem.validate();
    return problem;
}

/// Under-performing actuator case: every row of each column is scaled by an
/// independent Beta(152, 8) multiplier (mean 0.95).
inline Problem beta_case(const CWHParameters& params = {},
                         const Eigen::VectorXd& initial_state = cwh_detail::default_initial_state()) {
    Problem problem = cwh_detail::base_case(params, initial_state);
    problem.name = "cwh-beta";
    std::vector<bool> all_rows(6, true);
    for (auto& step_cols : problem.control_spec.columns)
        for (auto& col : step_cols) {
            col.dist = ScalarDistribution::make_beta(152.0, 8.0);
            col.row_mask = all_rows;
        }
    problem.validate();
    return problem;
}

} // namespace ccopt
