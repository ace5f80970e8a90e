#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ccopt {

/// Validity floor of the one-sided Vysochanskij-Petunin bound.
inline constexpr double kVpLambdaFloor = 1.2909944487358056; // sqrt(5/3)

enum class RiskMethod { vp, cantelli };

/// One-sided VP tail bound 4 / (9 (lambda^2 + 1)), valid for lambda > sqrt(5/3).
inline double vp_risk(double lambda) {
    if (!(lambda > kVpLambdaFloor))
        throw std::domain_error("vp_risk: lambda must exceed sqrt(5/3)");
    return 4.0 / (9.0 * (lambda * lambda + 1.0));
}

/// Cantelli tail bound 1 / (1 + lambda^2), valid for lambda > 0.
inline double cantelli_risk(double lambda) {
    if (!(lambda > 0.0))
        throw std::domain_error("cantelli_risk: lambda must be positive");
    return 1.0 / (1.0 + lambda * lambda);
}

inline double risk_bound(double lambda, RiskMethod method) {
    return method == RiskMethod::vp ? vp_risk(lambda) : cantelli_risk(lambda);
}

/// Exact inverse of the risk maps: the lambda whose tail bound equals omega.
inline double risk_to_lambda(double omega, RiskMethod method) {
    if (method == RiskMethod::vp) {
        if (!(omega > 0.0) || !(omega < 1.0 / 6.0))
            throw std::domain_error("risk_to_lambda: vp requires omega in (0, 1/6)");
        return std::sqrt(4.0 / (9.0 * omega) - 1.0);
    }
    if (!(omega > 0.0) || !(omega < 1.0))
        throw std::domain_error("risk_to_lambda: cantelli requires omega in (0, 1)");
    return std::sqrt(1.0 / omega - 1.0);
}

/// Time-varying polytopic target sets {x : G_k x <= h_k}, k = 1..N.
struct PolytopeSequence {
    std::vector<Eigen::MatrixXd> g;  // G_k, q_k x n
    std::vector<Eigen::VectorXd> h;  // h_k, q_k

    int steps() const { return static_cast<int>(g.size()); }

    int total_rows() const {
        int m = 0;
        for (const auto& gk : g)
            m += static_cast<int>(gk.rows());
        return m;
    }

    void validate(int state_dim) const {
        if (g.size() != h.size())
            throw std::invalid_argument("PolytopeSequence: G/h step count mismatch");
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g[k].cols() != state_dim)
                throw std::invalid_argument("PolytopeSequence: G_k column count != n");
            if (g[k].rows() != h[k].size())
                throw std::invalid_argument("PolytopeSequence: G_k/h_k row count mismatch");
        }
    }

    /// Flat row id -> (step k in 1..N, row i within step).
    std::pair<int, int> locate(int flat_row) const {
        int offset = flat_row;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (offset < g[k].rows())
                return {static_cast<int>(k) + 1, offset};
            offset -= static_cast<int>(g[k].rows());
        }
        throw std::out_of_range("PolytopeSequence: flat row out of range");
    }
};

/// Per-row risk multipliers lambda_ki with a shared budget alpha.
struct RiskAllocation {
    std::vector<double> lambda;  // indexed by flat row id
    double alpha = 0.0;
    RiskMethod method = RiskMethod::vp;

    void validate() const {
        const double floor = method == RiskMethod::vp ? kVpLambdaFloor : 0.0;
        for (double l : lambda)
            if (!(l > floor))
                throw std::domain_error("RiskAllocation: lambda below validity floor");
    }
};

/// Sum of the per-row tail bounds under the allocation's method.
inline double total_risk(const RiskAllocation& alloc) {
    double sum = 0.0;
    for (double l : alloc.lambda)
        sum += risk_bound(l, alloc.method);
    return sum;
}

/// Uniform risk split omega_ki = alpha / M; the standard initializer for the
/// alternating search.
inline RiskAllocation uniform_allocation(const PolytopeSequence& polytopes, double alpha,
                                         RiskMethod method) {
    const int rows = polytopes.total_rows();
    if (rows < 1)
        throw std::invalid_argument("uniform_allocation: polytope sequence has no rows");
    if (method == RiskMethod::vp && !(alpha > 0.0 && alpha < 1.0 / 6.0))
        throw std::domain_error("uniform_allocation: vp requires alpha in (0, 1/6)");
    if (method == RiskMethod::cantelli && !(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("uniform_allocation: cantelli requires alpha in (0, 1)");

    RiskAllocation alloc;
    alloc.alpha = alpha;
    alloc.method = method;
    alloc.lambda.assign(static_cast<std::size_t>(rows),
                        risk_to_lambda(alpha / rows, method));
    return alloc;
}

} // namespace ccopt
