#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ccopt {

/// Canonical convex program:
///   minimize    1/2 x' P x + q' x
///   subject to  ineq_a x <= ineq_b
///               ||soc_f[r] x|| <= soc_c[r]' x          for each cone row r
///               lower <= x <= upper                    (entries may be +-inf)
struct SocpProblem {
    Eigen::MatrixXd quad;                 // P (PSD)
    Eigen::VectorXd linear;               // q
    Eigen::MatrixXd ineq_a;               // may have zero rows
    Eigen::VectorXd ineq_b;
    std::vector<Eigen::MatrixXd> soc_f;
    std::vector<Eigen::VectorXd> soc_c;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::Index dim() const { return linear.size(); }

    double objective(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(quad * x) + linear.dot(x);
    }
};

struct SocpOptions {
    double gap_tol = 1e-9;        // absolute duality-gap target
    double feas_margin = 1e-9;    // strict-feasibility margin required from phase I
    int max_newton = 80;
    double barrier_scale = 20.0;  // outer-loop multiplier on t
};

enum class SocpStatus { optimal, infeasible, numerical_error };

struct SocpResult {
    SocpStatus status = SocpStatus::numerical_error;
    Eigen::VectorXd x;
    double objective = std::numeric_limits<double>::quiet_NaN();
};

namespace socp_detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Log-barrier for all inequality constraints of `p`. Returns +inf outside the
/// strict interior.
inline double barrier_value(const SocpProblem& p, const Eigen::VectorXd& x) {
    double phi = 0.0;
    if (p.ineq_a.rows() > 0) {
        const Eigen::VectorXd s = p.ineq_b - p.ineq_a * x;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) return kInf;
            phi -= std::log(s[i]);
        }
    }
    for (std::size_t r = 0; r < p.soc_f.size(); ++r) {
        const double u = p.soc_c[r].dot(x);
        if (!(u > 0.0)) return kInf;
        const double d = u * u - (p.soc_f[r] * x).squaredNorm();
        if (!(d > 0.0)) return kInf;
        phi -= std::log(d);
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isfinite(p.lower[i])) {
            const double s = x[i] - p.lower[i];
            if (!(s > 0.0)) return kInf;
            phi -= std::log(s);
        }
        if (std::isfinite(p.upper[i])) {
            const double s = p.upper[i] - x[i];
            if (!(s > 0.0)) return kInf;
            phi -= std::log(s);
        }
    }
    return phi;
}

inline void barrier_derivatives(const SocpProblem& p, const Eigen::VectorXd& x,
                                Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    const Eigen::Index d = x.size();
    grad.setZero(d);
    hess.setZero(d, d);

    if (p.ineq_a.rows() > 0) {
        const Eigen::VectorXd s = p.ineq_b - p.ineq_a * x;
        // grad += A' (1/s); hess += A' diag(1/s^2) A, accumulated row-scaled.
        const Eigen::VectorXd inv_s = s.cwiseInverse();
        grad.noalias() += p.ineq_a.transpose() * inv_s;
        const Eigen::MatrixXd scaled = inv_s.asDiagonal() * p.ineq_a;
        hess.noalias() += scaled.transpose() * scaled;
    }
    for (std::size_t r = 0; r < p.soc_f.size(); ++r) {
        const double u = p.soc_c[r].dot(x);
        const Eigen::VectorXd v = p.soc_f[r] * x;
        const double dval = u * u - v.squaredNorm();
        Eigen::VectorXd grad_d = 2.0 * u * p.soc_c[r] - 2.0 * (p.soc_f[r].transpose() * v);
        grad.noalias() -= grad_d / dval;
        hess.noalias() += (grad_d * grad_d.transpose()) / (dval * dval);
        hess.noalias() -= (2.0 / dval) * (p.soc_c[r] * p.soc_c[r].transpose());
        hess.noalias() += (2.0 / dval) * (p.soc_f[r].transpose() * p.soc_f[r]);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (std::isfinite(p.lower[i])) {
            const double s = x[i] - p.lower[i];
            grad[i] -= 1.0 / s;
            hess(i, i) += 1.0 / (s * s);
        }
        if (std::isfinite(p.upper[i])) {
            const double s = p.upper[i] - x[i];
            grad[i] += 1.0 / s;
            hess(i, i) += 1.0 / (s * s);
        }
    }
}

inline int constraint_count(const SocpProblem& p) {
    int m = static_cast<int>(p.ineq_a.rows()) + 2 * static_cast<int>(p.soc_f.size());
    for (Eigen::Index i = 0; i < p.lower.size(); ++i) {
        if (std::isfinite(p.lower[i])) ++m;
        if (std::isfinite(p.upper[i])) ++m;
    }
    return m;
}

/// Newton centering of t * f0 + barrier from a strictly feasible start.
/// Returns false on a numerical failure.
inline bool center(const SocpProblem& p, double t, Eigen::VectorXd& x, const SocpOptions& opt) {
    const Eigen::Index d = x.size();
    Eigen::VectorXd grad_phi(d), grad(d), step(d);
    Eigen::MatrixXd hess_phi(d, d), hess(d, d);

    for (int it = 0; it < opt.max_newton; ++it) {
        barrier_derivatives(p, x, grad_phi, hess_phi);
        grad = t * (p.quad * x + p.linear) + grad_phi;
        hess = t * p.quad + hess_phi;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        double ridge = 0.0;
        while (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            ridge = (ridge == 0.0) ? 1e-10 * hess.diagonal().cwiseAbs().maxCoeff() : ridge * 100.0;
            if (!std::isfinite(ridge) || ridge > 1e20) return false;
            ldlt.compute(hess + ridge * Eigen::MatrixXd::Identity(d, d));
        }
        step = ldlt.solve(-grad);
        const double decrement2 = -grad.dot(step);
        if (!std::isfinite(decrement2)) return false;
        if (decrement2 * 0.5 < 1e-12)
            return true;

        // Backtracking line search on t*f0 + barrier.
        const double f_x = t * p.objective(x) + barrier_value(p, x);
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            const Eigen::VectorXd cand = x + alpha * step;
            const double f_c = t * p.objective(cand) + barrier_value(p, cand);
            if (f_c <= f_x - 0.25 * alpha * decrement2) {
                x = cand;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved)
            return true; // stalled at line-search resolution; accept current point
    }
    return true;
}

} // namespace socp_detail

/// Barrier interior-point solve. `x0` must satisfy the cone rows and box
/// bounds strictly; a built-in phase I handles infeasible linear rows.
inline SocpResult solve_socp(const SocpProblem& p, Eigen::VectorXd x0,
                             const SocpOptions& opt = {}) {
    using namespace socp_detail;
    const Eigen::Index d = p.dim();
    if (x0.size() != d)
        throw std::invalid_argument("solve_socp: x0 dimension mismatch");

    SocpResult result;

    // Phase I: drive max linear-row violation negative with an extra slack var.
    if (p.ineq_a.rows() > 0) {
        const Eigen::VectorXd resid = p.ineq_a * x0 - p.ineq_b;
        const double worst = resid.maxCoeff();
        if (worst >= -opt.feas_margin) {
            SocpProblem aux;
            aux.quad = Eigen::MatrixXd::Zero(d + 1, d + 1);
            aux.linear = Eigen::VectorXd::Zero(d + 1);
            aux.linear[d] = 1.0;
            aux.ineq_a = Eigen::MatrixXd(p.ineq_a.rows(), d + 1);
            aux.ineq_a.leftCols(d) = p.ineq_a;
            aux.ineq_a.col(d).setConstant(-1.0);
            aux.ineq_b = p.ineq_b;
            for (std::size_t r = 0; r < p.soc_f.size(); ++r) {
                Eigen::MatrixXd f(p.soc_f[r].rows(), d + 1);
                f.leftCols(d) = p.soc_f[r];
                f.col(d).setZero();
                aux.soc_f.push_back(std::move(f));
                Eigen::VectorXd c(d + 1);
                c.head(d) = p.soc_c[r];
                c[d] = 0.0;
                aux.soc_c.push_back(std::move(c));
            }
            aux.lower = Eigen::VectorXd::Constant(d + 1, -kInf);
            aux.upper = Eigen::VectorXd::Constant(d + 1, kInf);
            aux.lower.head(d) = p.lower;
            aux.upper.head(d) = p.upper;

            Eigen::VectorXd y(d + 1);
            y.head(d) = x0;
            y[d] = std::max(0.0, worst) + 1.0;

            const int m_aux = constraint_count(aux);
            double t = 1.0;
            bool found = false;
            while (m_aux / t > 1e-10) {
                if (!center(aux, t, y, opt)) break;
                const double slack = (p.ineq_a * y.head(d) - p.ineq_b).maxCoeff();
                if (slack < -10.0 * opt.feas_margin) {
                    found = true;
                    break;
                }
                t *= opt.barrier_scale;
            }
            if (!found) {
                const double slack = (p.ineq_a * y.head(d) - p.ineq_b).maxCoeff();
                result.status = slack < -opt.feas_margin ? SocpStatus::numerical_error
                                                        : SocpStatus::infeasible;
                if (slack >= -opt.feas_margin)
                    return result;
            }
            x0 = y.head(d);
        }
    }

    // Main barrier loop.
    const int m = std::max(1, constraint_count(p));
    double t = 1.0;
    Eigen::VectorXd x = x0;
    if (barrier_value(p, x) == kInf) {
        result.status = SocpStatus::numerical_error;
        return result;
    }
    while (true) {
        if (!center(p, t, x, opt)) {
            result.status = SocpStatus::numerical_error;
            return result;
        }
        if (m / t <= opt.gap_tol)
            break;
        t *= opt.barrier_scale;
    }

    result.status = SocpStatus::optimal;
    result.x = x;
    result.objective = p.objective(x);
    return result;
}

} // namespace ccopt
