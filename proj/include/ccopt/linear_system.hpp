#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ccopt {

/// Discrete-time linear system x(k+1) = A x(k) + B(k) u(k) with a
/// deterministic state matrix A and a (possibly random) control matrix.
struct LinearSystem {
    Eigen::MatrixXd state_matrix;  // A, n x n
    int state_dim = 0;             // n
    int input_dim = 0;             // m
    int horizon = 0;               // N
    Eigen::VectorXd initial_state; // x(0)

    void validate() const {
        if (state_matrix.rows() != state_dim || state_matrix.cols() != state_dim)
            throw std::invalid_argument("LinearSystem: state_matrix must be n x n");
        if (horizon < 1)
            throw std::invalid_argument("LinearSystem: horizon must be >= 1");
        if (initial_state.size() != state_dim)
            throw std::invalid_argument("LinearSystem: initial_state must have length n");
        if (input_dim < 1)
            throw std::invalid_argument("LinearSystem: input_dim must be >= 1");
    }
};

/// Cache of A^j for j = 0..N. Computed once per solve and reused by every
/// constraint row.
class MatrixPowerCache {
public:
    explicit MatrixPowerCache(const Eigen::MatrixXd& a, int max_power) {
        const auto n = a.rows();
        powers_.reserve(static_cast<std::size_t>(max_power) + 1);
        powers_.push_back(Eigen::MatrixXd::Identity(n, n));
        for (int j = 1; j <= max_power; ++j)
            powers_.push_back(powers_.back() * a);
    }

    const Eigen::MatrixXd& power(int j) const {
        if (j < 0 || j >= static_cast<int>(powers_.size()))
            throw std::out_of_range("MatrixPowerCache: power out of range");
        return powers_[static_cast<std::size_t>(j)];
    }

private:
    std::vector<Eigen::MatrixXd> powers_;
};

/// Row map of the stacked dynamics: blocks [A^{k-1}, ..., A, I_n] followed by
/// N-k zero blocks, so that x(k) = A^k x(0) + [blocks] * stacked per-step
/// contributions B(j) u(j).
struct StackedRowMap {
    int step_index = 0;                     // k
    std::vector<Eigen::MatrixXd> blocks;    // N blocks of size n x n

    /// Dense n x (N n) matrix form.
    Eigen::MatrixXd dense() const {
        if (blocks.empty())
            throw std::logic_error("StackedRowMap: empty");
        const auto n = blocks.front().rows();
        Eigen::MatrixXd out(n, n * static_cast<Eigen::Index>(blocks.size()));
        for (std::size_t j = 0; j < blocks.size(); ++j)
            out.middleCols(static_cast<Eigen::Index>(j) * n, n) = blocks[j];
        return out;
    }
};

/// Builds the stacked row map for step k: block j is A^{k-1-j} for j < k,
/// zero for j >= k.
inline StackedRowMap stacked_row_map(const LinearSystem& system, int k) {
    system.validate();
    if (k < 1 || k > system.horizon)
        throw std::out_of_range("stacked_row_map: step index out of range");

    MatrixPowerCache powers(system.state_matrix, k - 1);
    StackedRowMap map;
    map.step_index = k;
    map.blocks.reserve(static_cast<std::size_t>(system.horizon));
    for (int j = 0; j < system.horizon; ++j) {
        if (j < k)
            map.blocks.push_back(powers.power(k - 1 - j));
        else
            map.blocks.push_back(Eigen::MatrixXd::Zero(system.state_dim, system.state_dim));
    }
    return map;
}

} // namespace ccopt
