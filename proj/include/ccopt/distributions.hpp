#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ccopt {

/// Scalar multiplier distribution for random control-matrix columns.
class ScalarDistribution {
public:
    enum class Kind { gamma, beta, gaussian, deterministic };

    static ScalarDistribution make_gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw std::invalid_argument("gamma: shape and scale must be > 0");
        return {Kind::gamma, shape, scale};
    }
    static ScalarDistribution make_beta(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0))
            throw std::invalid_argument("beta: both parameters must be > 0");
        return {Kind::beta, a, b};
    }
    static ScalarDistribution make_gaussian(double mean, double std) {
        if (!(std >= 0.0))
            throw std::invalid_argument("gaussian: std must be >= 0");
        return {Kind::gaussian, mean, std};
    }
    static ScalarDistribution make_deterministic(double value) {
        return {Kind::deterministic, value, 0.0};
    }

    Kind kind() const { return kind_; }
    double param_a() const { return a_; }
    double param_b() const { return b_; }

    double mean() const {
        switch (kind_) {
        case Kind::gamma: return a_ * b_;
        case Kind::beta: return a_ / (a_ + b_);
        case Kind::gaussian: return a_;
        case Kind::deterministic: return a_;
        }
        return 0.0;
    }

    double variance() const {
        switch (kind_) {
        case Kind::gamma: return a_ * b_ * b_;
        case Kind::beta: {
            const double s = a_ + b_;
            return a_ * b_ / (s * s * (s + 1.0));
        }
        case Kind::gaussian: return b_ * b_;
        case Kind::deterministic: return 0.0;
        }
        return 0.0;
    }

    template <class Rng>
    double sample(Rng& rng) const {
        switch (kind_) {
        case Kind::gamma: {
            std::gamma_distribution<double> d(a_, b_);
            return d(rng);
        }
        case Kind::beta: {
            // Beta(a, b) via the two-gamma construction.
            std::gamma_distribution<double> da(a_, 1.0), db(b_, 1.0);
            const double x = da(rng);
            const double y = db(rng);
            return x / (x + y);
        }
        case Kind::gaussian: {
            std::normal_distribution<double> d(a_, b_);
            return d(rng);
        }
        case Kind::deterministic:
            return a_;
        }
        return 0.0;
    }

    std::string kind_name() const {
        switch (kind_) {
        case Kind::gamma: return "gamma";
        case Kind::beta: return "beta";
        case Kind::gaussian: return "gaussian";
        case Kind::deterministic: return "deterministic";
        }
        return "?";
    }

private:
    ScalarDistribution(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}

    Kind kind_;
    double a_;
    double b_;
};

/// Log-concave density check: gaussian and deterministic always, gamma with
/// shape >= 1, beta with both parameters >= 1. Strong unimodality implies
/// affine sums of these multipliers stay unimodal.
inline bool is_strong_unimodal(const ScalarDistribution& dist) {
    using Kind = ScalarDistribution::Kind;
    switch (dist.kind()) {
    case Kind::gaussian:
    case Kind::deterministic:
        return true;
    case Kind::gamma:
        return dist.param_a() >= 1.0;
    case Kind::beta:
        return dist.param_a() >= 1.0 && dist.param_b() >= 1.0;
    }
    return false;
}

/// splitmix64; used to derive independent per-sample seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace ccopt
