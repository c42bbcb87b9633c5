#pragma once

// Low-discrepancy sampling of Euclidean balls.
//
// Points come from a Kronecker (generalized golden ratio) sequence with a
// seed-derived Cranley-Patterson shift. D + 1 uniform coordinates per ball
// are mapped to a direction (through the inverse normal CDF) and a radius
// (u^{1/D} for interior points, 1 for boundary points). Points live in the
// unit ball; callers scale them, so the same seed yields the same sample
// structure at every radius.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <Eigen/Dense>

namespace lsb {

class KroneckerSequence {
public:
    KroneckerSequence(int dim, std::uint64_t seed) : alpha_(dim), shift_(dim) {
        // phi_d is the positive root of x^{d+1} = x + 1
        double phi = 2.0;
        for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int j = 0; j < dim; ++j) {
            alpha_[j] = std::fmod(1.0 / std::pow(phi, j + 1), 1.0);
            shift_[j] = u(rng);
        }
    }

    int dim() const { return static_cast<int>(alpha_.size()); }

    /// k-th point in [0,1)^dim.
    Eigen::VectorXd point(std::uint64_t k) const {
        Eigen::VectorXd out(dim());
        for (int j = 0; j < dim(); ++j) {
            double v = shift_[j] + static_cast<double>(k + 1) * alpha_[j];
            out(j) = v - std::floor(v);
        }
        return out;
    }

private:
    std::vector<double> alpha_;
    std::vector<double> shift_;
};

/// Maps D+1 uniforms to a point of the closed unit ball in R^D.
inline Eigen::VectorXd uniform_to_ball(const Eigen::Ref<const Eigen::VectorXd>& u, bool on_boundary) {
    const Eigen::Index d = u.size() - 1;
    Eigen::VectorXd g(d);
    constexpr double eps = 1e-12;
    for (Eigen::Index j = 0; j < d; ++j) {
        double t = std::min(std::max(u(j), eps), 1.0 - eps);
        g(j) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * t - 1.0);
    }
    double nrm = g.norm();
    if (nrm == 0.0) {
        g.setZero();
        g(0) = 1.0;
        nrm = 1.0;
    }
    double r = on_boundary ? 1.0 : std::pow(u(d), 1.0 / static_cast<double>(d));
    return (r / nrm) * g;
}

/// Radially clamps v onto the closed unit ball.
inline void clamp_to_unit_ball(Eigen::Ref<Eigen::VectorXd> v) {
    double n = v.norm();
    if (n > 1.0) v /= n;
}

}  // namespace lsb
