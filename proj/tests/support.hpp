#pragma once

// Independent reference computations used by the tests: power iteration for
// the spectral norm, central finite differences, and constructed models with
// a known singular point.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "lsb/lsb.hpp"

namespace lsb::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

inline VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    return random_matrix(n, 1, rng, scale).col(0);
}

inline MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
    Eigen::HouseholderQR<MatrixXd> qr(random_matrix(n, k, rng));
    return qr.householderQ() * MatrixXd::Identity(n, k);
}

/// sqrt of the dominant eigenvalue of M^T M by plain power iteration.
inline double power_iteration_norm(const MatrixXd& m, int iters = 5000) {
    MatrixXd g = m.transpose() * m;
    VectorXd v = VectorXd::Ones(g.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 0.01 * static_cast<double>(i);
    double lam = 0.0;
    for (int k = 0; k < iters; ++k) {
        VectorXd w = g * v;
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        lam = v.dot(w) / v.squaredNorm();
        v = w / nw;
    }
    return std::sqrt(lam);
}

inline MatrixXd fd_jacobian_x(const NetworkModel& m, const VectorXd& x, double p, double h = 1e-6) {
    const Eigen::Index n = x.size();
    MatrixXd J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (evaluate(m, xp, p) - evaluate(m, xm, p)) / (2 * h);
    }
    return J;
}

inline VectorXd fd_jacobian_p(const NetworkModel& m, const VectorXd& x, double p, double h = 1e-6) {
    return (evaluate(m, x, p + h) - evaluate(m, x, p - h)) / (2 * h);
}

/// Hopfield model with a prescribed equilibrium x* at p* whose Jacobian has a
/// simple zero eigenvalue: C = rho I where rho is the Perron root of p* A D
/// for a nonnegative A, and b balances the equation at x*.
inline NetworkModel constructed_hopfield(int n, std::mt19937_64& rng, const Activation& act, VectorXd& x_star,
                                         double& p_star) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = i == j ? 0.0 : u(rng);
    x_star = random_vector(n, rng, 0.5);
    p_star = 0.5 + u(rng);
    MatrixXd K = p_star * A * act.slope(x_star).asDiagonal();
    Eigen::EigenSolver<MatrixXd> es(K);
    double rho = es.eigenvalues().real().maxCoeff();
    VectorXd C = VectorXd::Constant(n, rho);
    VectorXd b = C.cwiseProduct(x_star) - p_star * A * act.apply(x_star);
    return NetworkModel(ModelKind::Hopfield, A, C, b, act);
}

/// Firing-rate model with equilibrium x* = S(z)/c at p*: C = c I with c the
/// Perron root of p* D_zS(z) A, and b = z - p* A x*.
inline NetworkModel constructed_firing_rate(int n, std::mt19937_64& rng, const Activation& act, VectorXd& x_star,
                                            double& p_star) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = i == j ? 0.0 : u(rng);
    VectorXd z = random_vector(n, rng, 0.5);
    p_star = 0.5 + u(rng);
    MatrixXd K = p_star * act.slope(z).asDiagonal() * A;
    Eigen::EigenSolver<MatrixXd> es(K);
    double c = es.eigenvalues().real().maxCoeff();
    x_star = act.apply(z) / c;
    VectorXd b = z - p_star * A * x_star;
    return NetworkModel(ModelKind::FiringRate, A, VectorXd::Constant(n, c), b, act);
}

/// Hopfield K4 with unit leak and bias e1; its branch has a fold at the
/// frozen point below (located independently by solving Phi = 0, det J = 0).
inline NetworkModel desk_hopfield_k4() {
    VectorXd b = VectorXd::Zero(4);
    b(0) = 1.0;
    return NetworkModel(ModelKind::Hopfield, complete_graph(4).adjacency(), VectorXd::Ones(4), b, tanh_activation());
}

constexpr double kDeskPStar = 0.55466408231954662;
constexpr double kDeskX1 = -0.17771712414434043;
constexpr double kDeskX2 = -0.88269324063534189;
constexpr double kDeskMPar = 0.32414551524031;

inline VectorXd desk_x_star() {
    VectorXd x = VectorXd::Constant(4, kDeskX2);
    x(0) = kDeskX1;
    return x;
}

}  // namespace lsb::testing
