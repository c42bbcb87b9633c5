#pragma once

// Numerical check of the implicit map beta = phi(alpha, p): the range
// component W^T Phi(V alpha + Vbar beta, p) = 0 is solved for beta by Newton
// on a grid over B_par, and multi-start agreement inside B_perp is taken as
// evidence of uniqueness (not a proof).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsb/bounds.hpp"
#include "lsb/equilibrium.hpp"
#include "lsb/errors.hpp"
#include "lsb/network_model.hpp"
#include "lsb/sampling.hpp"

namespace lsb {

struct ComplementaryResult {
    VectorXd beta;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_trace;
};

/// Newton on g(beta) = W^T Phi(Gamma(alpha, beta), p) with Jacobian
/// W^T D_xPhi Vbar, halving the step until |g| decreases.
inline ComplementaryResult solve_complementary(const NetworkModel& m, const SingularPoint& sp, const VectorXd& alpha,
                                               double p, const VectorXd& beta_init, double tol = 1e-12,
                                               int max_iter = 50) {
    detail::require(tol > 0.0, "solve_complementary: tol must be positive");
    const auto& dec = sp.decomposition;
    detail::require(alpha.size() == dec.q, "solve_complementary: alpha must have length q");
    detail::require(beta_init.size() == dec.n - dec.q, "solve_complementary: beta must have length n - q");
    const MatrixXd Wt = dec.W.transpose();

    ComplementaryResult out;
    VectorXd beta = beta_init;
    auto g = [&](const VectorXd& b) { return VectorXd(Wt * evaluate(m, gamma(dec, alpha, b), p)); };
    VectorXd r = g(beta);
    for (int it = 0;; ++it) {
        double res = detail::inf_norm(r);
        out.residual_trace.push_back(res);
        if (res <= tol) {
            out.beta = std::move(beta);
            out.iterations = it;
            out.residual = res;
            return out;
        }
        if (it >= max_iter) break;
        MatrixXd inner = Wt * jacobian_x(m, gamma(dec, alpha, beta), p) * dec.Vbar;
        Eigen::JacobiSVD<MatrixXd> svd(inner, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        if (s.size() > 0 && !(s(s.size() - 1) > 1e-13 * std::max(1.0, s(0)))) {
            throw ConvergenceError("solve_complementary: singular inner Jacobian", beta, res);
        }
        VectorXd step = svd.solve(-r);
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= 30; ++h, t *= 0.5) {
            VectorXd trial = beta + t * step;
            VectorXd rt = g(trial);
            if (std::isfinite(rt.squaredNorm()) && rt.squaredNorm() < r.squaredNorm()) {
                beta = std::move(trial);
                r = std::move(rt);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    throw ConvergenceError("solve_complementary: no convergence, residual " + std::to_string(detail::inf_norm(r)),
                           beta, detail::inf_norm(r));
}

struct GridSample {
    VectorXd alpha;
    double p = 0.0;
    bool converged = false;
    bool inside = false;
    double beta_deviation = 0.0;  // |beta - beta0|
    int violations = 0;
    int failed_starts = 0;
};

struct VerificationReport {
    BallSpec ball;
    int grid = 0;
    int starts = 0;
    std::int64_t grid_size = 0;
    std::int64_t successes = 0;
    double success_fraction = 0.0;
    double max_beta_deviation = 0.0;
    std::int64_t uniqueness_violations = 0;
    std::int64_t failed_starts = 0;
    std::vector<GridSample> samples;
};

/// Grid over the (alpha, p - p*) ball: radii R*i/grid for i = 0..grid-1 and
/// `grid` directions per nonzero radius (equally spaced angles when q = 1,
/// low-discrepancy boundary directions otherwise). grid = 1 is the center only.
inline std::vector<VectorXd> polar_grid(Eigen::Index dim, int grid) {
    detail::require(grid >= 1, "grid must be >= 1");
    std::vector<VectorXd> dirs;
    if (dim == 1) {
        dirs = {VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -1.0)};
    } else if (dim == 2) {
        for (int j = 0; j < grid; ++j) {
            double th = 2.0 * std::numbers::pi * j / grid;
            VectorXd d(2);
            d << std::cos(th), std::sin(th);
            dirs.push_back(d);
        }
    } else {
        KroneckerSequence seq(static_cast<int>(dim) + 1, 0);
        for (int j = 0; j < grid; ++j) dirs.push_back(uniform_to_ball(seq.point(j), true));
    }
    std::vector<VectorXd> pts{VectorXd::Zero(dim)};
    for (int i = 1; i < grid; ++i) {
        double r = static_cast<double>(i) / grid;
        for (const auto& d : dirs) pts.push_back(r * d);
    }
    return pts;
}

inline VerificationReport verify_implicit_map(const NetworkModel& m, const SingularPoint& sp, const BallSpec& ball,
                                              int grid, int starts, std::uint64_t seed = 0, double tol = 1e-12) {
    ball.validate();
    detail::require(starts >= 0, "verify_implicit_map: starts must be >= 0");
    const Eigen::Index q = sp.decomposition.q;
    const Eigen::Index nperp = sp.decomposition.n - q;

    VerificationReport rep;
    rep.ball = ball;
    rep.grid = grid;
    rep.starts = starts;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto random_in_perp_ball = [&]() {
        VectorXd v(nperp);
        for (Eigen::Index i = 0; i < nperp; ++i) v(i) = normal(rng);
        double nv = v.norm();
        if (nv == 0.0) return VectorXd(sp.beta0);
        double r = ball.r_perp * std::pow(unif(rng), 1.0 / static_cast<double>(nperp));
        return VectorXd(sp.beta0 + (r / nv) * v);
    };

    for (const VectorXd& u : polar_grid(q + 1, grid)) {
        GridSample s;
        s.alpha = sp.alpha0 + ball.r_par * u.head(q);
        s.p = sp.p_star + ball.r_par * u(q);
        std::optional<VectorXd> beta;
        try {
            beta = solve_complementary(m, sp, s.alpha, s.p, sp.beta0, tol).beta;
            s.converged = true;
            s.beta_deviation = nperp ? (*beta - sp.beta0).norm() : 0.0;
            s.inside = s.beta_deviation < ball.r_perp;
        } catch (const ConvergenceError&) {
        }
        for (int j = 0; j < starts; ++j) {
            VectorXd b0 = random_in_perp_ball();
            try {
                VectorXd b = solve_complementary(m, sp, s.alpha, s.p, b0, tol).beta;
                bool in_ball = (b - sp.beta0).norm() < ball.r_perp;
                if (beta && s.inside && in_ball && (b - *beta).norm() > 1e-6) ++s.violations;
            } catch (const ConvergenceError&) {
                ++s.failed_starts;
            }
        }
        ++rep.grid_size;
        if (s.converged && s.inside) ++rep.successes;
        rep.max_beta_deviation = std::max(rep.max_beta_deviation, s.beta_deviation);
        rep.uniqueness_violations += s.violations;
        rep.failed_starts += s.failed_starts;
        rep.samples.push_back(std::move(s));
    }
    rep.success_fraction = static_cast<double>(rep.successes) / static_cast<double>(rep.grid_size);
    return rep;
}

/// Consensus equilibria x = a 1 of the opinion-dynamics model.
struct BranchPoint {
    double u = 0.0;
    std::optional<double> a_minus;
    double a_zero = 0.0;
    std::optional<double> a_plus;
};

/// Roots of the scalar consensus equation
///   Hopfield:   -d a + u k tanh(a) = 0
///   FiringRate: -d a + tanh(u k a) = 0
/// The nontrivial pair exists only when u k > d.
inline std::vector<BranchPoint> consensus_branch(int k, double d, const std::vector<double>& u_values,
                                                 ModelKind kind = ModelKind::Hopfield) {
    detail::require(k > 0 && d > 0.0, "consensus_branch: need k > 0 and d > 0");
    std::vector<BranchPoint> out;
    for (double u : u_values) {
        BranchPoint bp;
        bp.u = u;
        const double gain = u * k;
        if (gain > d) {
            // g(a) = f(a)/a is strictly decreasing on a > 0 with g(0+) = u k - d > 0
            auto g = [&](double a) {
                return kind == ModelKind::Hopfield ? -d + gain * std::tanh(a) / a : -d + std::tanh(gain * a) / a;
            };
            double lo = 0.0;
            double hi = kind == ModelKind::Hopfield ? gain / d : 1.0 / d;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                double mid = 0.5 * (lo + hi);
                (mid > 0.0 && g(mid) > 0.0 ? lo : hi) = mid;
            }
            double a = 0.5 * (lo + hi);
            bp.a_plus = a;
            bp.a_minus = -a;
        }
        out.push_back(bp);
    }
    return out;
}

/// Solves the full n-dimensional system from each consensus root plus a
/// 1e-3 relative perturbation (fixed seed) and returns the largest
/// |x - a 1|_inf over all roots and parameter values.
inline double compare_full_vs_branch(const NetworkModel& m, const SingularPoint& sp, const std::vector<double>& u_values,
                                     double tol, std::uint64_t seed = 7) {
    const Eigen::Index n = m.dim();
    VectorXd deg = m.A().rowwise().sum();
    detail::require((deg.array() == deg(0)).all() && deg(0) > 0, "compare_full_vs_branch: A must be k-regular");
    detail::require((m.C().array() == m.C()(0)).all(), "compare_full_vs_branch: C must be d I");
    detail::require(m.b().isZero(0.0), "compare_full_vs_branch: bias must vanish");
    detail::require(m.activation().label == "tanh", "compare_full_vs_branch: activation must be tanh");
    const int k = static_cast<int>(deg(0));
    const double d = m.C()(0);
    detail::require(std::abs(sp.p_star - d / k) <= 1e-9 * std::max(1.0, d / k),
                    "compare_full_vs_branch: singular point is not the consensus pitchfork");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (const BranchPoint& bp : consensus_branch(k, d, u_values, m.kind())) {
        std::vector<double> roots{bp.a_zero};
        if (bp.a_plus) roots.push_back(*bp.a_plus);
        if (bp.a_minus) roots.push_back(*bp.a_minus);
        for (double a : roots) {
            VectorXd x0(n);
            for (Eigen::Index i = 0; i < n; ++i) x0(i) = a + 1e-3 * std::max(1.0, std::abs(a)) * unif(rng);
            VectorXd x = solve_equilibrium(m, bp.u, x0, std::min(tol, 1e-12), 100);
            worst = std::max(worst, (x - VectorXd::Constant(n, a)).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace lsb
