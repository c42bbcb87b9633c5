#pragma once

// Equilibria, singular-point construction, and the search for the parameter
// value at which an equilibrium branch becomes singular.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsb/errors.hpp"
#include "lsb/network_model.hpp"
#include "lsb/spectral_core.hpp"

namespace lsb {

struct EquilibriumResult {
    VectorXd x;
    double residual = 0.0;  // infinity norm
    int iterations = 0;
    bool used_pseudo_inverse = false;
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    int max_halvings = 30;
};

namespace detail {

inline double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Newton step J s = -r, falling back to a minimum-norm least-squares step
/// when J is numerically rank deficient.
inline VectorXd newton_step(const MatrixXd& jac, const VectorXd& r, bool& used_pinv) {
    Eigen::FullPivLU<MatrixXd> lu(jac);
    lu.setThreshold(1e-13);
    if (lu.isInvertible()) return lu.solve(-r);
    used_pinv = true;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(jac);
    cod.setThreshold(1e-10);
    return cod.solve(-r);
}

/// Damped Newton on ||F||^2: halve the step until the residual decreases.
template <class Residual, class Jacobian>
EquilibriumResult damped_newton(Residual&& F, Jacobian&& DF, VectorXd x, const NewtonOptions& opt,
                                const char* what) {
    EquilibriumResult res;
    VectorXd r = F(x);
    double norm2 = r.squaredNorm();
    for (int it = 0;; ++it) {
        res.iterations = it;
        if (inf_norm(r) <= opt.tol) {
            res.x = std::move(x);
            res.residual = inf_norm(r);
            return res;
        }
        if (it >= opt.max_iter) break;
        VectorXd step = newton_step(DF(x), r, res.used_pseudo_inverse);
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            VectorXd trial = x + t * step;
            VectorXd rt = F(trial);
            double n2 = rt.squaredNorm();
            if (std::isfinite(n2) && n2 < norm2) {
                x = std::move(trial);
                r = std::move(rt);
                norm2 = n2;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    throw ConvergenceError(std::string(what) + ": no convergence, residual " + std::to_string(inf_norm(r)), x,
                           inf_norm(r));
}

}  // namespace detail

/// Newton with backtracking on ||Phi||^2; throws ConvergenceError on failure.
inline EquilibriumResult solve_equilibrium_detailed(const NetworkModel& m, double p, const VectorXd& x_init,
                                                    double tol = 1e-12, int max_iter = 50) {
    m.check_state(x_init);
    detail::require(tol > 0.0, "solve_equilibrium: tol must be positive");
    NewtonOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return detail::damped_newton([&](const VectorXd& x) { return evaluate(m, x, p); },
                                 [&](const VectorXd& x) { return jacobian_x(m, x, p); }, x_init, opt,
                                 "solve_equilibrium");
}

inline VectorXd solve_equilibrium(const NetworkModel& m, double p, const VectorXd& x_init, double tol = 1e-12,
                                  int max_iter = 50) {
    return solve_equilibrium_detailed(m, p, x_init, tol, max_iter).x;
}

/// Builds the singular point at an equilibrium (x_star, p_star). A non-positive
/// rank_tol selects the default 1e-8 * sigma_max(J).
inline SingularPoint make_singular_point(const NetworkModel& m, const VectorXd& x_star, double p_star,
                                         double rank_tol = 0.0, double eq_tol = 1e-9) {
    m.check_state(x_star);
    double residual = detail::inf_norm(evaluate(m, x_star, p_star));
    if (!(residual <= eq_tol)) {
        throw InputError("not an equilibrium: residual " + std::to_string(residual) + " exceeds " +
                         std::to_string(eq_tol));
    }
    SingularPoint sp;
    sp.x_star = x_star;
    sp.p_star = p_star;
    sp.jacobian = jacobian_x(m, x_star, p_star);
    if (rank_tol <= 0.0) rank_tol = default_rank_tol(sp.jacobian);
    sp.decomposition = decompose_singular(sp.jacobian, rank_tol);
    sp.alpha0 = sp.decomposition.V.transpose() * x_star;
    sp.beta0 = sp.decomposition.Vbar.transpose() * x_star;
    return sp;
}

struct SingularityClass {
    Eigen::Index q = 0;
    std::vector<std::complex<double>> eigenvalues;
    bool assumption_ok = false;
    std::vector<std::string> warnings;
};

/// Kernel dimension and spectrum at a candidate singular equilibrium. The
/// zero eigenvalue must have algebraic multiplicity q and all other
/// eigenvalues must be off the imaginary axis; a violation is reported, not thrown.
inline SingularityClass classify_singularity(const NetworkModel& m, const VectorXd& x_star, double p_star,
                                             double rank_tol, double eq_tol = 1e-9) {
    SingularPoint sp = make_singular_point(m, x_star, p_star, rank_tol, eq_tol);
    SingularityClass out;
    out.q = sp.decomposition.q;
    out.warnings = sp.decomposition.warnings;
    Eigen::EigenSolver<MatrixXd> es(sp.jacobian, false);
    const double tol = sp.decomposition.rank_tol;
    Eigen::Index zero_count = 0;
    bool off_axis = true;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        std::complex<double> lam = es.eigenvalues()(i);
        out.eigenvalues.push_back(lam);
        if (std::abs(lam) <= tol) {
            ++zero_count;
        } else if (std::abs(lam.real()) <= tol) {
            off_axis = false;
        }
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](auto a, auto b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
    out.assumption_ok = zero_count == out.q && off_axis;
    if (zero_count != out.q) {
        out.warnings.push_back("zero eigenvalue count " + std::to_string(zero_count) +
                               " differs from kernel dimension " + std::to_string(out.q));
    }
    if (!off_axis) out.warnings.push_back("a nonzero eigenvalue lies on the imaginary axis");
    return out;
}

struct SingularSearchOptions {
    double p_tol = 1e-10;
    double eq_tol = 1e-12;
    int max_iter = 50;
    /// A continuation step moving x by more than this (times max(1, |x|)) is a branch jump.
    double jump_factor = 0.5;
};

struct SingularSearchResult {
    VectorXd x_star;
    double p_star = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    bool fold = false;  // located where the continued branch ends rather than at a sign change
    int branch_jumps = 0;
    std::vector<std::string> diagnostics;
};

namespace detail {

struct BranchSample {
    VectorXd x;
    double p = 0.0;
    double indicator = 0.0;  // sign(det J) * sigma_min(J)
    double sigma_max = 0.0;
};

inline BranchSample branch_sample(const NetworkModel& m, VectorXd x, double p) {
    MatrixXd J = jacobian_x(m, x, p);
    Eigen::JacobiSVD<MatrixXd> svd(J);
    Eigen::PartialPivLU<MatrixXd> lu(J);
    double det = lu.determinant();
    double sign = det < 0.0 ? -1.0 : 1.0;
    const auto& s = svd.singularValues();
    return BranchSample{std::move(x), p, sign * s(s.size() - 1), s(0)};
}

/// Continues the branch from `from` to parameter p; nullopt when Newton fails or jumps.
inline std::optional<BranchSample> continue_branch(const NetworkModel& m, const BranchSample& from, double p,
                                                   const SingularSearchOptions& opt, int& jumps) {
    try {
        VectorXd x = solve_equilibrium(m, p, from.x, opt.eq_tol, opt.max_iter);
        if ((x - from.x).norm() > opt.jump_factor * std::max(1.0, from.x.norm())) {
            ++jumps;
            return std::nullopt;
        }
        return branch_sample(m, std::move(x), p);
    } catch (const ConvergenceError&) {
        return std::nullopt;
    }
}

/// Newton on the extended system Phi(x,p) = 0, J(x,p) v = 0, c^T v = 1.
/// Derivatives of J v are central differences of the analytic Jacobian.
inline BranchSample polish_fold(const NetworkModel& m, const BranchSample& start, double eq_tol) {
    const Eigen::Index n = m.dim();
    Eigen::JacobiSVD<MatrixXd> svd(jacobian_x(m, start.x, start.p), Eigen::ComputeFullV);
    VectorXd c = svd.matrixV().col(n - 1);
    VectorXd z(2 * n + 1);
    z << start.x, start.p, c;

    auto residual = [&](const VectorXd& zz) {
        VectorXd x = zz.head(n), v = zz.tail(n);
        double p = zz(n);
        VectorXd r(2 * n + 1);
        r << evaluate(m, x, p), jacobian_x(m, x, p) * v, c.dot(v) - 1.0;
        return r;
    };
    auto jac = [&](const VectorXd& zz) {
        VectorXd x = zz.head(n), v = zz.tail(n);
        double p = zz(n);
        MatrixXd D = MatrixXd::Zero(2 * n + 1, 2 * n + 1);
        MatrixXd Jx = jacobian_x(m, x, p);
        D.block(0, 0, n, n) = Jx;
        D.block(0, n, n, 1) = jacobian_p(m, x, p);
        D.block(n, n + 1, n, n) = Jx;
        const double h = 1e-6;
        for (Eigen::Index i = 0; i <= n; ++i) {
            VectorXd xp = x, xm = x;
            double pp = p, pm = p;
            if (i < n) {
                xp(i) += h;
                xm(i) -= h;
            } else {
                pp += h;
                pm -= h;
            }
            D.block(n, i, n, 1) = (jacobian_x(m, xp, pp) * v - jacobian_x(m, xm, pm) * v) / (2.0 * h);
        }
        D.block(2 * n, n + 1, 1, n) = c.transpose();
        return D;
    };
    NewtonOptions opt;
    opt.tol = eq_tol;
    opt.max_iter = 60;
    auto res = damped_newton(residual, jac, z, opt, "fold location");
    return branch_sample(m, res.x.head(n), res.x(n));
}

}  // namespace detail

/// Walks the equilibrium branch seeded at x_branch over [p_from, p_to] in
/// `steps` increments, brackets the first point where the signed smallest
/// singular value sign(det J) * sigma_min(J) changes sign (or the branch
/// ends), and bisects in p to opt.p_tol. Branch ends are then refined on the
/// extended fold system.
inline SingularSearchResult find_singular_parameter(const NetworkModel& m, const VectorXd& x_branch, double p_from,
                                                    double p_to, int steps, const SingularSearchOptions& opt = {}) {
    m.check_state(x_branch);
    detail::require(steps >= 1, "find_singular_parameter: steps must be >= 1");
    detail::require(std::isfinite(p_from) && std::isfinite(p_to) && p_from != p_to,
                    "find_singular_parameter: p_range must be a non-empty finite interval");

    SingularSearchResult out;
    int jumps = 0;
    VectorXd x0;
    try {
        x0 = solve_equilibrium(m, p_from, x_branch, opt.eq_tol, opt.max_iter);
    } catch (const ConvergenceError& e) {
        throw SearchError(std::string("no equilibrium at the start of p_range: ") + e.what());
    }
    detail::BranchSample prev = detail::branch_sample(m, x0, p_from);

    std::optional<detail::BranchSample> next;
    bool lost = false;
    for (int i = 1; i <= steps; ++i) {
        double p = p_from + (p_to - p_from) * static_cast<double>(i) / steps;
        next = detail::continue_branch(m, prev, p, opt, jumps);
        if (!next) {
            lost = true;
            break;
        }
        if (prev.indicator == 0.0 || prev.indicator * next->indicator <= 0.0) break;
        prev = *next;
        next.reset();
    }
    if (!next && !lost) {
        throw SearchError("no singular point on the branch in [" + std::to_string(p_from) + ", " +
                          std::to_string(p_to) + "]");
    }

    detail::BranchSample lo = prev;
    std::optional<detail::BranchSample> hi = next;
    double p_hi = lost ? lo.p + (p_to - p_from) / steps : hi->p;
    while (std::abs(p_hi - lo.p) > opt.p_tol && lo.indicator != 0.0) {
        double pm = 0.5 * (lo.p + p_hi);
        if (pm == lo.p || pm == p_hi) break;
        auto mid = detail::continue_branch(m, lo, pm, opt, jumps);
        if (!mid) {
            lost = true;
            hi.reset();
            p_hi = pm;
        } else if (mid->indicator * lo.indicator > 0.0) {
            lo = *mid;
        } else {
            hi = mid;
            p_hi = pm;
        }
    }

    detail::BranchSample best = lo;
    if (hi && std::abs(hi->indicator) < std::abs(lo.indicator)) best = *hi;
    if (!hi) {
        out.fold = true;
        try {
            best = detail::polish_fold(m, lo, opt.eq_tol);
        } catch (const ConvergenceError& e) {
            throw SearchError(std::string("branch ends but the fold could not be located: ") + e.what());
        }
        out.diagnostics.push_back("branch ends near p = " + std::to_string(lo.p) + "; refined as a fold");
    }
    out.x_star = best.x;
    out.p_star = best.p;
    out.sigma_min = std::abs(best.indicator);
    out.sigma_max = best.sigma_max;
    out.branch_jumps = jumps;
    if (jumps > 0) out.diagnostics.push_back(std::to_string(jumps) + " branch jump(s) rejected during continuation");
    return out;
}

}  // namespace lsb
