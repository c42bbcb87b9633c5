#pragma once

// Validity radii for the Lyapunov-Schmidt reduction at a singular point.
//
// For balls B_par = B((alpha0, p*), R_par) and B_perp = B(beta0, R_perp) the
// implicit map beta = phi(alpha, p) exists on B_par with values in B_perp
// whenever
//
//     L_par R_par + L_perp R_perp < R_perp / M_perp - M_par R_par,
//
// where M_par = |W W^T D_p Phi(x*,p*)|, M_perp = 1 / sigma_min(J*), and the
// L's are suprema over the balls of the Jacobian-variation norms |xi_par|,
// |xi_perp|. The suprema are estimated by sampling, so certificates from
// this header are empirical lower-bound estimates unless method == Analytic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsb/errors.hpp"
#include "lsb/network_model.hpp"
#include "lsb/sampling.hpp"
#include "lsb/spectral_core.hpp"

namespace lsb {

/// Generic: the defining projected-Jacobian formulas. ClosedForm: the
/// model-specific expressions in terms of A, S and S'.
enum class XiPath { Generic, ClosedForm };

enum class BoundMethod { Analytic, Sampled };

inline const char* to_string(BoundMethod m) { return m == BoundMethod::Analytic ? "Analytic" : "Sampled"; }

/// Radii of B((alpha0, p*), r_par) in (alpha, p - p*) space and B(beta0, r_perp).
/// Both balls use the Euclidean norm.
struct BallSpec {
    double r_par = 0.0;
    double r_perp = 0.0;

    void validate() const {
        detail::require(r_par > 0.0 && std::isfinite(r_par), "BallSpec: r_par must be positive and finite");
        detail::require(r_perp > 0.0 && std::isfinite(r_perp), "BallSpec: r_perp must be positive and finite");
    }
};

struct BoundCertificate {
    double M_par = 0.0;
    double M_perp = 0.0;
    double L_par = 0.0;
    double L_perp = 0.0;
    BallSpec ball;
    double margin = 0.0;
    BoundMethod method = BoundMethod::Sampled;
    std::int64_t samples_used = 0;
    std::vector<std::string> warnings;

    bool feasible() const { return margin > 0.0; }
};

/// Right-hand side minus left-hand side of the radius inequality.
inline double certificate_margin(double M_par, double M_perp, double L_par, double L_perp, const BallSpec& ball) {
    return ball.r_perp / M_perp - M_par * ball.r_par - L_par * ball.r_par - L_perp * ball.r_perp;
}

struct SamplingOptions {
    int budget = 4096;
    std::uint64_t seed = 0;
    int refine_candidates = 5;
    /// Coordinate moves per refined candidate; the step halves after a full
    /// unsuccessful sweep over the coordinates.
    int refine_steps = 50;
    XiPath path = XiPath::Generic;
};

/// Precomputed quantities at the singular point shared by every xi evaluation.
class XiEvaluator {
public:
    XiEvaluator(const NetworkModel& model, const SingularPoint& sp) : m_(model), sp_(sp) {
        const auto& dec = sp.decomposition;
        detail::require(dec.n == model.dim(), "singular point dimension does not match the model");
        Wt_ = dec.W.transpose();
        P_ = dec.W * dec.W.transpose();
        Q_ = dec.Vbar * dec.Vbar.transpose();
        dp_star_ = jacobian_p(model, sp.x_star, sp.p_star);
        const auto& S = model.activation();
        if (model.kind() == ModelKind::Hopfield) {
            slope_star_ = S.slope(sp.x_star);
            act_star_ = S.apply(sp.x_star);
        } else {
            VectorXd z = model.drive(sp.x_star, sp.p_star);
            slope_star_ = S.slope(z);
            Ax_star_ = model.A() * sp.x_star;
        }
    }

    const NetworkModel& model() const { return m_; }
    const SingularPoint& point() const { return sp_; }
    Eigen::Index q() const { return sp_.decomposition.q; }
    Eigen::Index n() const { return sp_.decomposition.n; }

    double xi_par(const VectorXd& alpha, double p, XiPath path) const {
        check_alpha(alpha);
        VectorXd x = gamma(sp_.decomposition, alpha, sp_.beta0);
        return path == XiPath::Generic ? xi_par_generic(x, p) : xi_par_closed(x, p);
    }

    double xi_perp(const VectorXd& alpha, const VectorXd& beta, double p, XiPath path) const {
        check_alpha(alpha);
        detail::require(beta.size() == n() - q(), "xi_perp: beta must have length n - q");
        VectorXd x = gamma(sp_.decomposition, alpha, beta);
        return path == XiPath::Generic ? xi_perp_generic(x, p) : xi_perp_closed(x, p);
    }

private:
    void check_alpha(const VectorXd& alpha) const {
        detail::require(alpha.size() == q(), "alpha must have length q");
    }

    double xi_par_generic(const VectorXd& x, double p) const {
        const auto& dec = sp_.decomposition;
        MatrixXd block(n(), q() + 1);
        block.leftCols(q()) = jacobian_x(m_, x, p) * dec.V;
        block.col(q()) = jacobian_p(m_, x, p) - dp_star_;
        return spectral_norm(Wt_ * block);
    }

    double xi_par_closed(const VectorXd& x, double p) const {
        const auto& S = m_.activation();
        const auto& V = sp_.decomposition.V;
        MatrixXd block(n(), q() + 1);
        if (m_.kind() == ModelKind::Hopfield) {
            VectorXd delta = p * S.slope(x) - sp_.p_star * slope_star_;
            block.leftCols(q()) = delta.asDiagonal() * V;
            block.col(q()) = S.apply(x) - act_star_;
            return spectral_norm(P_ * (m_.A() * block));
        }
        VectorXd z = m_.drive(x, p);
        VectorXd sz = S.slope(z);
        VectorXd delta_x = p * sz - sp_.p_star * slope_star_;
        block.leftCols(q()) = delta_x.asDiagonal() * (m_.A() * V);
        block.col(q()) = sz.cwiseProduct(m_.A() * x) - slope_star_.cwiseProduct(Ax_star_);
        return spectral_norm(P_ * block);
    }

    double xi_perp_generic(const VectorXd& x, double p) const {
        MatrixXd diff = jacobian_x(m_, x, p) - sp_.jacobian;
        return spectral_norm(Wt_ * diff * sp_.decomposition.Vbar);
    }

    double xi_perp_closed(const VectorXd& x, double p) const {
        const auto& S = m_.activation();
        if (m_.kind() == ModelKind::Hopfield) {
            VectorXd delta = p * S.slope(x) - sp_.p_star * slope_star_;
            return spectral_norm(P_ * m_.A() * delta.asDiagonal() * Q_);
        }
        VectorXd delta = p * S.slope(m_.drive(x, p)) - sp_.p_star * slope_star_;
        return spectral_norm(P_ * delta.asDiagonal() * m_.A() * Q_);
    }

    const NetworkModel& m_;
    const SingularPoint& sp_;
    MatrixXd Wt_, P_, Q_;
    VectorXd dp_star_, slope_star_, act_star_, Ax_star_;
};

/// |W W^T D_p Phi(x*, p*)|: the range-projected parameter derivative.
inline double m_parallel(const NetworkModel& m, const SingularPoint& sp) {
    const auto& W = sp.decomposition.W;
    return (W * (W.transpose() * jacobian_p(m, sp.x_star, sp.p_star))).norm();
}

/// |(I - V V^T) D_p Phi(x*, p*)|; equals m_parallel when J* is normal.
inline double m_parallel_kernel_complement(const NetworkModel& m, const SingularPoint& sp) {
    const auto& V = sp.decomposition.V;
    VectorXd dp = jacobian_p(m, sp.x_star, sp.p_star);
    return (dp - V * (V.transpose() * dp)).norm();
}

/// Model-specific form of m_parallel: |P (C x* - b)| / p* for Hopfield,
/// |P D_zS(p* A x* + b) A x*| for firing rate.
inline double m_parallel_closed_form(const NetworkModel& m, const SingularPoint& sp) {
    const auto& W = sp.decomposition.W;
    VectorXd y;
    if (m.kind() == ModelKind::Hopfield) {
        detail::require(sp.p_star != 0.0, "m_parallel_closed_form: p* must be nonzero");
        y = (m.C().cwiseProduct(sp.x_star) - m.b()) / sp.p_star;
    } else {
        y = m.activation().slope(m.drive(sp.x_star, sp.p_star)).cwiseProduct(m.A() * sp.x_star);
    }
    return (W * (W.transpose() * y)).norm();
}

inline double m_perp(const SingularPoint& sp) {
    if (sp.decomposition.q == sp.decomposition.n) {
        throw InputError("m_perp undefined: the Jacobian kernel is the whole space");
    }
    return 1.0 / sp.decomposition.sigma_min();
}

inline double xi_parallel_norm(const NetworkModel& m, const SingularPoint& sp, const VectorXd& alpha, double p,
                               XiPath path = XiPath::Generic) {
    return XiEvaluator(m, sp).xi_par(alpha, p, path);
}

inline double xi_perp_norm(const NetworkModel& m, const SingularPoint& sp, const VectorXd& alpha,
                           const VectorXd& beta, double p, XiPath path = XiPath::Generic) {
    return XiEvaluator(m, sp).xi_perp(alpha, beta, p, path);
}

/// A sampled supremum with the point that attained it.
struct SupEstimate {
    double value = 0.0;
    std::int64_t evaluations = 0;
    VectorXd alpha;
    double p = 0.0;
    VectorXd beta;
};

namespace detail {

/// Sampled maximization over the unit balls (unit_par of dimension q+1 and,
/// when with_perp, unit_perp of dimension n-q) scaled by the given radii.
/// Objective receives (alpha, p, beta) in model coordinates.
template <class Objective>
SupEstimate sample_supremum(const XiEvaluator& ev, double r_par, double r_perp, bool with_perp,
                            const SamplingOptions& opt, Objective&& f) {
    require(opt.budget >= 10, "sampling budget must be at least 10");
    const int dpar = static_cast<int>(ev.q()) + 1;
    const int dperp = with_perp ? static_cast<int>(ev.n() - ev.q()) : 0;
    const int dim = dpar + dperp;
    const SingularPoint& sp = ev.point();

    struct Candidate {
        VectorXd u;  // concatenated unit-ball coordinates
        double value;
    };

    SupEstimate best;
    best.value = -1.0;
    std::int64_t evals = 0;
    auto eval = [&](const VectorXd& u) {
        VectorXd alpha = sp.alpha0 + r_par * u.head(dpar - 1);
        double p = sp.p_star + r_par * u(dpar - 1);
        VectorXd beta = with_perp ? VectorXd(sp.beta0 + r_perp * u.tail(dperp)) : sp.beta0;
        double v = f(alpha, p, beta);
        ++evals;
        if (v > best.value) {
            best.value = v;
            best.alpha = alpha;
            best.p = p;
            best.beta = beta;
        }
        return v;
    };

    std::vector<Candidate> pool;
    pool.reserve(static_cast<std::size_t>(opt.budget) + 2 * dim + 1);
    auto consider = [&](VectorXd u) {
        double v = eval(u);
        pool.push_back({std::move(u), v});
    };

    // center and the axis extremes of each ball
    consider(VectorXd::Zero(dim));
    for (int j = 0; j < dim; ++j) {
        for (double s : {1.0, -1.0}) {
            VectorXd u = VectorXd::Zero(dim);
            u(j) = s;
            consider(std::move(u));
        }
    }

    KroneckerSequence seq(dpar + 1 + (with_perp ? dperp + 1 : 0), opt.seed);
    for (int k = 0; k < opt.budget; ++k) {
        VectorXd w = seq.point(static_cast<std::uint64_t>(k));
        VectorXd u(dim);
        u.head(dpar) = uniform_to_ball(w.head(dpar + 1), (k & 1) != 0);
        if (with_perp) u.tail(dperp) = uniform_to_ball(w.tail(dperp + 1), (k & 2) != 0);
        consider(std::move(u));
    }

    // local coordinate ascent from the best distinct candidates
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    const std::size_t ncand = std::min<std::size_t>(static_cast<std::size_t>(opt.refine_candidates), pool.size());
    auto clamp = [&](VectorXd& u) {
        clamp_to_unit_ball(u.head(dpar));
        if (with_perp) clamp_to_unit_ball(u.tail(dperp));
    };
    for (std::size_t c = 0; c < ncand; ++c) {
        VectorXd u = pool[c].u;
        double fu = pool[c].value;
        double h = 0.25;
        int coord = 0;
        int since_improve = 0;
        for (int step = 0; step < opt.refine_steps; ++step) {
            bool improved = false;
            for (double s : {h, -h}) {
                VectorXd t = u;
                t(coord) += s;
                clamp(t);
                double ft = eval(t);
                if (ft > fu) {
                    u = std::move(t);
                    fu = ft;
                    improved = true;
                    break;
                }
            }
            since_improve = improved ? 0 : since_improve + 1;
            if (since_improve >= dim) {
                h *= 0.5;
                since_improve = 0;
            }
            coord = (coord + 1) % dim;
        }
    }
    best.evaluations = evals;
    best.value = std::max(best.value, 0.0);
    return best;
}

}  // namespace detail

/// Sampled lower estimate of L_par = sup |xi_par| over B((alpha0, p*), r_par).
inline SupEstimate estimate_L_parallel_detailed(const XiEvaluator& ev, double r_par, const SamplingOptions& opt) {
    detail::require(r_par > 0.0, "estimate_L_parallel: r_par must be positive");
    return detail::sample_supremum(ev, r_par, 0.0, false, opt, [&](const VectorXd& a, double p, const VectorXd&) {
        return ev.xi_par(a, p, opt.path);
    });
}

/// Sampled lower estimate of L_perp = sup |xi_perp| over B_par x B_perp.
inline SupEstimate estimate_L_perp_detailed(const XiEvaluator& ev, double r_par, double r_perp,
                                            const SamplingOptions& opt) {
    detail::require(r_par > 0.0 && r_perp > 0.0, "estimate_L_perp: radii must be positive");
    return detail::sample_supremum(ev, r_par, r_perp, true, opt,
                                   [&](const VectorXd& a, double p, const VectorXd& b) {
                                       return ev.xi_perp(a, b, p, opt.path);
                                   });
}

inline double estimate_L_parallel(const NetworkModel& m, const SingularPoint& sp, double r_par,
                                  const SamplingOptions& opt = {}) {
    return estimate_L_parallel_detailed(XiEvaluator(m, sp), r_par, opt).value;
}

inline double estimate_L_perp(const NetworkModel& m, const SingularPoint& sp, double r_par, double r_perp,
                              const SamplingOptions& opt = {}) {
    return estimate_L_perp_detailed(XiEvaluator(m, sp), r_par, r_perp, opt).value;
}

inline BoundCertificate check_radii(const XiEvaluator& ev, const BallSpec& ball, const SamplingOptions& opt) {
    ball.validate();
    const auto& m = ev.model();
    const auto& sp = ev.point();
    BoundCertificate cert;
    cert.ball = ball;
    cert.method = BoundMethod::Sampled;
    cert.M_par = m_parallel(m, sp);
    cert.M_perp = m_perp(sp);
    double alt = m_parallel_kernel_complement(m, sp);
    if (std::abs(alt - cert.M_par) > 1e-9) {
        cert.warnings.push_back("range projector and kernel-complement projector give different M_par (" +
                                std::to_string(cert.M_par) + " vs " + std::to_string(alt) + ")");
    }
    SupEstimate lp = estimate_L_parallel_detailed(ev, ball.r_par, opt);
    SupEstimate lq = estimate_L_perp_detailed(ev, ball.r_par, ball.r_perp, opt);
    cert.L_par = lp.value;
    cert.L_perp = lq.value;
    cert.samples_used = lp.evaluations + lq.evaluations;
    cert.margin = certificate_margin(cert.M_par, cert.M_perp, cert.L_par, cert.L_perp, ball);
    for (const auto& w : sp.decomposition.warnings) cert.warnings.push_back(w);
    return cert;
}

inline BoundCertificate check_radii(const NetworkModel& m, const SingularPoint& sp, const BallSpec& ball,
                                    const SamplingOptions& opt = {}) {
    return check_radii(XiEvaluator(m, sp), ball, opt);
}

struct RadiusSearch {
    double r_par = 0.0;
    BoundCertificate certificate;
    int checks = 0;
    bool unbounded = false;
};

/// Largest R_par (to relative tolerance tol) whose sampled certificate is
/// feasible at the given R_perp. Brackets by geometric growth or shrinkage
/// from 0.1, then bisects; the result is re-verified by a fresh check.
inline RadiusSearch maximize_R_parallel(const NetworkModel& m, const SingularPoint& sp, double r_perp,
                                        const SamplingOptions& opt = {}, double tol = 1e-3) {
    detail::require(r_perp > 0.0, "maximize_R_parallel: r_perp must be positive");
    detail::require(tol > 0.0, "maximize_R_parallel: tol must be positive");
    XiEvaluator ev(m, sp);
    RadiusSearch out;
    auto feasible = [&](double r) {
        ++out.checks;
        return check_radii(ev, BallSpec{r, r_perp}, opt).feasible();
    };

    constexpr double r_floor = 1e-10;
    constexpr double r_ceiling = 1e6;
    double lo = 0.0, hi = 0.0;
    double r = 0.1;
    if (feasible(r)) {
        lo = r;
        while (true) {
            r *= 2.0;
            if (r > r_ceiling) {
                out.unbounded = true;
                break;
            }
            if (!feasible(r)) {
                hi = r;
                break;
            }
            lo = r;
        }
    } else {
        hi = r;
        while (true) {
            r *= 0.25;
            if (r < r_floor) {
                if (!feasible(r_floor)) {
                    throw DegenerateError("no feasible radius: certificate fails even at r_par = 1e-10");
                }
                lo = r_floor;
                break;
            }
            if (feasible(r)) {
                lo = r;
                break;
            }
            hi = r;
        }
    }
    if (!out.unbounded) {
        while (hi - lo > tol * lo) {
            double mid = 0.5 * (lo + hi);
            if (feasible(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    out.r_par = lo;
    out.certificate = check_radii(ev, BallSpec{lo, r_perp}, opt);
    ++out.checks;
    if (!out.certificate.feasible()) {
        throw DegenerateError("final radius failed re-verification");
    }
    if (out.unbounded) out.certificate.warnings.push_back("certificate feasible up to r_par = 1e6; search stopped");
    return out;
}

}  // namespace lsb
