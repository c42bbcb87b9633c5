#pragma once

// Hopfield-type and firing-rate-type network vector fields with scalar
// parameter p:
//   Hopfield:    Phi(x, p) = -C x + p A S(x) + b
//   FiringRate:  Psi(x, p) = -C x + S(p A x + b)
// C is diagonal and stored as a vector.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lsb/errors.hpp"
#include "lsb/spectral_core.hpp"

namespace lsb {

/// Element-wise smooth activation with its derivative.
struct Activation {
    std::string label;
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    VectorXd apply(const VectorXd& z) const { return z.unaryExpr(value); }
    VectorXd slope(const VectorXd& z) const { return z.unaryExpr(derivative); }
};

inline Activation tanh_activation() {
    return {"tanh", [](double z) { return std::tanh(z); },
            [](double z) {
                double c = std::cosh(z);
                return 1.0 / (c * c);
            }};
}

inline Activation logistic_activation() {
    auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    return {"logistic", sig, [sig](double z) {
                double s = sig(z);
                return s * (1.0 - s);
            }};
}

/// Shipped activations by label; throws InputError for anything else.
inline Activation activation_by_label(const std::string& label) {
    if (label == "tanh") return tanh_activation();
    if (label == "logistic") return logistic_activation();
    throw InputError("unknown activation '" + label + "' (expected tanh or logistic)");
}

enum class ModelKind { Hopfield, FiringRate };

inline const char* to_string(ModelKind k) { return k == ModelKind::Hopfield ? "hopfield" : "firing_rate"; }

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "hopfield" || s == "Hopfield") return ModelKind::Hopfield;
    if (s == "firing_rate" || s == "FiringRate" || s == "firing-rate") return ModelKind::FiringRate;
    throw InputError("unknown model kind '" + s + "' (expected hopfield or firing_rate)");
}

class NetworkModel {
public:
    NetworkModel(ModelKind kind, MatrixXd adjacency, VectorXd decay, VectorXd bias, Activation activation)
        : kind_(kind), A_(std::move(adjacency)), C_(std::move(decay)), b_(std::move(bias)),
          S_(std::move(activation)) {
        detail::require(A_.rows() == A_.cols() && A_.rows() > 0, "NetworkModel: A must be square and non-empty");
        detail::require(C_.size() == A_.rows(), "NetworkModel: C length does not match A");
        detail::require(b_.size() == A_.rows(), "NetworkModel: b length does not match A");
        detail::require_finite(A_, "A");
        detail::require_finite(C_, "C");
        detail::require_finite(b_, "b");
        detail::require((C_.array() > 0.0).all(), "NetworkModel: all C entries must be positive");
        detail::require(static_cast<bool>(S_.value) && static_cast<bool>(S_.derivative),
                        "NetworkModel: activation needs value and derivative");
    }

    ModelKind kind() const { return kind_; }
    Eigen::Index dim() const { return A_.rows(); }
    const MatrixXd& A() const { return A_; }
    const VectorXd& C() const { return C_; }
    const VectorXd& b() const { return b_; }
    const Activation& activation() const { return S_; }

    void check_state(const VectorXd& x) const {
        detail::require(x.size() == dim(), "state dimension " + std::to_string(x.size()) +
                                               " does not match model dimension " + std::to_string(dim()));
    }

    /// Pre-activation input of the firing-rate model, p A x + b.
    VectorXd drive(const VectorXd& x, double p) const { return p * (A_ * x) + b_; }

private:
    ModelKind kind_;
    MatrixXd A_;
    VectorXd C_;
    VectorXd b_;
    Activation S_;
};

inline VectorXd evaluate(const NetworkModel& m, const VectorXd& x, double p) {
    m.check_state(x);
    const auto& S = m.activation();
    if (m.kind() == ModelKind::Hopfield) return -m.C().cwiseProduct(x) + p * (m.A() * S.apply(x)) + m.b();
    return -m.C().cwiseProduct(x) + S.apply(m.drive(x, p));
}

/// D_x of the vector field.
inline MatrixXd jacobian_x(const NetworkModel& m, const VectorXd& x, double p) {
    m.check_state(x);
    const auto& S = m.activation();
    MatrixXd J;
    if (m.kind() == ModelKind::Hopfield) {
        J = p * (m.A() * S.slope(x).asDiagonal());
    } else {
        J = p * (S.slope(m.drive(x, p)).asDiagonal() * m.A());
    }
    J.diagonal() -= m.C();
    return J;
}

/// D_p of the vector field (scalar parameter, so a vector).
inline VectorXd jacobian_p(const NetworkModel& m, const VectorXd& x, double p) {
    m.check_state(x);
    const auto& S = m.activation();
    if (m.kind() == ModelKind::Hopfield) return m.A() * S.apply(x);
    return S.slope(m.drive(x, p)).cwiseProduct(m.A() * x);
}

/// Coordinate map x = V alpha + Vbar beta.
inline VectorXd gamma(const SingularDecomposition& dec, const VectorXd& alpha, const VectorXd& beta) {
    detail::require(alpha.size() == dec.q, "gamma: alpha must have length q");
    detail::require(beta.size() == dec.n - dec.q, "gamma: beta must have length n - q");
    return dec.V * alpha + dec.Vbar * beta;
}

/// Equilibrium at which the Jacobian is singular, with its kernel/range split.
struct SingularPoint {
    VectorXd x_star;
    double p_star = 0.0;
    SingularDecomposition decomposition;
    VectorXd alpha0;  // V^T x_star
    VectorXd beta0;   // Vbar^T x_star
    MatrixXd jacobian;
};

}  // namespace lsb
