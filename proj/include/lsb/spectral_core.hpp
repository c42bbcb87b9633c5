#pragma once

// Dense spectral primitives: spectral norms and the kernel/range split of a
// singular Jacobian.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsb/errors.hpp"

namespace lsb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Largest singular value, computed from the smaller Gram matrix.
inline double spectral_norm(const Eigen::Ref<const MatrixXd>& m) {
    detail::require_finite(m, "spectral_norm input");
    if (m.size() == 0) return 0.0;
    if (m.cols() == 1) return m.col(0).norm();
    if (m.rows() == 1) return m.row(0).norm();
    MatrixXd gram = (m.rows() >= m.cols()) ? MatrixXd(m.transpose() * m) : MatrixXd(m * m.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// SVD split of a singular Jacobian into kernel / kernel-complement bases (V, Vbar)
/// and range / range-complement bases (W, Wbar), so that J = W * diag(sigma) * Vbar^T.
struct SingularDecomposition {
    Eigen::Index n = 0;
    Eigen::Index q = 0;
    MatrixXd V;     // n x q
    MatrixXd Vbar;  // n x (n-q)
    MatrixXd W;     // n x (n-q)
    MatrixXd Wbar;  // n x q
    VectorXd sigma; // nonzero singular values, ascending
    double rank_tol = 0.0;
    std::vector<std::string> warnings;

    double sigma_min() const {
        if (sigma.size() == 0) throw InputError("kernel is the whole space; sigma_min undefined");
        return sigma(0);
    }
};

/// Absolute rank cutoff used when the caller has no better scale: 1e-8 * sigma_max(J).
inline double default_rank_tol(const Eigen::Ref<const MatrixXd>& jac) {
    double s = spectral_norm(jac);
    return s > 0.0 ? 1e-8 * s : 1e-8;
}

inline SingularDecomposition decompose_singular(const Eigen::Ref<const MatrixXd>& jac, double rank_tol) {
    detail::require(jac.rows() == jac.cols(), "decompose_singular: Jacobian must be square");
    detail::require(jac.rows() > 0, "decompose_singular: empty Jacobian");
    detail::require_finite(jac, "Jacobian");
    detail::require(rank_tol > 0.0, "decompose_singular: rank_tol must be positive");

    const Eigen::Index n = jac.rows();
    Eigen::JacobiSVD<MatrixXd> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& s = svd.singularValues();  // descending

    Eigen::Index rank = 0;
    while (rank < n && s(rank) > rank_tol) ++rank;
    const Eigen::Index q = n - rank;
    if (q == 0) {
        throw NotSingularError("not singular: smallest singular value " + std::to_string(s(n - 1)) +
                               " exceeds rank_tol " + std::to_string(rank_tol));
    }

    SingularDecomposition dec;
    dec.n = n;
    dec.q = q;
    dec.rank_tol = rank_tol;
    dec.V = svd.matrixV().rightCols(q);
    dec.Wbar = svd.matrixU().rightCols(q);
    dec.Vbar = svd.matrixV().leftCols(rank).rowwise().reverse();
    dec.W = svd.matrixU().leftCols(rank).rowwise().reverse();
    dec.sigma = s.head(rank).reverse();

    if (rank > 0 && dec.sigma(0) < 10.0 * rank_tol) {
        dec.warnings.push_back("ambiguous kernel dimension: sigma_{q+1} = " + std::to_string(dec.sigma(0)) +
                               " is within 10x of rank_tol");
    }
    return dec;
}

struct Projections {
    MatrixXd range;             // P = W W^T
    MatrixXd kernel_complement; // Q = Vbar Vbar^T
    MatrixXd kernel;            // V V^T
    MatrixXd range_complement;  // Wbar Wbar^T
};

inline Projections projections(const SingularDecomposition& dec) {
    return Projections{dec.W * dec.W.transpose(), dec.Vbar * dec.Vbar.transpose(), dec.V * dec.V.transpose(),
                       dec.Wbar * dec.Wbar.transpose()};
}

}  // namespace lsb
