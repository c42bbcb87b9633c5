#include <gtest/gtest.h>

#include <limits>

#include "support.hpp"

using namespace lsb;
using lsb::testing::random_matrix;
using lsb::testing::random_orthonormal;

namespace {

MatrixXd k4_singular_jacobian() { return (complete_graph(4).adjacency() - 3.0 * MatrixXd::Identity(4, 4)) / 3.0; }

void expect_projector(const MatrixXd& P) {
    EXPECT_LE(spectral_norm(P * P - P), 1e-12);
    EXPECT_LE(spectral_norm(P - P.transpose()), 1e-12);
}

}  // namespace

TEST(SpectralNorm, IdentityAndDiagonal) {
    EXPECT_DOUBLE_EQ(spectral_norm(MatrixXd::Identity(3, 3)), 1.0);
    MatrixXd d = MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -3.0;
    EXPECT_NEAR(spectral_norm(d), 3.0, 1e-14);
}

TEST(SpectralNorm, MatchesPowerIteration) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        MatrixXd m = random_matrix(5, 4, rng);
        EXPECT_NEAR(spectral_norm(m), lsb::testing::power_iteration_norm(m), 1e-10);
        EXPECT_NEAR(spectral_norm(m.transpose()), spectral_norm(m), 1e-10);
    }
}

TEST(SpectralNorm, VectorsAndEmpty) {
    VectorXd v(3);
    v << 3, 4, 0;
    EXPECT_DOUBLE_EQ(spectral_norm(v), 5.0);
    EXPECT_DOUBLE_EQ(spectral_norm(v.transpose()), 5.0);
    EXPECT_DOUBLE_EQ(spectral_norm(MatrixXd(0, 3)), 0.0);
}

TEST(SpectralNorm, RejectsNonFinite) {
    MatrixXd m = MatrixXd::Ones(2, 2);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(spectral_norm(m), InputError);
    m(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(spectral_norm(m), InputError);
}

TEST(DecomposeSingular, ZeroMatrix) {
    auto dec = decompose_singular(MatrixXd::Zero(2, 2), 1e-8);
    EXPECT_EQ(dec.q, 2);
    EXPECT_EQ(dec.sigma.size(), 0);
    auto pr = projections(dec);
    EXPECT_LE(pr.range.norm(), 1e-15);
    EXPECT_LE((pr.kernel - MatrixXd::Identity(2, 2)).norm(), 1e-12);
    EXPECT_THROW(dec.sigma_min(), InputError);
}

TEST(DecomposeSingular, Diagonal) {
    MatrixXd J = MatrixXd::Zero(2, 2);
    J(1, 1) = -2.0;
    auto dec = decompose_singular(J, 1e-8);
    EXPECT_EQ(dec.q, 1);
    ASSERT_EQ(dec.sigma.size(), 1);
    EXPECT_NEAR(dec.sigma(0), 2.0, 1e-14);
    EXPECT_NEAR(std::abs(dec.V(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(dec.V(1, 0), 0.0, 1e-14);
}

TEST(DecomposeSingular, CompleteGraphK4) {
    MatrixXd J = k4_singular_jacobian();
    auto dec = decompose_singular(J, 1e-8);
    EXPECT_EQ(dec.q, 1);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(dec.V(i, 0)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(dec.V.col(0).sum()), 2.0, 1e-12);
    ASSERT_EQ(dec.sigma.size(), 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(dec.sigma(i), 4.0 / 3.0, 1e-12);
    EXPECT_TRUE(dec.warnings.empty());
}

TEST(DecomposeSingular, NonsingularThrows) {
    EXPECT_THROW(decompose_singular(MatrixXd::Identity(3, 3), 1e-8), NotSingularError);
    EXPECT_THROW(decompose_singular(MatrixXd::Zero(2, 3), 1e-8), InputError);
    EXPECT_THROW(decompose_singular(MatrixXd::Zero(2, 2), 0.0), InputError);
}

TEST(DecomposeSingular, InvariantsOnRandomRankDeficient) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const int n = 3 + t % 5, rank = n - 1 - t % 2;
        MatrixXd J = random_matrix(n, rank, rng) * random_matrix(rank, n, rng);
        double tol = default_rank_tol(J);
        auto dec = decompose_singular(J, tol);
        ASSERT_EQ(dec.q, n - rank);
        const auto q = dec.q;
        EXPECT_LE((dec.V.transpose() * dec.V - MatrixXd::Identity(q, q)).norm(), 1e-12);
        EXPECT_LE((dec.Vbar.transpose() * dec.Vbar - MatrixXd::Identity(n - q, n - q)).norm(), 1e-12);
        EXPECT_LE((dec.W.transpose() * dec.W - MatrixXd::Identity(n - q, n - q)).norm(), 1e-12);
        EXPECT_LE((dec.V.transpose() * dec.Vbar).norm(), 1e-12);
        EXPECT_LE(spectral_norm(J * dec.V), tol * std::max(1.0, spectral_norm(J)));
        for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
            EXPECT_GT(dec.sigma(i), tol);
            if (i > 0) EXPECT_LE(dec.sigma(i - 1), dec.sigma(i));
        }
        // J = W diag(sigma) Vbar^T
        EXPECT_LE((dec.W * dec.sigma.asDiagonal() * dec.Vbar.transpose() - J).norm(), 1e-10 * J.norm());
    }
}

TEST(DecomposeSingular, GapWarning) {
    MatrixXd J = MatrixXd::Zero(3, 3);
    J(1, 1) = 5e-8;
    J(2, 2) = 1.0;
    auto dec = decompose_singular(J, 1e-8);
    EXPECT_EQ(dec.q, 1);
    EXPECT_FALSE(dec.warnings.empty());
}

TEST(Projections, LawsAndCompleteness) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const int n = 4 + t % 3;
        MatrixXd J = random_matrix(n, n - 1, rng) * random_matrix(n - 1, n, rng);
        auto pr = projections(decompose_singular(J, default_rank_tol(J)));
        for (const MatrixXd* P : {&pr.range, &pr.kernel_complement, &pr.kernel, &pr.range_complement}) {
            expect_projector(*P);
        }
        EXPECT_LE(spectral_norm(pr.kernel + pr.kernel_complement - MatrixXd::Identity(n, n)), 1e-12);
        EXPECT_LE(spectral_norm(pr.range + pr.range_complement - MatrixXd::Identity(n, n)), 1e-12);
    }
}

TEST(Projections, SymmetricJacobianHasEqualProjectors) {
    std::mt19937_64 rng(8);
    MatrixXd B = random_matrix(5, 4, rng);
    MatrixXd J = B * B.transpose();
    auto pr = projections(decompose_singular(J, default_rank_tol(J)));
    EXPECT_LE((pr.range - pr.kernel_complement).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projections, CompleteGraphKernelProjector) {
    auto pr = projections(decompose_singular(k4_singular_jacobian(), 1e-8));
    EXPECT_LE((pr.kernel - MatrixXd::Constant(4, 4, 0.25)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProjectionNormLemmas, LeftAndRightProjectorsPreserveNorms) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 7, k = 1 + t % n, m = 1 + t % 5;
        MatrixXd U = random_orthonormal(n, k, rng);
        MatrixXd Y = random_matrix(n, m, rng);
        double scale = std::max(1.0, spectral_norm(Y));
        EXPECT_LE(std::abs(spectral_norm(U.transpose() * Y) - spectral_norm(U * U.transpose() * Y)), 1e-10 * scale);
        MatrixXd Z = random_matrix(m, n, rng);
        double zs = std::max(1.0, spectral_norm(Z));
        EXPECT_LE(std::abs(spectral_norm(Z * U) - spectral_norm(Z * U * U.transpose())), 1e-10 * zs);
    }
}
