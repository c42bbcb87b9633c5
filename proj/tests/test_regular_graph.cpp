#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"

using namespace lsb;

TEST(Graph, ValidatesAdjacency) {
    MatrixXd A = MatrixXd::Zero(3, 3);
    A(0, 1) = 1.0;
    EXPECT_THROW(Graph::from_adjacency(A), InputError);  // not symmetric
    A(1, 0) = 1.0;
    A(2, 2) = 1.0;
    EXPECT_THROW(Graph::from_adjacency(A), InputError);  // self-loop
    A(2, 2) = 0.0;
    A(0, 2) = A(2, 0) = 0.5;
    EXPECT_THROW(Graph::from_adjacency(A), InputError);  // weighted
    EXPECT_THROW(Graph::from_edges(3, {{0, 1}, {1, 0}}), InputError);
    EXPECT_THROW(Graph::from_edges(3, {{0, 3}}), InputError);
}

TEST(Graph, DegreeAndConnectivity) {
    Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
    EXPECT_FALSE(path.regular());
    EXPECT_TRUE(path.connected());
    Graph two_triangles = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    EXPECT_EQ(two_triangles.degree(), 2);
    EXPECT_FALSE(two_triangles.connected());
    EXPECT_THROW(adjacency_spectrum(two_triangles), InputError);
    EXPECT_THROW(adjacency_spectrum(path), InputError);
    EXPECT_THROW(build_nod_model(two_triangles, 1.0, ModelKind::Hopfield), InputError);
}

TEST(AdjacencySpectrum, KnownGraphs) {
    auto k4 = adjacency_spectrum(complete_graph(4));
    EXPECT_NEAR(k4.lambda1, 3.0, 1e-12);
    EXPECT_NEAR(k4.lambda2, -1.0, 1e-12);
    EXPECT_NEAR(k4.lambda_min, -1.0, 1e-12);
    EXPECT_NEAR(k4.lambda_prime, 1.0, 1e-12);

    auto c6 = adjacency_spectrum(cycle_graph(6));
    EXPECT_NEAR(c6.lambda2, 1.0, 1e-12);
    EXPECT_NEAR(c6.lambda_min, -2.0, 1e-12);
    EXPECT_NEAR(c6.lambda_prime, 2.0, 1e-12);

    // circulant eigenvalues 2 cos(2 pi j / n)
    for (int n : {5, 7, 9, 12}) {
        VectorXd s = cycle_graph(n).spectrum();
        std::vector<double> expect;
        for (int j = 0; j < n; ++j) expect.push_back(2.0 * std::cos(2.0 * M_PI * j / n));
        std::sort(expect.rbegin(), expect.rend());
        for (int j = 0; j < n; ++j) EXPECT_NEAR(s(j), expect[static_cast<std::size_t>(j)], 1e-12);
    }

    VectorXd p = petersen_graph().spectrum();
    EXPECT_NEAR(p(0), 3.0, 1e-12);
    for (int j = 1; j <= 5; ++j) EXPECT_NEAR(p(j), 1.0, 1e-12);
    for (int j = 6; j < 10; ++j) EXPECT_NEAR(p(j), -2.0, 1e-12);
    auto ps = adjacency_spectrum(petersen_graph());
    EXPECT_NEAR(ps.lambda_prime, 2.0, 1e-12);
}

TEST(NodBound, ClosedFormValues) {
    EXPECT_NEAR(nod_bound(complete_graph(4), 1.0), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(nod_bound(cycle_graph(6), 2.0), 0.5, 1e-12);
    EXPECT_NEAR(nod_bound(petersen_graph(), 1.0), 1.0 / 3.0, 1e-12);
    for (int n : {4, 5, 8, 16}) {
        EXPECT_NEAR(nod_bound(complete_graph(n), n - 1.0), n, 1e-9 * n);
        EXPECT_NEAR(nod_bound(complete_graph(n), 1.0), n / (n - 1.0), 1e-12);
    }
    EXPECT_THROW(nod_bound(complete_graph(4), 0.0), InputError);
}

TEST(NodBound, LinearInDecay) {
    Graph g = generate_random_regular(14, 4, 3).graph;
    double base = nod_bound(g, 1.0);
    for (double c : {0.1, 2.5, 7.0}) EXPECT_NEAR(nod_bound(g, c), c * base, 1e-12 * c * base + 1e-15);
}

TEST(NodBound, InvariantUnderRelabeling) {
    std::mt19937_64 rng(6);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Graph g = generate_random_regular(12, 3, seed).graph;
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Graph h = g.permuted(perm);
        auto a = adjacency_spectrum(g), b = adjacency_spectrum(h);
        EXPECT_NEAR(a.lambda2, b.lambda2, 1e-10);
        EXPECT_NEAR(a.lambda_min, b.lambda_min, 1e-10);
        EXPECT_NEAR(nod_bound(g, 1.0), nod_bound(h, 1.0), 1e-10);
    }
}

TEST(GenerateRandomRegular, SmallCasesAreForced) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph k4 = generate_random_regular(4, 3, seed).graph;
        EXPECT_EQ(k4.adjacency(), complete_graph(4).adjacency());
        // the only connected 2-regular graph on 6 vertices is the 6-cycle
        Graph c = generate_random_regular(6, 2, seed).graph;
        EXPECT_EQ(c.degree(), 2);
        EXPECT_TRUE(c.connected());
        EXPECT_LE((c.spectrum() - cycle_graph(6).spectrum()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(GenerateRandomRegular, Postconditions) {
    auto gen = generate_random_regular(12, 3, 7);
    EXPECT_GE(gen.attempts, 1);
    const Graph& g = gen.graph;
    VectorXd rows = g.adjacency().rowwise().sum();
    EXPECT_TRUE((rows.array() == 3.0).all());
    EXPECT_TRUE(g.connected());
    EXPECT_EQ(g.adjacency(), g.adjacency().transpose());
    EXPECT_EQ(g.adjacency().diagonal().norm(), 0.0);
}

TEST(GenerateRandomRegular, DeterministicPerSeed) {
    EXPECT_EQ(generate_random_regular(20, 5, 42).graph.adjacency(), generate_random_regular(20, 5, 42).graph.adjacency());
    EXPECT_NE(generate_random_regular(20, 5, 42).graph.adjacency(), generate_random_regular(20, 5, 43).graph.adjacency());
}

TEST(GenerateRandomRegular, DenseDegreesAndPerronRoot) {
    for (int n : {12, 18, 24, 30, 36}) {
        for (int k : {3, 12, 18, 24, 30}) {
            if (k >= n || (n * k) % 2) continue;
            Graph g = generate_random_regular(n, k, static_cast<std::uint64_t>(n * 100 + k)).graph;
            EXPECT_EQ(g.degree(), k);
            EXPECT_TRUE(g.connected());
            EXPECT_NEAR(adjacency_spectrum(g).lambda1, k, 1e-9);
        }
    }
    EXPECT_EQ(generate_random_regular(13, 12, 1).graph.adjacency(), complete_graph(13).adjacency());
}

TEST(GenerateRandomRegular, RejectsBadArguments) {
    EXPECT_THROW(generate_random_regular(5, 3, 1), InputError);
    EXPECT_THROW(generate_random_regular(5, 5, 1), InputError);
    EXPECT_THROW(generate_random_regular(5, 0, 1), InputError);
    // k = 1 graphs are perfect matchings, never connected for n > 2
    EXPECT_THROW(generate_random_regular(6, 1, 1, 20), GenerationError);
}

TEST(BuildNodModel, SingularPointAndKernel) {
    for (ModelKind kind : {ModelKind::Hopfield, ModelKind::FiringRate}) {
        auto k4 = build_nod_model(complete_graph(4), 1.0, kind);
        EXPECT_NEAR(k4.point.p_star, 1.0 / 3.0, 1e-15);
        EXPECT_EQ(k4.point.x_star.norm(), 0.0);
        EXPECT_EQ(k4.point.decomposition.q, 1);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(k4.point.decomposition.V(i, 0)), 0.5, 1e-12);
    }
    auto h = build_nod_model(petersen_graph(), 1.0, ModelKind::Hopfield);
    auto f = build_nod_model(petersen_graph(), 1.0, ModelKind::FiringRate);
    EXPECT_LE((h.point.jacobian - f.point.jacobian).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(build_nod_model(cycle_graph(6), 2.0, ModelKind::Hopfield).point.p_star, 1.0, 1e-15);
}

TEST(NodQuantities, MPerpMatchesSpectralGap) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = generate_random_regular(16, 3 + static_cast<int>(seed % 3), seed).graph;
        const int k = *g.degree();
        auto s = adjacency_spectrum(g);
        for (ModelKind kind : {ModelKind::Hopfield, ModelKind::FiringRate}) {
            auto inst = build_nod_model(g, 1.5, kind);
            EXPECT_NEAR(m_perp(inst.point), k / (1.5 * (k - s.lambda2)), 1e-9);
            EXPECT_NEAR(nod_m_perp(g, 1.5), m_perp(inst.point), 1e-9);
            EXPECT_LE(m_parallel(inst.model, inst.point), 1e-10);
        }
    }
}

TEST(NodCertificate, AnalyticFields) {
    auto c = nod_certificate(complete_graph(4), 1.0, BallSpec{0.5, 1.0});
    EXPECT_EQ(c.method, BoundMethod::Analytic);
    EXPECT_NEAR(c.M_perp, 0.75, 1e-12);
    EXPECT_NEAR(c.L_perp, 0.5, 1e-12);
    EXPECT_NEAR(c.margin, 4.0 / 3.0 - 0.5, 1e-12);
    EXPECT_TRUE(c.feasible());
    // the boundary radius itself is not feasible (strict inequality)
    EXPECT_FALSE(nod_certificate(complete_graph(4), 1.0, BallSpec{4.0 / 3.0, 1.0}).feasible());
}

TEST(NodCertificate, CrossCheckWarnsOnlyAboveFivePercent) {
    Graph c6 = cycle_graph(6);
    EXPECT_FALSE(nod_l_perp_crosscheck(c6, 0.1, 0.204).has_value());
    EXPECT_TRUE(nod_l_perp_crosscheck(c6, 0.1, 0.22).has_value());
}

TEST(SweepRecord, FormulaInvariant) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = generate_random_regular(18, 4, seed).graph;
        SweepRecord r = make_sweep_record(g, 1.0, seed, static_cast<int>(seed));
        EXPECT_NEAR(r.r_par_bound, r.d * (r.k - r.lambda2) / (r.k * r.lambda_prime), 1e-12);
        EXPECT_NEAR(r.r_par_bound, nod_bound(g, 1.0), 1e-12);
    }
}
