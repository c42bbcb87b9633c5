#pragma once

// Consensus bifurcation of nonlinear opinion dynamics on k-regular graphs:
//   Hopfield:    xdot = -d x + u A tanh(x)
//   FiringRate:  xdot = -d x + tanh(u A x)
// Both have the pitchfork at (x, u) = (0, d/k) with J* = (d/k)(A - k I),
// and the radius bound R_par < d (k - lambda2) / (k |lambda'|), with
// lambda' = max(|lambda2|, |lambda_n|).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lsb/bounds.hpp"
#include "lsb/equilibrium.hpp"
#include "lsb/errors.hpp"
#include "lsb/network_model.hpp"

namespace lsb {

/// Undirected simple graph with a cached adjacency spectrum (descending).
class Graph {
public:
    static Graph from_adjacency(MatrixXd adjacency) {
        detail::require(adjacency.rows() == adjacency.cols() && adjacency.rows() > 0,
                        "Graph: adjacency must be square and non-empty");
        const Eigen::Index n = adjacency.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
            detail::require(adjacency(i, i) == 0.0, "Graph: self-loop at vertex " + std::to_string(i));
            for (Eigen::Index j = 0; j < n; ++j) {
                double a = adjacency(i, j);
                detail::require(a == 0.0 || a == 1.0, "Graph: adjacency entries must be 0 or 1");
                detail::require(a == adjacency(j, i), "Graph: adjacency must be symmetric");
            }
        }
        Graph g;
        g.A_ = std::move(adjacency);
        VectorXd deg = g.A_.rowwise().sum();
        if ((deg.array() == deg(0)).all()) g.degree_ = static_cast<int>(deg(0));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.A_, Eigen::EigenvaluesOnly);
        g.spectrum_ = es.eigenvalues().reverse();
        return g;
    }

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        detail::require(n > 0, "Graph: vertex count must be positive");
        MatrixXd A = MatrixXd::Zero(n, n);
        for (auto [i, j] : edges) {
            detail::require(i >= 0 && j >= 0 && i < n && j < n, "Graph: edge endpoint out of range");
            detail::require(i != j, "Graph: self-loop at vertex " + std::to_string(i));
            detail::require(A(i, j) == 0.0, "Graph: duplicate edge " + std::to_string(i) + " " + std::to_string(j));
            A(i, j) = A(j, i) = 1.0;
        }
        return from_adjacency(std::move(A));
    }

    Eigen::Index n() const { return A_.rows(); }
    const MatrixXd& adjacency() const { return A_; }
    std::optional<int> degree() const { return degree_; }
    bool regular() const { return degree_.has_value(); }
    const VectorXd& spectrum() const { return spectrum_; }

    bool connected() const {
        std::vector<char> seen(static_cast<std::size_t>(n()), 0);
        std::queue<Eigen::Index> todo;
        todo.push(0);
        seen[0] = 1;
        Eigen::Index count = 1;
        while (!todo.empty()) {
            Eigen::Index v = todo.front();
            todo.pop();
            for (Eigen::Index w = 0; w < n(); ++w) {
                if (A_(v, w) != 0.0 && !seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    ++count;
                    todo.push(w);
                }
            }
        }
        return count == n();
    }

    /// Same graph with vertex i renamed perm[i].
    Graph permuted(const std::vector<int>& perm) const {
        detail::require(static_cast<Eigen::Index>(perm.size()) == n(), "permuted: wrong permutation length");
        MatrixXd B(n(), n());
        for (Eigen::Index i = 0; i < n(); ++i)
            for (Eigen::Index j = 0; j < n(); ++j) B(perm[i], perm[j]) = A_(i, j);
        return from_adjacency(std::move(B));
    }

private:
    MatrixXd A_;
    std::optional<int> degree_;
    VectorXd spectrum_;
};

inline Graph complete_graph(int n) {
    MatrixXd A = MatrixXd::Ones(n, n);
    A.diagonal().setZero();
    return Graph::from_adjacency(std::move(A));
}

inline Graph cycle_graph(int n) {
    detail::require(n >= 3, "cycle_graph: n must be >= 3");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(n, e);
}

inline Graph petersen_graph() {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);          // outer cycle
        e.emplace_back(i, i + 5);                // spokes
        e.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
    }
    return Graph::from_edges(10, e);
}

struct GeneratedGraph {
    Graph graph;
    int attempts = 0;
};

namespace detail {

/// One pass of stub pairing that only ever joins suitable pairs (distinct,
/// not yet adjacent); leftover stubs are re-paired until none remain or no
/// suitable pair exists.
inline std::optional<std::set<std::pair<int, int>>> try_pairing(int n, int k, std::mt19937_64& rng) {
    std::set<std::pair<int, int>> edges;
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * k);
    for (int r = 0; r < k; ++r)
        for (int v = 0; v < n; ++v) stubs.push_back(v);

    while (!stubs.empty()) {
        std::map<int, int> leftover;
        std::shuffle(stubs.begin(), stubs.end(), rng);
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int a = std::min(stubs[i], stubs[i + 1]);
            int b = std::max(stubs[i], stubs[i + 1]);
            if (a != b && !edges.count({a, b})) {
                edges.insert({a, b});
            } else {
                ++leftover[a];
                ++leftover[b];
            }
        }
        bool suitable = false;
        for (auto it = leftover.begin(); it != leftover.end() && !suitable; ++it)
            for (auto jt = std::next(it); jt != leftover.end(); ++jt)
                if (!edges.count({it->first, jt->first})) {
                    suitable = true;
                    break;
                }
        if (!leftover.empty() && !suitable) return std::nullopt;
        stubs.clear();
        for (auto [v, c] : leftover)
            for (int r = 0; r < c; ++r) stubs.push_back(v);
    }
    return edges;
}

}  // namespace detail

/// Random simple k-regular graph by stub pairing with rejection of dead ends
/// and of disconnected results. For k > (n-1)/2 the sparser complement is
/// paired and complemented. Deterministic for a fixed seed.
inline GeneratedGraph generate_random_regular(int n, int k, std::uint64_t seed, int max_rejections = 1000) {
    detail::require(n > 0 && k > 0 && k < n, "generate_random_regular: need 0 < k < n");
    detail::require((static_cast<long long>(n) * k) % 2 == 0, "generate_random_regular: n*k must be even");
    if (k == n - 1) return {complete_graph(n), 1};

    const bool complement = 2 * k > n - 1;
    const int kk = complement ? n - 1 - k : k;
    std::mt19937_64 rng(seed);
    for (int attempt = 1; attempt <= max_rejections; ++attempt) {
        auto edges = detail::try_pairing(n, kk, rng);
        if (!edges) continue;
        MatrixXd A = MatrixXd::Zero(n, n);
        for (auto [a, b] : *edges) A(a, b) = A(b, a) = 1.0;
        if (complement) {
            A = MatrixXd::Ones(n, n) - A;
            A.diagonal().setZero();
        }
        Graph g = Graph::from_adjacency(std::move(A));
        if (g.connected()) return {std::move(g), attempt};
    }
    throw GenerationError("generate_random_regular: " + std::to_string(max_rejections) +
                          " rejections for n=" + std::to_string(n) + ", k=" + std::to_string(k));
}

struct AdjacencySpectrum {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda_min = 0.0;
    double lambda_prime = 0.0;
};

inline int require_regular_connected(const Graph& g) {
    if (!g.regular()) throw InputError("graph is not regular");
    if (!g.connected()) throw InputError("graph is disconnected: the consensus kernel would exceed dimension 1");
    detail::require(g.n() >= 2, "graph needs at least two vertices");
    return *g.degree();
}

inline AdjacencySpectrum adjacency_spectrum(const Graph& g) {
    const int k = require_regular_connected(g);
    const VectorXd& s = g.spectrum();
    AdjacencySpectrum out{s(0), s(1), s(s.size() - 1), std::max(std::abs(s(1)), std::abs(s(s.size() - 1)))};
    if (std::abs(out.lambda1 - k) > 1e-9) {
        throw AssumptionError("Perron root " + std::to_string(out.lambda1) + " differs from degree " +
                              std::to_string(k));
    }
    return out;
}

/// Supremal certified R_par, d (k - lambda2) / (k |lambda'|); R_perp is free.
inline double nod_bound(const Graph& g, double d) {
    detail::require(d > 0.0, "nod_bound: d must be positive");
    const int k = require_regular_connected(g);
    AdjacencySpectrum sp = adjacency_spectrum(g);
    return d * (k - sp.lambda2) / (k * sp.lambda_prime);
}

/// Closed-form M_perp = k / (d (k - lambda2)).
inline double nod_m_perp(const Graph& g, double d) {
    const int k = require_regular_connected(g);
    return k / (d * (k - adjacency_spectrum(g).lambda2));
}

struct NodInstance {
    NetworkModel model;
    SingularPoint point;
};

inline NodInstance build_nod_model(const Graph& g, double d, ModelKind kind) {
    detail::require(d > 0.0, "build_nod_model: d must be positive");
    const int k = require_regular_connected(g);
    const Eigen::Index n = g.n();
    NetworkModel model(kind, g.adjacency(), VectorXd::Constant(n, d), VectorXd::Zero(n), tanh_activation());
    SingularPoint sp = make_singular_point(model, VectorXd::Zero(n), d / k);
    if (sp.decomposition.q != 1) {
        throw AssumptionError("consensus kernel has dimension " + std::to_string(sp.decomposition.q) + ", expected 1");
    }
    double align = std::abs(sp.decomposition.V.col(0).sum()) / std::sqrt(static_cast<double>(n));
    if (std::abs(align - 1.0) > 1e-9) throw AssumptionError("kernel is not spanned by the consensus vector");
    return NodInstance{std::move(model), std::move(sp)};
}

/// Certificate from the closed-form quantities: M_par = L_par = 0,
/// M_perp = k / (d (k - lambda2)), L_perp = R_par |lambda'|.
inline BoundCertificate nod_certificate(const Graph& g, double d, const BallSpec& ball) {
    ball.validate();
    AdjacencySpectrum s = adjacency_spectrum(g);
    BoundCertificate c;
    c.method = BoundMethod::Analytic;
    c.ball = ball;
    c.M_par = 0.0;
    c.L_par = 0.0;
    c.M_perp = nod_m_perp(g, d);
    c.L_perp = ball.r_par * s.lambda_prime;
    c.margin = certificate_margin(c.M_par, c.M_perp, c.L_par, c.L_perp, ball);
    return c;
}

/// Flags a sampled L_perp that exceeds the local closed form R_par |lambda'| by more than 5%.
inline std::optional<std::string> nod_l_perp_crosscheck(const Graph& g, double r_par, double sampled_l_perp) {
    double analytic = r_par * adjacency_spectrum(g).lambda_prime;
    if (sampled_l_perp > 1.05 * analytic) {
        return "sampled L_perp " + std::to_string(sampled_l_perp) + " exceeds R_par*|lambda'| = " +
               std::to_string(analytic) + " by more than 5%";
    }
    return std::nullopt;
}

/// One Monte Carlo sample of the radius-vs-structure sweep.
struct SweepRecord {
    int n = 0;
    int k = 0;
    double d = 0.0;
    std::uint64_t seed = 0;
    int index = 0;
    double lambda2 = 0.0;
    double lambda_min = 0.0;
    double lambda_prime = 0.0;
    double r_par_bound = 0.0;

    double recomputed_bound() const { return d * (k - lambda2) / (k * lambda_prime); }
};

inline SweepRecord make_sweep_record(const Graph& g, double d, std::uint64_t seed, int index) {
    AdjacencySpectrum s = adjacency_spectrum(g);
    SweepRecord r;
    r.n = static_cast<int>(g.n());
    r.k = *g.degree();
    r.d = d;
    r.seed = seed;
    r.index = index;
    r.lambda2 = s.lambda2;
    r.lambda_min = s.lambda_min;
    r.lambda_prime = s.lambda_prime;
    r.r_par_bound = r.recomputed_bound();
    return r;
}

}  // namespace lsb
