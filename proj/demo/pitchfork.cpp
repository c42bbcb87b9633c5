// Consensus pitchfork on a regular graph: prints the branch a(u) from the
// scalar equation next to full-system equilibria, then the certified radius.
//
//   pitchfork [n] [k] [d] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <vector>

#include "lsb/lsb.hpp"

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 10;
    int k = argc > 2 ? std::atoi(argv[2]) : 3;
    double d = argc > 3 ? std::atof(argv[3]) : 1.0;
    std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;

    try {
        lsb::Graph g = lsb::generate_random_regular(n, k, seed).graph;
        auto inst = lsb::build_nod_model(g, d, lsb::ModelKind::Hopfield);
        auto spec = lsb::adjacency_spectrum(g);
        double bound = lsb::nod_bound(g, d);
        std::cout << "graph n=" << n << " k=" << k << " lambda2=" << spec.lambda2 << " lambda'=" << spec.lambda_prime
                  << "\nsingular point p*=" << inst.point.p_star << ", certified R_par=" << bound << "\n\n";

        std::vector<double> us;
        for (int i = 0; i <= 12; ++i) us.push_back(inst.point.p_star * (0.7 + 0.05 * i));
        auto branch = lsb::consensus_branch(k, d, us);
        std::cout << std::setw(10) << "u" << std::setw(14) << "a_plus" << std::setw(14) << "full_x_mean"
                  << std::setw(12) << "in_ball\n";
        for (const auto& bp : branch) {
            std::cout << std::setw(10) << std::setprecision(4) << bp.u;
            if (bp.a_plus) {
                Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, *bp.a_plus * 1.01);
                Eigen::VectorXd x = lsb::solve_equilibrium(inst.model, bp.u, x0);
                double dist = std::hypot(*bp.a_plus * std::sqrt(double(n)), bp.u - inst.point.p_star);
                std::cout << std::setw(14) << std::setprecision(6) << *bp.a_plus << std::setw(14) << x.mean()
                          << std::setw(11) << (dist < bound ? "yes" : "no") << '\n';
            } else {
                std::cout << std::setw(14) << "-" << std::setw(14) << 0.0 << std::setw(11) << "-" << '\n';
            }
        }
    } catch (const lsb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == lsb::ErrorKind::Input ? 1 : 2;
    }
    return 0;
}
