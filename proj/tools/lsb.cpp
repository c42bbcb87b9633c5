#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Validity radii for Lyapunov-Schmidt reductions of network models"};
    app.require_subcommand(1);

    std::string path;
    auto* spectrum = app.add_subcommand("spectrum", "Adjacency spectrum of an edge list");
    spectrum->add_option("edgelist", path, "Edge list file (i j per line)")->required();

    auto* bound = app.add_subcommand("bound", "Compute a validity-radius certificate");
    bound->add_option("config", path, "JSON config")->required();

    std::optional<std::string> svg, records, aggregate;
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over random regular graphs");
    sweep->add_option("config", path, "JSON config")->required();
    sweep->add_option("--svg", svg, "Write an SVG chart of the aggregates");
    sweep->add_option("--records", records, "Write per-graph rows to this CSV");
    sweep->add_option("--aggregate", aggregate, "Write per-cell aggregates to this CSV");

    auto* verify = app.add_subcommand("verify", "Numerically check the implicit map on a grid");
    verify->add_option("config", path, "JSON config")->required();

    auto* frontier = app.add_subcommand("frontier", "Scan (R_par, R_perp) for feasible certificates");
    frontier->add_option("config", path, "JSON config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : lsb::cli::kInputError;
    }

    using namespace lsb::cli;
    return run_guarded(
        [&] {
            if (*spectrum) return cmd_spectrum(path, std::cout);
            if (*bound) return cmd_bound(path, std::cout, std::cerr);
            if (*sweep) return cmd_sweep(path, svg, records, aggregate, std::cout, std::cerr);
            if (*verify) return cmd_verify(path, std::cout, std::cerr);
            return cmd_frontier(path, std::cout, std::cerr);
        },
        std::cerr);
}
