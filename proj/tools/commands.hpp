#pragma once

// Subcommand implementations for the lsb command-line tool. Each command
// reads a JSON config (or an edge list) and writes machine-readable output to
// `out` and human-readable notes to `err`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsb/lsb.hpp"

namespace lsb::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 1, kNumericalError = 2 };

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("config: '") + key + "' has the wrong type");
    }
}

/// Model plus singular point, and the graph when the model is a consensus instance.
struct Instance {
    std::optional<Graph> graph;
    double d = 0.0;
    NetworkModel model;
    SingularPoint point;

    bool nod() const { return graph.has_value(); }
};

inline Graph graph_from_config(const json& g, const fs::path& base) {
    if (g.is_string()) {
        fs::path p = g.get<std::string>();
        if (p.is_relative()) p = base / p;
        return edge_list_graph(read_edge_list(p.string()));
    }
    if (g.is_object()) {
        std::string type = get_or<std::string>(g, "type", "");
        if (type == "complete") return complete_graph(get_or<int>(g, "n", 0));
        if (type == "cycle") return cycle_graph(get_or<int>(g, "n", 0));
        if (type == "petersen") return petersen_graph();
        if (type == "random_regular") {
            return generate_random_regular(get_or<int>(g, "n", 0), get_or<int>(g, "k", 0),
                                           get_or<std::uint64_t>(g, "seed", 0))
                .graph;
        }
        if (g.contains("edges")) {
            std::vector<std::pair<int, int>> edges;
            int n = 0;
            for (const auto& e : g.at("edges")) {
                if (!e.is_array() || e.size() != 2) throw InputError("config: edges must be [i, j] pairs");
                edges.emplace_back(e[0].get<int>(), e[1].get<int>());
                n = std::max({n, edges.back().first + 1, edges.back().second + 1});
            }
            return Graph::from_edges(get_or<int>(g, "n", n), edges);
        }
        throw InputError("config: graph needs a 'type' (complete, cycle, petersen, random_regular) or 'edges'");
    }
    throw InputError("config: 'graph' must be an edge-list path or an object");
}

inline Instance instance_from_config(const json& cfg, const fs::path& base) {
    double rank_tol = get_or<double>(cfg, "rank_tol", 0.0);
    if (cfg.contains("graph")) {
        Graph g = graph_from_config(cfg.at("graph"), base);
        double d = get_or<double>(cfg, "d", 1.0);
        ModelKind kind = model_kind_from_string(get_or<std::string>(cfg, "kind", "hopfield"));
        NodInstance nod = build_nod_model(g, d, kind);
        return Instance{std::move(g), d, std::move(nod.model), std::move(nod.point)};
    }
    if (!cfg.contains("model")) throw InputError("config: need either 'graph' (+ d, kind) or 'model'");
    NetworkModel model = model_from_json(cfg.at("model"));
    if (cfg.contains("singular_point")) {
        const json& s = cfg.at("singular_point");
        VectorXd x = vector_from_json(s.at("x_star"), "x_star");
        double p = s.at("p_star").get<double>();
        SingularPoint sp = make_singular_point(model, x, p, rank_tol, get_or<double>(s, "eq_tol", 1e-9));
        return Instance{std::nullopt, 0.0, std::move(model), std::move(sp)};
    }
    if (cfg.contains("search")) {
        const json& s = cfg.at("search");
        VectorXd seed = vector_from_json(s.at("x_seed"), "x_seed");
        auto range = s.at("p_range").get<std::vector<double>>();
        if (range.size() != 2) throw InputError("config: p_range must be [from, to]");
        auto found = find_singular_parameter(model, seed, range[0], range[1], get_or<int>(s, "steps", 100));
        SingularPoint sp = make_singular_point(model, found.x_star, found.p_star, rank_tol);
        return Instance{std::nullopt, 0.0, std::move(model), std::move(sp)};
    }
    throw InputError("config: a 'model' needs 'singular_point' {x_star, p_star} or 'search' {x_seed, p_range}");
}

inline SamplingOptions sampling_from_config(const json& cfg) {
    SamplingOptions opt;
    opt.budget = get_or<int>(cfg, "budget", 4096);
    opt.seed = get_or<std::uint64_t>(cfg, "seed", 0);
    std::string path = get_or<std::string>(cfg, "path", "generic");
    if (path == "generic") {
        opt.path = XiPath::Generic;
    } else if (path == "closed_form") {
        opt.path = XiPath::ClosedForm;
    } else {
        throw InputError("config: path must be 'generic' or 'closed_form'");
    }
    return opt;
}

inline json point_summary(const Instance& inst) {
    json j{{"p_star", inst.point.p_star},
           {"q", inst.point.decomposition.q},
           {"sigma_min", inst.point.decomposition.sigma.size() ? inst.point.decomposition.sigma(0) : 0.0},
           {"kind", to_string(inst.model.kind())}};
    if (inst.nod()) {
        AdjacencySpectrum s = adjacency_spectrum(*inst.graph);
        j["graph"] = {{"n", inst.graph->n()},
                      {"k", *inst.graph->degree()},
                      {"lambda2", s.lambda2},
                      {"lambda_min", s.lambda_min},
                      {"lambda_prime", s.lambda_prime}};
        j["d"] = inst.d;
    }
    return j;
}

/// Certificate for the given ball: closed form for consensus instances unless
/// forced onto the sampled path.
inline BoundCertificate certify(const Instance& inst, const BallSpec& ball, const SamplingOptions& opt,
                                bool force_generic) {
    if (inst.nod() && !force_generic) {
        BoundCertificate c = nod_certificate(*inst.graph, inst.d, ball);
        double sampled = estimate_L_perp(inst.model, inst.point, ball.r_par, ball.r_perp, opt);
        if (auto w = nod_l_perp_crosscheck(*inst.graph, ball.r_par, sampled)) c.warnings.push_back(*w);
        return c;
    }
    BoundCertificate c = check_radii(inst.model, inst.point, ball, opt);
    if (inst.nod()) {
        if (auto w = nod_l_perp_crosscheck(*inst.graph, ball.r_par, c.L_perp)) c.warnings.push_back(*w);
    }
    return c;
}

inline int cmd_spectrum(const std::string& edge_list, std::ostream& out) {
    Graph g = edge_list_graph(read_edge_list(edge_list));
    const VectorXd& s = g.spectrum();
    double l1 = s(0), l2 = s.size() > 1 ? s(1) : s(0), ln = s(s.size() - 1);
    out << "n,k,connected,lambda1,lambda2,lambda_n,lambda_prime\n";
    out << g.n() << ',' << (g.regular() ? std::to_string(*g.degree()) : std::string("irregular")) << ','
        << (g.connected() ? 1 : 0) << ',' << fmt_double(l1) << ',' << fmt_double(l2) << ',' << fmt_double(ln) << ','
        << fmt_double(std::max(std::abs(l2), std::abs(ln))) << '\n';
    return kOk;
}

inline int cmd_bound(const std::string& config, std::ostream& out, std::ostream& err) {
    json cfg = read_json_file(config);
    Instance inst = instance_from_config(cfg, fs::path(config).parent_path());
    SamplingOptions opt = sampling_from_config(cfg);
    const bool force_generic = get_or<bool>(cfg, "force_generic", false);
    const bool analytic = inst.nod() && !force_generic;
    Provenance prov{model_hash(inst.model), opt.seed, opt.budget};

    json result{{"command", "bound"}, {"singular_point", point_summary(inst)}};
    BoundCertificate cert;
    if (cfg.contains("radii")) {
        const json& r = cfg.at("radii");
        BallSpec ball{r.at("r_par").get<double>(), r.at("r_perp").get<double>()};
        cert = certify(inst, ball, opt, force_generic);
    } else {
        double r_perp = get_or<double>(cfg, "r_perp", 1.0);
        if (analytic) {
            double bound = nod_bound(*inst.graph, inst.d);
            cert = certify(inst, BallSpec{bound, r_perp}, opt, false);
            result["r_par_bound"] = bound;
            result["r_par_bound_is_supremum"] = true;
        } else {
            RadiusSearch rs = maximize_R_parallel(inst.model, inst.point, r_perp, opt, get_or<double>(cfg, "tol", 1e-3));
            cert = rs.certificate;
            if (inst.nod()) {
                if (auto w = nod_l_perp_crosscheck(*inst.graph, rs.r_par, cert.L_perp)) cert.warnings.push_back(*w);
            }
            result["r_par_bound"] = rs.r_par;
            result["r_par_bound_is_supremum"] = false;
            result["checks"] = rs.checks;
        }
    }
    result["method"] = to_string(cert.method);
    result["certificate"] = certificate_to_json(cert, prov);
    out << result.dump(2) << '\n';

    err << "method: " << to_string(cert.method) << (analytic ? " (closed-form consensus quantities)" : " (sampled suprema)")
        << '\n';
    if (result.contains("r_par_bound")) err << "R_par bound: " << fmt_double(result["r_par_bound"].get<double>()) << '\n';
    err << "ball: R_par=" << fmt_double(cert.ball.r_par) << " R_perp=" << fmt_double(cert.ball.r_perp)
        << " margin=" << fmt_double(cert.margin) << (cert.feasible() ? " (feasible)" : " (not feasible)") << '\n';
    for (const auto& w : cert.warnings) err << "warning: " << w << '\n';
    return kOk;
}

inline int cmd_sweep(const std::string& config, const std::optional<std::string>& svg,
                     const std::optional<std::string>& records_path, const std::optional<std::string>& aggregate_path,
                     std::ostream& out, std::ostream& err) {
    json cfg = read_json_file(config);
    SweepConfig sc;
    sc.n_values = get_or<std::vector<int>>(cfg, "n_values", {});
    sc.k_values = get_or<std::vector<int>>(cfg, "k_values", {});
    sc.d = get_or<double>(cfg, "d", 1.0);
    sc.graphs_per_cell = get_or<int>(cfg, "graphs_per_cell", 100);
    sc.seed = get_or<std::uint64_t>(cfg, "seed", 0);
    SweepResult res = run_sweep(sc);
    for (const auto& s : res.skipped) err << "skipped " << s << '\n';

    std::string rec = records_csv(res.records), agg = aggregates_csv(res.aggregates);
    auto rp = records_path ? records_path : std::optional<std::string>(get_or<std::string>(cfg, "records_csv", ""));
    auto ap = aggregate_path ? aggregate_path : std::optional<std::string>(get_or<std::string>(cfg, "aggregate_csv", ""));
    if (rp && !rp->empty()) {
        write_text(*rp, rec);
    } else {
        out << rec;
    }
    if (ap && !ap->empty()) {
        write_text(*ap, agg);
    } else {
        if (!(rp && !rp->empty())) out << '\n';
        out << agg;
    }
    if (svg) write_text(*svg, sweep_svg(res.aggregates));
    err << res.records.size() << " graphs in " << res.aggregates.size() << " cells\n";
    return kOk;
}

inline int cmd_verify(const std::string& config, std::ostream& out, std::ostream& err) {
    json cfg = read_json_file(config);
    double fraction = get_or<double>(cfg, "ball_fraction", 0.5);
    if (!(fraction > 0.0) || !std::isfinite(fraction)) throw InputError("config: ball_fraction must be positive");
    Instance inst = instance_from_config(cfg, fs::path(config).parent_path());
    SamplingOptions opt = sampling_from_config(cfg);
    double r_perp = get_or<double>(cfg, "r_perp", 1.0);
    double r_par = 0.0;
    std::string method;
    if (inst.nod() && !get_or<bool>(cfg, "force_generic", false)) {
        r_par = nod_bound(*inst.graph, inst.d);
        method = "Analytic";
    } else {
        r_par = maximize_R_parallel(inst.model, inst.point, r_perp, opt, get_or<double>(cfg, "tol", 1e-3)).r_par;
        method = "Sampled";
    }
    BallSpec ball{fraction * r_par, fraction * r_perp};
    VerificationReport rep = verify_implicit_map(inst.model, inst.point, ball, get_or<int>(cfg, "grid", 11),
                                                 get_or<int>(cfg, "starts", 5), opt.seed);
    json result = report_to_json(rep);
    result["command"] = "verify";
    result["certified"] = {{"R_par", r_par}, {"R_perp", r_perp}, {"method", method}};
    result["ball_fraction"] = fraction;
    result["exploration"] = fraction > 1.0;
    result["singular_point"] = point_summary(inst);
    out << result.dump(2) << '\n';
    if (cfg.contains("samples_csv")) write_text(cfg.at("samples_csv").get<std::string>(), report_samples_csv(rep));
    err << "success fraction " << fmt_double(rep.success_fraction) << " over " << rep.grid_size
        << " grid points, uniqueness violations " << rep.uniqueness_violations
        << (fraction > 1.0 ? " (outside the certified ball: exploration only)" : "") << '\n';
    return kOk;
}

/// Grid of (R_par, R_perp) certificates; `frontier` marks the largest feasible
/// R_par in each R_perp column.
inline int cmd_frontier(const std::string& config, std::ostream& out, std::ostream& err) {
    json cfg = read_json_file(config);
    Instance inst = instance_from_config(cfg, fs::path(config).parent_path());
    SamplingOptions opt = sampling_from_config(cfg);
    const bool force_generic = get_or<bool>(cfg, "force_generic", false);
    auto axis = [&](const char* values, const char* max_key, const char* count_key) {
        if (cfg.contains(values)) return cfg.at(values).get<std::vector<double>>();
        double mx = get_or<double>(cfg, max_key, 1.0);
        int cnt = get_or<int>(cfg, count_key, 10);
        if (!(mx > 0.0) || cnt < 1) throw InputError(std::string("config: bad ") + max_key + "/" + count_key);
        std::vector<double> v;
        for (int i = 1; i <= cnt; ++i) v.push_back(mx * i / cnt);
        return v;
    };
    std::vector<double> rpar = axis("r_par_values", "r_par_max", "r_par_count");
    std::vector<double> rperp = axis("r_perp_values", "r_perp_max", "r_perp_count");

    struct Row {
        BoundCertificate c;
        bool frontier = false;
    };
    std::vector<Row> rows;
    for (double rq : rperp) {
        std::size_t first = rows.size();
        std::optional<std::size_t> best;
        for (double rp : rpar) {
            rows.push_back({certify(inst, BallSpec{rp, rq}, opt, force_generic), false});
            if (rows.back().c.feasible() && (!best || rows[*best].c.ball.r_par < rp)) best = rows.size() - 1;
        }
        if (best) rows[*best].frontier = true;
        (void)first;
    }
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "r_par,r_perp,M_par,M_perp,L_par,L_perp,margin,feasible,frontier,method\n";
    for (const auto& r : rows) {
        os << fmt_double(r.c.ball.r_par) << ',' << fmt_double(r.c.ball.r_perp) << ',' << fmt_double(r.c.M_par) << ','
           << fmt_double(r.c.M_perp) << ',' << fmt_double(r.c.L_par) << ',' << fmt_double(r.c.L_perp) << ','
           << fmt_double(r.c.margin) << ',' << int(r.c.feasible()) << ',' << int(r.frontier) << ','
           << to_string(r.c.method) << '\n';
    }
    if (cfg.contains("output")) {
        write_text(cfg.at("output").get<std::string>(), os.str());
    } else {
        out << os.str();
    }
    err << rows.size() << " certificates evaluated\n";
    return kOk;
}

/// Maps exceptions to the documented exit codes.
template <class Fn>
int run_guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
}

}  // namespace lsb::cli
