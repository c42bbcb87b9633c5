#pragma once

// File formats: edge lists, model JSON, certificate and verification JSON.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lsb/bounds.hpp"
#include "lsb/errors.hpp"
#include "lsb/network_model.hpp"
#include "lsb/oracle.hpp"
#include "lsb/regular_graph.hpp"

namespace lsb {

using nlohmann::json;

/// Locale-independent round-trip formatting of a double.
inline std::string fmt_double(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

struct WeightedEdge {
    int i = 0;
    int j = 0;
    double weight = 1.0;
};

struct EdgeList {
    int n = 0;
    std::vector<WeightedEdge> edges;
};

/// One "i j [weight]" per line, 0-indexed; blank lines and '#' comments are
/// skipped. The vertex count is one more than the largest index.
inline EdgeList parse_edge_list(std::istream& in, const std::string& source = "<input>") {
    EdgeList out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw InputError(source + ":" + std::to_string(lineno) + ": " + why + " in line '" + line + "'");
        };
        if (tok.size() < 2 || tok.size() > 3) fail("expected 'i j [weight]'");
        WeightedEdge e;
        auto parse_index = [&](const std::string& s) {
            std::size_t pos = 0;
            long v = 0;
            try {
                v = std::stol(s, &pos);
            } catch (const std::exception&) {
                fail("bad vertex index '" + s + "'");
            }
            if (pos != s.size() || v < 0 || v > 1000000) fail("bad vertex index '" + s + "'");
            return static_cast<int>(v);
        };
        e.i = parse_index(tok[0]);
        e.j = parse_index(tok[1]);
        if (tok.size() == 3) {
            std::istringstream ws(tok[2]);
            ws.imbue(std::locale::classic());
            if (!(ws >> e.weight) || !ws.eof() || !std::isfinite(e.weight)) fail("bad weight '" + tok[2] + "'");
        }
        out.n = std::max({out.n, e.i + 1, e.j + 1});
        out.edges.push_back(e);
    }
    if (out.edges.empty()) throw InputError(source + ": no edges");
    return out;
}

inline EdgeList read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open edge list '" + path + "'");
    return parse_edge_list(in, path);
}

/// Symmetric (undirected) adjacency matrix from an edge list.
inline MatrixXd edge_list_adjacency(const EdgeList& el) {
    MatrixXd A = MatrixXd::Zero(el.n, el.n);
    for (const auto& e : el.edges) {
        if (A(e.i, e.j) != 0.0) {
            throw InputError("duplicate edge " + std::to_string(e.i) + " " + std::to_string(e.j));
        }
        A(e.i, e.j) = e.weight;
        A(e.j, e.i) = e.weight;
    }
    return A;
}

inline Graph edge_list_graph(const EdgeList& el) {
    for (const auto& e : el.edges) {
        if (e.weight != 1.0) throw InputError("graph edges must have unit weight");
    }
    return Graph::from_adjacency(edge_list_adjacency(el));
}

inline std::string edge_list_text(const Graph& g) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < g.n(); ++i)
        for (Eigen::Index j = i + 1; j < g.n(); ++j)
            if (g.adjacency()(i, j) != 0.0) os << i << ' ' << j << '\n';
    return os.str();
}

inline json to_json_vector(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json to_json_matrix(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_vector(m.row(i).transpose()));
    return rows;
}

inline VectorXd vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + " must be an array of numbers");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError(what + "[" + std::to_string(i) + "] is not a number");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    MatrixXd m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        VectorXd row = vector_from_json(j[static_cast<std::size_t>(r)], what + " row " + std::to_string(r));
        if (r == 0) m.resize(rows, row.size());
        if (row.size() != m.cols()) throw InputError(what + ": ragged rows");
        m.row(r) = row.transpose();
    }
    return m;
}

/// {kind, A (rows), C, b, activation_label}
inline json model_to_json(const NetworkModel& m) {
    return json{{"kind", to_string(m.kind())},
                {"A", to_json_matrix(m.A())},
                {"C", to_json_vector(m.C())},
                {"b", to_json_vector(m.b())},
                {"activation_label", m.activation().label}};
}

inline NetworkModel model_from_json(const json& j) {
    if (!j.is_object()) throw InputError("model must be a JSON object");
    for (const char* key : {"kind", "A", "C", "b"}) {
        if (!j.contains(key)) throw InputError(std::string("model: missing '") + key + "'");
    }
    std::string label = j.value("activation_label", std::string("tanh"));
    return NetworkModel(model_kind_from_string(j.at("kind").get<std::string>()), matrix_from_json(j.at("A"), "A"),
                        vector_from_json(j.at("C"), "C"), vector_from_json(j.at("b"), "b"),
                        activation_by_label(label));
}

/// 64-bit FNV-1a of the canonical model JSON, as 16 hex digits.
inline std::string model_hash(const NetworkModel& m) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : model_to_json(m).dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct Provenance {
    std::string model_hash;
    std::uint64_t seed = 0;
    int budget = 0;
};

inline json certificate_to_json(const BoundCertificate& c, const Provenance& prov) {
    return json{{"M_par", c.M_par},
                {"M_perp", c.M_perp},
                {"L_par", c.L_par},
                {"L_perp", c.L_perp},
                {"ball", {{"R_par", c.ball.r_par}, {"R_perp", c.ball.r_perp}}},
                {"margin", c.margin},
                {"feasible", c.feasible()},
                {"method", to_string(c.method)},
                {"samples_used", c.samples_used},
                {"warnings", c.warnings},
                {"provenance", {{"model_hash", prov.model_hash}, {"seed", prov.seed}, {"budget", prov.budget}}}};
}

inline json report_to_json(const VerificationReport& r) {
    return json{{"ball", {{"R_par", r.ball.r_par}, {"R_perp", r.ball.r_perp}}},
                {"grid", r.grid},
                {"starts", r.starts},
                {"grid_size", r.grid_size},
                {"successes", r.successes},
                {"success_fraction", r.success_fraction},
                {"max_beta_deviation", r.max_beta_deviation},
                {"uniqueness_violations", r.uniqueness_violations},
                {"failed_starts", r.failed_starts},
                {"uniqueness_evidence", "multi-start agreement inside B_perp (evidence, not proof)"}};
}

/// One row per grid point: alpha components, p, converged, inside, deviation, violations.
inline std::string report_samples_csv(const VerificationReport& r) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    std::size_t q = r.samples.empty() ? 0 : static_cast<std::size_t>(r.samples.front().alpha.size());
    for (std::size_t i = 0; i < q; ++i) os << "alpha" << i << ',';
    os << "p,converged,inside,beta_deviation,violations,failed_starts\n";
    for (const auto& s : r.samples) {
        for (Eigen::Index i = 0; i < s.alpha.size(); ++i) os << fmt_double(s.alpha(i)) << ',';
        os << fmt_double(s.p) << ',' << int(s.converged) << ',' << int(s.inside) << ','
           << fmt_double(s.beta_deviation) << ',' << s.violations << ',' << s.failed_starts << '\n';
    }
    return os.str();
}

}  // namespace lsb
