#pragma once

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsebench/ensembles.hpp"
#include "sparsebench/errors.hpp"
#include "sparsebench/experiments.hpp"
#include "sparsebench/guarantees.hpp"
#include "sparsebench/matrix.hpp"
#include "sparsebench/recovery.hpp"

namespace sparsebench {

// 17 significant digits: enough for binary doubles to round-trip through text.
inline std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- matrices: CSV, one row per line ---

inline std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += full_precision(m(i, j));
        }
        out += '\n';
    }
    return out;
}

inline Matrix matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("matrix csv: bad number '" + cell + "'");
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("matrix csv: no data rows");
    const std::size_t cols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != cols) throw std::runtime_error("matrix csv: ragged rows");
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
}

// --- signals: JSON ---

inline nlohmann::json signal_to_json(const SparseSignal& s) {
    return nlohmann::json{{"n", s.n},
                          {"k", s.k()},
                          {"ensemble", to_string(s.ensemble)},
                          {"seed", s.seed},
                          {"support", s.support},
                          {"values", s.values}};
}

inline SparseSignal signal_from_json(const nlohmann::json& j) {
    SparseSignal s;
    s.n = j.at("n").get<std::size_t>();
    s.ensemble = ensemble_from_string(j.at("ensemble").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.support = j.at("support").get<std::vector<std::size_t>>();
    s.values = j.at("values").get<std::vector<double>>();
    if (s.support.size() != s.values.size())
        throw std::runtime_error("signal json: support/values length mismatch");
    return s;
}

// --- traces, tables, reports: JSON ---

inline nlohmann::json trace_to_json(const RecoveryTrace& t) {
    return nlohmann::json{{"selected", t.selected},
                          {"residual_norms", t.residual_norms},
                          {"estimate", t.estimate},
                          {"terminated_by", to_string(t.terminated_by)},
                          {"iterations", t.iterations()}};
}

inline nlohmann::json ric_table_to_json(const RicTable& t) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : t.deltas)
        entries.push_back({{"k", e.k}, {"delta", e.delta}, {"exactness", to_string(e.exactness)}});
    return nlohmann::json{{"matrix_id", t.matrix_id}, {"k_max", t.k_max}, {"deltas", entries}};
}

inline nlohmann::json report_to_json(const GuaranteeReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.per_iteration) {
        rows.push_back({{"l", row.l},
                        {"n_c", row.n_c},
                        {"n_f", row.n_f},
                        {"bound_rhs", row.bound_rhs},
                        {"ric_index", row.ric_index},
                        {"ric_used", row.ric_used},
                        {"online_condition_holds", row.online_condition_holds},
                        {"ric_exactness", to_string(row.ric_exactness)}});
    }
    return nlohmann::json{{"k", r.k},
                          {"per_iteration", rows},
                          {"wang_condition_holds", r.wang_condition_holds},
                          {"wang_exactness", to_string(r.wang_exactness)},
                          {"three_halves_preconditions_hold", r.three_halves_preconditions_hold}};
}

inline std::string report_to_text_table(const GuaranteeReport& r) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%4s %5s %5s %9s %12s %10s  %s\n", "l", "n_c", "n_f",
                  "delta_idx", "delta", "bound", "verdict");
    out += buf;
    for (const auto& row : r.per_iteration) {
        const char* verdict =
            row.online_condition_holds
                ? (row.ric_exactness == RicExactness::Exact ? "certified" : "inconclusive+")
                : "false";
        std::snprintf(buf, sizeof(buf), "%4zu %5zu %5zu %9zu %12.6f %10.6f  %s\n", row.l, row.n_c,
                      row.n_f, row.ric_index, row.ric_used, row.bound_rhs, verdict);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "wang: %s   three_halves_preconditions: %s\n",
                  r.wang_condition_holds ? "true" : "false",
                  r.three_halves_preconditions_hold ? "true" : "false");
    out += buf;
    return out;
}

// --- experiment tables: CSV with a config header comment ---

inline std::string cells_to_csv(const PhaseGridResult& grid, const PhaseGridConfig& cfg) {
    std::string out = "# phase grid: n=" + std::to_string(cfg.n) +
                      " trials=" + std::to_string(cfg.trials_per_cell) +
                      " ensemble=" + to_string(cfg.ensemble) +
                      " master_seed=" + std::to_string(cfg.master_seed) +
                      " normalized=" + (cfg.normalize_columns ? "1" : "0") + "\n";
    out += "lambda,rho,algorithm,ensemble,successes,trials\n";
    for (const auto& c : grid.cells) {
        out += full_precision(c.lambda);
        out += ',';
        out += full_precision(c.rho);
        out += ',';
        out += to_string(c.algorithm);
        out += ',';
        out += to_string(cfg.ensemble);
        out += ',';
        out += std::to_string(c.successes);
        out += ',';
        out += std::to_string(c.trials);
        out += '\n';
    }
    return out;
}

inline std::string curve_to_csv(const TransitionCurve& curve) {
    std::string out = "lambda,rho_50,converged,iterations,separable_midpoint,extrapolated\n";
    for (const auto& p : curve.points) {
        out += full_precision(p.lambda);
        out += ',';
        out += full_precision(p.rho_50);
        out += ',';
        out += std::to_string(p.converged ? 1 : 0);
        out += ',';
        out += std::to_string(p.iterations);
        out += ',';
        out += std::to_string(p.separable_midpoint ? 1 : 0);
        out += ',';
        out += std::to_string(p.extrapolated ? 1 : 0);
        out += '\n';
    }
    return out;
}

inline nlohmann::json curve_to_json(const TransitionCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve.points) {
        pts.push_back({{"lambda", p.lambda},
                       {"rho_50", p.rho_50},
                       {"converged", p.converged},
                       {"iterations", p.iterations},
                       {"separable_midpoint", p.separable_midpoint},
                       {"extrapolated", p.extrapolated}});
    }
    return nlohmann::json{{"algorithm", to_string(curve.algorithm)},
                          {"ensemble", to_string(curve.ensemble)},
                          {"points", pts}};
}

inline TransitionCurve curve_from_json(const nlohmann::json& j) {
    TransitionCurve curve;
    curve.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    curve.ensemble = ensemble_from_string(j.at("ensemble").get<std::string>());
    for (const auto& pj : j.at("points")) {
        TransitionPoint p;
        p.lambda = pj.at("lambda").get<double>();
        // non-finite rho_50 serializes as null
        p.rho_50 = pj.at("rho_50").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                             : pj.at("rho_50").get<double>();
        p.converged = pj.at("converged").get<bool>();
        p.iterations = pj.at("iterations").get<std::size_t>();
        p.separable_midpoint = pj.at("separable_midpoint").get<bool>();
        p.extrapolated = pj.at("extrapolated").get<bool>();
        curve.points.push_back(p);
    }
    return curve;
}

inline NfHistogram histogram_from_json(const nlohmann::json& j) {
    NfHistogram h;
    h.m = j.at("m").get<std::size_t>();
    h.k = j.at("k").get<std::size_t>();
    h.n = j.at("n").get<std::size_t>();
    h.trials = j.at("trials").get<std::size_t>();
    h.ompk_successes = j.at("ompk_successes").get<std::uint64_t>();
    h.ompe_successes = j.at("ompe_successes").get<std::uint64_t>();
    h.max_nf = j.at("max_nf").get<std::size_t>();
    for (const auto& [key, value] : j.at("counts").items())
        h.counts[static_cast<std::size_t>(std::stoull(key))] = value.get<std::uint64_t>();
    return h;
}

inline std::string histogram_to_csv(const NfHistogram& h, std::uint64_t master_seed,
                                    EnsembleKind ensemble) {
    std::string out = "# nf histogram: m=" + std::to_string(h.m) + " k=" + std::to_string(h.k) +
                      " n=" + std::to_string(h.n) + " trials=" + std::to_string(h.trials) +
                      " ensemble=" + to_string(ensemble) +
                      " master_seed=" + std::to_string(master_seed) + "\n";
    out += "n_f,count\n";
    for (const auto& [nf, count] : h.counts) {
        out += std::to_string(nf);
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

inline nlohmann::json histogram_to_json(const NfHistogram& h) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [nf, count] : h.counts) counts[std::to_string(nf)] = count;
    return nlohmann::json{{"m", h.m},
                          {"k", h.k},
                          {"n", h.n},
                          {"trials", h.trials},
                          {"ompk_successes", h.ompk_successes},
                          {"ompe_successes", h.ompe_successes},
                          {"counts", counts},
                          {"max_nf", h.max_nf}};
}

}  // namespace sparsebench
