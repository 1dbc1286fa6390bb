#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsebench/io.hpp"
#include "sparsebench/sparsebench.hpp"
#include "sparsebench/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparsebench;

namespace {

// printed by the top-level handler when a budget error carries a follow-up
std::string g_budget_hint;

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_output(const std::string& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    write_text_file(join_path(dir, name), content);
}

void write_resolved_config(const std::string& dir, const json& cfg) {
    write_output(dir, "resolved_config.json", cfg.dump(2) + "\n");
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
}

// flags beat config-file values; config beats built-in defaults
template <typename T>
void merge_value(const CLI::App& sub, const json& cfg, const std::string& flag,
                 const std::string& key, T& value) {
    if (sub.count(flag) == 0 && cfg.contains(key)) {
        try {
            value = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw std::runtime_error("config field '" + key + "': " + e.what());
        }
    }
}

std::uint64_t resolve_seed(const CLI::App& sub, const json& cfg, std::uint64_t flag_seed) {
    if (sub.count("--seed") > 0) return flag_seed;
    if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
    if (const char* env = std::getenv("SPARSEBENCH_SEED")) {
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0')
            throw std::invalid_argument(std::string("SPARSEBENCH_SEED is not an unsigned integer: ") + env);
        return v;
    }
    return 1;
}

std::size_t default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

Matrix load_matrix_file(const std::string& path) {
    try {
        return matrix_from_csv(read_text_file(path));
    } catch (const std::exception& e) {
        throw std::runtime_error("matrix file " + path + ": " + e.what());
    }
}

SparseSignal load_signal_file(const std::string& path) {
    try {
        return signal_from_json(json::parse(read_text_file(path)));
    } catch (const std::exception& e) {
        throw std::runtime_error("signal file " + path + ": " + e.what());
    }
}

ObservationMatrix wrap_matrix(Matrix m) {
    ObservationMatrix om;
    bool normalized = true;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (std::abs(m.column_norm(j) - 1.0) > 1e-9) {
            normalized = false;
            break;
        }
    }
    om.matrix = std::move(m);
    om.column_normalized = normalized;
    om.seed = 0;
    return om;
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<Algorithm> out;
    out.reserve(names.size());
    for (const auto& s : names) out.push_back(algorithm_from_string(s));
    return out;
}

// ---------------------------------------------------------------- gen-matrix

struct GenMatrixParams {
    std::size_t m = 8;
    std::size_t n = 16;
    std::uint64_t seed = 0;
    bool normalize = true;
    std::string config;
    std::string out = "out";
};

void run_gen_matrix(const CLI::App& sub, GenMatrixParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--m", "m", p.m);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--normalize", "normalize", p.normalize);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);

    const ObservationMatrix om = gen_gaussian_matrix(p.m, p.n, p.seed, p.normalize);
    write_output(p.out, "matrix.csv", matrix_to_csv(om.matrix));
    write_resolved_config(p.out, json{{"subcommand", "gen-matrix"},
                                      {"m", p.m},
                                      {"n", p.n},
                                      {"seed", p.seed},
                                      {"normalize", p.normalize},
                                      {"out", p.out}});
    std::cout << "wrote " << join_path(p.out, "matrix.csv") << " (" << p.m << "x" << p.n
              << (p.normalize ? ", unit-norm columns" : "") << ", seed " << p.seed << ")\n";
}

// ---------------------------------------------------------------- gen-signal

struct GenSignalParams {
    std::size_t n = 16;
    std::size_t k = 3;
    std::string ensemble = "gaussian";
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "out";
};

void run_gen_signal(const CLI::App& sub, GenSignalParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--k", "k", p.k);
    merge_value(sub, cfg, "--ensemble", "ensemble", p.ensemble);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);

    const SparseSignal x = gen_sparse_signal(p.n, p.k, ensemble_from_string(p.ensemble), p.seed);
    write_output(p.out, "signal.json", signal_to_json(x).dump(2) + "\n");
    write_resolved_config(p.out, json{{"subcommand", "gen-signal"},
                                      {"n", p.n},
                                      {"k", p.k},
                                      {"ensemble", p.ensemble},
                                      {"seed", p.seed},
                                      {"out", p.out}});
    std::cout << "wrote " << join_path(p.out, "signal.json") << " (n " << p.n << ", k " << p.k
              << ", " << p.ensemble << ", seed " << p.seed << ")\n";
}

// ------------------------------------------------------------------- recover

struct RecoverParams {
    std::string matrix_file;
    std::string signal_file;
    std::size_t m = 20;
    std::size_t n = 40;
    std::size_t k = 3;
    std::string ensemble = "gaussian";
    bool normalize = true;
    std::string algorithm = "omp_k";
    std::size_t sparsity = 0;  // 0: use the signal's own k
    double epsilon = 1e-6;
    std::size_t max_iterations = 0;  // 0: number of rows
    std::uint64_t seed = 0;
    std::string config;
    std::string out = "out";
};

void run_recover(const CLI::App& sub, RecoverParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--matrix", "matrix", p.matrix_file);
    merge_value(sub, cfg, "--signal", "signal", p.signal_file);
    merge_value(sub, cfg, "--m", "m", p.m);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--k", "k", p.k);
    merge_value(sub, cfg, "--ensemble", "ensemble", p.ensemble);
    merge_value(sub, cfg, "--normalize", "normalize", p.normalize);
    merge_value(sub, cfg, "--algorithm", "algorithm", p.algorithm);
    merge_value(sub, cfg, "--sparsity", "sparsity", p.sparsity);
    merge_value(sub, cfg, "--epsilon", "epsilon", p.epsilon);
    merge_value(sub, cfg, "--max-iterations", "max_iterations", p.max_iterations);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);

    const ObservationMatrix om = p.matrix_file.empty()
                                     ? gen_gaussian_matrix(p.m, p.n, p.seed, p.normalize)
                                     : wrap_matrix(load_matrix_file(p.matrix_file));
    const SparseSignal x = p.signal_file.empty()
                               ? gen_sparse_signal(om.n(), p.k, ensemble_from_string(p.ensemble), p.seed)
                               : load_signal_file(p.signal_file);
    if (x.n != om.n())
        throw std::invalid_argument("signal length " + std::to_string(x.n) +
                                    " does not match matrix columns " + std::to_string(om.n()));

    const DenseVector y = matvec(om.matrix, x.dense());
    const Algorithm alg = algorithm_from_string(p.algorithm);
    const std::size_t k_run = p.sparsity > 0 ? p.sparsity : x.k();
    const std::size_t max_it = p.max_iterations > 0 ? p.max_iterations : om.m();

    RecoveryTrace trace;
    switch (alg) {
        case Algorithm::OmpK:
            trace = omp(om, y, TerminationPolicy::sparsity(k_run));
            break;
        case Algorithm::OmpE:
            trace = omp(om, y, TerminationPolicy::residue(p.epsilon, max_it));
            break;
        case Algorithm::Sp:
            trace = subspace_pursuit(om, y, k_run);
            break;
        case Algorithm::Bp: {
            trace.estimate = basis_pursuit(om, y);
            DenseVector r = y;
            const DenseVector yhat = matvec(om.matrix, trace.estimate);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= yhat[i];
            trace.residual_norms = {norm2(y), norm2(r)};
            trace.terminated_by = Terminator::ResidueBelowEpsilon;
            break;
        }
    }

    write_output(p.out, "trace.json", trace_to_json(trace).dump(2) + "\n");
    write_resolved_config(p.out, json{{"subcommand", "recover"},
                                      {"matrix", p.matrix_file},
                                      {"signal", p.signal_file},
                                      {"m", p.m},
                                      {"n", p.n},
                                      {"k", p.k},
                                      {"ensemble", p.ensemble},
                                      {"normalize", p.normalize},
                                      {"algorithm", p.algorithm},
                                      {"sparsity", p.sparsity},
                                      {"epsilon", p.epsilon},
                                      {"max_iterations", p.max_iterations},
                                      {"seed", p.seed},
                                      {"out", p.out}});

    std::cout << "algorithm: " << to_string(alg) << "\n"
              << "iterations: " << trace.iterations() << "\n"
              << "terminated_by: " << to_string(trace.terminated_by) << "\n"
              << "final_residual: " << full_precision(trace.residual_norms.back()) << "\n"
              << "exact_recovery: " << (is_exact_recovery(x, trace.estimate) ? "true" : "false")
              << "\n"
              << "wrote " << join_path(p.out, "trace.json") << "\n";
}

// ----------------------------------------------------------------------- ric

struct RicParams {
    std::string matrix_file;
    std::size_t k = 3;
    std::string mode = "exact";
    std::size_t samples = 20000;
    std::uint64_t mc_seed = 1;
    std::uint64_t budget = 2000000;
    std::string config;
    std::string out = "out";
};

void run_ric(const CLI::App& sub, RicParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--matrix", "matrix", p.matrix_file);
    merge_value(sub, cfg, "--k", "k", p.k);
    merge_value(sub, cfg, "--mode", "mode", p.mode);
    merge_value(sub, cfg, "--samples", "samples", p.samples);
    merge_value(sub, cfg, "--mc-seed", "mc_seed", p.mc_seed);
    merge_value(sub, cfg, "--budget", "budget", p.budget);
    merge_value(sub, cfg, "--out", "out", p.out);

    if (p.matrix_file.empty()) throw std::invalid_argument("ric: --matrix is required");
    if (p.mode != "exact" && p.mode != "mc")
        throw std::invalid_argument("ric: --mode must be 'exact' or 'mc', got '" + p.mode + "'");

    const ObservationMatrix om = wrap_matrix(load_matrix_file(p.matrix_file));
    RicTable table;
    table.matrix_id = p.matrix_file;
    table.k_max = p.k;
    for (std::size_t kk = 1; kk <= p.k; ++kk) {
        if (p.mode == "exact") {
            g_budget_hint = "hint: sparsebench ric --matrix " + p.matrix_file + " --k " +
                            std::to_string(p.k) + " --mode mc --samples " +
                            std::to_string(p.samples) + " --mc-seed " + std::to_string(p.mc_seed);
            table.put({kk, exact_ric(om, kk, p.budget), RicExactness::Exact});
            g_budget_hint.clear();
        } else {
            const double delta = monte_carlo_ric(om, kk, p.samples, p.mc_seed);
            const bool covers = binomial(om.n(), kk) <= p.samples;
            table.put({kk, delta, covers ? RicExactness::Exact : RicExactness::LowerBound});
        }
    }

    write_output(p.out, "ric.json", ric_table_to_json(table).dump(2) + "\n");
    write_resolved_config(p.out, json{{"subcommand", "ric"},
                                      {"matrix", p.matrix_file},
                                      {"k", p.k},
                                      {"mode", p.mode},
                                      {"samples", p.samples},
                                      {"mc_seed", p.mc_seed},
                                      {"budget", p.budget},
                                      {"out", p.out}});

    std::printf("%4s %12s  %s\n", "k", "delta", "exactness");
    for (const auto& e : table.deltas)
        std::printf("%4zu %12.8f  %s\n", e.k, e.delta, to_string(e.exactness));
    std::cout << "wrote " << join_path(p.out, "ric.json") << "\n";
}

// ------------------------------------------------------------------- certify

struct CertifyParams {
    std::size_t m = 9;
    std::size_t n = 18;
    std::size_t k = 3;
    std::size_t instances = 1;
    std::string ensemble = "gaussian";
    std::uint64_t seed = 0;
    std::uint64_t budget = 2000000;
    std::string config;
    std::string out = "out";
};

void run_certify(const CLI::App& sub, CertifyParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--m", "m", p.m);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--k", "k", p.k);
    merge_value(sub, cfg, "--instances", "instances", p.instances);
    merge_value(sub, cfg, "--ensemble", "ensemble", p.ensemble);
    merge_value(sub, cfg, "--budget", "budget", p.budget);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);

    GuaranteeSweepConfig sweep;
    sweep.m = p.m;
    sweep.n = p.n;
    sweep.k = p.k;
    sweep.instances = p.instances;
    sweep.ensemble = ensemble_from_string(p.ensemble);
    sweep.master_seed = p.seed;
    sweep.ric_budget = p.budget;

    g_budget_hint = "hint: lower --k/--n or raise --budget";
    const std::vector<GuaranteeSweepEntry> entries = guarantee_sweep(sweep);
    g_budget_hint.clear();

    json out_entries = json::array();
    for (const auto& e : entries) {
        out_entries.push_back({{"instance_seed", e.instance_seed},
                               {"trace", trace_to_json(e.trace)},
                               {"truth", signal_to_json(e.truth)},
                               {"report", report_to_json(e.report)}});
        std::cout << "instance seed " << e.instance_seed << " (" << to_string(e.trace.terminated_by)
                  << " after " << e.trace.iterations() << " iterations)\n"
                  << report_to_text_table(e.report) << "\n";
    }
    write_output(p.out, "certify.json", json(out_entries).dump(2) + "\n");
    write_resolved_config(p.out, json{{"subcommand", "certify"},
                                      {"m", p.m},
                                      {"n", p.n},
                                      {"k", p.k},
                                      {"instances", p.instances},
                                      {"ensemble", p.ensemble},
                                      {"seed", p.seed},
                                      {"budget", p.budget},
                                      {"out", p.out}});
    std::cout << "wrote " << join_path(p.out, "certify.json") << "\n";
}

// --------------------------------------------------------------------- phase

struct PhaseParams {
    std::size_t n = 64;
    std::size_t trials = 50;
    std::vector<double> lambdas;
    std::vector<double> rhos;
    std::vector<std::string> algorithms;
    std::vector<std::string> ensembles;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    bool normalize = true;
    std::string config;
    std::string out = "out";
};

void run_phase(const CLI::App& sub, PhaseParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--trials", "trials", p.trials);
    merge_value(sub, cfg, "--lambdas", "lambdas", p.lambdas);
    merge_value(sub, cfg, "--rhos", "rhos", p.rhos);
    merge_value(sub, cfg, "--algorithms", "algorithms", p.algorithms);
    merge_value(sub, cfg, "--ensembles", "ensembles", p.ensembles);
    merge_value(sub, cfg, "--threads", "threads", p.threads);
    merge_value(sub, cfg, "--normalize", "normalize", p.normalize);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);

    if (p.lambdas.empty())
        for (int i = 1; i <= 9; ++i) p.lambdas.push_back(0.1 * i);
    if (p.rhos.empty())
        for (int i = 1; i <= 30; ++i) p.rhos.push_back(0.03 * i);
    if (p.algorithms.empty()) p.algorithms = {"omp_k", "omp_e", "sp", "bp"};
    if (p.ensembles.empty()) p.ensembles = {"gaussian", "uniform", "cars"};
    if (p.threads == 0) p.threads = default_threads();

    write_resolved_config(p.out, json{{"subcommand", "phase"},
                                      {"n", p.n},
                                      {"trials", p.trials},
                                      {"lambdas", p.lambdas},
                                      {"rhos", p.rhos},
                                      {"algorithms", p.algorithms},
                                      {"ensembles", p.ensembles},
                                      {"seed", p.seed},
                                      {"threads", p.threads},
                                      {"normalize", p.normalize},
                                      {"out", p.out}});

    std::vector<svg::PanelData> panels;
    for (const auto& ens_name : p.ensembles) {
        PhaseGridConfig gc;
        gc.n = p.n;
        gc.lambda_values = p.lambdas;
        gc.rho_values = p.rhos;
        gc.trials_per_cell = p.trials;
        gc.algorithms = parse_algorithms(p.algorithms);
        gc.ensemble = ensemble_from_string(ens_name);
        gc.master_seed = p.seed;
        gc.normalize_columns = p.normalize;
        gc.threads = p.threads;
        gc.validate();

        const PhaseGridResult grid = run_phase_grid(gc);
        write_output(p.out, "cells_" + ens_name + ".csv", cells_to_csv(grid, gc));
        std::cout << "ensemble " << ens_name << ": " << grid.cells.size() << " cells, "
                  << grid.solver_errors << " solver errors\n";

        svg::PanelData panel;
        panel.title = ens_name;
        for (const Algorithm alg : gc.algorithms) {
            const TransitionCurve curve = fit_transition_curve(grid, gc, alg);
            const std::string stem = "curve_" + ens_name + "_" + to_string(alg);
            write_output(p.out, stem + ".csv", curve_to_csv(curve));
            write_output(p.out, stem + ".json", curve_to_json(curve).dump(2) + "\n");
            std::cout << "  " << to_string(alg) << " rho_50:";
            for (const auto& pt : curve.points) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), " %.3f", pt.rho_50);
                std::cout << buf;
            }
            std::cout << "\n";
            panel.curves.push_back(curve);
        }
        panels.push_back(std::move(panel));
    }
    write_output(p.out, "phase.svg", svg::phase_panels(panels));
    std::cout << "wrote " << join_path(p.out, "phase.svg") << "\n";
}

// ---------------------------------------------------------------------- hist

struct HistParams {
    std::size_t m = 125;
    std::size_t k = 40;
    std::size_t n = 250;
    std::size_t trials = 200;
    std::string ensemble = "gaussian";
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string config;
    std::string out = "out";
};

void run_hist(const CLI::App& sub, HistParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--m", "m", p.m);
    merge_value(sub, cfg, "--k", "k", p.k);
    merge_value(sub, cfg, "--n", "n", p.n);
    merge_value(sub, cfg, "--trials", "trials", p.trials);
    merge_value(sub, cfg, "--ensemble", "ensemble", p.ensemble);
    merge_value(sub, cfg, "--threads", "threads", p.threads);
    merge_value(sub, cfg, "--out", "out", p.out);
    p.seed = resolve_seed(sub, cfg, p.seed);
    if (p.threads == 0) p.threads = default_threads();

    const EnsembleKind ens = ensemble_from_string(p.ensemble);
    const NfHistogram h = run_nf_histogram(p.m, p.k, p.n, p.trials, ens, p.seed, p.threads);

    write_output(p.out, "hist.csv", histogram_to_csv(h, p.seed, ens));
    write_output(p.out, "hist.json", histogram_to_json(h).dump(2) + "\n");
    const std::string title = "m=" + std::to_string(p.m) + " k=" + std::to_string(p.k) +
                              " n=" + std::to_string(p.n) + " " + p.ensemble;
    write_output(p.out, "hist.svg", svg::histogram_chart(h, title));
    write_resolved_config(p.out, json{{"subcommand", "hist"},
                                      {"m", p.m},
                                      {"k", p.k},
                                      {"n", p.n},
                                      {"trials", p.trials},
                                      {"ensemble", p.ensemble},
                                      {"seed", p.seed},
                                      {"threads", p.threads},
                                      {"out", p.out}});

    std::cout << "trials: " << h.trials << "\n"
              << "sparsity_terminated_successes: " << h.ompk_successes << "\n"
              << "residue_terminated_successes: " << h.ompe_successes << "\n"
              << "max_false_indices: " << h.max_nf << "\n"
              << "wrote " << join_path(p.out, "hist.csv") << ", hist.json, hist.svg\n";
}

// ---------------------------------------------------------------------- plot

struct PlotParams {
    std::vector<std::string> curve_files;
    std::string hist_file;
    std::string config;
    std::string out = "out";
};

void run_plot(const CLI::App& sub, PlotParams& p) {
    const json cfg = load_config_file(p.config);
    merge_value(sub, cfg, "--curves", "curves", p.curve_files);
    merge_value(sub, cfg, "--hist", "hist", p.hist_file);
    merge_value(sub, cfg, "--out", "out", p.out);
    if (p.curve_files.empty() && p.hist_file.empty())
        throw std::invalid_argument("plot: need --curves and/or --hist inputs");

    write_resolved_config(p.out, json{{"subcommand", "plot"},
                                      {"curves", p.curve_files},
                                      {"hist", p.hist_file},
                                      {"out", p.out}});

    if (!p.curve_files.empty()) {
        // one panel per ensemble, in first-seen order
        std::vector<svg::PanelData> panels;
        for (const auto& path : p.curve_files) {
            TransitionCurve curve;
            try {
                curve = curve_from_json(json::parse(read_text_file(path)));
            } catch (const std::exception& e) {
                throw std::runtime_error("curve file " + path + ": " + e.what());
            }
            const std::string ens = to_string(curve.ensemble);
            auto it = std::find_if(panels.begin(), panels.end(),
                                   [&](const svg::PanelData& pd) { return pd.title == ens; });
            if (it == panels.end()) {
                panels.push_back({ens, {}});
                it = std::prev(panels.end());
            }
            it->curves.push_back(std::move(curve));
        }
        write_output(p.out, "phase.svg", svg::phase_panels(panels));
        std::cout << "wrote " << join_path(p.out, "phase.svg") << " (" << panels.size()
                  << " panels)\n";
    }
    if (!p.hist_file.empty()) {
        NfHistogram h;
        try {
            h = histogram_from_json(json::parse(read_text_file(p.hist_file)));
        } catch (const std::exception& e) {
            throw std::runtime_error("histogram file " + p.hist_file + ": " + e.what());
        }
        const std::string title = "m=" + std::to_string(h.m) + " k=" + std::to_string(h.k) +
                                  " n=" + std::to_string(h.n);
        write_output(p.out, "hist.svg", svg::histogram_chart(h, title));
        std::cout << "wrote " << join_path(p.out, "hist.svg") << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse recovery workbench: instance generation, greedy and convex pursuit, "
                 "isometry constants, per-iteration certificates, phase experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.1.0");

    GenMatrixParams gm;
    auto* sub_gm = app.add_subcommand("gen-matrix", "draw a random measurement matrix, write CSV");
    sub_gm->add_option("--m", gm.m, "rows (measurements)");
    sub_gm->add_option("--n", gm.n, "columns (signal length)");
    sub_gm->add_option("--seed", gm.seed, "generator seed");
    sub_gm->add_flag("--normalize,!--no-normalize", gm.normalize, "unit-norm columns (default on)");
    sub_gm->add_option("--config", gm.config, "JSON config file; flags override");
    sub_gm->add_option("--out", gm.out, "output directory");
    sub_gm->callback([&]() { run_gen_matrix(*sub_gm, gm); });

    GenSignalParams gs;
    auto* sub_gs = app.add_subcommand("gen-signal", "draw a sparse signal, write JSON");
    sub_gs->add_option("--n", gs.n, "signal length");
    sub_gs->add_option("--k", gs.k, "number of nonzeros");
    sub_gs->add_option("--ensemble", gs.ensemble, "gaussian | uniform | cars");
    sub_gs->add_option("--seed", gs.seed, "generator seed");
    sub_gs->add_option("--config", gs.config, "JSON config file; flags override");
    sub_gs->add_option("--out", gs.out, "output directory");
    sub_gs->callback([&]() { run_gen_signal(*sub_gs, gs); });

    RecoverParams rc;
    auto* sub_rc = app.add_subcommand("recover", "run one recovery, write the trace");
    sub_rc->add_option("--matrix", rc.matrix_file, "matrix CSV (omit to generate)");
    sub_rc->add_option("--signal", rc.signal_file, "signal JSON (omit to generate)");
    sub_rc->add_option("--m", rc.m, "rows when generating");
    sub_rc->add_option("--n", rc.n, "columns when generating");
    sub_rc->add_option("--k", rc.k, "nonzeros when generating");
    sub_rc->add_option("--ensemble", rc.ensemble, "nonzero ensemble when generating");
    sub_rc->add_flag("--normalize,!--no-normalize", rc.normalize, "unit-norm columns when generating");
    sub_rc->add_option("--algorithm", rc.algorithm, "omp_k | omp_e | sp | bp");
    sub_rc->add_option("--sparsity", rc.sparsity, "iteration/support budget (default: signal k)");
    sub_rc->add_option("--epsilon", rc.epsilon, "relative residue stop for omp_e");
    sub_rc->add_option("--max-iterations", rc.max_iterations, "omp_e cap (default: rows)");
    sub_rc->add_option("--seed", rc.seed, "instance seed when generating");
    sub_rc->add_option("--config", rc.config, "JSON config file; flags override");
    sub_rc->add_option("--out", rc.out, "output directory");
    sub_rc->callback([&]() { run_recover(*sub_rc, rc); });

    RicParams ric;
    auto* sub_ric = app.add_subcommand("ric", "restricted isometry constants of a matrix file");
    sub_ric->add_option("--matrix", ric.matrix_file, "matrix CSV");
    sub_ric->add_option("--k", ric.k, "compute orders 1..k");
    sub_ric->add_option("--mode", ric.mode, "exact | mc");
    sub_ric->add_option("--samples", ric.samples, "subset samples for mc mode");
    sub_ric->add_option("--mc-seed", ric.mc_seed, "sampling seed for mc mode");
    sub_ric->add_option("--budget", ric.budget, "max subsets for exact mode");
    sub_ric->add_option("--config", ric.config, "JSON config file; flags override");
    sub_ric->add_option("--out", ric.out, "output directory");
    sub_ric->callback([&]() { run_ric(*sub_ric, ric); });

    CertifyParams ct;
    auto* sub_ct = app.add_subcommand("certify", "per-iteration recovery certificates on random instances");
    sub_ct->add_option("--m", ct.m, "rows");
    sub_ct->add_option("--n", ct.n, "columns");
    sub_ct->add_option("--k", ct.k, "nonzeros");
    sub_ct->add_option("--instances", ct.instances, "number of random instances");
    sub_ct->add_option("--ensemble", ct.ensemble, "nonzero ensemble");
    sub_ct->add_option("--seed", ct.seed, "master seed");
    sub_ct->add_option("--budget", ct.budget, "max subsets for exact isometry constants");
    sub_ct->add_option("--config", ct.config, "JSON config file; flags override");
    sub_ct->add_option("--out", ct.out, "output directory");
    sub_ct->callback([&]() { run_certify(*sub_ct, ct); });

    PhaseParams ph;
    auto* sub_ph = app.add_subcommand("phase", "success-rate grid over (lambda, rho) with 50% crossings");
    sub_ph->add_option("--n", ph.n, "signal length");
    sub_ph->add_option("--trials", ph.trials, "trials per cell");
    sub_ph->add_option("--lambdas", ph.lambdas, "lambda grid values")->expected(-1);
    sub_ph->add_option("--rhos", ph.rhos, "rho grid values")->expected(-1);
    sub_ph->add_option("--algorithms", ph.algorithms, "subset of omp_k omp_e sp bp")->expected(-1);
    sub_ph->add_option("--ensembles", ph.ensembles, "subset of gaussian uniform cars")->expected(-1);
    sub_ph->add_option("--seed", ph.seed, "master seed");
    sub_ph->add_option("--threads", ph.threads, "worker count (0: auto); results identical for any value");
    sub_ph->add_flag("--normalize,!--no-normalize", ph.normalize, "unit-norm columns");
    sub_ph->add_option("--config", ph.config, "JSON config file; flags override");
    sub_ph->add_option("--out", ph.out, "output directory");
    sub_ph->callback([&]() { run_phase(*sub_ph, ph); });

    HistParams hs;
    auto* sub_hs = app.add_subcommand("hist", "extra-iteration histogram for residue-terminated pursuit");
    sub_hs->add_option("--m", hs.m, "rows");
    sub_hs->add_option("--k", hs.k, "nonzeros");
    sub_hs->add_option("--n", hs.n, "columns");
    sub_hs->add_option("--trials", hs.trials, "instances");
    sub_hs->add_option("--ensemble", hs.ensemble, "nonzero ensemble");
    sub_hs->add_option("--seed", hs.seed, "master seed");
    sub_hs->add_option("--threads", hs.threads, "worker count (0: auto); results identical for any value");
    sub_hs->add_option("--config", hs.config, "JSON config file; flags override");
    sub_hs->add_option("--out", hs.out, "output directory");
    sub_hs->callback([&]() { run_hist(*sub_hs, hs); });

    PlotParams pl;
    auto* sub_pl = app.add_subcommand("plot", "re-render SVG charts from saved JSON artifacts");
    sub_pl->add_option("--curves", pl.curve_files, "transition curve JSON files")->expected(-1);
    sub_pl->add_option("--hist", pl.hist_file, "histogram JSON file");
    sub_pl->add_option("--config", pl.config, "JSON config file; flags override");
    sub_pl->add_option("--out", pl.out, "output directory");
    sub_pl->callback([&]() { run_plot(*sub_pl, pl); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!g_budget_hint.empty()) std::cerr << g_budget_hint << "\n";
        return 3;
    } catch (const RankDeficient& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const NotConverged& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const Infeasible& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateData& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
