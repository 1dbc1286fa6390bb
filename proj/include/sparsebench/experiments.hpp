#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sparsebench/ensembles.hpp"
#include "sparsebench/errors.hpp"
#include "sparsebench/guarantees.hpp"
#include "sparsebench/recovery.hpp"

namespace sparsebench {

enum class Algorithm { OmpK, OmpE, Sp, Bp };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::OmpK: return "omp_k";
        case Algorithm::OmpE: return "omp_e";
        case Algorithm::Sp: return "sp";
        case Algorithm::Bp: return "bp";
    }
    return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "omp_k") return Algorithm::OmpK;
    if (s == "omp_e") return Algorithm::OmpE;
    if (s == "sp") return Algorithm::Sp;
    if (s == "bp") return Algorithm::Bp;
    throw std::invalid_argument("unknown algorithm: " + s);
}

// Runs fn(0..count-1) exactly once each, on up to `threads` workers pulling
// from a shared counter. Callers write results into per-index slots, so the
// outcome never depends on which worker ran which index.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(threads, count);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct PhaseGridConfig {
    std::size_t n = 64;
    std::vector<double> lambda_values;
    std::vector<double> rho_values;
    std::size_t trials_per_cell = 50;
    std::vector<Algorithm> algorithms;
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    std::uint64_t master_seed = 0;
    bool normalize_columns = true;
    std::size_t threads = 1;

    std::size_t m_of(double lambda) const {
        return static_cast<std::size_t>(std::lround(lambda * static_cast<double>(n)));
    }
    std::size_t k_of(double rho, std::size_t m) const {
        const long k = std::lround(rho * static_cast<double>(m));
        return static_cast<std::size_t>(std::max(1L, k));
    }

    void validate() const {
        if (lambda_values.empty() || rho_values.empty())
            throw InvalidDimensions("phase grid: empty axis");
        if (trials_per_cell < 1) throw InvalidDimensions("phase grid: trials_per_cell < 1");
        for (double lambda : lambda_values) {
            const std::size_t m = m_of(lambda);
            if (m < 2) throw InvalidDimensions("phase grid: M < 2 at lambda grid point");
            for (double rho : rho_values) {
                if (k_of(rho, m) >= m)
                    throw InvalidDimensions("phase grid: K >= M at a grid point");
            }
        }
    }
};

struct CellResult {
    double lambda = 0.0;
    double rho = 0.0;
    Algorithm algorithm = Algorithm::OmpK;
    std::size_t successes = 0;
    std::size_t trials = 0;
};

struct PhaseGridResult {
    std::vector<CellResult> cells;  // cell-major, algorithms in config order
    std::size_t solver_errors = 0;
};

// One pass over the (lambda, rho) grid. Every trial's generator seed derives
// only from (master_seed, lambda index, rho index, trial index), and each
// cell owns a preallocated result slot, so the output is identical for any
// worker count or scheduling order. All configured algorithms see the same
// instances.
inline PhaseGridResult run_phase_grid(const PhaseGridConfig& cfg) {
    cfg.validate();
    const std::size_t nl = cfg.lambda_values.size();
    const std::size_t nr = cfg.rho_values.size();
    const std::size_t na = cfg.algorithms.size();
    PhaseGridResult result;
    result.cells.assign(nl * nr * na, CellResult{});
    std::atomic<std::size_t> errors{0};

    parallel_for(nl * nr, cfg.threads, [&](std::size_t cell) {
        const std::size_t li = cell / nr;
        const std::size_t rj = cell % nr;
        const double lambda = cfg.lambda_values[li];
        const double rho = cfg.rho_values[rj];
        const std::size_t m = cfg.m_of(lambda);
        const std::size_t k = cfg.k_of(rho, m);
        std::vector<std::size_t> wins(na, 0);
        for (std::size_t t = 0; t < cfg.trials_per_cell; ++t) {
            const std::uint64_t trial_seed = seed_hash(cfg.master_seed, li, rj, t);
            const ObservationMatrix phi =
                gen_gaussian_matrix(m, cfg.n, trial_seed, cfg.normalize_columns);
            const SparseSignal x = gen_sparse_signal(cfg.n, k, cfg.ensemble, trial_seed);
            const DenseVector y = matvec(phi.matrix, x.dense());
            for (std::size_t a = 0; a < na; ++a) {
                try {
                    DenseVector estimate;
                    switch (cfg.algorithms[a]) {
                        case Algorithm::OmpK:
                            estimate = omp(phi, y, TerminationPolicy::sparsity(k)).estimate;
                            break;
                        case Algorithm::OmpE:
                            estimate = omp(phi, y, TerminationPolicy::residue(1e-6, m)).estimate;
                            break;
                        case Algorithm::Sp:
                            if (2 * k > m) continue;  // outside SP's domain: failure
                            estimate = subspace_pursuit(phi, y, k).estimate;
                            break;
                        case Algorithm::Bp:
                            estimate = basis_pursuit(phi, y);
                            break;
                    }
                    if (is_exact_recovery(x, estimate)) ++wins[a];
                } catch (const std::exception&) {
                    errors.fetch_add(1);
                }
            }
        }
        for (std::size_t a = 0; a < na; ++a) {
            CellResult& slot = result.cells[(cell)*na + a];
            slot.lambda = lambda;
            slot.rho = rho;
            slot.algorithm = cfg.algorithms[a];
            slot.successes = wins[a];
            slot.trials = cfg.trials_per_cell;
        }
    });
    result.solver_errors = errors.load();
    return result;
}

struct RhoFitDiagnostics {
    bool converged = false;
    std::size_t iterations = 0;
    bool separable_midpoint = false;
};

// Maximum-likelihood logistic fit of success probability against rho via
// Newton/IRLS on the aggregated binomial likelihood; the 50% crossing is
// -a/b. Perfect step data short-circuits to the flagged midpoint rule.
inline std::pair<double, RhoFitDiagnostics> fit_rho_50(std::vector<CellResult> cells) {
    if (cells.size() < 3) throw DegenerateData("fit_rho_50: need at least 3 rho values");
    std::sort(cells.begin(), cells.end(),
              [](const CellResult& a, const CellResult& b) { return a.rho < b.rho; });

    bool any_mixed = false;
    std::size_t total_s = 0, total_t = 0;
    for (const auto& c : cells) {
        if (c.successes != 0 && c.successes != c.trials) any_mixed = true;
        total_s += c.successes;
        total_t += c.trials;
    }
    if (total_s == 0 || total_s == total_t)
        throw DegenerateData("fit_rho_50: responses all on one side");

    if (!any_mixed) {
        // Pure step: find the boundary; requires monotone all-success then
        // all-failure to qualify for the midpoint rule.
        std::size_t last_success = cells.size(), first_failure = cells.size();
        bool monotone = true;
        bool seen_failure = false;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].successes == cells[i].trials) {
                if (seen_failure) monotone = false;
                last_success = i;
            } else {
                if (!seen_failure) first_failure = i;
                seen_failure = true;
            }
        }
        if (monotone && last_success < cells.size() && first_failure < cells.size()) {
            RhoFitDiagnostics d;
            d.separable_midpoint = true;
            return {(cells[last_success].rho + cells[first_failure].rho) / 2.0, d};
        }
    }

    double a = 0.0, b = 0.0;
    RhoFitDiagnostics d;
    for (std::size_t iter = 1; iter <= 100; ++iter) {
        double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
        for (const auto& c : cells) {
            const double eta = a + b * c.rho;
            const double p = 1.0 / (1.0 + std::exp(-eta));
            const double t = static_cast<double>(c.trials);
            const double s = static_cast<double>(c.successes);
            const double w = t * p * (1.0 - p);
            g0 += s - t * p;
            g1 += (s - t * p) * c.rho;
            h00 += w;
            h01 += w * c.rho;
            h11 += w * c.rho * c.rho;
        }
        const double det = h00 * h11 - h01 * h01;
        if (!(std::fabs(det) > 1e-30))
            throw DegenerateData("fit_rho_50: singular information matrix");
        const double da = (h11 * g0 - h01 * g1) / det;
        const double db = (h00 * g1 - h01 * g0) / det;
        a += da;
        b += db;
        d.iterations = iter;
        if (std::max(std::fabs(da), std::fabs(db)) < 1e-8) {
            d.converged = true;
            break;
        }
    }
    if (std::fabs(b) < 1e-9 || !std::isfinite(a / b))
        throw DegenerateData("fit_rho_50: flat response curve");
    if (!d.converged && std::fabs(b) > 1e3) {
        // Quasi-separation: the slope is running away; fall back to the
        // midpoint between the extreme mixed responses.
        double lo = cells.front().rho, hi = cells.back().rho;
        for (const auto& c : cells) {
            if (c.successes * 2 >= c.trials) lo = std::max(lo, c.rho);
        }
        for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
            if (it->successes * 2 < it->trials) hi = std::min(hi, it->rho);
        }
        RhoFitDiagnostics fd;
        fd.separable_midpoint = true;
        fd.iterations = d.iterations;
        return {(lo + hi) / 2.0, fd};
    }
    return {-a / b, d};
}

struct TransitionPoint {
    double lambda = 0.0;
    double rho_50 = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    bool separable_midpoint = false;
    bool extrapolated = false;
};

struct TransitionCurve {
    Algorithm algorithm = Algorithm::OmpK;
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    std::vector<TransitionPoint> points;
};

inline TransitionCurve fit_transition_curve(const PhaseGridResult& grid,
                                            const PhaseGridConfig& cfg, Algorithm alg) {
    TransitionCurve curve;
    curve.algorithm = alg;
    curve.ensemble = cfg.ensemble;
    const double rho_min = *std::min_element(cfg.rho_values.begin(), cfg.rho_values.end());
    const double rho_max = *std::max_element(cfg.rho_values.begin(), cfg.rho_values.end());
    for (std::size_t li = 0; li < cfg.lambda_values.size(); ++li) {
        std::vector<CellResult> slice;
        for (const auto& c : grid.cells) {
            if (c.algorithm == alg && c.lambda == cfg.lambda_values[li]) slice.push_back(c);
        }
        TransitionPoint pt;
        pt.lambda = cfg.lambda_values[li];
        try {
            const auto [rho, diag] = fit_rho_50(std::move(slice));
            pt.rho_50 = rho;
            pt.converged = diag.converged;
            pt.iterations = diag.iterations;
            pt.separable_midpoint = diag.separable_midpoint;
            pt.extrapolated = rho < rho_min || rho > rho_max;
        } catch (const DegenerateData&) {
            // column is all-success or all-failure: no crossing on this grid
            pt.rho_50 = std::numeric_limits<double>::quiet_NaN();
            pt.converged = false;
        }
        curve.points.push_back(pt);
    }
    return curve;
}

struct NfHistogram {
    std::size_t m = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t ompk_successes = 0;
    std::size_t ompe_successes = 0;
    std::map<std::size_t, std::size_t> counts;  // n_f -> frequency, successes only
    std::size_t max_nf = 0;
};

// Residue-terminated pursuit at a fixed problem size: count how many extra
// iterations each recovered instance needed. Success here means the
// reconstruction hits machine scale (|x - x_est| <= 1e-2 absolute), which is
// what a residue threshold of 1e-6 delivers on recovered supports.
inline NfHistogram run_nf_histogram(std::size_t m, std::size_t k, std::size_t n,
                                    std::size_t trials, EnsembleKind ensemble,
                                    std::uint64_t seed, std::size_t threads = 1) {
    if (!(k < m && m < n)) throw InvalidDimensions("run_nf_histogram: need k < m < n");
    NfHistogram h;
    h.m = m;
    h.k = k;
    h.n = n;
    h.trials = trials;

    struct TrialOutcome {
        bool ompe_ok = false;
        bool ompk_ok = false;
        std::size_t nf = 0;
    };
    std::vector<TrialOutcome> outcomes(trials);

    const auto absolute_success = [](const SparseSignal& x, const DenseVector& est) {
        const DenseVector xd = x.dense();
        double err = 0.0;
        for (std::size_t i = 0; i < xd.size(); ++i) {
            const double dd = xd[i] - est[i];
            err += dd * dd;
        }
        return std::sqrt(err) <= 1e-2;
    };

    parallel_for(trials, threads, [&](std::size_t t) {
        const std::uint64_t trial_seed = seed_hash(seed, 0x6866, t);
        const ObservationMatrix phi = gen_gaussian_matrix(m, n, trial_seed, true);
        const SparseSignal x = gen_sparse_signal(n, k, ensemble, trial_seed);
        const DenseVector y = matvec(phi.matrix, x.dense());
        TrialOutcome& out = outcomes[t];
        try {
            const RecoveryTrace te = omp(phi, y, TerminationPolicy::residue(1e-6, m));
            if (absolute_success(x, te.estimate)) {
                out.ompe_ok = true;
                out.nf = diagnose(te, x).n_f;
            }
        } catch (const std::exception&) {
        }
        try {
            const RecoveryTrace tk = omp(phi, y, TerminationPolicy::sparsity(k));
            out.ompk_ok = absolute_success(x, tk.estimate);
        } catch (const std::exception&) {
        }
    });

    for (const auto& out : outcomes) {
        if (out.ompk_ok) ++h.ompk_successes;
        if (out.ompe_ok) {
            ++h.ompe_successes;
            ++h.counts[out.nf];
            h.max_nf = std::max(h.max_nf, out.nf);
        }
    }
    return h;
}

struct GuaranteeSweepConfig {
    std::size_t m = 9;
    std::size_t n = 18;
    std::size_t k = 3;
    std::size_t instances = 10;
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    std::uint64_t master_seed = 0;
    std::uint64_t ric_budget = 2000000;
};

struct GuaranteeSweepEntry {
    std::uint64_t instance_seed = 0;
    RecoveryTrace trace;
    SparseSignal truth;
    GuaranteeReport report;
};

// Certification harness over small random instances: run the residue-
// terminated pursuit, compute the exact isometry constants the replay needs
// (orders K+1 and K+n_f+1 for every visited state), and report per-iteration
// verdicts.
inline std::vector<GuaranteeSweepEntry> guarantee_sweep(const GuaranteeSweepConfig& cfg) {
    std::vector<GuaranteeSweepEntry> out;
    out.reserve(cfg.instances);
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        GuaranteeSweepEntry e;
        e.instance_seed = seed_hash(cfg.master_seed, 0x6773, i);
        const ObservationMatrix phi = gen_gaussian_matrix(cfg.m, cfg.n, e.instance_seed, true);
        e.truth = gen_sparse_signal(cfg.n, cfg.k, cfg.ensemble, e.instance_seed);
        const DenseVector y = matvec(phi.matrix, e.truth.dense());
        e.trace = omp(phi, y, TerminationPolicy::residue(1e-6, cfg.m));
        const SupportDiagnostics diag = diagnose(e.trace, e.truth);
        std::vector<std::size_t> orders{cfg.k + 1};
        for (const auto& [nc, nf] : diag.per_iteration) orders.push_back(cfg.k + nf + 1);
        const RicTable table = build_ric_table(phi, orders, cfg.ric_budget);
        e.report = certify_trace(e.trace, e.truth, table);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace sparsebench
