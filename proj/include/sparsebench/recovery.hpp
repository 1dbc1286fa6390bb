#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <vector>

#include "sparsebench/ensembles.hpp"
#include "sparsebench/errors.hpp"
#include "sparsebench/linalg.hpp"
#include "sparsebench/lp.hpp"
#include "sparsebench/matrix.hpp"

namespace sparsebench {

struct TerminationPolicy {
    enum class Kind { SparsityK, Residue };
    Kind kind = Kind::SparsityK;
    std::size_t k = 0;
    double epsilon = 0.0;
    std::size_t max_iterations = 0;

    static TerminationPolicy sparsity(std::size_t k) {
        TerminationPolicy p;
        p.kind = Kind::SparsityK;
        p.k = k;
        return p;
    }
    static TerminationPolicy residue(double epsilon, std::size_t max_iterations) {
        TerminationPolicy p;
        p.kind = Kind::Residue;
        p.epsilon = epsilon;
        p.max_iterations = max_iterations;
        return p;
    }
};

enum class Terminator { SparsityReached, ResidueBelowEpsilon, MaxIterations };

inline const char* to_string(Terminator t) {
    switch (t) {
        case Terminator::SparsityReached: return "sparsity_reached";
        case Terminator::ResidueBelowEpsilon: return "residue_below_epsilon";
        case Terminator::MaxIterations: return "max_iterations";
    }
    return "?";
}

struct RecoveryTrace {
    std::vector<std::size_t> selected;
    std::vector<double> residual_norms;  // length = iterations + 1, starts at ||y||
    DenseVector estimate;
    Terminator terminated_by = Terminator::SparsityReached;

    std::size_t iterations() const { return selected.size(); }
};

// RankDeficient variant that keeps whatever the solver had built when the
// factorization collapsed.
struct RecoveryRankDeficient : RankDeficient {
    RecoveryTrace partial;
    RecoveryRankDeficient(const RankDeficient& base, RecoveryTrace trace)
        : RankDeficient(base.what(), base.rank), partial(std::move(trace)) {}
};

struct SupportDiagnostics {
    std::size_t n_c = 0;
    std::size_t n_f = 0;
    std::vector<std::pair<std::size_t, std::size_t>> per_iteration;
};

// Greedy pursuit: per iteration pick argmax_i |<phi_i, r>| (lowest index on
// ties), append the column, re-project, update the residual. Termination is
// pluggable: exactly k iterations, or residue <= epsilon*||y|| with an
// iteration cap.
inline RecoveryTrace omp(const ObservationMatrix& om, const DenseVector& y,
                         const TerminationPolicy& policy) {
    const Matrix& phi = om.matrix;
    const std::size_t m = phi.rows(), n = phi.cols();
    if (y.size() != m) throw DimensionMismatch("omp: y length != rows");
    const bool by_sparsity = policy.kind == TerminationPolicy::Kind::SparsityK;
    if (by_sparsity && (policy.k < 1 || policy.k > m))
        throw InvalidSparsity("omp: sparsity target outside [1, M]");
    if (!by_sparsity && policy.max_iterations < 1)
        throw InvalidSparsity("omp: max_iterations must be >= 1");

    const std::size_t max_iter = by_sparsity ? policy.k : policy.max_iterations;
    const double ynorm = norm2(y);

    RecoveryTrace trace;
    trace.residual_norms.push_back(ynorm);
    DenseVector r = y;
    IncrementalQr qr(m);
    DenseVector qty;
    std::vector<bool> in_support(n, false);

    while (true) {
        if (!by_sparsity && norm2(r) <= policy.epsilon * ynorm) {
            trace.terminated_by = Terminator::ResidueBelowEpsilon;
            break;
        }
        if (trace.selected.size() == max_iter) {
            trace.terminated_by =
                by_sparsity ? Terminator::SparsityReached : Terminator::MaxIterations;
            break;
        }
        std::size_t best = n;
        double best_abs = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_support[i]) continue;
            const double c = std::fabs(dot(phi.col(i), r.data(), m));
            if (c > best_abs) {
                best_abs = c;
                best = i;
            }
        }
        trace.selected.push_back(best);
        in_support[best] = true;
        try {
            const DenseVector& q = qr.append(phi.col(best));
            qty.push_back(dot(q.data(), y.data(), m));
            const double h = dot(q.data(), r.data(), m);
            for (std::size_t i = 0; i < m; ++i) r[i] -= h * q[i];
        } catch (const RankDeficient& e) {
            trace.selected.pop_back();
            trace.estimate = DenseVector(n, 0.0);
            if (!trace.selected.empty()) {
                const DenseVector c = qr.solve(qty);
                for (std::size_t j = 0; j < trace.selected.size(); ++j)
                    trace.estimate[trace.selected[j]] = c[j];
            }
            throw RecoveryRankDeficient(e, std::move(trace));
        }
        trace.residual_norms.push_back(norm2(r));
    }

    trace.estimate = DenseVector(n, 0.0);
    if (!trace.selected.empty()) {
        const DenseVector c = qr.solve(qty);
        for (std::size_t j = 0; j < trace.selected.size(); ++j)
            trace.estimate[trace.selected[j]] = c[j];
    }
    return trace;
}

namespace detail {

// Indices of the k largest |w_i|, lowest index first among ties.
inline std::vector<std::size_t> top_k_abs(const DenseVector& w, std::size_t k) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(w[a]) > std::fabs(w[b]);
    });
    order.resize(std::min(k, order.size()));
    return order;
}

}  // namespace detail

// Expand-solve-prune pursuit over a fixed-size support. Terminator mapping:
// a residual that stops strictly decreasing ends the search at the previous
// support (SparsityReached); an exactly reproduced y reports
// ResidueBelowEpsilon; the 100-round cap reports MaxIterations.
inline RecoveryTrace subspace_pursuit(const ObservationMatrix& om, const DenseVector& y,
                                      std::size_t k) {
    const Matrix& phi = om.matrix;
    const std::size_t m = phi.rows(), n = phi.cols();
    if (y.size() != m) throw DimensionMismatch("subspace_pursuit: y length != rows");
    if (k < 1 || 2 * k > m) throw InvalidSparsity("subspace_pursuit: need 1 <= 2k <= M");

    const double ynorm = norm2(y);
    RecoveryTrace trace;
    trace.residual_norms.push_back(ynorm);

    const auto solve_on = [&](const std::vector<std::size_t>& support) {
        return least_squares(phi.columns(support), y);
    };
    const auto residual_of = [&](const std::vector<std::size_t>& support,
                                 const DenseVector& coef) {
        DenseVector r = y;
        for (std::size_t j = 0; j < support.size(); ++j) {
            const double* c = phi.col(support[j]);
            for (std::size_t i = 0; i < m; ++i) r[i] -= coef[j] * c[i];
        }
        return r;
    };

    std::vector<std::size_t> support = detail::top_k_abs(matvec_t(phi, y), k);
    std::sort(support.begin(), support.end());
    DenseVector coef;
    DenseVector r;
    try {
        coef = solve_on(support);
        r = residual_of(support, coef);
    } catch (const RankDeficient& e) {
        throw RecoveryRankDeficient(e, std::move(trace));
    }
    double rnorm = norm2(r);
    trace.residual_norms.push_back(rnorm);
    trace.terminated_by = Terminator::SparsityReached;

    for (int round = 0; round < 100; ++round) {
        if (rnorm <= 1e-12 * std::max(ynorm, 1e-300)) {
            trace.terminated_by = Terminator::ResidueBelowEpsilon;
            break;
        }
        std::vector<std::size_t> expanded = detail::top_k_abs(matvec_t(phi, r), k);
        expanded.insert(expanded.end(), support.begin(), support.end());
        std::sort(expanded.begin(), expanded.end());
        expanded.erase(std::unique(expanded.begin(), expanded.end()), expanded.end());

        std::vector<std::size_t> candidate;
        DenseVector cand_coef;
        DenseVector cand_r;
        try {
            const DenseVector wide = solve_on(expanded);
            const std::vector<std::size_t> keep = detail::top_k_abs(wide, k);
            candidate.reserve(k);
            for (std::size_t j : keep) candidate.push_back(expanded[j]);
            std::sort(candidate.begin(), candidate.end());
            cand_coef = solve_on(candidate);
            cand_r = residual_of(candidate, cand_coef);
        } catch (const RankDeficient& e) {
            throw RecoveryRankDeficient(e, std::move(trace));
        }
        const double cand_norm = norm2(cand_r);
        if (cand_norm >= rnorm) {
            trace.terminated_by = Terminator::SparsityReached;
            break;
        }
        support = std::move(candidate);
        coef = std::move(cand_coef);
        r = std::move(cand_r);
        rnorm = cand_norm;
        trace.residual_norms.push_back(rnorm);
        if (round == 99) trace.terminated_by = Terminator::MaxIterations;
    }
    if (rnorm <= 1e-12 * std::max(ynorm, 1e-300))
        trace.terminated_by = Terminator::ResidueBelowEpsilon;

    trace.selected = support;
    trace.estimate = DenseVector(n, 0.0);
    for (std::size_t j = 0; j < support.size(); ++j)
        trace.estimate[support[j]] = coef[j];
    return trace;
}

// Minimum-l1 reconstruction subject to Phi x = y.
inline DenseVector basis_pursuit(const ObservationMatrix& om, const DenseVector& y) {
    return min_l1_solution(om.matrix, y);
}

inline SupportDiagnostics diagnose(const RecoveryTrace& trace, const SparseSignal& truth) {
    if (!trace.estimate.empty() && trace.estimate.size() != truth.n)
        throw DimensionMismatch("diagnose: trace and truth disagree on N");
    std::set<std::size_t> t(truth.support.begin(), truth.support.end());
    SupportDiagnostics d;
    std::size_t nc = 0, nf = 0;
    for (std::size_t idx : trace.selected) {
        if (t.count(idx))
            ++nc;
        else
            ++nf;
        d.per_iteration.emplace_back(nc, nf);
    }
    d.n_c = nc;
    d.n_f = nf;
    return d;
}

// Success criterion shared by every algorithm: reconstruction error within
// 1e-2 of the signal norm.
inline bool is_exact_recovery(const SparseSignal& x, const DenseVector& x_est) {
    if (x_est.size() != x.n) throw DimensionMismatch("is_exact_recovery: length != N");
    const DenseVector xd = x.dense();
    double err = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < x.n; ++i) {
        const double d = xd[i] - x_est[i];
        err += d * d;
        nrm += xd[i] * xd[i];
    }
    return std::sqrt(err) <= 1e-2 * std::sqrt(nrm);
}

}  // namespace sparsebench
