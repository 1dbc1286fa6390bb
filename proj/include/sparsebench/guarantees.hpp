#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsebench/ensembles.hpp"
#include "sparsebench/errors.hpp"
#include "sparsebench/linalg.hpp"
#include "sparsebench/matrix.hpp"
#include "sparsebench/recovery.hpp"
#include "sparsebench/rng.hpp"
#include "sparsebench/subsets.hpp"

namespace sparsebench {

enum class RicExactness { Exact, LowerBound };

inline const char* to_string(RicExactness e) {
    return e == RicExactness::Exact ? "exact" : "lower_bound";
}

struct RicEntry {
    std::size_t k = 0;
    double delta = 0.0;
    RicExactness exactness = RicExactness::Exact;
};

struct RicTable {
    std::string matrix_id;
    std::size_t k_max = 0;
    std::vector<RicEntry> deltas;  // ascending k

    bool has(std::size_t k) const {
        for (const auto& e : deltas)
            if (e.k == k) return true;
        return false;
    }
    const RicEntry& at(std::size_t k) const {
        for (const auto& e : deltas)
            if (e.k == k) return e;
        throw RicIndexMissing("ric table has no entry at k=" + std::to_string(k));
    }
    void put(RicEntry e) {
        for (auto& existing : deltas) {
            if (existing.k == e.k) {
                existing = e;
                return;
            }
        }
        std::size_t pos = 0;
        while (pos < deltas.size() && deltas[pos].k < e.k) ++pos;
        deltas.insert(deltas.begin() + static_cast<std::ptrdiff_t>(pos), e);
        k_max = std::max(k_max, e.k);
    }
};

namespace detail {

inline Matrix gram(const Matrix& phi) {
    const std::size_t n = phi.cols(), m = phi.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = dot(phi.col(i), phi.col(j), m);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

inline double subset_violation(const Matrix& g, const std::vector<std::size_t>& idx) {
    const std::size_t k = idx.size();
    if (k == 1) {
        const double d = g(idx[0], idx[0]);
        return std::max(d - 1.0, 1.0 - d);
    }
    Matrix s(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) s(a, b) = g(idx[a], idx[b]);
    const auto [lo, hi] = sym_eig_extremes(std::move(s));
    return std::max(hi - 1.0, 1.0 - lo);
}

}  // namespace detail

// delta_k by full enumeration of k-subsets on the Gram matrix; exact within
// eigensolver precision. Refuses (with the required count) when C(N, k)
// exceeds the budget.
inline double exact_ric(const ObservationMatrix& om, std::size_t k,
                        std::uint64_t budget = 2000000) {
    if (k < 1 || k > om.m()) throw InvalidSparsity("exact_ric: need 1 <= k <= M");
    const std::uint64_t needed = binomial(om.n(), k);
    if (needed > budget)
        throw BudgetExceeded("exact_ric: C(N,k) exceeds enumeration budget", needed);
    const Matrix g = detail::gram(om.matrix);
    double worst = 0.0;
    for_each_ksubset(om.n(), k, [&](const std::vector<std::size_t>& idx) {
        worst = std::max(worst, detail::subset_violation(g, idx));
    });
    return worst;
}

// Maximum violation over random k-subsets: a lower bound on delta_k. Falls
// back to exhaustive enumeration (hence the exact value) when the sample
// count covers every subset.
inline double monte_carlo_ric(const ObservationMatrix& om, std::size_t k,
                              std::uint64_t samples, std::uint64_t seed) {
    if (k < 1 || k > om.m()) throw InvalidSparsity("monte_carlo_ric: need 1 <= k <= M");
    if (samples >= binomial(om.n(), k))
        return exact_ric(om, k, std::numeric_limits<std::uint64_t>::max());
    const Matrix g = detail::gram(om.matrix);
    Rng rng(seed_hash(seed, 0x6d63, k));
    double worst = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto idx = rng.ksubset(om.n(), k);
        worst = std::max(worst, detail::subset_violation(g, idx));
    }
    return worst;
}

// Builds a table holding the requested orders. Orders within the enumeration
// budget are exact; orders above M are recorded as lower bounds >= 1 (any
// M+1 columns in R^M are dependent, so the isometry constant cannot be below
// 1); anything else falls back to a Monte-Carlo lower bound.
inline RicTable build_ric_table(const ObservationMatrix& om, const std::vector<std::size_t>& orders,
                                std::uint64_t budget = 2000000,
                                std::uint64_t mc_samples = 20000, std::uint64_t mc_seed = 1) {
    RicTable table;
    table.matrix_id = "gaussian-m" + std::to_string(om.m()) + "-n" + std::to_string(om.n()) +
                      "-seed" + std::to_string(om.seed);
    double delta_at_m = -1.0;
    for (std::size_t k : orders) {
        if (table.has(k)) continue;
        if (k > om.m()) {
            if (delta_at_m < 0.0) {
                try {
                    delta_at_m = exact_ric(om, om.m(), budget);
                } catch (const BudgetExceeded&) {
                    delta_at_m = monte_carlo_ric(om, om.m(), mc_samples, mc_seed);
                }
            }
            table.put({k, std::max(1.0, delta_at_m), RicExactness::LowerBound});
            continue;
        }
        try {
            table.put({k, exact_ric(om, k, budget), RicExactness::Exact});
        } catch (const BudgetExceeded&) {
            table.put({k, monte_carlo_ric(om, k, mc_samples, mc_seed), RicExactness::LowerBound});
        }
    }
    return table;
}

inline double wang_bound(std::size_t k) {
    if (k < 1) throw std::invalid_argument("wang_bound: need k >= 1");
    return 1.0 / (std::sqrt(static_cast<double>(k)) + 1.0);
}

inline double online_bound(std::size_t k, std::size_t n_c) {
    if (n_c > k) throw std::invalid_argument("online_bound: need n_c <= k");
    return 1.0 / (std::sqrt(static_cast<double>(k - n_c)) + 1.0);
}

inline double nc_lower_bound(std::size_t k) {
    if (k < 25) throw KTooSmall("nc_lower_bound: defined for k >= 25");
    const double kd = static_cast<double>(k);
    return (8.0 * kd + 4.0 * std::sqrt(kd) - 4.0) / 9.0;
}

inline bool check_online_iteration(const RicTable& ric, std::size_t k, std::size_t n_c,
                                   std::size_t n_f) {
    return ric.at(k + n_f + 1).delta < online_bound(k, n_c);
}

// Labeled version: a positive verdict from a lower-bound entry cannot certify
// (the true constant may sit above the threshold); a negative verdict from a
// lower bound is definitive.
enum class OnlineVerdict { Certified, InconclusivePositive, DefinitiveFalse };

inline OnlineVerdict online_verdict(const RicTable& ric, std::size_t k, std::size_t n_c,
                                    std::size_t n_f) {
    const RicEntry& e = ric.at(k + n_f + 1);
    if (e.delta >= online_bound(k, n_c)) return OnlineVerdict::DefinitiveFalse;
    return e.exactness == RicExactness::Exact ? OnlineVerdict::Certified
                                              : OnlineVerdict::InconclusivePositive;
}

// Preconditions under which a partially correct state still finishes within
// 3k/2 total iterations: k >= 25, at least one false pick but fewer than
// ceil(k/2), and enough correct picks to clear nc_lower_bound.
inline bool check_three_halves_preconditions(std::size_t k, std::size_t n_c, std::size_t n_f) {
    if (k < 25) return false;
    const std::size_t half_up = (k + 1) / 2;
    if (n_f < 1 || n_f >= half_up) return false;
    return n_c < k && static_cast<double>(n_c) >= nc_lower_bound(k);
}

struct NamedCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Scaling, bracketing, and violation-propagation inequalities among the
// exact constants of one matrix. Strict forms relax to equality exactly at
// zero (orthonormal matrices have every constant zero).
inline std::vector<NamedCheck> ric_inequality_suite(const RicTable& ric, std::size_t k) {
    std::vector<NamedCheck> out;
    {
        NamedCheck chk{"scaling", true, ""};
        for (std::size_t r = 1; 2 * r <= ric.k_max; ++r) {
            const double d2r = ric.at(2 * r).delta;
            for (std::size_t c = 1; c * r <= ric.k_max; ++c) {
                const double dcr = ric.at(c * r).delta;
                const bool ok = (d2r == 0.0) ? (dcr == 0.0) : (dcr < static_cast<double>(c) * d2r);
                if (!ok) {
                    chk.passed = false;
                    chk.detail = "violated at c=" + std::to_string(c) + " r=" + std::to_string(r);
                    break;
                }
            }
            if (!chk.passed) break;
        }
        out.push_back(std::move(chk));
    }
    {
        NamedCheck chk{"bracketing", false, ""};
        const std::size_t hi = 3 * ((k + 1) / 2);
        const double dk1 = ric.at(k + 1).delta;
        const double dhi = ric.at(hi).delta;
        chk.passed = dk1 > dhi / 3.0 || (dk1 == 0.0 && dhi == 0.0);
        if (!chk.passed)
            chk.detail = "delta_{k+1}=" + std::to_string(dk1) + " vs " + std::to_string(dhi / 3.0);
        out.push_back(std::move(chk));
    }
    {
        NamedCheck chk{"violation_propagation", true, ""};
        const std::size_t hi = 3 * ((k + 1) / 2);
        const double dk1 = ric.at(k + 1).delta;
        const double dhi = ric.at(hi).delta;
        const double w = wang_bound(k);
        if (dhi >= 3.0 * w && dk1 < w) {
            chk.passed = false;
            chk.detail = "antecedent holds but delta_{k+1} below threshold";
        }
        out.push_back(std::move(chk));
    }
    return out;
}

struct CorrelationBounds {
    double observed = 0.0;
    double general_bound = 0.0;
    bool has_cars_bound = false;
    double cars_bound = 0.0;
};

// Largest on-support correlation of y = Phi x against its closed-form caps:
// sqrt(1 + delta^2)*||x||_2 always, and 1 + delta*sqrt(K-1) for unit-modulus
// signals.
inline CorrelationBounds correlation_bounds(const ObservationMatrix& om, const SparseSignal& x,
                                            double delta_k) {
    if (!om.column_normalized)
        throw ColumnsNotNormalized("correlation_bounds: needs unit-norm columns");
    for (std::size_t j = 0; j < om.n(); ++j)
        if (std::fabs(om.matrix.column_norm(j) - 1.0) > 1e-12)
            throw ColumnsNotNormalized("correlation_bounds: column " + std::to_string(j));
    const DenseVector y = matvec(om.matrix, x.dense());
    CorrelationBounds b;
    for (std::size_t t : x.support)
        b.observed = std::max(b.observed, std::fabs(dot(om.matrix.col(t), y.data(), om.m())));
    double xnorm = 0.0;
    for (double v : x.values) xnorm += v * v;
    xnorm = std::sqrt(xnorm);
    b.general_bound = std::sqrt(1.0 + delta_k * delta_k) * xnorm;
    if (x.ensemble == EnsembleKind::Cars) {
        b.has_cars_bound = true;
        b.cars_bound = 1.0 + delta_k * std::sqrt(static_cast<double>(x.k() - 1));
    }
    return b;
}

struct GuaranteeRow {
    std::size_t l = 0;  // iterations completed when the state was evaluated
    std::size_t n_c = 0;
    std::size_t n_f = 0;
    double bound_rhs = 0.0;
    std::size_t ric_index = 0;
    double ric_used = 0.0;
    bool online_condition_holds = false;
    RicExactness ric_exactness = RicExactness::Exact;
};

struct GuaranteeReport {
    std::size_t k = 0;
    std::vector<GuaranteeRow> per_iteration;
    bool wang_condition_holds = false;
    RicExactness wang_exactness = RicExactness::Exact;
    bool three_halves_preconditions_hold = false;  // true when some state meets them
};

// Replays a pursuit trace against a RIC table: one row per intermediate
// state (l completed iterations, support split into n_c correct + n_f false),
// each carrying the recovery condition evaluated from that state.
inline GuaranteeReport certify_trace(const RecoveryTrace& trace, const SparseSignal& truth,
                                     const RicTable& ric) {
    GuaranteeReport rep;
    rep.k = truth.k();
    const SupportDiagnostics diag = diagnose(trace, truth);
    const std::size_t k = truth.k();
    for (std::size_t l = 0; l < trace.selected.size(); ++l) {
        std::size_t nc = 0, nf = 0;
        if (l > 0) {
            nc = diag.per_iteration[l - 1].first;
            nf = diag.per_iteration[l - 1].second;
        }
        GuaranteeRow row;
        row.l = l;
        row.n_c = nc;
        row.n_f = nf;
        row.bound_rhs = online_bound(k, nc);
        row.ric_index = k + nf + 1;
        const RicEntry& e = ric.at(row.ric_index);
        row.ric_used = e.delta;
        row.ric_exactness = e.exactness;
        row.online_condition_holds = e.delta < row.bound_rhs;
        if (check_three_halves_preconditions(k, nc, nf)) rep.three_halves_preconditions_hold = true;
        rep.per_iteration.push_back(row);
    }
    const RicEntry& wang_entry = ric.at(k + 1);
    rep.wang_condition_holds = wang_entry.delta < wang_bound(k);
    rep.wang_exactness = wang_entry.exactness;
    return rep;
}

}  // namespace sparsebench
