#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "sparsebench/recovery.hpp"
#include "sparsebench/rng.hpp"
#include "sparsebench/subsets.hpp"

using namespace sparsebench;

namespace {

DenseVector residual_of(const Matrix& phi, const DenseVector& y, const DenseVector& est) {
    DenseVector r = y;
    const DenseVector yhat = matvec(phi, est);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= yhat[i];
    return r;
}

// independent argmax over |phi^T r| skipping chosen indices, lowest index wins
std::size_t naive_argmax(const Matrix& phi, const DenseVector& r,
                         const std::set<std::size_t>& chosen) {
    const DenseVector c = residual_correlations(phi, r);
    std::size_t best = c.size();
    double best_abs = -1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (chosen.count(i)) continue;
        if (std::fabs(c[i]) > best_abs) {
            best_abs = std::fabs(c[i]);
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("sparsity-terminated pursuit recovers a 2-sparse signal exactly", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(4, 6, 7, true);
    const SparseSignal x = gen_sparse_signal(6, 2, EnsembleKind::Gaussian, 7);
    const DenseVector y = matvec(phi.matrix, x.dense());

    const RecoveryTrace t = omp(phi, y, TerminationPolicy::sparsity(2));
    CHECK(t.iterations() == 2);
    CHECK(t.terminated_by == Terminator::SparsityReached);
    const DenseVector err = sub(x.dense(), t.estimate);
    CHECK(norm2(err) <= 1e-6);
}

TEST_CASE("every selection matches an independently computed argmax", "[recovery]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ObservationMatrix phi = gen_gaussian_matrix(12, 30, seed, true);
        const SparseSignal x = gen_sparse_signal(30, 4, EnsembleKind::Gaussian, seed);
        const DenseVector y = matvec(phi.matrix, x.dense());
        const RecoveryTrace t = omp(phi, y, TerminationPolicy::sparsity(6));

        std::set<std::size_t> chosen;
        DenseVector r = y;
        for (std::size_t step = 0; step < t.selected.size(); ++step) {
            // once the residual is down to rounding noise the argmax is arbitrary
            if (norm2(r) <= 1e-9 * norm2(y)) break;
            // replay the argmax on the residual of a fresh least-squares solve
            CHECK(t.selected[step] == naive_argmax(phi.matrix, r, chosen));
            chosen.insert(t.selected[step]);
            std::vector<std::size_t> sel(chosen.begin(), chosen.end());
            const DenseVector coef = least_squares(phi.matrix.columns(sel), y);
            DenseVector est(30, 0.0);
            for (std::size_t j = 0; j < sel.size(); ++j) est[sel[j]] = coef[j];
            r = residual_of(phi.matrix, y, est);
        }
    }
}

TEST_CASE("residuals stay orthogonal to the selected columns", "[recovery]") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const ObservationMatrix phi = gen_gaussian_matrix(15, 40, seed, true);
        const SparseSignal x = gen_sparse_signal(40, 5, EnsembleKind::Gaussian, seed);
        const DenseVector y = matvec(phi.matrix, x.dense());
        const RecoveryTrace t = omp(phi, y, TerminationPolicy::sparsity(8));

        const DenseVector r = residual_of(phi.matrix, y, t.estimate);
        for (std::size_t idx : t.selected)
            CHECK(std::fabs(dot(phi.matrix.col(idx), r.data(), 15)) <= 1e-9 * norm2(y));
    }
}

TEST_CASE("residual norms never increase along the trace", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(20, 50, 3, true);
    const SparseSignal x = gen_sparse_signal(50, 6, EnsembleKind::Uniform, 3);
    const DenseVector y = matvec(phi.matrix, x.dense());
    const RecoveryTrace t = omp(phi, y, TerminationPolicy::sparsity(12));
    REQUIRE(t.residual_norms.size() == t.iterations() + 1);
    CHECK(t.residual_norms.front() == Catch::Approx(norm2(y)));
    for (std::size_t i = 1; i < t.residual_norms.size(); ++i)
        CHECK(t.residual_norms[i] <= t.residual_norms[i - 1] + 1e-12);
}

TEST_CASE("sparsity runs are prefixes of the residue-terminated run", "[recovery]") {
    for (std::uint64_t seed = 2; seed <= 6; ++seed) {
        const ObservationMatrix phi = gen_gaussian_matrix(16, 40, seed, true);
        const SparseSignal x = gen_sparse_signal(40, 5, EnsembleKind::Gaussian, seed);
        const DenseVector y = matvec(phi.matrix, x.dense());
        const RecoveryTrace full = omp(phi, y, TerminationPolicy::residue(1e-6, 16));
        for (std::size_t j = 1; j <= full.iterations(); ++j) {
            const RecoveryTrace prefix = omp(phi, y, TerminationPolicy::sparsity(j));
            REQUIRE(prefix.iterations() == j);
            for (std::size_t i = 0; i < j; ++i) CHECK(prefix.selected[i] == full.selected[i]);
        }
    }
}

TEST_CASE("zero measurements terminate before the first iteration", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(5, 12, 1, true);
    const DenseVector y(5, 0.0);
    const RecoveryTrace t = omp(phi, y, TerminationPolicy::residue(1e-6, 5));
    CHECK(t.iterations() == 0);
    CHECK(t.terminated_by == Terminator::ResidueBelowEpsilon);
    for (double v : t.estimate) CHECK(v == 0.0);
}

TEST_CASE("the residue threshold is relative to the measurement norm", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(10, 25, 5, true);
    const SparseSignal x = gen_sparse_signal(25, 3, EnsembleKind::Gaussian, 5);
    DenseVector y = matvec(phi.matrix, x.dense());
    const RecoveryTrace a = omp(phi, y, TerminationPolicy::residue(1e-6, 10));
    for (double& v : y) v *= 1000.0;
    const RecoveryTrace b = omp(phi, y, TerminationPolicy::residue(1e-6, 10));
    CHECK(a.iterations() == b.iterations());
    CHECK(a.selected == b.selected);
}

TEST_CASE("iteration caps report max_iterations", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(10, 25, 9, true);
    const SparseSignal x = gen_sparse_signal(25, 4, EnsembleKind::Gaussian, 9);
    const DenseVector y = matvec(phi.matrix, x.dense());
    const RecoveryTrace t = omp(phi, y, TerminationPolicy::residue(0.0, 2));
    CHECK(t.iterations() == 2);
    CHECK(t.terminated_by == Terminator::MaxIterations);
}

TEST_CASE("termination policy bounds are enforced", "[recovery]") {
    const ObservationMatrix phi = gen_gaussian_matrix(6, 14, 2, true);
    const DenseVector y(6, 1.0);
    CHECK_THROWS_AS(omp(phi, y, TerminationPolicy::sparsity(0)), InvalidSparsity);
    CHECK_THROWS_AS(omp(phi, y, TerminationPolicy::sparsity(7)), InvalidSparsity);
    CHECK_THROWS_AS(omp(phi, y, TerminationPolicy::residue(1e-6, 0)), InvalidSparsity);
    CHECK_THROWS_AS(omp(phi, DenseVector(5, 1.0), TerminationPolicy::sparsity(2)),
                    DimensionMismatch);
}

TEST_CASE("a collapsing factorization surfaces the partial trace", "[recovery]") {
    // four unit columns in a plane: indices 0 and 2 get picked, then the
    // residual is exactly zero and every remaining column lies in their span
    const double th = 0.1;
    Matrix m(3, 4);
    m(0, 0) = 1.0;
    m(0, 1) = std::cos(th);
    m(1, 1) = std::sin(th);
    const double dn = std::sqrt(2.0 - 2.0 * std::cos(th));
    m(0, 2) = (1.0 - std::cos(th)) / dn;
    m(1, 2) = -std::sin(th) / dn;
    const double sn = std::sqrt(2.0 + 2.0 * std::cos(th));
    m(0, 3) = (1.0 + std::cos(th)) / sn;
    m(1, 3) = std::sin(th) / sn;

    ObservationMatrix phi;
    phi.matrix = m;
    phi.column_normalized = true;

    DenseVector y(3, 0.0);
    y[0] = 2.0 - std::cos(th);
    y[1] = -std::sin(th);

    try {
        omp(phi, y, TerminationPolicy::sparsity(3));
        FAIL("expected RecoveryRankDeficient");
    } catch (const RecoveryRankDeficient& e) {
        CHECK(e.partial.selected == std::vector<std::size_t>{0, 2});
        const DenseVector r = residual_of(m, y, e.partial.estimate);
        CHECK(norm2(r) <= 1e-12);
    }
}

TEST_CASE("successful supports match the exhaustive least-squares oracle", "[recovery]") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const std::size_t n = 20, k = 3;
        const ObservationMatrix phi = gen_gaussian_matrix(10, n, seed, true);
        const SparseSignal x = gen_sparse_signal(n, k, EnsembleKind::Gaussian, seed);
        const DenseVector y = matvec(phi.matrix, x.dense());
        const RecoveryTrace t = omp(phi, y, TerminationPolicy::sparsity(k));
        if (!is_exact_recovery(x, t.estimate)) continue;

        double best_norm = 1e300;
        std::vector<std::size_t> best_support;
        for_each_ksubset(n, k, [&](const std::vector<std::size_t>& s) {
            const DenseVector coef = least_squares(phi.matrix.columns(s), y);
            DenseVector est(n, 0.0);
            for (std::size_t j = 0; j < s.size(); ++j) est[s[j]] = coef[j];
            const double rn = norm2(residual_of(phi.matrix, y, est));
            if (rn < best_norm) {
                best_norm = rn;
                best_support = s;
            }
        });
        std::vector<std::size_t> got = t.selected;
        std::sort(got.begin(), got.end());
        CHECK(got == best_support);
    }
}

TEST_CASE("exact recovery threshold sits at one percent of the signal norm", "[recovery]") {
    const SparseSignal x = gen_sparse_signal(30, 4, EnsembleKind::Gaussian, 21);
    const double xnorm = norm2(x.dense());

    DenseVector close = x.dense();
    close[x.support[0]] += 0.5e-2 * xnorm;
    CHECK(is_exact_recovery(x, close));

    DenseVector far = x.dense();
    far[x.support[0]] += 2e-2 * xnorm;
    CHECK_FALSE(is_exact_recovery(x, far));

    CHECK_THROWS_AS(is_exact_recovery(x, DenseVector(29, 0.0)), DimensionMismatch);
}

TEST_CASE("support diagnostics count correct and false picks per iteration", "[recovery]") {
    RecoveryTrace t;
    t.selected = {3, 7, 9};
    t.estimate = DenseVector(15, 0.0);
    SparseSignal truth;
    truth.n = 15;
    truth.support = {3, 9, 12};
    truth.values = {1.0, 1.0, 1.0};
    const SupportDiagnostics d = diagnose(t, truth);
    CHECK(d.n_c == 2);
    CHECK(d.n_f == 1);
    REQUIRE(d.per_iteration.size() == 3);
    CHECK(d.per_iteration[0] == std::make_pair<std::size_t, std::size_t>(1, 0));
    CHECK(d.per_iteration[1] == std::make_pair<std::size_t, std::size_t>(1, 1));
    CHECK(d.per_iteration[2] == std::make_pair<std::size_t, std::size_t>(2, 1));
}

TEST_CASE("terminator names are stable", "[recovery]") {
    CHECK(std::string(to_string(Terminator::SparsityReached)) == "sparsity_reached");
    CHECK(std::string(to_string(Terminator::ResidueBelowEpsilon)) == "residue_below_epsilon");
    CHECK(std::string(to_string(Terminator::MaxIterations)) == "max_iterations");
}
