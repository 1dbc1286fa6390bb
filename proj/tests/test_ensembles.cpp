#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <set>

#include "sparsebench/ensembles.hpp"
#include "sparsebench/subsets.hpp"

using namespace sparsebench;

TEST_CASE("binomial coefficients: known values and saturation", "[subsets]") {
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(5, 5) == 1);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(16, 3) == 560);
    CHECK(binomial(18, 5) == 8568);
    CHECK(binomial(40, 3) == 9880);
    CHECK(binomial(3, 4) == 0);
    // 300 choose 150 overflows 64 bits; must clamp, not wrap
    CHECK(binomial(300, 150) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("k-subset enumeration is lexicographic, complete, and stoppable", "[subsets]") {
    std::vector<std::vector<std::size_t>> seen;
    for_each_ksubset(5, 3, [&](const std::vector<std::size_t>& s) { seen.push_back(s); });
    REQUIRE(seen.size() == 10);
    CHECK(seen.front() == std::vector<std::size_t>{0, 1, 2});
    CHECK(seen.back() == std::vector<std::size_t>{2, 3, 4});
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);

    std::size_t visited = 0;
    for_each_ksubset(10, 4, [&](const std::vector<std::size_t>&) {
        ++visited;
        return visited < 7;  // stop early
    });
    CHECK(visited == 7);

    std::size_t empty_calls = 0;
    for_each_ksubset(4, 0, [&](const std::vector<std::size_t>& s) {
        CHECK(s.empty());
        ++empty_calls;
    });
    CHECK(empty_calls == 1);
}

TEST_CASE("gaussian matrices: shape, determinism, normalization", "[ensembles]") {
    const ObservationMatrix a = gen_gaussian_matrix(3, 5, 77, true);
    CHECK(a.m() == 3);
    CHECK(a.n() == 5);
    CHECK(a.column_normalized);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(a.matrix.column_norm(j) == Catch::Approx(1.0).margin(1e-12));

    const ObservationMatrix b = gen_gaussian_matrix(3, 5, 77, true);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 3; ++i) CHECK(a.matrix(i, j) == b.matrix(i, j));

    const ObservationMatrix c = gen_gaussian_matrix(3, 5, 78, true);
    bool differs = false;
    for (std::size_t j = 0; j < 5 && !differs; ++j)
        for (std::size_t i = 0; i < 3; ++i) differs = differs || a.matrix(i, j) != c.matrix(i, j);
    CHECK(differs);

    CHECK_THROWS_AS(gen_gaussian_matrix(5, 5, 1, true), InvalidDimensions);
    CHECK_THROWS_AS(gen_gaussian_matrix(6, 5, 1, true), InvalidDimensions);
}

TEST_CASE("unnormalized gaussian entries have the nominal moments", "[ensembles]") {
    const std::size_t m = 100, n = 250;
    const ObservationMatrix om = gen_gaussian_matrix(m, n, 2024, false);
    CHECK_FALSE(om.column_normalized);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            sum += om.matrix(i, j);
            sumsq += om.matrix(i, j) * om.matrix(i, j);
        }
    const double count = static_cast<double>(m * n);
    const double mean = sum / count;
    const double var = sumsq / count - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    const double nominal = 1.0 / static_cast<double>(m);
    CHECK(var > 0.9 * nominal);
    CHECK(var < 1.1 * nominal);
}

TEST_CASE("sparse signals: support and value invariants per ensemble", "[ensembles]") {
    for (EnsembleKind kind : {EnsembleKind::Gaussian, EnsembleKind::Uniform, EnsembleKind::Cars}) {
        const SparseSignal x = gen_sparse_signal(30, 6, kind, 5);
        CHECK(x.n == 30);
        REQUIRE(x.k() == 6);
        std::set<std::size_t> uniq(x.support.begin(), x.support.end());
        CHECK(uniq.size() == 6);
        for (std::size_t i = 0; i < x.support.size(); ++i) {
            CHECK(x.support[i] < 30);
            if (i > 0) CHECK(x.support[i - 1] < x.support[i]);
        }
        for (double v : x.values) {
            CHECK(v != 0.0);
            if (kind == EnsembleKind::Cars) CHECK(std::abs(v) == 1.0);
            if (kind == EnsembleKind::Uniform) {
                CHECK(v >= -1.0);
                CHECK(v <= 1.0);
            }
        }
        // dense expansion is zero off support
        const DenseVector dense = x.dense();
        REQUIRE(dense.size() == 30);
        double on_support_sq = 0.0;
        for (std::size_t i = 0; i < x.support.size(); ++i)
            on_support_sq += x.values[i] * x.values[i];
        double total_sq = 0.0;
        for (double v : dense) total_sq += v * v;
        CHECK(total_sq == on_support_sq);
    }
}

TEST_CASE("cars signals have l2 norm exactly sqrt(k)", "[ensembles]") {
    const SparseSignal x = gen_sparse_signal(50, 9, EnsembleKind::Cars, 123);
    CHECK(norm2(x.dense()) == Catch::Approx(3.0).margin(0.0));
}

TEST_CASE("the support depends on (n, k, seed) but not the ensemble", "[ensembles]") {
    const SparseSignal g = gen_sparse_signal(40, 5, EnsembleKind::Gaussian, 31);
    const SparseSignal u = gen_sparse_signal(40, 5, EnsembleKind::Uniform, 31);
    const SparseSignal c = gen_sparse_signal(40, 5, EnsembleKind::Cars, 31);
    CHECK(g.support == u.support);
    CHECK(g.support == c.support);
}

TEST_CASE("k=1 signals and sparsity bounds", "[ensembles]") {
    const SparseSignal x = gen_sparse_signal(10, 1, EnsembleKind::Gaussian, 1);
    CHECK(x.k() == 1);
    std::size_t nonzeros = 0;
    for (double v : x.dense())
        if (v != 0.0) ++nonzeros;
    CHECK(nonzeros == 1);
    CHECK_THROWS_AS(gen_sparse_signal(10, 10, EnsembleKind::Gaussian, 1), InvalidSparsity);
    CHECK_THROWS_AS(gen_sparse_signal(10, 11, EnsembleKind::Gaussian, 1), InvalidSparsity);
}

TEST_CASE("pooled gaussian nonzeros pass a coarse normality check", "[ensembles]") {
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const SparseSignal x = gen_sparse_signal(250, 40, EnsembleKind::Gaussian, seed);
        for (double v : x.values) {
            sum += v;
            sumsq += v * v;
            ++count;
        }
    }
    REQUIRE(count == 8000);
    const double mean = sum / static_cast<double>(count);
    const double var = sumsq / static_cast<double>(count) - mean * mean;
    CHECK(mean > -0.1);
    CHECK(mean < 0.1);
    CHECK(var > 0.8);
    CHECK(var < 1.2);
}

TEST_CASE("ensemble names round-trip and reject unknown strings", "[ensembles]") {
    CHECK(ensemble_from_string("gaussian") == EnsembleKind::Gaussian);
    CHECK(ensemble_from_string("uniform") == EnsembleKind::Uniform);
    CHECK(ensemble_from_string("cars") == EnsembleKind::Cars);
    CHECK(std::string(to_string(EnsembleKind::Gaussian)) == "gaussian");
    CHECK(std::string(to_string(EnsembleKind::Uniform)) == "uniform");
    CHECK(std::string(to_string(EnsembleKind::Cars)) == "cars");
    CHECK_THROWS_AS(ensemble_from_string("laplace"), std::invalid_argument);
}
