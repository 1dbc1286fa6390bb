// Draws one underdetermined instance and compares the four solvers on it.
#include <cstdio>

#include "sparsebench/sparsebench.hpp"

using namespace sparsebench;

int main() {
    const std::size_t m = 20, n = 40, k = 3;
    const std::uint64_t seed = 7;

    const ObservationMatrix phi = gen_gaussian_matrix(m, n, seed, true);
    const SparseSignal x = gen_sparse_signal(n, k, EnsembleKind::Gaussian, seed);
    const DenseVector y = matvec(phi.matrix, x.dense());

    std::printf("instance: %zux%zu, %zu nonzeros, seed %llu\n", m, n, k,
                static_cast<unsigned long long>(seed));
    std::printf("true support:");
    for (std::size_t idx : x.support) std::printf(" %zu", idx);
    std::printf("\n\n%-8s %10s %22s %14s %8s\n", "solver", "iters", "terminated_by", "residual",
                "exact");

    auto show = [&](const char* name, const RecoveryTrace& t) {
        const DenseVector err = sub(x.dense(), t.estimate);
        std::printf("%-8s %10zu %22s %14.3e %8s\n", name, t.iterations(),
                    to_string(t.terminated_by), t.residual_norms.back(),
                    is_exact_recovery(x, t.estimate) ? "yes" : "no");
        (void)err;
    };

    show("omp_k", omp(phi, y, TerminationPolicy::sparsity(k)));
    show("omp_e", omp(phi, y, TerminationPolicy::residue(1e-6, m)));
    show("sp", subspace_pursuit(phi, y, k));

    RecoveryTrace bp;
    bp.estimate = basis_pursuit(phi, y);
    DenseVector r = y;
    const DenseVector yhat = matvec(phi.matrix, bp.estimate);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= yhat[i];
    bp.residual_norms = {norm2(y), norm2(r)};
    bp.terminated_by = Terminator::ResidueBelowEpsilon;
    show("bp", bp);
    return 0;
}
