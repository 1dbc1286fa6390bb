#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsebench/errors.hpp"
#include "sparsebench/matrix.hpp"
#include "sparsebench/rng.hpp"

namespace sparsebench {

enum class EnsembleKind { Gaussian, Uniform, Cars };

inline const char* to_string(EnsembleKind e) {
    switch (e) {
        case EnsembleKind::Gaussian: return "gaussian";
        case EnsembleKind::Uniform: return "uniform";
        case EnsembleKind::Cars: return "cars";
    }
    return "?";
}

inline EnsembleKind ensemble_from_string(const std::string& s) {
    if (s == "gaussian") return EnsembleKind::Gaussian;
    if (s == "uniform") return EnsembleKind::Uniform;
    if (s == "cars") return EnsembleKind::Cars;
    throw std::invalid_argument("unknown ensemble: " + s);
}

struct ObservationMatrix {
    Matrix matrix;
    bool column_normalized = false;
    std::uint64_t seed = 0;

    std::size_t m() const { return matrix.rows(); }
    std::size_t n() const { return matrix.cols(); }
};

struct SparseSignal {
    std::size_t n = 0;
    std::vector<std::size_t> support;  // sorted
    std::vector<double> values;        // aligned with support
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    std::uint64_t seed = 0;

    std::size_t k() const { return support.size(); }

    DenseVector dense() const {
        DenseVector x(n, 0.0);
        for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[i];
        return x;
    }
};

// Entries i.i.d. N(0, 1/m); optionally rescale each column to unit norm.
inline ObservationMatrix gen_gaussian_matrix(std::size_t m, std::size_t n,
                                             std::uint64_t seed, bool normalize) {
    if (m >= n) throw InvalidDimensions("gen_gaussian_matrix: need m < n");
    if (m < 1) throw InvalidDimensions("gen_gaussian_matrix: need m >= 1");
    ObservationMatrix out;
    out.matrix = Matrix(m, n);
    out.column_normalized = normalize;
    out.seed = seed;
    Rng rng(seed_hash(seed, 0x4d61));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t j = 0; j < n; ++j) {
        double* c = out.matrix.col(j);
        for (std::size_t i = 0; i < m; ++i) c[i] = scale * rng.normal();
    }
    if (normalize) {
        for (std::size_t j = 0; j < n; ++j) {
            const double nrm = out.matrix.column_norm(j);
            double* c = out.matrix.col(j);
            for (std::size_t i = 0; i < m; ++i) c[i] /= nrm;
        }
    }
    return out;
}

inline SparseSignal gen_sparse_signal(std::size_t n, std::size_t k, EnsembleKind ensemble,
                                      std::uint64_t seed) {
    if (k >= n) throw InvalidSparsity("gen_sparse_signal: need k < n");
    if (k < 1) throw InvalidSparsity("gen_sparse_signal: need k >= 1");
    SparseSignal s;
    s.n = n;
    s.ensemble = ensemble;
    s.seed = seed;
    Rng rng(seed_hash(seed, 0x5369));
    s.support = rng.ksubset(n, k);
    s.values.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        switch (ensemble) {
            case EnsembleKind::Gaussian: {
                double v = rng.normal();
                while (v == 0.0) v = rng.normal();
                s.values[i] = v;
                break;
            }
            case EnsembleKind::Uniform: {
                double v = rng.uniform(-1.0, 1.0);
                while (v == 0.0) v = rng.uniform(-1.0, 1.0);
                s.values[i] = v;
                break;
            }
            case EnsembleKind::Cars:
                s.values[i] = (rng.next() >> 63) ? 1.0 : -1.0;
                break;
        }
    }
    return s;
}

}  // namespace sparsebench
