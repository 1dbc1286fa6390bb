#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sparsebench/errors.hpp"

namespace sparsebench {

using DenseVector = std::vector<double>;

// Column-major dense matrix: entry (i, j) sits at data[j*rows + i], so a column
// is contiguous and column slicing is a memcpy.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    const double* col(std::size_t j) const { return data_.data() + j * rows_; }
    double* col(std::size_t j) { return data_.data() + j * rows_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix columns(const std::vector<std::size_t>& idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double* src = col(idx[j]);
            double* dst = out.col(j);
            for (std::size_t i = 0; i < rows_; ++i) dst[i] = src[i];
        }
        return out;
    }

    double column_norm(std::size_t j) const {
        const double* c = col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += c[i] * c[i];
        return std::sqrt(s);
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const DenseVector& a, const DenseVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: vector lengths differ");
    return dot(a.data(), b.data(), a.size());
}

inline double norm2(const DenseVector& v) { return std::sqrt(dot(v, v)); }

inline double norm2(const double* v, std::size_t n) { return std::sqrt(dot(v, v, n)); }

inline double norm1(const DenseVector& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

inline double norm_inf(const DenseVector& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

// y = A x
inline DenseVector matvec(const Matrix& a, const DenseVector& x) {
    if (x.size() != a.cols()) throw DimensionMismatch("matvec: x length != cols");
    DenseVector y(a.rows(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const double* c = a.col(j);
        for (std::size_t i = 0; i < a.rows(); ++i) y[i] += c[i] * xj;
    }
    return y;
}

// y = A^T x
inline DenseVector matvec_t(const Matrix& a, const DenseVector& x) {
    if (x.size() != a.rows()) throw DimensionMismatch("matvec_t: x length != rows");
    DenseVector y(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x.data(), a.rows());
    return y;
}

inline DenseVector sub(const DenseVector& a, const DenseVector& b) {
    DenseVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace sparsebench
