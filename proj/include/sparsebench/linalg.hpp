#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sparsebench/errors.hpp"
#include "sparsebench/matrix.hpp"

namespace sparsebench {

namespace detail {

// Householder QR in place. Returns the Householder vectors packed below the
// diagonal and R on and above it; beta holds the reflector scalings.
inline void householder_qr(Matrix& a, std::vector<double>& beta) {
    const std::size_t m = a.rows(), k = a.cols();
    beta.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double* cj = a.col(j);
        const double sigma = norm2(cj + j, m - j);
        if (sigma == 0.0) continue;
        double alpha = cj[j] >= 0.0 ? -sigma : sigma;
        const double v0 = cj[j] - alpha;
        cj[j] = alpha;
        if (v0 == 0.0) continue;
        // Store v/v0 below the diagonal so v has an implicit leading 1.
        for (std::size_t i = j + 1; i < m; ++i) cj[i] /= v0;
        double vtv = 1.0;
        for (std::size_t i = j + 1; i < m; ++i) vtv += cj[i] * cj[i];
        beta[j] = 2.0 / vtv;
        for (std::size_t col = j + 1; col < k; ++col) {
            double* cc = a.col(col);
            double s = cc[j];
            for (std::size_t i = j + 1; i < m; ++i) s += cj[i] * cc[i];
            s *= beta[j];
            cc[j] -= s;
            for (std::size_t i = j + 1; i < m; ++i) cc[i] -= s * cj[i];
        }
    }
}

inline void apply_qt(const Matrix& a, const std::vector<double>& beta, DenseVector& b) {
    const std::size_t m = a.rows(), k = a.cols();
    for (std::size_t j = 0; j < k; ++j) {
        if (beta[j] == 0.0) continue;
        const double* cj = a.col(j);
        double s = b[j];
        for (std::size_t i = j + 1; i < m; ++i) s += cj[i] * b[i];
        s *= beta[j];
        b[j] -= s;
        for (std::size_t i = j + 1; i < m; ++i) b[i] -= s * cj[i];
    }
}

inline void check_full_rank(const Matrix& r, std::size_t k) {
    double max_diag = 0.0;
    for (std::size_t j = 0; j < k; ++j) max_diag = std::max(max_diag, std::fabs(r(j, j)));
    std::size_t rank = 0;
    for (std::size_t j = 0; j < k; ++j)
        if (std::fabs(r(j, j)) >= 1e-12 * max_diag) ++rank;
    if (rank < k) throw RankDeficient("least_squares: rank-deficient matrix", rank);
}

}  // namespace detail

// Minimizes ||A c - b||_2 for tall full-column-rank A via Householder QR.
inline DenseVector least_squares(const Matrix& a, const DenseVector& b) {
    const std::size_t m = a.rows(), k = a.cols();
    if (b.size() != m) throw DimensionMismatch("least_squares: b length != rows");
    if (m < k) throw DimensionMismatch("least_squares: underdetermined system");
    Matrix qr = a;
    std::vector<double> beta;
    detail::householder_qr(qr, beta);
    detail::check_full_rank(qr, k);
    DenseVector qtb = b;
    detail::apply_qt(qr, beta, qtb);
    DenseVector c(k);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = qtb[jj];
        for (std::size_t col = jj + 1; col < k; ++col) s -= qr(jj, col) * c[col];
        c[jj] = s / qr(jj, jj);
    }
    return c;
}

// Correlation of every column with r: entry i is <phi_i, r>.
inline DenseVector residual_correlations(const Matrix& phi, const DenseVector& r) {
    if (r.size() != phi.rows())
        throw DimensionMismatch("residual_correlations: r length != rows");
    return matvec_t(phi, r);
}

// Extreme singular values by one-sided (Hestenes) Jacobi: rotations keep full
// relative accuracy on sigma_min, which a Gram-matrix eigensolve would lose.
inline std::pair<double, double> extreme_singular_values(const Matrix& a) {
    const std::size_t m = a.rows(), k = a.cols();
    Matrix w = a;
    constexpr double kTol = 1e-15;
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                double* cp = w.col(p);
                double* cq = w.col(q);
                const double app = dot(cp, cp, m);
                const double aqq = dot(cq, cq, m);
                const double apq = dot(cp, cq, m);
                if (std::fabs(apq) <= kTol * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = cp[i], xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                }
            }
        }
        if (!rotated) break;
    }
    double lo = -1.0, hi = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double s = w.column_norm(j);
        hi = std::max(hi, s);
        lo = lo < 0.0 ? s : std::min(lo, s);
    }
    if (lo < 0.0) lo = 0.0;
    return {lo, hi};
}

// Extreme eigenvalues of a symmetric matrix by cyclic Jacobi.
inline std::pair<double, double> sym_eig_extremes(Matrix s) {
    const std::size_t n = s.cols();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(s(i, j)));
    if (scale == 0.0) return {0.0, 0.0};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(s(p, q)));
        if (off <= 1e-15 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::fabs(apq) <= 1e-18 * scale) continue;
                const double tau = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = s(i, p), aiq = s(i, q);
                    s(i, p) = c * aip - sn * aiq;
                    s(i, q) = sn * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = s(p, i), aqi = s(q, i);
                    s(p, i) = c * api - sn * aqi;
                    s(q, i) = sn * api + c * aqi;
                }
            }
        }
    }
    double lo = s(0, 0), hi = s(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, s(i, i));
        hi = std::max(hi, s(i, i));
    }
    return {lo, hi};
}

// Orthonormal basis grown one column at a time (modified Gram-Schmidt with one
// reorthogonalization pass). Produces the same projections as a from-scratch
// QR of the appended columns.
class IncrementalQr {
  public:
    explicit IncrementalQr(std::size_t m) : m_(m), q_(m, 0) {}

    std::size_t size() const { return r_cols_.size(); }

    // Appends column a; returns the new orthonormal direction. Throws
    // RankDeficient when a lies in the current span to working precision.
    const DenseVector& append(const double* a) {
        DenseVector v(a, a + m_);
        const double input_norm = norm2(v);
        std::vector<double> rcol(size() + 1, 0.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < size(); ++j) {
                const double h = dot(q_.col(j), v.data(), m_);
                rcol[j] += h;
                const double* qj = q_.col(j);
                for (std::size_t i = 0; i < m_; ++i) v[i] -= h * qj[i];
            }
        }
        const double rnew = norm2(v);
        if (rnew <= 1e-12 * std::max(input_norm, 1e-300))
            throw RankDeficient("append: column in span of previous columns", size());
        rcol[size()] = rnew;
        const std::size_t col = size();
        if (q_.cols() <= col) grow();
        double* qc = q_.col(col);
        for (std::size_t i = 0; i < m_; ++i) qc[i] = v[i] / rnew;
        r_cols_.push_back(std::move(rcol));
        last_q_.assign(qc, qc + m_);
        return last_q_;
    }

    // Solves R c = qty for the coefficients of the appended columns.
    DenseVector solve(const DenseVector& qty) const {
        const std::size_t k = size();
        DenseVector c(k);
        for (std::size_t jj = k; jj-- > 0;) {
            double s = qty[jj];
            for (std::size_t col = jj + 1; col < k; ++col) s -= r_cols_[col][jj] * c[col];
            c[jj] = s / r_cols_[jj][jj];
        }
        return c;
    }

    const double* q_col(std::size_t j) const { return q_.col(j); }

  private:
    void grow() {
        Matrix bigger(m_, q_.cols() == 0 ? 8 : q_.cols() * 2);
        for (std::size_t j = 0; j < q_.cols(); ++j) {
            const double* src = q_.col(j);
            double* dst = bigger.col(j);
            for (std::size_t i = 0; i < m_; ++i) dst[i] = src[i];
        }
        q_ = std::move(bigger);
    }

    std::size_t m_;
    Matrix q_;
    std::vector<std::vector<double>> r_cols_;
    DenseVector last_q_;
};

}  // namespace sparsebench
