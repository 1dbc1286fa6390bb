#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sparsebench/errors.hpp"
#include "sparsebench/matrix.hpp"

namespace sparsebench {

namespace detail {

// In-place Cholesky solve of S x = b for symmetric positive definite S.
// A vanishing pivot gets a relative nudge; interior-point normal equations
// become near-singular close to the optimum and the nudge keeps steps usable.
inline DenseVector cholesky_solve(Matrix s, DenseVector b) {
    const std::size_t n = s.cols();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, s(i, i));
    const double bump = 1e-13 * std::max(max_diag, 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t p = 0; p < j; ++p) d -= s(j, p) * s(j, p);
        if (d <= bump) d = bump;
        const double ljj = std::sqrt(d);
        s(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t p = 0; p < j; ++p) v -= s(i, p) * s(j, p);
            s(i, j) = v / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t p = 0; p < i; ++p) v -= s(i, p) * b[p];
        b[i] = v / s(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t p = ii + 1; p < n; ++p) v -= s(p, ii) * b[p];
        b[ii] = v / s(ii, ii);
    }
    return b;
}

}  // namespace detail

// Minimum l1-norm solution of Phi x = y via the split x = u - v, solved as the
// LP  min 1'(u+v)  s.t.  [Phi -Phi](u;v) = y, u,v >= 0  with a Mehrotra-style
// predictor-corrector primal-dual interior-point method. The normal-equation
// matrix [Phi -Phi] D [Phi -Phi]' collapses to Phi (Du + Dv) Phi'.
inline DenseVector min_l1_solution(const Matrix& phi, const DenseVector& y,
                                   std::size_t max_iterations = 200) {
    const std::size_t m = phi.rows(), n = phi.cols(), nz = 2 * n;
    if (y.size() != m) throw DimensionMismatch("min_l1_solution: y length != rows");
    if (norm2(y) == 0.0) return DenseVector(n, 0.0);

    // z = (u; v), s = dual slacks, lambda = equality multipliers.
    std::vector<double> z(nz, 1.0), s(nz, 1.0);
    DenseVector lambda(m, 0.0);
    const double ynorm = norm2(y);

    const auto a_times = [&](const std::vector<double>& w) {
        DenseVector out(m, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double wj = w[j] - w[n + j];
            if (wj == 0.0) continue;
            const double* c = phi.col(j);
            for (std::size_t i = 0; i < m; ++i) out[i] += c[i] * wj;
        }
        return out;
    };
    const auto at_times = [&](const DenseVector& w) {
        std::vector<double> out(nz);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dot(phi.col(j), w.data(), m);
            out[j] = d;
            out[n + j] = -d;
        }
        return out;
    };

    // Warm start keeps iterates well inside the cone.
    {
        const double shift = std::max(1.0, ynorm / std::sqrt(static_cast<double>(m)));
        for (auto& v : z) v = shift;
        for (auto& v : s) v = 1.0;
    }

    std::vector<double> dz(nz), ds(nz), dz_aff(nz), ds_aff(nz), d2(nz), rxs(nz);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        DenseVector rb = a_times(z);
        for (std::size_t i = 0; i < m; ++i) rb[i] -= y[i];
        std::vector<double> rc = at_times(lambda);
        for (std::size_t j = 0; j < nz; ++j) rc[j] += s[j] - 1.0;
        double mu = 0.0;
        for (std::size_t j = 0; j < nz; ++j) mu += z[j] * s[j];
        mu /= static_cast<double>(nz);

        double rbn = norm2(rb), rcn = 0.0;
        for (double v : rc) rcn += v * v;
        rcn = std::sqrt(rcn);
        if (mu <= 1e-11 && rbn <= 1e-10 * (1.0 + ynorm) && rcn <= 1e-10 * std::sqrt(static_cast<double>(nz))) {
            DenseVector x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = z[j] - z[n + j];
            return x;
        }

        for (std::size_t j = 0; j < nz; ++j) d2[j] = z[j] / s[j];

        // Phi (Du + Dv) Phi', built once per iteration, factored once, two solves.
        Matrix normal(m, m);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = d2[j] + d2[n + j];
            const double* c = phi.col(j);
            for (std::size_t col = 0; col < m; ++col) {
                const double wc = w * c[col];
                double* dst = normal.col(col);
                for (std::size_t row = col; row < m; ++row) dst[row] += wc * c[row];
            }
        }
        for (std::size_t col = 0; col < m; ++col)
            for (std::size_t row = 0; row < col; ++row) normal(row, col) = normal(col, row);

        const auto solve_step = [&](const std::vector<double>& rxs_in,
                                    std::vector<double>& dz_out, std::vector<double>& ds_out,
                                    DenseVector& dl_out) {
            // A D2 A' dl = -rb - A D2 rc + A S^{-1} rxs
            std::vector<double> tmp(nz);
            for (std::size_t j = 0; j < nz; ++j) tmp[j] = -d2[j] * rc[j] + rxs_in[j] / s[j];
            DenseVector rhs = a_times(tmp);
            for (std::size_t i = 0; i < m; ++i) rhs[i] -= rb[i];
            dl_out = detail::cholesky_solve(normal, rhs);
            const std::vector<double> atdl = at_times(dl_out);
            for (std::size_t j = 0; j < nz; ++j) {
                dz_out[j] = d2[j] * (atdl[j] + rc[j]) - rxs_in[j] / s[j];
                ds_out[j] = -(rxs_in[j] + s[j] * dz_out[j]) / z[j];
            }
        };

        const auto max_step = [&](const std::vector<double>& w, const std::vector<double>& dw) {
            double alpha = 1.0;
            for (std::size_t j = 0; j < nz; ++j)
                if (dw[j] < 0.0) alpha = std::min(alpha, -w[j] / dw[j]);
            return alpha;
        };

        for (std::size_t j = 0; j < nz; ++j) rxs[j] = z[j] * s[j];
        DenseVector dl_aff(m);
        solve_step(rxs, dz_aff, ds_aff, dl_aff);
        const double ap_aff = max_step(z, dz_aff);
        const double ad_aff = max_step(s, ds_aff);
        double mu_aff = 0.0;
        for (std::size_t j = 0; j < nz; ++j)
            mu_aff += (z[j] + ap_aff * dz_aff[j]) * (s[j] + ad_aff * ds_aff[j]);
        mu_aff /= static_cast<double>(nz);
        const double ratio = mu_aff / mu;
        const double sigma = ratio * ratio * ratio;

        for (std::size_t j = 0; j < nz; ++j)
            rxs[j] = z[j] * s[j] + dz_aff[j] * ds_aff[j] - sigma * mu;
        DenseVector dl(m);
        solve_step(rxs, dz, ds, dl);

        const double eta = 0.99;
        const double ap = std::min(1.0, eta * max_step(z, dz));
        const double ad = std::min(1.0, eta * max_step(s, ds));
        for (std::size_t j = 0; j < nz; ++j) {
            z[j] += ap * dz[j];
            s[j] += ad * ds[j];
        }
        for (std::size_t i = 0; i < m; ++i) lambda[i] += ad * dl[i];
    }
    DenseVector rb = a_times(z);
    for (std::size_t i = 0; i < m; ++i) rb[i] -= y[i];
    if (norm2(rb) > 1e-6 * (1.0 + ynorm))
        throw Infeasible("min_l1_solution: equality constraints unreachable");
    throw NotConverged("min_l1_solution: iteration cap reached");
}

}  // namespace sparsebench
