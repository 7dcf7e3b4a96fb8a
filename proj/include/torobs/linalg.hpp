#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"

namespace torobs {

// Dense complex matrix, row-major.
struct CMatrix {
    std::size_t n = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(std::size_t n_) : n(n_), a(n_ * n_, cplx(0, 0)) {}

    cplx& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    cplx at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline double hermitian_defect(const CMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = i; j < m.n; ++j)
            worst = std::max(worst, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
    return worst;
}

inline void symmetrize(CMatrix& m) {
    for (std::size_t i = 0; i < m.n; ++i) {
        m.at(i, i) = cplx(m.at(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < m.n; ++j) {
            cplx v = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
            m.at(i, j) = v;
            m.at(j, i) = std::conj(v);
        }
    }
}

struct EigenResult {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns are eigenvectors, matching order
};

// Cyclic Jacobi for Hermitian matrices: each sweep phases out the off-diagonal
// entry (p,q) and applies a real rotation; quadratic convergence once small.
inline EigenResult hermitian_eigen(CMatrix m, double tol = 1e-14, int max_sweeps = 60) {
    const std::size_t n = m.n;
    EigenResult res;
    res.vectors = CMatrix(n);
    for (std::size_t i = 0; i < n; ++i) res.vectors.at(i, i) = 1;
    if (n == 0) return res;
    symmetrize(m);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m.at(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(m.at(i, j)));
        if (off <= tol * scale) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                cplx apq = m.at(p, q);
                double r = std::abs(apq);
                if (r <= 1e-300) continue;
                cplx phase = apq / r;  // a_pq = phase * r
                // absorb the phase into column/row p
                for (std::size_t i = 0; i < n; ++i) m.at(i, p) *= phase;
                for (std::size_t i = 0; i < n; ++i) m.at(p, i) *= std::conj(phase);
                for (std::size_t i = 0; i < n; ++i) res.vectors.at(i, p) *= phase;
                double app = m.at(p, p).real();
                double aqq = m.at(q, q).real();
                double tau = (aqq - app) / (2.0 * r);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    cplx vp = m.at(i, p), vq = m.at(i, q);
                    m.at(i, p) = c * vp - s * vq;
                    m.at(i, q) = s * vp + c * vq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    cplx vp = m.at(p, i), vq = m.at(q, i);
                    m.at(p, i) = c * vp - s * vq;
                    m.at(q, i) = s * vp + c * vq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    cplx vp = res.vectors.at(i, p), vq = res.vectors.at(i, q);
                    res.vectors.at(i, p) = c * vp - s * vq;
                    res.vectors.at(i, q) = s * vp + c * vq;
                }
                m.at(p, q) = cplx(0, 0);
                m.at(q, p) = cplx(0, 0);
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = m.at(i, i).real();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
    res.values.resize(n);
    CMatrix sorted(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted.at(i, j) = res.vectors.at(i, order[j]);
    }
    res.vectors = std::move(sorted);
    return res;
}

inline std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.n, cplx(0, 0));
    for (std::size_t i = 0; i < m.n; ++i) {
        cplx s(0, 0);
        for (std::size_t j = 0; j < m.n; ++j) s += m.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

// Largest eigenvalue of a Hermitian PSD matrix by power iteration from a fixed
// deterministic start vector.
inline double power_iteration_max(const CMatrix& m, double tol = 1e-13, int max_iters = 20000) {
    const std::size_t n = m.n;
    if (n == 0) return 0.0;
    std::vector<cplx> v(n);
    Rng rng(0x5eedULL);
    for (std::size_t i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.25 * rng.uniform(), 0.25 * rng.uniform());
    auto normalize = [&](std::vector<cplx>& w) {
        double s = 0.0;
        for (auto& x : w) s += std::norm(x);
        s = std::sqrt(s);
        if (s == 0.0) return false;
        for (auto& x : w) x /= s;
        return true;
    };
    if (!normalize(v)) return 0.0;
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<cplx> w = matvec(m, v);
        cplx ray(0, 0);
        for (std::size_t i = 0; i < n; ++i) ray += w[i] * std::conj(v[i]);
        double next = ray.real();
        if (!normalize(w)) return 0.0;
        v = std::move(w);
        if (it > 2 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) return next;
        lambda = next;
    }
    return lambda;
}

}  // namespace torobs
