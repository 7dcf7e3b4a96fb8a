#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/fft.hpp"
#include "torobs/freqpoint.hpp"

namespace torobs {

// Amplitudes this small after arithmetic are dropped to keep supports
// canonical without masking real mass.
inline constexpr double kPruneThreshold = 1e-15;

// Finitely supported space-time Fourier representation of a trigonometric
// polynomial on T^{1+d}, under normalized Haar measure: the coefficient of
// e^{i(nt+k·x)} is the mean of f·e^{-i(nt+k·x)} and ||e^{i(nt+k·x)}||_{L²} = 1.
class SpectrumField {
  public:
    using Map = std::unordered_map<FreqPoint, cplx, FreqPointHash>;

    SpectrumField() : dim_(0) {}
    explicit SpectrumField(std::size_t spatial_dim) : dim_(spatial_dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t support_size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }
    const Map& raw() const { return coeffs_; }

    cplx coeff(const FreqPoint& p) const {
        auto it = coeffs_.find(p);
        return it == coeffs_.end() ? cplx(0, 0) : it->second;
    }

    void set(const FreqPoint& p, cplx a) {
        check_point(p);
        if (std::abs(a) == 0.0)
            coeffs_.erase(p);
        else
            coeffs_[p] = a;
    }

    void add(const FreqPoint& p, cplx a) {
        check_point(p);
        auto [it, inserted] = coeffs_.try_emplace(p, a);
        if (!inserted) it->second += a;
    }

    void prune(double eps = kPruneThreshold) {
        for (auto it = coeffs_.begin(); it != coeffs_.end();)
            if (std::abs(it->second) < eps)
                it = coeffs_.erase(it);
            else
                ++it;
    }

    // Fixed iteration order: all reductions and exports run over this.
    std::vector<std::pair<FreqPoint, cplx>> items_sorted() const {
        std::vector<std::pair<FreqPoint, cplx>> v(coeffs_.begin(), coeffs_.end());
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    }

    friend bool operator==(const SpectrumField& a, const SpectrumField& b) {
        return a.dim_ == b.dim_ && a.coeffs_ == b.coeffs_;
    }

  private:
    void check_point(const FreqPoint& p) const {
        if (p.k.dim() != dim_) throw std::invalid_argument("frequency dimension mismatch");
    }

    std::size_t dim_;
    Map coeffs_;
};

// Membership predicate over Z^{1+d}.
struct FreqSet {
    std::function<bool(const FreqPoint&)> contains;

    static FreqSet from_points(std::vector<FreqPoint> pts) {
        std::sort(pts.begin(), pts.end());
        return FreqSet{[pts = std::move(pts)](const FreqPoint& p) {
            return std::binary_search(pts.begin(), pts.end(), p);
        }};
    }
};

inline SpectrumField project(const SpectrumField& f, const FreqSet& s) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw())
        if (s.contains(p)) out.set(p, a);
    return out;
}

// ---------------------------------------------------------------------------
// Norms and linear structure
// ---------------------------------------------------------------------------

inline double l2_norm_sq(const SpectrumField& f) {
    double s = 0.0;
    for (auto& [p, a] : f.items_sorted()) s += std::norm(a);
    return s;
}

inline double l2_norm(const SpectrumField& f) { return std::sqrt(l2_norm_sq(f)); }

inline cplx inner(const SpectrumField& f, const SpectrumField& g) {
    cplx s(0, 0);
    for (auto& [p, a] : f.items_sorted()) s += a * std::conj(g.coeff(p));
    return s;
}

// <n+|k|^2>^b weight of the Bourgain space X^b.
inline double xb_weight(const FreqPoint& p, double b) {
    double s = static_cast<double>(paraboloid_offset(p));
    return std::pow(1.0 + s * s, 0.5 * b);
}

inline double xb_norm(const SpectrumField& f, double b) {
    double s = 0.0;
    for (auto& [p, a] : f.items_sorted()) {
        double w = xb_weight(p, b);
        s += w * w * std::norm(a);
    }
    return std::sqrt(s);
}

inline SpectrumField operator+(const SpectrumField& f, const SpectrumField& g) {
    SpectrumField out = f;
    for (auto& [p, a] : g.raw()) out.add(p, a);
    out.prune();
    return out;
}

inline SpectrumField operator-(const SpectrumField& f, const SpectrumField& g) {
    SpectrumField out = f;
    for (auto& [p, a] : g.raw()) out.add(p, -a);
    out.prune();
    return out;
}

inline SpectrumField operator*(cplx c, const SpectrumField& f) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw()) out.set(p, c * a);
    out.prune();
    return out;
}

inline SpectrumField conjugate(const SpectrumField& f) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw()) out.set(FreqPoint(checked_neg(p.n), -p.k), std::conj(a));
    return out;
}

// Max Euclidean degree sup |(n,k)| of the support (0 for the zero field).
inline double spacetime_degree(const SpectrumField& f) {
    Int best = 0;
    for (auto& [p, a] : f.raw())
        best = std::max(best, checked_add(checked_mul(p.n, p.n), norm_sq(p.k)));
    return std::sqrt(static_cast<double>(best));
}

inline Int max_spatial_degree_sq(const SpectrumField& f) {
    Int best = 0;
    for (auto& [p, a] : f.raw()) best = std::max(best, norm_sq(p.k));
    return best;
}

inline Int max_temporal_degree(const SpectrumField& f) {
    Int best = 0;
    for (auto& [p, a] : f.raw()) best = std::max(best, std::abs(p.n));
    return best;
}

// ---------------------------------------------------------------------------
// Structure maps
// ---------------------------------------------------------------------------

inline bool is_spatial(const SpectrumField& f) {
    for (auto& [p, a] : f.raw())
        if (p.n != 0) return false;
    return true;
}

// u0 (purely spatial) -> t ↦ e^{itΔ}u0: amplitude of k moves to (-|k|^2, k).
inline SpectrumField free_evolve(const SpectrumField& u0) {
    if (!is_spatial(u0)) throw std::invalid_argument("free_evolve expects a spatial field");
    SpectrumField out(u0.dim());
    for (auto& [p, a] : u0.raw()) out.set(FreqPoint(checked_neg(norm_sq(p.k)), p.k), a);
    return out;
}

// Galilean coefficient relocation (n,k) -> (n - |p|^2 - 2p·k, k + p).
inline SpectrumField galilean(const SpectrumField& f, const IntVector& p) {
    SpectrumField out(f.dim());
    const Int psq = norm_sq(p);
    for (auto& [q, a] : f.raw()) {
        Int n = checked_sub(q.n, checked_add(psq, checked_mul(2, dot(p, q.k))));
        out.set(FreqPoint(n, q.k + p), a);
    }
    return out;
}

// Pointwise product = Fourier convolution.
inline SpectrumField multiply(const SpectrumField& f, const SpectrumField& g) {
    if (f.dim() != g.dim()) throw std::invalid_argument("multiply: dimension mismatch");
    const SpectrumField& small = f.support_size() <= g.support_size() ? f : g;
    const SpectrumField& large = f.support_size() <= g.support_size() ? g : f;
    SpectrumField out(f.dim());
    for (auto& [p, a] : large.raw())
        for (auto& [q, b] : small.raw())
            out.add(FreqPoint(checked_add(p.n, q.n), p.k + q.k), a * b);
    out.prune();
    return out;
}

// ---------------------------------------------------------------------------
// Uniform grids on T^{1+d}
// ---------------------------------------------------------------------------

struct Grid {
    std::vector<std::size_t> shape;  // (Nt, Nx_1, ..., Nx_d), row-major data
    std::vector<cplx> data;

    std::size_t total() const {
        std::size_t t = 1;
        for (std::size_t s : shape) t *= s;
        return t;
    }
};

// Samples on the uniform grid t_j = 2πj/Nt, x_m = 2πm/Nx. Requires the grid
// to resolve the support: Nt > 2·max|n| and Nx > 2·max|k_j|.
inline Grid evaluate_grid(const SpectrumField& f, std::size_t nt, std::size_t nx) {
    const std::size_t d = f.dim();
    Grid g;
    g.shape.assign(1 + d, nx);
    g.shape[0] = nt;
    g.data.assign(g.total(), cplx(0, 0));
    for (auto& [p, a] : f.raw()) {
        if (2 * static_cast<std::size_t>(std::abs(p.n)) >= nt)
            throw std::invalid_argument("grid does not resolve temporal degree");
        for (std::size_t j = 0; j < d; ++j)
            if (2 * static_cast<std::size_t>(std::abs(p.k[j])) >= nx)
                throw std::invalid_argument("grid does not resolve spatial degree");
        std::size_t idx = static_cast<std::size_t>(floor_mod(p.n, static_cast<Int>(nt)));
        for (std::size_t j = 0; j < d; ++j)
            idx = idx * nx + static_cast<std::size_t>(floor_mod(p.k[j], static_cast<Int>(nx)));
        g.data[idx] += a;
    }
    for (std::size_t axis = 0; axis < g.shape.size(); ++axis) dft_axis(g.data, g.shape, axis, +1);
    return g;
}

// Inverse of evaluate_grid: trigonometric interpolation coefficients with
// frequencies centered around zero, pruned.
inline SpectrumField grid_to_field(const Grid& g, std::size_t spatial_dim, double eps = 1e-13) {
    if (g.shape.size() != 1 + spatial_dim) throw std::invalid_argument("grid rank mismatch");
    std::vector<cplx> data = g.data;
    for (std::size_t axis = 0; axis < g.shape.size(); ++axis) dft_axis(data, g.shape, axis, -1);
    const double scale = 1.0 / static_cast<double>(g.total());
    SpectrumField f(spatial_dim);
    std::vector<std::size_t> idx(g.shape.size(), 0);
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        cplx a = data[flat] * scale;
        if (std::abs(a) >= eps) {
            FreqPoint p;
            auto centered = [&](std::size_t axis) {
                Int v = static_cast<Int>(idx[axis]);
                Int n = static_cast<Int>(g.shape[axis]);
                return v * 2 >= n ? v - n : v;
            };
            p.n = centered(0);
            p.k = IntVector(spatial_dim);
            for (std::size_t j = 0; j < spatial_dim; ++j) p.k[j] = centered(1 + j);
            f.set(p, a);
        }
        for (std::size_t axis = g.shape.size(); axis-- > 0;) {
            if (++idx[axis] < g.shape[axis]) break;
            idx[axis] = 0;
        }
    }
    return f;
}

// Mean of |f|^2 over the grid (normalized Haar quadrature).
inline double grid_mean_abs_sq(const Grid& g) {
    double s = 0.0;
    for (const cplx& v : g.data) s += std::norm(v);
    return s / static_cast<double>(g.total());
}

}  // namespace torobs
