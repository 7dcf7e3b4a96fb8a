#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "torobs/common.hpp"

namespace torobs {

// ---------------------------------------------------------------------------
// Integer vectors
// ---------------------------------------------------------------------------

struct IntVector {
    std::vector<Int> coords;

    IntVector() = default;
    explicit IntVector(std::size_t d) : coords(d, 0) {}
    IntVector(std::initializer_list<Int> v) : coords(v) {}
    explicit IntVector(std::vector<Int> v) : coords(std::move(v)) {}

    std::size_t dim() const { return coords.size(); }
    Int& operator[](std::size_t i) { return coords[i]; }
    Int operator[](std::size_t i) const { return coords[i]; }

    bool is_zero() const {
        for (Int c : coords)
            if (c != 0) return false;
        return true;
    }

    friend IntVector operator+(const IntVector& a, const IntVector& b) {
        IntVector r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r[i] = checked_add(a[i], b[i]);
        return r;
    }
    friend IntVector operator-(const IntVector& a, const IntVector& b) {
        IntVector r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r[i] = checked_sub(a[i], b[i]);
        return r;
    }
    friend IntVector operator*(Int c, const IntVector& a) {
        IntVector r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r[i] = checked_mul(c, a[i]);
        return r;
    }
    IntVector operator-() const { return Int(-1) * *this; }

    friend bool operator==(const IntVector& a, const IntVector& b) { return a.coords == b.coords; }
    friend bool operator!=(const IntVector& a, const IntVector& b) { return !(a == b); }
    friend bool operator<(const IntVector& a, const IntVector& b) { return a.coords < b.coords; }
};

inline Int dot(const IntVector& a, const IntVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
    return s;
}

inline Int norm_sq(const IntVector& a) { return dot(a, a); }

inline IntVector unit_vector(std::size_t d, std::size_t i) {
    IntVector e(d);
    e[i] = 1;
    return e;
}

// ---------------------------------------------------------------------------
// Integer matrices (rows x cols), columns are lattice generators
// ---------------------------------------------------------------------------

using IMat = std::vector<std::vector<Int>>;

inline IMat imat(std::size_t rows, std::size_t cols) {
    return IMat(rows, std::vector<Int>(cols, 0));
}

inline IMat identity_mat(std::size_t n) {
    IMat m = imat(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline IMat columns_to_mat(std::size_t dim, const std::vector<IntVector>& cols) {
    IMat m = imat(dim, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].dim() != dim) throw std::invalid_argument("columns_to_mat: dimension mismatch");
        for (std::size_t i = 0; i < dim; ++i) m[i][j] = cols[j][i];
    }
    return m;
}

inline IntVector mat_column(const IMat& m, std::size_t j) {
    IntVector v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i][j];
    return v;
}

namespace detail {

inline void col_swap(IMat& m, std::size_t a, std::size_t b) {
    for (auto& row : m) std::swap(row[a], row[b]);
}

inline void col_negate(IMat& m, std::size_t a) {
    for (auto& row : m) row[a] = checked_neg(row[a]);
}

// col_a -= c * col_b
inline void col_axpy(IMat& m, std::size_t a, Int c, std::size_t b) {
    if (c == 0) return;
    for (auto& row : m) row[a] = checked_sub(row[a], checked_mul(c, row[b]));
}

// (col_a, col_b) <- (p*col_a + q*col_b, r*col_a + s*col_b), unimodular block
inline void col_combine(IMat& m, std::size_t a, std::size_t b, Int p, Int q, Int r, Int s) {
    for (auto& row : m) {
        Int va = row[a], vb = row[b];
        row[a] = checked_add(checked_mul(p, va), checked_mul(q, vb));
        row[b] = checked_add(checked_mul(r, va), checked_mul(s, vb));
    }
}

// g = gcd(a,b) with g = pa + qb
inline std::tuple<Int, Int, Int> ext_gcd(Int a, Int b) {
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        std::tie(old_r, r) = std::make_tuple(r, checked_sub(old_r, checked_mul(q, r)));
        std::tie(old_s, s) = std::make_tuple(s, checked_sub(old_s, checked_mul(q, s)));
        std::tie(old_t, t) = std::make_tuple(t, checked_sub(old_t, checked_mul(q, t)));
    }
    if (old_r < 0) { old_r = checked_neg(old_r); old_s = checked_neg(old_s); old_t = checked_neg(old_t); }
    return {old_r, old_s, old_t};
}

}  // namespace detail

// Column Hermite normal form. Returns the rank; on exit the first `rank`
// columns of m hold the canonical echelon basis (pivot rows strictly
// increasing, pivots positive, entries left of a pivot in its row reduced to
// [0, pivot)), remaining columns are zero. If `transform` is non-null it
// receives a unimodular matrix U with m_out = m_in * U.
inline std::size_t hnf_columns(IMat& m, IMat* transform = nullptr) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows == 0 ? 0 : m[0].size();
    if (transform) *transform = identity_mat(cols);
    std::size_t j = 0;
    for (std::size_t i = 0; i < rows && j < cols; ++i) {
        std::size_t l = j;
        while (l < cols && m[i][l] == 0) ++l;
        if (l == cols) continue;
        if (l != j) {
            detail::col_swap(m, j, l);
            if (transform) detail::col_swap(*transform, j, l);
        }
        for (std::size_t k = j + 1; k < cols; ++k) {
            if (m[i][k] == 0) continue;
            auto [g, p, q] = detail::ext_gcd(m[i][j], m[i][k]);
            Int aj = m[i][j] / g, ak = m[i][k] / g;
            // (col_j, col_k) <- (p*col_j + q*col_k, aj*col_k - ak*col_j)
            detail::col_combine(m, j, k, p, q, checked_neg(ak), aj);
            if (transform) detail::col_combine(*transform, j, k, p, q, checked_neg(ak), aj);
        }
        if (m[i][j] < 0) {
            detail::col_negate(m, j);
            if (transform) detail::col_negate(*transform, j);
        }
        for (std::size_t k = 0; k < j; ++k) {
            Int q = floor_div(m[i][k], m[i][j]);
            detail::col_axpy(m, k, q, j);
            if (transform) detail::col_axpy(*transform, k, q, j);
        }
        ++j;
    }
    return j;
}

// Exact determinant by fraction-free Bareiss elimination.
inline Int bareiss_det(IMat a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t l = k + 1;
            while (l < n && a[l][k] == 0) ++l;
            if (l == n) return 0;
            std::swap(a[k], a[l]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int t = checked_sub(checked_mul(a[i][j], a[k][k]), checked_mul(a[i][k], a[k][j]));
                a[i][j] = t / prev;  // exact division by Bareiss identity
            }
        prev = a[k][k];
    }
    return checked_mul(sign, a[n - 1][n - 1]);
}

// ---------------------------------------------------------------------------
// Sublattice: canonical HNF basis record
// ---------------------------------------------------------------------------

class Sublattice {
  public:
    Sublattice() : ambient_dim_(0) {}

    // Canonical lattice generated by arbitrary (possibly dependent) vectors.
    static Sublattice from_generators(std::size_t ambient_dim, const std::vector<IntVector>& gens) {
        if (ambient_dim == 0) throw std::invalid_argument("ambient dimension must be >= 1");
        IMat m = columns_to_mat(ambient_dim, gens);
        std::size_t r = hnf_columns(m);
        Sublattice lat;
        lat.ambient_dim_ = ambient_dim;
        lat.basis_.reserve(r);
        for (std::size_t j = 0; j < r; ++j) lat.basis_.push_back(mat_column(m, j));
        return lat;
    }

    static Sublattice zero(std::size_t ambient_dim) { return from_generators(ambient_dim, {}); }

    static Sublattice full(std::size_t ambient_dim) {
        std::vector<IntVector> gens;
        for (std::size_t i = 0; i < ambient_dim; ++i) gens.push_back(unit_vector(ambient_dim, i));
        return from_generators(ambient_dim, gens);
    }

    std::size_t ambient_dim() const { return ambient_dim_; }
    std::size_t rank() const { return basis_.size(); }
    const std::vector<IntVector>& basis() const { return basis_; }

    friend bool operator==(const Sublattice& a, const Sublattice& b) {
        return a.ambient_dim_ == b.ambient_dim_ && a.basis_ == b.basis_;
    }
    friend bool operator!=(const Sublattice& a, const Sublattice& b) { return !(a == b); }

    // Row index of the first nonzero entry of basis column j.
    std::size_t pivot_row(std::size_t j) const {
        for (std::size_t i = 0; i < ambient_dim_; ++i)
            if (basis_[j][i] != 0) return i;
        throw std::logic_error("zero basis column");
    }

    bool contains(const IntVector& v) const {
        if (v.dim() != ambient_dim_) throw std::invalid_argument("contains: dimension mismatch");
        IntVector w = v;
        for (std::size_t j = 0; j < basis_.size(); ++j) {
            std::size_t p = pivot_row(j);
            Int piv = basis_[j][p];
            if (w[p] % piv != 0) return false;
            w = w - (w[p] / piv) * basis_[j];
        }
        return w.is_zero();
    }

    // Unique representative of v + L with coordinate in [0, pivot) at every
    // pivot row; defines the canonical offset of affine lattices.
    IntVector reduce_mod(const IntVector& v) const {
        IntVector w = v;
        for (std::size_t j = 0; j < basis_.size(); ++j) {
            std::size_t p = pivot_row(j);
            w = w - floor_div(w[p], basis_[j][p]) * basis_[j];
        }
        return w;
    }

    // Exact integer Gram determinant det(B^T B); 1 for the zero lattice.
    Int gram_det() const {
        const std::size_t s = rank();
        IMat g = imat(s, s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) g[i][j] = dot(basis_[i], basis_[j]);
        return bareiss_det(g);
    }

  private:
    std::size_t ambient_dim_;
    std::vector<IntVector> basis_;
};

inline Sublattice hnf_canonicalize(std::size_t ambient_dim, const std::vector<IntVector>& gens) {
    return Sublattice::from_generators(ambient_dim, gens);
}

inline double covolume(const Sublattice& lat) {
    return std::sqrt(static_cast<double>(lat.gram_det()));
}

// Smallest primitive sublattice containing lat: lsp(lat) ∩ Z^d. Diagonalizes
// the basis by unimodular row and column operations while tracking the inverse
// of the row transform; the tracked columns at the diagonal positions generate
// the saturation.
inline Sublattice saturate(const Sublattice& lat) {
    const std::size_t d = lat.ambient_dim();
    const std::size_t s = lat.rank();
    if (s == 0) return lat;
    IMat a = columns_to_mat(d, lat.basis());
    IMat winv = identity_mat(d);  // maintained as U^{-1} for row ops U·a

    auto row_swap = [&](std::size_t i, std::size_t j) {
        std::swap(a[i], a[j]);
        detail::col_swap(winv, i, j);
    };
    // rows (i,j) of a <- (p*row_i + q*row_j, r*row_i + s2*row_j); winv gets the
    // inverse block applied on columns.
    auto row_combine = [&](std::size_t i, std::size_t j, Int p, Int q, Int r, Int s2) {
        for (std::size_t c = 0; c < s; ++c) {
            Int vi = a[i][c], vj = a[j][c];
            a[i][c] = checked_add(checked_mul(p, vi), checked_mul(q, vj));
            a[j][c] = checked_add(checked_mul(r, vi), checked_mul(s2, vj));
        }
        detail::col_combine(winv, i, j, s2, checked_neg(r), checked_neg(q), p);
    };

    std::size_t npiv = 0;
    for (std::size_t col = 0; col < s; ++col) {
        // pivot search in rows >= npiv
        std::size_t pr = npiv;
        while (pr < d && a[pr][col] == 0) ++pr;
        if (pr == d) continue;
        if (pr != npiv) row_swap(npiv, pr);
        // clear the column below the pivot with gcd row combinations
        for (std::size_t i = npiv + 1; i < d; ++i) {
            if (a[i][col] == 0) continue;
            auto [g, p, q] = detail::ext_gcd(a[npiv][col], a[i][col]);
            Int ap = a[npiv][col] / g, ai = a[i][col] / g;
            row_combine(npiv, i, p, q, checked_neg(ai), ap);
        }
        ++npiv;
    }
    if (npiv != s) throw std::logic_error("saturate: dependent canonical basis");
    std::vector<IntVector> gens;
    for (std::size_t j = 0; j < npiv; ++j) gens.push_back(mat_column(winv, j));
    return Sublattice::from_generators(d, gens);
}

inline bool is_primitive(const Sublattice& lat) { return saturate(lat) == lat; }

// Integer kernel {x : x ⟂ every basis vector}; always primitive.
inline Sublattice perp(const Sublattice& lat) {
    const std::size_t d = lat.ambient_dim();
    const std::size_t s = lat.rank();
    if (s == 0) return Sublattice::full(d);
    IMat bt = imat(s, d);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < d; ++j) bt[i][j] = lat.basis()[i][j];
    IMat u;
    std::size_t r = hnf_columns(bt, &u);
    std::vector<IntVector> gens;
    for (std::size_t j = r; j < d; ++j) gens.push_back(mat_column(u, j));
    return Sublattice::from_generators(d, gens);
}

// Exact orthogonal projection of v onto lsp(lat).
inline std::vector<Rational> project_span(const IntVector& v, const Sublattice& lat) {
    const std::size_t d = lat.ambient_dim();
    const std::size_t s = lat.rank();
    if (v.dim() != d) throw std::invalid_argument("project_span: dimension mismatch");
    std::vector<Rational> out(d, Rational(0));
    if (s == 0) return out;
    // solve (B^T B) c = B^T v by rational Gaussian elimination
    std::vector<std::vector<Rational>> aug(s, std::vector<Rational>(s + 1));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) aug[i][j] = Rational(dot(lat.basis()[i], lat.basis()[j]));
        aug[i][s] = Rational(dot(lat.basis()[i], v));
    }
    for (std::size_t k = 0; k < s; ++k) {
        std::size_t p = k;
        while (p < s && aug[p][k].is_zero()) ++p;
        if (p == s) throw std::logic_error("singular Gram matrix");
        std::swap(aug[k], aug[p]);
        for (std::size_t i = 0; i < s; ++i) {
            if (i == k || aug[i][k].is_zero()) continue;
            Rational f = aug[i][k] / aug[k][k];
            for (std::size_t j = k; j <= s; ++j) aug[i][j] = aug[i][j] - f * aug[k][j];
        }
    }
    for (std::size_t i = 0; i < s; ++i) {
        Rational c = aug[i][s] / aug[i][i];
        for (std::size_t j = 0; j < d; ++j) out[j] = out[j] + c * Rational(lat.basis()[i][j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Affine sublattices Γ = q + Λ
// ---------------------------------------------------------------------------

class AffineSublattice {
  public:
    AffineSublattice() = default;
    AffineSublattice(const IntVector& offset, Sublattice direction)
        : direction_(std::move(direction)) {
        if (offset.dim() != direction_.ambient_dim())
            throw std::invalid_argument("affine offset dimension mismatch");
        offset_ = direction_.reduce_mod(offset);
    }

    static AffineSublattice full(std::size_t d) {
        return AffineSublattice(IntVector(d), Sublattice::full(d));
    }

    const IntVector& offset() const { return offset_; }
    const Sublattice& direction() const { return direction_; }
    std::size_t ambient_dim() const { return direction_.ambient_dim(); }
    std::size_t rank() const { return direction_.rank(); }

    bool contains(const IntVector& v) const { return direction_.contains(v - offset_); }

    AffineSublattice translated(const IntVector& p) const {
        return AffineSublattice(offset_ + p, direction_);
    }

    friend bool operator==(const AffineSublattice& a, const AffineSublattice& b) {
        return a.offset_ == b.offset_ && a.direction_ == b.direction_;
    }
    friend bool operator!=(const AffineSublattice& a, const AffineSublattice& b) { return !(a == b); }
    friend bool operator<(const AffineSublattice& a, const AffineSublattice& b) {
        if (a.offset_ != b.offset_) return a.offset_ < b.offset_;
        return a.direction_.basis() < b.direction_.basis();
    }

  private:
    IntVector offset_;
    Sublattice direction_;
};

// Smallest primitive affine sublattice containing the given points.
inline AffineSublattice affine_hull(const std::vector<IntVector>& points) {
    if (points.empty()) throw std::invalid_argument("affine_hull of empty point set");
    std::vector<IntVector> diffs;
    for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(points[i] - points[0]);
    Sublattice dir = saturate(Sublattice::from_generators(points[0].dim(), diffs));
    return AffineSublattice(points[0], dir);
}

// ---------------------------------------------------------------------------
// Orbit counting for the translation action Λ⊥ ↷ A_Λ
// ---------------------------------------------------------------------------

struct OrbitCensus {
    Sublattice lattice;
    std::vector<AffineSublattice> class_reps;
    Int class_count = 0;
};

// Enumerates representatives of A_Λ/Λ⊥ through the bijection q + Λ ↦
// proj_{Λ⊥}(q): the projected lattice proj_{Λ⊥}(Z^d) is computed exactly in
// rational arithmetic (scaled by a common denominator) and its cosets modulo
// Λ⊥ are listed from the triangular residue system of the coordinate matrix.
inline OrbitCensus orbit_census(const Sublattice& lat) {
    if (!is_primitive(lat)) throw std::invalid_argument("orbit_census requires a primitive lattice");
    const std::size_t d = lat.ambient_dim();

    // proj_{Λ⊥} e_i = e_i - proj_Λ e_i, exact rationals
    std::vector<std::vector<Rational>> proj(d, std::vector<Rational>(d));
    Int den = 1;
    for (std::size_t i = 0; i < d; ++i) {
        auto onto = project_span(unit_vector(d, i), lat);
        for (std::size_t r = 0; r < d; ++r) {
            proj[i][r] = Rational(i == r ? 1 : 0) - onto[r];
            den = checked_mul(den / gcd_int(den, proj[i][r].den()), proj[i][r].den());
        }
    }
    std::vector<IntVector> scaled(d, IntVector(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t r = 0; r < d; ++r) {
            Rational s = proj[i][r] * Rational(den);
            if (!s.is_integer()) throw std::logic_error("denominator scaling failed");
            scaled[i][r] = s.num();
        }

    // basis of den·proj_{Λ⊥}(Z^d) with generator pullbacks
    IMat w = columns_to_mat(d, scaled);
    IMat t;
    std::size_t r_tilde = hnf_columns(w, &t);
    if (r_tilde != d - lat.rank()) throw std::logic_error("projected lattice has wrong rank");

    OrbitCensus census;
    census.lattice = lat;

    // coordinates of den·Λ⊥ in the projected basis (exact, must be integral)
    Sublattice perp_lat = perp(lat);
    IMat coords = imat(r_tilde, r_tilde);
    for (std::size_t l = 0; l < perp_lat.rank(); ++l) {
        IntVector target = den * perp_lat.basis()[l];
        for (std::size_t j = 0; j < r_tilde; ++j) {
            // forward substitution along the echelon pivots
            std::size_t p = 0;
            while (w[p][j] == 0) ++p;
            if (target[p] % w[p][j] != 0) throw std::logic_error("Λ⊥ not inside projected lattice");
            Int c = target[p] / w[p][j];
            coords[j][l] = c;
            target = target - c * mat_column(w, j);
        }
        if (!target.is_zero()) throw std::logic_error("coordinate expansion failed");
    }

    std::size_t rank_a = hnf_columns(coords);
    if (rank_a != r_tilde) throw std::logic_error("Λ⊥ coordinates not full rank");
    Int count = 1;
    std::vector<Int> diag(r_tilde);
    for (std::size_t j = 0; j < r_tilde; ++j) {
        diag[j] = coords[j][j];
        count = checked_mul(count, diag[j]);
    }
    census.class_count = count;

    // residue system: 0 <= x_j < diag_j componentwise over the triangular form
    std::vector<Int> x(r_tilde, 0);
    while (true) {
        IntVector q(d);
        for (std::size_t j = 0; j < r_tilde; ++j)
            for (std::size_t i = 0; i < d; ++i)
                q[i] = checked_add(q[i], checked_mul(x[j], t[i][j]));
        census.class_reps.emplace_back(q, lat);
        std::size_t j = 0;
        while (j < r_tilde) {
            if (++x[j] < diag[j]) break;
            x[j] = 0;
            ++j;
        }
        if (j == r_tilde) break;
    }
    if (static_cast<Int>(census.class_reps.size()) != count)
        throw std::logic_error("orbit enumeration count mismatch");
    return census;
}

}  // namespace torobs
