#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/freqpoint.hpp"
#include "torobs/lattice.hpp"
#include "torobs/parallel.hpp"

namespace torobs {

// Point (n, k) on the paraboloid: n = -|k|^2 exactly.
struct SigmaPoint {
    Int n = 0;
    IntVector k;

    SigmaPoint() = default;
    explicit SigmaPoint(IntVector k_) : n(checked_neg(norm_sq(k_))), k(std::move(k_)) {}

    FreqPoint freq() const { return FreqPoint(n, k); }

    friend bool operator==(const SigmaPoint& a, const SigmaPoint& b) { return a.k == b.k; }
    friend bool operator<(const SigmaPoint& a, const SigmaPoint& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.k < b.k;
    }
};

inline Int dist_sq(const SigmaPoint& a, const SigmaPoint& b) {
    Int dn = checked_sub(a.n, b.n);
    Int s = checked_mul(dn, dn);
    for (std::size_t j = 0; j < a.k.dim(); ++j) {
        Int dk = checked_sub(a.k[j], b.k[j]);
        s = checked_add(s, checked_mul(dk, dk));
    }
    return s;
}

// Lattice points of Γ in the Euclidean ball |k| <= freq_bound, lexicographic.
inline std::vector<IntVector> boxed_points(const AffineSublattice& gamma, Int freq_bound) {
    if (freq_bound < 0) throw std::invalid_argument("freq_bound must be >= 0");
    const std::size_t d = gamma.ambient_dim();
    const std::size_t s = gamma.rank();
    const IntVector& q = gamma.offset();
    const Int bound_sq = checked_mul(freq_bound, freq_bound);
    std::vector<IntVector> out;
    if (s == 0) {
        if (norm_sq(q) <= bound_sq) out.push_back(q);
        return out;
    }
    // coefficient box from the dual rows of (B^T B)^{-1} B^T:
    // |c_i| <= ||row_i|| * |p - q| <= ||row_i|| * (F + |q|)
    const auto& basis = gamma.direction().basis();
    std::vector<std::vector<Rational>> gram_aug(s, std::vector<Rational>(2 * s));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) gram_aug[i][j] = Rational(dot(basis[i], basis[j]));
        gram_aug[i][s + i] = Rational(1);
    }
    for (std::size_t kcol = 0; kcol < s; ++kcol) {
        std::size_t p = kcol;
        while (gram_aug[p][kcol].is_zero()) ++p;
        std::swap(gram_aug[kcol], gram_aug[p]);
        for (std::size_t i = 0; i < s; ++i) {
            if (i == kcol) continue;
            Rational f = gram_aug[i][kcol] / gram_aug[kcol][kcol];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j < 2 * s; ++j)
                gram_aug[i][j] = gram_aug[i][j] - f * gram_aug[kcol][j];
        }
    }
    double reach = static_cast<double>(freq_bound) + std::sqrt(static_cast<double>(norm_sq(q)));
    std::vector<Int> lo(s), hi(s);
    for (std::size_t i = 0; i < s; ++i) {
        // row_i of G^{-1} B^T
        double row_norm_sq = 0.0;
        for (std::size_t col = 0; col < d; ++col) {
            Rational e(0);
            for (std::size_t j = 0; j < s; ++j)
                e = e + (gram_aug[i][s + j] / gram_aug[i][i]) * Rational(basis[j][col]);
            row_norm_sq += e.to_double() * e.to_double();
        }
        Int b = static_cast<Int>(std::floor(std::sqrt(row_norm_sq) * reach)) + 1;
        lo[i] = -b;
        hi[i] = b;
    }
    std::vector<Int> c(lo);
    while (true) {
        IntVector p = q;
        for (std::size_t i = 0; i < s; ++i) p = p + c[i] * basis[i];
        if (norm_sq(p) <= bound_sq) out.push_back(p);
        std::size_t i = 0;
        while (i < s) {
            if (++c[i] <= hi[i]) break;
            c[i] = lo[i];
            ++i;
        }
        if (i == s) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<SigmaPoint> sigma_points(const AffineSublattice& gamma, Int freq_bound) {
    std::vector<SigmaPoint> pts;
    for (auto& k : boxed_points(gamma, freq_bound)) pts.emplace_back(k);
    std::sort(pts.begin(), pts.end());
    return pts;
}

enum class ClusterKind { flat, sharp };

struct Cluster {
    Int id = 0;
    std::vector<SigmaPoint> points;   // Q^α, sorted
    std::vector<IntVector> shadow;    // Z^α, sorted
    AffineSublattice hull;            // smallest primitive affine sublattice over the shadow
    ClusterKind kind = ClusterKind::sharp;
    bool truncated = false;
};

struct ClusterDecomposition {
    AffineSublattice gamma;
    Int scale = 1;       // R
    Int freq_bound = 0;  // F
    std::vector<Cluster> clusters;
};

inline ClusterKind classify(const Cluster& cluster, const AffineSublattice& gamma) {
    return cluster.hull.rank() == gamma.rank() ? ClusterKind::flat : ClusterKind::sharp;
}

// Connected components of the graph on Σ(Γ) ∩ {|k| <= F} with edges at
// distance <= 100R, by union-find over exact squared distances.
inline ClusterDecomposition decompose(const AffineSublattice& gamma, Int scale, Int freq_bound) {
    if (scale < 1) throw std::invalid_argument("cluster scale must be >= 1");
    std::vector<SigmaPoint> pts = sigma_points(gamma, freq_bound);
    const std::size_t n = pts.size();
    const Int reach_sq = checked_mul(checked_mul(100, scale), checked_mul(100, scale));

    std::vector<std::size_t> parent(n), size(n, 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];  // path halving
            x = parent[x];
        }
        return x;
    };
    auto merge = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    };

    // points are sorted by n, so |n_j - n_i| > 100R lets the inner scan stop
    const Int reach = checked_mul(100, scale);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (pts[j].n - pts[i].n > reach) break;
            if (dist_sq(pts[i], pts[j]) <= reach_sq) merge(i, j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) buckets[find(i)].push_back(i);

    ClusterDecomposition dec;
    dec.gamma = gamma;
    dec.scale = scale;
    dec.freq_bound = freq_bound;

    const Int margin = checked_sub(freq_bound, reach);
    for (auto& [root, members] : buckets) {
        Cluster c;
        for (std::size_t i : members) c.points.push_back(pts[i]);
        std::sort(c.points.begin(), c.points.end());
        for (auto& p : c.points) c.shadow.push_back(p.k);
        std::sort(c.shadow.begin(), c.shadow.end());
        c.hull = affine_hull(c.shadow);
        c.kind = classify(c, gamma);
        c.truncated = margin < 0;
        if (!c.truncated)
            for (auto& p : c.points)
                if (norm_sq(p.k) > checked_mul(margin, margin)) {
                    c.truncated = true;
                    break;
                }
        dec.clusters.push_back(std::move(c));
    }
    std::sort(dec.clusters.begin(), dec.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.points[0] < b.points[0]; });
    for (std::size_t i = 0; i < dec.clusters.size(); ++i) dec.clusters[i].id = static_cast<Int>(i);
    return dec;
}

// ---------------------------------------------------------------------------
// Neighborhoods N^α (|n+|k|^2| <= 10R over the shadow) and the far region N^c
// ---------------------------------------------------------------------------

struct NeighborhoodSplit {
    Int scale = 1;
    Int time_bound = 0;
    Int freq_bound = 0;
    std::vector<std::vector<FreqPoint>> near;  // indexed by cluster id

    Int window() const { return checked_mul(10, scale); }

    bool in_far(const FreqPoint& p) const {
        if (std::abs(p.n) > time_bound) return false;
        if (norm_sq(p.k) > checked_mul(freq_bound, freq_bound)) return false;
        return std::abs(paraboloid_offset(p)) > window();
    }
};

// Default temporal box: covers |n + |k|^2| <= 10R over the whole frequency box.
inline Int default_time_bound(const ClusterDecomposition& dec, Int user_value = 0) {
    Int base = checked_add(checked_mul(10, dec.scale),
                           checked_mul(dec.freq_bound, dec.freq_bound));
    return std::max(base, user_value);
}

inline NeighborhoodSplit neighborhoods(const ClusterDecomposition& dec, Int time_bound) {
    NeighborhoodSplit split;
    split.scale = dec.scale;
    split.time_bound = time_bound;
    split.freq_bound = dec.freq_bound;
    const Int w = split.window();
    Int max_k_sq = 0;
    for (auto& c : dec.clusters)
        for (auto& p : c.points) max_k_sq = std::max(max_k_sq, norm_sq(p.k));
    if (time_bound < checked_add(max_k_sq, w))
        throw std::invalid_argument("time_bound too small to cover |n+|k|^2| <= 10R");
    split.near.resize(dec.clusters.size());
    for (auto& c : dec.clusters) {
        auto& bucket = split.near[c.id];
        for (auto& k : c.shadow) {
            Int m = norm_sq(k);
            for (Int n = -m - w; n <= -m + w; ++n) bucket.emplace_back(n, k);
        }
        std::sort(bucket.begin(), bucket.end());
    }
    return split;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct ClusterRow {
    Int id = 0;
    Int size = 0;
    Int diameter_sq = 0;
    ClusterKind kind = ClusterKind::sharp;
    bool truncated = false;
    Int hull_rank = 0;
    double max_shadow_proj = 0.0;  // sup |proj_Λ k| over the shadow
};

struct ClusterStats {
    std::vector<ClusterRow> rows;
    Int min_separation_sq = -1;  // min over distinct cluster pairs, -1 if < 2 clusters
    Int flat_count = 0;
    Int sharp_count = 0;
};

inline Int cluster_diameter_sq(const Cluster& c) {
    Int best = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i)
        for (std::size_t j = i + 1; j < c.points.size(); ++j)
            best = std::max(best, dist_sq(c.points[i], c.points[j]));
    return best;
}

inline ClusterStats cluster_stats(const ClusterDecomposition& dec) {
    ClusterStats st;
    const Sublattice& lambda = dec.gamma.direction();
    for (auto& c : dec.clusters) {
        ClusterRow row;
        row.id = c.id;
        row.size = static_cast<Int>(c.points.size());
        row.diameter_sq = cluster_diameter_sq(c);
        row.kind = c.kind;
        row.truncated = c.truncated;
        row.hull_rank = static_cast<Int>(c.hull.rank());
        double best = 0.0;
        for (auto& k : c.shadow) {
            auto pr = project_span(k, lambda);
            double s = 0.0;
            for (auto& e : pr) s += e.to_double() * e.to_double();
            best = std::max(best, std::sqrt(s));
        }
        row.max_shadow_proj = best;
        (c.kind == ClusterKind::flat ? st.flat_count : st.sharp_count)++;
        st.rows.push_back(row);
    }

    // global minimum cross-cluster separation, single flat sweep
    std::vector<SigmaPoint> all;
    std::vector<Int> label;
    for (auto& c : dec.clusters)
        for (auto& p : c.points) {
            all.push_back(p);
            label.push_back(c.id);
        }
    if (dec.clusters.size() >= 2) {
        std::vector<std::size_t> order(all.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });
        std::vector<Int> partial(order.size(), -1);
        parallel_for(order.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t oi = lo; oi < hi; ++oi) {
                std::size_t i = order[oi];
                Int best = -1;
                for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                    std::size_t j = order[oj];
                    if (label[i] == label[j]) continue;
                    Int d2 = dist_sq(all[i], all[j]);
                    if (best < 0 || d2 < best) best = d2;
                }
                partial[oi] = best;
            }
        });
        Int best = -1;
        for (Int v : partial)
            if (v >= 0 && (best < 0 || v < best)) best = v;
        st.min_separation_sq = best;
    }
    return st;
}

// Exact minimum squared distance between N^α and N^β over distinct clusters,
// minimized over the unclipped vertical windows: for shadow points k, k' the
// nearest (n, n') pair contributes max(0, ||k|^2-|k'|^2| - 20R)^2 + |k-k'|^2.
inline Int min_neighborhood_separation_sq(const ClusterDecomposition& dec) {
    Int best = -1;
    const Int two_w = checked_mul(20, dec.scale);
    for (std::size_t a = 0; a < dec.clusters.size(); ++a)
        for (std::size_t b = a + 1; b < dec.clusters.size(); ++b)
            for (auto& k : dec.clusters[a].shadow)
                for (auto& kp : dec.clusters[b].shadow) {
                    Int gap = std::abs(checked_sub(norm_sq(k), norm_sq(kp)));
                    Int dn = gap > two_w ? checked_sub(gap, two_w) : 0;
                    Int d2 = checked_mul(dn, dn);
                    for (std::size_t j = 0; j < k.dim(); ++j) {
                        Int dk = checked_sub(k[j], kp[j]);
                        d2 = checked_add(d2, checked_mul(dk, dk));
                    }
                    if (best < 0 || d2 < best) best = d2;
                }
    return best;
}

}  // namespace torobs
