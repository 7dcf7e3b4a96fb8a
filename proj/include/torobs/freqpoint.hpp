#pragma once

#include <cstddef>
#include <functional>

#include "torobs/common.hpp"
#include "torobs/lattice.hpp"

namespace torobs {

// Space-time frequency (n, k) in Z^{1+d}.
struct FreqPoint {
    Int n = 0;
    IntVector k;

    FreqPoint() = default;
    FreqPoint(Int n_, IntVector k_) : n(n_), k(std::move(k_)) {}

    friend bool operator==(const FreqPoint& a, const FreqPoint& b) {
        return a.n == b.n && a.k == b.k;
    }
    friend bool operator!=(const FreqPoint& a, const FreqPoint& b) { return !(a == b); }
    friend bool operator<(const FreqPoint& a, const FreqPoint& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.k < b.k;
    }
};

// Squared Euclidean distance in Z^{1+d}, exact.
inline Int dist_sq(const FreqPoint& a, const FreqPoint& b) {
    Int dn = checked_sub(a.n, b.n);
    Int s = checked_mul(dn, dn);
    for (std::size_t i = 0; i < a.k.dim(); ++i) {
        Int dk = checked_sub(a.k[i], b.k[i]);
        s = checked_add(s, checked_mul(dk, dk));
    }
    return s;
}

// Distance of (n, k) from the paraboloid point over the same k.
inline Int paraboloid_offset(const FreqPoint& p) { return checked_add(p.n, norm_sq(p.k)); }

struct FreqPointHash {
    std::size_t operator()(const FreqPoint& p) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        };
        mix(static_cast<std::uint64_t>(p.n));
        for (Int c : p.k.coords) mix(static_cast<std::uint64_t>(c));
        return static_cast<std::size_t>(h);
    }
};

}  // namespace torobs
