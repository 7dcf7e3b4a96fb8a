#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "torobs/lattice.hpp"

using namespace torobs;

namespace {

Sublattice span2(std::initializer_list<IntVector> gens) {
    std::vector<IntVector> v(gens);
    return Sublattice::from_generators(v.front().dim(), v);
}

// Oracle: saturation by brute-force membership scan over a coordinate box.
Sublattice saturate_by_box_scan(const Sublattice& lat, Int box) {
    std::vector<IntVector> members;
    const std::size_t d = lat.ambient_dim();
    std::vector<Int> c(d, -box);
    while (true) {
        IntVector p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = c[i];
        auto proj = project_span(p, lat);
        bool in_span = true;
        for (std::size_t i = 0; i < d; ++i)
            if (proj[i] != Rational(p[i])) in_span = false;
        if (in_span && !p.is_zero()) members.push_back(p);
        std::size_t i = 0;
        while (i < d) {
            if (++c[i] <= box) break;
            c[i] = -box;
            ++i;
        }
        if (i == d) break;
    }
    return Sublattice::from_generators(d, members);
}

// Oracle: integer kernel by brute-force orthogonality scan over a box.
Sublattice perp_by_box_scan(const Sublattice& lat, Int box) {
    std::vector<IntVector> members;
    const std::size_t d = lat.ambient_dim();
    std::vector<Int> c(d, -box);
    while (true) {
        IntVector p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = c[i];
        bool orth = true;
        for (auto& b : lat.basis())
            if (dot(p, b) != 0) orth = false;
        if (orth && !p.is_zero()) members.push_back(p);
        std::size_t i = 0;
        while (i < d) {
            if (++c[i] <= box) break;
            c[i] = -box;
            ++i;
        }
        if (i == d) break;
    }
    return Sublattice::from_generators(d, members);
}

// Oracle: number of cosets of Λ ⊕ Λ⊥ in Z^d (= #(A_Λ/Λ⊥)) by enumerating the
// canonical residues of the combined full-rank lattice over its pivot box.
Int class_count_by_coset_scan(const Sublattice& lat) {
    const std::size_t d = lat.ambient_dim();
    std::vector<IntVector> gens = lat.basis();
    Sublattice perp_lat = perp(lat);
    for (auto& b : perp_lat.basis()) gens.push_back(b);
    Sublattice combined = Sublattice::from_generators(d, gens);
    REQUIRE(combined.rank() == d);
    std::vector<Int> pivot(d);
    for (std::size_t j = 0; j < d; ++j) pivot[j] = combined.basis()[j][combined.pivot_row(j)];
    std::set<std::vector<Int>> residues;
    std::vector<Int> c(d, 0);
    while (true) {
        IntVector p(d);
        for (std::size_t j = 0; j < d; ++j) p[combined.pivot_row(j)] = c[j];
        residues.insert(combined.reduce_mod(p).coords);
        std::size_t j = 0;
        while (j < d) {
            if (++c[j] < pivot[j]) break;
            c[j] = 0;
            ++j;
        }
        if (j == d) break;
    }
    return static_cast<Int>(residues.size());
}

Sublattice random_lattice(Rng& rng, std::size_t d, std::size_t count, Int entry_bound) {
    std::vector<IntVector> gens;
    for (std::size_t i = 0; i < count; ++i) {
        IntVector v(d);
        for (std::size_t j = 0; j < d; ++j) v[j] = rng.uniform_int(-entry_bound, entry_bound);
        gens.push_back(v);
    }
    return Sublattice::from_generators(d, gens);
}

// Random unimodular re-combination of the generators of a lattice.
std::vector<IntVector> shuffled_generators(Rng& rng, const Sublattice& lat, int steps) {
    std::vector<IntVector> gens = lat.basis();
    if (gens.empty()) return gens;
    for (int s = 0; s < steps; ++s) {
        std::size_t i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(gens.size()) - 1));
        std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(gens.size()) - 1));
        switch (rng.uniform_int(0, 2)) {
            case 0:
                if (i != j) gens[i] = gens[i] + rng.uniform_int(-3, 3) * gens[j];
                break;
            case 1:
                std::swap(gens[i], gens[j]);
                break;
            default:
                gens[i] = -gens[i];
        }
    }
    return gens;
}

}  // namespace

TEST_CASE("integer overflow is a hard error, never a wrap") {
    Int big = std::numeric_limits<Int>::max() / 2;
    CHECK_THROWS_AS(checked_mul(big, 4), overflow_error);
    CHECK_THROWS_AS(checked_add(big, big + 2), overflow_error);
    IntVector huge{big, big};
    CHECK_THROWS_AS(norm_sq(huge), overflow_error);
    CHECK(checked_mul(big, 2) == std::numeric_limits<Int>::max() - 1);
}

TEST_CASE("hnf canonicalization fixed points and examples") {
    Sublattice z2 = Sublattice::full(2);
    CHECK(z2.rank() == 2);
    CHECK(z2.basis()[0] == IntVector{1, 0});
    CHECK(z2.basis()[1] == IntVector{0, 1});

    // {(2,4),(1,3)} generates the index-2 lattice with canonical basis {(1,1),(0,2)}
    Sublattice lat = span2({IntVector{2, 4}, IntVector{1, 3}});
    REQUIRE(lat.rank() == 2);
    CHECK(lat.basis()[0] == IntVector{1, 1});
    CHECK(lat.basis()[1] == IntVector{0, 2});
    CHECK(lat.gram_det() == 4);  // det = 2, Gram det = 4

    // unimodular reshuffles give the identical canonical record
    Sublattice same = span2({IntVector{1, 3}, IntVector{2, 4}});
    CHECK(same == lat);
    Sublattice combo = span2({IntVector{1, 1} + IntVector{0, 2}, IntVector{0, -2}});
    CHECK(combo == lat);

    // dependent generators are allowed
    Sublattice dep = span2({IntVector{1, 1}, IntVector{2, 2}, IntVector{0, 2}});
    CHECK(dep == lat);

    CHECK_THROWS_AS(Sublattice::from_generators(0, {}), std::invalid_argument);
}

TEST_CASE("canonicality under random unimodular generator changes") {
    Rng rng(20260808);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 4));
        std::size_t count = static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d)));
        Sublattice lat = random_lattice(rng, d, count, 20);
        Sublattice again = Sublattice::from_generators(d, shuffled_generators(rng, lat, 8));
        CHECK(lat == again);
        CHECK(Sublattice::from_generators(d, lat.basis()) == lat);  // idempotent
    }
}

TEST_CASE("saturation: examples and box-scan oracle") {
    CHECK(saturate(Sublattice::full(3)) == Sublattice::full(3));

    Sublattice doubled = span2({IntVector{2, 2}});
    Sublattice sat = saturate(doubled);
    CHECK(sat == span2({IntVector{1, 1}}));
    CHECK(sat == saturate_by_box_scan(doubled, 3));

    Sublattice two_z2 = span2({IntVector{2, 0}, IntVector{0, 2}});
    CHECK(saturate(two_z2) == Sublattice::full(2));
    CHECK(saturate(two_z2) == saturate_by_box_scan(two_z2, 3));

    CHECK(is_primitive(Sublattice::full(4)));
    CHECK(is_primitive(span2({IntVector{1, 1}})));
    CHECK_FALSE(is_primitive(span2({IntVector{2, 2}})));
}

TEST_CASE("saturation properties on random lattices") {
    Rng rng(77001);
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 4));
        std::size_t count = static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d)));
        Sublattice lat = random_lattice(rng, d, count, 12);
        Sublattice sat = saturate(lat);
        CHECK(saturate(sat) == sat);
        CHECK(sat.rank() == lat.rank());
        // index: Gram-determinant ratio is a perfect square of an integer >= 1
        Int num = lat.gram_det(), den = sat.gram_det();
        REQUIRE(den > 0);
        CHECK(num % den == 0);
        Int ratio = num / den;
        CHECK(isqrt(ratio) * isqrt(ratio) == ratio);
        CHECK(ratio >= 1);
        // the saturation contains the lattice
        for (auto& b : lat.basis()) CHECK(sat.contains(b));
        // perp∘perp recovers the saturation
        CHECK(perp(perp(lat)) == sat);
    }
}

TEST_CASE("covolume: examples") {
    CHECK(covolume(Sublattice::full(2)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(span2({IntVector{1, 1}}).gram_det() == 2);
    CHECK(covolume(span2({IntVector{1, 1}})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(span2({IntVector{1, 2}}).gram_det() == 5);
    CHECK(covolume(span2({IntVector{1, 2}})) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(covolume(Sublattice::zero(3)) == 1.0);
}

TEST_CASE("perp: examples and box-scan oracle") {
    CHECK(perp(Sublattice::full(3)).rank() == 0);
    CHECK(perp(Sublattice::zero(3)) == Sublattice::full(3));

    Sublattice diag = span2({IntVector{1, 1}});
    CHECK(perp(diag) == span2({IntVector{1, -1}}));
    CHECK(perp(diag) == perp_by_box_scan(diag, 3));

    Rng rng(424242);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 4));
        Sublattice lat = random_lattice(rng, d, static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d))), 9);
        Sublattice pl = perp(lat);
        CHECK(is_primitive(pl));
        CHECK(pl.rank() == d - saturate(lat).rank());
        for (auto& b : lat.basis())
            for (auto& p : pl.basis()) CHECK(dot(b, p) == 0);
    }
}

TEST_CASE("covolume duality for primitive lattices") {
    Rng rng(5150);
    int tested = 0;
    while (tested < 300) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 4));
        Sublattice lat = saturate(random_lattice(rng, d, static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d))), 14));
        CHECK(std::abs(covolume(perp(lat)) - covolume(lat)) <= 1e-9);
        ++tested;
    }
}

TEST_CASE("project_span: exact rational projection") {
    Sublattice diag = span2({IntVector{1, 1}});
    auto p = project_span(IntVector{3, 1}, diag);
    CHECK(p[0] == Rational(2));
    CHECK(p[1] == Rational(2));

    // v in the span is fixed
    auto fixed = project_span(IntVector{4, 4}, diag);
    CHECK(fixed[0] == Rational(4));
    CHECK(fixed[1] == Rational(4));

    // v orthogonal to the lattice maps to zero
    auto zero = project_span(IntVector{1, -1}, diag);
    CHECK(zero[0] == Rational(0));
    CHECK(zero[1] == Rational(0));

    // residual is orthogonal to every basis vector (random check, d = 3)
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Sublattice lat = random_lattice(rng, 3, 2, 7);
        if (lat.rank() == 0) continue;
        IntVector v{rng.uniform_int(-9, 9), rng.uniform_int(-9, 9), rng.uniform_int(-9, 9)};
        auto proj = project_span(v, lat);
        for (auto& b : lat.basis()) {
            Rational resid(0);
            for (std::size_t i = 0; i < 3; ++i)
                resid = resid + (Rational(v[i]) - proj[i]) * Rational(b[i]);
            CHECK(resid == Rational(0));
        }
    }
}

TEST_CASE("affine sublattices: canonical offsets and hulls") {
    AffineSublattice single(IntVector{3, -2}, Sublattice::zero(2));
    CHECK(single.offset() == IntVector{3, -2});
    CHECK(single.rank() == 0);

    AffineSublattice hull1 = affine_hull({IntVector{0, 0}, IntVector{2, 0}});
    CHECK(hull1.direction() == span2({IntVector{1, 0}}));
    CHECK(hull1.offset() == IntVector{0, 0});

    AffineSublattice hull2 = affine_hull({IntVector{0, 0}, IntVector{1, 1}, IntVector{2, 0}});
    CHECK(hull2.direction() == Sublattice::full(2));

    AffineSublattice pt = affine_hull({IntVector{5, 7}});
    CHECK(pt.rank() == 0);
    CHECK(pt.offset() == IntVector{5, 7});

    CHECK_THROWS_AS(affine_hull({}), std::invalid_argument);

    // canonical equality: shifted offsets inside the lattice compare equal
    AffineSublattice a(IntVector{0, 1}, span2({IntVector{1, 2}}));
    AffineSublattice b(IntVector{1, 3}, span2({IntVector{1, 2}}));
    CHECK(a == b);
    AffineSublattice c(IntVector{1, 1}, span2({IntVector{1, 2}}));
    CHECK(a != c);

    // every input point lies in the hull
    Rng rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<IntVector> pts;
        int n = static_cast<int>(rng.uniform_int(1, 5));
        for (int i = 0; i < n; ++i)
            pts.push_back(IntVector{rng.uniform_int(-9, 9), rng.uniform_int(-9, 9), rng.uniform_int(-9, 9)});
        AffineSublattice hull = affine_hull(pts);
        for (auto& p : pts) CHECK(hull.contains(p));
        CHECK(is_primitive(hull.direction()));
    }
}

TEST_CASE("orbit census: examples") {
    OrbitCensus full = orbit_census(Sublattice::full(3));
    CHECK(full.class_count == 1);
    CHECK(full.class_reps.size() == 1);

    OrbitCensus diag = orbit_census(span2({IntVector{1, 1}}));
    CHECK(diag.class_count == 2);

    OrbitCensus steep = orbit_census(span2({IntVector{1, 2}}));
    CHECK(steep.class_count == 5);

    OrbitCensus zero = orbit_census(Sublattice::zero(2));
    CHECK(zero.class_count == 1);

    CHECK_THROWS_AS(orbit_census(span2({IntVector{2, 2}})), std::invalid_argument);
}

TEST_CASE("orbit census equals squared covolume, cross-checked by coset scan") {
    Rng rng(60606);
    int tested = 0;
    while (tested < 120) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 3));
        Sublattice lat = saturate(random_lattice(rng, d, static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d))), 4));
        if (lat.gram_det() > 25) continue;
        OrbitCensus census = orbit_census(lat);
        CHECK(census.class_count == lat.gram_det());
        CHECK(census.class_count ==
              static_cast<Int>(std::llround(covolume(lat) * covolume(lat))));
        CHECK(census.class_count == class_count_by_coset_scan(lat));
        // representatives are pairwise inequivalent under Λ ⊕ Λ⊥ translation
        std::vector<IntVector> gens = lat.basis();
        Sublattice perp_lat = perp(lat);
        for (auto& b : perp_lat.basis()) gens.push_back(b);
        Sublattice combined = Sublattice::from_generators(d, gens);
        std::set<std::vector<Int>> seen;
        for (auto& rep : census.class_reps)
            seen.insert(combined.reduce_mod(rep.offset()).coords);
        CHECK(static_cast<Int>(seen.size()) == census.class_count);
        ++tested;
    }
}
