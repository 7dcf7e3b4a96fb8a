#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "torobs/paraboloid.hpp"

using namespace torobs;

namespace {

// Oracle: connected components by direct O(N^2) adjacency and BFS, no
// union-find involved.
std::vector<std::vector<SigmaPoint>> components_by_bfs(const std::vector<SigmaPoint>& pts,
                                                       Int scale) {
    const Int reach_sq = 100 * scale * 100 * scale;
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist_sq(pts[i], pts[j]) <= reach_sq) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    std::vector<bool> seen(n, false);
    std::vector<std::vector<SigmaPoint>> comps;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<std::size_t> stack{i};
        seen[i] = true;
        std::vector<SigmaPoint> comp;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            comp.push_back(pts[v]);
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return comps;
}

AffineSublattice line_gamma(Int offset, Int step) {
    return AffineSublattice(IntVector{offset},
                            Sublattice::from_generators(1, {IntVector{step}}));
}

}  // namespace

TEST_CASE("sigma points: d=1 examples") {
    auto z = sigma_points(AffineSublattice::full(1), 2);
    REQUIRE(z.size() == 5);
    std::set<Int> ks;
    for (auto& p : z) {
        CHECK(p.n == -norm_sq(p.k));
        ks.insert(p.k[0]);
    }
    CHECK(ks == std::set<Int>{-2, -1, 0, 1, 2});

    auto even = sigma_points(line_gamma(0, 2), 2);
    REQUIRE(even.size() == 3);
    std::set<Int> ek;
    for (auto& p : even) ek.insert(p.k[0]);
    CHECK(ek == std::set<Int>{-2, 0, 2});

    auto odd = sigma_points(line_gamma(1, 2), 3);
    REQUIRE(odd.size() == 4);
    std::set<Int> ok;
    for (auto& p : odd) ok.insert(p.k[0]);
    CHECK(ok == std::set<Int>{-3, -1, 1, 3});
}

TEST_CASE("d=1 reference decomposition: R=1, F=60") {
    ClusterDecomposition dec = decompose(AffineSublattice::full(1), 1, 60);
    REQUIRE(dec.clusters.size() == 21);
    std::size_t big = 0, singletons = 0;
    for (auto& c : dec.clusters) {
        if (c.points.size() == 101)
            ++big;
        else if (c.points.size() == 1)
            ++singletons;
    }
    CHECK(big == 1);
    CHECK(singletons == 20);

    // the size-101 cluster is exactly k = -50..50
    for (auto& c : dec.clusters)
        if (c.points.size() == 101) {
            CHECK(c.shadow.front() == IntVector{-50});
            CHECK(c.shadow.back() == IntVector{50});
            CHECK(c.kind == ClusterKind::flat);  // shadow differences generate Z
        } else {
            CHECK(std::abs(c.shadow[0][0]) >= 51);
            CHECK(c.kind == ClusterKind::sharp);  // rank-0 hull in a rank-1 Γ
        }

    // full membership agreement with the direct-graph oracle
    auto oracle = components_by_bfs(sigma_points(AffineSublattice::full(1), 60), 1);
    REQUIRE(oracle.size() == dec.clusters.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(oracle[i] == dec.clusters[i].points);
}

TEST_CASE("decompose edge cases") {
    // single-point Γ in the box: one singleton cluster
    AffineSublattice pt(IntVector{1, 0}, Sublattice::zero(2));
    ClusterDecomposition dec = decompose(pt, 1, 5);
    REQUIRE(dec.clusters.size() == 1);
    CHECK(dec.clusters[0].points.size() == 1);
    CHECK(cluster_diameter_sq(dec.clusters[0]) == 0);

    // a scale beyond the max pairwise distance gives a single cluster
    ClusterDecomposition all = decompose(AffineSublattice::full(1), 1000, 10);
    CHECK(all.clusters.size() == 1);
    CHECK(all.clusters[0].points.size() == 21);

    CHECK_THROWS_AS(decompose(AffineSublattice::full(1), 0, 5), std::invalid_argument);
}

TEST_CASE("boxed lattice points match a brute-force box scan") {
    Rng rng(909);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t d = static_cast<std::size_t>(rng.uniform_int(1, 3));
        std::size_t count = static_cast<std::size_t>(rng.uniform_int(0, static_cast<Int>(d)));
        std::vector<IntVector> gens;
        for (std::size_t i = 0; i < count; ++i) {
            IntVector v(d);
            for (std::size_t j = 0; j < d; ++j) v[j] = rng.uniform_int(-3, 3);
            gens.push_back(v);
        }
        IntVector off(d);
        for (std::size_t j = 0; j < d; ++j) off[j] = rng.uniform_int(-3, 3);
        AffineSublattice gamma(off, saturate(Sublattice::from_generators(d, gens)));
        Int bound = rng.uniform_int(0, 9);

        std::vector<IntVector> fast = boxed_points(gamma, bound);
        std::vector<IntVector> slow;
        std::vector<Int> c(d, -bound);
        while (true) {
            IntVector p(d);
            for (std::size_t j = 0; j < d; ++j) p[j] = c[j];
            if (norm_sq(p) <= bound * bound && gamma.contains(p)) slow.push_back(p);
            std::size_t j = 0;
            while (j < d) {
                if (++c[j] <= bound) break;
                c[j] = -bound;
                ++j;
            }
            if (j == d) break;
        }
        std::sort(slow.begin(), slow.end());
        CHECK(fast == slow);
    }
}

TEST_CASE("cluster decomposition partitions the boxed lattice") {
    for (Int scale : {1, 2}) {
        ClusterDecomposition dec = decompose(AffineSublattice::full(2), scale, 12);
        std::set<std::vector<Int>> covered;
        std::size_t total = 0;
        for (auto& c : dec.clusters) {
            CHECK(c.points.size() == c.shadow.size());
            CHECK(classify(c, dec.gamma) == c.kind);
            for (auto& k : c.shadow) {
                CHECK(c.hull.contains(k));
                covered.insert(k.coords);
                ++total;
            }
        }
        auto boxed = boxed_points(dec.gamma, 12);
        CHECK(total == boxed.size());  // disjoint + covering
        for (auto& k : boxed) CHECK(covered.count(k.coords) == 1);
    }
}

TEST_CASE("cluster separation and path property") {
    // an affine line inside Z^2 has genuine multi-cluster structure
    AffineSublattice line(IntVector{1, 0}, Sublattice::from_generators(2, {IntVector{2, 1}}));
    for (auto [gamma, bound] : {std::pair{AffineSublattice::full(1), Int(160)},
                                std::pair{line, Int(90)}}) {
        ClusterDecomposition dec = decompose(gamma, 1, bound);
        ClusterStats st = cluster_stats(dec);
        REQUIRE(dec.clusters.size() >= 2);
        CHECK(st.min_separation_sq > 100 * 100);
        // within a cluster every point is reachable by hops of length <= 100R
        for (auto& c : dec.clusters) {
            auto comps = components_by_bfs(c.points, 1);
            CHECK(comps.size() == 1);
        }
    }
}

TEST_CASE("classification: rank-0 hull inside a higher-rank Γ is sharp") {
    // any singleton cluster over a Γ of rank >= 1 is sharp
    Cluster singleton;
    singleton.points = {SigmaPoint(IntVector{40, 0})};
    singleton.shadow = {IntVector{40, 0}};
    singleton.hull = affine_hull(singleton.shadow);
    CHECK(singleton.hull.rank() == 0);
    CHECK(classify(singleton, AffineSublattice::full(2)) == ClusterKind::sharp);

    // the same shadow inside a rank-0 Γ is flat
    AffineSublattice point_gamma(IntVector{40, 0}, Sublattice::zero(2));
    CHECK(classify(singleton, point_gamma) == ClusterKind::flat);

    // genuine singletons of a line decomposition are sharp
    AffineSublattice line(IntVector{0, 0}, Sublattice::from_generators(2, {IntVector{1, 0}}));
    ClusterDecomposition dec = decompose(line, 1, 60);
    std::size_t sharp_singletons = 0;
    for (auto& c : dec.clusters)
        if (c.points.size() == 1) {
            CHECK(c.kind == ClusterKind::sharp);
            ++sharp_singletons;
        }
    CHECK(sharp_singletons == 20);
}

TEST_CASE("neighborhoods: split examples and partition") {
    ClusterDecomposition dec = decompose(AffineSublattice::full(1), 1, 4);
    NeighborhoodSplit split = neighborhoods(dec, 40);

    // (12, 0) is far: |12 + 0| > 10
    CHECK(split.in_far(FreqPoint(12, IntVector{0})));
    // (5, 1) is near the cluster containing k=1: |5 + 1| <= 10
    CHECK_FALSE(split.in_far(FreqPoint(5, IntVector{1})));
    bool in_near = false;
    for (auto& bucket : split.near)
        for (auto& p : bucket)
            if (p == FreqPoint(5, IntVector{1})) in_near = true;
    CHECK(in_near);

    // every boxed (n,k) of Z x Γ lies in exactly one of near/far
    std::set<std::pair<Int, Int>> near_set;
    for (auto& bucket : split.near)
        for (auto& p : bucket) {
            auto [it, fresh] = near_set.insert({p.n, p.k[0]});
            CHECK(fresh);
        }
    for (Int n = -40; n <= 40; ++n)
        for (Int k = -4; k <= 4; ++k) {
            bool far = split.in_far(FreqPoint(n, IntVector{k}));
            bool near = near_set.count({n, k}) > 0;
            CHECK(far != near);
        }

    CHECK_THROWS_AS(neighborhoods(dec, 5), std::invalid_argument);
}

TEST_CASE("neighborhood separation exceeds 10R") {
    for (Int scale : {1, 2}) {
        ClusterDecomposition dec = decompose(AffineSublattice::full(1), scale, 80);
        if (dec.clusters.size() < 2) continue;
        Int sep = min_neighborhood_separation_sq(dec);
        CHECK(sep > 100 * scale * scale);
    }
}

TEST_CASE("cluster stats: example values") {
    // two singletons at k = 51, 53 (d=1, R=1): squared separation (53^2-51^2)^2 + 2^2
    ClusterDecomposition dec = decompose(AffineSublattice::full(1), 1, 60);
    const Cluster* a = nullptr;
    const Cluster* b = nullptr;
    for (auto& c : dec.clusters) {
        if (c.shadow.size() == 1 && c.shadow[0] == IntVector{51}) a = &c;
        if (c.shadow.size() == 1 && c.shadow[0] == IntVector{53}) b = &c;
    }
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(dist_sq(a->points[0], b->points[0]) == 43268);

    ClusterStats st = cluster_stats(dec);
    CHECK(st.rows.size() == 21);
    CHECK(st.flat_count == 1);
    CHECK(st.sharp_count == 20);
    for (auto& row : st.rows)
        if (row.size == 1) CHECK(row.diameter_sq == 0);

    // max shadow projection onto Λ = Z is just sup |k|
    for (auto& row : st.rows)
        if (row.size == 101) CHECK(row.max_shadow_proj == doctest::Approx(50.0));
}

TEST_CASE("truncation flags") {
    ClusterDecomposition dec = decompose(AffineSublattice::full(1), 1, 200);
    for (auto& c : dec.clusters) {
        bool boundary = false;
        for (auto& p : c.points)
            if (norm_sq(p.k) > 100 * 100) boundary = true;  // margin F - 100R = 100
        CHECK(c.truncated == boundary);
    }
    // margin < 0: everything is truncated
    ClusterDecomposition tiny = decompose(AffineSublattice::full(1), 1, 60);
    for (auto& c : tiny.clusters) CHECK(c.truncated);
}
