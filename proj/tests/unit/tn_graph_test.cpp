#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "errc.hpp"
#include "oracles.hpp"
#include "tnstream/metrics.hpp"
#include "tnstream/synthetic.hpp"
#include "tnstream/tn_graph.hpp"

using namespace tnstream;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::map<PointId, std::set<PointId>> adjacency_of(const TnGraph& g)
{
    std::map<PointId, std::set<PointId>> adj;
    for (PointId id : g.ids()) {
        auto& s = adj[id];
        for (const auto& e : g.neighbors(id)) {
            s.insert(e.to);
        }
    }
    return adj;
}

// Undirected graph from an edge list over ids 0..n-1 (weights 1).
TnGraph make_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::size_t k = 1)
{
    std::vector<PointId> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = i;
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& [a, b] : edges) {
        adj[a].emplace_back(b, 1.0);
        adj[b].emplace_back(a, 1.0);
    }
    return TnGraph(k, ids, adj);
}

TnGraph random_graph(std::size_t n, double p, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (coin(rng)) {
                edges.emplace_back(a, b);
            }
        }
    }
    return make_graph(n, edges);
}

}  // namespace

TEST(TightestNeighbors, LineExample)
{
    const auto ps = oracle::line({0, 1, 3, 10});
    const auto tn = tightest_neighbors(ps, 1);
    EXPECT_EQ(tn[0], std::vector<PointId>{1});
    EXPECT_EQ(tn[1], std::vector<PointId>{0});
    EXPECT_TRUE(tn[2].empty());
    EXPECT_TRUE(tn[3].empty());
}

TEST(TightestNeighbors, LevelZeroAndFull)
{
    std::mt19937_64 rng(3);
    const auto ps = oracle::uniform_points(30, 2, rng);
    for (const auto& s : tightest_neighbors(ps, 0)) {
        EXPECT_TRUE(s.empty());
    }
    EXPECT_EQ(tn_graph(ps, 0).edge_count(), 0u);
    const auto full = tightest_neighbors(ps, 29);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        EXPECT_EQ(full[i].size(), 29u);
    }
    EXPECT_EQ(tn_graph(ps, 29).edge_count(), 29u * 30u / 2u);
    EXPECT_ERRC(tn_graph(ps, 30), KTooLarge);
    EXPECT_ERRC(tightest_neighbors(ps, 30), KTooLarge);
}

TEST(TightestNeighbors, MatchesMutualKnnOracle)
{
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const auto ps = rep % 2 ? oracle::uniform_points(120, 3, rng) : oracle::grid_points(120, 2, rng, 5);
        for (std::size_t k : {1u, 2u, 5u, 11u}) {
            const auto expect = oracle::mutual_knn(ps, k);
            const auto got = tightest_neighbors(ps, k);
            const auto g = tn_graph(ps, k);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const auto& e = expect.at(ps.id(i));
                ASSERT_EQ(got[i], std::vector<PointId>(e.begin(), e.end()));
                for (const auto& edge : g.neighbors(ps.id(i))) {
                    ASSERT_TRUE(e.count(edge.to));
                    ASSERT_EQ(edge.weight, distance(ps.coords(i), ps.coords_of(edge.to)));
                    ASSERT_TRUE(g.has_edge(edge.to, ps.id(i)));  // symmetry
                }
            }
        }
    }
}

TEST(TnGraph, LineLevelTwoEdges)
{
    const auto ps = oracle::line({0, 1, 3, 10});
    const auto g = tn_graph(ps, 2);
    std::set<std::pair<PointId, PointId>> expect;
    for (const auto& [i, s] : oracle::mutual_knn(ps, 2)) {
        for (PointId j : s) {
            expect.insert({std::min(i, j), std::max(i, j)});
        }
    }
    std::set<std::pair<PointId, PointId>> got;
    for (const auto& e : g.edges()) {
        got.insert({e.a, e.b});
    }
    EXPECT_EQ(got, expect);
}

TEST(TnGraph, NestingInK)
{
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const auto ps = oracle::uniform_points(40, 2, rng);
        std::size_t prev_components = ps.size() + 1;
        for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
            const auto a = tn_graph(ps, k);
            const auto b = tn_graph(ps, k + 1);
            for (const auto& e : a.edges()) {
                ASSERT_TRUE(b.has_edge(e.a, e.b)) << "k=" << k;
            }
            ASSERT_LE(a.components().size(), prev_components);
            prev_components = a.components().size();
        }
    }
}

TEST(TnGraph, FilterAndWithout)
{
    const auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto f = g.filter_edges([](PointId a, PointId b, double) { return a + b != 3; });
    EXPECT_FALSE(f.has_edge(1, 2));
    EXPECT_TRUE(f.has_edge(0, 1));
    const std::vector<PointId> drop{1};
    const auto w = g.without(drop);
    EXPECT_EQ(w.size(), 3u);
    EXPECT_FALSE(w.contains(1));
    EXPECT_EQ(w.components(), (std::vector<std::vector<PointId>>{{0}, {2, 3}}));
    EXPECT_ERRC(g.neighbors(9), UnknownId);
}

TEST(Closure, PathGraph)
{
    // vertices 0, 1, 3 at positions 0, 1, 2
    std::vector<std::vector<std::pair<std::size_t, double>>> adj{{{1, 1.0}}, {{0, 1.0}, {2, 2.0}}, {{1, 2.0}}};
    const TnGraph g(1, {0, 1, 3}, adj);
    const std::vector<PointId> seed{0};
    EXPECT_EQ(closure(g, seed, 1), (std::vector<PointId>{0, 1}));
    EXPECT_EQ(closure(g, seed, 2), (std::vector<PointId>{0, 1, 3}));
    EXPECT_EQ(closure(g, seed, 50), (std::vector<PointId>{0, 1, 3}));
    EXPECT_EQ(mtncis(g, 3), (std::vector<PointId>{0, 1, 3}));
    EXPECT_ERRC(closure(g, seed, 0), InvalidArgument);
    const std::vector<PointId> bad{7};
    EXPECT_ERRC(closure(g, bad, 1), UnknownId);
    EXPECT_ERRC(mtncis(g, 7), UnknownId);
}

TEST(Closure, MonotoneAndInvariantOnComponents)
{
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const auto g = random_graph(30, 0.06, rng);
        const std::vector<PointId> seed{static_cast<PointId>(rep % 30)};
        for (std::size_t s = 1; s < 6; ++s) {
            const auto a = closure(g, seed, s);
            const auto b = closure(g, seed, s + 1);
            ASSERT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        }
        const auto comps = g.components();
        std::vector<PointId> uni = comps.front();
        if (comps.size() > 1) {
            uni.insert(uni.end(), comps.back().begin(), comps.back().end());
            std::sort(uni.begin(), uni.end());
        }
        for (std::size_t s : {1u, 4u}) {
            ASSERT_EQ(closure(g, uni, s), uni);
        }
    }
}

TEST(Mtncis, EqualsTraversalComponent)
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> size(1, 200);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = size(rng);
        const auto g = random_graph(n, 1.5 / static_cast<double>(n), rng);
        const auto comps = oracle::components(adjacency_of(g));
        EXPECT_EQ(g.components(), comps);
        for (const auto& c : comps) {
            for (PointId x : c) {
                ASSERT_EQ(mtncis(g, x), c);
            }
        }
    }
}

TEST(Mtncis, IsolatedVertex)
{
    const auto g = make_graph(3, {{0, 1}});
    EXPECT_EQ(mtncis(g, 2), std::vector<PointId>{2});
}

TEST(Mtncis, MinimalAmongClosureInvariantSets)
{
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 10;
        const auto g = random_graph(n, 0.15, rng);
        for (PointId x = 0; x < n; ++x) {
            const auto m = mtncis(g, x);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (!(mask & (1u << x))) {
                    continue;
                }
                std::vector<PointId> set;
                for (PointId v = 0; v < n; ++v) {
                    if (mask & (1u << v)) {
                        set.push_back(v);
                    }
                }
                if (closure(g, set, 1) == set) {
                    ASSERT_TRUE(std::includes(set.begin(), set.end(), m.begin(), m.end()));
                }
            }
        }
    }
}

TEST(Tnof, HandEvaluations)
{
    // single neighbor at distance 2
    const TnGraph pair(1, {0, 1}, {{{1, 2.0}}, {{0, 2.0}}});
    EXPECT_EQ(tnof_scores(pair).scores, (std::vector<double>{2.0, 2.0}));

    // neighbors at distances 1 and 3, plus an isolated vertex
    const TnGraph star(2, {0, 1, 2, 3}, {{{1, 1.0}, {2, 3.0}}, {{0, 1.0}}, {{0, 3.0}}, {}});
    const auto r = tnof_scores(star);
    EXPECT_EQ(r.scores[0], 1.0);
    EXPECT_EQ(r.scores[1], 1.0);
    EXPECT_EQ(r.scores[2], 3.0);
    EXPECT_EQ(r.scores[3], inf);
}

TEST(Tnof, ThresholdHandCase)
{
    const std::vector<double> s{1, 1, 1, 1, 6};
    EXPECT_DOUBLE_EQ(outlier_threshold(s, 1.0), 4.0);
    TnofReport r{{10, 11, 12, 13, 14}, s};
    EXPECT_EQ(detect_outliers(r), std::vector<PointId>{14});
    EXPECT_DOUBLE_EQ(r.theta, 4.0);
    EXPECT_EQ(r.alpha, 1.0);
}

TEST(Tnof, EqualScoresAndInfinities)
{
    TnofReport r{{0, 1, 2, 3}, {2.5, 2.5, inf, 2.5}};
    EXPECT_EQ(detect_outliers(r, 1.0), std::vector<PointId>{2});
    EXPECT_EQ(r.theta, 2.5);
    TnofReport all_inf{{0, 1}, {inf, inf}};
    EXPECT_ERRC(detect_outliers(all_inf), AllScoresInfinite);
}

TEST(Tnof, ScalingInvariance)
{
    std::mt19937_64 rng(31);
    const auto ps = oracle::uniform_points(200, 2, rng);
    PointSet scaled(2);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto c = ps.coords(i);
        scaled.add(ps.id(i), std::vector<double>{c[0] * 8.0, c[1] * 8.0});
    }
    auto a = tnof_scores(ps, 4);
    auto b = tnof_scores(scaled, 4);
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        ASSERT_GE(a.scores[i], 0.0);
        if (std::isfinite(a.scores[i])) {
            ASSERT_NEAR(b.scores[i], 8.0 * a.scores[i], 1e-12 * b.scores[i]);
        } else {
            ASSERT_TRUE(std::isinf(b.scores[i]));
        }
    }
    EXPECT_EQ(detect_outliers(a), detect_outliers(b));
    EXPECT_NEAR(b.theta, 8.0 * a.theta, 1e-12 * b.theta);
    EXPECT_ERRC(tnof_scores(ps, 0), InvalidArgument);
}

TEST(Ktnc, TwoPairs)
{
    const auto c = ktnc(oracle::line({0, 1, 10, 11}), 1);
    EXPECT_EQ(c.clusters, (std::vector<std::vector<PointId>>{{0, 1}, {2, 3}}));
    EXPECT_TRUE(c.outliers.empty());

    const auto d = ktnc(oracle::line({0, 1, 10, 11, 100}), 1);
    EXPECT_EQ(d.clusters, c.clusters);
    EXPECT_EQ(d.outliers, std::vector<PointId>{4});
    const std::vector<PointId> ids{4, 0, 3};
    EXPECT_EQ(d.labels_for(ids), (std::vector<long>{0, 1, 2}));
}

TEST(Ktnc, AllIsolatedGivesNoClusters)
{
    // k = 0 graph has no edges; every score is infinite
    const auto c = ktnc(tn_graph(oracle::line({0, 1, 2}), 0));
    EXPECT_EQ(c.K(), 0u);
    EXPECT_EQ(c.outliers, (std::vector<PointId>{0, 1, 2}));
}

TEST(Ktnc, PartitionProperty)
{
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 10; ++rep) {
        const auto ps = oracle::gaussian_mixture(150, 2, 3, rng);
        const auto c = ktnc(ps, 5);
        std::vector<PointId> all = c.outliers;
        for (const auto& cl : c.clusters) {
            ASSERT_FALSE(cl.empty());
            ASSERT_TRUE(std::is_sorted(cl.begin(), cl.end()));
            all.insert(all.end(), cl.begin(), cl.end());
        }
        for (std::size_t i = 1; i < c.K(); ++i) {
            ASSERT_LT(c.clusters[i - 1].front(), c.clusters[i].front());
        }
        std::sort(all.begin(), all.end());
        ASSERT_EQ(all, std::vector<PointId>(ps.ids().begin(), ps.ids().end()));
        ASSERT_EQ(ktnc(ps, 5).clusters, c.clusters);
    }
    EXPECT_ERRC(ktnc(PointSet(1), 1), EmptyPointSet);
    EXPECT_ERRC(ktnc(oracle::line({0, 1}), 0), InvalidArgument);
}

TEST(Separability, Examples)
{
    const auto add = separability_class(oracle::line({0, 0.1, 0.2, 10, 10.1}), 0.5);
    EXPECT_EQ(add.cls, Separability::Add);
    EXPECT_EQ(add.components, (std::vector<std::vector<PointId>>{{0, 1, 2}, {3, 4}}));

    const auto cd = separability_class(oracle::line({0, 1, 2, 3, 4, 9, 10, 11}), 1.0);
    EXPECT_EQ(cd.cls, Separability::Cd);
    EXPECT_EQ(cd.components.size(), 2u);

    EXPECT_EQ(separability_class(oracle::line({0, 1, 5}), 100.0).cls, Separability::None);
    EXPECT_ERRC(separability_class(oracle::line({0, 1}), 0.0), NonpositiveThreshold);
    EXPECT_STREQ(to_string(Separability::Add), "ADD");
}

TEST(Separability, AddTightness)
{
    const auto ps = oracle::line({0, 0.1, 0.2, 10, 10.1});
    EXPECT_TRUE(verify_add_tightness(ps, separability_class(ps, 0.5)));
    const auto pairs = oracle::line({0, 0.1, 5, 5.1});
    EXPECT_TRUE(verify_add_tightness(pairs, separability_class(pairs, 0.5)));
    const auto chain = oracle::line({0, 1, 2, 3, 4, 9, 10, 11});
    EXPECT_ERRC(verify_add_tightness(chain, separability_class(chain, 1.0)), NotAdd);
}

TEST(Prototype, AddPointsArePrototypes)
{
    const auto ps = oracle::line({0, 0.1, 0.2, 10, 10.1});
    Clustering truth{{{0, 1, 2}, {3, 4}}, {}};
    for (PointId x : ps.ids()) {
        EXPECT_TRUE(is_prototype_point(ps, truth, x));
    }
    Clustering single{{{0}, {3, 4}}, {1, 2}};
    EXPECT_TRUE(is_prototype_point(ps, single, 0));
    EXPECT_ERRC(is_prototype_point(ps, single, 1), OutlierPoint);
    EXPECT_ERRC(is_prototype_point(ps, single, 42), UnknownId);
}

TEST(Prototype, InterleavedChains)
{
    PointSet ps(2);
    for (int i = 0; i < 4; ++i) {
        ps.add(i, std::vector<double>{double(i), 0.0});
    }
    for (int i = 0; i < 3; ++i) {
        ps.add(4 + i, std::vector<double>{i + 0.5, 0.9});
    }
    Clustering c{{{0, 1, 2, 3}, {4, 5, 6}}, {}};
    EXPECT_FALSE(is_prototype_point(ps, c, 0));
    EXPECT_FALSE(is_prototype_point(ps, c, 4));
}

TEST(SkeletonSet, Representatives)
{
    const auto ps = oracle::line({0, 0.1, 0.2, 10, 10.1});
    const std::size_t k = 2;  // max component size − 1
    // at alpha 1 the looser pair scores above theta
    EXPECT_EQ(ktnc(ps, k).K(), 1u);
    const auto c = ktnc(ps, k, 2.0);
    ASSERT_EQ(c.K(), 2u);
    EXPECT_TRUE(verify_skeleton_set(ps, k, c.clusters, c));
    EXPECT_TRUE(verify_skeleton_set(ps, k, {{1}, {4}}, c));
    EXPECT_ERRC(verify_skeleton_set(ps, k, {{3}, {4}}, c), SubsetNotContained);
    EXPECT_ERRC(verify_skeleton_set(ps, k, {{1}}, c), LengthMismatch);
}

TEST(MinimalRecoveringK, AddInstances)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        AddInstanceSpec spec;
        spec.clusters = 2 + seed % 4;
        const auto data = generate_synthetic(spec, seed);
        const auto k = minimal_recovering_k(data.points, data.labels, 1.0, 60);
        ASSERT_TRUE(k) << "seed " << seed;
        const auto c = ktnc(data.points, *k);
        const auto pred = c.labels_for(data.points.ids());
        EXPECT_EQ(ari(data.labels, pred, OutlierMode::Exclude), 1.0);
        if (*k > 1) {
            const auto prev = ktnc(data.points, *k - 1);
            EXPECT_FALSE(prev.K() == spec.clusters &&
                         ari(data.labels, prev.labels_for(data.points.ids()), OutlierMode::Exclude) == 1.0);
        }
    }
}
