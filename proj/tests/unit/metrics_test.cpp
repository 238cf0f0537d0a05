#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "errc.hpp"
#include "oracles.hpp"
#include "tnstream/metrics.hpp"

using namespace tnstream;

namespace {

std::vector<long> random_labels(std::size_t n, long k, std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> u(0, k - 1);
    std::vector<long> out(n);
    for (auto& v : out) {
        v = u(rng);
    }
    return out;
}

}  // namespace

TEST(Contingency, Counts)
{
    const std::vector<long> t{1, 1, 2, 2};
    const std::vector<long> p{1, 2, 1, 2};
    const auto c = contingency(t, p);
    EXPECT_EQ(c.counts, (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 1}}));
    EXPECT_EQ(c.a, (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(c.b, (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(c.n, 4u);
    EXPECT_FALSE(c.identical_partitions());

    const auto same = contingency(t, t);
    EXPECT_EQ(same.counts, (std::vector<std::vector<std::size_t>>{{2, 0}, {0, 2}}));
    EXPECT_TRUE(same.identical_partitions());

    const std::vector<long> zeros{0, 0, 0, 0};
    const auto out = contingency(t, zeros);
    EXPECT_EQ(out.pred_labels, std::vector<long>{0});
    EXPECT_EQ(out.counts.size(), 1u);
}

TEST(Contingency, Errors)
{
    const std::vector<long> a{1, 2};
    const std::vector<long> b{1};
    const std::vector<long> none;
    const std::vector<long> zeros{0, 0};
    EXPECT_ERRC(contingency(a, b), LengthMismatch);
    EXPECT_ERRC(contingency(none, none), Empty);
    EXPECT_ERRC(contingency(a, zeros, OutlierMode::Exclude), Empty);
}

TEST(Metrics, HandCases)
{
    const std::vector<long> t{1, 1, 2, 2};
    const std::vector<long> p{1, 2, 1, 2};
    EXPECT_EQ(ari(t, p), -0.5);
    EXPECT_EQ(nmi(contingency(t, p)), 0.0);
    EXPECT_EQ(purity(contingency(t, p)), 0.5);

    // clusters {a,a,b} and {b,b}
    const std::vector<long> truth{1, 1, 2, 2, 2};
    const std::vector<long> pred{7, 7, 7, 9, 9};
    EXPECT_DOUBLE_EQ(purity(contingency(truth, pred)), 0.8);
}

TEST(Metrics, IdenticalPartitionsScoreOne)
{
    const std::vector<long> t{3, 3, 1, 1, 2, 5};
    const std::vector<long> p{0, 0, 4, 4, 9, 8};  // relabeled, outlier label included
    const auto s = evaluate(t, p);
    EXPECT_EQ(s.purity, 1.0);
    EXPECT_EQ(s.ari, 1.0);
    EXPECT_EQ(s.nmi, 1.0);

    const std::vector<long> one{1, 1, 1};
    EXPECT_EQ(ari(one, one), 1.0);
    EXPECT_EQ(nmi(contingency(one, one)), 1.0);
    const std::vector<long> split{1, 2, 2};
    EXPECT_EQ(nmi(contingency(one, split)), 0.0);
}

TEST(Metrics, MatchSecondImplementations)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> size(2, 500);
    std::uniform_int_distribution<long> kk(1, 8);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = size(rng);
        const auto t = random_labels(n, kk(rng), rng);
        auto p = random_labels(n, kk(rng), rng);
        if (rep % 3 == 0) {
            // correlated labelings
            for (std::size_t i = 0; i < n; i += 2) {
                p[i] = t[i];
            }
        }
        const auto c = contingency(t, p);
        ASSERT_NEAR(nmi(c), oracle::nmi(t, p), 1e-9);
        ASSERT_NEAR(ari(c), oracle::ari(t, p), 1e-9);
        ASSERT_NEAR(purity(c), oracle::purity(t, p), 1e-12);
    }
}

TEST(Metrics, PermutationInvariant)
{
    std::mt19937_64 rng(5);
    const auto t = random_labels(200, 4, rng);
    const auto p = random_labels(200, 5, rng);
    auto permuted = p;
    for (auto& v : permuted) {
        v = 10 - v;
    }
    const auto a = evaluate(t, p);
    const auto b = evaluate(t, permuted);
    EXPECT_DOUBLE_EQ(a.purity, b.purity);
    EXPECT_DOUBLE_EQ(a.ari, b.ari);
    EXPECT_DOUBLE_EQ(a.nmi, b.nmi);
}

TEST(Metrics, OutlierModes)
{
    const std::vector<long> t{1, 1, 2, 2, 2};
    const std::vector<long> p{1, 1, 2, 2, 0};
    const auto as_cluster = evaluate(t, p);
    const auto excluded = evaluate(t, p, OutlierMode::Exclude);
    EXPECT_LT(as_cluster.ari, 1.0);
    EXPECT_EQ(excluded.ari, 1.0);
    EXPECT_EQ(excluded.nmi, 1.0);
    EXPECT_EQ(excluded.purity, 1.0);
    EXPECT_EQ(contingency(t, p, OutlierMode::Exclude).n, 4u);
}
