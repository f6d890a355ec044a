#include <gtest/gtest.h>

#include "lens/diversity.hpp"
#include "lens/error.hpp"
#include "lens/metrics.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace lens {
namespace {

using test::random_map;

TEST(DiverseTopK, DescendingGrid) {
    const AttributionMap m(3, 3, {9, 8, 7, 6, 5, 4, 3, 2, 1});
    const auto sel = diverse_top_k(m, 2, 1);
    EXPECT_EQ(sel.coords.coords(), (std::vector<PixelCoord>{{0, 0}, {0, 2}}));
    EXPECT_EQ(sel.total_score, 16.0);
    EXPECT_EQ(sel.w_div, 1u);
}

TEST(DiverseTopK, ZeroBlockingIsTopK) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = test::tied_map(4, 5, seed, 3);
        EXPECT_EQ(diverse_top_k(m, 6, 0).coords, top_k_set(m, 6));
    }
}

TEST(DiverseTopK, CapacityErrorReportsAchievable) {
    const AttributionMap m(3, 3, std::vector<double>(9, 1.0));
    try {
        diverse_top_k(m, 5, 1);
        FAIL();
    } catch (const CapacityError& e) {
        EXPECT_EQ(e.achievable(), 4u);
    }
    EXPECT_THROW(diverse_top_k(m, 0, 1), DomainError);
}

TEST(DiverseTopK, MatchesGreedyOracleAndIsSeparated) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto m = test::tied_map(6, 6, seed, 4);
        for (std::size_t w_div : {1, 2}) {
            const std::size_t k = w_div == 1 ? 5 : 3;
            const auto expected = oracle::greedy_diverse(m, k, w_div);
            if (expected.empty()) {
                EXPECT_THROW(diverse_top_k(m, k, w_div), CapacityError);
                continue;
            }
            const auto sel = diverse_top_k(m, k, w_div);
            ASSERT_EQ(sel.coords.size(), k);
            for (std::size_t i = 0; i < k; ++i) {
                EXPECT_EQ(sel.coords.coords()[i].row, expected[i].first);
                EXPECT_EQ(sel.coords.coords()[i].col, expected[i].second);
                for (std::size_t j = 0; j < i; ++j) {
                    EXPECT_FALSE(conflicts(sel.coords.coords()[i], sel.coords.coords()[j], w_div));
                }
            }
        }
    }
}

TEST(DiverseTopK, GreedyIsNotAlwaysOptimal) {
    const AttributionMap m(1, 4, {0.99, 1.0, 0.99, 0.0});
    EXPECT_EQ(diverse_top_k(m, 2, 1).total_score, 1.0);
    EXPECT_DOUBLE_EQ(oracle::best_diverse_total(m, 2, 1), 1.98);
}

// Every optimal pixel is either blocked by a greedy pick of at least its
// score (each pick blocks at most four mutually separated pixels), or never
// blocked and then no better than the last greedy pick.
TEST(DiverseTopK, GreedyWithinFactorFiveOfOptimum) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const std::size_t h = 3 + seed % 3, w = 3 + (seed / 3) % 3;
        const auto m = random_map(h, w, seed, 0.0, 1.0);
        for (std::size_t k = 1; k <= 3; ++k) {
            DiverseSelection sel;
            try {
                sel = diverse_top_k(m, k, 1);
            } catch (const CapacityError&) {
                continue;
            }
            const double best = oracle::best_diverse_total(m, k, 1);
            EXPECT_LE(sel.total_score, best + 1e-12);
            EXPECT_GE(5.0 * sel.total_score, best);
        }
    }
}

TEST(DiverseMetrics, IdentityAndDisjoint) {
    const auto a = random_map(5, 5, 4);
    EXPECT_EQ(topk_div_intersection(a, a, 3, 1), 1.0);
    EXPECT_EQ(lens_prec_at_k_div(a, a, 3, 1, 1), 1.0);
    const AttributionMap x(1, 6, {5, 0, 4, 0, 0, 0});
    const AttributionMap y(1, 6, {0, 0, 0, 5, 0, 4});
    EXPECT_EQ(topk_div_intersection(x, y, 2, 1), 0.0);
}

TEST(DiverseMetrics, HandBuiltPair) {
    // a picks (0,0),(0,2),(2,0); b picks (0,0),(2,2),(4,4)
    AttributionMap a(5, 5, {9, 8, 7, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    AttributionMap b(5, 5, {9, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 6});
    EXPECT_EQ(diverse_top_k(a, 3, 1).coords.sorted().coords(), (std::vector<PixelCoord>{{0, 0}, {0, 2}, {2, 0}}));
    EXPECT_EQ(diverse_top_k(b, 3, 1).coords.sorted().coords(), (std::vector<PixelCoord>{{0, 0}, {2, 2}, {4, 4}}));
    EXPECT_DOUBLE_EQ(topk_div_intersection(a, b, 3, 1), 1.0 / 3.0);
}

TEST(DiverseMetrics, ComposeGreedyAndNeighborhoodOracles) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto a = random_map(6, 6, seed);
        // b is a shifted by one column with fresh values entering on the left.
        std::vector<double> bv(36);
        Rng rng(seed + 9);
        for (std::size_t r = 0; r < 6; ++r)
            for (std::size_t c = 0; c < 6; ++c) bv[r * 6 + c] = c == 0 ? rng.uniform(-1, 1) : a(r, c - 1);
        const AttributionMap b(6, 6, bv);
        const auto sa = oracle::greedy_diverse(a, 4, 1), sb = oracle::greedy_diverse(b, 4, 1);
        ASSERT_FALSE(sa.empty());
        ASSERT_FALSE(sb.empty());
        const oracle::CoordSet s(sa.begin(), sa.end()), t(sb.begin(), sb.end());
        for (std::size_t w = 0; w <= 2; ++w) {
            EXPECT_EQ(lens_prec_at_k_div(a, b, 4, w, 1), oracle::prec(s, t, 4, w, a.dims()));
            EXPECT_EQ(lens_recall_at_k_div(a, b, 4, w, 1), oracle::prec(t, s, 4, w, a.dims()));
        }
        EXPECT_EQ(lens_prec_at_k_div(a, b, 4, 0, 1), topk_div_intersection(a, b, 4, 1));
        EXPECT_GE(lens_prec_at_k_div(a, b, 4, 1, 1), topk_div_intersection(a, b, 4, 1));
    }
}

}  // namespace
}  // namespace lens
