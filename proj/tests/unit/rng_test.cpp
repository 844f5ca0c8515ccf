#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "panscope/rng.hpp"

using panscope::Rng;

TEST(Rng, EngineMatchesStandardSequence) {
    // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
    Rng rng(std::mt19937_64::default_seed);
    for (int i = 0; i < 9999; ++i) rng.next_u64();
    EXPECT_EQ(rng.next_u64(), 9981545732273789042ull);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform01(), b.uniform01());
}

TEST(Rng, RangesRespected) {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const auto k = r.between(4, 10);
        EXPECT_GE(k, 4);
        EXPECT_LE(k, 10);
        EXPECT_LT(r.below(7), 7u);
    }
}

TEST(Rng, NormalMoments) {
    Rng r(3);
    double s = 0.0;
    double s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal();
        s += v;
        s2 += v * v;
    }
    EXPECT_NEAR(s / n, 0.0, 0.03);
    EXPECT_NEAR(s2 / n, 1.0, 0.05);
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
    Rng r(9);
    for (std::size_t pop : {1u, 5u, 64u}) {
        for (std::size_t count = 0; count <= pop; count += 1 + pop / 4) {
            const auto s = r.sample_without_replacement(pop, count);
            EXPECT_EQ(s.size(), count);
            EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), count);
            for (auto v : s) EXPECT_LT(v, pop);
        }
    }
    EXPECT_ANY_THROW(r.sample_without_replacement(3, 4));
}
