#include <gtest/gtest.h>

#include <algorithm>

#include "panscope/error.hpp"
#include "panscope/synthetic.hpp"

using namespace panscope;

TEST(Synthetic, ParseSpec) {
    const auto c = SyntheticBatchConfig::parse("7,16,64,32", 3);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.count, 16u);
    EXPECT_EQ(c.height, 64u);
    EXPECT_EQ(c.width, 32u);
    EXPECT_EQ(c.channels, 3u);
    EXPECT_EQ(c.to_string(), "7,16,64,32");
    for (const char* bad : {"", "1,2,3", "1,2,3,4,5", "a,1,1,1", "1,0,4,4", "1,,4,4", "1,2,3,4x"}) {
        EXPECT_THROW(SyntheticBatchConfig::parse(bad, 3), Error) << bad;
    }
}

TEST(Synthetic, DeterministicAndNonNegative) {
    const SyntheticBatchConfig c{3, 8, 20, 24, 3};
    const Tensor a = make_synthetic_batch(c);
    EXPECT_EQ(a, make_synthetic_batch(c));
    EXPECT_EQ(a.shape(), (Shape{8, 3, 20, 24}));
    EXPECT_GE(*std::min_element(a.values().begin(), a.values().end()), 0.0f);
    SyntheticBatchConfig other = c;
    other.seed = 4;
    EXPECT_NE(a, make_synthetic_batch(other));
}

TEST(Synthetic, ShadingChannelIsFlat) {
    const Tensor t = make_synthetic_batch({1, 6, 32, 32, 3});
    EXPECT_EQ(shading_channel(3), 2u);
    for (std::size_t n = 0; n < 6; ++n) {
        const auto p = t.plane(n, 2);
        const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
        EXPECT_GE(*lo, 0.08f - 1e-6f);
        EXPECT_LE(*hi, 0.22f + 1e-6f);
        EXPECT_LE(*hi - *lo, 0.04f + 1e-6f);
    }
}

TEST(Synthetic, StepImagesAreFlatNearTheBorder) {
    const Tensor t = make_synthetic_batch({5, 8, 32, 32, 3});
    // Cuts start at index 2, so the outer two columns of a grid image share one cell.
    for (std::size_t n = 1; n < 8; ++n) {
        if (n % 4 == 0) continue;
        for (std::size_t y = 0; y < 32; ++y) {
            EXPECT_NEAR(t.at(n, 0, y, 0), t.at(n, 0, y, 1), 0.041f);
        }
    }
}

TEST(Synthetic, SingleChannelHasNoShading) {
    EXPECT_EQ(shading_channel(1), 1u);
    const Tensor t = make_synthetic_batch({2, 4, 9, 9, 1});
    EXPECT_EQ(t.shape().channels, 1u);
}
