#include <gtest/gtest.h>

#include <random>

#include "panscope/error.hpp"
#include "panscope/histogram.hpp"

using namespace panscope;

TEST(Histogram, ExplicitRange) {
    const auto h = histogram(std::vector<double>{0, 1, 2, 3}, 2, std::pair{0.0, 4.0});
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(h.edges, (std::vector<double>{0.0, 2.0, 4.0}));
}

TEST(Histogram, ConstantSampleFillsOneBin) {
    const auto h = histogram(std::vector<double>(9, 1.25), 5);
    EXPECT_EQ(h.total(), 9u);
    EXPECT_EQ(std::count(h.counts.begin(), h.counts.end(), 9u), 1);
}

TEST(Histogram, LastBinIncludesMaximum) {
    const auto h = histogram(std::vector<double>{0, 0.5, 1}, 4);
    EXPECT_EQ(h.counts.back(), 1u);
    EXPECT_EQ(h.total(), 3u);
}

TEST(Histogram, OutOfRangeDropped) {
    const auto h = histogram(std::vector<double>{-1, 0.5, 2}, 2, std::pair{0.0, 1.0});
    EXPECT_EQ(h.total(), 1u);
}

TEST(Histogram, CountsSumToSampleCount) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n(0.0, 3.0);
    for (std::size_t bins : {1u, 3u, 17u, 100u}) {
        std::vector<double> s(1000);
        for (double& v : s) v = n(gen);
        EXPECT_EQ(histogram(s, bins).total(), s.size());
    }
}

TEST(Histogram, Errors) {
    const std::vector<double> s{1, 2};
    EXPECT_THROW(histogram(std::vector<double>{}, 3), Error);
    EXPECT_THROW(histogram(s, 0), Error);
    EXPECT_THROW(histogram(s, 2, std::pair{1.0, 1.0}), Error);
    EXPECT_THROW(histogram(s, 2, std::pair{2.0, 1.0}), Error);
}
