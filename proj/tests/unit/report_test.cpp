#include <gtest/gtest.h>

#include <random>

#include "panscope/error.hpp"
#include "panscope/report.hpp"
#include "panscope/synthetic.hpp"

using namespace panscope;

namespace {

Census small_census() {
    ActivationTrace trace;
    Tensor a(Shape{3, 4, 8, 8});
    std::mt19937_64 gen(2);
    std::normal_distribution<float> n;
    for (float& v : a.data()) v = n(gen);
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t x = 0; x < 8; ++x) a.at(b, 2, 0, x) += 9.0f;
    }
    trace.layers.push_back({"first", a});
    trace.layers.push_back({"tiny", Tensor(Shape{3, 2, 2, 2})});
    return census_trace(trace, {0.5});
}

} // namespace

TEST(CensusJson, RoundTrip) {
    const Census c = small_census();
    CensusSource src;
    src.model_path = "m.json";
    src.synthetic = SyntheticBatchConfig{4, 3, 8, 8, 3};
    const auto doc = census_to_json(c, src);
    EXPECT_EQ(doc["config"]["prng"], "mt19937_64");
    EXPECT_EQ(doc["neurons"].size(), 4u);
    EXPECT_EQ(doc["excluded"].size(), 2u);
    EXPECT_EQ(doc["totals"]["pans"], 1);
    EXPECT_EQ(doc["type_counts"]["T"], 1);
    EXPECT_EQ(doc["neurons"][2]["type"], "T");

    const CensusDocument back = census_from_json(doc);
    EXPECT_EQ(back.source.model_path, "m.json");
    EXPECT_EQ(back.source.synthetic->to_string(), "4,3,8,8");
    EXPECT_EQ(back.census.pan_set(), c.pan_set());
    EXPECT_EQ(back.census.records.size(), c.records.size());
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        EXPECT_EQ(back.census.records[i].report.ks, c.records[i].report.ks);
        EXPECT_EQ(back.census.records[i].label.type_name, c.records[i].label.type_name);
    }
    EXPECT_EQ(census_to_json(back.census, back.source), doc);
}

TEST(CensusJson, RejectsOtherDocuments) {
    EXPECT_THROW(census_from_json(nlohmann::json{{"format", "x"}}), Error);
    auto doc = census_to_json(small_census(), {});
    doc["neurons"][0]["verdict"] = "maybe";
    EXPECT_THROW(census_from_json(doc), Error);
    doc = census_to_json(small_census(), {});
    doc["neurons"][0].erase("ks");
    EXPECT_THROW(census_from_json(doc), Error);
}

TEST(Csv, HistogramRows) {
    Histogram h{{0.0, 0.5, 1.0}, {3, 4}};
    EXPECT_EQ(histogram_csv(h), "bin_lo,bin_hi,count\n0,0.5,3\n0.5,1,4\n");
}

TEST(Csv, RegionHistogramsShareEdges) {
    RegionSamples r;
    r.top = r.bottom = {0, 1};
    r.left = r.right = {0, 1};
    r.centre = {0.25, 0.5, 0.75, 2};
    const std::string csv = region_histograms_csv({{"zero", r}, {"reflect", r}}, 4);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    EXPECT_EQ(rows, 1 + 2 * 7 * 4);
    EXPECT_NE(csv.find("zero,centre_plus,"), std::string::npos);
    EXPECT_NE(csv.find("reflect,top,0,0.5,1\n"), std::string::npos);
}

TEST(Csv, Heatmap) {
    const std::vector<float> v{1, 2, 3, 4};
    const std::string csv = heatmap_csv({{"zero", 0, PlaneView{v, 2, 2}}});
    EXPECT_EQ(csv, "padding,sample,row,col,value\nzero,0,0,0,1\nzero,0,0,1,2\nzero,0,1,0,3\nzero,0,1,1,4\n");
}
