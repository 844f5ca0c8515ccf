#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "panscope/error.hpp"
#include "panscope/file_io.hpp"
#include "panscope/trace_io.hpp"
#include "temp_dir.hpp"

using namespace panscope;

namespace {

ActivationTrace sample_trace() {
    std::mt19937_64 gen(1);
    std::normal_distribution<float> n;
    ActivationTrace t;
    t.model_name = "demo";
    Tensor a(Shape{2, 3, 5, 4});
    Tensor b(Shape{2, 1, 3, 3});
    for (float& v : a.data()) v = n(gen);
    for (float& v : b.data()) v = n(gen);
    t.layers.push_back({"conv0", a});
    t.layers.push_back({"conv1", b});
    return t;
}

std::string decode_error(std::vector<std::uint8_t> bytes) {
    try {
        decode_trace(bytes);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::format);
        return e.what();
    }
    ADD_FAILURE() << "decode succeeded";
    return {};
}

} // namespace

TEST(TraceIo, RoundTripIsByteExact) {
    TempDir dir;
    const ActivationTrace t = sample_trace();
    write_trace(t, dir / "t.pantrace");
    const ActivationTrace back = read_trace(dir / "t.pantrace");
    EXPECT_EQ(back, t);
    EXPECT_EQ(encode_trace(back), read_file_bytes(dir / "t.pantrace"));
}

TEST(TraceIo, HeaderLayout) {
    const auto bytes = encode_trace(sample_trace());
    EXPECT_EQ(std::memcmp(bytes.data(), "PANTRACE", 8), 0);
    EXPECT_EQ(bytes[8], 1);
    EXPECT_EQ(bytes[12], 4); // name length
    EXPECT_EQ(std::string(bytes.begin() + 16, bytes.begin() + 20), "demo");
    EXPECT_EQ(bytes[20], 2); // layers
    EXPECT_EQ(bytes[24], 2); // batch
    const std::size_t payload = 4 * (2 * 3 * 5 * 4 + 2 * 1 * 3 * 3);
    const std::size_t layer_headers = 2 * (4 + 5 + 16);
    EXPECT_EQ(bytes.size(), 28 + layer_headers + payload);
}

TEST(TraceIo, BadMagic) {
    auto bytes = encode_trace(sample_trace());
    bytes[7] = 'X';
    EXPECT_NE(decode_error(bytes).find("magic"), std::string::npos);
}

TEST(TraceIo, BadVersion) {
    auto bytes = encode_trace(sample_trace());
    bytes[8] = 2;
    EXPECT_NE(decode_error(bytes).find("version"), std::string::npos);
}

TEST(TraceIo, Truncated) {
    auto bytes = encode_trace(sample_trace());
    bytes.resize(bytes.size() - 3);
    EXPECT_NE(decode_error(bytes).find("truncated"), std::string::npos);
    bytes.resize(5);
    EXPECT_NE(decode_error(bytes).find("truncated"), std::string::npos);
}

TEST(TraceIo, TrailingBytesAndBatchMismatch) {
    auto bytes = encode_trace(sample_trace());
    bytes.push_back(0);
    EXPECT_NE(decode_error(bytes).find("trailing"), std::string::npos);

    bytes = encode_trace(sample_trace());
    bytes[24] = 3;
    EXPECT_NE(decode_error(bytes).find("batch mismatch"), std::string::npos);
}

TEST(TraceIo, DimensionOverflow) {
    ActivationTrace t;
    t.model_name = "m";
    t.layers.push_back({"l", Tensor(Shape{1, 1, 1, 1})});
    auto bytes = encode_trace(t);
    // Layer dims start after the 8-byte magic, version, name, counts, layer name.
    const std::size_t dims = 8 + 4 + 4 + 1 + 4 + 4 + 4 + 1;
    for (std::size_t d = 1; d < 4; ++d) {
        for (std::size_t k = 0; k < 4; ++k) bytes[dims + 4 * d + k] = 0xFF;
    }
    EXPECT_NE(decode_error(bytes).find("overflow"), std::string::npos);
}

TEST(TraceIo, BatchWrapper) {
    const Tensor x(Shape{2, 3, 4, 4}, 0.25f);
    const ActivationTrace t = batch_as_trace(x);
    EXPECT_EQ(t.layers.front().name, "input");
    EXPECT_EQ(batch_from_trace(t), x);
    EXPECT_THROW(batch_from_trace(sample_trace()), Error);
}

TEST(TraceIo, EmptyTrace) {
    ActivationTrace t;
    t.model_name = "none";
    EXPECT_EQ(decode_trace(encode_trace(t)), t);
}
