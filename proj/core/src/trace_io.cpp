#include "panscope/trace_io.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "panscope/error.hpp"
#include "panscope/file_io.hpp"

namespace panscope {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::format, std::string(what) + " does not fit in 32 bits");
    }
    return static_cast<std::uint32_t>(v);
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, checked_u32(s.size(), "name length"));
    out.insert(out.end(), s.begin(), s.end());
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::span<const std::uint8_t> take(std::size_t n, const std::string& what) {
        if (n > bytes_.size() - pos_) {
            throw Error(ErrorCode::format, "truncated data: " + what + " needs " + std::to_string(n) + " bytes at offset " +
                                               std::to_string(pos_) + ", " + std::to_string(bytes_.size() - pos_) +
                                               " remain");
        }
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::uint32_t u32(const std::string& what) {
        auto b = take(4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::string str(const std::string& what) {
        const std::uint32_t n = u32(what + " length");
        auto b = take(n, what);
        return {b.begin(), b.end()};
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t offset() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_trace(const ActivationTrace& trace) {
    std::vector<std::uint8_t> out(std::begin(kTraceMagic), std::end(kTraceMagic));
    put_u32(out, kTraceVersion);
    put_string(out, trace.model_name);
    put_u32(out, checked_u32(trace.layers.size(), "layer count"));
    put_u32(out, checked_u32(trace.batch_size(), "batch size"));
    for (const auto& layer : trace.layers) {
        if (layer.output.shape().batch != trace.batch_size()) {
            throw Error(ErrorCode::shape_mismatch, "layer " + layer.name + " has a different batch size");
        }
        put_string(out, layer.name);
        for (std::size_t d : layer.output.shape().dims()) put_u32(out, checked_u32(d, "dimension"));
        for (float v : layer.output.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

ActivationTrace decode_trace(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    auto magic = in.take(sizeof(kTraceMagic), "magic");
    if (std::memcmp(magic.data(), kTraceMagic, sizeof(kTraceMagic)) != 0) {
        throw Error(ErrorCode::format, "magic mismatch: expected \"PANTRACE\", got \"" +
                                           std::string(magic.begin(), magic.end()) + "\"");
    }
    const std::uint32_t version = in.u32("version");
    if (version != kTraceVersion) {
        throw Error(ErrorCode::format, "unsupported version " + std::to_string(version) + " (expected " +
                                           std::to_string(kTraceVersion) + ")");
    }
    ActivationTrace trace;
    trace.model_name = in.str("model name");
    const std::uint32_t layers = in.u32("layer count");
    const std::uint32_t batch = in.u32("batch size");
    for (std::uint32_t l = 0; l < layers; ++l) {
        const std::string where = "layer " + std::to_string(l);
        LayerActivation layer;
        layer.name = in.str(where + " name");
        Shape s{in.u32(where + " batch"), in.u32(where + " channels"), in.u32(where + " height"),
                in.u32(where + " width")};
        if (s.batch == 0 || s.channels == 0 || s.height == 0 || s.width == 0) {
            throw Error(ErrorCode::format, where + " (" + layer.name + ") has a zero dimension");
        }
        if (s.batch != batch) {
            throw Error(ErrorCode::format, "batch mismatch: " + where + " declares " + std::to_string(s.batch) +
                                               ", header declares " + std::to_string(batch));
        }
        std::size_t count = 1;
        for (std::size_t d : s.dims()) {
            if (count > std::numeric_limits<std::size_t>::max() / 4 / d) {
                throw Error(ErrorCode::format, "dimension overflow in " + where);
            }
            count *= d;
        }
        auto raw = in.take(count * 4, where + " payload");
        std::vector<float> values(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint32_t u = static_cast<std::uint32_t>(raw[4 * i]) |
                                    (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                    (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                    (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
            values[i] = std::bit_cast<float>(u);
        }
        layer.output = Tensor(s, std::move(values));
        trace.layers.push_back(std::move(layer));
    }
    if (in.remaining() != 0) {
        throw Error(ErrorCode::format, std::to_string(in.remaining()) + " trailing bytes after offset " +
                                           std::to_string(in.offset()));
    }
    return trace;
}

void write_trace(const ActivationTrace& trace, const std::filesystem::path& path) {
    write_file_atomic(path, encode_trace(trace));
}

ActivationTrace read_trace(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    try {
        return decode_trace(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

ActivationTrace batch_as_trace(const Tensor& batch, const std::string& name) {
    ActivationTrace t;
    t.model_name = name;
    t.layers.push_back({"input", batch});
    return t;
}

Tensor batch_from_trace(const ActivationTrace& trace) {
    if (trace.layers.size() != 1) {
        throw Error(ErrorCode::format, "an input batch file holds exactly one layer, found " +
                                           std::to_string(trace.layers.size()));
    }
    return trace.layers.front().output;
}

} // namespace panscope
