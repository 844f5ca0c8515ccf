#include "panscope/model_io.hpp"

#include <bit>
#include <cstring>

#include "panscope/error.hpp"
#include "panscope/file_io.hpp"

namespace panscope {

using nlohmann::json;

namespace {

constexpr std::string_view kModelFormat = "panscope-model";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_floats(std::vector<std::uint8_t>& out, std::span<const float> values) {
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::size_t blob_floats(const ConvNetSpec& model) {
    std::size_t n = 0;
    for (const auto& l : model.layers) n += l.weights.shape().elements() + l.bias.size();
    if (model.head) n += model.head->weights.size() + model.head->bias.size();
    return n;
}

PaddingPolicy policy_from(const json& j, const std::string& where) {
    const auto p = parse_padding_policy(j.get<std::string>());
    if (!p) throw Error(ErrorCode::format, where + ": unknown padding policy '" + j.get<std::string>() + "'");
    return *p;
}

} // namespace

json model_to_json(const ConvNetSpec& model, const std::string& weights_file) {
    json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kWeightVersion;
    doc["name"] = model.name;
    doc["weights_file"] = weights_file;
    doc["layers"] = json::array();
    for (const auto& l : model.layers) {
        json jl;
        jl["name"] = l.name;
        jl["in_channels"] = l.in_channels;
        jl["out_channels"] = l.out_channels;
        jl["kernel"] = {l.kernel_height, l.kernel_width};
        jl["stride"] = l.stride;
        jl["padding"] = l.padding;
        jl["policy"] = to_string(l.policy);
        if (!l.channel_policies.empty()) {
            json cp = json::array();
            for (PaddingPolicy p : l.channel_policies) cp.push_back(to_string(p));
            jl["channel_policies"] = cp;
        }
        jl["activation"] = to_string(l.activation);
        doc["layers"].push_back(jl);
    }
    if (model.head) {
        doc["head"] = {{"classes", model.head->classes}, {"features", model.head->features}};
    } else {
        doc["head"] = nullptr;
    }
    return doc;
}

std::vector<std::uint8_t> encode_weights(const ConvNetSpec& model) {
    model.validate();
    std::vector<std::uint8_t> out(std::begin(kWeightMagic), std::end(kWeightMagic));
    put_u32(out, kWeightVersion);
    out.reserve(out.size() + 4 * blob_floats(model));
    for (const auto& l : model.layers) {
        put_floats(out, l.weights.data());
        put_floats(out, l.bias);
    }
    if (model.head) {
        put_floats(out, model.head->weights);
        put_floats(out, model.head->bias);
    }
    return out;
}

void decode_weights(ConvNetSpec& model, std::span<const std::uint8_t> blob) {
    constexpr std::size_t header = sizeof(kWeightMagic) + 4;
    if (blob.size() < header || std::memcmp(blob.data(), kWeightMagic, sizeof(kWeightMagic)) != 0) {
        throw Error(ErrorCode::format, "weight blob: magic mismatch");
    }
    const std::uint32_t version = get_u32(blob, sizeof(kWeightMagic));
    if (version != kWeightVersion) {
        throw Error(ErrorCode::format, "weight blob: unsupported version " + std::to_string(version));
    }
    const std::size_t expected = header + 4 * blob_floats(model);
    if (blob.size() != expected) {
        throw Error(ErrorCode::format, "weight blob: expected " + std::to_string(expected) + " bytes, found " +
                                           std::to_string(blob.size()));
    }
    std::size_t at = header;
    auto fill = [&](std::span<float> dst) {
        for (float& f : dst) {
            f = std::bit_cast<float>(get_u32(blob, at));
            at += 4;
        }
    };
    for (auto& l : model.layers) {
        fill(l.weights.data());
        fill(l.bias);
    }
    if (model.head) {
        fill(model.head->weights);
        fill(model.head->bias);
    }
}

ConvNetSpec model_from_json(const json& doc) {
    try {
        if (doc.at("format").get<std::string>() != kModelFormat) {
            throw Error(ErrorCode::format, "not a model document (format '" + doc.at("format").get<std::string>() + "')");
        }
        const auto version = doc.at("version").get<std::uint32_t>();
        if (version != kWeightVersion) throw Error(ErrorCode::format, "unsupported model version " + std::to_string(version));
        ConvNetSpec model;
        model.name = doc.at("name").get<std::string>();
        for (const json& jl : doc.at("layers")) {
            ConvLayerSpec l;
            l.name = jl.at("name").get<std::string>();
            const std::string where = "layer " + l.name;
            l.in_channels = jl.at("in_channels").get<std::size_t>();
            l.out_channels = jl.at("out_channels").get<std::size_t>();
            const json& k = jl.at("kernel");
            if (!k.is_array() || k.size() != 2) throw Error(ErrorCode::format, where + ": kernel must be [height, width]");
            l.kernel_height = k[0].get<std::size_t>();
            l.kernel_width = k[1].get<std::size_t>();
            l.stride = jl.at("stride").get<std::size_t>();
            l.padding = jl.at("padding").get<std::size_t>();
            l.policy = policy_from(jl.at("policy"), where);
            if (jl.contains("channel_policies")) {
                for (const json& p : jl.at("channel_policies")) l.channel_policies.push_back(policy_from(p, where));
            }
            const auto act = parse_nonlinearity(jl.at("activation").get<std::string>());
            if (!act) throw Error(ErrorCode::format, where + ": unknown activation");
            l.activation = *act;
            if (l.in_channels == 0 || l.out_channels == 0 || l.kernel_height == 0 || l.kernel_width == 0 || l.stride == 0) {
                throw Error(ErrorCode::format, where + ": dimensions must be positive");
            }
            l.weights = Tensor(Shape{l.out_channels, l.in_channels, l.kernel_height, l.kernel_width});
            l.bias.assign(l.out_channels, 0.0f);
            model.layers.push_back(std::move(l));
        }
        if (doc.contains("head") && !doc.at("head").is_null()) {
            LinearHead head;
            head.classes = doc["head"].at("classes").get<std::size_t>();
            head.features = doc["head"].at("features").get<std::size_t>();
            head.weights.assign(head.classes * head.features, 0.0f);
            head.bias.assign(head.classes, 0.0f);
            model.head = std::move(head);
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, std::string("model document: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::format) throw;
        throw Error(ErrorCode::format, std::string("model document: ") + e.what());
    }
}

void save_model(const ConvNetSpec& model, const std::filesystem::path& json_path) {
    std::filesystem::path blob_path = json_path;
    blob_path.replace_extension(".panwgt");
    write_file_atomic(blob_path, encode_weights(model));
    write_file_atomic(json_path, model_to_json(model, blob_path.filename().string()).dump(2) + "\n");
}

ConvNetSpec load_model(const std::filesystem::path& json_path) {
    json doc;
    std::filesystem::path blob;
    try {
        doc = json::parse(read_file_text(json_path));
        blob = doc.at("weights_file").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, json_path.string() + ": " + e.what());
    }
    ConvNetSpec model = model_from_json(doc);
    if (blob.is_relative()) blob = json_path.parent_path() / blob;
    decode_weights(model, read_file_bytes(blob));
    return model;
}

} // namespace panscope
