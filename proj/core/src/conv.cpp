#include "panscope/conv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "panscope/error.hpp"
#include "panscope/parallel.hpp"

namespace panscope {

std::string_view to_string(Nonlinearity nonlinearity) noexcept {
    return nonlinearity == Nonlinearity::relu ? "relu" : "none";
}

std::optional<Nonlinearity> parse_nonlinearity(std::string_view text) noexcept {
    if (text == "relu") return Nonlinearity::relu;
    if (text == "none") return Nonlinearity::none;
    return std::nullopt;
}

std::size_t ConvLayerSpec::output_extent(std::size_t in, std::size_t kernel) const {
    const std::size_t padded = in + 2 * padding;
    if (padded < kernel) {
        throw Error(ErrorCode::shape_mismatch, "layer '" + name + "': kernel " + std::to_string(kernel) +
                                                   " larger than padded input " + std::to_string(padded));
    }
    return (padded - kernel) / stride + 1;
}

void ConvLayerSpec::validate() const {
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::shape_mismatch, "layer '" + name + "': " + what);
    };
    if (in_channels == 0 || out_channels == 0) fail("channel counts must be >= 1");
    if (kernel_height == 0 || kernel_width == 0) fail("kernel dimensions must be >= 1");
    if (stride == 0) fail("stride must be >= 1");
    const Shape expected{out_channels, in_channels, kernel_height, kernel_width};
    if (!(weights.shape() == expected)) fail("weights shape does not match channel/kernel fields");
    if (bias.size() != out_channels) fail("bias length does not match out_channels");
    if (!channel_policies.empty() && channel_policies.size() != out_channels) {
        fail("channel_policies must be empty or hold one entry per output channel");
    }
}

std::size_t ConvNetSpec::input_channels() const {
    if (layers.empty()) throw Error(ErrorCode::shape_mismatch, "model has no layers");
    return layers.front().in_channels;
}

std::optional<std::size_t> ConvNetSpec::find_layer(std::string_view layer_name) const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].name == layer_name) return i;
    }
    return std::nullopt;
}

void ConvNetSpec::validate() const {
    if (layers.empty()) throw Error(ErrorCode::shape_mismatch, "model '" + name + "' has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate();
        if (i > 0 && layers[i - 1].out_channels != layers[i].in_channels) {
            throw Error(ErrorCode::shape_mismatch, "layer '" + layers[i].name + "' expects " +
                                                       std::to_string(layers[i].in_channels) +
                                                       " channels, previous layer produces " +
                                                       std::to_string(layers[i - 1].out_channels));
        }
    }
    if (head) {
        if (head->features != layers.back().out_channels) {
            throw Error(ErrorCode::shape_mismatch, "head features do not match the last layer");
        }
        if (head->classes == 0 || head->weights.size() != head->classes * head->features ||
            head->bias.size() != head->classes) {
            throw Error(ErrorCode::shape_mismatch, "head weights/bias have the wrong size");
        }
    }
}

namespace {

// One sample: input (1, C, H, W) -> output (1, O, OH, OW).
Tensor conv_sample(const Tensor& input, std::size_t n, const ConvLayerSpec& layer) {
    const Shape& in = input.shape();
    const std::size_t oh = layer.output_extent(in.height, layer.kernel_height);
    const std::size_t ow = layer.output_extent(in.width, layer.kernel_width);
    const std::size_t ph = in.height + 2 * layer.padding;
    const std::size_t pw = in.width + 2 * layer.padding;
    const std::size_t padded_plane = ph * pw;

    bool need[2] = {false, false};
    for (std::size_t oc = 0; oc < layer.out_channels; ++oc) {
        need[static_cast<int>(layer.policy_for(oc))] = true;
    }
    std::vector<float> padded[2];
    for (int p = 0; p < 2; ++p) {
        if (!need[p]) continue;
        padded[p].resize(in.channels * padded_plane);
        for (std::size_t c = 0; c < in.channels; ++c) {
            PlaneView view{input.plane(n, c), in.height, in.width};
            pad_map_into(view, static_cast<PaddingPolicy>(p), layer.padding,
                         std::span<float>(padded[p]).subspan(c * padded_plane, padded_plane));
        }
    }

    Tensor out(Shape{1, layer.out_channels, oh, ow});
    const std::size_t kh = layer.kernel_height;
    const std::size_t kw = layer.kernel_width;
    const std::size_t s = layer.stride;
    const std::span<const float> weights = layer.weights.data();

    std::vector<float> acc(oh * ow);
    for (std::size_t oc = 0; oc < layer.out_channels; ++oc) {
        const std::vector<float>& src = padded[static_cast<int>(layer.policy_for(oc))];
        std::fill(acc.begin(), acc.end(), 0.0f);
        // Loop order keeps every output's accumulation in (ic, ky, kx) order.
        for (std::size_t ic = 0; ic < in.channels; ++ic) {
            const float* plane = src.data() + ic * padded_plane;
            const float* kernel = weights.data() + (oc * in.channels + ic) * kh * kw;
            for (std::size_t ky = 0; ky < kh; ++ky) {
                for (std::size_t kx = 0; kx < kw; ++kx) {
                    const float w = kernel[ky * kw + kx];
                    for (std::size_t oy = 0; oy < oh; ++oy) {
                        const float* row = plane + (oy * s + ky) * pw + kx;
                        float* dst = acc.data() + oy * ow;
                        if (s == 1) {
                            for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] += w * row[ox];
                        } else {
                            for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] += w * row[ox * s];
                        }
                    }
                }
            }
        }
        std::span<float> dst = out.plane(0, oc);
        const float b = layer.bias[oc];
        for (std::size_t i = 0; i < acc.size(); ++i) dst[i] = acc[i] + b;
    }
    return out;
}

void check_input(const Tensor& input, const ConvLayerSpec& layer) {
    if (input.shape().channels != layer.in_channels) {
        throw Error(ErrorCode::shape_mismatch, "layer '" + layer.name + "' expects " +
                                                   std::to_string(layer.in_channels) + " input channels, got " +
                                                   std::to_string(input.shape().channels));
    }
}

} // namespace

Tensor conv2d(const Tensor& input, const ConvLayerSpec& layer) {
    layer.validate();
    check_input(input, layer);
    const std::size_t batch = input.shape().batch;
    std::vector<Tensor> parts(batch);
    parallel_for(batch, [&](std::size_t n) { parts[n] = conv_sample(input, n, layer); });
    return concat_batch(parts);
}

Tensor apply_nonlinearity(Tensor values, Nonlinearity nonlinearity) {
    if (nonlinearity == Nonlinearity::relu) {
        for (float& v : values.data()) v = v > 0.0f ? v : 0.0f;
    }
    return values;
}

ForwardResult forward(const ConvNetSpec& model, const Tensor& batch) {
    model.validate();
    check_input(batch, model.layers.front());

    const std::size_t samples = batch.shape().batch;
    const std::size_t depth = model.layers.size();
    std::vector<std::vector<Tensor>> per_sample(samples);
    std::vector<std::vector<double>> logits(samples);

    parallel_for(samples, [&](std::size_t n) {
        std::vector<Tensor>& outputs = per_sample[n];
        outputs.reserve(depth);
        Tensor x = batch.slice_batch(n, 1);
        for (const ConvLayerSpec& layer : model.layers) {
            check_input(x, layer);
            outputs.push_back(conv_sample(x, 0, layer));
            x = apply_nonlinearity(outputs.back(), layer.activation);
        }
        if (model.head) {
            const LinearHead& head = *model.head;
            std::vector<double> pooled(head.features);
            const double area = static_cast<double>(x.shape().plane());
            for (std::size_t f = 0; f < head.features; ++f) {
                double sum = 0.0;
                for (float v : x.plane(0, f)) sum += v;
                pooled[f] = sum / area;
            }
            std::vector<double>& out = logits[n];
            out.resize(head.classes);
            for (std::size_t c = 0; c < head.classes; ++c) {
                double z = head.bias[c];
                for (std::size_t f = 0; f < head.features; ++f) {
                    z += static_cast<double>(head.weights[c * head.features + f]) * pooled[f];
                }
                out[c] = z;
            }
        }
    });

    ForwardResult result;
    result.trace.model_name = model.name;
    result.trace.layers.reserve(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        std::vector<Tensor> parts;
        parts.reserve(samples);
        for (std::size_t n = 0; n < samples; ++n) parts.push_back(std::move(per_sample[n][l]));
        result.trace.layers.push_back({model.layers[l].name, concat_batch(parts)});
    }
    if (model.head) {
        ClassScores scores;
        scores.samples = samples;
        scores.classes = model.head->classes;
        scores.values.reserve(samples * scores.classes);
        for (const auto& row : logits) scores.values.insert(scores.values.end(), row.begin(), row.end());
        result.logits = std::move(scores);
    }
    return result;
}

ClassScores softmax(const ClassScores& logits) {
    ClassScores out = logits;
    for (std::size_t i = 0; i < logits.samples; ++i) {
        std::span<double> row = out.row(i);
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
            v = std::exp(v - peak);
            total += v;
        }
        for (double& v : row) v /= total;
    }
    return out;
}

} // namespace panscope
