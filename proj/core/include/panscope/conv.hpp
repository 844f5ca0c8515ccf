#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panscope/padding.hpp"
#include "panscope/tensor.hpp"

namespace panscope {

enum class Nonlinearity { none, relu };

std::string_view to_string(Nonlinearity nonlinearity) noexcept;
std::optional<Nonlinearity> parse_nonlinearity(std::string_view text) noexcept;

struct ConvLayerSpec {
    std::string name;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_height = 1;
    std::size_t kernel_width = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;
    PaddingPolicy policy = PaddingPolicy::zero;
    /// Per output channel override of `policy`; empty means every channel
    /// uses `policy`. Used by the padding-swap variants.
    std::vector<PaddingPolicy> channel_policies;
    /// (out_channels, in_channels, kernel_height, kernel_width)
    Tensor weights;
    std::vector<float> bias;
    /// Applied when propagating to the next layer, never to the captured output.
    Nonlinearity activation = Nonlinearity::relu;

    PaddingPolicy policy_for(std::size_t channel) const noexcept {
        return channel_policies.empty() ? policy : channel_policies[channel];
    }
    /// Kernels larger than 1x1 touch padding; these are the analysed layers.
    bool spatial() const noexcept { return kernel_height > 1 || kernel_width > 1; }

    /// Output size along one axis: floor((in + 2 * pad - kernel) / stride) + 1.
    std::size_t output_extent(std::size_t in, std::size_t kernel) const;

    /// Throws Error(shape_mismatch) when fields disagree with `weights`/`bias`.
    void validate() const;

    friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

/// Linear classifier over the global average pool of the last layer.
struct LinearHead {
    std::size_t classes = 0;
    std::size_t features = 0;
    std::vector<float> weights; // (classes, features), row-major
    std::vector<float> bias;    // classes

    friend bool operator==(const LinearHead&, const LinearHead&) = default;
};

struct ConvNetSpec {
    std::string name;
    std::vector<ConvLayerSpec> layers;
    std::optional<LinearHead> head;

    std::size_t input_channels() const;
    /// Index of the layer called `layer_name`, if any.
    std::optional<std::size_t> find_layer(std::string_view layer_name) const;
    /// Checks every layer plus channel compatibility between neighbours.
    void validate() const;

    friend bool operator==(const ConvNetSpec&, const ConvNetSpec&) = default;
};

struct LayerActivation {
    std::string name;
    Tensor output; // pre-nonlinearity

    friend bool operator==(const LayerActivation&, const LayerActivation&) = default;
};

struct ActivationTrace {
    std::string model_name;
    std::vector<LayerActivation> layers;

    std::size_t batch_size() const { return layers.empty() ? 0 : layers.front().output.shape().batch; }

    friend bool operator==(const ActivationTrace&, const ActivationTrace&) = default;
};

/// (samples, classes) in double precision.
struct ClassScores {
    std::size_t samples = 0;
    std::size_t classes = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values).subspan(i * classes, classes);
    }
    std::span<double> row(std::size_t i) { return std::span<double>(values).subspan(i * classes, classes); }
};

struct ForwardResult {
    ActivationTrace trace;
    std::optional<ClassScores> logits;
};

/// Direct convolution. Each output is the kernel dot product with the padded
/// window, accumulated in float in (input channel, kernel row, kernel column)
/// order, plus the bias. Returns pre-nonlinearity values.
Tensor conv2d(const Tensor& input, const ConvLayerSpec& layer);

Tensor apply_nonlinearity(Tensor values, Nonlinearity nonlinearity);

/// Runs the whole network. Samples are processed independently (possibly in
/// parallel) and assembled in batch order, so results are bit-identical
/// across runs and thread counts.
ForwardResult forward(const ConvNetSpec& model, const Tensor& batch);

/// Softmax of every row, computed in double.
ClassScores softmax(const ClassScores& logits);

} // namespace panscope
