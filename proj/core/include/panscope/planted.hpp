#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panscope/conv.hpp"
#include "panscope/detector.hpp"
#include "panscope/synthetic.hpp"

namespace panscope {

enum class PlantKind { pan, prewitt_v, prewitt_h, sobel_v, sobel_h, log, random };

std::string_view to_string(PlantKind kind) noexcept;
std::optional<PlantKind> parse_plant_kind(std::string_view text) noexcept;
bool is_edge_kind(PlantKind kind) noexcept;

/// Square kernel for a single input channel.
struct Kernel2D {
    std::size_t size = 3;
    std::vector<float> values; // size * size, row-major

    float at(std::size_t y, std::size_t x) const { return values[y * size + x]; }
    float sum() const;
};

/// Canonical 3x3 difference operators. `log` is the negated discrete
/// Laplacian [[0,-1,0],[-1,4,-1],[0,-1,0]]. Throws Error(invalid_argument)
/// for non-edge kinds.
Kernel2D make_edge_kernel(PlantKind kind);

/// Padding-detector kernel for a "same"-padded layer (pad = (size-1)/2).
/// For each border in the set, the kernel holds -gain on the innermost
/// row/column that lies over padding at that border and +gain on the centre
/// row/column. Rows and columns balance, so a flat input gives 0 while
/// padding under the outer row/column raises the output.
/// Throws Error(invalid_argument) for an empty set or an even/too-small size.
Kernel2D make_pan_kernel(BorderSet borders, std::size_t size, float gain = 1.0f);

struct PlantSpec {
    std::size_t layer = 0;
    std::size_t channel = 0;
    PlantKind kind = PlantKind::random;
    BorderSet borders; // pan only
    /// Input channels the kernel reads; empty selects the defaults described
    /// on build_synthetic_network().
    std::vector<std::size_t> sources;
};

struct GroundTruthEntry {
    NeuronId neuron;
    PlantKind kind = PlantKind::random;
    Verdict expected = Verdict::none; // pan for PAN plants, edge_candidate for edge plants
    BorderSet borders;
};

struct GroundTruth {
    std::vector<GroundTruthEntry> entries;

    const GroundTruthEntry* find(NeuronId id) const;
    std::vector<NeuronId> planted_pans() const;
};

struct LayerTemplate {
    std::size_t out_channels = 64;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t padding = 1;
    PaddingPolicy policy = PaddingPolicy::zero;
    Nonlinearity activation = Nonlinearity::relu;
};

struct NetworkTemplate {
    std::string name = "synthetic";
    std::size_t input_channels = 3;
    std::vector<LayerTemplate> layers;
    std::size_t head_classes = 0; // 0: no head
};

struct SyntheticNetworkOptions {
    std::uint64_t seed = 0;
    float pan_gain = 1.5f;
    /// Batch used to verify every PAN plant at construction.
    SyntheticBatchConfig calibration{};
    /// Separation a planted target border must reach on ks and on ks_plus or ks_minus.
    double plant_separation = 0.9;
    DetectorConfig detector{};
};

struct SyntheticNetwork {
    ConvNetSpec model;
    GroundTruth truth;
};

/// Builds a network from the template. Unplanted kernels are He-uniform,
/// U(-b, b) with b = sqrt(6 / fan_in), each (output, input) slice shifted to
/// zero mean; biases U(-0.1, 0.1); the head holds N(0, 1) class prototypes.
/// All draws come from Rng(seed) in layer, channel order.
///
/// Planted channels are overwritten: PAN plants read the shading channel of
/// the synthetic batch at layer 0 (every input channel deeper in), edge plants
/// read the structure channels at layer 0 (every input channel deeper in).
/// Every PAN plant is verified on the calibration batch: each target border
/// must reach plant_separation on ks and on ks_plus or ks_minus, and the
/// detected type must equal the planted one; otherwise Error(plant_failure).
///
/// Throws Error(invalid_argument) for out-of-range or duplicate positions.
SyntheticNetwork build_synthetic_network(const NetworkTemplate& net, const std::vector<PlantSpec>& plants,
                                         const SyntheticNetworkOptions& options);

/// Precision/recall of the pan verdict against planted PANs. Neurons without
/// a ground-truth entry count as negatives; edge plants labelled
/// edge_candidate are not false positives.
struct DetectorEvaluation {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t flagged = 0;
    double precision = 1.0;
    double recall = 1.0;
    /// Nothing was flagged; precision is reported as 1.0 by convention.
    bool nothing_flagged = false;
    /// confusion[planted type][detected]: detected 0 = not pan, 1..15 = type index + 1.
    std::array<std::array<std::size_t, 16>, 15> confusion{};
    std::size_t type_mismatches = 0;
    std::vector<NeuronId> false_positive_neurons;
    std::vector<NeuronId> missed_neurons;
};

DetectorEvaluation evaluate_labels(const Census& census, const GroundTruth& truth);

DetectorEvaluation evaluate_detector(const ConvNetSpec& model, const GroundTruth& truth, const Tensor& batch,
                                     const DetectorConfig& config);

/// The fixed four-layer, 64-channel evaluation network with six PAN plants
/// (T, B, LR, TB, TBLR, L) in layer 0.
NetworkTemplate reference_template(std::size_t head_classes = 10);
std::vector<PlantSpec> reference_plants();

} // namespace panscope
