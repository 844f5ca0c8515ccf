#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "panscope/tensor.hpp"

namespace panscope {

/// Activation samples of one neuron, pooled over a batch. Border regions are
/// the outermost row or column (corners belong to both a row and a column
/// region); the centre is every interior position.
struct RegionSamples {
    std::vector<double> top;
    std::vector<double> bottom;
    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> centre;
};

/// Throws Error(degenerate_map) when any map is smaller than 3 on an axis and
/// Error(empty_sample) when `maps` is empty.
RegionSamples extract_regions(std::span<const PlaneView> maps);

/// Convenience: every sample of channel `channel` of a (batch, C, H, W) tensor.
RegionSamples extract_regions(const Tensor& activations, std::size_t channel);

/// The k lowest and k highest centre values, each sorted ascending.
struct TruncatedCentre {
    std::vector<double> low;
    std::vector<double> high;
    std::size_t k = 0;
    /// Set when the centre holds fewer than k values and was used whole.
    bool shortfall = false;
};

TruncatedCentre truncate_centre(std::span<const double> centre, std::size_t k);

/// Same, for a centre that is already sorted ascending (no copy of the input).
TruncatedCentre truncate_sorted_centre(std::span<const double> sorted_centre, std::size_t k);

} // namespace panscope
