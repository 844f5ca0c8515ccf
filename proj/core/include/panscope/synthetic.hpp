#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "panscope/tensor.hpp"

namespace panscope {

/// Seeded stand-in for an in-distribution image batch.
///
/// With two or more channels the last one is a shading channel: a flat
/// per-image level in [0.1, 0.2] plus +/-0.02 pixel noise, with no edges.
/// The remaining structure channels carry i.i.d. U[0, 1] noise on every
/// fourth image (index % 4 == 0) and otherwise a piecewise-constant grid cut
/// by 4-10 vertical and 4-10 horizontal step edges at random interior
/// positions, cell levels U[0, 1] per channel, plus +/-0.02 noise.
/// All values are clamped at 0.
struct SyntheticBatchConfig {
    std::uint64_t seed = 0;
    std::size_t count = 16;
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t channels = 3;

    /// "seed,n,h,w"; channels are taken from the model. Throws Error(invalid_argument).
    static SyntheticBatchConfig parse(const std::string& text, std::size_t channels);
    std::string to_string() const;
};

Tensor make_synthetic_batch(const SyntheticBatchConfig& config);

/// Index of the shading channel, or channels when there is none.
std::size_t shading_channel(std::size_t channels) noexcept;

} // namespace panscope
