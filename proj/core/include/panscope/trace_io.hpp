#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "panscope/conv.hpp"

namespace panscope {

/// PANTRACE layout, all integers unsigned 32-bit little-endian:
///   "PANTRACE" | version (1) | model name length | model name (UTF-8)
///   | layer count | batch size
///   | per layer: name length | name | batch, channels, height, width
///                | float32 little-endian values
inline constexpr char kTraceMagic[8] = {'P', 'A', 'N', 'T', 'R', 'A', 'C', 'E'};
inline constexpr std::uint32_t kTraceVersion = 1;

std::vector<std::uint8_t> encode_trace(const ActivationTrace& trace);

/// Throws Error(format) naming the first problem: magic mismatch,
/// unsupported version, truncated data, dimension overflow, batch mismatch
/// or trailing bytes.
ActivationTrace decode_trace(std::span<const std::uint8_t> bytes);

void write_trace(const ActivationTrace& trace, const std::filesystem::path& path);
ActivationTrace read_trace(const std::filesystem::path& path);

/// Input batches travel as a one-entry trace whose layer is named "input".
ActivationTrace batch_as_trace(const Tensor& batch, const std::string& name = "input");
Tensor batch_from_trace(const ActivationTrace& trace);

} // namespace panscope
