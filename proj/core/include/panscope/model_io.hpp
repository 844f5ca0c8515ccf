#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "panscope/conv.hpp"

namespace panscope {

/// Sidecar weight blob: "PANWGT\0\0", u32 version (little-endian), then for
/// each layer in order its float32 weights followed by its bias, then the
/// head weights and head bias when the model has a head.
inline constexpr char kWeightMagic[8] = {'P', 'A', 'N', 'W', 'G', 'T', '\0', '\0'};
inline constexpr std::uint32_t kWeightVersion = 1;

/// Model description without weights. `weights_file` is stored verbatim.
nlohmann::json model_to_json(const ConvNetSpec& model, const std::string& weights_file);

std::vector<std::uint8_t> encode_weights(const ConvNetSpec& model);

/// Fills weights/bias of a model whose structure came from JSON.
void decode_weights(ConvNetSpec& model, std::span<const std::uint8_t> blob);

/// Structure only, zero weights; throws Error(format) on schema violations.
ConvNetSpec model_from_json(const nlohmann::json& doc);

/// Writes `json_path` and a sidecar next to it (same stem, ".panwgt").
void save_model(const ConvNetSpec& model, const std::filesystem::path& json_path);

ConvNetSpec load_model(const std::filesystem::path& json_path);

} // namespace panscope
