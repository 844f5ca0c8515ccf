#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "panscope/tensor.hpp"

namespace panscope {

enum class PaddingPolicy { zero, reflect };

std::string_view to_string(PaddingPolicy policy) noexcept;
std::optional<PaddingPolicy> parse_padding_policy(std::string_view text) noexcept;

/// Grows a map by `amount` on every side. Zero fills with 0.0; reflect
/// mirrors about the edge element without repeating it, so the row
/// [a, b, c] padded by 1 becomes [b, a, b, c, b].
///
/// Throws Error(invalid_padding) for reflect when amount >= height or width.
Plane pad_map(const PlaneView& map, PaddingPolicy policy, std::size_t amount);

inline Plane pad_map(const Plane& map, PaddingPolicy policy, std::size_t amount) {
    return pad_map(PlaneView{map.values, map.height, map.width}, policy, amount);
}

/// Writes the padded map into `out`, which must hold
/// (height + 2 * amount) * (width + 2 * amount) values.
void pad_map_into(const PlaneView& map, PaddingPolicy policy, std::size_t amount, std::span<float> out);

} // namespace panscope
