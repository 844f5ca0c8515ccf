#include "panscope/padding.hpp"

#include <algorithm>
#include <string>

#include "panscope/error.hpp"

namespace panscope {

std::string_view to_string(PaddingPolicy policy) noexcept {
    return policy == PaddingPolicy::zero ? "zero" : "reflect";
}

std::optional<PaddingPolicy> parse_padding_policy(std::string_view text) noexcept {
    if (text == "zero") return PaddingPolicy::zero;
    if (text == "reflect") return PaddingPolicy::reflect;
    return std::nullopt;
}

namespace {

// Source index of padded position p (p in [0, n + 2 * amount)) under reflection.
std::size_t reflect_index(std::size_t p, std::size_t amount, std::size_t n) {
    const auto i = static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(amount);
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    if (i < 0) return static_cast<std::size_t>(-i);
    if (i > last) return static_cast<std::size_t>(2 * last - i);
    return static_cast<std::size_t>(i);
}

} // namespace

void pad_map_into(const PlaneView& map, PaddingPolicy policy, std::size_t amount, std::span<float> out) {
    const std::size_t h = map.height;
    const std::size_t w = map.width;
    const std::size_t ph = h + 2 * amount;
    const std::size_t pw = w + 2 * amount;
    if (out.size() != ph * pw) throw Error(ErrorCode::shape_mismatch, "padded buffer has the wrong size");
    if (policy == PaddingPolicy::reflect && amount > 0 && (amount >= h || amount >= w)) {
        throw Error(ErrorCode::invalid_padding, "reflect padding of " + std::to_string(amount) +
                                                    " needs a map larger than " + std::to_string(h) + "x" +
                                                    std::to_string(w));
    }

    if (policy == PaddingPolicy::zero) {
        std::fill(out.begin(), out.end(), 0.0f);
        for (std::size_t y = 0; y < h; ++y) {
            std::copy_n(map.values.begin() + static_cast<std::ptrdiff_t>(y * w), w,
                        out.begin() + static_cast<std::ptrdiff_t>((y + amount) * pw + amount));
        }
        return;
    }

    for (std::size_t py = 0; py < ph; ++py) {
        const std::size_t sy = reflect_index(py, amount, h);
        for (std::size_t px = 0; px < pw; ++px) {
            out[py * pw + px] = map.values[sy * w + reflect_index(px, amount, w)];
        }
    }
}

Plane pad_map(const PlaneView& map, PaddingPolicy policy, std::size_t amount) {
    Plane out;
    out.height = map.height + 2 * amount;
    out.width = map.width + 2 * amount;
    out.values.resize(out.height * out.width);
    pad_map_into(map, policy, amount, out.values);
    return out;
}

} // namespace panscope
