#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace panscope {

/// (batch, channels, height, width), every dimension >= 1.
struct Shape {
    std::size_t batch = 1;
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t elements() const noexcept { return batch * channels * height * width; }
    std::size_t plane() const noexcept { return height * width; }
    std::array<std::size_t, 4> dims() const noexcept { return {batch, channels, height, width}; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense float32 tensor in row-major (batch, channel, row, column) order.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, float fill = 0.0f);
    Tensor(Shape shape, std::vector<float> data);

    const Shape& shape() const noexcept { return shape_; }
    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }
    const std::vector<float>& values() const noexcept { return data_; }

    float& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept {
        return data_[offset(n, c, y, x)];
    }
    float at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return data_[offset(n, c, y, x)];
    }

    /// One (height x width) map.
    std::span<const float> plane(std::size_t n, std::size_t c) const noexcept {
        return std::span<const float>(data_).subspan(offset(n, c, 0, 0), shape_.plane());
    }
    std::span<float> plane(std::size_t n, std::size_t c) noexcept {
        return std::span<float>(data_).subspan(offset(n, c, 0, 0), shape_.plane());
    }

    /// Samples [first, first + count) as a new tensor.
    Tensor slice_batch(std::size_t first, std::size_t count) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t offset(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return ((n * shape_.channels + c) * shape_.height + y) * shape_.width + x;
    }

    Shape shape_{};
    std::vector<float> data_ = std::vector<float>(1, 0.0f);
};

/// Single 2-D map, row-major.
struct Plane {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> values;

    float at(std::size_t y, std::size_t x) const noexcept { return values[y * width + x]; }
    float& at(std::size_t y, std::size_t x) noexcept { return values[y * width + x]; }

    friend bool operator==(const Plane&, const Plane&) = default;
};

/// Non-owning view of a 2-D map.
struct PlaneView {
    std::span<const float> values;
    std::size_t height = 0;
    std::size_t width = 0;

    float at(std::size_t y, std::size_t x) const noexcept { return values[y * width + x]; }
};

/// Stack per-sample batches along the batch axis. All parts must agree on
/// (channels, height, width).
Tensor concat_batch(std::span<const Tensor> parts);

} // namespace panscope
