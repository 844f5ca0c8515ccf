#include "panscope/tensor.hpp"

#include <algorithm>
#include <string>

#include "panscope/error.hpp"

namespace panscope {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_padding: return "invalid padding";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::degenerate_map: return "degenerate map";
    case ErrorCode::empty_sample: return "empty sample";
    case ErrorCode::format: return "format error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::plant_failure: return "plant failure";
    case ErrorCode::unknown_neuron: return "unknown neuron";
    case ErrorCode::insufficient_neurons: return "insufficient neurons";
    }
    return "error";
}

namespace {

void check_shape(const Shape& shape) {
    if (shape.batch == 0 || shape.channels == 0 || shape.height == 0 || shape.width == 0) {
        throw Error(ErrorCode::shape_mismatch, "tensor dimensions must all be >= 1");
    }
}

} // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
    check_shape(shape_);
    data_.assign(shape_.elements(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_.elements()) {
        throw Error(ErrorCode::shape_mismatch, "tensor data holds " + std::to_string(data_.size()) +
                                                   " values, shape needs " + std::to_string(shape_.elements()));
    }
}

Tensor Tensor::slice_batch(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > shape_.batch) {
        throw Error(ErrorCode::shape_mismatch, "batch slice out of range");
    }
    Shape s = shape_;
    s.batch = count;
    const std::size_t per_sample = shape_.channels * shape_.plane();
    std::vector<float> out(data_.begin() + static_cast<std::ptrdiff_t>(first * per_sample),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * per_sample));
    return Tensor(s, std::move(out));
}

Tensor concat_batch(std::span<const Tensor> parts) {
    if (parts.empty()) throw Error(ErrorCode::shape_mismatch, "nothing to concatenate");
    Shape s = parts.front().shape();
    s.batch = 0;
    for (const Tensor& t : parts) {
        const Shape& p = t.shape();
        if (p.channels != s.channels || p.height != s.height || p.width != s.width) {
            throw Error(ErrorCode::shape_mismatch, "concatenated tensors disagree on (C, H, W)");
        }
        s.batch += p.batch;
    }
    std::vector<float> data;
    data.reserve(s.elements());
    for (const Tensor& t : parts) data.insert(data.end(), t.values().begin(), t.values().end());
    return Tensor(s, std::move(data));
}

} // namespace panscope
