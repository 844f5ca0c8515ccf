#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace panscope {

struct Histogram {
    std::vector<double> edges;        // bins + 1, ascending
    std::vector<std::size_t> counts;  // bins

    std::size_t total() const noexcept;
};

/// Uniform bins over `range`, or over [min, max] of the samples (widened by
/// 0.5 on each side when all samples are equal). Bins are half-open except
/// the last, which includes its upper edge; samples outside are dropped.
///
/// Throws Error(empty_sample) for no samples, Error(invalid_argument) for
/// zero bins or lo >= hi.
Histogram histogram(std::span<const double> samples, std::size_t bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

} // namespace panscope
