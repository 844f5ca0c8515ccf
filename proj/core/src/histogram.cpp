#include "panscope/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panscope/error.hpp"

namespace panscope {

std::size_t Histogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram histogram(std::span<const double> samples, std::size_t bins,
                    std::optional<std::pair<double, double>> range) {
    if (samples.empty()) throw Error(ErrorCode::empty_sample, "histogram of an empty sample");
    if (bins == 0) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");

    double lo;
    double hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(lo < hi)) throw Error(ErrorCode::invalid_argument, "histogram range needs lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = *mn;
        hi = *mx;
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }

    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);

    for (double v : samples) {
        if (!(v >= lo && v <= hi)) continue;
        auto bin = static_cast<std::size_t>((v - lo) / width);
        bin = std::min(bin, bins - 1);
        // Floating division can land one bin off near an edge; settle on the edges.
        while (bin > 0 && v < h.edges[bin]) --bin;
        while (bin + 1 < bins && v >= h.edges[bin + 1]) ++bin;
        ++h.counts[bin];
    }
    return h;
}

} // namespace panscope
