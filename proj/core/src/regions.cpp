#include "panscope/regions.hpp"

#include <algorithm>
#include <string>

#include "panscope/error.hpp"

namespace panscope {

RegionSamples extract_regions(std::span<const PlaneView> maps) {
    if (maps.empty()) throw Error(ErrorCode::empty_sample, "no activation maps to extract regions from");
    RegionSamples r;
    for (const PlaneView& map : maps) {
        if (map.height < 3 || map.width < 3) {
            throw Error(ErrorCode::degenerate_map, "map " + std::to_string(map.height) + "x" +
                                                       std::to_string(map.width) + " has no centre region");
        }
    }
    for (const PlaneView& map : maps) {
        const std::size_t h = map.height;
        const std::size_t w = map.width;
        for (std::size_t x = 0; x < w; ++x) {
            r.top.push_back(map.at(0, x));
            r.bottom.push_back(map.at(h - 1, x));
        }
        for (std::size_t y = 0; y < h; ++y) {
            r.left.push_back(map.at(y, 0));
            r.right.push_back(map.at(y, w - 1));
        }
        for (std::size_t y = 1; y + 1 < h; ++y) {
            for (std::size_t x = 1; x + 1 < w; ++x) r.centre.push_back(map.at(y, x));
        }
    }
    return r;
}

RegionSamples extract_regions(const Tensor& activations, std::size_t channel) {
    const Shape& s = activations.shape();
    if (channel >= s.channels) throw Error(ErrorCode::invalid_argument, "channel out of range");
    std::vector<PlaneView> maps;
    maps.reserve(s.batch);
    for (std::size_t n = 0; n < s.batch; ++n) maps.push_back({activations.plane(n, channel), s.height, s.width});
    return extract_regions(maps);
}

TruncatedCentre truncate_sorted_centre(std::span<const double> sorted, std::size_t k) {
    if (sorted.empty()) throw Error(ErrorCode::empty_sample, "centre region is empty");
    TruncatedCentre t;
    t.k = k;
    t.shortfall = sorted.size() < k;
    const std::size_t take = std::min(k, sorted.size());
    t.low.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take));
    t.high.assign(sorted.end() - static_cast<std::ptrdiff_t>(take), sorted.end());
    return t;
}

TruncatedCentre truncate_centre(std::span<const double> centre, std::size_t k) {
    if (centre.empty()) throw Error(ErrorCode::empty_sample, "centre region is empty");
    std::vector<double> sorted(centre.begin(), centre.end());
    std::sort(sorted.begin(), sorted.end());
    return truncate_sorted_centre(sorted, k);
}

} // namespace panscope
