#include "panscope/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <vector>

#include "panscope/error.hpp"
#include "panscope/rng.hpp"

namespace panscope {

namespace {

constexpr double kShadingLow = 0.1;
constexpr double kShadingHigh = 0.2;
constexpr double kNoise = 0.02;
constexpr std::int64_t kMinCuts = 4;
constexpr std::int64_t kMaxCuts = 10;

std::vector<std::size_t> draw_cuts(Rng& rng, std::size_t extent) {
    // Cut positions lie in [2, extent - 2) so no step touches the outer two rows/columns.
    if (extent < 5) return {};
    const std::size_t available = extent - 4;
    const auto wanted = static_cast<std::size_t>(rng.between(kMinCuts, kMaxCuts));
    std::vector<std::size_t> cuts = rng.sample_without_replacement(available, std::min(wanted, available));
    for (auto& c : cuts) c += 2;
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

std::size_t cell_of(const std::vector<std::size_t>& cuts, std::size_t pos) {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), pos) - cuts.begin());
}

} // namespace

SyntheticBatchConfig SyntheticBatchConfig::parse(const std::string& text, std::size_t channels) {
    std::vector<std::uint64_t> fields;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::uint64_t value = 0;
        const char* first = text.data() + start;
        const char* last = text.data() + comma;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || first == last) {
            throw Error(ErrorCode::invalid_argument, "synthetic batch must be seed,n,h,w; got '" + text + "'");
        }
        fields.push_back(value);
        start = comma + 1;
    }
    if (fields.size() != 4) throw Error(ErrorCode::invalid_argument, "synthetic batch must be seed,n,h,w; got '" + text + "'");
    SyntheticBatchConfig c;
    c.seed = fields[0];
    c.count = static_cast<std::size_t>(fields[1]);
    c.height = static_cast<std::size_t>(fields[2]);
    c.width = static_cast<std::size_t>(fields[3]);
    c.channels = channels;
    if (c.count == 0 || c.height == 0 || c.width == 0 || c.channels == 0) {
        throw Error(ErrorCode::invalid_argument, "synthetic batch dimensions must be positive");
    }
    return c;
}

std::string SyntheticBatchConfig::to_string() const {
    return std::to_string(seed) + "," + std::to_string(count) + "," + std::to_string(height) + "," +
           std::to_string(width);
}

std::size_t shading_channel(std::size_t channels) noexcept { return channels >= 2 ? channels - 1 : channels; }

Tensor make_synthetic_batch(const SyntheticBatchConfig& config) {
    if (config.count == 0 || config.height == 0 || config.width == 0 || config.channels == 0) {
        throw Error(ErrorCode::invalid_argument, "synthetic batch dimensions must be positive");
    }
    const std::size_t h = config.height;
    const std::size_t w = config.width;
    const std::size_t shade = shading_channel(config.channels);
    const std::size_t structure = std::min(shade, config.channels);

    Tensor batch(Shape{config.count, config.channels, h, w});
    Rng rng(config.seed);
    for (std::size_t n = 0; n < config.count; ++n) {
        if (n % 4 == 0) {
            for (std::size_t c = 0; c < structure; ++c) {
                for (float& v : batch.plane(n, c)) v = static_cast<float>(rng.uniform01());
            }
        } else {
            const std::vector<std::size_t> vcuts = draw_cuts(rng, w);
            const std::vector<std::size_t> hcuts = draw_cuts(rng, h);
            const std::size_t cols = vcuts.size() + 1;
            const std::size_t rows = hcuts.size() + 1;
            for (std::size_t c = 0; c < structure; ++c) {
                std::vector<double> level(rows * cols);
                for (double& l : level) l = rng.uniform01();
                auto map = batch.plane(n, c);
                for (std::size_t y = 0; y < h; ++y) {
                    const std::size_t r = cell_of(hcuts, y);
                    for (std::size_t x = 0; x < w; ++x) {
                        map[y * w + x] = static_cast<float>(level[r * cols + cell_of(vcuts, x)]);
                    }
                }
            }
            for (std::size_t c = 0; c < structure; ++c) {
                for (float& v : batch.plane(n, c)) v += static_cast<float>(rng.uniform(-kNoise, kNoise));
            }
        }
        if (shade < config.channels) {
            const double level = rng.uniform(kShadingLow, kShadingHigh);
            for (float& v : batch.plane(n, shade)) v = static_cast<float>(level + rng.uniform(-kNoise, kNoise));
        }
    }
    for (float& v : batch.data()) v = std::max(v, 0.0f);
    return batch;
}

} // namespace panscope
