#include "panscope/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "panscope/error.hpp"

namespace panscope {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorCode::invalid_argument, "Rng::below needs a positive bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x < limit) return x % bound;
    }
}

double Rng::normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t population, std::size_t count) {
    if (count > population) throw Error(ErrorCode::invalid_argument, "sample larger than population");
    // Partial Fisher-Yates over a sparse permutation.
    std::unordered_map<std::size_t, std::size_t> swapped;
    auto value_at = [&](std::size_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(population - i));
        const std::size_t vi = value_at(i);
        const std::size_t vj = value_at(j);
        out.push_back(vj);
        swapped[j] = vi;
        swapped[i] = vj;
    }
    return out;
}

} // namespace panscope
