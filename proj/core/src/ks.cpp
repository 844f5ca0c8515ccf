#include "panscope/ks.hpp"

#include <algorithm>
#include <vector>

#include "panscope/error.hpp"

namespace panscope {

KsStatistics ks_sorted(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::empty_sample, "KS statistic needs two non-empty samples");
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double up = 0.0;   // sup (F_a - F_b)
    double down = 0.0; // sup (F_b - F_a)
    // Step through the distinct pooled values; both ECDFs are evaluated after
    // consuming every copy of the current value.
    while (i < a.size() || j < b.size()) {
        double x;
        if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
            x = a[i];
        } else {
            x = b[j];
        }
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        const double diff = static_cast<double>(i) / n - static_cast<double>(j) / m;
        up = std::max(up, diff);
        down = std::max(down, -diff);
    }
    return {std::max(up, down), down, up};
}

namespace {

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

KsStatistics ks_statistics(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::empty_sample, "KS statistic needs two non-empty samples");
    return ks_sorted(sorted_copy(a), sorted_copy(b));
}

double ks_two_sided(std::span<const double> a, std::span<const double> b) { return ks_statistics(a, b).two_sided; }
double ks_less(std::span<const double> a, std::span<const double> b) { return ks_statistics(a, b).less; }
double ks_greater(std::span<const double> a, std::span<const double> b) { return ks_statistics(a, b).greater; }

} // namespace panscope
