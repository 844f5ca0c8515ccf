#pragma once

#include <span>

namespace panscope {

/// Two-sample Kolmogorov-Smirnov statistics between empirical CDFs F_a, F_b
/// (right-continuous, evaluated at every distinct pooled value):
///   two_sided = sup |F_a - F_b|
///   greater   = max(0, sup (F_a - F_b))
///   less      = max(0, sup (F_b - F_a))
/// `less` is large when `a` is stochastically greater than `b`, the same
/// convention as scipy.stats.ks_2samp(a, b, alternative="less").
struct KsStatistics {
    double two_sided = 0.0;
    double less = 0.0;
    double greater = 0.0;
};

/// Both inputs must be sorted ascending and non-empty.
KsStatistics ks_sorted(std::span<const double> a_sorted, std::span<const double> b_sorted);

/// Unsorted inputs; throws Error(empty_sample) if either is empty.
KsStatistics ks_statistics(std::span<const double> a, std::span<const double> b);

double ks_two_sided(std::span<const double> a, std::span<const double> b);
double ks_less(std::span<const double> a, std::span<const double> b);
double ks_greater(std::span<const double> a, std::span<const double> b);

} // namespace panscope
