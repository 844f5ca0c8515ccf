#pragma once

// Deliberately naive reference implementations. They share no code with the
// library and trade speed for obviousness.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

struct Ks {
    double two_sided = 0.0;
    double less = 0.0;    // sup (F_b - F_a), floored at 0
    double greater = 0.0; // sup (F_a - F_b), floored at 0
};

/// Fraction of `s` that is <= x.
inline double ecdf(const std::vector<double>& s, double x) {
    std::size_t c = 0;
    for (double v : s) {
        if (v <= x) ++c;
    }
    return static_cast<double>(c) / static_cast<double>(s.size());
}

/// Evaluates both ECDFs at every pooled value, O(|a| |b|).
inline Ks ks_scan(const std::vector<double>& a, const std::vector<double>& b) {
    Ks r;
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double x : pooled) {
        const double d = ecdf(a, x) - ecdf(b, x);
        r.greater = std::max(r.greater, d);
        r.less = std::max(r.less, -d);
        r.two_sided = std::max(r.two_sided, d < 0 ? -d : d);
    }
    return r;
}

/// Source index of padded coordinate p (may be negative or >= n), or -1 for zero padding.
inline long padded_source(long p, long n, bool reflect) {
    if (p >= 0 && p < n) return p;
    if (!reflect) return -1;
    if (p < 0) return -p;
    return 2 * (n - 1) - p;
}

/// Plain direct convolution of input (N, C, H, W) with weights (O, C, KH, KW).
/// `reflect[o]` selects the padding seen by output channel o. Double accumulation.
inline std::vector<double> conv(const std::vector<float>& in, std::size_t n, std::size_t c, std::size_t h,
                                std::size_t w, const std::vector<float>& weights, std::size_t o, std::size_t kh,
                                std::size_t kw, const std::vector<float>& bias, std::size_t stride,
                                std::size_t pad, const std::vector<bool>& reflect, std::size_t& oh,
                                std::size_t& ow) {
    oh = (h + 2 * pad - kh) / stride + 1;
    ow = (w + 2 * pad - kw) / stride + 1;
    std::vector<double> out(n * o * oh * ow, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t oc = 0; oc < o; ++oc) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double acc = bias[oc];
                    for (std::size_t ic = 0; ic < c; ++ic) {
                        for (std::size_t ky = 0; ky < kh; ++ky) {
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                const long py = static_cast<long>(y * stride + ky) - static_cast<long>(pad);
                                const long px = static_cast<long>(x * stride + kx) - static_cast<long>(pad);
                                const long sy = padded_source(py, static_cast<long>(h), reflect[oc]);
                                const long sx = padded_source(px, static_cast<long>(w), reflect[oc]);
                                if (sy < 0 || sx < 0) continue;
                                const double v = in[((b * c + ic) * h + static_cast<std::size_t>(sy)) * w +
                                                    static_cast<std::size_t>(sx)];
                                acc += v * weights[((oc * c + ic) * kh + ky) * kw + kx];
                            }
                        }
                    }
                    out[((b * o + oc) * oh + y) * ow + x] = acc;
                }
            }
        }
    }
    return out;
}

} // namespace oracle
