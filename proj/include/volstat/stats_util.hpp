#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "volstat/errors.hpp"

namespace volstat {

// Pairwise summation: order-independent reductions that keep rounding error
// at O(log n) regardless of how the terms were produced.
inline double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
    if (values.empty()) throw Error(errc::empty_sample, "mean of empty sample");
    return pairwise_sum(values) / static_cast<double>(values.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw Error(errc::too_short, "variance needs at least two points");
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) {
        const double d = v - m;
        acc += d * d;
    }
    return acc / static_cast<double>(n - 1);
}

struct OlsLine {
    double slope;
    double intercept;
};

// Least-squares line through (x_i, y_i).
inline OlsLine ols_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw Error(errc::too_short, "ols needs two equal-length samples of size >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(errc::slope_undefined, "zero variance in x");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace volstat
