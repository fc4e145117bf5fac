// Small statistics helpers shared by the unit tests.  Kept independent of the
// library's own verification module so the samplers and the test machinery
// cannot share a bug.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// sqrt(n) * sup |F_n - F|.  Values above 2.2 have p < 2e-4 under the null.
inline double ks_scaled(std::vector<double> xs,
                        const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
    }
    return std::sqrt(n) * d;
}

// sqrt(nm/(n+m)) * sup |F_n - G_m|.
inline double ks_two_sample_scaled(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        // Consume every sample equal to the current value before comparing,
        // otherwise ties inflate the statistic.
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return std::sqrt(na * nb / (na + nb)) * d;
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(xs.size()) - 1.0));
}

// Standard error of the sample mean.
inline double se(const std::vector<double>& xs) {
    return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace testutil
