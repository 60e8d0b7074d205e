#pragma once

// Small statistics helpers for frequency and moment oracles.

#include <cmath>
#include <cstddef>
#include <vector>

namespace iil::test {

// Upper-tail chi-square critical value via the Wilson-Hilferty approximation.
inline double chi2_critical(std::size_t dof, double z_upper) {
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z_upper * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

// z for the 99th percentile of the standard normal (p = 0.01 upper tail).
inline constexpr double kZ99 = 2.3263478740408408;

inline double chi2_statistic(const std::vector<std::size_t>& counts, double expected) {
    double stat = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

inline double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace iil::test
