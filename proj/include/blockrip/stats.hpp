#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace blockrip {

struct WilsonInterval {
    double center;
    double halfwidth;
};

// Wilson score interval for a binomial proportion, z = 1.96 by default.
inline WilsonInterval wilson_ci(std::size_t successes, std::size_t n, double z = 1.96) {
    if (n == 0) return {0.0, 0.0};
    double p = static_cast<double>(successes) / static_cast<double>(n);
    double z2n = z * z / static_cast<double>(n);
    double center = (p + z2n / 2.0) / (1.0 + z2n);
    double hw = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2n * z2n / 4.0 / (z * z)) /
                (1.0 + z2n);
    return {center, hw};
}

inline double binomial_se(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// Slope of the least-squares line through (x_i, y_i).
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    double xm = mean(x);
    double ym = mean(y);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

}  // namespace blockrip
