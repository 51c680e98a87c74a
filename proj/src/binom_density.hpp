#pragma once

// Accurate binomial point mass after Loader (2000), "Fast and accurate
// computation of binomial probabilities". Relative error stays near machine
// precision for populations far beyond what log-gamma differences allow.

#include <cmath>
#include <numbers>

namespace survhc::detail {

/// log(n!) - log(sqrt(2 pi n) (n/e)^n)
inline double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        if (n == 0.0) return 0.0;
        long double ln = static_cast<long double>(n);
        return static_cast<double>(std::lgamma(ln + 1.0L) - (ln + 0.5L) * std::log(ln) + ln -
                                   0.5L * std::log(2.0L * std::numbers::pi_v<long double>));
    }
    double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x log(x / np) + np - x, evaluated stably near x = np.
inline double deviance(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

/// Pr(Binomial(n, p) = x) with q = 1 - p passed separately for accuracy.
inline double binom_point(double x, double n, double p, double q) {
    if (p == 0.0) return x == 0.0 ? 1.0 : 0.0;
    if (q == 0.0) return x == n ? 1.0 : 0.0;
    if (x < 0.0 || x > n) return 0.0;
    if (x == 0.0) {
        if (n == 0.0) return 1.0;
        double lc = p < 0.1 ? -deviance(n, n * q) - n * p : n * std::log(q);
        return std::exp(lc);
    }
    if (x == n) {
        double lc = q < 0.1 ? -deviance(n, n * p) - n * q : n * std::log(p);
        return std::exp(lc);
    }
    double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) - deviance(x, n * p) -
                deviance(n - x, n * q);
    double lf = std::log(2 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
    return std::exp(lc - 0.5 * lf);
}

}  // namespace survhc::detail
