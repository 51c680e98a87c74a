#include "survhc/exact_hyg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "binom_density.hpp"
#include "survhc/error.hpp"

namespace survhc {

void HygParams::validate() const {
    if (M < 0 || N < 0 || n < 0 || N > M || n > M) {
        throw ArgumentError("invalid hypergeometric parameters (M=" + std::to_string(M) + ", N=" +
                            std::to_string(N) + ", n=" + std::to_string(n) + ")");
    }
}

namespace {

// Caller guarantees lower() <= k <= upper() and lower() < upper().
double pmf_in_support(const HygParams& h, std::int64_t k) {
    const double M = static_cast<double>(h.M);
    const double p = static_cast<double>(h.n) / M;
    const double q = static_cast<double>(h.M - h.n) / M;
    const double a = detail::binom_point(static_cast<double>(k), static_cast<double>(h.N), p, q);
    const double b = detail::binom_point(static_cast<double>(h.n - k), static_cast<double>(h.M - h.N), p, q);
    const double c = detail::binom_point(static_cast<double>(h.n), M, p, q);
    return a * b / c;
}

}  // namespace

double hyg_pmf(const HygParams& params, std::int64_t k) {
    params.validate();
    const auto lo = params.lower(), hi = params.upper();
    if (k < lo || k > hi) return 0.0;
    if (lo == hi) return 1.0;
    return std::min(1.0, pmf_in_support(params, k));
}

double hyg_sf(const HygParams& params, std::int64_t m) {
    params.validate();
    const auto lo = params.lower(), hi = params.upper();
    if (m <= lo) return 1.0;
    if (m > hi) return 0.0;

    const long double N = static_cast<long double>(params.N);
    const long double n = static_cast<long double>(params.n);
    const long double other = static_cast<long double>(params.M - params.N);

    long double term = pmf_in_support(params, m);
    long double sum = term;
    for (std::int64_t k = m; k < hi && term > 0.0L; ++k) {
        const long double kk = static_cast<long double>(k);
        const long double ratio = (N - kk) * (n - kk) / ((kk + 1.0L) * (other - n + kk + 1.0L));
        term *= ratio;
        sum += term;
        if (ratio < 1.0L && term < 1e-18L * sum) break;
    }
    return static_cast<double>(std::min(sum, 1.0L));
}

double randomized_pvalue(const HygParams& params, std::int64_t m, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw ArgumentError("randomization u must lie in [0, 1)");
    const double v = hyg_sf(params, m) - u * hyg_pmf(params, m);
    return std::clamp(v, 0.0, 1.0);
}

HygParams interval_params(const IntervalTable& table, std::size_t t, Direction direction) {
    HygParams h;
    h.M = table.n_x_prev[t] + table.n_y_prev[t];
    h.n = table.o_x[t] + table.o_y[t];
    h.N = direction == Direction::y_excess ? table.n_y_prev[t] : table.n_x_prev[t];
    return h;
}

PValueSeries interval_pvalues(const IntervalTable& table, Direction direction) {
    PValueSeries series;
    series.direction = direction;
    const auto T = table.intervals();
    series.values.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto h = interval_params(table, t, direction);
        if (h.n == 0) {
            series.values[t] = 1.0;
            continue;
        }
        const auto observed = direction == Direction::y_excess ? table.o_y[t] : table.o_x[t];
        // Deep-tail underflow would give 0; P-values stay strictly positive.
        series.values[t] = std::max(hyg_sf(h, observed), std::numeric_limits<double>::min());
    }
    return series;
}

}  // namespace survhc
