#pragma once

#include <cstdint>
#include <vector>

#include "survhc/data_model.hpp"

namespace survhc {

/// HyG(M, N, n): n draws without replacement from M items of which N are of
/// the counted type.
struct HygParams {
    std::int64_t M = 0;
    std::int64_t N = 0;
    std::int64_t n = 0;

    std::int64_t lower() const noexcept { return n - (M - N) > 0 ? n - (M - N) : 0; }
    std::int64_t upper() const noexcept { return n < N ? n : N; }

    /// Throws ArgumentError unless 0 <= N <= M and 0 <= n <= M.
    void validate() const;
};

double hyg_pmf(const HygParams& params, std::int64_t k);

/// Pr(HyG >= m).
double hyg_sf(const HygParams& params, std::int64_t m);

/// sf(m) - u * pmf(m), clamped to [0, 1]. Uniform on (0,1) under the null
/// when u ~ U(0,1).
double randomized_pvalue(const HygParams& params, std::int64_t m, double u);

enum class Direction : std::uint8_t { y_excess, x_excess };

struct PValueSeries {
    std::vector<double> values;
    Direction direction = Direction::y_excess;

    std::size_t size() const noexcept { return values.size(); }
};

/// The per-interval hypergeometric P-value for interval t (0-based).
HygParams interval_params(const IntervalTable& table, std::size_t t, Direction direction);

/// One exact P-value per interval; intervals without events give 1.
PValueSeries interval_pvalues(const IntervalTable& table, Direction direction = Direction::y_excess);

}  // namespace survhc
