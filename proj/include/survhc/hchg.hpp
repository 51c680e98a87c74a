#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/exact_hyg.hpp"

namespace survhc {

inline constexpr double default_gamma0 = 0.3;

/// Higher Criticism over a P-value series.
///
/// `statistic` is -infinity when no rank in the search range has
/// 0 < p < 1; in that case `argmax_rank` is 0 and `delta_star` is empty.
struct HchgResult {
    double statistic = -std::numeric_limits<double>::infinity();
    double gamma0 = default_gamma0;
    std::size_t argmax_rank = 0;  ///< 1-based rank i* of the maximizing order statistic
    double threshold_p = 0.0;     ///< p_(i*)
    std::vector<std::size_t> delta_star;  ///< 0-based interval indices with p_t <= p_(i*), ascending
    PValueSeries pvalues;

    bool computable() const noexcept { return argmax_rank != 0; }
};

/// Number of ranks searched: max(1, floor(gamma0 * T)).
std::size_t hc_search_ranks(std::size_t T, double gamma0);

/// sqrt(T) (i/T - p) / sqrt(p (1 - p)); -infinity when p is 0 or 1.
double hc_term(std::size_t i, std::size_t T, double p);

HchgResult hc_statistic(const PValueSeries& pvalues, double gamma0 = default_gamma0);

/// Just the statistic, without Δ* bookkeeping. Used on the Monte-Carlo paths.
double hc_value(const std::vector<double>& pvalues, double gamma0 = default_gamma0);

enum class TestMode : std::uint8_t { one_sided_y, one_sided_x, strict_y, strict_x, two_way };

struct TestDecision {
    bool reject = false;
    double statistic = -std::numeric_limits<double>::infinity();
    double critical_value = 0.0;
    TestMode mode = TestMode::one_sided_y;
    /// The reversed-direction statistic for strict and two-way tests.
    double reverse_statistic = -std::numeric_limits<double>::infinity();
};

/// Rejects iff statistic > critical value.
TestDecision test_hchg(const IntervalTable& table, Direction direction, double gamma0, double critical_value);

/// Strictly one-sided: one direction rejects and the other does not. Mode is
/// strict_y or strict_x on rejection, else two_way to signal "no strict effect".
TestDecision test_strict(const IntervalTable& table, double gamma0, double critical_value);

/// Either direction rejects.
TestDecision test_two_way(const IntervalTable& table, double gamma0, double critical_value);

}  // namespace survhc
