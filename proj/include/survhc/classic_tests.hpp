#pragma once

#include <cstdint>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/exact_hyg.hpp"

namespace survhc {

struct LogRankResult {
    double statistic = 0.0;  ///< numerator / sqrt(variance); 0 when degenerate
    double numerator = 0.0;
    double variance = 0.0;
    bool degenerate = false;  ///< total variance is 0
    std::vector<double> expected;       ///< e_t
    std::vector<double> interval_var;   ///< v_t
};

struct WeightScheme {
    enum class Kind : std::uint8_t { logrank, gehan, tarone_ware, peto, fleming_harrington };
    Kind kind = Kind::logrank;
    double p = 0.0;  ///< Fleming-Harrington exponents
    double q = 0.0;

    static WeightScheme fleming_harrington(double p, double q);
};

/// One-sided log-rank; large values mean excess events in group y.
/// Intervals with fewer than two subjects at risk contribute nothing.
LogRankResult logrank(const IntervalTable& table);

/// sum w_t (o_y - e_t) / sqrt(sum w_t^2 v_t). Survival-based weights use the
/// pooled curve lagged by one interval.
LogRankResult weighted_logrank(const IntervalTable& table, const WeightScheme& scheme);

/// Pooled survival before each interval: S(0) = 1, S(t) from the merged
/// groups' at-risk and censored counts.
std::vector<double> pooled_survival_lagged(const IntervalTable& table);

struct FisherResult {
    double statistic = 0.0;
    bool infinite = false;  ///< some p_t was 0
};

/// 2 sum log(1 / p_t).
FisherResult fisher_stat(const PValueSeries& pvalues);

/// Smallest P-value.
double min_p(const PValueSeries& pvalues);

/// min_t p_(t) / t over the sorted series. Reciprocal of max_t t / p_(t).
double fdr_star(const PValueSeries& pvalues);

}  // namespace survhc
