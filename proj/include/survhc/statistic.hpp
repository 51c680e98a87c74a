#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/exact_hyg.hpp"
#include "survhc/hchg.hpp"

namespace survhc {

/// Test statistics oriented so that large values are evidence of excess
/// events in the tested group.
enum class StatisticKind : std::uint8_t {
    hchg,
    logrank,
    gehan,
    tarone_ware,
    peto,
    fh_1_0,
    fh_1_1,
    fisher,
    minp,     ///< scored as -log p_(1), monotone in 1 / p_(1)
    fdrstar,  ///< scored as -log FDR*, monotone in max t / p_(t)
};

std::string_view statistic_name(StatisticKind kind);
std::optional<StatisticKind> parse_statistic(std::string_view name);

/// Parses a comma-separated list; throws ArgumentError on unknown names.
std::vector<StatisticKind> parse_statistic_list(std::string_view csv);

const std::vector<StatisticKind>& all_statistics();

bool uses_pvalues(StatisticKind kind);

/// Value of `kind` testing for excess in `direction`'s group.
double score(StatisticKind kind, const IntervalTable& table, Direction direction = Direction::y_excess,
             double gamma0 = default_gamma0);

/// Scores several statistics on one table, computing the P-value series once.
std::vector<double> score_all(const std::vector<StatisticKind>& kinds, const IntervalTable& table,
                              Direction direction = Direction::y_excess, double gamma0 = default_gamma0);

}  // namespace survhc
