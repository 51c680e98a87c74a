#include "survhc/statistic.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "survhc/classic_tests.hpp"
#include "survhc/error.hpp"

namespace survhc {

namespace {

constexpr std::array<std::pair<StatisticKind, std::string_view>, 10> names{{
    {StatisticKind::hchg, "hchg"},
    {StatisticKind::logrank, "logrank"},
    {StatisticKind::gehan, "gehan"},
    {StatisticKind::tarone_ware, "tarone-ware"},
    {StatisticKind::peto, "peto"},
    {StatisticKind::fh_1_0, "fh-1-0"},
    {StatisticKind::fh_1_1, "fh-1-1"},
    {StatisticKind::fisher, "fisher"},
    {StatisticKind::minp, "minp"},
    {StatisticKind::fdrstar, "fdrstar"},
}};

double score_from(StatisticKind kind, const IntervalTable& oriented, const PValueSeries* p, double gamma0) {
    switch (kind) {
        case StatisticKind::hchg: return hc_value(p->values, gamma0);
        case StatisticKind::logrank: return logrank(oriented).statistic;
        case StatisticKind::gehan:
            return weighted_logrank(oriented, {WeightScheme::Kind::gehan}).statistic;
        case StatisticKind::tarone_ware:
            return weighted_logrank(oriented, {WeightScheme::Kind::tarone_ware}).statistic;
        case StatisticKind::peto: return weighted_logrank(oriented, {WeightScheme::Kind::peto}).statistic;
        case StatisticKind::fh_1_0:
            return weighted_logrank(oriented, WeightScheme::fleming_harrington(1, 0)).statistic;
        case StatisticKind::fh_1_1:
            return weighted_logrank(oriented, WeightScheme::fleming_harrington(1, 1)).statistic;
        case StatisticKind::fisher: return fisher_stat(*p).statistic;
        case StatisticKind::minp: return -std::log(min_p(*p));
        case StatisticKind::fdrstar: return -std::log(fdr_star(*p));
    }
    return 0.0;
}

}  // namespace

std::string_view statistic_name(StatisticKind kind) {
    for (const auto& [k, n] : names) {
        if (k == kind) return n;
    }
    return "unknown";
}

std::optional<StatisticKind> parse_statistic(std::string_view name) {
    for (const auto& [k, n] : names) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::vector<StatisticKind> parse_statistic_list(std::string_view csv) {
    std::vector<StatisticKind> out;
    while (!csv.empty()) {
        auto comma = csv.find(',');
        auto item = csv.substr(0, comma);
        auto kind = parse_statistic(item);
        if (!kind) throw ArgumentError("unknown statistic '" + std::string(item) + "'");
        out.push_back(*kind);
        if (comma == std::string_view::npos) break;
        csv.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ArgumentError("no statistics requested");
    return out;
}

const std::vector<StatisticKind>& all_statistics() {
    static const std::vector<StatisticKind> all = [] {
        std::vector<StatisticKind> v;
        for (const auto& entry : names) v.push_back(entry.first);
        return v;
    }();
    return all;
}

bool uses_pvalues(StatisticKind kind) {
    return kind == StatisticKind::hchg || kind == StatisticKind::fisher || kind == StatisticKind::minp ||
           kind == StatisticKind::fdrstar;
}

double score(StatisticKind kind, const IntervalTable& table, Direction direction, double gamma0) {
    return score_all({kind}, table, direction, gamma0).front();
}

std::vector<double> score_all(const std::vector<StatisticKind>& kinds, const IntervalTable& table,
                              Direction direction, double gamma0) {
    // Log-rank family reads group y as the tested group, so orient the table.
    const bool swap = direction == Direction::x_excess;
    IntervalTable flipped;
    bool need_table = false, need_p = false;
    for (auto k : kinds) (uses_pvalues(k) ? need_p : need_table) = true;
    if (swap && need_table) flipped = table.swapped();
    const IntervalTable& oriented = swap && need_table ? flipped : table;

    PValueSeries p;
    if (need_p) p = interval_pvalues(table, direction);

    std::vector<double> out;
    out.reserve(kinds.size());
    for (auto k : kinds) out.push_back(score_from(k, oriented, need_p ? &p : nullptr, gamma0));
    return out;
}

}  // namespace survhc
