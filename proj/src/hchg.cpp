#include "survhc/hchg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survhc/error.hpp"

namespace survhc {

std::size_t hc_search_ranks(std::size_t T, double gamma0) {
    auto k = static_cast<std::size_t>(std::floor(gamma0 * static_cast<double>(T)));
    return std::clamp<std::size_t>(k, 1, T);
}

double hc_term(std::size_t i, std::size_t T, double p) {
    const double var = p * (1.0 - p);
    if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
    const double dT = static_cast<double>(T);
    return std::sqrt(dT) * (static_cast<double>(i) / dT - p) / std::sqrt(var);
}

namespace {

void check_args(std::size_t T, double gamma0) {
    if (T == 0) throw ArgumentError("P-value series is empty");
    if (!(gamma0 > 0.0 && gamma0 <= 1.0)) throw ArgumentError("gamma0 must lie in (0, 1]");
}

}  // namespace

HchgResult hc_statistic(const PValueSeries& pvalues, double gamma0) {
    const auto T = pvalues.size();
    check_args(T, gamma0);

    HchgResult result;
    result.gamma0 = gamma0;
    result.pvalues = pvalues;

    const auto k = hc_search_ranks(T, gamma0);
    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& p = pvalues.values;
    auto by_p_then_index = [&p](std::size_t a, std::size_t b) { return p[a] < p[b] || (p[a] == p[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), by_p_then_index);

    for (std::size_t i = 1; i <= k; ++i) {
        const double term = hc_term(i, T, p[order[i - 1]]);
        if (term > result.statistic) {
            result.statistic = term;
            result.argmax_rank = i;
            result.threshold_p = p[order[i - 1]];
        }
    }
    if (result.computable()) {
        for (std::size_t t = 0; t < T; ++t) {
            if (p[t] <= result.threshold_p) result.delta_star.push_back(t);
        }
    }
    return result;
}

double hc_value(const std::vector<double>& pvalues, double gamma0) {
    const auto T = pvalues.size();
    check_args(T, gamma0);
    const auto k = hc_search_ranks(T, gamma0);
    std::vector<double> sorted(pvalues);
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= k; ++i) best = std::max(best, hc_term(i, T, sorted[i - 1]));
    return best;
}

TestDecision test_hchg(const IntervalTable& table, Direction direction, double gamma0, double critical_value) {
    TestDecision d;
    d.mode = direction == Direction::y_excess ? TestMode::one_sided_y : TestMode::one_sided_x;
    d.statistic = hc_value(interval_pvalues(table, direction).values, gamma0);
    d.critical_value = critical_value;
    d.reject = d.statistic > critical_value;
    return d;
}

TestDecision test_strict(const IntervalTable& table, double gamma0, double critical_value) {
    const auto y = test_hchg(table, Direction::y_excess, gamma0, critical_value);
    const auto x = test_hchg(table, Direction::x_excess, gamma0, critical_value);
    TestDecision d;
    d.critical_value = critical_value;
    if (y.reject && !x.reject) {
        d = y;
        d.mode = TestMode::strict_y;
        d.reverse_statistic = x.statistic;
        d.reject = true;
    } else if (x.reject && !y.reject) {
        d = x;
        d.mode = TestMode::strict_x;
        d.reverse_statistic = y.statistic;
        d.reject = true;
    } else {
        d.mode = TestMode::two_way;
        d.statistic = y.statistic;
        d.reverse_statistic = x.statistic;
        d.reject = false;
    }
    return d;
}

TestDecision test_two_way(const IntervalTable& table, double gamma0, double critical_value) {
    const auto y = test_hchg(table, Direction::y_excess, gamma0, critical_value);
    const auto x = test_hchg(table, Direction::x_excess, gamma0, critical_value);
    TestDecision d;
    d.mode = TestMode::two_way;
    d.statistic = y.statistic;
    d.reverse_statistic = x.statistic;
    d.critical_value = critical_value;
    d.reject = y.reject || x.reject;
    return d;
}

}  // namespace survhc
