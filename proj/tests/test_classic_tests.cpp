#include <doctest.h>

#include <cmath>
#include <random>

#include "survhc/classic_tests.hpp"
#include "survhc/error.hpp"
#include "test_support.hpp"

using namespace survhc;

namespace {

PValueSeries series(std::vector<double> v) {
    PValueSeries s;
    s.values = std::move(v);
    return s;
}

const char* single_interval = "t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,0,2\n";

}  // namespace

TEST_CASE("logrank single-interval example") {
    auto r = logrank(parse_intervals(single_interval));
    CHECK(r.expected[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.interval_var[0] == doctest::Approx(9.0 / 19.0).epsilon(1e-15));
    CHECK(r.numerator == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.statistic == doctest::Approx(1.4529663145135578).epsilon(1e-14));
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("logrank symmetric and degenerate tables") {
    auto sym = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,2,2\n2,8,8,1,1\n3,7,7,0,0\n");
    auto r = logrank(sym);
    CHECK(r.numerator == 0.0);
    CHECK(r.statistic == 0.0);

    auto none = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,5,5,0,0\n2,5,5,0,0\n");
    auto d = logrank(none);
    CHECK(d.degenerate);
    CHECK(d.statistic == 0.0);

    // A lone subject carries no two-group information.
    auto lone = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,0,1,0,1\n");
    CHECK(logrank(lone).degenerate);
}

TEST_CASE("weighted_logrank with unit weights is logrank bit for bit (property)") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 300; ++rep) {
        auto t = testing::random_table(rng, 1 + rep % 30);
        auto a = logrank(t);
        auto b = weighted_logrank(t, {});
        CHECK(a.statistic == b.statistic);
        CHECK(a.numerator == b.numerator);
        CHECK(a.variance == b.variance);
        CHECK(a.degenerate == b.degenerate);
    }
}

TEST_CASE("weights cancel when one interval carries all events") {
    auto t = parse_intervals(single_interval);
    WeightScheme gehan{WeightScheme::Kind::gehan};
    CHECK(weighted_logrank(t, gehan).statistic == doctest::Approx(1.4529663145135578).epsilon(1e-14));

    auto two = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,1,3\n2,9,7,0,0\n");
    WeightScheme tw{WeightScheme::Kind::tarone_ware};
    CHECK(weighted_logrank(two, gehan).statistic ==
          doctest::Approx(weighted_logrank(two, tw).statistic).epsilon(1e-14));
    CHECK(weighted_logrank(two, gehan).statistic == doctest::Approx(logrank(two).statistic).epsilon(1e-14));
}

TEST_CASE("pooled survival weights") {
    auto t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,2,2\n2,8,8,1,3\n3,7,5,0,0\n");
    auto s = pooled_survival_lagged(t);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == doctest::Approx(16.0 / 20.0));
    CHECK(s[2] == doctest::Approx(12.0 / 20.0));

    // Peto weights give a different answer from unit weights once events spread out.
    CHECK(weighted_logrank(t, {WeightScheme::Kind::peto}).statistic != logrank(t).statistic);
    // FH(0, 0) is the plain log-rank.
    CHECK(weighted_logrank(t, WeightScheme::fleming_harrington(0, 0)).statistic ==
          doctest::Approx(logrank(t).statistic).epsilon(1e-15));
    CHECK_THROWS_AS(WeightScheme::fleming_harrington(-1, 0), ArgumentError);
}

TEST_CASE("fisher combination") {
    CHECK(fisher_stat(series({1, 1, 1})).statistic == 0.0);
    CHECK(fisher_stat(series({0.1})).statistic == doctest::Approx(4.605170185988091).epsilon(1e-15));
    CHECK(fisher_stat(series({0.5, 0.5})).statistic == doctest::Approx(2.772588722239781).epsilon(1e-15));
    auto inf = fisher_stat(series({0.5, 0.0}));
    CHECK(inf.infinite);
    CHECK(std::isinf(inf.statistic));
}

TEST_CASE("fisher is additive over concatenation (property)") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(1e-9, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> a(1 + rep % 7), b(1 + rep % 5);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        auto ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        CHECK(fisher_stat(series(ab)).statistic ==
              doctest::Approx(fisher_stat(series(a)).statistic + fisher_stat(series(b)).statistic).epsilon(1e-13));
    }
}

TEST_CASE("min_p and fdr_star") {
    auto s = series({0.5, 0.1, 0.9});
    CHECK(min_p(s) == 0.1);
    CHECK(fdr_star(s) == doctest::Approx(0.1));
    CHECK(fdr_star(series({0.04, 0.05})) == doctest::Approx(0.025));
    CHECK(min_p(series({1.0})) == 1.0);
    CHECK(fdr_star(series({1.0})) == 1.0);
    CHECK_THROWS_AS(min_p(series({})), ArgumentError);
    CHECK_THROWS_AS(fdr_star(series({})), ArgumentError);

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> p(1 + rep % 20);
        for (auto& v : p) v = u(rng);
        CHECK(fdr_star(series(p)) <= min_p(series(p)));
    }
}
