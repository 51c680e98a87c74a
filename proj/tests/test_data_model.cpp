#include <doctest.h>

#include <algorithm>
#include <random>

#include "survhc/data_model.hpp"
#include "survhc/error.hpp"
#include "test_support.hpp"

using namespace survhc;

TEST_CASE("parse_subjects decodes rows") {
    auto d = parse_subjects("time,status,group\n1.0,1,x");
    REQUIRE(d.size() == 1);
    CHECK(d.subjects[0] == SubjectRecord{1.0, Status::event, Group::x});

    d = parse_subjects("time,status,group\n2.5,0,y\n");
    REQUIRE(d.size() == 1);
    CHECK(d.subjects[0] == SubjectRecord{2.5, Status::censored, Group::y});

    d = parse_subjects("time,status,group\r\n3,event,y\r\n4,censored,x\r\n");
    REQUIRE(d.size() == 2);
    CHECK(d.subjects[0].status == Status::event);
    CHECK(d.subjects[1].status == Status::censored);
    CHECK(d.count(Group::x) == 1);
}

TEST_CASE("parse_subjects rejects bad input") {
    CHECK_THROWS_AS(parse_subjects("time,status,group\n-1,1,x"), ValidationError);
    CHECK_THROWS_AS(parse_subjects("time,status,group\n1,1,z"), ValidationError);
    CHECK_THROWS_AS(parse_subjects("time,group\n1,x"), ParseError);
    try {
        parse_subjects("time,status,group\n1,1,x\n2,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_subjects("time,status,group\nabc,1,x"), ParseError);
    CHECK_THROWS_AS(parse_subjects("time,status,group\n1,2,x"), ParseError);
}

TEST_CASE("parse_intervals infers censoring from the at-risk recursion") {
    auto t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,0,2\n2,10,8,1,0\n");
    REQUIRE(t.intervals() == 2);
    CHECK(t.c_x == std::vector<std::int64_t>{0, 0});
    CHECK(t.c_y == std::vector<std::int64_t>{0, 0});

    // 10 -> 7 with one event leaves two censored in x.
    t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,10,10,1,0\n2,7,10,0,0\n");
    CHECK(t.c_x == std::vector<std::int64_t>{2, 0});
}

TEST_CASE("parse_intervals validation") {
    CHECK_THROWS_AS(parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,5,5,6,0\n"), ValidationError);
    CHECK_THROWS_AS(parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,5,5,0,0\n3,5,5,0,0\n"), ParseError);
    // at-risk may not grow
    CHECK_THROWS_AS(parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,5,5,0,0\n2,6,5,0,0\n"), ValidationError);
    // explicit censor columns must agree with the recursion
    CHECK_THROWS_AS(parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n1,5,5,1,0,0,0\n2,3,5,0,0,0,0\n"),
                    ValidationError);
    try {
        parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n1,5,5,0,0,0,0\n2,5,5,3,0,3,0\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("t=2") != std::string::npos);
    }
}

TEST_CASE("render/parse round trip is exact") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        auto t = testing::random_table(rng, 1 + rep % 30);
        CHECK(parse_intervals(render_intervals(t)) == t);
    }
}

TEST_CASE("bin_subjects places subjects into half-open bins") {
    SurvivalDataset d;
    d.subjects = {{0.5, Status::event, Group::x}, {1.5, Status::event, Group::y}, {2.5, Status::censored, Group::x}};
    auto t = bin_subjects(d, 3);
    CHECK(t.n_x_prev == std::vector<std::int64_t>{2, 1, 1});
    CHECK(t.n_y_prev == std::vector<std::int64_t>{1, 1, 0});
    CHECK(t.o_x == std::vector<std::int64_t>{1, 0, 0});
    CHECK(t.o_y == std::vector<std::int64_t>{0, 1, 0});
    CHECK(t.c_x == std::vector<std::int64_t>{0, 0, 1});
    CHECK(t.c_y == std::vector<std::int64_t>{0, 0, 0});

    SurvivalDataset one;
    one.subjects = {{1.0, Status::event, Group::x}};
    auto t1 = bin_subjects(one, 1);
    CHECK(t1.n_x_prev == std::vector<std::int64_t>{1});
    CHECK(t1.o_x == std::vector<std::int64_t>{1});

    CHECK_THROWS_AS(bin_subjects(d, 0), ArgumentError);
    SurvivalDataset zeros;
    zeros.subjects = {{0.0, Status::event, Group::x}, {0.0, Status::event, Group::y}};
    CHECK_THROWS_AS(bin_subjects(zeros, 2), ValidationError);
}

TEST_CASE("bin edges: time 0 goes to bin 1, boundary times stay in the lower bin") {
    CHECK(bin_index(0.0, 3.0, 3) == 1);
    CHECK(bin_index(1.0, 3.0, 3) == 1);
    CHECK(bin_index(1.0000001, 3.0, 3) == 2);
    CHECK(bin_index(3.0, 3.0, 3) == 3);
}

namespace {

// Linear scan over ((t-1)w, tw]; independent of the closed-form bin index.
std::size_t scan_bin(double time, double max_time, std::size_t bins) {
    const double w = max_time / static_cast<double>(bins);
    if (time <= 0.0) return 1;
    for (std::size_t t = 1; t <= bins; ++t) {
        if (time > static_cast<double>(t - 1) * w && time <= static_cast<double>(t) * w) return t;
    }
    return bins;
}

}  // namespace

TEST_CASE("integer times with unit-width bins occupy one bin each") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        SurvivalDataset d;
        const std::size_t n = 5 + rep % 20;
        for (std::size_t i = 0; i < n; ++i) {
            d.subjects.push_back({static_cast<double>(i + 1), i % 3 ? Status::event : Status::censored,
                                  i % 2 ? Group::x : Group::y});
        }
        std::shuffle(d.subjects.begin(), d.subjects.end(), rng);
        auto t = bin_subjects(d, n);
        for (std::size_t b = 0; b < n; ++b) {
            CHECK(t.o_x[b] + t.o_y[b] + t.c_x[b] + t.c_y[b] == 1);
            CHECK(scan_bin(static_cast<double>(b + 1), static_cast<double>(n), n) == b + 1);
        }
    }
}

TEST_CASE("bin_subjects output satisfies table invariants (property)") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 300; ++rep) {
        auto d = testing::random_dataset(rng, 2 + rep % 60);
        double max_time = 0;
        for (auto& s : d.subjects) max_time = std::max(max_time, s.time);
        if (max_time == 0) continue;
        const std::size_t bins = 1 + rep % 17;
        auto t = bin_subjects(d, bins);
        CHECK_NOTHROW(t.validate());

        std::int64_t ends_x = 0, ends_y = 0;
        for (std::size_t b = 0; b < bins; ++b) {
            ends_x += t.o_x[b] + t.c_x[b];
            ends_y += t.o_y[b] + t.c_y[b];
            // brute-force placement agrees bin by bin
            std::int64_t ox = 0;
            for (auto& s : d.subjects) {
                ox += s.group == Group::x && s.status == Status::event && scan_bin(s.time, max_time, bins) == b + 1;
            }
            CHECK(t.o_x[b] == ox);
        }
        CHECK(ends_x == static_cast<std::int64_t>(d.count(Group::x)));
        CHECK(ends_y == static_cast<std::int64_t>(d.count(Group::y)));
        CHECK(t.n_x_prev[0] == static_cast<std::int64_t>(d.count(Group::x)));
    }
}

TEST_CASE("km_curve uses the at-risk over uncensored-initial ratio") {
    auto t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n1,10,10,1,2,1,0\n");
    auto km = km_curve(t);
    CHECK(km.s_y[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(km.s_x[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));

    auto flat = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y\n1,4,4,0,0\n2,4,4,0,0\n3,4,4,0,0\n");
    auto kf = km_curve(flat);
    for (double s : kf.s_x) CHECK(s == 1.0);
    for (double s : kf.s_y) CHECK(s == 1.0);
}

TEST_CASE("km_curve is 0 once every subject has been censored") {
    auto t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n1,2,2,0,0,2,0\n2,0,2,0,1,0,0\n");
    auto km = km_curve(t);
    CHECK(km.s_x[0] == 0.0);
    CHECK(km.s_x[1] == 0.0);
    CHECK(km.s_y[1] == doctest::Approx(0.5));
}

TEST_CASE("km_curve is non-increasing without censoring (property)") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        auto t = testing::random_table(rng, 1 + rep % 25);
        for (std::size_t i = 0; i < t.intervals(); ++i) {
            t.c_x[i] = t.c_y[i] = 0;
            if (i > 0) {
                t.n_x_prev[i] = t.n_x_prev[i - 1] - t.o_x[i - 1];
                t.n_y_prev[i] = t.n_y_prev[i - 1] - t.o_y[i - 1];
                t.o_x[i] = std::min(t.o_x[i], t.n_x_prev[i]);
                t.o_y[i] = std::min(t.o_y[i], t.n_y_prev[i]);
            }
        }
        REQUIRE_NOTHROW(t.validate());
        auto km = km_curve(t);
        for (std::size_t i = 0; i < t.intervals(); ++i) {
            CHECK(km.s_x[i] >= 0.0);
            CHECK(km.s_x[i] <= 1.0);
            if (i > 0) {
                CHECK(km.s_x[i] <= km.s_x[i - 1]);
                CHECK(km.s_y[i] <= km.s_y[i - 1]);
            }
        }
    }
}

TEST_CASE("swapped exchanges the groups") {
    auto t = parse_intervals("t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n1,10,7,1,2,1,0\n");
    auto s = t.swapped();
    CHECK(s.n_x_prev[0] == 7);
    CHECK(s.o_y[0] == 1);
    CHECK(s.c_y[0] == 1);
    CHECK(s.swapped() == t);
}
