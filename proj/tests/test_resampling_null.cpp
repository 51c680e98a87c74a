#include <doctest.h>

#include <filesystem>
#include <map>
#include <numeric>

#include "survhc/error.hpp"
#include "survhc/hchg.hpp"
#include "survhc/resampling_null.hpp"
#include "survhc/statistic.hpp"
#include "test_support.hpp"

using namespace survhc;

namespace {

// A null whose statistic is just a uniform draw.
IntervalTable draw_table(Rng& rng) {
    IntervalTable t;
    t.n_x_prev = {static_cast<std::int64_t>(rng() % 1000)};
    t.n_y_prev = {0};
    t.o_x = t.o_y = t.c_x = t.c_y = {0};
    return t;
}

double first_count(const IntervalTable& t) { return static_cast<double>(t.n_x_prev[0]); }

}  // namespace

TEST_CASE("quantile uses the ceiling rank") {
    std::vector<double> sample(100);
    std::iota(sample.begin(), sample.end(), 1.0);
    std::reverse(sample.begin(), sample.end());
    auto c = calibration_from_sample("s", sample, 0.05, 0);
    CHECK(c.quantile == 95.0);
    CHECK(std::is_sorted(c.sample.begin(), c.sample.end()));
    CHECK(quantile_rank(100, 0.05) == 95);
    CHECK(quantile_rank(1, 0.05) == 1);
    CHECK(quantile_rank(1000, 0.05) == 950);
    CHECK(quantile_rank(99, 0.05) == 95);  // ceil(94.05)

    auto k = null_quantile([](Rng&) { return IntervalTable{}; }, [](const IntervalTable&) { return 3.5; }, 50,
                           0.05, 9);
    CHECK(k.quantile == 3.5);
    CHECK_THROWS_AS(calibration_from_sample("s", {}, 0.05, 0), ArgumentError);
    CHECK_THROWS_AS(calibration_from_sample("s", {1.0}, 1.0, 0), ArgumentError);
}

TEST_CASE("empirical P-value") {
    std::vector<double> s(99);
    std::iota(s.begin(), s.end(), 1.0);
    auto c = calibration_from_sample("s", s, 0.05, 0);
    CHECK(empirical_pvalue(1000.0, c) == doctest::Approx(1.0 / 100.0));
    CHECK(empirical_pvalue(-1.0, c) == 1.0);
    CHECK(empirical_pvalue(50.0, c) == doctest::Approx(51.0 / 100.0));

    double last = 2.0;
    for (double obs = -5; obs < 110; obs += 0.5) {
        const double p = empirical_pvalue(obs, c);
        CHECK(p <= last);
        last = p;
    }
}

TEST_CASE("null_quantile is independent of the execution mode") {
    auto serial = null_quantile(draw_table, first_count, 2000, 0.05, 77, Execution::reference(), "u");
    auto one = null_quantile(draw_table, first_count, 2000, 0.05, 77, Execution::parallel(1), "u");
    auto many = null_quantile(draw_table, first_count, 2000, 0.05, 77, Execution::parallel(8), "u");
    CHECK(serial == one);
    CHECK(serial == many);
    auto other = null_quantile(draw_table, first_count, 2000, 0.05, 78, Execution::reference(), "u");
    CHECK(other.sample != serial.sample);
}

TEST_CASE("replicate failures report the lowest failing index") {
    auto gen = [](Rng& rng) { return draw_table(rng); };
    for (auto exec : {Execution::reference(), Execution::parallel(4)}) {
        try {
            std::vector<int> hit(200, 0);
            for_each_index(200, exec, [&](std::size_t i) {
                hit[i] = 1;
                if (i >= 37 && i % 5 == 2) throw std::runtime_error("boom");
            });
            FAIL("expected ReplicateError");
        } catch (const ReplicateError& e) {
            CHECK(e.index() == 37);
            CHECK(std::string(e.what()).find("boom") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(null_quantile(gen, [](const IntervalTable&) -> double { throw ValidationError("bad"); }, 10,
                                  0.05, 1),
                    ReplicateError);
}

TEST_CASE("balanced relabeling") {
    Rng rng(5);
    SurvivalDataset two;
    two.subjects = {{1.0, Status::event, Group::x}, {2.0, Status::censored, Group::x}};
    for (int rep = 0; rep < 20; ++rep) {
        auto p = permute_groups(two, rng);
        CHECK(p.count(Group::x) == 1);
        CHECK(p.subjects[0].time == 1.0);
        CHECK(p.subjects[1].status == Status::censored);
    }

    SurvivalDataset one;
    one.subjects = {{1.0, Status::event, Group::x}};
    CHECK_THROWS_AS(permute_groups(one, rng), ArgumentError);

    Rng a(99), b(99);
    auto d = testing::random_dataset(rng, 4);
    CHECK(permute_groups(d, a).subjects == permute_groups(d, b).subjects);

    for (std::size_t n : {3u, 7u, 10u}) {
        std::map<std::size_t, int> sizes;
        std::vector<int> x_count(n, 0);
        for (int rep = 0; rep < 10000; ++rep) {
            auto labels = balanced_labels(n, rng);
            std::size_t nx = 0;
            for (std::size_t i = 0; i < n; ++i) {
                nx += labels[i] == Group::x;
                x_count[i] += labels[i] == Group::x;
            }
            sizes[nx] += 1;
        }
        CHECK(sizes.size() == 1);
        CHECK(sizes.begin()->first == n / 2);
        // Each position is x with probability floor(n/2)/n.
        const double expect = static_cast<double>(n / 2) / static_cast<double>(n);
        for (int c : x_count) CHECK(std::abs(c / 10000.0 - expect) < 0.03);
    }
}

TEST_CASE("cohort tabulation round trips the original labels") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        auto t = testing::random_table(rng, 1 + rep % 15);
        if (t.n_x_prev[0] + t.n_y_prev[0] == 0) continue;
        auto cohort = cohort_from_table(t);
        CHECK(cohort.size() == static_cast<std::size_t>(t.n_x_prev[0] + t.n_y_prev[0]));

        // Reconstruct labels that reproduce t: per (bin, exit) hand out x first.
        std::map<std::pair<std::uint32_t, int>, std::int64_t> x_left;
        for (std::size_t i = 0; i < t.intervals(); ++i) {
            x_left[{static_cast<std::uint32_t>(i + 1), 0}] = t.o_x[i];
            x_left[{static_cast<std::uint32_t>(i + 1), 1}] = t.c_x[i];
        }
        x_left[{static_cast<std::uint32_t>(t.intervals() + 1), 2}] = t.n_x_after(t.intervals() - 1);
        std::vector<Group> labels;
        for (std::size_t i = 0; i < cohort.size(); ++i) {
            auto& left = x_left[{cohort.bin[i], static_cast<int>(cohort.exit[i])}];
            labels.push_back(left > 0 ? Group::x : Group::y);
            left -= left > 0;
        }
        CHECK(tabulate(cohort, labels) == t);
        CHECK(cohort_from_table(t.swapped()).fingerprint() == cohort.fingerprint());

        Rng g(rep);
        auto gen = permutation_null(cohort);
        auto drawn = gen(g);
        CHECK_NOTHROW(drawn.validate());
        CHECK(drawn.n_x_prev[0] == static_cast<std::int64_t>(cohort.size() / 2));
    }
}

TEST_CASE("relabeling null never reads the original labels") {
    std::mt19937_64 rng(19);
    auto t = testing::random_table(rng, 12, 60);
    auto hc = [](const IntervalTable& tab) { return score(StatisticKind::hchg, tab); };
    auto a = null_quantile(permutation_null(cohort_from_table(t)), hc, 300, 0.05, 5);
    auto b = null_quantile(permutation_null(cohort_from_table(t.swapped())), hc, 300, 0.05, 5);
    CHECK(a.sample == b.sample);
}

TEST_CASE("interval input and the subjects behind it give the same relabeling null") {
    std::mt19937_64 rng(29);
    auto d = testing::random_dataset(rng, 80);
    auto t = bin_subjects(d, 8);
    auto hc = [](const IntervalTable& tab) { return score(StatisticKind::hchg, tab); };
    auto from_table = cohort_from_table(t);
    auto round_trip = cohort_from_table(parse_intervals(render_intervals(t)));
    CHECK(from_table.fingerprint() == round_trip.fingerprint());
    CHECK(null_quantile(permutation_null(from_table), hc, 200, 0.05, 3) ==
          null_quantile(permutation_null(round_trip), hc, 200, 0.05, 3));
}

TEST_CASE("calibration persistence round trip") {
    auto dir = std::filesystem::temp_directory_path() / "survhc_calib_test";
    std::filesystem::create_directories(dir);
    auto c = null_quantile(draw_table, [](const IntervalTable& t) { return first_count(t) / 7.0; }, 500, 0.05,
                           0xfeedULL, {}, "ratio", "unit-test source");
    save_calibration(c, dir / "ratio");
    auto back = load_calibration(dir / "ratio");
    CHECK(back == c);
    CHECK_THROWS_AS(load_calibration(dir / "missing"), Error);
    std::filesystem::remove_all(dir);
}
