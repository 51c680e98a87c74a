#include "survhc/resampling_null.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "survhc/error.hpp"

namespace survhc {

std::size_t quantile_rank(std::size_t n, double alpha) {
    // The epsilon keeps (1 - 0.05) * 100 from rounding up to rank 96.
    auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

NullCalibration calibration_from_sample(std::string name, std::vector<double> sample, double alpha,
                                        std::uint64_t seed, std::string source) {
    if (sample.empty()) throw ArgumentError("null sample is empty");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    NullCalibration c;
    c.statistic_name = std::move(name);
    c.n_sims = sample.size();
    std::sort(sample.begin(), sample.end());
    c.sample = std::move(sample);
    c.alpha = alpha;
    c.quantile = c.sample[quantile_rank(c.n_sims, alpha) - 1];
    c.seed = seed;
    c.source = std::move(source);
    return c;
}

std::vector<NullCalibration> null_quantiles(const NullGenerator& generator, const MultiEvaluator& statistics,
                                            const std::vector<std::string>& names, std::size_t n_sims,
                                            double alpha, std::uint64_t seed, const Execution& exec,
                                            std::string source) {
    if (n_sims == 0) throw ArgumentError("number of null simulations must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    const auto k = names.size();
    std::vector<double> values(n_sims * k);
    for_each_index(n_sims, exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, {i}));
        auto scores = statistics(generator(rng));
        if (scores.size() != k) throw Error("evaluator returned the wrong number of statistics");
        std::copy(scores.begin(), scores.end(), values.begin() + static_cast<std::ptrdiff_t>(i * k));
    });

    std::vector<NullCalibration> out;
    out.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
        std::vector<double> sample(n_sims);
        for (std::size_t i = 0; i < n_sims; ++i) sample[i] = values[i * k + s];
        out.push_back(calibration_from_sample(names[s], std::move(sample), alpha, seed, source));
    }
    return out;
}

NullCalibration null_quantile(const NullGenerator& generator, const StatisticEvaluator& statistic,
                              std::size_t n_sims, double alpha, std::uint64_t seed, const Execution& exec,
                              std::string name, std::string source) {
    MultiEvaluator one = [&statistic](const IntervalTable& t) { return std::vector<double>{statistic(t)}; };
    return std::move(null_quantiles(generator, one, {std::move(name)}, n_sims, alpha, seed, exec,
                                    std::move(source))
                         .front());
}

double empirical_pvalue(double observed, const NullCalibration& calib) {
    if (calib.sample.empty()) throw ArgumentError("calibration sample is empty");
    auto first_ge = std::lower_bound(calib.sample.begin(), calib.sample.end(), observed);
    auto at_least = static_cast<double>(calib.sample.end() - first_ge);
    return (1.0 + at_least) / (1.0 + static_cast<double>(calib.sample.size()));
}

std::vector<Group> balanced_labels(std::size_t n, Rng& rng) {
    std::vector<Group> labels(n, Group::y);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), Group::x);
    std::shuffle(labels.begin(), labels.end(), rng);
    return labels;
}

SurvivalDataset permute_groups(const SurvivalDataset& data, Rng& rng) {
    if (data.size() < 2) throw ArgumentError("relabeling needs at least two subjects");
    auto labels = balanced_labels(data.size(), rng);
    SurvivalDataset out = data;
    for (std::size_t i = 0; i < out.size(); ++i) out.subjects[i].group = labels[i];
    return out;
}

std::uint64_t BinnedCohort::fingerprint() const {
    // Counts per (bin, exit) are order independent; hash them in bin order.
    std::vector<std::uint64_t> counts((intervals + 2) * 3, 0);
    for (std::size_t i = 0; i < size(); ++i) counts[bin[i] * 3 + static_cast<std::size_t>(exit[i])] += 1;
    std::uint64_t h = mix64(intervals);
    for (auto c : counts) h = mix64(h ^ c);
    return h;
}

BinnedCohort cohort_from_table(const IntervalTable& table) {
    table.validate();
    BinnedCohort cohort;
    const auto T = table.intervals();
    cohort.intervals = T;
    auto add = [&cohort](std::uint32_t bin, BinnedCohort::Exit exit, std::int64_t count) {
        for (std::int64_t j = 0; j < count; ++j) {
            cohort.bin.push_back(bin);
            cohort.exit.push_back(exit);
        }
    };
    for (std::size_t t = 0; t < T; ++t) {
        const auto bin = static_cast<std::uint32_t>(t + 1);
        add(bin, BinnedCohort::Exit::event, table.o_x[t] + table.o_y[t]);
        add(bin, BinnedCohort::Exit::censored, table.c_x[t] + table.c_y[t]);
    }
    add(static_cast<std::uint32_t>(T + 1), BinnedCohort::Exit::survived,
        table.n_x_after(T - 1) + table.n_y_after(T - 1));
    return cohort;
}

IntervalTable tabulate(const BinnedCohort& cohort, const std::vector<Group>& labels) {
    if (labels.size() != cohort.size()) throw ArgumentError("label count does not match cohort size");
    const auto T = cohort.intervals;
    IntervalTable table;
    for (auto* v : {&table.n_x_prev, &table.n_y_prev, &table.o_x, &table.o_y, &table.c_x, &table.c_y}) {
        v->assign(T, 0);
    }
    std::vector<std::int64_t> end_x(T + 1, 0), end_y(T + 1, 0);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const auto b = cohort.bin[i] - 1;
        const bool x = labels[i] == Group::x;
        (x ? end_x : end_y)[b] += 1;
        if (b == T) continue;
        if (cohort.exit[i] == BinnedCohort::Exit::event) {
            (x ? table.o_x : table.o_y)[b] += 1;
        } else {
            (x ? table.c_x : table.c_y)[b] += 1;
        }
    }
    std::int64_t rx = end_x[T], ry = end_y[T];
    for (std::size_t t = T; t-- > 0;) {
        rx += end_x[t];
        ry += end_y[t];
        table.n_x_prev[t] = rx;
        table.n_y_prev[t] = ry;
    }
    return table;
}

NullGenerator permutation_null(BinnedCohort cohort) {
    if (cohort.size() < 2) throw ArgumentError("relabeling needs at least two subjects");
    return [cohort = std::move(cohort)](Rng& rng) { return tabulate(cohort, balanced_labels(cohort.size(), rng)); };
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
    auto p = prefix;
    p += suffix;
    return p;
}

}  // namespace

void save_calibration(const NullCalibration& calib, const std::filesystem::path& prefix) {
    nlohmann::ordered_json header;
    header["statistic"] = calib.statistic_name;
    header["n_sims"] = calib.n_sims;
    header["alpha"] = calib.alpha;
    header["seed"] = calib.seed;
    header["quantile"] = calib.quantile;
    header["source"] = calib.source;
    header["sample_file"] = with_suffix(prefix, ".csv").filename().string();

    std::ofstream hj(with_suffix(prefix, ".json"), std::ios::binary);
    if (!hj) throw Error("cannot write " + with_suffix(prefix, ".json").string());
    hj << header.dump(2) << '\n';

    std::ofstream cs(with_suffix(prefix, ".csv"), std::ios::binary);
    if (!cs) throw Error("cannot write " + with_suffix(prefix, ".csv").string());
    cs << "value\n";
    char buf[64];
    for (double v : calib.sample) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        cs << buf;
    }
}

NullCalibration load_calibration(const std::filesystem::path& prefix) {
    std::ifstream hj(with_suffix(prefix, ".json"));
    if (!hj) throw Error("cannot read " + with_suffix(prefix, ".json").string());
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(hj);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("calibration header: ") + e.what());
    }

    std::ifstream cs(with_suffix(prefix, ".csv"));
    if (!cs) throw Error("cannot read " + with_suffix(prefix, ".csv").string());
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(cs, line) || line != "value") throw ParseError(1, "expected header 'value'");
    std::vector<double> sample;
    while (std::getline(cs, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) throw ParseError(lineno, "not a number");
        sample.push_back(v);
    }
    auto calib = calibration_from_sample(header.at("statistic").get<std::string>(), std::move(sample),
                                         header.at("alpha").get<double>(), header.at("seed").get<std::uint64_t>(),
                                         header.at("source").get<std::string>());
    if (calib.n_sims != header.at("n_sims").get<std::size_t>()) {
        throw ValidationError("calibration sample size does not match its header");
    }
    return calib;
}

}  // namespace survhc
