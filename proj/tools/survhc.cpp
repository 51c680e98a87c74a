// survhc: command-line front end for the survival HC tests.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "survhc/classic_tests.hpp"
#include "survhc/data_model.hpp"
#include "survhc/decay_sim.hpp"
#include "survhc/error.hpp"
#include "survhc/execution.hpp"
#include "survhc/hchg.hpp"
#include "survhc/phase_transition.hpp"
#include "survhc/resampling_null.hpp"
#include "survhc/rng.hpp"
#include "survhc/statistic.hpp"
#include "survhc/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace survhc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_internal = 3;

Execution execution_from(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("SURVHC_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                throw ArgumentError(std::string("SURVHC_THREADS is not an integer: ") + env);
            }
        }
    }
    if (threads < 0) throw ArgumentError("thread count must be non-negative");
    return Execution::parallel(threads);
}

std::string read_all(const std::string& path) {
    if (path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

struct LoadedInput {
    IntervalTable table;
    std::optional<std::size_t> subjects;
};

LoadedInput load_table(const std::string& path, const std::string& format, std::size_t bins) {
    const auto text = read_all(path);
    LoadedInput in;
    if (format == "subjects") {
        if (bins == 0) throw ArgumentError("--bins is required for subject input");
        auto data = parse_subjects(text);
        in.subjects = data.size();
        in.table = bin_subjects(data, bins);
    } else {
        in.table = parse_intervals(text);
    }
    return in;
}

json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* direction_label(Direction d) { return d == Direction::y_excess ? "y" : "x"; }

// Degeneracy as seen by the user: no information in the data for this statistic.
bool degenerate(StatisticKind kind, const IntervalTable& table, Direction dir, double gamma0) {
    const auto oriented = dir == Direction::y_excess ? table : table.swapped();
    switch (kind) {
        case StatisticKind::hchg: return !hc_statistic(interval_pvalues(table, dir), gamma0).computable();
        case StatisticKind::fisher:
        case StatisticKind::minp:
        case StatisticKind::fdrstar: {
            const auto p = interval_pvalues(table, dir);
            return std::all_of(p.values.begin(), p.values.end(), [](double v) { return v == 1.0; });
        }
        default: return logrank(oriented).degenerate;
    }
}

// ---------------------------------------------------------------- test

struct TestOptions {
    std::string input;
    std::string format = "subjects";
    std::size_t bins = 0;
    std::string mode = "one-sided-y";
    double alpha = 0.05;
    std::size_t null_sims = 10000;
    double gamma0 = default_gamma0;
    std::uint64_t seed = 0;
    std::string null_cache;
    std::string stats = "hchg,logrank";
    std::string out;
    int threads = 0;
};

std::vector<json> delta_star_rows(const IntervalTable& table, const HchgResult& r) {
    std::vector<json> rows;
    for (auto t : r.delta_star) {
        json row;
        row["t"] = t + 1;
        row["n_x_prev"] = table.n_x_prev[t];
        row["n_y_prev"] = table.n_y_prev[t];
        row["o_x"] = table.o_x[t];
        row["o_y"] = table.o_y[t];
        row["p"] = r.pvalues.values[t];
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_test(const TestOptions& o) {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ArgumentError("--alpha must lie in (0, 1)");
    if (!(o.gamma0 > 0.0 && o.gamma0 <= 1.0)) throw ArgumentError("--gamma0 must lie in (0, 1]");
    if (o.null_sims == 0) throw ArgumentError("--null-sims must be positive");
    const auto exec = execution_from(o.threads);
    const auto kinds = parse_statistic_list(o.stats);
    const auto input = load_table(o.input, o.format, o.bins);
    const auto& table = input.table;

    std::vector<Direction> dirs;
    if (o.mode == "one-sided-y") {
        dirs = {Direction::y_excess};
    } else if (o.mode == "one-sided-x") {
        dirs = {Direction::x_excess};
    } else {
        dirs = {Direction::y_excess, Direction::x_excess};
    }

    const auto cohort = cohort_from_table(table);
    if (cohort.size() < 2) throw ValidationError("the relabeling null needs at least two subjects");
    const auto null_seed = derive_seed(o.seed, {stream::permutation});

    // One calibration per (statistic, direction), all scored on the same relabelings.
    struct Slot {
        StatisticKind kind;
        Direction dir;
        std::string name;
        std::string source;
        std::optional<NullCalibration> calib;
    };
    std::vector<Slot> slots;
    for (auto d : dirs) {
        for (auto k : kinds) {
            Slot s{k, d, std::string(statistic_name(k)) + (d == Direction::x_excess ? "-x" : ""), {}, {}};
            s.source = "relabel:cohort=" + hex64(cohort.fingerprint()) + ",direction=" + direction_label(d) +
                       ",gamma0=" + real17(o.gamma0);
            slots.push_back(std::move(s));
        }
    }

    if (!o.null_cache.empty()) {
        fs::create_directories(o.null_cache);
        for (auto& s : slots) {
            const auto prefix = fs::path(o.null_cache) / s.name;
            if (!fs::exists(fs::path(prefix).concat(".json"))) continue;
            try {
                auto c = load_calibration(prefix);
                if (c.source == s.source && c.n_sims == o.null_sims && c.seed == null_seed &&
                    c.statistic_name == s.name) {
                    // The quantile depends on alpha; rebuild it from the cached sample.
                    s.calib = calibration_from_sample(s.name, c.sample, o.alpha, c.seed, c.source);
                }
            } catch (const Error&) {
                // A stale or damaged cache entry is recomputed and overwritten.
            }
        }
    }

    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i].calib) missing.push_back(i);
    }
    if (!missing.empty()) {
        std::vector<StatisticKind> want_y, want_x;
        std::vector<std::string> names;
        for (auto i : missing) {
            (slots[i].dir == Direction::y_excess ? want_y : want_x).push_back(slots[i].kind);
        }
        for (auto i : missing) {
            if (slots[i].dir == Direction::y_excess) names.push_back(slots[i].name);
        }
        for (auto i : missing) {
            if (slots[i].dir == Direction::x_excess) names.push_back(slots[i].name);
        }
        const double gamma0 = o.gamma0;
        MultiEvaluator eval = [&want_y, &want_x, gamma0](const IntervalTable& t) {
            std::vector<double> v;
            if (!want_y.empty()) v = score_all(want_y, t, Direction::y_excess, gamma0);
            if (!want_x.empty()) {
                auto x = score_all(want_x, t, Direction::x_excess, gamma0);
                v.insert(v.end(), x.begin(), x.end());
            }
            return v;
        };
        auto calibs = null_quantiles(permutation_null(cohort), eval, names, o.null_sims, o.alpha, null_seed, exec);
        for (auto& c : calibs) {
            for (auto& s : slots) {
                if (s.name == c.statistic_name) {
                    c.source = s.source;
                    s.calib = c;
                }
            }
        }
        if (!o.null_cache.empty()) {
            for (auto i : missing) save_calibration(*slots[i].calib, fs::path(o.null_cache) / slots[i].name);
        }
    }

    json report;
    json manifest;
    manifest["command"] = "test";
    manifest["input"] = o.input;
    manifest["format"] = o.format;
    if (o.format == "subjects") manifest["bins"] = o.bins;
    manifest["mode"] = o.mode;
    manifest["alpha"] = o.alpha;
    manifest["null_sims"] = o.null_sims;
    manifest["gamma0"] = o.gamma0;
    manifest["seed"] = o.seed;
    std::vector<std::string> stat_names;
    for (auto k : kinds) stat_names.emplace_back(statistic_name(k));
    manifest["statistics"] = stat_names;
    manifest["null"] = "relabel";
    manifest["intervals"] = table.intervals();
    manifest["subjects"] = cohort.size();
    report["manifest"] = manifest;

    json results = json::array();
    for (auto k : kinds) {
        json entry;
        entry["statistic"] = statistic_name(k);
        json per_dir = json::object();
        bool rej_y = false, rej_x = false;
        for (auto& s : slots) {
            if (s.kind != k) continue;
            const double value = score(k, table, s.dir, o.gamma0);
            const bool deg = degenerate(k, table, s.dir, o.gamma0);
            const bool reject = !deg && value > s.calib->quantile;
            json d;
            d["value"] = number_or_null(value);
            d["degenerate"] = deg;
            d["critical_value"] = number_or_null(s.calib->quantile);
            d["empirical_pvalue"] = empirical_pvalue(value, *s.calib);
            d["reject"] = reject;
            per_dir[direction_label(s.dir)] = d;
            (s.dir == Direction::y_excess ? rej_y : rej_x) = reject;
        }
        entry["directions"] = per_dir;

        json decision;
        decision["mode"] = o.mode;
        std::string outcome = "none";
        bool reject = false;
        if (o.mode == "one-sided-y") {
            reject = rej_y;
            if (reject) outcome = "excess_y";
        } else if (o.mode == "one-sided-x") {
            reject = rej_x;
            if (reject) outcome = "excess_x";
        } else if (o.mode == "strict") {
            reject = rej_y != rej_x;
            if (reject) outcome = rej_y ? "strict_y" : "strict_x";
            else if (rej_y && rej_x) outcome = "both_directions";
        } else {
            reject = rej_y || rej_x;
            if (reject) outcome = rej_y && rej_x ? "both_directions" : rej_y ? "excess_y" : "excess_x";
        }
        decision["reject"] = reject;
        decision["outcome"] = outcome;
        entry["decision"] = decision;
        results.push_back(entry);
    }
    report["results"] = results;

    json hc = json::object();
    for (auto d : dirs) {
        const auto r = hc_statistic(interval_pvalues(table, d), o.gamma0);
        json h;
        h["statistic"] = number_or_null(r.statistic);
        h["gamma0"] = r.gamma0;
        h["argmax_rank"] = r.argmax_rank;
        h["threshold_p"] = r.computable() ? json(r.threshold_p) : json(nullptr);
        h["delta_star"] = delta_star_rows(table, r);
        hc[direction_label(d)] = h;
    }
    report["hchg"] = hc;

    write_text(o.out, report.dump(2) + "\n");
    return exit_ok;
}

// ------------------------------------------------------------ simulate

struct SimulateOptions {
    std::size_t T = 0;
    double beta = 0.5;
    double r = 0.0;
    std::optional<std::int64_t> x0, y0;
    std::optional<double> lambda;
    std::string hypothesis = "h1";
    std::uint64_t seed = 0;
    std::string out;
    std::string truth;
    int threads = 0;
};

std::string sidecar_path(const std::string& out) {
    fs::path p(out);
    auto stem = p.stem().string();
    return (p.parent_path() / (stem + ".nonnull.csv")).string();
}

int cmd_simulate(const SimulateOptions& o) {
    (void)execution_from(o.threads);
    const auto params = calibrate(o.T, o.beta, o.r, o.x0, o.y0, o.lambda);
    auto rng = make_rng(o.seed, {});
    auto outcome = simulate(params, o.hypothesis == "h0" ? Hypothesis::H0 : Hypothesis::H1, rng);
    outcome.seed = o.seed;
    write_text(o.out, render_intervals(outcome.table));
    std::string truth = o.truth;
    if (truth.empty() && !o.out.empty() && o.out != "-") truth = sidecar_path(o.out);
    if (!truth.empty()) write_text(truth, render_nonnull(outcome));
    return exit_ok;
}

// ---------------------------------------------------------- power-grid

std::vector<double> parse_grid(const std::string& spec, const char* flag) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError(std::string(flag) + ": not a number '" + item + "'");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw ArgumentError(std::string(flag) + " must be a:b:step or a single value");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || !(b >= a)) throw ArgumentError(std::string(flag) + " needs b >= a and step > 0");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double v = a + static_cast<double>(k) * step;
        if (v > b + 1e-9) break;
        out.push_back(std::round(v * 1e9) / 1e9);
        if (out.size() > 100000) throw ArgumentError(std::string(flag) + " has too many points");
    }
    return out;
}

struct GridOptions {
    std::string beta_grid;
    std::string r_grid;
    std::size_t T = 1000;
    std::size_t N = 1000;
    std::size_t N0 = 100000;
    double alpha = 0.05;
    double alpha1 = default_alpha1;
    double gamma0 = default_gamma0;
    std::string stats = "hchg";
    std::uint64_t seed = 0;
    std::optional<std::int64_t> x0, y0;
    std::optional<double> lambda;
    std::string out;
    bool svg = false;
    int threads = 0;
};

int cmd_power_grid(const GridOptions& o) {
    const auto exec = execution_from(o.threads);
    GridConfig cfg;
    cfg.beta_grid = parse_grid(o.beta_grid, "--beta-grid");
    cfg.r_grid = parse_grid(o.r_grid, "--r-grid");
    cfg.T = o.T;
    cfg.N = o.N;
    cfg.N0 = o.N0;
    cfg.alpha = o.alpha;
    cfg.alpha1 = o.alpha1;
    cfg.gamma0 = o.gamma0;
    cfg.statistics = parse_statistic_list(o.stats);
    cfg.master_seed = o.seed;
    cfg.x0 = o.x0;
    cfg.y0 = o.y0;
    cfg.lambda_bar = o.lambda;
    const auto result = run_grid(cfg, exec);

    const fs::path dir(o.out);
    fs::create_directories(dir);
    json manifest;
    manifest["command"] = "power-grid";
    manifest["beta_grid"] = cfg.beta_grid;
    manifest["r_grid"] = cfg.r_grid;
    manifest["T"] = cfg.T;
    const auto p0 = calibrate(cfg.T, cfg.beta_grid.front(), 0.0, cfg.x0, cfg.y0, cfg.lambda_bar);
    manifest["x0"] = p0.x0;
    manifest["y0"] = p0.y0;
    manifest["lambda_bar"] = p0.lambda_bar;
    manifest["N"] = cfg.N;
    manifest["N0"] = cfg.N0;
    manifest["alpha"] = cfg.alpha;
    manifest["alpha1"] = cfg.alpha1;
    manifest["gamma0"] = cfg.gamma0;
    manifest["seed"] = cfg.master_seed;
    json stats = json::array();
    for (std::size_t s = 0; s < result.grids.size(); ++s) {
        const auto& g = result.grids[s];
        const std::string name(statistic_name(g.statistic));
        write_text((dir / ("power_" + name + ".csv")).string(), render_power_matrix(g));
        write_text((dir / ("substantial_" + name + ".csv")).string(), render_substantial_matrix(g));
        write_text((dir / ("transition_" + name + ".csv")).string(), render_transition_curve(result.curves[s]));
        if (o.svg) {
            write_text((dir / ("heatmap_" + name + ".svg")).string(),
                       heatmap_svg(g, result.curves[s], "Empirical power of " + name));
        }
        json st;
        st["statistic"] = name;
        st["critical_value"] = number_or_null(g.calibration.quantile);
        st["null_sims"] = g.calibration.n_sims;
        st["null_source"] = g.calibration.source;
        stats.push_back(st);
    }
    for (const auto& cmp : result.comparisons) {
        const std::string name(statistic_name(cmp.other));
        std::size_t other = 0;
        for (std::size_t s = 0; s < result.grids.size(); ++s) {
            if (result.grids[s].statistic == cmp.other) other = s;
        }
        write_text((dir / ("power_diff_" + name + ".csv")).string(), render_comparison(cmp, result.grids[other]));
    }
    manifest["statistics"] = stats;
    if (!result.comparisons.empty()) manifest["comparison_reference"] = statistic_name(result.comparisons[0].reference);
    write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return exit_ok;
}

// ------------------------------------------------------------------ km

struct KmOptions {
    std::string input;
    std::string format = "subjects";
    std::size_t bins = 0;
    std::string svg;
    std::string out;
    double alpha = 0.05;
    std::size_t null_sims = 10000;
    double gamma0 = default_gamma0;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_km(const KmOptions& o) {
    const auto exec = execution_from(o.threads);
    const auto input = load_table(o.input, o.format, o.bins);
    const auto& table = input.table;
    const auto curve = km_curve(table);

    std::vector<std::size_t> delta;
    std::string title = "Kaplan-Meier";
    if (o.null_sims > 0) {
        if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ArgumentError("--alpha must lie in (0, 1)");
        const auto hc = hc_statistic(interval_pvalues(table), o.gamma0);
        delta = hc.delta_star;
        const auto cohort = cohort_from_table(table);
        if (cohort.size() < 2) throw ValidationError("the relabeling null needs at least two subjects");
        const double gamma0 = o.gamma0;
        auto calib = null_quantile(
            permutation_null(cohort), [gamma0](const IntervalTable& t) { return score(StatisticKind::hchg, t, Direction::y_excess, gamma0); },
            o.null_sims, o.alpha, derive_seed(o.seed, {stream::permutation}), exec, "hchg");
        char buf[160];
        std::snprintf(buf, sizeof buf, "HCHG = %s, critical value %s, P = %.4g", format_real(hc.statistic).c_str(),
                      format_real(calib.quantile).c_str(), empirical_pvalue(hc.statistic, calib));
        title = buf;
    }

    std::ostringstream tsv;
    tsv << "t\ts_x\ts_y\tc_x\tc_y\tin_delta\n";
    std::vector<char> in_delta(table.intervals(), 0);
    for (auto t : delta) in_delta[t] = 1;
    for (std::size_t t = 0; t < table.intervals(); ++t) {
        tsv << t + 1 << '\t' << format_real(curve.s_x[t]) << '\t' << format_real(curve.s_y[t]) << '\t'
            << table.c_x[t] << '\t' << table.c_y[t] << '\t' << (in_delta[t] ? 1 : 0) << '\n';
    }
    write_text(o.out, tsv.str());
    if (!o.svg.empty()) write_text(o.svg, km_svg(table, curve, delta, title));
    return exit_ok;
}

void add_threads(CLI::App* cmd, int& threads) {
    cmd->add_option("--threads", threads, "Worker threads (0: SURVHC_THREADS or the OpenMP default)")
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Higher Criticism tests for two-sample survival data"};
    app.require_subcommand(1);

    TestOptions test;
    auto* t = app.add_subcommand("test", "Test a cohort for excess risk");
    t->add_option("--input", test.input, "Input CSV ('-' for stdin)")->required();
    t->add_option("--format", test.format)->check(CLI::IsMember({"subjects", "intervals"}));
    t->add_option("--bins", test.bins, "Number of intervals when binning subjects");
    t->add_option("--mode", test.mode)->check(CLI::IsMember({"one-sided-y", "one-sided-x", "strict", "two-way"}));
    t->add_option("--alpha", test.alpha);
    t->add_option("--null-sims", test.null_sims);
    t->add_option("--gamma0", test.gamma0);
    t->add_option("--seed", test.seed);
    t->add_option("--null-cache", test.null_cache, "Directory of reusable null calibrations");
    t->add_option("--stats", test.stats, "Comma-separated statistics");
    t->add_option("--out", test.out, "Report path (default stdout)");
    add_threads(t, test.threads);

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Draw a cohort from the exponential decay model");
    s->add_option("--T", sim.T)->required();
    s->add_option("--beta", sim.beta);
    s->add_option("--r", sim.r);
    s->add_option("--x0", sim.x0);
    s->add_option("--y0", sim.y0);
    s->add_option("--lambda", sim.lambda);
    s->add_option("--hypothesis", sim.hypothesis)->check(CLI::IsMember({"h0", "h1"}));
    s->add_option("--seed", sim.seed);
    s->add_option("--out", sim.out, "Interval CSV (default stdout)");
    s->add_option("--truth", sim.truth, "Non-null interval list (default <out>.nonnull.csv)");
    add_threads(s, sim.threads);

    GridOptions grid;
    auto* g = app.add_subcommand("power-grid", "Power over a (beta, r) grid");
    g->add_option("--beta-grid", grid.beta_grid, "a:b:step")->required();
    g->add_option("--r-grid", grid.r_grid, "a:b:step")->required();
    g->add_option("--T", grid.T);
    g->add_option("--N", grid.N, "Replicates per cell");
    g->add_option("--N0", grid.N0, "Null replicates");
    g->add_option("--alpha", grid.alpha);
    g->add_option("--alpha1", grid.alpha1);
    g->add_option("--gamma0", grid.gamma0);
    g->add_option("--stats", grid.stats);
    g->add_option("--seed", grid.seed);
    g->add_option("--x0", grid.x0);
    g->add_option("--y0", grid.y0);
    g->add_option("--lambda", grid.lambda);
    g->add_option("--out", grid.out, "Output directory")->required();
    g->add_flag("--svg", grid.svg, "Also write heatmaps");
    add_threads(g, grid.threads);

    KmOptions km;
    auto* k = app.add_subcommand("km", "Kaplan-Meier curves with the HC departure set");
    k->add_option("--input", km.input)->required();
    k->add_option("--format", km.format)->check(CLI::IsMember({"subjects", "intervals"}));
    k->add_option("--bins", km.bins);
    k->add_option("--svg", km.svg, "SVG path");
    k->add_option("--out", km.out, "TSV path (default stdout)");
    k->add_option("--alpha", km.alpha);
    k->add_option("--null-sims", km.null_sims, "0 skips the test");
    k->add_option("--gamma0", km.gamma0);
    k->add_option("--seed", km.seed);
    add_threads(k, km.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*t) return cmd_test(test);
        if (*s) return cmd_simulate(sim);
        if (*g) return cmd_power_grid(grid);
        if (*k) return cmd_km(km);
    } catch (const ParseError& e) {
        std::cerr << "survhc: input error: " << e.what() << '\n';
        return exit_input;
    } catch (const ValidationError& e) {
        std::cerr << "survhc: invalid input: " << e.what() << '\n';
        return exit_input;
    } catch (const ArgumentError& e) {
        std::cerr << "survhc: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "survhc: internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}
