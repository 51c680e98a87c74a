#include "survhc/phase_transition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "binom_density.hpp"
#include "survhc/error.hpp"

namespace survhc {

double binom_sf(std::int64_t k, std::int64_t N, double p) {
    if (N < 0 || k < 0 || k > N + 1 || !(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("binom_sf requires 0 <= k <= N + 1 and p in [0, 1]");
    }
    if (k == 0) return 1.0;
    if (k > N) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    const long double q = 1.0L - p;
    const long double odds = static_cast<long double>(p) / q;
    long double term = detail::binom_point(static_cast<double>(k), static_cast<double>(N), p, 1.0 - p);
    long double sum = term;
    for (std::int64_t j = k; j < N && term > 0.0L; ++j) {
        const long double ratio = static_cast<long double>(N - j) / static_cast<long double>(j + 1) * odds;
        term *= ratio;
        sum += term;
        if (ratio < 1.0L && term < 1e-18L * sum) break;
    }
    return static_cast<double>(std::min(sum, 1.0L));
}

bool substantial(const PowerEstimate& estimate, double alpha, double alpha1) {
    const auto N = static_cast<std::int64_t>(estimate.n);
    return binom_sf(static_cast<std::int64_t>(estimate.rejections), N, alpha) <= alpha1;
}

bool substantial(double power, std::size_t N, double alpha, double alpha1) {
    const auto k = std::llround(power * static_cast<double>(N));
    if (k < 0 || static_cast<std::size_t>(k) > N) throw ArgumentError("power must lie in [0, 1]");
    return substantial(PowerEstimate{static_cast<std::size_t>(k), N}, alpha, alpha1);
}

namespace {

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

// Probability of indicator = 1 under the decreasing-in-eta parametrization.
double prob(double eta) { return 1.0 / (1.0 + std::exp(eta)); }

}  // namespace

LogisticFit logistic_fit(const std::vector<double>& r, const std::vector<bool>& indicators) {
    if (r.size() != indicators.size() || r.size() < 2) {
        throw ArgumentError("logistic fit needs two or more paired observations");
    }
    constexpr double ridge = 1e-6;
    constexpr double tolerance = 1e-8;
    constexpr int max_iter = 100;

    LogisticFit fit;
    const auto ones = std::count(indicators.begin(), indicators.end(), true);
    fit.separated = ones == 0 || static_cast<std::size_t>(ones) == indicators.size();

    auto objective = [&](double t0, double t1) {
        double f = 0.5 * ridge * (t0 * t0 + t1 * t1);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double eta = t1 * r[i] + t0;
            // -log p = softplus(eta), -log(1 - p) = softplus(-eta)
            f += indicators[i] ? softplus(eta) : softplus(-eta);
        }
        return f;
    };

    double t0 = 0.0, t1 = 0.0;
    double f = objective(t0, t1);
    for (int iter = 0; iter < max_iter; ++iter) {
        double g0 = ridge * t0, g1 = ridge * t1;
        double h00 = ridge, h01 = 0.0, h11 = ridge;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double p = prob(t1 * r[i] + t0);
            const double resid = (indicators[i] ? 1.0 : 0.0) - p;
            const double w = p * (1.0 - p);
            g0 += resid;
            g1 += resid * r[i];
            h00 += w;
            h01 += w * r[i];
            h11 += w * r[i] * r[i];
        }
        fit.iterations = iter;
        if (std::max(std::fabs(g0), std::fabs(g1)) < tolerance) {
            fit.converged = true;
            break;
        }
        const double det = h00 * h11 - h01 * h01;
        if (!(det > 0.0)) break;
        const double s0 = (h11 * g0 - h01 * g1) / det;
        const double s1 = (h00 * g1 - h01 * g0) / det;

        double step = 1.0;
        bool improved = false;
        for (int half = 0; half < 60; ++half, step *= 0.5) {
            const double n0 = t0 - step * s0, n1 = t1 - step * s1;
            const double fn = objective(n0, n1);
            if (fn <= f) {
                t0 = n0;
                t1 = n1;
                f = fn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
        fit.iterations = iter + 1;
    }
    fit.theta0 = t0;
    fit.theta1 = t1;
    return fit;
}

std::optional<double> rho_hat(double theta0, double theta1) {
    if (theta1 == 0.0) return std::nullopt;
    return -theta0 / theta1;
}

double rho_theory(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (beta <= 0.5) return 0.0;
    if (beta < 0.75) return 2.0 * (beta - 0.5);
    const double a = 1.0 - std::sqrt(1.0 - beta);
    return 2.0 * a * a;
}

double rho_bonf(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (beta <= 0.5) return 0.0;
    const double a = 1.0 - std::sqrt(1.0 - beta);
    return 2.0 * a * a;
}

std::string decay_null_source(const DecayParams& params, double gamma0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "decay:T=%zu,x0=%lld,y0=%lld,lambda=%.17g,gamma0=%.17g", params.T,
                  static_cast<long long>(params.x0), static_cast<long long>(params.y0), params.lambda_bar, gamma0);
    return buf;
}

std::vector<NullCalibration> calibrate_decay_null(const DecayParams& params,
                                                  const std::vector<StatisticKind>& statistics,
                                                  std::size_t n_sims, double alpha, std::uint64_t seed,
                                                  const Execution& exec, double gamma0) {
    auto null_params = calibrate(params.T, params.beta, 0.0, params.x0, params.y0, params.lambda_bar);
    NullGenerator gen = [null_params](Rng& rng) { return simulate(null_params, Hypothesis::H0, rng).table; };
    MultiEvaluator eval = [&statistics, gamma0](const IntervalTable& t) {
        return score_all(statistics, t, Direction::y_excess, gamma0);
    };
    std::vector<std::string> names;
    for (auto s : statistics) names.emplace_back(statistic_name(s));
    return null_quantiles(gen, eval, names, n_sims, alpha, seed, exec, decay_null_source(params, gamma0));
}

PowerEstimate power_cell(const DecayParams& params, StatisticKind statistic, const NullCalibration& calib,
                         std::size_t N, std::uint64_t seed, const Execution& exec, double gamma0) {
    if (N == 0) throw ArgumentError("number of replicates must be positive");
    if (calib.statistic_name != statistic_name(statistic) || calib.source != decay_null_source(params, gamma0)) {
        throw ArgumentError("calibration does not match statistic '" + std::string(statistic_name(statistic)) +
                            "' under " + decay_null_source(params, gamma0));
    }
    std::vector<char> rejected(N, 0);
    for_each_index(N, exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, {i}));
        const auto sim = simulate(params, Hypothesis::H1, rng);
        rejected[i] = score(statistic, sim.table, Direction::y_excess, gamma0) > calib.quantile ? 1 : 0;
    });
    return PowerEstimate{static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), 1)), N};
}

TransitionPoint fit_transition(double beta, const std::vector<double>& r_grid, const std::vector<bool>& indicators) {
    TransitionPoint point;
    point.beta = beta;
    // A single r value carries no slope; only the separation outcome is reported.
    if (r_grid.size() >= 2) {
        point.fit = logistic_fit(r_grid, indicators);
    } else {
        point.fit.separated = true;
    }
    const auto ones = std::count(indicators.begin(), indicators.end(), true);
    if (ones == static_cast<std::ptrdiff_t>(indicators.size())) {
        point.status = TransitionPoint::Status::below_grid;
        point.rho = *std::min_element(r_grid.begin(), r_grid.end());
    } else if (ones == 0) {
        point.status = TransitionPoint::Status::above_grid;
    } else if (auto rho = rho_hat(point.fit.theta0, point.fit.theta1)) {
        point.status = TransitionPoint::Status::fitted;
        point.rho = rho;
    } else {
        point.status = TransitionPoint::Status::undefined;
    }
    return point;
}

double mcnemar_pvalue(std::size_t b, std::size_t c) {
    const auto n = static_cast<std::int64_t>(b + c);
    if (n == 0) return 1.0;
    const auto m = static_cast<std::int64_t>(std::min(b, c));
    const double lower = 1.0 - binom_sf(m + 1, n, 0.5);  // Pr(Bin(n, 1/2) <= m)
    return std::min(1.0, 2.0 * lower);
}

GridResult run_grid(const GridConfig& config, const Execution& exec) {
    const auto& betas = config.beta_grid;
    const auto& rs = config.r_grid;
    if (betas.empty() || rs.empty()) throw ArgumentError("grids must be non-empty");
    if (!std::is_sorted(betas.begin(), betas.end()) || !std::is_sorted(rs.begin(), rs.end())) {
        throw ArgumentError("grids must be ascending");
    }
    for (double a : {config.alpha, config.alpha1}) {
        if (!(a > 0.0 && a < 1.0)) throw ArgumentError("levels must lie in (0, 1)");
    }
    if (config.statistics.empty()) throw ArgumentError("no statistics requested");
    if (config.N == 0 || config.N0 == 0) throw ArgumentError("replicate counts must be positive");

    // Every cell is validated up front so errors name their coordinates.
    std::vector<DecayParams> cell_params;
    cell_params.reserve(betas.size() * rs.size());
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
        for (std::size_t ri = 0; ri < rs.size(); ++ri) {
            try {
                cell_params.push_back(calibrate(config.T, betas[bi], rs[ri], config.x0, config.y0, config.lambda_bar));
            } catch (const Error& e) {
                throw ArgumentError("cell (beta=" + format_real(betas[bi]) + ", r=" + format_real(rs[ri]) +
                                    "): " + e.what());
            }
        }
    }

    const auto& stats = config.statistics;
    const auto k = stats.size();
    auto calibs = calibrate_decay_null(cell_params.front(), stats, config.N0, config.alpha,
                                       derive_seed(config.master_seed, {stream::model_null}), exec, config.gamma0);

    const auto cells = cell_params.size();
    const auto N = config.N;
    std::vector<char> rejected(cells * N * k, 0);
    for_each_index(cells * N, exec, [&](std::size_t job) {
        const auto cell = job / N, rep = job % N;
        const auto bi = cell / rs.size(), ri = cell % rs.size();
        Rng rng(derive_seed(config.master_seed, {stream::grid_cell, bi, ri, rep}));
        const auto sim = simulate(cell_params[cell], Hypothesis::H1, rng);
        const auto scores = score_all(stats, sim.table, Direction::y_excess, config.gamma0);
        for (std::size_t s = 0; s < k; ++s) rejected[job * k + s] = scores[s] > calibs[s].quantile ? 1 : 0;
    });

    GridResult result;
    for (std::size_t s = 0; s < k; ++s) {
        PowerGrid grid;
        grid.statistic = stats[s];
        grid.beta_grid = betas;
        grid.r_grid = rs;
        grid.N = N;
        grid.alpha = config.alpha;
        grid.alpha1 = config.alpha1;
        grid.calibration = calibs[s];
        for (std::size_t cell = 0; cell < cells; ++cell) {
            PowerEstimate est{0, N};
            for (std::size_t rep = 0; rep < N; ++rep) est.rejections += rejected[(cell * N + rep) * k + s];
            grid.cells.push_back(est);
            grid.substantial.push_back(substantial(est, config.alpha, config.alpha1));
        }
        std::vector<TransitionPoint> curve;
        for (std::size_t bi = 0; bi < betas.size(); ++bi) {
            std::vector<bool> strip(rs.size());
            for (std::size_t ri = 0; ri < rs.size(); ++ri) strip[ri] = grid.substantial_at(bi, ri);
            curve.push_back(fit_transition(betas[bi], rs, strip));
        }
        result.grids.push_back(std::move(grid));
        result.curves.push_back(std::move(curve));
    }

    auto ref_it = std::find(stats.begin(), stats.end(), StatisticKind::hchg);
    const std::size_t ref = ref_it == stats.end() ? 0 : static_cast<std::size_t>(ref_it - stats.begin());
    for (std::size_t s = 0; s < k; ++s) {
        if (s == ref) continue;
        PairedComparison cmp;
        cmp.reference = stats[ref];
        cmp.other = stats[s];
        for (std::size_t cell = 0; cell < cells; ++cell) {
            std::size_t b = 0, c = 0;
            for (std::size_t rep = 0; rep < N; ++rep) {
                const auto base = (cell * N + rep) * k;
                const bool a = rejected[base + ref], o = rejected[base + s];
                b += a && !o;
                c += o && !a;
            }
            cmp.ref_only.push_back(b);
            cmp.other_only.push_back(c);
            cmp.pvalue.push_back(mcnemar_pvalue(b, c));
        }
        result.comparisons.push_back(std::move(cmp));
    }
    return result;
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::string matrix(const PowerGrid& grid, bool powers) {
    std::ostringstream out;
    out << "beta";
    for (double r : grid.r_grid) out << ",r=" << format_real(r);
    out << '\n';
    for (std::size_t bi = 0; bi < grid.beta_grid.size(); ++bi) {
        out << format_real(grid.beta_grid[bi]);
        for (std::size_t ri = 0; ri < grid.r_grid.size(); ++ri) {
            out << ',';
            if (powers) {
                out << format_real(grid.at(bi, ri).power());
            } else {
                out << (grid.substantial_at(bi, ri) ? 1 : 0);
            }
        }
        out << '\n';
    }
    return out.str();
}

const char* status_name(TransitionPoint::Status s) {
    switch (s) {
        case TransitionPoint::Status::fitted: return "fitted";
        case TransitionPoint::Status::below_grid: return "below_grid";
        case TransitionPoint::Status::above_grid: return "above_grid";
        case TransitionPoint::Status::undefined: return "undefined";
    }
    return "undefined";
}

}  // namespace

std::string render_power_matrix(const PowerGrid& grid) { return matrix(grid, true); }
std::string render_substantial_matrix(const PowerGrid& grid) { return matrix(grid, false); }

std::string render_transition_curve(const std::vector<TransitionPoint>& curve) {
    std::ostringstream out;
    out << "beta,theta0,theta1,rho_hat,status,rho_theory,rho_bonf\n";
    for (const auto& p : curve) {
        out << format_real(p.beta) << ',' << format_real(p.fit.theta0) << ',' << format_real(p.fit.theta1) << ','
            << (p.rho ? format_real(*p.rho) : std::string("NA")) << ',' << status_name(p.status) << ','
            << format_real(rho_theory(p.beta)) << ',' << format_real(rho_bonf(p.beta)) << '\n';
    }
    return out.str();
}

std::string render_comparison(const PairedComparison& cmp, const PowerGrid& grid) {
    std::ostringstream out;
    out << "beta,r,power_diff,ref_only,other_only,pvalue\n";
    const auto N = static_cast<double>(grid.N);
    for (std::size_t bi = 0; bi < grid.beta_grid.size(); ++bi) {
        for (std::size_t ri = 0; ri < grid.r_grid.size(); ++ri) {
            const auto cell = bi * grid.r_grid.size() + ri;
            const double diff =
                (static_cast<double>(cmp.ref_only[cell]) - static_cast<double>(cmp.other_only[cell])) / N;
            out << format_real(grid.beta_grid[bi]) << ',' << format_real(grid.r_grid[ri]) << ','
                << format_real(diff) << ',' << cmp.ref_only[cell] << ',' << cmp.other_only[cell] << ','
                << format_real(cmp.pvalue[cell]) << '\n';
        }
    }
    return out.str();
}

}  // namespace survhc
