#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survhc/decay_sim.hpp"
#include "survhc/execution.hpp"
#include "survhc/resampling_null.hpp"
#include "survhc/statistic.hpp"

namespace survhc {

/// Pr(Binomial(N, p) >= k), 0 <= k <= N + 1.
double binom_sf(std::int64_t k, std::int64_t N, double p);

/// Power estimate as an exact count so N * B is always integral.
struct PowerEstimate {
    std::size_t rejections = 0;
    std::size_t n = 0;

    double power() const noexcept { return n ? static_cast<double>(rejections) / static_cast<double>(n) : 0.0; }
};

/// Pr(Binomial(N, alpha) >= N * B) <= alpha1.
bool substantial(const PowerEstimate& estimate, double alpha, double alpha1);
bool substantial(double power, std::size_t N, double alpha, double alpha1);

inline constexpr double default_alpha1 = 0.05;

struct LogisticFit {
    double theta0 = 0.0;
    double theta1 = 0.0;
    bool separated = false;  ///< indicators all 0 or all 1
    bool converged = false;
    int iterations = 0;
};

/// Ridge-penalized (1e-6) maximum likelihood for
/// Pr(indicator) = 1 / (1 + exp(theta1 r + theta0)), by damped Newton.
LogisticFit logistic_fit(const std::vector<double>& r, const std::vector<bool>& indicators);

/// Crossing point -theta0 / theta1; nullopt when theta1 == 0.
std::optional<double> rho_hat(double theta0, double theta1);

/// Detection boundary of HCHG: 0 for beta <= 1/2, 2(beta - 1/2) below 3/4,
/// 2(1 - sqrt(1 - beta))^2 from 3/4 on.
double rho_theory(double beta);

/// Boundary of the Bonferroni and FDR* tests: 2(1 - sqrt(1 - beta))^2 for
/// beta > 1/2, else 0.
double rho_bonf(double beta);

/// Describes a decay-model null so calibrations can be matched to cells.
std::string decay_null_source(const DecayParams& params, double gamma0);

/// Fraction of N H1 replicates whose statistic exceeds the calibrated quantile.
PowerEstimate power_cell(const DecayParams& params, StatisticKind statistic, const NullCalibration& calib,
                         std::size_t N, std::uint64_t seed, const Execution& exec = {},
                         double gamma0 = default_gamma0);

/// Null calibration of several statistics under the decay model at r = 0.
std::vector<NullCalibration> calibrate_decay_null(const DecayParams& params,
                                                  const std::vector<StatisticKind>& statistics,
                                                  std::size_t n_sims, double alpha, std::uint64_t seed,
                                                  const Execution& exec = {}, double gamma0 = default_gamma0);

struct GridConfig {
    std::vector<double> beta_grid;
    std::vector<double> r_grid;
    std::size_t T = 1000;
    std::size_t N = 1000;
    std::size_t N0 = 100000;
    double alpha = 0.05;
    double alpha1 = default_alpha1;
    double gamma0 = default_gamma0;
    std::vector<StatisticKind> statistics{StatisticKind::hchg};
    std::uint64_t master_seed = 0;
    std::optional<std::int64_t> x0, y0;
    std::optional<double> lambda_bar;
};

struct PowerGrid {
    StatisticKind statistic = StatisticKind::hchg;
    std::vector<double> beta_grid, r_grid;
    std::size_t N = 0;
    double alpha = 0.05, alpha1 = default_alpha1;
    std::vector<PowerEstimate> cells;  ///< beta-major
    std::vector<bool> substantial;
    NullCalibration calibration;

    const PowerEstimate& at(std::size_t bi, std::size_t ri) const { return cells[bi * r_grid.size() + ri]; }
    bool substantial_at(std::size_t bi, std::size_t ri) const { return substantial[bi * r_grid.size() + ri]; }
};

struct TransitionPoint {
    enum class Status : std::uint8_t { fitted, below_grid, above_grid, undefined };
    double beta = 0.0;
    LogisticFit fit;
    Status status = Status::undefined;
    std::optional<double> rho;  ///< set for fitted and below_grid
};

/// Per-cell paired comparison against the reference statistic (HCHG when
/// present, else the first). `pvalue` is the exact two-sided McNemar test on
/// the discordant replicates.
struct PairedComparison {
    StatisticKind reference = StatisticKind::hchg;
    StatisticKind other = StatisticKind::logrank;
    std::vector<std::size_t> ref_only, other_only;  ///< beta-major
    std::vector<double> pvalue;
};

struct GridResult {
    std::vector<PowerGrid> grids;                        ///< one per statistic, config order
    std::vector<std::vector<TransitionPoint>> curves;    ///< one per statistic, one point per beta
    std::vector<PairedComparison> comparisons;
};

/// One shared null calibration per statistic, then N replicates per cell.
/// Deterministic in master_seed whatever the thread count.
GridResult run_grid(const GridConfig& config, const Execution& exec = {});

/// Logistic fit of the substantiality indicators along one beta strip.
TransitionPoint fit_transition(double beta, const std::vector<double>& r_grid, const std::vector<bool>& indicators);

double mcnemar_pvalue(std::size_t b, std::size_t c);

std::string format_real(double v);
std::string render_power_matrix(const PowerGrid& grid);
std::string render_substantial_matrix(const PowerGrid& grid);
std::string render_transition_curve(const std::vector<TransitionPoint>& curve);
std::string render_comparison(const PairedComparison& cmp, const PowerGrid& grid);

}  // namespace survhc
