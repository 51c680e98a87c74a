#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/rng.hpp"

namespace survhc {

/// Piece-wise homogeneous exponential decay with rare excess hazard in group y.
struct DecayParams {
    std::size_t T = 0;
    std::int64_t x0 = 0, y0 = 0;
    double lambda_bar = 0.0;
    double beta = 0.5;
    double r = 0.0;

    double epsilon = 0.0;               ///< T^-beta
    std::vector<double> delta;          ///< delta(t), t = 1..T at index t-1
    std::vector<double> lambda_prime;   ///< (sqrt(lambda_bar) + sqrt(delta(t)))^2

    /// Expected pooled at-risk size ((x0 + y0) / 2) e^(-lambda_bar t).
    double mean_at_risk(std::size_t t) const;
};

/// Materializes the calibrated schedules. Defaults: x0 = y0 = round(T ln T),
/// lambda_bar = 2 / T.
DecayParams calibrate(std::size_t T, double beta, double r, std::optional<std::int64_t> x0 = std::nullopt,
                      std::optional<std::int64_t> y0 = std::nullopt,
                      std::optional<double> lambda_bar = std::nullopt);

std::int64_t default_initial_size(std::size_t T);

enum class Hypothesis : std::uint8_t { H0, H1 };

struct SimOutcome {
    IntervalTable table;
    std::vector<std::size_t> nonnull;  ///< 1-based intervals in I, ascending
    std::uint64_t seed = 0;            ///< recorded by callers that seed from a master
};

/// Draws one cohort. RNG consumption is fixed: T membership draws for I
/// (made under both hypotheses), then for each t the x and y event counts.
/// Event counts are clamped at the current at-risk size.
SimOutcome simulate(const DecayParams& params, Hypothesis hypothesis, Rng& rng);

/// `t` values of I, one per line, with a `t` header.
std::string render_nonnull(const SimOutcome& outcome);

}  // namespace survhc
