#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/execution.hpp"
#include "survhc/rng.hpp"

namespace survhc {

/// Empirical null distribution of one statistic.
struct NullCalibration {
    std::string statistic_name;
    std::size_t n_sims = 0;
    std::vector<double> sample;  ///< ascending
    double alpha = 0.05;
    double quantile = 0.0;       ///< sample[ceil((1 - alpha) n_sims)], 1-based
    std::uint64_t seed = 0;
    std::string source;          ///< describes the null generator; used to match caches

    friend bool operator==(const NullCalibration&, const NullCalibration&) = default;
};

using NullGenerator = std::function<IntervalTable(Rng&)>;
using StatisticEvaluator = std::function<double(const IntervalTable&)>;
using MultiEvaluator = std::function<std::vector<double>(const IntervalTable&)>;

/// 1-based rank ceil((1 - alpha) n) used for the critical value.
std::size_t quantile_rank(std::size_t n, double alpha);

/// Builds the calibration from an unsorted null sample.
NullCalibration calibration_from_sample(std::string name, std::vector<double> sample, double alpha,
                                        std::uint64_t seed, std::string source = {});

/// Replicate i draws from a generator seeded with derive_seed(seed, {i}).
NullCalibration null_quantile(const NullGenerator& generator, const StatisticEvaluator& statistic,
                              std::size_t n_sims, double alpha, std::uint64_t seed,
                              const Execution& exec = {}, std::string name = "statistic",
                              std::string source = {});

/// Several statistics scored on the same null replicates.
std::vector<NullCalibration> null_quantiles(const NullGenerator& generator, const MultiEvaluator& statistics,
                                            const std::vector<std::string>& names, std::size_t n_sims,
                                            double alpha, std::uint64_t seed, const Execution& exec = {},
                                            std::string source = {});

/// (1 + #{null >= observed}) / (1 + N0).
double empirical_pvalue(double observed, const NullCalibration& calib);

/// Exactly floor(n/2) x labels and ceil(n/2) y labels, uniformly arranged.
std::vector<Group> balanced_labels(std::size_t n, Rng& rng);

/// Relabels subjects at random; times and statuses stay in place.
SurvivalDataset permute_groups(const SurvivalDataset& data, Rng& rng);

/// Label-free view of a binned cohort: one entry per subject holding the bin
/// where it left observation. Bin T + 1 marks subjects still at risk after
/// the last interval.
struct BinnedCohort {
    enum class Exit : std::uint8_t { event, censored, survived };
    std::size_t intervals = 0;
    std::vector<std::uint32_t> bin;  ///< 1-based
    std::vector<Exit> exit;

    std::size_t size() const noexcept { return bin.size(); }
    /// Order-independent fingerprint of the cohort.
    std::uint64_t fingerprint() const;
};

BinnedCohort cohort_from_table(const IntervalTable& table);

/// Table for the cohort under the given group labels.
IntervalTable tabulate(const BinnedCohort& cohort, const std::vector<Group>& labels);

/// Random half/half relabeling of the cohort, tabulated.
NullGenerator permutation_null(BinnedCohort cohort);

/// Writes `<prefix>.json` (header) and `<prefix>.csv` (sorted sample).
void save_calibration(const NullCalibration& calib, const std::filesystem::path& prefix);
NullCalibration load_calibration(const std::filesystem::path& prefix);

}  // namespace survhc
