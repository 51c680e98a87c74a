#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace survhc {

enum class Status : std::uint8_t { event, censored };
enum class Group : std::uint8_t { x, y };

struct SubjectRecord {
    double time = 0.0;
    Status status = Status::event;
    Group group = Group::x;

    friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

struct SurvivalDataset {
    std::vector<SubjectRecord> subjects;

    std::size_t size() const noexcept { return subjects.size(); }
    std::size_t count(Group g) const noexcept;
};

/// Per-interval two-group counts. Index 0 of each vector is interval t = 1.
///
/// `n_*_prev[t]` is the number at risk at the start of the interval, `o_*`
/// the events and `c_*` the censorings inside it.
struct IntervalTable {
    std::vector<std::int64_t> n_x_prev, n_y_prev;
    std::vector<std::int64_t> o_x, o_y;
    std::vector<std::int64_t> c_x, c_y;

    std::size_t intervals() const noexcept { return n_x_prev.size(); }

    /// At risk in group x/y after interval t (0-based index).
    std::int64_t n_x_after(std::size_t t) const { return n_x_prev[t] - o_x[t] - c_x[t]; }
    std::int64_t n_y_after(std::size_t t) const { return n_y_prev[t] - o_y[t] - c_y[t]; }

    /// Same data with the roles of x and y exchanged.
    IntervalTable swapped() const;

    /// Throws ValidationError naming the offending interval.
    void validate() const;

    friend bool operator==(const IntervalTable&, const IntervalTable&) = default;
};

/// Survival proportion per group at t = 1..T.
struct KaplanMeierCurve {
    std::vector<double> s_x, s_y;
};

SurvivalDataset parse_subjects(std::istream& in);
SurvivalDataset parse_subjects(const std::string& text);

/// Reads `t,n_x_prev,n_y_prev,o_x,o_y[,c_x,c_y]`. Missing censor columns are
/// reconstructed from the at-risk recursion.
IntervalTable parse_intervals(std::istream& in);
IntervalTable parse_intervals(const std::string& text);

/// Canonical writer: `t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y`.
std::string render_intervals(const IntervalTable& table);

/// Bins subject times into `bins` equal-width intervals ((t-1)w, tw] with
/// w = max_time / bins; time 0 falls in the first bin.
IntervalTable bin_subjects(const SurvivalDataset& data, std::size_t bins);

/// 1-based bin of `time` for width max_time / bins.
std::size_t bin_index(double time, double max_time, std::size_t bins);

/// s(t) = n(t) / (n(0) - C(t)) with C the cumulative censored count; the
/// value is 0 once the denominator reaches 0.
KaplanMeierCurve km_curve(const IntervalTable& table);

}  // namespace survhc
