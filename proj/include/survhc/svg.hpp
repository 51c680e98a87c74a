#pragma once

#include <string>
#include <vector>

#include "survhc/data_model.hpp"
#include "survhc/phase_transition.hpp"

namespace survhc {

/// Step curves for both groups. Gray bars mark the intervals in
/// `highlighted` (0-based); "+" marks intervals with censoring.
std::string km_svg(const IntervalTable& table, const KaplanMeierCurve& curve,
                   const std::vector<std::size_t>& highlighted, const std::string& title);

/// Power heatmap over (beta, r) with the theoretical boundary and the fitted
/// transition points overlaid.
std::string heatmap_svg(const PowerGrid& grid, const std::vector<TransitionPoint>& curve, const std::string& title);

}  // namespace survhc
